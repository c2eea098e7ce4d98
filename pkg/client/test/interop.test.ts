import { execFile } from "child_process";
import * as path from "path";
import { promisify } from "util";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { EnvClient } from "../src/client";
import { ClientEnvHandle } from "../src/env";
import { packReset, packStep } from "../src/protocol";
import { ServerHandle, startServer } from "./server_helper";

const execFileAsync = promisify(execFile);

const REPLAY_STEPS = 1000;

function actionLogRow(step: number, dim: number): Float32Array {
  const row = new Float32Array(dim);
  for (let j = 0; j < dim; j++) {
    row[j] = Math.fround((((step * 31 + j * 17) % 201) - 100) / 100);
  }
  return row;
}

describe("interop with the python server", () => {
  let server: ServerHandle;

  beforeAll(async () => {
    server = await startServer("reach", 1);
  }, 60_000);

  afterAll(() => server?.stop());

  it("handshake reports the reach contract", async () => {
    const client = await EnvClient.connect(server.endpoint);
    try {
      expect(client.spec.task).toBe("reach");
      expect(client.actionDim).toBe(61);
      expect(client.obsDim).toBe(157);
      expect(client.spec.episode_cap).toBe(1000);
      expect(client.spec.success_target).toBe(12000);
      const names = client.spec.layout.segments.map((s) => s.name);
      expect(names[0]).toBe("robot_base");
      expect(names).toContain("target_pos");
    } finally {
      client.close();
    }
  }, 30_000);

  it(
    "replayed action log is bit-identical to the python client's stream",
    async () => {
      // authoritative stream captured through the Python client
      const { stdout } = await execFileAsync(
        "python3",
        [path.join(__dirname, "capture_stream.py"), server.endpoint, String(REPLAY_STEPS)],
        { maxBuffer: 1 << 28 },
      );
      const expected = stdout.trim().split("\n");
      expect(expected.length).toBe(REPLAY_STEPS + 1);

      const client = await EnvClient.connect(server.endpoint);
      try {
        const received: string[] = [];
        received.push((await client.roundTrip(packReset([12345]))).toString("hex"));
        for (let step = 0; step < REPLAY_STEPS; step++) {
          const reply = await client.roundTrip(
            packStep(actionLogRow(step, client.actionDim), 1),
          );
          received.push(reply.toString("hex"));
        }
        expect(received.length).toBe(expected.length);
        for (let i = 0; i < expected.length; i++) {
          if (received[i] !== expected[i]) {
            throw new Error(`stream diverges at frame ${i}`);
          }
        }
      } finally {
        client.close();
      }
    },
    240_000,
  );

  it("single-env handle exposes step/reset with info", async () => {
    const env = await ClientEnvHandle.connect(server.endpoint);
    try {
      const obs = await env.reset(7);
      expect(obs.length).toBe(157);
      const outcome = await env.step(new Float32Array(61));
      expect(outcome.obs.length).toBe(157);
      expect(Number.isFinite(outcome.reward)).toBe(true);
      expect(outcome.done).toBe(false);
      expect(outcome.info.dense + outcome.info.sparse).toBeCloseTo(outcome.reward, 4);
    } finally {
      env.close();
    }
  }, 30_000);

  it("auto-reset surfaces the terminal observation", async () => {
    const env = await ClientEnvHandle.connect(server.endpoint);
    try {
      await env.reset(3);
      let sawDone = false;
      const zeros = new Float32Array(61);
      for (let t = 0; t < 1000; t++) {
        const outcome = await env.step(zeros);
        if (outcome.done) {
          sawDone = true;
          expect(outcome.info.reason).toBe("timeout");
          expect(outcome.info.terminalObs).not.toBeNull();
          expect(outcome.info.terminalObs!.length).toBe(157);
          break;
        }
      }
      expect(sawDone).toBe(true);
    } finally {
      env.close();
    }
  }, 240_000);
});

describe("multi-env ordering", () => {
  let server: ServerHandle;

  beforeAll(async () => {
    server = await startServer("stand", 3);
  }, 60_000);

  afterAll(() => server?.stop());

  it("keeps env responses in request order", async () => {
    const client = await EnvClient.connect(server.endpoint);
    try {
      await client.reset([1, 2, 3]);
      const actions = new Float32Array(3 * 61);
      actions.fill(1, 61, 122); // env 1 burns effort, distinct reward
      const result = await client.step(actions);
      expect(result.rewards[1]).toBeLessThan(result.rewards[0]);
      expect(result.rewards[0]).toBe(result.rewards[2]);
    } finally {
      client.close();
    }
  }, 30_000);
});
