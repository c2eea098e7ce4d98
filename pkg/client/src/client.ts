/**
 * Vectorized client for the stepping server: one socket, strict
 * request/response, promise-based.
 */

import * as net from "net";

import {
  Frame,
  FrameDecoder,
  MsgType,
  SpecInfo,
  StepResult,
  packHello,
  packReset,
  packStep,
  unpackError,
  unpackFrame,
  unpackSpec,
  unpackStepResult,
} from "./protocol";

export interface Endpoint {
  host?: string;
  port?: number;
  path?: string; // unix socket
}

export function parseEndpoint(endpoint: string): Endpoint {
  if (endpoint.startsWith("unix:")) {
    return { path: endpoint.slice(5) };
  }
  const idx = endpoint.lastIndexOf(":");
  return { host: endpoint.slice(0, idx) || "127.0.0.1", port: Number(endpoint.slice(idx + 1)) };
}

export class EnvClient {
  readonly spec: SpecInfo;
  readonly nEnvs: number;
  readonly obsDim: number;
  readonly actionDim: number;

  private constructor(
    private sock: net.Socket,
    private decoder: FrameDecoder,
    private queue: Array<(body: Buffer) => void>,
    spec: SpecInfo,
  ) {
    this.spec = spec;
    this.nEnvs = spec.n_envs;
    this.obsDim = spec.obs_dim;
    this.actionDim = spec.action_dim;
  }

  static async connect(endpoint: string): Promise<EnvClient> {
    const target = parseEndpoint(endpoint);
    const sock = await new Promise<net.Socket>((resolve, reject) => {
      const s = target.path
        ? net.createConnection(target.path)
        : net.createConnection(target.port!, target.host);
      s.once("connect", () => resolve(s));
      s.once("error", reject);
    });
    sock.setNoDelay(true);
    const decoder = new FrameDecoder();
    const queue: Array<(body: Buffer) => void> = [];
    sock.on("data", (chunk: Buffer) => {
      for (const frame of decoder.push(chunk)) {
        const resolve = queue.shift();
        if (resolve) {
          resolve(frame);
        }
      }
    });
    const helloReply = await EnvClient.roundTripRaw(sock, queue, packHello());
    const frame = unpackFrame(helloReply);
    if (frame.msgType === MsgType.Error) {
      throw unpackError(frame.payload);
    }
    if (frame.msgType !== MsgType.Spec) {
      throw new Error(`expected Spec, got message type ${frame.msgType}`);
    }
    return new EnvClient(sock, decoder, queue, unpackSpec(frame.payload));
  }

  private static roundTripRaw(
    sock: net.Socket,
    queue: Array<(body: Buffer) => void>,
    frame: Buffer,
  ): Promise<Buffer> {
    return new Promise<Buffer>((resolve, reject) => {
      queue.push(resolve);
      sock.write(frame, (err) => err && reject(err));
    });
  }

  /** Ship a raw frame; resolves with the raw reply body (interop tests). */
  roundTrip(frame: Buffer): Promise<Buffer> {
    return EnvClient.roundTripRaw(this.sock, this.queue, frame);
  }

  private expectStepResult(body: Buffer): StepResult {
    const frame: Frame = unpackFrame(body);
    if (frame.msgType === MsgType.Error) {
      throw unpackError(frame.payload);
    }
    if (frame.msgType !== MsgType.StepResult) {
      throw new Error(`expected StepResult, got message type ${frame.msgType}`);
    }
    return unpackStepResult(body, frame.envCount, this.obsDim);
  }

  async reset(seeds: Array<number | bigint>): Promise<StepResult> {
    if (seeds.length !== this.nEnvs) {
      throw new Error(`need ${this.nEnvs} seeds, got ${seeds.length}`);
    }
    return this.expectStepResult(await this.roundTrip(packReset(seeds)));
  }

  /** actions: envCount x actionDim, row-major. */
  async step(actions: Float32Array): Promise<StepResult> {
    if (actions.length !== this.nEnvs * this.actionDim) {
      throw new Error(
        `need ${this.nEnvs}x${this.actionDim} actions, got ${actions.length} values`,
      );
    }
    return this.expectStepResult(await this.roundTrip(packStep(actions, this.nEnvs)));
  }

  close(): void {
    this.sock.destroy();
  }
}
