/**
 * Single-environment step/reset handle over the vectorized client, the
 * surface most trainers expect. Requires a server pool of size 1.
 */

import { EnvClient } from "./client";
import { SpecInfo } from "./protocol";

export interface StepOutcome {
  obs: Float32Array;
  reward: number;
  done: boolean;
  info: {
    dense: number;
    sparse: number;
    reason: string | null;
    terminalObs: Float32Array | null;
  };
}

export class ClientEnvHandle {
  readonly spec: SpecInfo;
  readonly obsDim: number;
  readonly actionDim: number;
  readonly episodeCap: number;
  readonly successTarget: number;

  private constructor(private client: EnvClient) {
    this.spec = client.spec;
    this.obsDim = client.obsDim;
    this.actionDim = client.actionDim;
    this.episodeCap = client.spec.episode_cap;
    this.successTarget = client.spec.success_target;
  }

  static async connect(endpoint: string): Promise<ClientEnvHandle> {
    const client = await EnvClient.connect(endpoint);
    if (client.nEnvs !== 1) {
      client.close();
      throw new Error(`single-env handle needs a pool of 1, server has ${client.nEnvs}`);
    }
    return new ClientEnvHandle(client);
  }

  async reset(seed: number | bigint): Promise<Float32Array> {
    const result = await this.client.reset([seed]);
    return result.obs;
  }

  async step(action: Float32Array): Promise<StepOutcome> {
    if (action.length !== this.actionDim) {
      throw new Error(`action must have ${this.actionDim} dims, got ${action.length}`);
    }
    const result = await this.client.step(action);
    const reasonCode = result.reasons[0];
    return {
      obs: result.obs,
      reward: result.rewards[0],
      done: result.dones[0] === 1,
      info: {
        dense: result.dense[0],
        sparse: result.sparse[0],
        reason: reasonCode ? this.spec.reason_codes[String(reasonCode)] ?? null : null,
        terminalObs: result.terminalObs.length ? result.terminalObs[0] : null,
      },
    };
  }

  close(): void {
    this.client.close();
  }
}
