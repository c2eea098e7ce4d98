/**
 * Desk-scale smoke training on the reach task.
 *
 * A cross-entropy method fits a tiny linear feedback policy (hand-to-target
 * error -> left-arm actions) through the stepping server, then both the
 * trained policy and a random baseline are evaluated on a shared set of
 * seeded episodes. The claim is direction-only: trained mean return must
 * beat the random baseline.
 */

import { EnvClient } from "./client";
import { LayoutSegment } from "./protocol";

/** Deterministic 32-bit RNG (mulberry32). */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function gaussian(rng: () => number): number {
  // Box-Muller; rejection keeps log() finite
  let u = 0;
  while (u === 0) u = rng();
  return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * rng());
}

// the four left-arm entries of the 61-dim action vector
const LEFT_ARM_ACTIONS = [11, 12, 13, 14];
const N_FEATURES = 4; // [dx, dy, dz, 1]
export const POLICY_SIZE = LEFT_ARM_ACTIONS.length * N_FEATURES;

function segment(segments: LayoutSegment[], name: string): LayoutSegment {
  const found = segments.find((s) => s.name === name);
  if (!found) {
    throw new Error(`observation layout has no segment ${name}`);
  }
  return found;
}

export class ReachPolicy {
  constructor(public params: Float64Array) {
    if (params.length !== POLICY_SIZE) {
      throw new Error(`reach policy needs ${POLICY_SIZE} params`);
    }
  }

  /** Writes the env's action block in-place given its observation row. */
  act(
    obs: Float32Array,
    obsOffset: number,
    hand: LayoutSegment,
    target: LayoutSegment,
    actions: Float32Array,
    actionOffset: number,
  ): void {
    const features = new Float64Array(N_FEATURES);
    for (let axis = 0; axis < 3; axis++) {
      features[axis] =
        obs[obsOffset + target.offset + axis] - obs[obsOffset + hand.offset + axis];
    }
    features[3] = 1.0;
    for (let j = 0; j < LEFT_ARM_ACTIONS.length; j++) {
      let value = 0;
      for (let k = 0; k < N_FEATURES; k++) {
        value += this.params[j * N_FEATURES + k] * features[k];
      }
      actions[actionOffset + LEFT_ARM_ACTIONS[j]] = Math.max(-1, Math.min(1, value));
    }
  }
}

export type VectorPolicy = (obs: Float32Array, actions: Float32Array, step: number) => void;

export function randomVectorPolicy(nEnvs: number, actionDim: number, seed: number): VectorPolicy {
  const rng = makeRng(seed);
  return (_obs, actions) => {
    for (let i = 0; i < nEnvs * actionDim; i++) {
      actions[i] = 2 * rng() - 1;
    }
  };
}

export function policyVectorPolicy(
  policies: ReachPolicy[],
  client: EnvClient,
): VectorPolicy {
  const hand = segment(client.spec.layout.segments, "left_hand_pos");
  const target = segment(client.spec.layout.segments, "target_pos");
  const { obsDim, actionDim } = client;
  return (obs, actions) => {
    actions.fill(0);
    policies.forEach((policy, i) => {
      policy.act(obs, i * obsDim, hand, target, actions, i * actionDim);
    });
  };
}

/** Roll every env for `horizon` steps; returns per-env summed returns. */
export async function rollVector(
  client: EnvClient,
  seeds: number[],
  policy: VectorPolicy,
  horizon: number,
): Promise<Float64Array> {
  let result = await client.reset(seeds);
  const actions = new Float32Array(client.nEnvs * client.actionDim);
  const returns = new Float64Array(client.nEnvs);
  for (let t = 0; t < horizon; t++) {
    policy(result.obs, actions, t);
    result = await client.step(actions);
    for (let i = 0; i < client.nEnvs; i++) {
      returns[i] += result.rewards[i];
    }
  }
  return returns;
}

export interface CemOptions {
  iterations: number;
  eliteCount: number;
  horizon: number;
  seed: number;
  initialSigma: number;
}

export const DEFAULT_CEM: CemOptions = {
  iterations: 8,
  eliteCount: 4,
  horizon: 120,
  seed: 7,
  initialSigma: 0.6,
};

/** Population size equals the server pool size: one candidate per env. */
export async function trainCem(
  client: EnvClient,
  options: CemOptions = DEFAULT_CEM,
): Promise<{ policy: ReachPolicy; history: number[] }> {
  const pop = client.nEnvs;
  const rng = makeRng(options.seed);
  const mean = new Float64Array(POLICY_SIZE);
  const sigma = new Float64Array(POLICY_SIZE).fill(options.initialSigma);
  const history: number[] = [];

  for (let iter = 0; iter < options.iterations; iter++) {
    const candidates: ReachPolicy[] = [];
    for (let i = 0; i < pop; i++) {
      const params = new Float64Array(POLICY_SIZE);
      for (let k = 0; k < POLICY_SIZE; k++) {
        params[k] = mean[k] + sigma[k] * gaussian(rng);
      }
      candidates.push(new ReachPolicy(params));
    }
    // every candidate sees the same episode: identical seeds across envs
    const seeds = new Array(pop).fill(10_000 + iter);
    const returns = await rollVector(
      client,
      seeds,
      policyVectorPolicy(candidates, client),
      options.horizon,
    );
    const order = Array.from(returns.keys()).sort((a, b) => returns[b] - returns[a]);
    const elites = order.slice(0, options.eliteCount).map((i) => candidates[i]);
    history.push(returns[order[0]]);
    for (let k = 0; k < POLICY_SIZE; k++) {
      let m = 0;
      for (const elite of elites) m += elite.params[k];
      m /= elites.length;
      let v = 0;
      for (const elite of elites) v += (elite.params[k] - m) ** 2;
      mean[k] = m;
      sigma[k] = Math.sqrt(v / elites.length) + 0.05;
    }
  }
  return { policy: new ReachPolicy(mean), history };
}

/** Mean return over `episodes` seeded evaluation episodes (vectorized). */
export async function evaluate(
  client: EnvClient,
  policy: VectorPolicy,
  episodes: number,
  horizon: number,
  seedBase = 50_000,
): Promise<number> {
  const pop = client.nEnvs;
  const rounds = Math.ceil(episodes / pop);
  let total = 0;
  let counted = 0;
  for (let round = 0; round < rounds; round++) {
    const seeds = Array.from({ length: pop }, (_, i) => seedBase + round * pop + i);
    const returns = await rollVector(client, seeds, policy, horizon);
    for (let i = 0; i < pop && counted < episodes; i++, counted++) {
      total += returns[i];
    }
  }
  return total / episodes;
}

export async function main(): Promise<void> {
  const endpoint = process.argv[2] ?? "127.0.0.1:7801";
  const episodes = Number(process.argv[3] ?? 100);
  const client = await EnvClient.connect(endpoint);
  try {
    if (client.spec.task !== "reach") {
      throw new Error(`smoke training expects the reach task, server runs ${client.spec.task}`);
    }
    console.log(`training CEM reach policy against ${endpoint} (${client.nEnvs} envs)`);
    const { policy, history } = await trainCem(client);
    console.log(`best return per iteration: ${history.map((h) => h.toFixed(0)).join(", ")}`);
    const horizon = DEFAULT_CEM.horizon;
    const trained = await evaluate(client, policyVectorPolicy(
      new Array(client.nEnvs).fill(policy), client), episodes, horizon);
    const random = await evaluate(client,
      randomVectorPolicy(client.nEnvs, client.actionDim, 1), episodes, horizon);
    console.log(`trained mean return ${trained.toFixed(1)} vs random ${random.toFixed(1)} `
      + `over ${episodes} episodes x ${horizon} steps`);
    console.log(trained > random ? "smoke training beats the random baseline"
      : "smoke training FAILED to beat the random baseline");
    process.exitCode = trained > random ? 0 : 1;
  } finally {
    client.close();
  }
}

if (require.main === module) {
  main().catch((err) => {
    console.error(err);
    process.exit(1);
  });
}
