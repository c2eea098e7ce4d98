/**
 * Binary framing for the environment-stepping server.
 *
 * Byte-exact mirror of docs/protocol.md in the parent package: every frame
 * is `u32 length | "HSV1" | u16 version | u8 msgType | u32 envCount |
 * payload`, all little-endian; float arrays are IEEE-754 f32, seeds u64.
 */

export const MAGIC = Buffer.from("HSV1", "ascii");
export const VERSION = 1;

export enum MsgType {
  Hello = 1,
  Spec = 2,
  Reset = 3,
  Step = 4,
  StepResult = 5,
  Error = 6,
}

export const HEADER_SIZE = 11; // magic(4) + version(2) + msgType(1) + envCount(4)

export interface Frame {
  msgType: MsgType;
  envCount: number;
  payload: Buffer;
}

export interface LayoutSegment {
  name: string;
  source: string;
  offset: number;
  len: number;
}

export interface SpecInfo {
  protocol: number;
  task: string;
  n_envs: number;
  obs_dim: number;
  action_dim: number;
  episode_cap: number;
  success_target: number;
  layout: { total_dim: number; segments: LayoutSegment[] };
  reason_codes: Record<string, string>;
}

export interface StepResult {
  obs: Float32Array; // envCount x obsDim, row-major
  rewards: Float32Array;
  dense: Float32Array;
  sparse: Float32Array;
  dones: Uint8Array;
  reasons: Uint8Array;
  terminalObs: Float32Array[];
  raw: Buffer; // the full frame body, for bit-exact comparisons
}

export class ServerError extends Error {
  constructor(public code: number, message: string) {
    super(`server error ${code}: ${message}`);
  }
}

export function packFrame(msgType: MsgType, envCount: number, payload: Buffer): Buffer {
  const body = Buffer.alloc(4 + HEADER_SIZE + payload.length);
  body.writeUInt32LE(HEADER_SIZE + payload.length, 0);
  MAGIC.copy(body, 4);
  body.writeUInt16LE(VERSION, 8);
  body.writeUInt8(msgType, 10);
  body.writeUInt32LE(envCount >>> 0, 11);
  payload.copy(body, 15);
  return body;
}

/** Decode a length-stripped frame body. */
export function unpackFrame(body: Buffer): Frame {
  if (body.length < HEADER_SIZE) {
    throw new Error(`frame shorter than header: ${body.length} bytes`);
  }
  if (!body.subarray(0, 4).equals(MAGIC)) {
    throw new Error(`bad magic ${body.subarray(0, 4).toString("hex")}`);
  }
  const version = body.readUInt16LE(4);
  if (version !== VERSION) {
    throw new Error(`unsupported protocol version ${version}`);
  }
  return {
    msgType: body.readUInt8(6),
    envCount: body.readUInt32LE(7),
    payload: body.subarray(HEADER_SIZE),
  };
}

export function packHello(): Buffer {
  return packFrame(MsgType.Hello, 0, Buffer.alloc(0));
}

export function packReset(seeds: Array<number | bigint>): Buffer {
  const payload = Buffer.alloc(8 * seeds.length);
  seeds.forEach((seed, i) => payload.writeBigUInt64LE(BigInt(seed), 8 * i));
  return packFrame(MsgType.Reset, seeds.length, payload);
}

export function packStep(actions: Float32Array, envCount: number): Buffer {
  const payload = Buffer.alloc(4 * actions.length);
  for (let i = 0; i < actions.length; i++) {
    payload.writeFloatLE(actions[i], 4 * i);
  }
  return packFrame(MsgType.Step, envCount, payload);
}

export function unpackSpec(payload: Buffer): SpecInfo {
  const length = payload.readUInt32LE(0);
  return JSON.parse(payload.subarray(4, 4 + length).toString("utf-8"));
}

export function unpackError(payload: Buffer): ServerError {
  const code = payload.readUInt16LE(0);
  const length = payload.readUInt32LE(2);
  return new ServerError(code, payload.subarray(6, 6 + length).toString("utf-8"));
}

function readF32Array(buf: Buffer, offset: number, count: number): Float32Array {
  const out = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    out[i] = buf.readFloatLE(offset + 4 * i);
  }
  return out;
}

export function unpackStepResult(body: Buffer, envCount: number, obsDim: number): StepResult {
  const payload = body.subarray(HEADER_SIZE);
  const n = envCount;
  let off = 0;
  const obs = readF32Array(payload, off, n * obsDim);
  off += 4 * n * obsDim;
  const rewards = readF32Array(payload, off, n);
  off += 4 * n;
  const dense = readF32Array(payload, off, n);
  off += 4 * n;
  const sparse = readF32Array(payload, off, n);
  off += 4 * n;
  const dones = new Uint8Array(payload.subarray(off, off + n));
  off += n;
  const reasons = new Uint8Array(payload.subarray(off, off + n));
  off += n;
  const nTerminal = payload.readUInt32LE(off);
  off += 4;
  const terminalObs: Float32Array[] = [];
  for (let t = 0; t < nTerminal; t++) {
    terminalObs.push(readF32Array(payload, off, obsDim));
    off += 4 * obsDim;
  }
  return { obs, rewards, dense, sparse, dones, reasons, terminalObs, raw: body };
}

/** Incremental length-prefixed frame splitter over a byte stream. */
export class FrameDecoder {
  private pending: Buffer = Buffer.alloc(0);

  push(chunk: Buffer): Buffer[] {
    this.pending = this.pending.length === 0 ? chunk : Buffer.concat([this.pending, chunk]);
    const frames: Buffer[] = [];
    while (this.pending.length >= 4) {
      const length = this.pending.readUInt32LE(0);
      if (this.pending.length < 4 + length) {
        break;
      }
      frames.push(this.pending.subarray(4, 4 + length));
      this.pending = this.pending.subarray(4 + length);
    }
    return frames;
  }
}
