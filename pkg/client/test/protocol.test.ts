import { describe, expect, it } from "vitest";

import {
  FrameDecoder,
  MsgType,
  ServerError,
  packFrame,
  packHello,
  packReset,
  packStep,
  unpackError,
  unpackFrame,
  unpackStepResult,
} from "../src/protocol";

describe("framing", () => {
  it("round-trips a frame through pack/unpack", () => {
    const payload = Buffer.from([1, 2, 3, 4, 5]);
    const wire = packFrame(MsgType.Step, 7, payload);
    expect(wire.readUInt32LE(0)).toBe(wire.length - 4);
    const frame = unpackFrame(wire.subarray(4));
    expect(frame.msgType).toBe(MsgType.Step);
    expect(frame.envCount).toBe(7);
    expect(Buffer.from(frame.payload)).toEqual(payload);
  });

  it("rejects bad magic and versions", () => {
    const wire = packFrame(MsgType.Hello, 0, Buffer.alloc(0)).subarray(4);
    const corrupted = Buffer.from(wire);
    corrupted.write("XXXX", 0, "ascii");
    expect(() => unpackFrame(corrupted)).toThrow(/magic/);
    const wrongVersion = Buffer.from(wire);
    wrongVersion.writeUInt16LE(9, 4);
    expect(() => unpackFrame(wrongVersion)).toThrow(/version/);
  });

  it("hello has an empty payload", () => {
    const frame = unpackFrame(packHello().subarray(4));
    expect(frame.msgType).toBe(MsgType.Hello);
    expect(frame.payload.length).toBe(0);
  });
});

describe("payload encoding", () => {
  it("encodes seeds as little-endian u64", () => {
    const frame = unpackFrame(packReset([1, 2n ** 40n]).subarray(4));
    expect(frame.envCount).toBe(2);
    expect(frame.payload.readBigUInt64LE(0)).toBe(1n);
    expect(frame.payload.readBigUInt64LE(8)).toBe(2n ** 40n);
  });

  it("preserves f32 bit patterns exactly", () => {
    const values = new Float32Array([0.1, -1, 1, 3.14159, 1e-30, 65504]);
    const frame = unpackFrame(packStep(values, 1).subarray(4));
    for (let i = 0; i < values.length; i++) {
      const decoded = frame.payload.readFloatLE(4 * i);
      expect(Object.is(decoded, values[i])).toBe(true);
    }
  });

  it("decodes a step result with a terminal block", () => {
    const obsDim = 3;
    const payload = Buffer.alloc(2 * obsDim * 4 + 2 * 12 + 2 + 2 + 4 + obsDim * 4);
    let off = 0;
    for (const v of [1, 2, 3, 4, 5, 6]) {
      payload.writeFloatLE(v, off);
      off += 4;
    } // obs for 2 envs
    for (const v of [10, 20, 7, 13, 3, 7]) {
      payload.writeFloatLE(v, off);
      off += 4;
    } // rewards, dense, sparse
    payload.writeUInt8(0, off++); // dones
    payload.writeUInt8(1, off++);
    payload.writeUInt8(0, off++); // reasons
    payload.writeUInt8(4, off++); // success
    payload.writeUInt32LE(1, off);
    off += 4;
    for (const v of [9, 8, 7]) {
      payload.writeFloatLE(v, off);
      off += 4;
    }
    const body = packFrame(MsgType.StepResult, 2, payload).subarray(4);
    const result = unpackStepResult(Buffer.from(body), 2, obsDim);
    expect(Array.from(result.obs)).toEqual([1, 2, 3, 4, 5, 6]);
    expect(Array.from(result.rewards)).toEqual([10, 20]);
    expect(Array.from(result.dense)).toEqual([7, 13]);
    expect(Array.from(result.sparse)).toEqual([3, 7]);
    expect(Array.from(result.dones)).toEqual([0, 1]);
    expect(Array.from(result.reasons)).toEqual([0, 4]);
    expect(result.terminalObs.length).toBe(1);
    expect(Array.from(result.terminalObs[0])).toEqual([9, 8, 7]);
  });

  it("decodes error payloads", () => {
    const message = "bad shape";
    const payload = Buffer.alloc(6 + message.length);
    payload.writeUInt16LE(3, 0);
    payload.writeUInt32LE(message.length, 2);
    payload.write(message, 6, "utf-8");
    const err = unpackError(payload);
    expect(err).toBeInstanceOf(ServerError);
    expect(err.code).toBe(3);
    expect(err.message).toContain("bad shape");
  });
});

describe("stream decoding", () => {
  it("reassembles frames split across arbitrary chunk boundaries", () => {
    const frames = [
      packFrame(MsgType.Hello, 0, Buffer.alloc(0)),
      packFrame(MsgType.Step, 2, Buffer.from([9, 9, 9])),
      packFrame(MsgType.Reset, 1, Buffer.alloc(8)),
    ];
    const wire = Buffer.concat(frames);
    for (const chunkSize of [1, 2, 5, 7, wire.length]) {
      const decoder = new FrameDecoder();
      const out: Buffer[] = [];
      for (let off = 0; off < wire.length; off += chunkSize) {
        out.push(...decoder.push(wire.subarray(off, off + chunkSize)));
      }
      expect(out.length).toBe(3);
      expect(unpackFrame(out[1]).envCount).toBe(2);
    }
  });
});
