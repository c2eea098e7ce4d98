"""Binary framing for the environment-stepping service.

Byte-exact layout is documented in docs/protocol.md; this module is the
single encoder/decoder used by the server, the bench harness, and the
Python test client. Everything is little-endian; observations and rewards
travel as 32-bit floats, seeds as unsigned 64-bit.
"""

import json
import struct

import numpy as np

MAGIC = b"HSV1"
VERSION = 1

MSG_HELLO = 1
MSG_SPEC = 2
MSG_RESET = 3
MSG_STEP = 4
MSG_STEP_RESULT = 5
MSG_ERROR = 6

ERR_MALFORMED = 1
ERR_VERSION = 2
ERR_BAD_SHAPE = 3
ERR_INTERNAL = 4

REASON_CODES = {None: 0, "timeout": 1, "failure_height": 2, "failure_collision": 3,
                "success": 4, "object_dropped": 5, "diverged": 6}
REASON_NAMES = {v: k for k, v in REASON_CODES.items()}

_HEADER = struct.Struct("<4sHBI")  # magic, version, msg_type, env_count
HEADER_SIZE = _HEADER.size


class ProtocolError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def pack_frame(msg_type: int, env_count: int, payload: bytes = b"",
               version: int = VERSION) -> bytes:
    header = _HEADER.pack(MAGIC, version, msg_type, env_count)
    body = header + payload
    return struct.pack("<I", len(body)) + body


def unpack_frame(body: bytes) -> tuple:
    """Decode a length-stripped frame into (msg_type, env_count, payload)."""
    if len(body) < HEADER_SIZE:
        raise ProtocolError(ERR_MALFORMED, "frame shorter than header")
    magic, version, msg_type, env_count = _HEADER.unpack_from(body, 0)
    if magic != MAGIC:
        raise ProtocolError(ERR_MALFORMED, f"bad magic {magic!r}")
    if version != VERSION:
        raise ProtocolError(ERR_VERSION, f"protocol version {version} unsupported")
    return msg_type, env_count, body[HEADER_SIZE:]


def pack_hello() -> bytes:
    return pack_frame(MSG_HELLO, 0)


def pack_spec(spec: dict, n_envs: int) -> bytes:
    blob = json.dumps(spec, sort_keys=True).encode("utf-8")
    return pack_frame(MSG_SPEC, n_envs, struct.pack("<I", len(blob)) + blob)


def unpack_spec(payload: bytes) -> dict:
    (length,) = struct.unpack_from("<I", payload, 0)
    return json.loads(bytes(payload[4:4 + length]).decode("utf-8"))


def pack_reset(seeds) -> bytes:
    arr = np.ascontiguousarray(seeds, dtype="<u8")
    return pack_frame(MSG_RESET, arr.shape[0], arr.tobytes())


def unpack_reset(env_count: int, payload: bytes) -> np.ndarray:
    expected = env_count * 8
    if len(payload) != expected:
        raise ProtocolError(ERR_BAD_SHAPE,
                            f"reset payload {len(payload)}B, expected {expected}B")
    return np.frombuffer(payload, dtype="<u8")


def pack_step(actions: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(actions, dtype="<f4")
    return pack_frame(MSG_STEP, arr.shape[0], arr.tobytes())


def unpack_step(env_count: int, action_dim: int, payload: bytes) -> np.ndarray:
    expected = env_count * action_dim * 4
    if len(payload) != expected:
        raise ProtocolError(ERR_BAD_SHAPE,
                            f"step payload {len(payload)}B, expected {expected}B "
                            f"({env_count} x {action_dim} f32)")
    return np.frombuffer(payload, dtype="<f4").reshape(env_count, action_dim)


def pack_step_result(obs, rewards, dense, sparse, dones, reasons, terminal_obs) -> bytes:
    n, obs_dim = obs.shape
    block = np.empty(n * (obs_dim + 3), dtype="<f4")
    block[:n * obs_dim] = obs.reshape(-1)
    block[n * obs_dim:n * (obs_dim + 1)] = rewards
    block[n * (obs_dim + 1):n * (obs_dim + 2)] = dense
    block[n * (obs_dim + 2):] = sparse
    flags = np.empty(2 * n, dtype=np.uint8)
    flags[:n] = dones
    flags[n:] = reasons
    parts = [block.tobytes(), flags.tobytes(), struct.pack("<I", len(terminal_obs))]
    for term in terminal_obs:
        parts.append(np.ascontiguousarray(term, dtype="<f4").tobytes())
    return pack_frame(MSG_STEP_RESULT, n, b"".join(parts))


def unpack_step_result(env_count: int, obs_dim: int, payload: bytes) -> dict:
    n = env_count
    # obs + rewards + dense + sparse form one contiguous f32 block
    block = np.frombuffer(payload, dtype="<f4", count=n * (obs_dim + 3))
    obs = block[:n * obs_dim].reshape(n, obs_dim)
    rewards = block[n * obs_dim:n * (obs_dim + 1)]
    dense = block[n * (obs_dim + 1):n * (obs_dim + 2)]
    sparse = block[n * (obs_dim + 2):]
    off = n * (obs_dim + 3) * 4
    flags = np.frombuffer(payload, dtype=np.uint8, count=2 * n, offset=off)
    dones = flags[:n]
    reasons = flags[n:]
    off += 2 * n
    (n_terminal,) = struct.unpack_from("<I", payload, off)
    off += 4
    terminal = []
    for _ in range(n_terminal):
        terminal.append(np.frombuffer(payload, dtype="<f4", count=obs_dim, offset=off))
        off += obs_dim * 4
    return {"obs": obs, "rewards": rewards, "dense": dense, "sparse": sparse,
            "dones": dones, "reasons": reasons, "terminal_obs": terminal}


def pack_error(code: int, message: str) -> bytes:
    blob = message.encode("utf-8")
    return pack_frame(MSG_ERROR, 0, struct.pack("<HI", code, len(blob)) + blob)


def unpack_error(payload: bytes) -> tuple:
    code, length = struct.unpack_from("<HI", payload, 0)
    return code, bytes(payload[6:6 + length]).decode("utf-8")


def read_frame(sock) -> bytes:
    """Read exactly one length-prefixed frame body from a socket; b'' on EOF.

    Never reads past the frame, so it is safe to mix with other readers on
    the same socket (the streaming FrameReader is the hot-path variant).
    """
    header = _recv_exact(sock, 4)
    if header is None:
        return b""
    (length,) = struct.unpack("<I", header)
    body = _recv_exact(sock, length)
    return bytes(body) if body is not None else b""


def _recv_exact(sock, n: int):
    buf = bytearray(n)
    view = memoryview(buf)
    got = 0
    while got < n:
        received = sock.recv_into(view[got:], n - got)
        if received == 0:
            return None
        got += received
    return buf


class FrameReader:
    """Streaming frame reader: one recv per wakeup in the common case.

    The returned memoryview is valid until the next read() call, so hot
    paths can decode without copying.
    """

    def __init__(self, sock, initial_capacity: int = 1 << 16):
        self._sock = sock
        self._buf = bytearray(initial_capacity)
        self._view = memoryview(self._buf)
        self._start = 0
        self._end = 0

    def read(self):
        while True:
            available = self._end - self._start
            if available >= 4:
                (length,) = struct.unpack_from("<I", self._buf, self._start)
                if available >= 4 + length:
                    frame = self._view[self._start + 4:self._start + 4 + length]
                    self._start += 4 + length
                    return frame
                self._ensure_room(4 + length)
            elif self._start and available:
                self._compact()
            if self._start == self._end:
                self._start = self._end = 0
            received = self._sock.recv_into(self._view[self._end:],
                                            len(self._buf) - self._end)
            if received == 0:
                return None
            self._end += received

    def _ensure_room(self, needed: int) -> None:
        if len(self._buf) - self._start >= needed and len(self._buf) - self._end > 0:
            return
        if needed > len(self._buf):
            new = bytearray(max(needed, 2 * len(self._buf)))
            new[:self._end - self._start] = self._buf[self._start:self._end]
            self._buf = new
            self._view = memoryview(self._buf)
        else:
            self._compact()
        self._end -= self._start
        self._start = 0

    def _compact(self) -> None:
        pending = self._end - self._start
        self._buf[:pending] = self._buf[self._start:self._end]
        self._start = 0
        self._end = pending
