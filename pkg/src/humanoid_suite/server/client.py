"""Minimal Python client for the stepping service (tests and benchmarks)."""

import numpy as np

from . import protocol
from .service import open_client_socket


class ServerError(RuntimeError):
    def __init__(self, code: int, message: str):
        super().__init__(f"server error {code}: {message}")
        self.code = code


class EnvClient:
    def __init__(self, endpoint: str):
        self.sock = open_client_socket(endpoint)
        self._reader = protocol.FrameReader(self.sock)
        self.sock.sendall(protocol.pack_hello())
        msg_type, n_envs, payload = self._read()
        if msg_type != protocol.MSG_SPEC:
            raise RuntimeError(f"expected Spec, got message type {msg_type}")
        self.spec = protocol.unpack_spec(payload)
        self.n_envs = n_envs
        self.obs_dim = self.spec["obs_dim"]
        self.action_dim = self.spec["action_dim"]

    def close(self) -> None:
        self.sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _read(self) -> tuple:
        view = self._reader.read()
        if view is None:
            raise ConnectionError("server closed the connection")
        msg_type, env_count, payload = protocol.unpack_frame(view)
        if msg_type == protocol.MSG_ERROR:
            raise ServerError(*protocol.unpack_error(payload))
        # detach from the reader buffer before the next read reuses it
        return msg_type, env_count, bytes(payload)

    def reset(self, seeds) -> np.ndarray:
        self.sock.sendall(protocol.pack_reset(np.asarray(seeds, dtype=np.uint64)))
        msg_type, env_count, payload = self._read()
        return protocol.unpack_step_result(env_count, self.obs_dim, payload)["obs"]

    def step(self, actions: np.ndarray) -> dict:
        self.sock.sendall(protocol.pack_step(actions))
        msg_type, env_count, payload = self._read()
        return protocol.unpack_step_result(env_count, self.obs_dim, payload)

    def send_raw(self, frame: bytes) -> tuple:
        """Ship an arbitrary frame and return the raw reply (protocol tests)."""
        self.sock.sendall(frame)
        body = protocol.read_frame(self.sock)
        if not body:
            return None, None, None
        return protocol.unpack_frame(body)
