"""The long-running environment-stepping service."""

import logging
import os
import socket
import threading

import numpy as np

from . import protocol
from .pool import EnvPool

log = logging.getLogger("humanoid_suite.server")


def parse_endpoint(endpoint: str) -> tuple:
    """'host:port' for TCP or 'unix:/path' for a unix stream socket."""
    if endpoint.startswith("unix:"):
        return ("unix", endpoint[5:])
    host, _, port = endpoint.rpartition(":")
    return ("tcp", (host or "127.0.0.1", int(port)))


def open_client_socket(endpoint: str) -> socket.socket:
    kind, addr = parse_endpoint(endpoint)
    if kind == "unix":
        sock = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
        sock.connect(addr)
    else:
        sock = socket.create_connection(addr)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    return sock


class EnvServer:
    """Serves one environment pool to one connection at a time."""

    def __init__(self, task_id: str, n_envs: int, endpoint: str,
                 backend: str = "scripted", variant: str = "full",
                 collision_profile: str = "full", assets_dir=None,
                 n_workers: int = 0):
        self.pool = EnvPool(task_id, n_envs, backend=backend, variant=variant,
                            collision_profile=collision_profile,
                            assets_dir=assets_dir, n_workers=n_workers)
        self.endpoint = endpoint
        self._kind, self._addr = parse_endpoint(endpoint)
        self._listener = None
        self._stop = threading.Event()
        self._thread = None

    # ------------------------------------------------------------------

    def spec_dict(self) -> dict:
        pool = self.pool
        task = pool.task
        return {
            "protocol": protocol.VERSION,
            "task": task.id,
            "n_envs": pool.n_envs,
            "obs_dim": pool.obs_dim,
            "action_dim": pool.action_dim,
            "episode_cap": task.episode_cap,
            "success_target": task.success_target,
            "layout": pool.envs[0].layout.to_manifest(),
            "reason_codes": {str(code): name
                             for code, name in protocol.REASON_NAMES.items() if name},
        }

    def bind(self) -> None:
        if self._kind == "unix":
            if os.path.exists(self._addr):
                os.unlink(self._addr)
            self._listener = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
            self._listener.bind(self._addr)
        else:
            self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
            self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            self._listener.bind(self._addr)
            self._addr = self._listener.getsockname()
        self._listener.listen(1)
        self._listener.settimeout(0.2)

    @property
    def bound_endpoint(self) -> str:
        if self._kind == "unix":
            return f"unix:{self._addr}"
        return f"{self._addr[0]}:{self._addr[1]}"

    def serve_forever(self) -> None:
        if self._listener is None:
            self.bind()
        # machine-readable line for clients that spawn the server
        print(f"listening on {self.bound_endpoint}", flush=True)
        log.info("serving %s x%d on %s", self.pool.task.id, self.pool.n_envs,
                 self.bound_endpoint)
        try:
            while not self._stop.is_set():
                try:
                    conn, _ = self._listener.accept()
                except socket.timeout:
                    continue
                if self._kind == "tcp":
                    conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
                try:
                    self._serve_connection(conn)
                finally:
                    conn.close()
        finally:
            self._listener.close()
            if self._kind == "unix" and os.path.exists(self._addr):
                os.unlink(self._addr)
            self.pool.close()

    def start(self) -> None:
        """Run the accept loop in a daemon thread (tests, --serve wrapper)."""
        self.bind()
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()

    def shutdown(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)

    # ------------------------------------------------------------------

    def _serve_connection(self, conn) -> None:
        pool = self.pool
        reader = protocol.FrameReader(conn)
        while not self._stop.is_set():
            body = reader.read()
            if body is None:
                return
            try:
                msg_type, env_count, payload = protocol.unpack_frame(body)
            except protocol.ProtocolError as err:
                conn.sendall(protocol.pack_error(err.code, str(err)))
                if err.code == protocol.ERR_VERSION:
                    return  # version mismatch closes the connection
                continue
            try:
                if msg_type == protocol.MSG_STEP:
                    if env_count != pool.n_envs:
                        raise protocol.ProtocolError(
                            protocol.ERR_BAD_SHAPE,
                            f"step for {env_count} envs, pool has {pool.n_envs}")
                    actions = protocol.unpack_step(env_count, pool.action_dim, payload)
                    result = pool.step(actions)
                    conn.sendall(protocol.pack_step_result(
                        result["obs"], result["rewards"], result["dense"],
                        result["sparse"], result["dones"], result["reasons"],
                        result["terminal_obs"]))
                elif msg_type == protocol.MSG_HELLO:
                    conn.sendall(protocol.pack_spec(self.spec_dict(), pool.n_envs))
                elif msg_type == protocol.MSG_RESET:
                    seeds = protocol.unpack_reset(env_count, payload)
                    if env_count != pool.n_envs:
                        raise protocol.ProtocolError(
                            protocol.ERR_BAD_SHAPE,
                            f"reset for {env_count} envs, pool has {pool.n_envs}")
                    obs = pool.reset_all(seeds)
                    n = pool.n_envs
                    conn.sendall(protocol.pack_step_result(
                        obs, np.zeros(n), np.zeros(n), np.zeros(n),
                        np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8), []))
                else:
                    raise protocol.ProtocolError(protocol.ERR_MALFORMED,
                                                 f"unexpected message type {msg_type}")
            except protocol.ProtocolError as err:
                conn.sendall(protocol.pack_error(err.code, str(err)))


def serve(task_id: str, n_envs: int, endpoint: str, **kwargs) -> None:
    EnvServer(task_id, n_envs, endpoint, **kwargs).serve_forever()
