"""Pool of independent episode workers behind the stepping service."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..episode.worker import TaskEnv
from . import protocol


def episode_seed(reset_seed: int, episode_counter: int) -> int:
    """Deterministic per-episode seed chain, independent of scheduling."""
    return int(np.random.SeedSequence([int(reset_seed), episode_counter])
               .generate_state(1, dtype=np.uint64)[0])


class EnvPool:
    """N independent environments stepped in lockstep with auto-reset.

    Each environment is owned by exactly one slot; per-env results are
    merged by index, so outcomes never depend on worker scheduling.
    """

    def __init__(self, task_id: str, n_envs: int, backend: str = "scripted",
                 variant: str = "full", collision_profile: str = "full",
                 assets_dir=None, n_workers: int = 0):
        if n_envs < 1:
            raise ValueError("n_envs must be >= 1")
        self.envs = [TaskEnv(task_id, backend=backend, variant=variant,
                             collision_profile=collision_profile, assets_dir=assets_dir)
                     for _ in range(n_envs)]
        self.n_envs = n_envs
        self.task = self.envs[0].task
        self.obs_dim = self.envs[0].obs_dim
        self.action_dim = self.envs[0].action_dim
        self._reset_seeds = [0] * n_envs
        self._episode_counters = [0] * n_envs
        self._pool = ThreadPoolExecutor(max_workers=n_workers) if n_workers > 0 else None
        # reused per-step result buffers (rebuilt views are handed out per call)
        self._obs = np.empty((n_envs, self.obs_dim), dtype=np.float64)
        self._rewards = np.empty(n_envs)
        self._dense = np.empty(n_envs)
        self._sparse = np.empty(n_envs)
        self._dones = np.empty(n_envs, dtype=np.uint8)
        self._reasons = np.empty(n_envs, dtype=np.uint8)

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)

    def reset_all(self, seeds) -> np.ndarray:
        obs = np.empty((self.n_envs, self.obs_dim), dtype=np.float64)
        for i, (env, seed) in enumerate(zip(self.envs, seeds)):
            self._reset_seeds[i] = int(seed)
            self._episode_counters[i] = 0
            obs[i] = env.reset(episode_seed(int(seed), 0))
        return obs

    def _step_one(self, i: int, action: np.ndarray) -> tuple:
        env = self.envs[i]
        try:
            obs, breakdown, status, _ = env.step(action)
            reward = breakdown.total
            dense = breakdown.dense
            sparse = breakdown.sparse
            done = status.terminated
            reason = status.reason
        except RuntimeError:
            # diverged env: report and recycle it, others unaffected
            obs = np.zeros(self.obs_dim)
            reward = dense = sparse = 0.0
            done = True
            reason = "diverged"
        terminal = None
        if done:
            terminal = obs
            self._episode_counters[i] += 1
            obs = env.reset(episode_seed(self._reset_seeds[i], self._episode_counters[i]))
        return obs, reward, dense, sparse, done, reason, terminal

    def step(self, actions: np.ndarray) -> dict:
        n = self.n_envs
        obs, rewards = self._obs, self._rewards
        dense, sparse = self._dense, self._sparse
        dones, reasons = self._dones, self._reasons
        terminal_obs = []

        if self._pool is None:
            results = [self._step_one(i, actions[i]) for i in range(n)]
        else:
            results = list(self._pool.map(self._step_one, range(n), actions))

        for i, (o, r, d, s, done, reason, terminal) in enumerate(results):
            obs[i] = o
            rewards[i] = r
            dense[i] = d
            sparse[i] = s
            dones[i] = 1 if done else 0
            reasons[i] = protocol.REASON_CODES[reason]
            if terminal is not None:
                terminal_obs.append(terminal)
        return {"obs": obs, "rewards": rewards, "dense": dense, "sparse": sparse,
                "dones": dones, "reasons": reasons, "terminal_obs": terminal_obs}
