"""Throughput and latency benchmarks: kernels, stepping, server overhead."""

import statistics
import time

import numpy as np

from . import synth
from .config import load_task
from .episode.worker import TaskEnv
from .oracle import oracle_dense
from .rewards import kernels
from .rewards.tasks import compute_reward


def _time_loop(fn, n: int) -> list:
    samples = []
    for _ in range(n):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return samples


def p50(samples) -> float:
    return statistics.median(samples)


def bench_kernel(n: int = 1_000_000, reps: int = 5) -> dict:
    """Compare the compiled tolerance path against the numpy fallback."""
    rng = np.random.default_rng(0)
    xs = rng.uniform(-3.0, 3.0, n)
    u = rng.uniform(-1.0, 1.0, 61)
    kernels.warmup()

    def active_tol():
        kernels.tolerance_array(xs, 0.0, 1.0, 0.5, 0.1, kernels.SIG_GAUSSIAN)

    def numpy_tol():
        kernels.tolerance_array_numpy(xs, 0.0, 1.0, 0.5, 0.1, kernels.SIG_GAUSSIAN)

    def active_effort():
        kernels.effort_mean(u, 10.0, 0.1)

    def numpy_effort():
        kernels.effort_mean_numpy(u, 10.0, 0.1)

    report = {
        "numba_compiled": kernels.NUMBA_COMPILED,
        "array_n": n,
        "active_tolerance_s": p50(_time_loop(active_tol, reps)),
        "numpy_tolerance_s": p50(_time_loop(numpy_tol, reps)),
        "active_effort_us": p50(_time_loop(active_effort, 2000)) * 1e6,
        "numpy_effort_us": p50(_time_loop(numpy_effort, 2000)) * 1e6,
    }
    report["tolerance_speedup"] = report["numpy_tolerance_s"] / report["active_tolerance_s"]
    report["effort_speedup"] = report["numpy_effort_us"] / report["active_effort_us"]
    return report


def bench_direct_step(task_id: str = "stand", steps: int = 10_000,
                      backend: str = "scripted") -> dict:
    """p50 per-step latency of in-process stepping."""
    env = TaskEnv(task_id, backend=backend)
    env.reset(0)
    action = np.zeros(env.action_dim)
    kernels.warmup()
    for _ in range(50):
        env.step(action)
    env.reset(0)
    samples = []
    done_resets = 0
    for _ in range(steps):
        t0 = time.perf_counter()
        _, _, status, _ = env.step(action)
        samples.append(time.perf_counter() - t0)
        if status.terminated:
            env.reset(0)
            done_resets += 1
    return {"task": task_id, "steps": steps, "p50_us": p50(samples) * 1e6,
            "steps_per_s": 1.0 / p50(samples), "resets": done_resets}


def bench_server_overhead(task_id: str = "stand", steps: int = 10_000,
                          endpoint: str = "127.0.0.1:0") -> dict:
    """Server round-trip p50 at n_envs=1 against direct in-process stepping.

    The two paths are timed in interleaved blocks so clock-speed drift and
    background load hit both measurements equally.
    """
    from .server.client import EnvClient
    from .server.service import EnvServer

    env = TaskEnv(task_id)
    env.reset(0)
    direct_action = np.zeros(env.action_dim)
    kernels.warmup()

    server = EnvServer(task_id, 1, endpoint)
    server.start()
    direct_samples = []
    server_samples = []
    block = 250
    try:
        with EnvClient(server.bound_endpoint) as client:
            client.reset([0])
            action = np.zeros((1, client.action_dim), dtype=np.float32)
            for _ in range(100):  # warmup both paths
                client.step(action)
                env.step(direct_action)
            for _ in range(max(1, steps // block)):
                for _ in range(block):
                    t0 = time.perf_counter()
                    _, _, status, _ = env.step(direct_action)
                    direct_samples.append(time.perf_counter() - t0)
                    if status.terminated:
                        env.reset(0)
                for _ in range(block):
                    t0 = time.perf_counter()
                    client.step(action)
                    server_samples.append(time.perf_counter() - t0)
    finally:
        server.shutdown()

    direct_p50 = p50(direct_samples) * 1e6
    server_p50 = p50(server_samples) * 1e6
    return {
        "task": task_id,
        "steps": steps,
        "direct_p50_us": direct_p50,
        "server_p50_us": server_p50,
        "overhead_pct": 100.0 * (server_p50 - direct_p50) / direct_p50,
    }


def bench_pool_scaling(task_id: str = "stand", n_envs: int = 256,
                       steps: int = 50) -> dict:
    """Aggregate env-steps/sec of the pool versus a single env."""
    from .server.pool import EnvPool

    single = bench_direct_step(task_id, steps=min(2000, steps * 20))
    pool = EnvPool(task_id, n_envs)
    pool.reset_all(range(n_envs))
    actions = np.zeros((n_envs, pool.action_dim))
    pool.step(actions)
    t0 = time.perf_counter()
    for _ in range(steps):
        pool.step(actions)
    elapsed = time.perf_counter() - t0
    pool.close()
    rate = n_envs * steps / elapsed
    return {"task": task_id, "n_envs": n_envs,
            "pool_steps_per_s": rate,
            "single_steps_per_s": single["steps_per_s"],
            "scaling": rate / single["steps_per_s"]}


PROFILE_ORDER = ("feet_only", "simplified_body", "no_hands", "full")


def bench_fps(task_id: str = "walk", profiles=PROFILE_ORDER, seconds: float = 3.0,
              backend: str = "engine", assets_dir=None) -> dict:
    """Steps/sec per collision profile on a single worker.

    With the engine backend the report asserts only the relative ordering
    (feet_only > simplified_body > no_hands > full); the scripted backend
    produces a synthetic-labeled report with no assertion.
    """
    if backend != "engine":
        env = TaskEnv(task_id, backend=backend)
        env.reset(0)
        action = np.zeros(env.action_dim)
        n = 0
        t0 = time.perf_counter()
        while time.perf_counter() - t0 < seconds:
            _, _, status, _ = env.step(action)
            n += 1
            if status.terminated:
                env.reset(0)
        return {"backend": "synthetic", "fps": {p: n / seconds for p in profiles},
                "ordering_ok": None}

    from .backends.engine import engine_available
    if not engine_available():
        return {"backend": "engine", "skipped": "engine unavailable", "fps": {},
                "ordering_ok": None}

    fps = {}
    for profile in profiles:
        env = TaskEnv(task_id, backend="engine", collision_profile=profile,
                      variant="no_hands" if profile == "no_hands" else "full",
                      assets_dir=assets_dir)
        env.reset(0)
        action = np.zeros(env.action_dim)
        n = 0
        t0 = time.perf_counter()
        while time.perf_counter() - t0 < seconds:
            _, _, status, _ = env.step(action)
            n += 1
            if status.terminated:
                env.reset(0)
        fps[profile] = n / (time.perf_counter() - t0)
    ordered = [fps[p] for p in PROFILE_ORDER if p in fps]
    ordering_ok = all(a > b for a, b in zip(ordered, ordered[1:]))
    return {"backend": "engine", "fps": fps, "ordering_ok": ordering_ok}


def oracle_diff(task_id: str, n_states: int = 10_000, seed: int = 0,
                constants_override: dict = None) -> dict:
    """Max |kernel - oracle| over fuzzed synthetic states, per shared term."""
    kernel_task = load_task(task_id, constants_override=constants_override)
    oracle_task = load_task(task_id)
    rng = np.random.default_rng(seed)
    worst = {"dense": 0.0}
    for _ in range(n_states):
        state = synth.random_state(kernel_task, rng)
        action = synth.random_action(kernel_task, rng)
        episode = synth.random_episode(kernel_task, rng)
        breakdown = compute_reward(kernel_task, state, action, episode)
        reference = oracle_dense(oracle_task, state, action, episode)
        worst["dense"] = max(worst["dense"], abs(breakdown.dense - reference))
    return worst
