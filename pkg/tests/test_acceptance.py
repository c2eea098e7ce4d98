"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its measured value and pinned tolerance.

Run with `pytest tests/test_acceptance.py -v -s` for the full report.
Engine-backend criteria skip with a notice when the engine extra is not
installed.
"""

import time

import numpy as np
import pytest

from humanoid_suite import oracle, synth
from humanoid_suite.backends.engine import engine_available
from humanoid_suite.config import load_task
from humanoid_suite.episode import machine
from humanoid_suite.episode.worker import TaskEnv
from humanoid_suite.rewards import kernels
from humanoid_suite.rewards.tasks import compute_reward
from humanoid_suite.rewards.tolerance import Bounds, ToleranceSpec, tolerance
from humanoid_suite.server.client import EnvClient
from humanoid_suite.server.pool import episode_seed
from humanoid_suite.server.service import EnvServer

# one representative per distinct reward formula; variants of sit/balance/
# bookshelf/insert share programs and constants, giving the benchmark's 27
FORMULA_TASKS = [
    "walk", "stand", "run", "reach", "hurdle", "crawl", "maze", "sit_simple",
    "balance_simple", "stair", "slide", "pole", "push", "cabinet", "highbar",
    "door", "truck", "cube", "bookshelf_simple", "basketball", "window",
    "spoon", "kitchen", "package", "powerlift", "room", "insert_normal",
]


def report(name: str, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")


# ---------------------------------------------------------------------------


def test_tolerance_suite():
    """10,000 fuzzed tolerance cases in under a second."""
    rng = np.random.default_rng(2024)
    kernels.warmup()
    n = 10_000
    t0 = time.perf_counter()
    margin_ok = True
    inside_ok = True
    monotone_ok = True
    for _ in range(n // 10):
        lo = rng.uniform(-50, 50)
        width = rng.uniform(0, 20)
        margin = rng.uniform(1e-3, 30)
        spec = ToleranceSpec(Bounds(lo, lo + width), margin)
        # 4 inside draws must be exactly 1
        for x in rng.uniform(lo, lo + width, 4):
            inside_ok &= tolerance(float(x), spec) == 1.0
        # value at margin distance must equal 0.1 within 1e-12
        for edge in (lo - margin, lo + width + margin):
            margin_ok &= abs(tolerance(edge, spec) - 0.1) <= 1e-12
        # decay is monotone in distance outside the bounds
        distances = np.sort(rng.uniform(0, 5 * margin, 4))
        values = [tolerance(lo + width + float(d), spec) for d in distances]
        monotone_ok &= all(a >= b for a, b in zip(values, values[1:]))
    elapsed = time.perf_counter() - t0
    ok = inside_ok and margin_ok and monotone_ok and elapsed < 1.0
    report("tolerance-suite", ok,
           f"{n} cases in {elapsed:.3f}s; inside==1 {inside_ok}, "
           f"margin==0.1±1e-12 {margin_ok}, monotone {monotone_ok}")
    assert inside_ok and margin_ok and monotone_ok
    assert elapsed < 1.0, f"tolerance suite took {elapsed:.3f}s (budget 1s)"


def test_oracle_equivalence_27_tasks():
    """10,000 synthetic states per task formula, |kernel - reference| < 1e-9."""
    n_states = 10_000
    t0 = time.perf_counter()
    worst = {}
    for tid in FORMULA_TASKS:
        task = load_task(tid)
        rng = np.random.default_rng(31337)
        m = 0.0
        for _ in range(n_states):
            state = synth.random_state(task, rng)
            action = synth.random_action(task, rng)
            episode = synth.random_episode(task, rng)
            kernel = compute_reward(task, state, action, episode).dense
            reference = oracle.oracle_dense(task, state, action, episode)
            err = abs(kernel - reference)
            if err > m:
                m = err
        worst[tid] = m
    elapsed = time.perf_counter() - t0
    peak = max(worst.values())
    ok = peak < 1e-9 and elapsed < 120.0
    report("oracle-equivalence", ok,
           f"{len(FORMULA_TASKS)} tasks x {n_states} states, max |delta| = "
           f"{peak:.3e} (< 1e-9), runtime {elapsed:.1f}s (< 120s)")
    assert peak < 1e-9, f"worst per-task deltas: {worst}"
    assert elapsed < 120.0


def test_termination_and_staging_suite():
    """Printed caps, thresholds, success predicates, and bonus schedules."""
    checks = []

    def expect(label, cond):
        checks.append((label, bool(cond)))

    caps = {"push": 500, "cube": 500, "basketball": 500, "kitchen": 500,
            "walk": 1000, "stand": 1000, "run": 1000, "reach": 1000,
            "cabinet": 1000, "truck": 1000, "insert_small": 1000}
    for tid, cap in caps.items():
        expect(f"{tid} cap {cap}", load_task(tid).episode_cap == cap)

    heights = {"walk": 0.2, "maze": 0.2, "powerlift": 0.2, "room": 0.3,
               "sit_simple": 0.5, "cube": 0.5, "basketball": 0.5,
               "door": 0.58, "window": 0.58, "pole": 0.6, "balance_simple": 0.8}
    for tid, thr in heights.items():
        task = load_task(tid)
        expect(f"{tid} pelvis<{thr}", task.termination["pelvis_below"] == thr)
        state = synth.random_state(task, np.random.default_rng(0), allow_contacts=False)
        state.step_index = 1
        state.body_pose["pelvis"][2] = thr - 1e-6
        state.body_pose["head"][2] = 2.5
        state.z_proj = 0.95
        for drop in task.termination.get("drops", ()):
            state.body_pose[drop["body"]][2] = drop["below"] + 0.1
        _clear_success(task, state)
        status = machine.check_termination(task, state, synth.SynthEpisode())
        expect(f"{tid} fires failure_height", status.reason == "failure_height")

    # success predicates at the printed distances
    task = load_task("push")
    state = synth.random_state(task, np.random.default_rng(1), allow_contacts=False)
    state.step_index = 1
    state.body_pose["box"][:3] = [0.5, 0, 0.95]
    state.site_pos["box_destination"] = np.array([0.549, 0, 0.95])
    expect("push succeeds at d<0.05",
           machine.check_termination(task, state, synth.SynthEpisode()).reason == "success")
    task = load_task("package")
    state = synth.random_state(task, np.random.default_rng(2), allow_contacts=False)
    state.step_index = 1
    state.body_pose["package"][:3] = [1.0, 0, 0.5]
    state.site_pos["package_destination"] = np.array([1.099, 0, 0.5])
    expect("package succeeds at d<0.1",
           machine.check_termination(task, state, synth.SynthEpisode()).reason == "success")

    # cabinet bonus ladder 100/200/300/400 + 1000, each paid once
    task = load_task("cabinet")
    from humanoid_suite.backends.scripted import ScriptedBackend
    backend = ScriptedBackend(task)
    episode = machine.reset(task, 0, backend)
    paid = []
    for mutate in (lambda: backend.set_scene_joint("cabinet_slide", 0.4),
                   lambda: backend.set_scene_joint("cabinet_drawer", 0.45),
                   lambda: backend.set_object("cabinet_cube", pos=[0.9, 0, 0.94]),
                   lambda: backend.set_object("cabinet_cube", pos=[0.9, 0, 1.54])):
        mutate()
        episode, bonus = machine.advance_task_stage(task, backend.snapshot(), episode)
        paid.append(bonus)
    expect("cabinet ladder 100..400 +1000", paid == [100.0, 200.0, 300.0, 1400.0])
    episode, repeat = machine.advance_task_stage(task, backend.snapshot(), episode)
    expect("cabinet bonuses once", repeat == 0.0)

    # bookshelf in-order 100*i; maze checkpoint i*100
    task = load_task("bookshelf_simple")
    backend = ScriptedBackend(task)
    episode = machine.reset(task, 0, backend)
    total = 0.0
    for i in range(5):
        backend.set_object(f"shelf_obj_{i}", pos=backend.snapshot().site_pos[f"shelf_dest_{i}"])
        episode, bonus = machine.advance_task_stage(task, backend.snapshot(), episode)
        total += bonus
    expect("bookshelf 100*i schedule", total == 1500.0)

    task = load_task("maze")
    backend = ScriptedBackend(task)
    episode = machine.reset(task, 0, backend)
    backend.set_root_pose(task.stages["checkpoints"][0], [1, 0, 0, 0])
    episode, b1 = machine.advance_task_stage(task, backend.snapshot(), episode)
    backend.set_root_pose(task.stages["checkpoints"][1], [1, 0, 0, 0])
    episode, b2 = machine.advance_task_stage(task, backend.snapshot(), episode)
    expect("maze i*100 schedule", (b1, b2) == (100.0, 200.0))

    failed = [label for label, ok in checks if not ok]
    report("termination-staging", not failed,
           f"{len(checks)} printed predicates checked, failures: {failed or 'none'}")
    assert not failed


def _clear_success(task, state):
    success = task.termination.get("success")
    if success and success["kind"] == "distance_below":
        a_kind, a_name = success["a"].split(":", 1)
        b_kind, b_name = success["b"].split(":", 1)
        a = state.body_pose[a_name][:3] if a_kind == "body" else state.site_pos[a_name]
        far = np.asarray(a) + 2.0
        if b_kind == "body":
            state.body_pose[b_name][:3] = far
        else:
            state.site_pos[b_name] = far


def test_dimensional_contracts():
    from humanoid_suite.spaces import ActionMap, build_layout
    from humanoid_suite.config import load_robot
    full = load_robot("full")
    no_hands = load_robot("no_hands")
    results = {
        "full obs 151": build_layout(load_task("walk"), "full").total_dim == 151,
        "49 + 2x51 split": (full.base_obs_dim - no_hands.base_obs_dim) == 102
                           and no_hands.base_obs_dim == 49,
        "no-hands obs 49": build_layout(load_task("walk", robot="no_hands"),
                                        "no_hands").total_dim == 49,
        "action 61": ActionMap(full, "full").dim == 61,
        "action 19": ActionMap(no_hands, "no_hands").dim == 19,
        "reach obs 157": build_layout(load_task("reach"), "full").total_dim == 157,
    }
    failed = [k for k, v in results.items() if not v]
    report("dimensional-contracts", not failed, f"{results}")
    assert not failed


def test_determinism_500_steps():
    """Bit-identical scripted episodes across 10 runs and vs the server."""
    def direct_run():
        env = TaskEnv("stand")
        obs = env.reset(episode_seed(7, 0))
        rng = np.random.default_rng(99)
        blobs = [obs.tobytes()]
        rewards = []
        for _ in range(500):
            action = rng.uniform(-1, 1, 61).astype(np.float32)
            obs, breakdown, status, _ = env.step(action.astype(np.float64))
            blobs.append(obs.tobytes())
            rewards.append(breakdown.total)
        return b"".join(blobs), np.array(rewards)

    first_blob, first_rewards = direct_run()
    runs_identical = True
    for _ in range(9):
        blob, rewards = direct_run()
        runs_identical &= blob == first_blob and np.array_equal(rewards, first_rewards)

    # server path must reproduce the same episode at wire precision
    server = EnvServer("stand", 1, "127.0.0.1:0")
    server.start()
    try:
        with EnvClient(server.bound_endpoint) as client:
            obs = client.reset([7])
            env = TaskEnv("stand")
            direct_obs = env.reset(episode_seed(7, 0))
            server_matches = np.array_equal(obs[0], direct_obs.astype(np.float32))
            rng = np.random.default_rng(99)
            for _ in range(500):
                action = rng.uniform(-1, 1, 61).astype(np.float32)
                result = client.step(action[None, :])
                d_obs, d_break, _, _ = env.step(action.astype(np.float64))
                server_matches &= np.array_equal(result["obs"][0],
                                                 d_obs.astype(np.float32))
                server_matches &= result["rewards"][0] == np.float32(d_break.total)
    finally:
        server.shutdown()

    ok = runs_identical and server_matches
    report("determinism", ok,
           f"10 direct runs bit-identical: {runs_identical}; "
           f"server==direct at wire precision over 500 steps: {server_matches}")
    assert runs_identical and server_matches


@pytest.mark.skipif(not engine_available(),
                    reason="engine unavailable: mujoco is not installed "
                           "(not on this sandbox's package mirror); see ledger")
def test_random_zero_policy_sanity_engine():
    """Engine backend: kitchen return 0 exactly; walk random mean < 100."""
    t0 = time.perf_counter()
    kitchen_returns = _run_policy_returns("kitchen", "random", 100, backend="engine")
    walk_returns = _run_policy_returns("walk", "random", 100, backend="engine")
    elapsed = time.perf_counter() - t0
    ok = (all(r == 0.0 for r in kitchen_returns)
          and float(np.mean(walk_returns)) < 100.0 and elapsed < 900)
    report("policy-sanity-engine", ok,
           f"kitchen all-zero {all(r == 0.0 for r in kitchen_returns)}, "
           f"walk mean {np.mean(walk_returns):.1f} < 100, {elapsed:.0f}s")
    assert ok


def test_random_zero_policy_sanity_scripted_supplement():
    """Supplementary scripted-backend run of the same policy checks.

    Not a substitute for the engine criterion (which skips without the
    engine); kept so the sanity logic itself is exercised everywhere.
    """
    kitchen_returns = _run_policy_returns("kitchen", "random", 100)
    walk_returns = _run_policy_returns("walk", "random", 100)
    kitchen_zero = all(r == 0.0 for r in kitchen_returns)
    walk_mean = float(np.mean(walk_returns))
    ok = kitchen_zero and walk_mean < 100.0
    report("policy-sanity-scripted(supplement)", ok,
           f"kitchen return == 0 for 100/100 episodes: {kitchen_zero}; "
           f"walk random mean {walk_mean:.2f} < 100")
    assert ok


def _run_policy_returns(task_id, policy, episodes, backend="scripted"):
    returns = []
    for ep in range(episodes):
        env = TaskEnv(task_id, backend=backend)
        rng = np.random.default_rng(1000 + ep)
        obs = env.reset(1000 + ep)
        total = 0.0
        while True:
            if policy == "random":
                action = rng.uniform(-1, 1, env.action_dim)
            else:
                action = np.zeros(env.action_dim)
            obs, breakdown, status, _ = env.step(action)
            for name in ("effort", "height", "upright", "stand", "stable"):
                if name in breakdown.terms:
                    low = 0.8 if name == "effort" else 0.0
                    assert low <= breakdown.terms[name] <= 1.0
            total += breakdown.total
            if status.terminated:
                break
        returns.append(total)
    return returns


def test_throughput_server_overhead():
    """Server round-trip overhead vs direct stepping at n_envs=1.

    Measured exactly as specified (scripted backend, p50 over 10,000 steps,
    lightest task). On single-core hosts the two context switches per
    request/response step alone exceed the budget for ~190us steps; see the
    decisions ledger for the measured decomposition. The basket below shows
    heavier tasks for context.
    """
    from humanoid_suite.bench import bench_server_overhead
    result = bench_server_overhead("stand", steps=10_000)
    basket = {tid: bench_server_overhead(tid, steps=2_000)["overhead_pct"]
              for tid in ("push", "truck")}
    ok = result["overhead_pct"] <= 20.0
    detail = (f"stand: direct {result['direct_p50_us']:.0f}us, server "
              f"{result['server_p50_us']:.0f}us, overhead "
              f"{result['overhead_pct']:.1f}% (gate 20%); basket "
              + ", ".join(f"{k} {v:.1f}%" for k, v in basket.items())
              + f"; host cores: 1" )
    report("throughput-overhead", ok, detail)
    assert ok, ("server overhead criterion not met on this host: "
                + detail + " — single-core context-switch floor; "
                "see /root/notes/decisions.md analysis")


@pytest.mark.skipif(not engine_available(),
                    reason="engine unavailable: mujoco is not installed "
                           "(not on this sandbox's package mirror); see ledger")
def test_throughput_fps_profile_ordering():
    from humanoid_suite.bench import bench_fps
    result = bench_fps("walk", backend="engine")
    report("throughput-fps-ordering", bool(result["ordering_ok"]),
           f"fps per profile: {result['fps']}")
    assert result["ordering_ok"]


def test_hierarchy_criteria(rng):
    from humanoid_suite.hierarchy import ClipBox, LinearPolicy, compose

    box = ClipBox((-0.5, -0.8, 0.4), (1.0, 0.8, 1.8))
    pts = rng.uniform(-5, 5, (10_000, 3))
    clipped = box.clip(pts)
    idempotent = np.array_equal(box.clip(clipped), clipped)

    low = LinearPolicy(rng.normal(size=(61, 151 + 6)), np.zeros(61), target_dim=6)
    before = low.param_hash()
    composed = compose(lambda obs: obs[:6], low, box, hands=2)
    seen_shapes = set()
    for _ in range(1000):
        composed.act(rng.uniform(-1, 1, 151))
        seen_shapes.add(composed.last_command.targets.shape)
    frozen = low.param_hash() == before
    two_hand = seen_shapes == {(2, 3)}

    ok = idempotent and frozen and two_hand
    report("hierarchy", ok,
           f"clip idempotent on 10k pts: {idempotent}; frozen hash over 1000 "
           f"steps: {frozen}; two-hand setpoints: {two_hand}")
    assert ok
