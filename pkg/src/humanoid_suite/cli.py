"""Command-line driver: rollouts, serving, benchmarks, oracle diffs."""

import argparse
import json
import statistics
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .config import UnknownTaskError, list_tasks, load_task
from .episode import trace as trace_mod
from .episode.worker import TaskEnv

POLICIES = ("zeros", "random", "scripted:hold", "scripted:sway", "hierarchical:<file>")


def _make_policy(name: str, env: TaskEnv, rng: np.random.Generator):
    dim = env.action_dim
    if name == "zeros":
        return lambda obs, t: np.zeros(dim)
    if name == "random":
        return lambda obs, t: rng.uniform(-1.0, 1.0, dim)
    if name == "scripted:hold":
        return lambda obs, t: np.zeros(dim)
    if name == "scripted:sway":
        return lambda obs, t: 0.3 * np.sin(0.1 * t) * np.ones(dim)
    if name.startswith("hierarchical:"):
        from .hierarchy import ClipBox, compose, load_policy
        low = load_policy(name.split(":", 1)[1])
        box = ClipBox((-0.5, -0.8, 0.4), (1.0, 0.8, 1.8))
        hands = 2 if env.task.program == "package" else 1
        center = np.tile((np.asarray(box.low) + np.asarray(box.high)) / 2.0, hands)
        composed = compose(lambda obs: center, low, box, hands=hands)
        return lambda obs, t: composed.act(obs)
    raise SystemExit(f"unknown policy {name!r}; valid: {', '.join(POLICIES)}")


def run_rollouts(args) -> int:
    try:
        task = load_task(args.task)
    except UnknownTaskError as err:
        raise SystemExit(str(err))
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    header = {
        "task": args.task, "policy": args.policy, "episodes": args.episodes,
        "seed": args.seed, "backend": args.backend,
        "collision_profile": args.collision_profile, "variant": args.variant,
        "success_target": task.success_target,
    }
    returns, lengths, reasons, subtasks = [], [], {}, {}
    for ep in range(args.episodes):
        env = TaskEnv(args.task, backend=args.backend, variant=args.variant,
                      collision_profile=args.collision_profile,
                      assets_dir=args.assets_dir, respawn_targets=args.respawn or None)
        ep_seed = args.seed + ep
        rng = np.random.default_rng(ep_seed)
        policy = _make_policy(args.policy, env, rng)
        obs = env.reset(ep_seed)
        writer = None
        if out_dir:
            writer = trace_mod.TraceWriter(out_dir / f"episode_{ep:04d}.jsonl")
            writer.write(trace_mod.header_record(**header, episode=ep, episode_seed=ep_seed))
        total = 0.0
        t = 0
        while True:
            action = policy(obs, t)
            obs, breakdown, status, info = env.step(action)
            total += breakdown.total
            t += 1
            if writer:
                writer.write(trace_mod.step_record(t, info["stage"], breakdown,
                                                   status, breakdown.sparse))
            if status.terminated:
                reasons[status.reason] = reasons.get(status.reason, 0) + 1
                n_done = len(info["completed_subtasks"])
                subtasks[n_done] = subtasks.get(n_done, 0) + 1
                break
        if writer:
            writer.close()
        returns.append(total)
        lengths.append(t)

    summary = {
        **header,
        "return_mean": statistics.fmean(returns),
        "return_std": statistics.pstdev(returns) if len(returns) > 1 else 0.0,
        "length_mean": statistics.fmean(lengths),
        "termination_reasons": reasons,
        "completed_subtask_histogram": subtasks,
    }
    if out_dir:
        (out_dir / "summary.json").write_text(json.dumps(summary, indent=2))
    print(f"task {args.task}  policy {args.policy}  episodes {args.episodes}")
    print(f"return mean {summary['return_mean']:.3f}  std {summary['return_std']:.3f}"
          f"  target {task.success_target}")
    print(f"episode length mean {summary['length_mean']:.1f}")
    print(f"termination reasons: {reasons}")
    print(f"completed subtasks: {subtasks}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="humanoid-suite",
        description="Humanoid task-suite rollouts, stepping server, and benchmarks")
    parser.add_argument("--task", default="walk", help="task id (see --list-tasks)")
    parser.add_argument("--policy", default="zeros",
                        help="zeros | random | scripted:NAME | hierarchical:FILE")
    parser.add_argument("--episodes", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--backend", default="scripted", choices=("scripted", "engine"))
    parser.add_argument("--collision-profile", default="full",
                        choices=("full", "simplified_body", "feet_only", "no_hands"))
    parser.add_argument("--variant", default="full",
                        choices=("full", "blocked", "reduced", "no_hands"))
    parser.add_argument("--out", help="directory for traces and summary.json")
    parser.add_argument("--assets-dir", default=None, help="MJCF scene root (engine)")
    parser.add_argument("--respawn", action="store_true",
                        help="reach variant: respawn targets within the episode")
    parser.add_argument("--serve", action="store_true", help="run the stepping server")
    parser.add_argument("--endpoint", default="127.0.0.1:7801",
                        help="host:port or unix:/path for --serve")
    parser.add_argument("--n-envs", type=int, default=1)
    parser.add_argument("--n-workers", type=int, default=0)
    parser.add_argument("--bench-fps", action="store_true",
                        help="steps/sec per collision profile")
    parser.add_argument("--bench-kernel", action="store_true",
                        help="compare compiled vs numpy reward kernels")
    parser.add_argument("--bench-overhead", action="store_true",
                        help="server round-trip overhead vs direct stepping")
    parser.add_argument("--oracle-diff", action="store_true",
                        help="fuzz kernel vs reference transcription")
    parser.add_argument("--n-states", type=int, default=10000)
    parser.add_argument("--list-tasks", action="store_true")
    parser.add_argument("--layout-manifest", action="store_true",
                        help="print the observation layout for --task")
    parser.add_argument("--capabilities", action="store_true",
                        help="print the backend capability report for --task")
    args = parser.parse_args(argv)

    if args.list_tasks:
        print("\n".join(list_tasks()))
        return 0

    if args.layout_manifest:
        from .spaces import build_layout
        layout = build_layout(load_task(args.task), args.variant)
        print(layout.manifest_text())
        return 0

    if args.capabilities:
        from .episode.worker import make_backend
        backend = make_backend(load_task(args.task), args.backend,
                               args.collision_profile, args.assets_dir)
        print(backend.capabilities().report())
        return 0

    if args.serve:
        from .server.service import serve
        serve(args.task, args.n_envs, args.endpoint, backend=args.backend,
              variant=args.variant, collision_profile=args.collision_profile,
              assets_dir=args.assets_dir, n_workers=args.n_workers)
        return 0

    if args.bench_kernel:
        report = bench_mod.bench_kernel()
        print(json.dumps(report, indent=2))
        return 0

    if args.bench_overhead:
        report = bench_mod.bench_server_overhead(args.task)
        print(json.dumps(report, indent=2))
        return 0

    if args.bench_fps:
        if args.backend == "engine":
            from .backends.engine import engine_available
            if not engine_available():
                print("engine unavailable: skipping FPS profile benchmark "
                      "(install the 'engine' extra)")
                return 0
        report = bench_mod.bench_fps(args.task, backend=args.backend,
                                     assets_dir=args.assets_dir)
        print(json.dumps(report, indent=2))
        return 0

    if args.oracle_diff:
        if args.task == "all":
            worst = 0.0
            for tid in list_tasks():
                err = bench_mod.oracle_diff(tid, args.n_states, args.seed)["dense"]
                print(f"{tid:20s} max |kernel - oracle| = {err:.3e}")
                worst = max(worst, err)
            print(f"worst over all tasks: {worst:.3e}")
            return 0 if worst < 1e-9 else 1
        err = bench_mod.oracle_diff(args.task, args.n_states, args.seed)["dense"]
        print(f"{args.task}: max |kernel - oracle| = {err:.3e} over {args.n_states} states")
        return 0 if err < 1e-9 else 1

    return run_rollouts(args)


if __name__ == "__main__":
    sys.exit(main())
