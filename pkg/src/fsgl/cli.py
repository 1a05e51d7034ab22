"""Command-line driver: data generation, solving, benchmarks, cut checks.

Exit codes: 0 success, 1 data or solver error, 2 usage error. A config
file in flat ``key = value`` form (keys named like the long flags) can
be passed with --config; its values override command-line flags.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from .bench import initial_graph, relative_error, run_benchmark
from .datagen import gen_ground_truth, sample_gmm, sample_mvt
from .errors import FsglError
from .graph import ObservationSet, WeightedGraph, build_laplacian, is_connected
from .io import load_graph, load_observations, save_graph, save_observations
from .partition import approx_cheeger_cut, brute_force_cheeger
from .solver import SolverConfig, run_solver
from .spectral import smallest_eigenpairs


def _env_threads() -> int:
    return max(1, int(os.environ.get("FSGL_THREADS", "1") or "1"))


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--config", default=None,
                   help="flat key = value file; entries override flags")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=0.01, help="step size")
    p.add_argument("--alpha", type=float, default=0.5, help="log-det shift")
    p.add_argument("--gamma", type=float, default=0.5, help="connectivity weight")
    p.add_argument("--mu", type=float, default=0.2, help="sparsity weight")
    p.add_argument("--budget", type=int, default=None,
                   help="extra init edges beyond the tree (default 3N)")
    p.add_argument("--vmin", type=int, default=8, help="recursion leaf size")
    p.add_argument("--refresh", type=int, default=1,
                   help="spectral refresh period in accepted steps")
    p.add_argument("--exact-logdet", dest="exact_logdet", action="store_true",
                   help="score with the exact resolvent instead of the majorizer")


def _add_gen_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--generator", choices=("gmm", "mvt"), default=None)
    p.add_argument("--dof", type=float, default=3.0, help="t degrees of freedom")
    p.add_argument("--components", type=int, default=3, help="mixture components")
    p.add_argument("--mean-scale", dest="mean_scale", type=float, default=1.0)
    p.add_argument("--density", type=float, default=0.2, help="edge probability")
    p.add_argument("--rho", type=float, default=0.5, help="precision diagonal shift")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsgl",
        description="Learn a sparse connected graph from few observations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a ground truth and observations")
    p.add_argument("--n", type=int, default=30, help="node count")
    p.add_argument("--k", type=int, default=None, help="sample count (default N/5)")
    p.add_argument("--output", default="data", help="output file prefix")
    _add_gen_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="learn a graph from an observation file")
    p.add_argument("--input", required=True, help="observation matrix (.csv or .mtx)")
    p.add_argument("--output", default=None, help="learned graph edge-list CSV")
    p.add_argument("--truth", default=None, help="reference graph for relative error")
    p.add_argument("--solver", choices=("greedy", "recursive"), default="greedy")
    p.add_argument("--trace", default=None, help="per-step trace CSV")
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="sweep generators, solvers, sample ratios")
    p.add_argument("--n", type=int, default=30, help="node count")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--ratios", default="0.2,0.4,0.6,0.8,1.0",
                   help="comma-separated K/N ratios")
    p.add_argument("--solver", choices=("greedy", "recursive"), default=None,
                   help="restrict to one solver (default both)")
    p.add_argument("--output", default="bench", help="output file prefix")
    _add_gen_flags(p)
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("cheeger-check",
                       help="verify cut bounds on random graphs")
    p.add_argument("--n", type=int, default=8, help="node count (<= 16)")
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--density", type=float, default=0.35)
    _add_common(p)
    p.set_defaults(func=cmd_cheeger_check)
    return parser


def _parse_value(text: str, current):
    text = text.strip()
    if text.lower() in ("none", "null"):
        return None
    if isinstance(current, bool):
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if isinstance(current, int) and not isinstance(current, bool):
        return int(text)
    if isinstance(current, float):
        return float(text)
    if current is None:
        for cast in (int, float):
            try:
                return cast(text)
            except ValueError:
                pass
    return text


def apply_config_file(args: argparse.Namespace) -> None:
    path = getattr(args, "config", None)
    if not path:
        return
    with open(path) as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if not hasattr(args, key):
                raise ValueError(f"{path}:{line_no}: unknown option {key!r}")
            setattr(args, key, _parse_value(value, getattr(args, key)))


def config_from_args(args: argparse.Namespace, kind: str) -> SolverConfig:
    return SolverConfig(
        epsilon=args.epsilon, alpha=args.alpha, gamma=args.gamma, mu=args.mu,
        budget_b=args.budget, v_min=args.vmin, refresh_interval=args.refresh,
        seed=args.seed, solver_kind=kind, exact_logdet=args.exact_logdet,
        threads=_env_threads())


def _gen_seeds(seed: int) -> tuple[int, int]:
    a, b = np.random.SeedSequence([seed]).spawn(2)
    return int(a.generate_state(1)[0]), int(b.generate_state(1)[0])


def cmd_gen(args: argparse.Namespace) -> int:
    n = args.n
    k = args.k if args.k is not None else max(1, round(0.2 * n))
    s_gt, s_x = _gen_seeds(args.seed)
    gt = gen_ground_truth(n, args.density, args.rho, seed=s_gt)
    generator = args.generator or "gmm"
    if generator == "gmm":
        obs = sample_gmm(gt, k, args.components, args.mean_scale, seed=s_x)
    else:
        obs = sample_mvt(gt, k, args.dof, seed=s_x)
    x_path = f"{args.output}.x.csv"
    w_path = f"{args.output}.w.csv"
    save_observations(obs.x, x_path)
    save_graph(gt.w_star, w_path)
    print(f"wrote {x_path} ({n}x{k}) and {w_path} "
          f"({gt.w_star.edge_count} edges)")
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    x = load_observations(args.input)
    obs = ObservationSet(x)
    cfg = config_from_args(args, args.solver)
    g0 = initial_graph(obs, cfg)
    t0 = time.perf_counter()
    g, trace = run_solver(g0, obs, cfg)
    ms = (time.perf_counter() - t0) * 1e3
    if args.output:
        save_graph(g, args.output)
    if args.trace:
        trace.to_csv(args.trace)
    lam2 = float(np.linalg.eigvalsh(build_laplacian(g).dense())[1])
    print(f"solver={args.solver} steps={len(trace)} converged={trace.converged} "
          f"edges={g.edge_count} lambda2={lam2:.6f} "
          f"objective={trace.initial_objective:.6f}->{trace.final_objective:.6f} "
          f"ms={ms:.1f}")
    if args.truth:
        w_star = load_graph(args.truth, n=obs.n)
        print(f"relative_error={relative_error(g, w_star):.6f}")
    if args.output:
        print(f"wrote {args.output}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = config_from_args(args, "greedy")
    ratios = [float(tok) for tok in str(args.ratios).split(",") if tok.strip()]
    if not ratios:
        raise ValueError("at least one K/N ratio is required")
    generators = (args.generator,) if args.generator else ("gmm", "mvt")
    solvers = (args.solver,) if args.solver else ("greedy", "recursive")
    report = run_benchmark(cfg, ratios, args.trials, n=args.n,
                           generators=generators, solvers=solvers,
                           density=args.density, rho=args.rho, nu=args.dof,
                           n_components=args.components,
                           mean_scale=args.mean_scale,
                           max_workers=_env_threads())
    raw_path = f"{args.output}.raw.csv"
    summary_path = f"{args.output}.summary.csv"
    with open(raw_path, "w") as fh:
        fh.write(report.raw_csv())
    with open(summary_path, "w") as fh:
        fh.write(report.summary_csv())
    print(report.table(), end="")
    failed = [c for c in report.cells if not c.ok]
    for c in failed:
        print(f"failed cell {c.generator}/{c.solver}/ratio={c.ratio}/"
              f"trial={c.trial}: {c.error}", file=sys.stderr)
    print(f"wrote {raw_path} and {summary_path}")
    return 0


def cmd_cheeger_check(args: argparse.Namespace) -> int:
    if args.n > 16:
        raise ValueError("exact enumeration needs n <= 16")
    rng = np.random.default_rng(args.seed)
    violations = 0
    for trial in range(args.trials):
        g = _random_connected_unit_graph(args.n, args.density, rng)
        lap = build_laplacian(g)
        lam2 = float(np.linalg.eigvalsh(lap.dense())[1])
        d_max = float(np.max(lap.dense().diagonal()))
        upper = float(np.sqrt(2.0 * lam2 * d_max))
        exact = brute_force_cheeger(g)
        state = smallest_eigenpairs(lap, min(3, g.n))
        sweep = approx_cheeger_cut(g, state)
        checks = [
            lam2 / 2.0 <= exact.ratio + 1e-9,
            exact.ratio <= upper + 1e-9,
            sweep.ratio + 1e-12 >= exact.ratio,
            sweep.ratio + 1e-9 >= lam2 / 2.0,
        ]
        status = "ok" if all(checks) else "VIOLATION"
        if status != "ok":
            violations += 1
        print(f"trial={trial} lambda2/2={lam2 / 2.0:.4f} "
              f"exact={exact.ratio:.4f} sweep={sweep.ratio:.4f} "
              f"upper={upper:.4f} {status}")
    print(f"{args.trials - violations}/{args.trials} graphs satisfied the bounds")
    return 1 if violations else 0


def _random_connected_unit_graph(n: int, density: float,
                                 rng: np.random.Generator) -> WeightedGraph:
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(10000):
        mask = rng.random(iu.shape[0]) < density
        g = WeightedGraph(n, {(int(a), int(b)): 1.0
                              for a, b in zip(iu[mask], ju[mask])})
        if is_connected(g):
            return g
    chain = {(i, i + 1): 1.0 for i in range(n - 1)}
    return WeightedGraph(n, chain)


def cli_main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        apply_config_file(args)
        return args.func(args)
    except FsglError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(cli_main(sys.argv[1:]))
