"""Command-line entry point: ``epimc simulate | fit | diagnose | theory``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import theory
from .config import build_problem, load_config
from .diagnostics import autocorrelation, summarize_trace
from .errors import EpimcError
from .io import read_trace_csv, write_events_csv, write_table_csv, write_trace_csv
from .likelihood import SeirParams, SirParams
from .paths import InitialState
from .samplers import run_benchmark_chain, run_new_chain
from .simulate import RngStream, gillespie_seir, gillespie_sir

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="epimc", description="Exact-time MCMC for stochastic SIR/SEIR models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="Gillespie draw written as an event CSV")
    s.add_argument("--model", choices=("sir", "seir"), default="sir")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--I0", type=int, default=1)
    s.add_argument("--E0", type=int, default=0)
    s.add_argument("--R0", type=int, default=0)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta2", type=float)
    s.add_argument("--change-point", type=float)
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", help="output CSV (default stdout)")

    f = sub.add_parser("fit", help="run a sampler from a config file")
    f.add_argument("--config", required=True)
    f.add_argument("--seed", type=int, help="overrides the config seed")
    f.add_argument("--iters", type=int, help="overrides the config iters")
    f.add_argument("--sampler", choices=("new", "benchmark"))
    f.add_argument("--chains", type=int, default=1)
    f.add_argument("--out", help="trace CSV (overrides the config trace)")
    f.add_argument("--summary", help="summary CSV (overrides the config summary)")

    d = sub.add_parser("diagnose", help="summaries and plot data of a trace CSV")
    d.add_argument("--trace", required=True)
    d.add_argument("--burn-in", type=int, default=0)
    d.add_argument("--out-prefix", help="write <prefix>_summary.csv, _trace.csv, _hist.csv, _acf.csv")
    d.add_argument("--bins", type=int, default=30)
    d.add_argument("--max-lag", type=int, default=50)

    t = sub.add_parser("theory", help="Hellinger distance tools")
    tsub = t.add_subparsers(dest="what", required=True, parser_class=_Parser)
    h = tsub.add_parser("hellinger", help="closed-form squared Hellinger distance")
    h.add_argument("--gamma", type=float, required=True)
    h.add_argument("--eps", type=float, required=True)
    h.add_argument("--T", type=float, required=True)
    m = tsub.add_parser("hellinger-mc", help="Monte-Carlo squared Hellinger distance")
    m.add_argument("--gamma", type=float, required=True)
    m.add_argument("--beta0", type=float, default=0.0)
    m.add_argument("--eps", type=float, required=True)
    m.add_argument("--T", type=float, required=True)
    m.add_argument("--nsim", type=int, default=100_000)
    m.add_argument("--seed", type=int, required=True)
    q = tsub.add_parser("discrete", help="discrete-time expectations of f and sqrt f")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--gamma", type=float, required=True)
    q.add_argument("--beta0", type=float, default=0.0)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--T", type=float, required=True)
    return p


def _simulate(args):
    init = InitialState(
        args.N, args.N - args.I0 - args.E0 - args.R0, args.I0, args.E0, args.R0
    )
    rng = RngStream(args.seed)
    if args.model == "sir":
        x, y = gillespie_sir(init, SirParams(args.beta, args.gamma), args.T, rng)
        paths = {"x": x.times, "y": y.times}
    else:
        if args.alpha is None:
            raise ValueError("--alpha is required for seir")
        p = SeirParams(args.beta, args.alpha, args.gamma, args.beta2, args.change_point)
        x, y, z = gillespie_seir(init, p, args.T, rng)
        paths = {"x": x.times, "y": y.times, "z": z.times}
    if args.out:
        write_events_csv(args.out, paths)
    else:
        _events_stdout(paths)
    counts = " ".join(f"n_{k}={v.size}" for k, v in paths.items())
    print(counts, file=sys.stderr)
    return 0


def _events_stdout(paths):
    rows = sorted((float(t), name) for name, arr in paths.items() for t in arr)
    out = ["process,time"] + [f"{name},{t:.17g}" for t, name in rows]
    sys.stdout.write("\n".join(out) + "\n")


def _run_chain(job):
    cfg_path, overrides, chain, seed = job
    cfg = load_config(cfg_path, overrides)
    problem = build_problem(cfg)
    rng = RngStream(seed, chain)
    if cfg.sampler == "benchmark":
        trace, _ = run_benchmark_chain(problem, cfg.iters, rng)
    else:
        trace, _, _ = run_new_chain(problem, cfg.sampler_config(seed), rng)
    return trace


def _chain_path(path, k):
    path = Path(path)
    return path.with_name(f"{path.stem}.chain{k}{path.suffix}")


def _fit(args):
    overrides = {}
    if args.iters is not None:
        overrides["iters"] = str(args.iters)
    if args.sampler is not None:
        overrides["sampler"] = args.sampler
    cfg = load_config(args.config, overrides)
    seed = args.seed if args.seed is not None else cfg.seed
    if seed is None:
        raise ValueError("a seed is required (config key seed or --seed)")
    if args.chains < 1:
        raise ValueError("--chains must be at least 1")
    build_problem(cfg)  # fail early on bad data
    out = args.out or cfg.get("trace") or "trace.csv"
    jobs = [(args.config, overrides, k, seed) for k in range(args.chains)]
    workers = max(1, min(args.chains, int(os.environ.get("EPIMC_THREADS", "1"))))
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            traces = list(ex.map(_run_chain, jobs))
    else:
        traces = [_run_chain(j) for j in jobs]
    if len(traces) == 1:
        write_trace_csv(out, traces[0])
    else:
        merged = {"chain": []}
        for k, tr in enumerate(traces):
            write_trace_csv(_chain_path(out, k), tr)
            merged["chain"].extend([k] * len(tr))
            for name in tr.names:
                merged.setdefault(name, []).extend(tr.columns[name])
        write_table_csv(out, merged)
    burn = min(cfg.burn_in, len(traces[0]) - 16)
    summary = {}
    for k, tr in enumerate(traces):
        for name, st in summarize_trace(tr, max(burn, 0)).items():
            summary.setdefault("chain", []).append(k)
            for key, val in st.as_row().items():
                summary.setdefault(key, []).append(val)
    summary_path = args.summary or cfg.get("summary") or Path(out).with_name(Path(out).stem + "_summary.csv")
    write_table_csv(summary_path, summary)
    _print_summary(summary)
    return 0


def _print_summary(summary):
    names = summary["name"]
    for i, name in enumerate(names):
        if name.startswith("acc_"):
            print(f"chain {summary['chain'][i]}  {name:10s} acceptance {summary['acceptance'][i]:.4g}")
        else:
            print(
                f"chain {summary['chain'][i]}  {name:10s} mean {summary['mean'][i]:.6g}  "
                f"var {summary['variance'][i]:.4g}  ess {summary['ess'][i]:.1f}"
            )


def _diagnose(args):
    trace = read_trace_csv(args.trace)
    if args.burn_in >= len(trace):
        raise ValueError("burn-in leaves no samples")
    stats = summarize_trace(trace, args.burn_in)
    rows = {}
    for st in stats.values():
        for key, val in st.as_row().items():
            rows.setdefault(key, []).append(val)
    _print_summary({"chain": [0] * len(rows["name"]), **rows})
    if args.out_prefix:
        prefix = args.out_prefix
        write_table_csv(f"{prefix}_summary.csv", rows)
        tracked = [n for n in stats if not n.startswith("acc_")]
        write_table_csv(
            f"{prefix}_trace.csv",
            {"iteration": trace["iteration"], **{n: trace[n] for n in tracked}},
        )
        hist = {"name": [], "lo": [], "hi": [], "density": []}
        acf = {"name": [], "lag": [], "acf": []}
        for n in tracked:
            x = trace[n][args.burn_in :]
            dens, edges = np.histogram(x, bins=args.bins, density=x.var() > 0)
            hist["name"] += [n] * dens.size
            hist["lo"] += list(edges[:-1])
            hist["hi"] += list(edges[1:])
            hist["density"] += list(dens)
            r = autocorrelation(x, args.max_lag)
            acf["name"] += [n] * r.size
            acf["lag"] += list(range(r.size))
            acf["acf"] += list(r)
        write_table_csv(f"{prefix}_hist.csv", hist)
        write_table_csv(f"{prefix}_acf.csv", acf)
    return 0


def _theory(args):
    if args.what == "hellinger":
        print(f"{theory.hellinger_exact(args.gamma, args.eps, args.T):.6g}")
    elif args.what == "hellinger-mc":
        est, se = theory.hellinger_mc(args.gamma, args.beta0, args.eps, args.T, args.nsim, RngStream(args.seed))
        exact = theory.hellinger_exact(args.gamma, args.eps, args.T)
        print(f"estimate {est:.6g}  se {se:.3g}  exact {exact:.6g}")
    else:
        ef, esf = theory.discrete_expectation(args.n, args.gamma, args.beta0, args.eps, args.T)
        limit = theory.continuum_expectation(args.gamma, args.beta0, args.eps, args.T)
        print(f"E_f {ef:.10g}  E_sqrt_f {esf:.10g}  H2 {1 - esf * esf / ef:.6g}  limit_E_f {limit:.10g}")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    handlers = {"simulate": _simulate, "fit": _fit, "diagnose": _diagnose, "theory": _theory}
    try:
        return handlers[args.command](args)
    except (EpimcError, ValueError, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"epimc: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
