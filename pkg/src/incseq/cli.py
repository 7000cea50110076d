"""Command-line surface: every oracle and experiment with reproducible
configuration, machine-readable output, and a run manifest.

Exit codes: 0 success, 2 invalid arguments, 1 runtime failure.  With
``--out`` the primary output is written to the given path, a manifest to
``<out>.manifest.json``, and (for report commands) a figure next to it.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from .analytics import (
    core_match_mean_exact,
    core_window,
    expected_count_asymptotic,
    expected_count_loggamma,
    insertion_position_pmf,
    superadditivity_ratio,
)
from .counting import count_increasing_subsequences
from .experiments import (
    ExperimentConfig,
    complement_lis_check,
    lis_shift_experiment,
    resolve_k,
    run_trials,
    scaling_study,
    tv_sweep,
    zero_probability_sweep,
)
from .measures import (
    AdulterationSpec,
    exact_tv_distance,
    sample_adulterated,
    sample_conditioned,
    tv_monte_carlo,
)
from .perms import Permutation, lis_length, lis_length_restricted, sample_uniform_permutation
from .rng import RngStream

REPORT_COMMANDS = {"scaling", "tv-sweep", "lis-shift", "complement-lis", "zero-sweep", "pmf"}


# ---------------------------------------------------------------------------
# small parsing helpers


def _parse_perm(text: str) -> Permutation:
    try:
        return Permutation.from_one_line(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad permutation {text!r}: {exc}") from exc


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",")) if text else ()


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",")) if text else ()


def _parse_cells(text: str) -> tuple[tuple[int, int], ...]:
    cells = []
    for part in text.split(","):
        n_str, k_str = part.split(":")
        cells.append((int(n_str), int(k_str)))
    return tuple(cells)


def _fmt(value) -> str:
    """CSV cell formatting; floats carry 17 significant digits for round-trip."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    if value is None:
        return ""
    return str(value)


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value)!r}")


# ---------------------------------------------------------------------------
# output bundle and manifest


@dataclass
class OutputBundle:
    results: object
    rows: list[dict]
    text_lines: list[str]
    figure: Callable[[str], str] | None = None
    trial_log: list[dict] | None = None
    warnings: list[str] = field(default_factory=list)


@dataclass
class RunManifest:
    """Everything needed to reproduce a run bit-exactly, plus output digests."""

    command: str
    params: dict
    master_seed: int
    version: str
    started_at: str
    finished_at: str
    outputs: dict[str, str]

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, default=_jsonable)


def argv_from_manifest(manifest: dict, overrides: dict | None = None) -> list[str]:
    """Rebuild the argv of a recorded run; ``overrides`` replaces parameter values."""
    params = dict(manifest["params"])
    if overrides:
        params.update(overrides)
    argv = [manifest["command"]]
    for key in sorted(params):
        value = params[key]
        if value is None:
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    return argv


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    fields = list(rows[0].keys())
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_fmt(row.get(f)) for f in fields])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_count(args) -> OutputBundle:
    perm = _parse_perm(args.perm)
    value = count_increasing_subsequences(
        perm, args.k, mode=args.mode, budget_bytes=args.budget_mb * 2**20
    )
    if value.mode == "exact":
        results = {"count": value.exact, "mode": "exact"}
    else:
        results = {
            "count_mantissa": value.mantissa,
            "count_exponent": value.exponent,
            "count_decimal": value.format_decimal(),
            "mode": "extended",
        }
    row = {"n": perm.n, "k": args.k, "mode": value.mode, "count": value.format_decimal()}
    return OutputBundle(results, [row], [value.format_decimal()])


def _cmd_lis(args) -> OutputBundle:
    perm = _parse_perm(args.perm)
    if args.values:
        length = lis_length_restricted(perm, _parse_ints(args.values))
    else:
        length = lis_length(perm)
    return OutputBundle({"lis": length}, [{"n": perm.n, "lis": length}], [str(length)])


def _cmd_sample(args) -> OutputBundle:
    rows = []
    lines = []
    for i in range(args.trials):
        stream = RngStream(args.seed, i)
        if args.measure == "uniform":
            perm = sample_uniform_permutation(args.n, stream)
        elif args.measure == "adulterated":
            if args.k is None:
                raise ValueError("--k is required for the adulterated measure")
            perm = sample_adulterated(AdulterationSpec(args.n, args.k), stream)
        else:
            if not args.values:
                raise ValueError("--values is required for the conditioned measure")
            perm = sample_conditioned(args.n, _parse_ints(args.values), stream)
        rows.append({"trial": i, "permutation": str(perm)})
        lines.append(str(perm))
    return OutputBundle({"samples": [r["permutation"] for r in rows]}, rows, lines)


def _cmd_tv_exact(args) -> OutputBundle:
    est = exact_tv_distance(AdulterationSpec(args.n, args.k), enum_budget=args.enum_budget)
    results = {"tv": est.value, "exact": str(est.exact), "method": est.method}
    row = {"n": args.n, "k": args.k, "tv": est.value, "exact": str(est.exact)}
    return OutputBundle(results, [row], [f"tv = {est.value:.6f} (exact {est.exact})"])


def _cmd_tv_mc(args) -> OutputBundle:
    est = tv_monte_carlo(
        AdulterationSpec(args.n, args.k), args.trials, RngStream(args.seed, 0),
        threads=args.threads,
    )
    ci = (est.value - 1.96 * est.stderr, est.value + 1.96 * est.stderr)
    results = {
        "tv": est.value,
        "stderr": est.stderr,
        "trials": est.trials,
        "ci95": [ci[0], ci[1]],
    }
    row = {
        "n": args.n, "k": args.k, "tv": est.value, "stderr": est.stderr,
        "ci95_lo": ci[0], "ci95_hi": ci[1], "trials": est.trials,
    }
    return OutputBundle(results, [row], [f"tv ~= {est.value:.6f} +/- {est.stderr:.6f} ({est.trials} trials)"])


def _cmd_card_exp(args) -> OutputBundle:
    payloads = run_trials("card", (args.s, args.k), args.trials, args.seed, threads=args.threads)
    rows = [
        {
            "trial": i,
            "match_count": p["match_count"],
            "core_match_count": p["core_match_count"],
            "verified_lis": p["verified_lis"],
            "lis_margin": p["verified_lis"] - (args.s + p["match_count"]),
        }
        for i, p in enumerate(payloads)
    ]
    matches = np.array([p["match_count"] for p in payloads], dtype=float)
    cores = np.array([p["core_match_count"] for p in payloads], dtype=float)
    results = {
        "trials": args.trials,
        "mean_match_count": float(matches.mean()),
        "mean_core_match_count": float(cores.mean()),
        "min_lis_margin": int(min(r["lis_margin"] for r in rows)),
        "all_verified": all(r["lis_margin"] >= 0 for r in rows),
    }
    lines = [
        f"trials={args.trials} mean matches={results['mean_match_count']:.4f} "
        f"mean core={results['mean_core_match_count']:.4f} all length checks passed: "
        f"{results['all_verified']}"
    ]
    log = [{"trial": i, "seed_stream": [args.seed, i], "payload": p} for i, p in enumerate(payloads)]
    return OutputBundle(results, rows, lines, trial_log=log)


def _cmd_that_moments(args) -> OutputBundle:
    from .experiments import estimate_core_match_moments

    est = estimate_core_match_moments(args.s, args.k, args.trials, args.seed, threads=args.threads)
    n_total = args.s + args.k
    warnings = []
    if len(core_window(args.k)) == 0:
        warnings.append(f"core rank window is empty for k={args.k}; the statistic is identically 0")
    elif args.k < 8:
        warnings.append(f"core rank window has only {len(core_window(args.k))} rank(s) at k={args.k}")
    exact_mean = core_match_mean_exact(n_total, args.k) if n_total <= 200_000 else None
    results = {
        "mean": est.mean,
        "mean_stderr": est.mean_stderr,
        "second_moment": est.second_moment,
        "second_moment_stderr": est.second_moment_stderr,
        "trials": est.trials,
        "exact_mean": exact_mean,
    }
    row = {"s": args.s, "k": args.k, **results}
    lines = [
        f"mean={est.mean:.6f}+/-{est.mean_stderr:.6f} "
        f"second_moment={est.second_moment:.6f}+/-{est.second_moment_stderr:.6f}"
        + (f" exact_mean={exact_mean:.6f}" if exact_mean is not None else "")
    ]
    return OutputBundle(results, [row], lines, warnings=warnings)


def _cmd_scaling(args) -> OutputBundle:
    n_values = _parse_ints(args.n_list)
    lambdas = _parse_floats(args.lambdas)
    if not n_values or not lambdas:
        raise ValueError("need nonempty --n-list and --lambdas")
    cells = []
    cell_lambdas = []
    for lam in lambdas:
        for n in n_values:
            cells.append((n, resolve_k(n, c=1.0, l=lam)))
            cell_lambdas.append(lam)
    config = ExperimentConfig(
        cells=tuple(cells), trials=args.trials, master_seed=args.seed, threads=args.threads
    )
    study = scaling_study(config)
    rows = []
    for lam, row in zip(cell_lambdas, study.rows):
        rows.append({"lambda": lam, **row})
    results = {"rows": rows, "slopes": {str(n): s for n, s in study.slopes.items()}}
    lines = [
        f"N={r['n_total']:>8} k={r['k']:>6} lambda={r['lambda']:.3f} "
        f"mean={r['core_mean']:.5g} ratio={r['ratio']:.4f} "
        f"second={r['second_moment']:.5g} ({r['second_method']}) bound={r['bound_const']:.4f}"
        for r in rows
    ]
    lines += [f"slope at N={n}: {s:.3f}" for n, s in sorted(study.slopes.items())]

    def figure(path: str) -> str:
        from .plots import scaling_figure

        return scaling_figure(rows, study.slopes, path)

    return OutputBundle(results, rows, lines, figure=figure)


def _cmd_lis_shift(args) -> OutputBundle:
    res = lis_shift_experiment(
        args.n, args.k, args.trials, args.seed,
        c_grid=_parse_floats(args.c_grid), threads=args.threads,
    )
    rows = [dict(r) for r in res.exceedance]
    results = {"summary": list(res.summary), "exceedance": rows}
    lines = [
        f"{s['measure']:>12}: mean={s['mean']:.3f} std={s['std']:.3f} "
        f"median={s['q50']:.1f}" for s in res.summary
    ]

    def figure(path: str) -> str:
        from .plots import lis_shift_figure

        return lis_shift_figure(res, path)

    log = (
        [{"trial": i, "seed_stream": [args.seed, i], "payload": {"measure": "uniform", "lis": int(v)}}
         for i, v in enumerate(res.uniform_lis)]
        + [{"trial": args.trials + i, "seed_stream": [args.seed, args.trials + i],
            "payload": {"measure": "adulterated", "lis": int(v)}}
           for i, v in enumerate(res.adulterated_lis)]
    )
    return OutputBundle(results, rows, lines, figure=figure, trial_log=log)


def _cmd_complement_lis(args) -> OutputBundle:
    res = complement_lis_check(
        args.n, args.k, args.trials, args.seed,
        gamma_grid=_parse_floats(args.gamma_grid), threads=args.threads,
    )
    rows = [dict(r) for r in res.rows]
    results = {"n": args.n, "k": args.k, "r": args.n - args.k, "rows": rows}
    lines = [
        f"gamma={r['gamma']:.2f} threshold={r['threshold']:.2f} "
        f"frequency={r['frequency']:.4f}+/-{r['stderr']:.4f}" for r in rows
    ]

    def figure(path: str) -> str:
        from .plots import complement_figure

        return complement_figure(res, path)

    log = [{"trial": i, "seed_stream": [args.seed, i], "payload": {"restricted_lis": int(v)}}
           for i, v in enumerate(res.restricted_lis)]
    return OutputBundle(results, rows, lines, figure=figure, trial_log=log)


def _cmd_zero_sweep(args) -> OutputBundle:
    rows = zero_probability_sweep(
        args.n, _parse_floats(args.c_list), args.trials, args.seed, threads=args.threads
    )
    results = {"n": args.n, "rows": rows}
    lines = [
        f"c={r['c']:.3f} k={r['k']:>6} P(count=0)={r['prob_zero']:.4f}+/-{r['stderr']:.4f}"
        for r in rows
    ]

    def figure(path: str) -> str:
        from .plots import zero_sweep_figure

        return zero_sweep_figure(rows, path)

    return OutputBundle(results, rows, lines, figure=figure)


def _cmd_pmf(args) -> OutputBundle:
    law = insertion_position_pmf(args.n, args.k, args.j)
    rows = []
    for idx, r in enumerate(law.support.tolist()):
        row = {"r": r, "pmf": float(law.pmf[idx])}
        if law.exact is not None:
            row["exact"] = str(law.exact[idx])
        rows.append(row)
    results = {"n": args.n, "k": args.k, "j": args.j, "rows": rows}
    lines = [f"r={row['r']:>6} pmf={row['pmf']:.6g}" for row in rows[:50]]
    if len(rows) > 50:
        lines.append(f"... ({len(rows)} support points total)")

    def figure(path: str) -> str:
        from .plots import pmf_figure

        return pmf_figure(law, path)

    return OutputBundle(results, rows, lines, figure=figure)


def _cmd_lemma5(args) -> OutputBundle:
    ratio = superadditivity_ratio(args.a, args.b, args.c, args.d)
    results = {"ratio": float(ratio)}
    row = {"a": args.a, "b": args.b, "c": args.c, "d": args.d, "ratio": float(ratio)}
    return OutputBundle(results, [row], [f"ratio = {ratio:.12g}"])


def _cmd_asymptotics(args) -> OutputBundle:
    asym = expected_count_asymptotic(args.n, args.c, args.l)
    k_real = args.c * args.n**args.l
    exact = expected_count_loggamma(args.n, k_real)
    ratio = math.exp(exact.log - asym.log)
    results = {
        "k": k_real,
        "log_expected_exact": exact.log,
        "log_expected_asymptotic": asym.log,
        "log10_expected_exact": exact.log10(),
        "ratio_exact_over_asymptotic": ratio,
    }
    row = {"n": args.n, "c": args.c, "l": args.l, **results}
    lines = [
        f"k = c*n^l = {k_real:.4f}",
        f"log expected count: exact {exact.log:.6f}, asymptotic {asym.log:.6f}",
        f"ratio exact/asymptotic = {ratio:.6f}",
    ]
    return OutputBundle(results, [row], lines)


def _cmd_tv_sweep(args) -> OutputBundle:
    if args.cells:
        cells = _parse_cells(args.cells)
    elif args.n_list and args.c is not None and args.l is not None:
        cells = tuple((n, resolve_k(n, c=args.c, l=args.l)) for n in _parse_ints(args.n_list))
    else:
        raise ValueError("give --cells, or --n-list with --c and --l")
    config = ExperimentConfig(
        cells=cells, trials=args.trials, master_seed=args.seed, threads=args.threads
    )
    rows = tv_sweep(config, enum_budget=args.enum_budget)
    results = {"rows": rows}
    lines = [
        f"n={r['n']:>6} k={r['k']:>5} tv={r['tv']:.6f} ({r['method']})" for r in rows
    ]

    def figure(path: str) -> str:
        from .plots import tv_sweep_figure

        return tv_sweep_figure(rows, path)

    return OutputBundle(results, rows, lines, figure=figure)


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(sub, *, seed=True, threads=True, trials=None):
    sub.add_argument("--format", choices=("json", "csv", "text"), default="text")
    sub.add_argument("--out", type=str, default=None, help="write primary output to this path")
    if seed:
        sub.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    if threads:
        sub.add_argument(
            "--threads", type=int, default=os.cpu_count() or 1,
            help="worker processes; results are identical for any value",
        )
    if trials is not None:
        sub.add_argument("--trials", type=int, default=trials)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="incseq",
        description="Increasing-subsequence statistics of random permutations",
    )
    parser.add_argument("--version", action="version", version=f"incseq {__version__}")
    subs = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")

    sub = subs.add_parser("count", help="count increasing subsequences of a permutation")
    sub.add_argument("--perm", required=True, help="one-line form, e.g. 1,3,4,5,2")
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--mode", choices=("exact", "extended"), default="exact")
    sub.add_argument("--budget-mb", type=int, default=256, help="exact-mode memory budget")
    _add_common(sub, seed=False, threads=False)
    sub.set_defaults(handler=_cmd_count)

    sub = subs.add_parser("lis", help="longest increasing subsequence length")
    sub.add_argument("--perm", required=True)
    sub.add_argument("--values", default=None, help="restrict to these values, e.g. 1,3,4")
    _add_common(sub, seed=False, threads=False)
    sub.set_defaults(handler=_cmd_lis)

    sub = subs.add_parser("sample", help="sample permutations from a measure")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--measure", choices=("uniform", "adulterated", "conditioned"), default="uniform")
    sub.add_argument("--k", type=int, default=None)
    sub.add_argument("--values", default=None)
    _add_common(sub, threads=False, trials=1)
    sub.set_defaults(handler=_cmd_sample)

    sub = subs.add_parser("tv-exact", help="exact TV distance by S_n enumeration")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--enum-budget", type=int, default=10)
    _add_common(sub, seed=False, threads=False)
    sub.set_defaults(handler=_cmd_tv_exact)

    sub = subs.add_parser("tv-mc", help="Monte Carlo TV estimate")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--k", type=int, required=True)
    _add_common(sub, trials=1000)
    sub.set_defaults(handler=_cmd_tv_mc)

    sub = subs.add_parser("card-exp", help="two-row card insertion experiment")
    sub.add_argument("--s", type=int, required=True)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--trial-log", type=str, default=None, help="write JSON-lines trial records here")
    _add_common(sub, trials=1)
    sub.set_defaults(handler=_cmd_card_exp)

    sub = subs.add_parser("that-moments", help="Monte Carlo moments of the core match count")
    sub.add_argument("--s", type=int, required=True)
    sub.add_argument("--k", type=int, required=True)
    _add_common(sub, trials=10000)
    sub.set_defaults(handler=_cmd_that_moments)

    sub = subs.add_parser("scaling", help="core-match scaling study over an N grid")
    sub.add_argument("--n-list", default="1000,10000,100000")
    sub.add_argument("--lambdas", default="0.8", help="k = floor(N**lambda) per lambda")
    sub.add_argument("--no-plot", action="store_true")
    _add_common(sub, trials=2000)
    sub.set_defaults(handler=_cmd_scaling)

    sub = subs.add_parser("lis-shift", help="LIS distribution under uniform vs adulterated")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--c-grid", default="-2,-1,0,1,2,3")
    sub.add_argument("--trial-log", type=str, default=None)
    sub.add_argument("--no-plot", action="store_true")
    _add_common(sub, trials=1000)
    sub.set_defaults(handler=_cmd_lis_shift)

    sub = subs.add_parser("complement-lis", help="LIS over the complement of a planted set")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--gamma-grid", default="0,0.5,1,2,3,4")
    sub.add_argument("--trial-log", type=str, default=None)
    sub.add_argument("--no-plot", action="store_true")
    _add_common(sub, trials=500)
    sub.set_defaults(handler=_cmd_complement_lis)

    sub = subs.add_parser("zero-sweep", help="P(count = 0) across c with k = floor(c sqrt(n))")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--c-list", default="0,0.5,1,1.5,2,2.5,3")
    sub.add_argument("--no-plot", action="store_true")
    _add_common(sub, trials=1000)
    sub.set_defaults(handler=_cmd_zero_sweep)

    sub = subs.add_parser("pmf", help="position law of the rank-j element of a uniform k-subset")
    sub.add_argument("--n", type=int, required=True, help="number of spaces N")
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--j", type=int, required=True)
    sub.add_argument("--no-plot", action="store_true")
    _add_common(sub, seed=False, threads=False)
    sub.set_defaults(handler=_cmd_pmf)

    sub = subs.add_parser("lemma5", help="entropy superadditivity ratio (at most 1)")
    sub.add_argument("--a", type=float, required=True)
    sub.add_argument("--b", type=float, required=True)
    sub.add_argument("--c", type=float, required=True)
    sub.add_argument("--d", type=float, required=True)
    _add_common(sub, seed=False, threads=False)
    sub.set_defaults(handler=_cmd_lemma5)

    sub = subs.add_parser("asymptotics", help="expected count vs its Stirling asymptotic")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--c", type=float, required=True)
    sub.add_argument("--l", type=float, required=True)
    _add_common(sub, seed=False, threads=False)
    sub.set_defaults(handler=_cmd_asymptotics)

    sub = subs.add_parser("tv-sweep", help="TV distance over an (n, k) grid")
    sub.add_argument("--cells", default=None, help="explicit cells, e.g. 6:3,8:2")
    sub.add_argument("--n-list", default=None)
    sub.add_argument("--c", type=float, default=None)
    sub.add_argument("--l", type=float, default=None)
    sub.add_argument("--enum-budget", type=int, default=10)
    sub.add_argument("--no-plot", action="store_true")
    _add_common(sub, trials=200)
    sub.set_defaults(handler=_cmd_tv_sweep)

    return parser


# ---------------------------------------------------------------------------
# output writing and dispatch

# Execution details: recorded in the manifest for replay, but kept out of the
# primary output so results are byte-identical for any worker count or sink.
_EXECUTION_KEYS = {"format", "out", "no_plot", "trial_log", "threads"}
_INTERNAL_KEYS = {"handler", "command"} | _EXECUTION_KEYS


def _params_of(args) -> dict:
    params = {}
    for key, value in sorted(vars(args).items()):
        if key in _INTERNAL_KEYS or value is None:
            continue
        params[key] = value
    return params


def _manifest_params(args) -> dict:
    params = _params_of(args)
    for key in sorted(_EXECUTION_KEYS):
        value = getattr(args, key, None)
        if value is not None and value is not False:
            params[key] = value
    return params


def _render(args, bundle: OutputBundle) -> str:
    if args.format == "json":
        payload = {
            "command": args.command,
            "params": _params_of(args),
            "seed": getattr(args, "seed", 0),
            "results": bundle.results,
        }
        return json.dumps(payload, indent=2, default=_jsonable) + "\n"
    if args.format == "csv":
        return _csv_text(bundle.rows)
    return "\n".join(bundle.text_lines) + "\n"


def _write_outputs(args, bundle: OutputBundle) -> list[str]:
    written: list[str] = []
    content = _render(args, bundle)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(content)
        written.append(args.out)
    else:
        sys.stdout.write(content)
    if bundle.trial_log is not None and getattr(args, "trial_log", None):
        with open(args.trial_log, "w") as fh:
            for record in bundle.trial_log:
                fh.write(json.dumps(record, default=_jsonable) + "\n")
        written.append(args.trial_log)
    if (
        bundle.figure is not None
        and args.out
        and args.command in REPORT_COMMANDS
        and not getattr(args, "no_plot", False)
    ):
        fig_path = os.path.splitext(args.out)[0] + ".png"
        bundle.figure(fig_path)
        written.append(fig_path)
    return written


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if not getattr(args, "handler", None):
        parser.print_usage(sys.stderr)
        return 2
    started = datetime.now(timezone.utc).isoformat()
    try:
        bundle = args.handler(args)
        for warning in bundle.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        written = _write_outputs(args, bundle)
    except ValueError as exc:
        print(f"incseq {args.command}: invalid arguments: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 1
        print(f"incseq {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        manifest = RunManifest(
            command=args.command,
            params=_manifest_params(args),
            master_seed=getattr(args, "seed", 0),
            version=__version__,
            started_at=started,
            finished_at=datetime.now(timezone.utc).isoformat(),
            outputs={path: _sha256(path) for path in written},
        )
        with open(args.out + ".manifest.json", "w") as fh:
            fh.write(manifest.to_json() + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
