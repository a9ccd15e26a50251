"""Registered experiments, their parameters, and artifact writing.

Every experiment is a pure function of its parameters and seed.  A run
writes ``<name>.csv``, ``<name>.jsonl`` and ``<name>.svg`` into the output
directory and reports which embedded checks failed.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import svg
from .arith import isprime
from .expsums import hua_scan, minor_arc_decay_scan
from .fits import fit_loglog
from .kernels import (STATIONARY_PHASE_CONSTANT, build_kernel, convolve, evaluate_vk)
from .major_arc import multiplier_error
from .multifreq import log2N_experiment
from .signals import GridSignal, SmoothCutoff, l2_norm, make_cutoff
from .variation import lepingle_check, rademacher_menshov_scan

__all__ = [
    "ExperimentSpec",
    "ExperimentResult",
    "ExperimentError",
    "EXPERIMENTS",
    "gen_ap_test",
    "experiment_arithmetic_complexity",
    "parse_config_file",
    "run_experiment",
    "HUA_BOUNDS",
]

# recorded regression bound for max |S(A/Q)| Q^(1/3) over primes
HUA_BOUNDS = {3: 2.0}
BAND = (0.25, 4.0)


class ExperimentError(ValueError):
    pass


def gen_ap_test(Q: int, N: int, profile: SmoothCutoff | Callable | None = None,
                support: tuple[float, float] | None = None) -> GridSignal:
    """``1_{QZ}(x) profile(x / N)`` on the scaled support of the profile.

    The default profile is the top-half bump, supported in ``[1/2, 4]``; a
    plain callable needs an explicit ``support``.
    """
    if not isprime(Q):
        raise ExperimentError(f"Q={Q} is not prime")
    if Q > math.isqrt(N):
        raise ExperimentError(f"Q={Q} exceeds N^(1/2) for N={N}")
    if profile is None:
        profile = make_cutoff("phi")
    if support is None:
        if not isinstance(profile, SmoothCutoff) or profile.kind != "phi":
            raise ExperimentError("a support window is required for this profile")
        support = (0.5, 4.0)
    fn = profile.physical if isinstance(profile, SmoothCutoff) else profile
    lo = math.ceil(support[0] * N / Q) * Q
    hi = math.floor(support[1] * N / Q) * Q
    x = np.arange(lo, hi + 1)
    vals = np.where(x % Q == 0, fn(x / N), 0.0)
    return GridSignal(lo, vals)


def experiment_arithmetic_complexity(d: int, k: int, Q_list, N: int) -> list[dict]:
    """Rows ``(Q, measured, predicted, ratio)`` for ``||K_k' * phi_{Q,N}|| / ||phi_{Q,N}||``.

    ``predicted = Q^(-1/d) (N / 2^(dk))^(1/2)``.  The regime requires
    ``N = 2^(k(d-1+delta))`` with ``0 < delta <= 1`` and ``Q <= 2^(k delta)``.
    """
    delta = math.log2(N) / k - (d - 1)
    if not 0 < delta <= 1:
        raise ExperimentError(f"N={N} gives delta={delta:.3f}, need N = 2^(k(d-1+delta)), 0 < delta <= 1")
    K = build_kernel(d, k, smooth=True)
    rows = []
    for Q in Q_list:
        Q = int(Q)
        if Q != 1 and Q > 2 ** (k * delta):
            raise ExperimentError(f"Q={Q} exceeds 2^(k delta) = {2 ** (k * delta):.3g}")
        f = gen_ap_test(Q, N) if Q != 1 else _dense_profile(N)
        measured = l2_norm(convolve(K, f)) / l2_norm(f)
        predicted = Q ** (-1.0 / d) * math.sqrt(N / 2 ** (d * k))
        rows.append({"Q": Q, "measured": measured, "predicted": predicted,
                     "ratio": measured / predicted})
    return rows


def _dense_profile(N: int) -> GridSignal:
    lo, hi = math.ceil(0.5 * N), math.floor(4 * N)
    x = np.arange(lo, hi + 1)
    return GridSignal(lo, make_cutoff("phi").physical(x / N))


# -------------------------------------------------------------- experiments

@dataclass
class ExperimentResult:
    rows: list
    failures: list = field(default_factory=list)
    plot: str = ""
    summary: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


def _ints(v) -> list[int]:
    return [int(x) for x in v]


def _hua(p, seed) -> ExperimentResult:
    rows = [{"Q": r.Q, "normalized_max": r.normalized_max, "argmax_A": r.argmax_A}
            for r in hua_scan(p["d"], p["Q_max"], p["primes_only"])]
    fails = []
    for r in rows:
        odd_prime = r["Q"] == 1 or (r["Q"] != 2 and isprime(r["Q"]))
        if p["d"] == 2 and odd_prime and abs(r["normalized_max"] - 1) > 1e-9:
            fails.append(r)
        elif p["d"] in HUA_BOUNDS and r["normalized_max"] > HUA_BOUNDS[p["d"]]:
            fails.append(r)
    plot = svg.line_plot([("max |S| Q^(1/d)", [r["Q"] for r in rows], [r["normalized_max"] for r in rows])],
                         title=f"Normalized complete Weyl sums, d={p['d']}", xlabel="Q", ylabel="max |S(A/Q)| Q^(1/d)")
    return ExperimentResult(rows, fails, plot)


def _minor(p, seed) -> ExperimentResult:
    Ns = [2**e for e in range(p["log2N_min"], p["log2N_max"] + 1)]
    fit = minor_arc_decay_scan(p["d"], Ns, p["c"], p["samples"], seed)
    rows = [{"N": int(n), "minor_sup": y} for n, y in zip(fit.x, fit.y)]
    summary = {"slope": fit.slope, "intercept": fit.intercept, "residual": fit.residual}
    fails = []
    if not (fit.slope < -0.05 and fit.residual < 0.5):
        fails.append(summary)
    plot = svg.line_plot([("minor-arc sup", fit.x, fit.y), ("fit", fit.x, fit.predict(fit.x).tolist())],
                         title="Minor-arc Weyl sums", xlabel="N", ylabel="sup |W|", logx=True, logy=True)
    return ExperimentResult(rows, fails, plot, summary)


def _multiplier(p, seed) -> ExperimentResult:
    ks = list(range(p["k_min"], p["k_max"] + 1))
    errs = [multiplier_error(p["d"], k, p["c"], refine=p["grid_refine"]) for k in ks]
    rows = [{"k": k, "sup_error": e} for k, e in zip(ks, errs)]
    fit = fit_loglog([2.0**k for k in ks], errs, base=2)
    summary = {"log2_slope": fit.slope, "residual": fit.residual,
               "strictly_decreasing": all(b < a for a, b in zip(errs, errs[1:]))}
    fails = []
    if not (summary["strictly_decreasing"] and fit.slope < -0.1):
        fails.append(summary)
    plot = svg.line_plot([("sup |K' - L'|", ks, errs)], title="Major-arc multiplier error",
                         xlabel="k", ylabel="sup error", logy=True)
    return ExperimentResult(rows, fails, plot, summary)


def _arith(p, seed) -> ExperimentResult:
    rows = experiment_arithmetic_complexity(p["d"], p["k"], _ints(p["Qs"]), p["N"])
    fails = [r for r in rows if not BAND[0] <= r["ratio"] <= BAND[1]]
    plot = svg.line_plot([("measured", [r["Q"] for r in rows], [r["measured"] for r in rows]),
                          ("predicted", [r["Q"] for r in rows], [r["predicted"] for r in rows])],
                         title="Arithmetic complexity", xlabel="Q", ylabel="norm ratio", logx=True, logy=True)
    return ExperimentResult(rows, fails, plot)


def _lepingle(p, seed) -> ExperimentResult:
    rows = []
    for r in p["rs"]:
        r = float(r)
        norm = lepingle_check(p["family"], p["trials"], p["path_length"], r, seed)
        rows.append({"r": r, "ratio": norm * r / (r - 2), "normalized": norm})
    vals = [row["normalized"] for row in rows]
    spread = max(vals) / min(vals) if min(vals) > 0 else math.inf
    summary = {"spread": spread}
    fails = []
    if not all(math.isfinite(row["ratio"]) for row in rows) or not spread < 4:
        fails.append(summary)
    plot = svg.line_plot([("||V^r|| / (r/(r-2) ||f||)", [row["r"] for row in rows], vals)],
                         title="Lepingle ratios", xlabel="r", ylabel="normalized ratio", logy=True)
    return ExperimentResult(rows, fails, plot, summary)


def _rm(p, seed) -> ExperimentResult:
    table, fit = rademacher_menshov_scan(_ints(p["T_sizes"]), p["trials"], p["points"], seed)
    rows = [{"T": T, "ratio": w, "ratio_over_log2T": w / math.log2(T) ** 2} for T, w in table]
    summary = {"slope_vs_log2sq": fit.slope}
    fails = [] if fit.slope <= 1.0 else [summary]
    plot = svg.line_plot([("||sup_t |F_t||| / A", [r["T"] for r in rows], [r["ratio"] for r in rows])],
                         title="Maximal partial sums", xlabel="|T|", ylabel="ratio", logx=True)
    return ExperimentResult(rows, fails, plot, summary)


def _multifreq(p, seed) -> ExperimentResult:
    table, fit = log2N_experiment(_ints(p["Ns"]), p["trials"], None, seed, p["M"],
                                  p["samples_per_unit"], p["k_floor"])
    rows = [r.as_dict() for r in table]
    norm = [r["ratio_over_log2N"] for r in rows]
    # no super-log^2 growth: a later N never exceeds twice an earlier one
    fails = [rows[j] for i in range(len(norm)) for j in range(i + 1, len(norm))
             if norm[j] > 2 * norm[i]]
    summary = {"slope_vs_1+log2sq": fit.slope if fit else None}
    plot = svg.line_plot([("ratio / (1 + log2^2 N)", [r["N"] for r in rows], norm),
                          ("ratio", [r["N"] for r in rows], [r["ratio_max"] for r in rows])],
                         title="Multi-frequency maximal ratio", xlabel="N", ylabel="ratio", logx=True, logy=True)
    return ExperimentResult(rows, fails, plot, summary)


def _vk(p, seed) -> ExperimentResult:
    d, k = p["d"], p["k"]
    rows = []
    fails = []
    taylor = 2 * math.pi / (d + 1)
    for lam in p["lams"]:
        lam = float(lam)
        v = evaluate_vk(d, k, lam / 2.0 ** (d * k))
        row = {"lam": lam, "abs_V": abs(v), "decay_quotient": abs(v) * lam ** (1.0 / d),
               "taylor_quotient": abs(v - 1) / lam}
        rows.append(row)
        if lam >= 10 and row["decay_quotient"] > STATIONARY_PHASE_CONSTANT:
            fails.append(row)
        if lam <= 0.1 and row["taylor_quotient"] > taylor:
            fails.append(row)
    plot = svg.line_plot([("|V_k|", [r["lam"] for r in rows], [r["abs_V"] for r in rows])],
                         title=f"Oscillatory integral V_k, d={d}", xlabel="2^(dk) xi", ylabel="|V_k|",
                         logx=True, logy=True)
    return ExperimentResult(rows, fails, plot)


EXPERIMENTS: dict[str, tuple[Callable, dict]] = {
    "hua-scan": (_hua, {"d": 2, "Q_max": 97, "primes_only": True}),
    "minor-arc-decay": (_minor, {"d": 2, "log2N_min": 8, "log2N_max": 14, "c": 0.2, "samples": 500}),
    "multiplier-error-decay": (_multiplier, {"d": 2, "c": 0.2, "k_min": 6, "k_max": 12, "grid_refine": 0}),
    "arithmetic-complexity": (_arith, {"d": 2, "k": 9, "N": 2**14, "Qs": [3, 5, 7, 11, 13]}),
    "lepingle": (_lepingle, {"family": "martingale", "trials": 200, "path_length": 12,
                             "rs": [2.1, 2.5, 4.0, 10.0]}),
    "rademacher-menshov": (_rm, {"T_sizes": [4, 8, 16, 32, 64, 128, 256], "trials": 20, "points": 4096}),
    "multifreq-log2n": (_multifreq, {"Ns": [2, 4, 8, 16, 32], "trials": 50, "M": 2**16,
                                     "samples_per_unit": 64, "k_floor": 3}),
    "vk-decay": (_vk, {"d": 2, "k": 4, "lams": [0.001, 0.01, 0.1, 10.0, 100.0, 1000.0]}),
}


def _coerce(default, raw):
    if not isinstance(raw, str):
        return raw
    if isinstance(default, bool):
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ExperimentError(f"not a flag value: {raw!r}")
    if isinstance(default, list):
        kind = type(default[0]) if default else str
        return [kind(x) for x in raw.split(",") if x.strip()]
    return type(default)(raw)


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    params: dict
    seed: int = 0
    out: Path = Path(".")

    @classmethod
    def parse(cls, name: str, overrides: dict | None = None, seed: int = 0,
              out=".") -> "ExperimentSpec":
        if name not in EXPERIMENTS:
            raise ExperimentError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
        defaults = EXPERIMENTS[name][1]
        params = dict(defaults)
        for key, raw in (overrides or {}).items():
            key = key.replace("-", "_")
            if key not in defaults:
                raise ExperimentError(f"unknown parameter {key!r} for {name}")
            params[key] = _coerce(defaults[key], raw)
        if not 0 <= int(seed) < 2**64:
            raise ExperimentError("seed must be an unsigned 64-bit integer")
        return cls(name, params, int(seed), Path(out))


def parse_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ExperimentError(f"{path}:{n}: expected key=value")
        out[key.strip()] = val.strip()
    return out


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o).__name__)


def run_experiment(spec: ExperimentSpec) -> tuple[int, ExperimentResult]:
    """Run, write artifacts, and return ``(exit status, result)``."""
    fn, _ = EXPERIMENTS[spec.name]
    result = fn(spec.params, spec.seed)
    out = Path(spec.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{spec.name}.csv").write_text(_csv_text(result.rows), newline="")
        lines = [json.dumps(r, sort_keys=True, default=_json_default) for r in result.rows]
        if result.summary:
            lines.append(json.dumps({"summary": result.summary}, sort_keys=True, default=_json_default))
        (out / f"{spec.name}.jsonl").write_text("".join(line + "\n" for line in lines))
        (out / f"{spec.name}.svg").write_text(result.plot)
    except OSError as exc:
        raise ExperimentError(f"cannot write to {out}: {exc}") from exc
    return (0 if result.ok else 1), result
