"""Declarative experiments: YAML configs in, CSV and SVG files out.

Config schema (``schema_version: 1``)::

    schema_version: 1
    kind: verify-bound        # spectrum | verify-bound | decomposition | oracle
                              # | mixing | tangle-census | norm-report
    degrees:                  # exactly one of
      regular: 3              #   d-regular, one sequence per entry of ``n``
      types: [[60, 5, 6], [60, 3, 7], [60, 9, 4]]
                              #   (count, d_plus, d_minus); rescaled to each ``n``
      file: seq.txt           #   degree text file, relative to the config
    n: [500]                  # int or list; required for ``regular``
    seed_root: 1
    trials: 50
    epsilon: 0.08             # kind-specific parameters, see KIND_KEYS
    expect:                   # optional; a failed expectation exits with status 1
      min_satisfied_fraction: 0.9

Unknown keys are errors.  Trial ``k`` uses ``derive_seed(seed_root, k)`` for
every ``n``.

Outputs in the output directory:

``trials.csv``
    One row per trial, columns ``TRIAL_COLUMNS[kind]``, rows sorted by
    ``(n, seed)``.
``summary.csv``
    ``n,metric,count,mean,min,q05,q25,q50,q75,q95,max`` for the metrics in
    ``SUMMARY_METRICS[kind]``; booleans are 0/1 so their mean is a fraction.
``timings.csv``
    ``n,trial,seed,wall_seconds``.  Kept apart so that the two files above are
    byte-identical across runs.
``svg/``, ``traces/``
    Spectrum scatters and mixing traces when requested.

Floats are written with ``repr`` and nothing time-dependent enters the
CSVs or SVGs.
"""
from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from .degrees import DegreeSequence, format_degree_text, from_types, parse_degree_text, regular
from .errors import CapExceeded, ConfigError, DigraphSpectraError
from .oracle import entry_functional, exact_expectation, family_sweep, small_sequences
from .paths import decomposition_residual, norm_vs_bound_report
from .sampler import derive_seed, sample_digraph
from .spectrum import check_main_bound, eigenvalues, format_spectrum_csv, spectrum_svg
from .tangle import default_t, is_d_tangle_free, tangled_centers
from .transition import build_P
from .walks import collision_probability, format_trace_csv, mixing_trace, period

__all__ = [
    "ExperimentConfig",
    "RunResult",
    "KINDS",
    "TRIAL_COLUMNS",
    "SUMMARY_METRICS",
    "parse_config",
    "load_config",
    "run_experiment",
    "rows_to_csv",
    "summarize",
]

SCHEMA_VERSION = 1
KINDS = ("spectrum", "verify-bound", "decomposition", "oracle", "mixing",
         "tangle-census", "norm-report")

COMMON_KEYS = {"schema_version", "kind", "degrees", "n", "seed_root", "trials", "out", "expect"}
KIND_KEYS = {
    "spectrum": {"epsilon", "svg", "write_spectra"},
    "verify-bound": {"epsilon", "t", "svg"},
    "decomposition": {"t", "tangle_free_samples", "max_seeds", "general_identity"},
    "oracle": {"max_M", "N_max", "c"},
    "mixing": {"k_max", "t", "write_traces"},
    "tangle-census": {"t", "alpha"},
    "norm-report": {"t", "c", "D"},
}
REQUIRED_KEYS = {
    "verify-bound": {"epsilon"},
    "decomposition": {"t"},
    "mixing": {"k_max"},
    "norm-report": {"t"},
}
EXPECT_KEYS = {
    "spectrum": {"min_satisfied_fraction"},
    "verify-bound": {"min_satisfied_fraction"},
    "decomposition": {"max_residual", "max_residual_general", "min_tangle_free_samples"},
    "oracle": {"expectation_exact", "max_regime_violations", "at_c"},
    "mixing": {"max_rate_error"},
    "tangle-census": {"min_tangle_free_fraction"},
    "norm-report": set(),
}

_BASE = ["n", "trial", "seed", "rho", "rho_tilde"]
TRIAL_COLUMNS = {
    "spectrum": _BASE + ["lambda2", "gap", "outliers", "threshold", "margin", "satisfied"],
    "verify-bound": _BASE + ["lambda2", "threshold", "margin", "satisfied", "t", "tangle_free"],
    "decomposition": _BASE + ["t", "tangle_free", "residual", "residual_general", "note"],
    "mixing": _BASE + ["lambda2", "strongly_connected", "aperiodic", "k_max", "rate",
                       "rate_error", "t", "collision", "collision_scaled", "note"],
    "tangle-census": _BASE + ["t", "tangle_free", "tangled_balls", "first_witness"],
    "norm-report": _BASE + ["t", "c", "lambda2", "norm_P", "norm_Pbar_tf", "norm_Pbar_tf_root",
                            "K_t", "norm_R_max"],
    "oracle": ["seq_id", "n", "M", "degrees", "expectation_exact", "c", "family_size",
               "regime_size", "violations", "regime_violations", "max_ratio",
               "max_regime_ratio"],
}
SUMMARY_METRICS = {
    "spectrum": ["lambda2", "satisfied", "outliers"],
    "verify-bound": ["lambda2", "satisfied", "tangle_free"],
    "decomposition": ["tangle_free", "residual", "residual_general"],
    "mixing": ["lambda2", "rate", "rate_error", "collision_scaled"],
    "tangle-census": ["tangle_free", "tangled_balls"],
    "norm-report": ["norm_Pbar_tf", "norm_Pbar_tf_root", "K_t", "norm_R_max"],
    "oracle": ["expectation_exact", "violations", "regime_violations", "max_ratio"],
}
SUMMARY_COLUMNS = ["n", "metric", "count", "mean", "min", "q05", "q25", "q50", "q75", "q95", "max"]
_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


# --------------------------------------------------------------------------
# Config parsing
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    sequences: tuple          # ((n, DegreeSequence), ...); empty for oracle
    seed_root: Optional[int]
    trials: int
    params: dict
    expect: dict
    out: Optional[str] = None
    degrees_spec: dict = field(default_factory=dict)


def _key_lines(text: str) -> dict:
    """Map key paths like ``('degrees', 'types')`` to 1-based line numbers."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    out = {}

    def walk(node, path):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                p = path + (k.value,)
                out[p] = k.start_mark.line + 1
                walk(v, p)

    if root is not None:
        walk(root, ())
    return out


def parse_config(text: str, base_dir: Optional[Path] = None) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {exc}",
                          line=None if mark is None else mark.line + 1) from exc
    lines = _key_lines(text)
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")

    def err(msg, *path):
        return ConfigError(msg, field=".".join(path) or None, line=lines.get(path))

    def get_int(key, default=None, minimum=None, required=False):
        if key not in data:
            if required:
                raise err(f"missing required key '{key}'")
            return default
        v = data[key]
        if isinstance(v, bool) or not isinstance(v, int):
            raise err(f"expected an integer, got {v!r}", key)
        if minimum is not None and v < minimum:
            raise err(f"must be >= {minimum}", key)
        return v

    def get_float(key, default=None, positive=False, required=False):
        if key not in data:
            if required:
                raise err(f"missing required key '{key}'")
            return default
        v = data[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise err(f"expected a number, got {v!r}", key)
        if positive and not v > 0:
            raise err("must be positive", key)
        return float(v)

    def get_bool(key, default=False):
        v = data.get(key, default)
        if not isinstance(v, bool):
            raise err(f"expected true/false, got {v!r}", key)
        return v

    def float_list(key, default):
        v = data.get(key, default)
        v = v if isinstance(v, list) else [v]
        if not v or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
            raise err(f"expected a number or list of numbers, got {data.get(key)!r}", key)
        return [float(x) for x in v]

    version = get_int("schema_version", required=True)
    if version != SCHEMA_VERSION:
        raise err(f"unsupported schema_version {version}; expected {SCHEMA_VERSION}",
                  "schema_version")
    kind = data.get("kind")
    if kind not in KINDS:
        raise err(f"kind must be one of {', '.join(KINDS)}; got {kind!r}", "kind")
    allowed = COMMON_KEYS | KIND_KEYS[kind]
    for key in data:
        if key not in allowed:
            raise err(f"unknown key '{key}' for kind {kind}", key)
    for key in REQUIRED_KEYS.get(kind, ()):
        if key not in data:
            raise err(f"kind {kind} needs key '{key}'")

    expect = data.get("expect", {}) or {}
    if not isinstance(expect, dict):
        raise err("expect must be a mapping", "expect")
    for key in expect:
        if key not in EXPECT_KEYS[kind]:
            raise err(f"unknown expectation '{key}' for kind {kind}", "expect", key)

    params: dict[str, Any] = {}
    if kind == "oracle":
        params["max_M"] = get_int("max_M", 6, minimum=2)
        params["N_max"] = get_int("N_max", 3, minimum=1)
        params["c"] = float_list("c", [1.5, 2.0])
        if any(c <= 1 for c in params["c"]):
            raise err("every c must exceed 1", "c")
        for key in ("degrees", "n", "seed_root", "trials"):
            if key in data:
                raise err(f"kind oracle enumerates its own sequences; remove '{key}'", key)
        return ExperimentConfig(kind, (), None, 0, params, dict(expect), data.get("out"))

    seed_root = get_int("seed_root", required=True, minimum=0)
    trials = get_int("trials", 1, minimum=1)
    if kind in ("spectrum", "verify-bound"):
        params["epsilon"] = get_float("epsilon", None, positive=True,
                                      required=kind == "verify-bound")
        params["svg"] = get_bool("svg", False)
        params["write_spectra"] = get_bool("write_spectra", False)
        params["t"] = get_int("t", None, minimum=1)
    elif kind == "decomposition":
        params["t"] = get_int("t", required=True, minimum=1)
        params["tangle_free_samples"] = get_int("tangle_free_samples", None, minimum=1)
        params["max_seeds"] = get_int("max_seeds", 100_000, minimum=1)
        params["general_identity"] = get_bool("general_identity", False)
    elif kind == "mixing":
        params["k_max"] = get_int("k_max", required=True, minimum=1)
        params["t"] = get_int("t", None, minimum=1)
        params["write_traces"] = get_bool("write_traces", False)
    elif kind == "tangle-census":
        params["t"] = get_int("t", None, minimum=0)
        params["alpha"] = get_float("alpha", 0.24, positive=True)
    elif kind == "norm-report":
        params["t"] = get_int("t", required=True, minimum=1)
        params["c"] = get_float("c", 1.1, positive=True)
        params["D"] = float_list("D", [1, 2, 3])

    sequences = _parse_degrees(data, lines, err, base_dir)
    return ExperimentConfig(kind, sequences, seed_root, trials, params, dict(expect),
                            data.get("out"), dict(data.get("degrees") or {}))


def _parse_degrees(data, lines, err, base_dir) -> tuple:
    spec = data.get("degrees")
    if not isinstance(spec, dict) or len(spec) != 1:
        raise err("degrees must be a mapping with exactly one of regular, types, file",
                  "degrees")
    (how, value), = spec.items()
    ns = data.get("n")
    if ns is not None:
        ns = ns if isinstance(ns, list) else [ns]
        if not ns or any(isinstance(x, bool) or not isinstance(x, int) or x < 1 for x in ns):
            raise err(f"n must be a positive integer or a list of them, got {data['n']!r}", "n")

    def wrap(exc, *path):
        line = lines.get(path)
        where = ".".join(path) + (f" (line {line})" if line else "")
        return type(exc)(f"{where}: {exc}")

    try:
        if how == "regular":
            if isinstance(value, bool) or not isinstance(value, int):
                raise err(f"regular degree must be an integer, got {value!r}",
                          "degrees", "regular")
            if ns is None:
                raise err("degrees.regular needs n", "n")
            return tuple((n, regular(n, value)) for n in ns)
        if how == "types":
            if not isinstance(value, list) or not all(
                    isinstance(t, list) and len(t) == 3 and all(
                        isinstance(x, int) and not isinstance(x, bool) for x in t)
                    for t in value):
                raise err("types must be a list of [count, d_plus, d_minus] integer triples",
                          "degrees", "types")
            base = sum(t[0] for t in value)
            if ns is None:
                return ((base, from_types(value)),)
            out = []
            for n in ns:
                if (n * value[0][0]) % base or any((n * t[0]) % base for t in value):
                    raise err(f"n={n} does not rescale the type counts {value} to integers",
                              "n")
                out.append((n, from_types([[n * t[0] // base, t[1], t[2]] for t in value])))
            return tuple(out)
        if how == "file":
            if ns is not None:
                raise err("n is fixed by the degree file; remove it", "n")
            path = Path(value)
            if not path.is_absolute() and base_dir is not None:
                path = base_dir / path
            try:
                seq = parse_degree_text(path.read_text())
            except OSError as exc:
                raise err(f"cannot read degree file {str(path)!r}: {exc.strerror}",
                          "degrees", "file") from exc
            return ((seq.n, seq),)
    except ConfigError:
        raise
    except DigraphSpectraError as exc:
        raise wrap(exc, "degrees", how) from exc
    raise err(f"unknown degree spec '{how}'; use regular, types or file", "degrees", how)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


# --------------------------------------------------------------------------
# Trials
# --------------------------------------------------------------------------

def _t_for(params, seq):
    return params["t"] if params.get("t") is not None else default_t(seq.n, seq.Delta)


def _trial(kind: str, params: dict, n: int, seq: DegreeSequence, k: int, seed: int):
    t0 = time.perf_counter()
    g = sample_digraph(seq, seed)
    row: dict[str, Any] = {"n": n, "trial": k, "seed": seed,
                           "rho": seq.rho, "rho_tilde": seq.rho_tilde}
    files: dict[str, str] = {}

    if kind in ("spectrum", "verify-bound"):
        rep = eigenvalues(build_P(g))
        row["lambda2"] = rep.lambda2_mod
        eps = params.get("epsilon")
        if eps is not None:
            v = check_main_bound(rep, eps)
            row.update(threshold=v.threshold, margin=v.margin, satisfied=v.satisfied)
        if kind == "spectrum":
            row["gap"] = rep.gap
            row["outliers"] = rep.outliers()
        else:
            t = _t_for(params, seq)
            row["t"] = t
            row["tangle_free"] = is_d_tangle_free(g, t)[0]
        if params.get("svg"):
            files[f"svg/spectrum_n{n}_trial{k:04d}.svg"] = spectrum_svg(
                rep, f"n={n} seed={seed}")
        if params.get("write_spectra"):
            files[f"spectra/spectrum_n{n}_trial{k:04d}.csv"] = format_spectrum_csv(rep)

    elif kind == "decomposition":
        t = params["t"]
        ok, _ = is_d_tangle_free(g, t)
        row.update(t=t, tangle_free=ok)
        if ok:
            row["residual"] = decomposition_residual(g, t)
            row["note"] = ""
        else:
            row["note"] = "skipped: tangled"
        if params.get("general_identity"):
            row["residual_general"] = decomposition_residual(g, t, require_tangle_free=False)

    elif kind == "mixing":
        P = build_P(g)
        rep = eigenvalues(P)
        sc = g.is_strongly_connected()
        t = _t_for(params, seq)
        coll = collision_probability(P, t)
        row.update(lambda2=rep.lambda2_mod, strongly_connected=sc, k_max=params["k_max"],
                   t=t, collision=coll, collision_scaled=n * coll / math.log(n) ** 2)
        if not sc:
            row["note"] = "skipped: not strongly connected"
        else:
            aper = period(P) == 1
            row["aperiodic"] = aper
            if not aper:
                row["note"] = "skipped: periodic"
            else:
                tr = mixing_trace(P, params["k_max"])
                row["rate"] = float(tr.roots[-1])
                row["rate_error"] = abs(row["rate"] - rep.lambda2_mod)
                row["note"] = "degenerate: d(k_max) = 0" if tr.degenerate else ""
                if params.get("write_traces"):
                    files[f"traces/trace_n{n}_trial{k:04d}.csv"] = format_trace_csv(tr)

    elif kind == "tangle-census":
        t = params["t"] if params.get("t") is not None else default_t(
            seq.n, seq.Delta, params["alpha"])
        bad = tangled_centers(g, t)
        row.update(t=t, tangle_free=not bad, tangled_balls=len(bad),
                   first_witness=bad[0] if bad else None)

    elif kind == "norm-report":
        t = params["t"]
        rep = norm_vs_bound_report(g, t, params["c"], params["D"])
        row.update(t=t, c=params["c"], lambda2=rep["lambda2_pow_t"] ** (1.0 / t),
                   norm_P=rep["norm_P"], norm_Pbar_tf=rep["norm_Pbar_tf"],
                   norm_Pbar_tf_root=rep["norm_Pbar_tf_root"], K_t=rep["K_t"],
                   norm_R_max=max(rep["norm_R"]))
        for D, b in rep["bound_Pbar"].items():
            row[f"bound_Pbar_D{_fmt_num(D)}"] = b
        for D, bs in rep["bound_R"].items():
            row[f"bound_R_max_D{_fmt_num(D)}"] = max(bs)

    return row, files, time.perf_counter() - t0


def _oracle_job(seq_id: int, seq: DegreeSequence, params: dict):
    t0 = time.perf_counter()
    exact = all(exact_expectation(seq, entry_functional(seq, i, j))
                == Fraction(int(seq.d_minus[j]), seq.M)
                for i in range(seq.n) for j in range(seq.n))
    sweep = family_sweep(seq, params["N_max"], params["c"])
    rows = []
    degrees = ";".join(f"{c}x({a},{b})" for c, a, b in seq.types())
    regime = sweep.in_regime
    for c in params["c"]:
        ratio = np.abs(sweep.F) / sweep.rhs[c]
        rows.append({
            "seq_id": seq_id, "n": seq.n, "M": seq.M, "degrees": degrees,
            "expectation_exact": exact, "c": c, "family_size": len(sweep),
            "regime_size": int(regime.sum()),
            "violations": int(sweep.violations(c).size),
            "regime_violations": int(sweep.violations(c, regime_only=True).size),
            "max_ratio": float(ratio.max()),
            "max_regime_ratio": float(ratio[regime].max()) if regime.any() else None,
        })
    return rows, time.perf_counter() - t0


def _fmt_num(x) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _trial_star(args):
    return _trial(*args)


def _oracle_star(args):
    return _oracle_job(*args)


def _pool_map(fn, tasks, jobs):
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "" if math.isnan(v) else repr(v)
    return str(v)


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    extra = []
    for r in rows:
        for k in r:
            if k not in columns and k not in extra:
                extra.append(k)
    cols = list(columns) + extra
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def summarize(rows: list[dict], metrics: list[str]) -> list[dict]:
    out = []
    for n in sorted({r["n"] for r in rows}):
        group = [r for r in rows if r["n"] == n]
        for m in metrics:
            vals = [float(r[m]) for r in group
                    if r.get(m) is not None and not (isinstance(r[m], float) and math.isnan(r[m]))]
            rec: dict[str, Any] = {"n": n, "metric": m, "count": len(vals)}
            if vals:
                a = np.array(vals)
                rec.update(mean=float(a.mean()), min=float(a.min()), max=float(a.max()))
                for q, name in zip(_QUANTILES, ("q05", "q25", "q50", "q75", "q95")):
                    rec[name] = float(np.quantile(a, q))
            out.append(rec)
    return out


@dataclass
class RunResult:
    config: ExperimentConfig
    rows: list
    summary: list
    failures: list          # failed expectations, human-readable
    out_dir: Optional[Path]
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _check_expectations(cfg: ExperimentConfig, rows: list) -> list[str]:
    ex = cfg.expect
    fails = []

    def col(name, subset=None):
        src = rows if subset is None else subset
        return [r[name] for r in src if r.get(name) is not None]

    for n in sorted({r["n"] for r in rows}):
        group = [r for r in rows if r["n"] == n]
        if "min_satisfied_fraction" in ex:
            vals = col("satisfied", group)
            frac = sum(vals) / len(vals) if vals else 0.0
            if frac < ex["min_satisfied_fraction"]:
                fails.append(f"n={n}: satisfied fraction {frac:.3f} < "
                             f"{ex['min_satisfied_fraction']}")
        if "min_tangle_free_fraction" in ex:
            vals = col("tangle_free", group)
            frac = sum(vals) / len(vals) if vals else 0.0
            if frac < ex["min_tangle_free_fraction"]:
                fails.append(f"n={n}: tangle-free fraction {frac:.3f} < "
                             f"{ex['min_tangle_free_fraction']}")
        if "max_rate_error" in ex:
            vals = col("rate_error", group)
            if not vals:
                fails.append(f"n={n}: no strongly connected aperiodic sample")
            elif max(vals) > ex["max_rate_error"]:
                fails.append(f"n={n}: rate error {max(vals):.4g} > {ex['max_rate_error']}")
        if "max_residual" in ex:
            vals = col("residual", group)
            if vals and max(vals) > ex["max_residual"]:
                fails.append(f"n={n}: residual {max(vals):.3e} > {ex['max_residual']}")
        if "max_residual_general" in ex:
            vals = col("residual_general", group)
            if vals and max(vals) > ex["max_residual_general"]:
                fails.append(f"n={n}: general residual {max(vals):.3e} > "
                             f"{ex['max_residual_general']}")
        if "min_tangle_free_samples" in ex:
            k = sum(1 for r in group if r.get("tangle_free"))
            if k < ex["min_tangle_free_samples"]:
                fails.append(f"n={n}: only {k} tangle-free samples")
    if cfg.kind == "oracle":
        if ex.get("expectation_exact") and not all(r["expectation_exact"] for r in rows):
            fails.append("exact expectation of P entries failed for some sequence")
        if "max_regime_violations" in ex:
            at = ex.get("at_c")
            sel = [r for r in rows if at is None or r["c"] == float(at)]
            total = sum(r["regime_violations"] for r in sel)
            if total > ex["max_regime_violations"]:
                fails.append(f"{total} in-regime bound violations")
    return fails


def _write(out_dir: Path, name: str, text: str) -> None:
    path = out_dir / name
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def run_experiment(cfg: ExperimentConfig, out_dir=None, jobs: Optional[int] = None,
                   seed_root: Optional[int] = None) -> RunResult:
    """Run every trial of ``cfg`` and write the outputs (if ``out_dir`` is set)."""
    if seed_root is not None and cfg.kind != "oracle":
        cfg = ExperimentConfig(cfg.kind, cfg.sequences, seed_root, cfg.trials, cfg.params,
                               cfg.expect, cfg.out, cfg.degrees_spec)
    notes: list[str] = []
    timings: list[tuple] = []
    files: dict[str, str] = {}

    if cfg.kind == "oracle":
        seqs = small_sequences(cfg.params["max_M"])
        results = _pool_map(_oracle_star, [(i, s, cfg.params) for i, s in enumerate(seqs)],
                            jobs)
        rows = [r for rs, _ in results for r in rs]
        for (rs, wall), s in zip(results, seqs):
            timings.append((s.n, rs[0]["seq_id"], "", wall))
    elif cfg.kind == "decomposition" and cfg.params.get("tangle_free_samples"):
        rows = _scan_decomposition(cfg, jobs, timings, notes)
    else:
        tasks = [(cfg.kind, cfg.params, n, seq, k, derive_seed(cfg.seed_root, k))
                 for n, seq in cfg.sequences for k in range(cfg.trials)]
        rows = []
        for row, fs, wall in _pool_map(_trial_star, tasks, jobs):
            rows.append(row)
            files.update(fs)
            timings.append((row["n"], row["trial"], row["seed"], wall))

    if cfg.kind == "oracle":
        rows.sort(key=lambda r: (r["seq_id"], r["c"]))
    else:
        rows.sort(key=lambda r: (r["n"], r["seed"]))
    if cfg.kind == "decomposition":
        skipped = sum(1 for r in rows if not r.get("tangle_free"))
        if skipped:
            notes.append(f"{skipped} tangled seed(s) skipped")
    summary = summarize(rows, SUMMARY_METRICS[cfg.kind])
    failures = _check_expectations(cfg, rows)

    out = None
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write(out, "trials.csv", rows_to_csv(rows, TRIAL_COLUMNS[cfg.kind]))
        _write(out, "summary.csv", rows_to_csv(summary, SUMMARY_COLUMNS))
        timings.sort(key=lambda x: (x[0], str(x[2]), str(x[1])))
        _write(out, "timings.csv", rows_to_csv(
            [{"n": a, "trial": b, "seed": c, "wall_seconds": w} for a, b, c, w in timings],
            ["n", "trial", "seed", "wall_seconds"]))
        for name, text in sorted(files.items()):
            _write(out, name, text)
        if cfg.sequences:
            for n, seq in cfg.sequences:
                _write(out, f"degrees/n{n}.txt", format_degree_text(seq))
    return RunResult(cfg, rows, summary, failures, out, notes)


def _scan_decomposition(cfg, jobs, timings, notes) -> list:
    """Scan seeds in index order until enough tangle-free samples are found."""
    target = cfg.params["tangle_free_samples"]
    max_seeds = cfg.params["max_seeds"]
    batch = max(256, 64 * (jobs or os.cpu_count() or 1))
    rows = []
    for n, seq in cfg.sequences:
        found = []
        k0 = 0
        group = []
        while len(found) < target and k0 < max_seeds:
            ks = range(k0, min(k0 + batch, max_seeds))
            tasks = [(cfg.kind, cfg.params, n, seq, k, derive_seed(cfg.seed_root, k))
                     for k in ks]
            for row, _, wall in _pool_map(_trial_star, tasks, jobs):
                group.append(row)
                timings.append((row["n"], row["trial"], row["seed"], wall))
                if row["tangle_free"]:
                    found.append(row["trial"])
            k0 = ks.stop
        if len(found) < target:
            raise CapExceeded(f"n={n}: only {len(found)} of {target} tangle-free samples "
                              f"within {max_seeds} seeds")
        last = sorted(found)[target - 1]
        kept = [r for r in group if r["trial"] <= last]
        timings[:] = [x for x in timings if x[0] != n or x[1] <= last]
        notes.append(f"n={n}: scanned {last + 1} seeds for {target} tangle-free samples")
        rows.extend(kept)
    return rows
