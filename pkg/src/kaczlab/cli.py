"""Command-line runner for JSON experiment configs.

    kaczlab <experiment> --config <file> [--out <dir>] [--seed <u64>] [--quiet]
    kaczlab list

Each run writes ``<experiment>.csv`` (17 significant digits, byte-identical
across runs of the same config) and ``<experiment>.json`` (config echo,
library version, wall-clock time and headline numbers). Exit codes: 0 on
success, 1 on I/O failure, 2 on a config error, 3 on a numeric-domain error.
"""

import argparse
import csv
import io
import json
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .engine import InputStream, fmt, kaczmarz_run, series_reconstruction
from .errors import ConfigError, KaczlabError
from .hilbert import norm, vector_from_json, vector_to_json
from .noise import hoelder_check, l2_norm, maximal_function, profile_from_dict, radial_table
from .relaxation import (DEFAULT_OMEGA_GRID, ABEL_DEPTH_CAP, abel_partial, abel_sweep, augmented_run,
                         augmented_vs_relaxed, relaxed_limit)
from .spectral import AtomicMeasure, alpha_coefficients, measure_from_dict, moments
from .truncation import analysis, cycle_csv, moore_penrose_lss, periodize, truncated_noisy_run

TOP_KEYS = {"measure", "noise", "truth_vector", "experiment", "parameters", "output"}
OUTPUT_KEYS = {"path", "format"}
_RANDOM_RE = re.compile(r"^random(?:\((\d+)\))?$")


def _table(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _complex_rows(values):
    return [[n, fmt(z.real), fmt(z.imag)] for n, z in enumerate(np.asarray(values, dtype=complex))]


class Run:
    """Parsed config plus the objects built from it."""

    def __init__(self, config, seed=None):
        self.config = config
        self.params = dict(config.get("parameters") or {})
        if seed is not None:
            self.params["seed"] = seed
        try:
            self.measure = measure_from_dict(config["measure"])
        except KeyError as exc:
            raise ConfigError(f"missing key {exc}") from None
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"measure: {exc}") from None
        self._noise_spec = config.get("noise")
        self._truth_spec = config.get("truth_vector", "zero")

    @property
    def seed(self):
        s = self.params.get("seed")
        if s is None:
            return None
        if not isinstance(s, int) or isinstance(s, bool) or not 0 <= s < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        return s

    def atomic(self):
        if not isinstance(self.measure, AtomicMeasure):
            raise ConfigError("this experiment needs an atomic measure")
        return self.measure

    def noise(self):
        spec = self._noise_spec
        if spec is None:
            return None
        if not isinstance(spec, dict):
            raise ConfigError("noise must be an object or null")
        spec = dict(spec)
        if spec.get("kind") == "random_l2" and "seed" not in spec:
            if self.seed is None:
                raise ConfigError("random_l2 noise needs a seed")
            spec["seed"] = self.seed
        try:
            return profile_from_dict(spec, self.measure)
        except KeyError as exc:
            raise ConfigError(f"noise: missing key {exc}") from None
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"noise: {exc}") from None

    def truth(self):
        """Ground truth: ``"zero"``, ``"random"``/``"random(seed)"`` (unit norm) or a list."""
        m = self.atomic()
        spec = self._truth_spec
        if isinstance(spec, str):
            if spec == "zero":
                return np.zeros(m.size, dtype=complex)
            hit = _RANDOM_RE.match(spec)
            if not hit:
                raise ConfigError(f"unknown truth_vector {spec!r}")
            seed = int(hit.group(1)) if hit.group(1) else self.seed
            if seed is None:
                raise ConfigError("truth_vector 'random' needs a seed")
            x = np.random.default_rng(seed).standard_normal((m.size, 2)) @ np.array([1.0, 1j])
            return x / norm(m, x)
        try:
            if spec and isinstance(spec[0], (list, tuple)):
                x = vector_from_json(spec)
            else:
                x = np.array(spec, dtype=complex)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"truth_vector: {exc}") from None
        if x.shape != (m.size,):
            raise ConfigError(f"truth_vector has {x.size} entries, measure has {m.size} atoms")
        return x

    def stream(self, x):
        p = self.noise()
        if p is None:
            return InputStream.clean(self.measure, x)
        return InputStream.noisy(self.measure, x, p)


def _int(v, name, lo=0):
    if not isinstance(v, int) or isinstance(v, bool) or v < lo:
        raise ConfigError(f"{name} must be an integer >= {lo}")
    return v


def _num(v, name):
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"{name} must be a number")
    return float(v)


def _nums(v, name):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{name} must be a non-empty list of numbers")
    return [_num(a, name) for a in v]


def run_moments(run, p):
    depth = _int(p.get("depth", 16), "depth")
    mu = moments(run.measure, depth)
    return _table(["n", "re", "im"], _complex_rows(mu)), {"depth": depth}


def run_alpha(run, p):
    depth = _int(p.get("depth", 16), "depth")
    alpha = alpha_coefficients(run.measure, depth).coeffs
    return _table(["n", "re", "im"], _complex_rows(alpha)), {"depth": depth}


def run_reconstruct(run, p):
    m = run.atomic()
    N = _int(p.get("N", 1000), "N")
    stop = p.get("stop_tol")
    stop = None if stop is None else _num(stop, "stop_tol")
    x = run.truth()
    c = run.stream(x)
    rep = kaczmarz_run(m, c, N, truth=x, stop_tol=stop)
    steps = rep.metadata["steps"]
    deviation = norm(m, rep.final - series_reconstruction(m, alpha_coefficients(m, steps), c, steps))
    summary = {
        "steps": steps,
        "final_error": float(rep.error_norms[-1]),
        "max_residual": rep.metadata["max_residual"],
        "series_deviation": deviation,
        "final": vector_to_json(rep.final),
    }
    return rep.to_csv(), summary


def run_abel_sweep(run, p):
    m = run.atomic()
    r_grid = _nums(p.get("r_grid", [0.9, 0.99, 0.999]), "r_grid")
    tol = _num(p.get("tol", 1e-12), "tol")
    cap = _int(p.get("cap", ABEL_DEPTH_CAP), "cap", 1)
    x = run.truth()
    res = abel_sweep(m, run.stream(x), r_grid, tol, x, cap=cap)
    summary = {"r": res.r_values, "error": [float(e) for e in res.errors], "depth": res.depths,
               "cap_hit": res.cap_hit}
    return res.to_csv(), summary


def run_truncate(run, p):
    m = run.atomic()
    N = _int(p.get("N", m.size), "N", 1)
    cycles = p.get("cycles")
    cycles = None if cycles is None else _int(cycles, "cycles", 1)
    x = run.truth()
    prof = run.noise()
    eps = np.zeros(N, dtype=complex) if prof is None else prof.coefficients(N - 1)
    rep = truncated_noisy_run(periodize(m, N), x, eps, cycles)
    summary = {k: float(v) for k, v in rep.bound_values.items()}
    summary["cycles"] = rep.metadata["cycles"]
    return cycle_csv(rep), summary


def run_compare_variants(run, p):
    m = run.atomic()
    r = _num(p.get("r", 0.8), "r")
    N = _int(p.get("N", 20), "N")
    period = _int(p.get("period", m.size + 1), "period", 1)
    grid = _nums(p.get("omega_grid", list(DEFAULT_OMEGA_GRID)), "omega_grid")
    x = run.truth()
    c = run.stream(x)
    aug = augmented_run(m, c, r, N)
    abel = abel_partial(m, alpha_coefficients(m, N), c, r, N)
    sys_ = periodize(m, period)
    prof = run.noise()
    data = analysis(sys_, x)
    if prof is not None:
        data = data + prof.coefficients(period - 1)
    rl = relaxed_limit(m, sys_.vectors, data, grid)
    rows = {
        "augmented_vs_abel": norm(m, aug - abel),
        "augmented_vs_relaxed": augmented_vs_relaxed(m, None, c, r, N),
        "relaxed_limit_vs_lss": norm(m, rl - moore_penrose_lss(sys_, data)),
    }
    return _table(["quantity", "value"], [[k, fmt(v)] for k, v in rows.items()]), rows


def run_noise_demo(run, p):
    m = run.atomic()
    prof = run.noise()
    if prof is None:
        raise ConfigError("noise-demo needs a noise profile")
    r_grid = _nums(p.get("r_grid", [0.9, 0.99, 0.999, 0.9999]), "r_grid")
    q = _num(p.get("q", 2.0), "q")
    depth = _int(p.get("depth", 20000), "depth")
    degree = depth if prof.kind == "random_l2" else None
    radii, table = radial_table(prof, m, r_grid, degree)
    est = maximal_function(prof, m, r_grid, degree)
    header = ["r", *(f"atom_{k}" for k in range(m.size))]
    rows = [[fmt(r), *(fmt(v) for v in row)] for r, row in zip(radii, table)]
    summary = {
        "maximal": [float(v) for v in est.values],
        "unbounded": est.unbounded,
        "hoelder": hoelder_check(prof, m, q, r_grid, degree),
        "l2_norm": l2_norm(prof, depth),
    }
    return _table(header, rows), summary


EXPERIMENTS = {
    "abel-sweep": ("Abel-damped reconstruction error over a grid of radii", run_abel_sweep,
                   {"r_grid", "tol", "cap", "seed"}),
    "alpha": ("coefficients of 1 - b, the Kaczmarz series weights", run_alpha, {"depth", "seed"}),
    "compare-variants": ("augmented, Abel and relaxed Kaczmarz compared against each other",
                         run_compare_variants, {"r", "N", "period", "omega_grid", "seed"}),
    "moments": ("Fourier moments of the spectral measure", run_moments, {"depth", "seed"}),
    "noise-demo": ("radial growth, Hoelder and l2 diagnostics of a noise profile", run_noise_demo,
                   {"r_grid", "q", "depth", "seed"}),
    "reconstruct": ("Kaczmarz run with per-step error against the truth", run_reconstruct,
                    {"N", "stop_tol", "seed"}),
    "truncate": ("periodized truncation: per-cycle error and both noise bounds", run_truncate,
                 {"N", "cycles", "seed"}),
}


def list_experiments():
    width = max(map(len, EXPERIMENTS))
    return "\n".join(f"{name:<{width}}  {EXPERIMENTS[name][0]}" for name in sorted(EXPERIMENTS))


def validate(config, experiment):
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    extra = set(config) - TOP_KEYS
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    if "measure" not in config:
        raise ConfigError("config needs a measure")
    if config.get("experiment", experiment) != experiment:
        raise ConfigError(f"config is for {config['experiment']!r}, not {experiment!r}")
    params = config.get("parameters") or {}
    if not isinstance(params, dict):
        raise ConfigError("parameters must be an object")
    extra = set(params) - EXPERIMENTS[experiment][2]
    if extra:
        raise ConfigError(f"unknown parameters for {experiment}: {sorted(extra)}")
    out = config.get("output") or {}
    if not isinstance(out, dict) or set(out) - OUTPUT_KEYS:
        raise ConfigError(f"output accepts only {sorted(OUTPUT_KEYS)}")
    if out.get("format", "csv") != "csv":
        raise ConfigError("only csv output is supported (a JSON summary is always written)")


def run(config, experiment, out_dir=None, seed=None):
    """Run one experiment; returns ``(csv_path, json_path, summary)``."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    validate(config, experiment)
    t0 = time.perf_counter()
    r = Run(config, seed)
    text, summary = EXPERIMENTS[experiment][1](r, r.params)
    elapsed = time.perf_counter() - t0
    out = Path(out_dir if out_dir is not None else (config.get("output") or {}).get("path", "."))
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{experiment}.csv"
    json_path = out / f"{experiment}.json"
    csv_path.write_text(text, encoding="utf-8", newline="")
    report = {
        "experiment": experiment,
        "config": config,
        "seed": r.params.get("seed"),
        "version": __version__,
        "wall_clock_seconds": elapsed,
        "summary": summary,
    }
    json_path.write_text(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return csv_path, json_path, summary


def _parser():
    ap = argparse.ArgumentParser(prog="kaczlab", description="Kaczmarz experiments for stationary sequences.")
    ap.add_argument("experiment", choices=sorted(EXPERIMENTS) + ["list"])
    ap.add_argument("--config", help="JSON experiment config")
    ap.add_argument("--out", help="output directory (overrides output.path)")
    ap.add_argument("--seed", type=int, help="unsigned 64-bit seed for random components")
    ap.add_argument("--quiet", action="store_true")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.experiment == "list":
        print(list_experiments())
        return 0
    try:
        if args.config is None:
            raise ConfigError("--config is required")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        try:
            config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: {exc}") from None
        csv_path, json_path, summary = run(config, args.experiment, args.out, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (KaczlabError, ArithmeticError, ValueError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(f"wrote {csv_path} and {json_path}")
    return 0
