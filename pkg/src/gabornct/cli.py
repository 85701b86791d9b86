"""Command-line experiment driver.

Usage::

    gabornct run <experiment> [--L N --a A --b B --window NAME ...] [--config FILE]

Settings are resolved in three layers: built-in defaults, then a flat
``key = value`` config file, then command-line flags. Every report embeds the
resolved settings (except ``workers`` and ``out``, which do not affect the
results) and the library version.

Random inputs come from ``numpy.random.Generator(PCG64(seed))``. A random
signal of length ``L`` is ``(standard_normal(L) + 1j * standard_normal(L)) /
sqrt(2)``, real parts drawn first.

Exit codes: 0 success, 1 usage error, 2 invalid configuration, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction
from typing import Callable, Dict

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .algebra import TwistedSeq, janssen_coefficients, twisted_involution
from .errors import GaborNCTError, NumericalError
from .gabor import (
    FrameBounds,
    figa_constant,
    figa_sides,
    frame_bounds,
    frame_operator_matrix,
    operator_power,
    power_window,
    reconstruct,
    wexler_raz_check,
)
from .report import Report, csv_text, signal_csv, write_text
from .spectral import (
    decay_profile,
    eig_calculus,
    inverse_residuals,
    invert_in_algebra,
    riesz_dunford,
    spectral_radius_compare,
)
from .tf_core import LatticeSpec, adjoint_lattice
from .windows import condition_a_terms, continuous_condition_a, parse_window

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3

DEFAULTS = {
    "L": 64,
    "a": 4,
    "b": 4,
    "window": "gaussian",
    "sigma": 1.0,
    "s": "0,1,2,4",
    "nu": "-1,-0.5",
    "nodes": 256,
    "seed": 0,
    "trials": 10,
    "jmax": 6,
    "element": "shift",
    "theta": "",
    "kmax": 8,
    "workers": 1,
    "out": "",
}
TYPES = {"L": int, "a": int, "b": int, "sigma": float, "nodes": int, "seed": int, "trials": int, "jmax": int, "kmax": int, "workers": int}
NOT_IN_REPORT = ("workers", "out")
OUTPUT_ENV = "NCT_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            key, value = (p.strip() for p in line.split("=", 1))
            if key not in DEFAULTS:
                raise UsageError(f"{path}:{n}: unknown key {key!r}")
            out[key] = value
    return out


def resolve_config(cli: dict, file_values: dict | None = None) -> dict:
    cfg = dict(DEFAULTS)
    cfg.update(file_values or {})
    cfg.update({k: v for k, v in cli.items() if v is not None})
    for key, typ in TYPES.items():
        try:
            cfg[key] = typ(cfg[key])
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{key} must be {typ.__name__}, got {cfg[key]!r}") from exc
    return cfg


def _rng(cfg) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(cfg["seed"]))


def random_signal(rng: np.random.Generator, L: int) -> np.ndarray:
    re = rng.standard_normal(L)
    im = rng.standard_normal(L)
    return (re + 1j * im) / np.sqrt(2)


def _setup(cfg):
    spec = LatticeSpec(cfg["L"], cfg["a"], cfg["b"])
    g = parse_window(cfg["window"], spec.L, cfg["sigma"])
    return spec, g


def _seq_csv(seq: TwistedSeq) -> str:
    rows = ((int(k), int(l), float(v.real), float(v.imag)) for (k, l), v in zip(seq.keys, seq.values))
    return csv_text(["k", "l", "re", "im"], rows)


# -- experiments: each returns (results, {filename: text}) --------------------


def exp_frame_bounds(cfg):
    spec, g = _setup(cfg)
    S = frame_operator_matrix(g, g, spec, workers=cfg["workers"])
    ev = np.linalg.eigvalsh(S)
    fb = FrameBounds(max(float(ev[0]), 0.0), float(ev[-1]), 1e-10 * float(ev[-1]))
    rows = ((i, float(e)) for i, e in enumerate(ev))
    return {"bounds": fb, "redundancy": spec.redundancy}, {
        "eigenvalues.csv": csv_text(["index", "eigenvalue"], rows),
        "window.csv": signal_csv(g),
    }


def _power_experiment(cfg, nu):
    spec, g = _setup(cfg)
    S = frame_operator_matrix(g, g, spec, workers=cfg["workers"])
    h = operator_power(S, nu) @ g
    rng = _rng(cfg)
    f = random_signal(rng, spec.L)
    return spec, g, h, f


def exp_dual_window(cfg):
    spec, g, gamma, f = _power_experiment(cfg, -1.0)
    rec = reconstruct(f, g, gamma, spec, workers=cfg["workers"])
    wr = wexler_raz_check(g, gamma, spec)
    return {
        "reconstruction_error": float(np.linalg.norm(rec - f) / np.linalg.norm(f)),
        "wexler_raz_max_deviation": wr["max_deviation"],
        "biorthogonal": wr["biorthogonal"],
    }, {"dual.csv": signal_csv(gamma), "window.csv": signal_csv(g)}


def exp_tight_window(cfg):
    spec, g, h, f = _power_experiment(cfg, -0.5)
    fb = frame_bounds(h, spec, workers=cfg["workers"])
    rec = reconstruct(f, h, h, spec, workers=cfg["workers"])
    return {
        "bounds": fb,
        "reconstruction_error": float(np.linalg.norm(rec - f) / np.linalg.norm(f)),
    }, {"tight.csv": signal_csv(h), "window.csv": signal_csv(g)}


def exp_janssen(cfg):
    spec, g = _setup(cfg)
    seq, rebuilt = janssen_coefficients(g, g, spec)
    S = frame_operator_matrix(g, g, spec, workers=cfg["workers"])
    return {
        "constant": figa_constant(spec),
        "adjoint_theta": seq.theta,
        "coefficient_l1": seq.norm(),
        "rebuild_residual": float(np.linalg.norm(S - rebuilt)),
    }, {"janssen.csv": _seq_csv(seq)}


def exp_figa_check(cfg):
    spec = LatticeSpec(cfg["L"], cfg["a"], cfg["b"])
    rng = _rng(cfg)
    C = figa_constant(spec)
    residuals, ratios = [], []
    for _ in range(cfg["trials"]):
        f1, f2, g1, g2 = (random_signal(rng, spec.L) for _ in range(4))
        lhs, rhs = figa_sides(f1, f2, g1, g2, spec)
        residuals.append(abs(lhs - C * rhs))
        ratios.append(lhs / rhs)
    rows = ((i, float(r)) for i, r in enumerate(residuals))
    return {
        "constant": C,
        "trials": cfg["trials"],
        "max_ratio_deviation": float(max(abs(r - C) for r in ratios)),
        "max_residual": float(max(residuals)),
    }, {"figa.csv": csv_text(["trial", "residual"], rows)}


def exp_wexler_raz(cfg):
    spec, g = _setup(cfg)
    gamma = power_window(g, spec, -1.0, workers=cfg["workers"])
    dual = wexler_raz_check(g, gamma, spec)
    control = wexler_raz_check(g, g, spec)
    return {
        "dual": dual.data,
        "control": control.data,
    }, {"dual.csv": signal_csv(gamma)}


def _janssen_inverse(cfg):
    spec, g = _setup(cfg)
    adj = adjoint_lattice(spec)
    seq, _ = janssen_coefficients(g, g, spec)
    inv = invert_in_algebra(seq, adj)
    left, right = inverse_residuals(seq, inv, adj)
    return spec, adj, seq, inv, left, right


def exp_invert_algebra(cfg):
    spec, adj, seq, inv, left, right = _janssen_inverse(cfg)
    return {
        "adjoint_theta": adj.theta,
        "coefficients": len(inv),
        "left_residual": left,
        "right_residual": right,
    }, {"inverse.csv": _seq_csv(inv), "janssen.csv": _seq_csv(seq)}


def exp_decay_profile(cfg):
    spec, adj, seq, inv, left, right = _janssen_inverse(cfg)
    prof = decay_profile(inv)
    return {
        "profile": prof,
        "monotone_beyond_1": prof.monotone_from(1),
        "left_residual": left,
        "right_residual": right,
    }, {"decay.csv": prof.csv()}


def exp_holo_calculus(cfg):
    spec, g = _setup(cfg)
    S = frame_operator_matrix(g, g, spec, workers=cfg["workers"])
    rows, errors = [], {}
    for nu in _floats(cfg["nu"]):
        f = ("power", nu)
        err = float(np.max(np.abs(riesz_dunford(S, f, nodes=cfg["nodes"], workers=cfg["workers"]) - eig_calculus(S, f))))
        errors[format(nu, "g")] = err
        rows.append((nu, err))
    inv = riesz_dunford(S, "inverse", nodes=cfg["nodes"], workers=cfg["workers"])
    return {
        "nodes": cfg["nodes"],
        "max_abs_error": errors,
        "inverse_residual": float(np.linalg.norm(inv @ S - np.eye(spec.L), 2)),
    }, {"calculus.csv": csv_text(["nu", "max_abs_error"], rows)}


def _theta(text: str):
    text = text.strip()
    if text in ("golden", "irrational"):
        return (5**0.5 - 1) / 2
    return Fraction(text) if "/" in text or text.isdigit() else float(text)


def exp_radius_compare(cfg):
    spec = LatticeSpec(cfg["L"], cfg["a"], cfg["b"])
    theta = _theta(cfg["theta"]) if cfg["theta"] else spec.theta
    element = cfg["element"]
    if element == "shift":
        a = TwistedSeq.from_dict({(1, 0): 1, (-1, 0): 1}, theta)
    elif element == "harper":
        a = TwistedSeq.from_dict({(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1}, theta)
    elif element == "random":
        r = TwistedSeq.random(_rng(cfg), theta, radius=1)
        a = (r + twisted_involution(r)) * 0.5
    else:
        raise UsageError(f"unknown element {element!r}; expected shift, harper or random")
    representable = isinstance(a.theta, Fraction) and a.theta == spec.theta
    rep = spectral_radius_compare(a, spec if representable else None, cfg["jmax"])
    rows = ((j, float(r)) for j, r in enumerate(rep["r"]))
    return dict(rep.data, representable=representable), {"radius.csv": csv_text(["j", "r_j"], rows)}


def exp_condition_a(cfg):
    spec, g = _setup(cfg)
    sums, files = {}, {}
    for s in _floats(cfg["s"]):
        index, terms = condition_a_terms(g, g, spec, s)
        sums[format(s, "g")] = math.fsum(terms)
        rows = ((int(k), int(l), float(t)) for (k, l), t in zip(index, terms))
        files[f"condition_a_s{format(s, 'g')}.csv"] = csv_text(["k", "l", "term"], rows)
    kmax = cfg["kmax"]
    return {
        "discrete_sums": sums,
        "continuous_kmax": kmax,
        "continuous_sum": continuous_condition_a(kmax),
        "continuous_tail": abs(continuous_condition_a(kmax + 4) - continuous_condition_a(kmax)),
    }, files


EXPERIMENTS: Dict[str, Callable] = {
    "frame-bounds": exp_frame_bounds,
    "dual-window": exp_dual_window,
    "tight-window": exp_tight_window,
    "janssen": exp_janssen,
    "figa-check": exp_figa_check,
    "wexler-raz": exp_wexler_raz,
    "invert-algebra": exp_invert_algebra,
    "decay-profile": exp_decay_profile,
    "holo-calculus": exp_holo_calculus,
    "radius-compare": exp_radius_compare,
    "condition-a": exp_condition_a,
}


def run(experiment: str, cfg: dict) -> tuple[Report, dict]:
    """Run one experiment; returns the report and the CSV files it produced."""
    if experiment not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {experiment!r}")
    # a single BLAS thread keeps dense kernels bit-reproducible
    with threadpool_limits(limits=1):
        results, files = EXPERIMENTS[experiment](cfg)
    config = {k: v for k, v in cfg.items() if k not in NOT_IN_REPORT}
    return Report(experiment, {"version": __version__, "config": config, "results": results}), files


def output_dir(cfg) -> str:
    return cfg["out"] or os.environ.get(OUTPUT_ENV) or "nct-output"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gabornct", description="Gabor frame and twisted-algebra experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("run", help="run one experiment and write report.json plus CSVs")
    r.add_argument("experiment", choices=sorted(EXPERIMENTS))
    r.add_argument("--config", help="flat key = value settings file")
    for key, default in DEFAULTS.items():
        r.add_argument(f"--{key}", type=TYPES.get(key, str), default=None, help=f"default: {default!r}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cli = {k: getattr(args, k) for k in DEFAULTS}
    try:
        cfg = resolve_config(cli, read_config(args.config) if args.config else None)
        report, files = run(args.experiment, cfg)
    except UsageError as exc:
        print(f"gabornct: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"gabornct: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"gabornct: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (GaborNCTError, ValueError) as exc:
        print(f"gabornct: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = output_dir(cfg)
    try:
        os.makedirs(out, exist_ok=True)
        path = write_text(os.path.join(out, "report.json"), report.to_json())
        for name, text in files.items():
            write_text(os.path.join(out, name), text)
    except OSError as exc:
        print(f"gabornct: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(path)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
