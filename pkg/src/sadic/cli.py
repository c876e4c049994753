"""Command-line interface.

Examples
--------
::

    sadic info --input thue_morse
    sadic matrix --augmented --input fibonacci
    sadic measures --input bkms --length 2 --exact
    sadic cylinder baabab --input thue_morse --exact
    sadic sadic demo --dim 3 --levels 12
    sadic check

Exit codes: 0 success, 1 failed check, 2 input error, 3 budget or
convergence error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .checks import run_check_suite
from .constructions import build_construction_A, build_construction_B
from .directive import (
    DirectiveSequence,
    VectorTowerPrefix,
    cone_sequence_dim,
    is_weakly_primitive,
    local_weights,
)
from .errors import InputError, ResourceError, SadicError
from .io import fixture_names, fixture_path, load_input
from .matrices import augmented_matrix, format_matrix, matrix_to_json, strata
from .measures import (
    MeasureCombination,
    cylinder_measure,
    cylinder_table,
    ergodic_measures,
    select_measure,
)
from .words import DEFAULT_BUDGET, Substitution, incidence_matrix, is_everywhere_growing, is_primitive

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Optional[str]
    precision: int
    tolerance: Optional[float]
    depth: Optional[int]
    format: str
    exact: bool
    budget: int = DEFAULT_BUDGET


def _precision(text: str) -> int:
    p = int(text)
    if not 1 <= p <= 50:
        raise argparse.ArgumentTypeError("precision must be between 1 and 50")
    return p


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", help="substitution or directive-sequence JSON file, "
                        f"or a fixture name ({', '.join(fixture_names())})")
    common.add_argument("--precision", type=_precision, default=10,
                        help="decimal digits in numeric output (1-50, default 10)")
    common.add_argument("--tolerance", type=_positive_float, default=None,
                        help="override the tolerance of checks")
    common.add_argument("--depth", type=_positive, default=None, help="truncation depth")
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET,
                        help="longest word that may be materialized")
    common.add_argument("--exact", action="store_true",
                        help="print exact fractions when the eigen-data is rational")

    parser = argparse.ArgumentParser(prog="sadic", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("info", parents=[common], help="alphabet, rules, growth, strata")
    p = sub.add_parser("matrix", parents=[common], help="incidence or augmented matrix")
    p.add_argument("--augmented", action="store_true")
    p = sub.add_parser("measures", parents=[common], help="ergodic measures")
    p.add_argument("--length", type=_positive, default=1, help="list cylinders up to this length")
    p = sub.add_parser("cylinder", parents=[common], help="cylinder measures")
    p.add_argument("words", nargs="+")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--measure", help="measure name (full, support letters) or 1-based index")
    g.add_argument("--coeffs", help="comma separated convex coefficients, one per measure")

    p = sub.add_parser("sadic", help="directive sequences and the constructions")
    ss = p.add_subparsers(dest="action", required=True)
    q = ss.add_parser("demo", parents=[common], help="build a construction and report its cone")
    q.add_argument("--dim", type=_positive, default=3)
    q.add_argument("--levels", type=_positive, default=12)
    q.add_argument("--construction", choices=("A", "B"), default="A")
    ss.add_parser("dim", parents=[common], help="numerical cone dimension of a sequence")
    q = ss.add_parser("weights", parents=[common], help="local weights of a stationary sequence")
    q.add_argument("--level", type=int, default=0)
    q.add_argument("--measure", default=None)

    p = sub.add_parser("check", parents=[common], help="run the invariant suite")
    p.add_argument("--golden", type=Path, default=None, help="alternative golden file")
    return parser


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def fmt(x, cfg: RunConfig) -> str:
    if isinstance(x, (int, Fraction)):
        return str(x)
    return f"{float(x):.{cfg.precision}f}"


def jval(x, cfg: RunConfig):
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return str(x)
    return round(float(x), cfg.precision)


def fmt_eigenvalue(lam: float, cfg: RunConfig) -> str:
    if abs(lam - round(lam)) < 1e-9:
        return f"λ={int(round(lam))}"
    return f"λ≈{lam:.{min(cfg.precision, 6)}f}"


def table(rows, header=None) -> str:
    rows = [list(map(str, r)) for r in ([header] if header else []) + list(rows)]
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def emit(cfg: RunConfig, text: str, payload) -> None:
    if cfg.format == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _resolve(path: Optional[str]) -> str:
    if path is None:
        raise InputError("--input is required for this command")
    if not Path(path).exists() and path in fixture_names():
        return str(fixture_path(path))
    return path


def _substitution(cfg: RunConfig) -> Substitution:
    obj = load_input(_resolve(cfg.input))
    if isinstance(obj, DirectiveSequence):
        if obj.description.get("kind") == "stationary":
            return obj.substitution(0)
        raise InputError("this command needs a substitution file")
    return obj


def _set_label(sigma: Substitution, letters) -> str:
    return "{" + ",".join(sigma.domain.letters[i] for i in letters) + "}"


def cmd_info(cfg: RunConfig) -> int:
    sigma = _substitution(cfg)
    M = incidence_matrix(sigma)
    st = strata(M)
    growing = is_everywhere_growing(sigma)
    prim = is_primitive(M)
    parts = [f"{_set_label(sigma, c.letters)} {fmt_eigenvalue(c.eigenvalue, cfg)}"
             for c in st.components]
    lines = [f"alphabet: {' '.join(sigma.domain.letters)}",
             f"rules: {sigma}",
             f"everywhere growing: {'yes' if growing else 'no'}"]
    if prim:
        lines.append(f"primitive, {fmt_eigenvalue(st.components[0].eigenvalue, cfg)}")
    else:
        lines.append("primitive: no")
    lines.append(f"{len(st)} strat{'um' if len(st) == 1 else 'a'}: " + ", ".join(parts))
    payload = {"alphabet": list(sigma.domain.letters), "rules": sigma.rules(),
               "everywhere_growing": growing, "primitive": prim,
               "strata": [{"letters": [sigma.domain.letters[i] for i in c.letters],
                           "eigenvalue": jval(c.eigenvalue, cfg), "primitive": c.primitive,
                           "accesses": [_set_label(sigma, st.components[j].letters)
                                        for j in st.accessible_from(i)]}
                          for i, c in enumerate(st.components)]}
    emit(cfg, "\n".join(lines), payload)
    return EXIT_OK


def cmd_matrix(cfg: RunConfig, augmented: bool) -> int:
    sigma = _substitution(cfg)
    if augmented:
        aug = augmented_matrix(sigma)
        M, rows, cols = aug.entries, aug.labels, aug.column_labels
    else:
        M = incidence_matrix(sigma)
        rows, cols = list(sigma.codomain.letters), list(sigma.domain.letters)
    if cfg.format == "json":
        print(matrix_to_json(M, rows, cols))
    else:
        print(format_matrix(M, rows, cols))
    return EXIT_OK


def _measure_columns(measures, values_by_measure, words, sigma, cfg, exact=False):
    header = ["word"] + [m.name for m in measures]
    lam = [m.exact_eigenvalue if exact and m.exact_eigenvalue is not None else m.eigenvalue
           for m in measures]
    rows = [["eigenvalue"] + [fmt(x, cfg) for x in lam]]
    for w in words:
        rows.append([sigma.domain.format(w)] + [fmt(values_by_measure[m.name][w], cfg)
                                                for m in measures])
    payload = {"measures": [{"name": m.name, "eigenvalue": jval(x, cfg),
                             "power": m.power,
                             "support": [sigma.domain.letters[i] for i in m.support_letters],
                             "values": {sigma.domain.format(w): jval(values_by_measure[m.name][w], cfg)
                                        for w in words}}
                            for m, x in zip(measures, lam)]}
    return table(rows, header), payload


def _exact_ok(cfg: RunConfig, measures) -> bool:
    if cfg.exact and not all(m.is_exact for m in measures):
        print("note: eigen-data is irrational, printing floats", file=sys.stderr)
        return False
    return cfg.exact


def cmd_measures(cfg: RunConfig, length: int) -> int:
    sigma = _substitution(cfg)
    measures = ergodic_measures(sigma)
    exact = _exact_ok(cfg, measures)
    values = {m.name: cylinder_table(sigma, length, m, exact=exact) for m in measures}
    words = [w for n in range(1, length + 1) for w in sigma.domain.words(n)]
    text, payload = _measure_columns(measures, values, words, sigma, cfg, exact)
    emit(cfg, f"{len(measures)} ergodic measure{'s' if len(measures) != 1 else ''}\n" + text,
         payload)
    return EXIT_OK


def _parse_coeffs(text: str, n: int) -> tuple:
    try:
        coeffs = tuple(Fraction(c.strip()) for c in text.split(","))
    except ValueError:
        raise InputError(f"cannot parse coefficients {text!r}") from None
    if len(coeffs) != n:
        raise InputError(f"{len(coeffs)} coefficients given for {n} measures")
    if any(c < 0 for c in coeffs):
        raise InputError("coefficients must be non-negative")
    return coeffs


def cmd_cylinder(cfg: RunConfig, words, selector: Optional[str], coeffs: Optional[str]) -> int:
    sigma = _substitution(cfg)
    measures = ergodic_measures(sigma)
    parsed = [sigma.domain.parse(w) for w in words]
    if coeffs is not None:
        c = _parse_coeffs(coeffs, len(measures))
        combo = MeasureCombination(tuple(measures), c)
        exact = _exact_ok(cfg, measures)
        if not exact:
            combo = MeasureCombination(tuple(measures), tuple(float(x) for x in c))
        vals = [cylinder_measure(sigma, w, combo, exact=exact, budget=cfg.budget) for w in parsed]
        labels = [sigma.domain.format(w) for w in parsed]
        rows = [[lab, fmt(v, cfg)] for lab, v in zip(labels, vals)]
        payload = {"coefficients": [str(x) for x in c],
                   "values": {lab: jval(v, cfg) for lab, v in zip(labels, vals)}}
        emit(cfg, table(rows, ["word", "combination"]), payload)
        return EXIT_OK
    if selector is not None:
        try:
            measures = [select_measure(measures, selector)]
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    exact = _exact_ok(cfg, measures)
    values = {m.name: {w: cylinder_measure(sigma, w, m, exact=exact, budget=cfg.budget)
                     for w in parsed}
              for m in measures}
    text, payload = _measure_columns(measures, values, parsed, sigma, cfg, exact)
    emit(cfg, text, payload)
    return EXIT_OK


def cmd_sadic_demo(cfg: RunConfig, d: int, levels: int, construction: str) -> int:
    if construction == "A":
        seq = build_construction_A(d, levels)
        window, horizon, depth = 2, levels + 1, cfg.depth or levels + 1
    else:
        if d < 2:
            raise InputError("construction B needs --dim >= 2")
        seq = build_construction_B(d, levels)
        window, horizon, depth = d, levels, cfg.depth or levels
    dim, cone = cone_sequence_dim(seq, min(depth, horizon), cfg.tolerance or 1e-6)
    wp = is_weakly_primitive(seq, window, horizon)
    lines = [f"construction {construction}, d={d}, levels={levels}",
             f"cone dimension: {dim} ({len(cone)} extremal rays)",
             f"weakly primitive (window {window}): {'verified' if wp.ok else 'not verified'}"]
    payload = {"construction": construction, "d": d, "levels": levels, "cone_dimension": dim,
               "rays": [[jval(x, cfg) for x in r] for r in cone.rays],
               "weakly_primitive": wp.ok, "window": window}
    emit(cfg, "\n".join(lines), payload)
    return EXIT_OK


def cmd_sadic_dim(cfg: RunConfig) -> int:
    obj = load_input(_resolve(cfg.input))
    seq = obj if isinstance(obj, DirectiveSequence) else DirectiveSequence.stationary(obj)
    depth = cfg.depth or 20
    if seq.horizon is not None:
        depth = min(depth, seq.horizon)
    dim, cone = cone_sequence_dim(seq, depth, cfg.tolerance or 1e-6)
    emit(cfg, f"cone dimension at depth {depth}: {dim}",
         {"depth": depth, "cone_dimension": dim,
          "rays": [[jval(x, cfg) for x in r] for r in cone.rays]})
    return EXIT_OK


def cmd_sadic_weights(cfg: RunConfig, level: int, selector: Optional[str]) -> int:
    sigma = _substitution(cfg)
    measures = ergodic_measures(sigma)
    try:
        mu = measures[0] if selector is None else select_measure(measures, selector)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    depth = cfg.depth or 25
    if depth <= level:
        raise InputError("--depth must exceed --level")
    seq = DirectiveSequence.stationary(mu.base)
    tower = VectorTowerPrefix.stationary(mu.letter_vector, mu.eigenvalue, depth)
    wt = local_weights(seq, tower, level, depth)
    A = sigma.domain
    rows = [[A.format((a, b)), fmt(wt.weights[a, b], cfg)] for a in range(A.d) for b in range(A.d)]
    lines = [f"weights at level {level}, depth {depth}, measure {mu.name}",
             table(rows, ["pair", "weight"]),
             f"last increment: {wt.gap:.3e}"]
    payload = {"level": level, "depth": depth, "measure": mu.name,
               "weights": {r[0]: jval(wt.weights[a, b], cfg)
                           for r, (a, b) in zip(rows, [(a, b) for a in range(A.d) for b in range(A.d)])},
               "last_increment": wt.gap, "monotone": wt.monotone}
    emit(cfg, "\n".join(lines), payload)
    return EXIT_OK


def cmd_check(cfg: RunConfig, golden: Optional[Path]) -> int:
    if golden is not None and not golden.exists():
        raise InputError(f"{golden}: no such file")
    results = run_check_suite(golden)
    failed = [r for r in results if not r.passed]
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name}  worst={r.worst:.3e}"
             + (f"  ({r.detail})" if r.detail else "") for r in results]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    payload = {"checks": [{"name": r.name, "passed": r.passed, "worst": r.worst,
                           "detail": r.detail} for r in results],
               "passed": not failed}
    emit(cfg, "\n".join(lines), payload)
    return EXIT_CHECK if failed else EXIT_OK


def run(args: argparse.Namespace) -> int:
    cfg = RunConfig(args.command, getattr(args, "input", None), getattr(args, "precision", 10),
                    getattr(args, "tolerance", None), getattr(args, "depth", None),
                    getattr(args, "format", "table"), getattr(args, "exact", False),
                    getattr(args, "budget", DEFAULT_BUDGET))
    if args.command == "info":
        return cmd_info(cfg)
    if args.command == "matrix":
        return cmd_matrix(cfg, args.augmented)
    if args.command == "measures":
        return cmd_measures(cfg, args.length)
    if args.command == "cylinder":
        return cmd_cylinder(cfg, args.words, args.measure, args.coeffs)
    if args.command == "sadic":
        if args.action == "demo":
            return cmd_sadic_demo(cfg, args.dim, args.levels, args.construction)
        if args.action == "dim":
            return cmd_sadic_dim(cfg)
        return cmd_sadic_weights(cfg, args.level, args.measure)
    return cmd_check(cfg, args.golden)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except ResourceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (SadicError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
