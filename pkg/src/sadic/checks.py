"""Invariant suite behind ``sadic check``: oracle first, then golden values."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import sympy

from .io import fixture_path, load_fixture
from .measures import cylinder_measure, ergodic_measures, select_measure
from .oracle import consistency_suite, oracle_vs_formula

PHI = sympy.GoldenRatio


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    detail: str = ""


def evaluate_expr(expr: str) -> float:
    """Numeric value of a golden expression such as ``(3-phi)/(3*phi**4)``."""
    return float(sympy.sympify(expr, locals={"phi": PHI}).evalf(30))


def default_golden_path() -> Path:
    return fixture_path("golden")


def golden_checks(golden: Optional[Path] = None, tol: float = 1e-9) -> list:
    data = json.loads(Path(golden or default_golden_path()).read_text(encoding="utf-8"))
    out = []
    for fixture, entry in data["fixtures"].items():
        sigma = load_fixture(fixture)
        measures = ergodic_measures(sigma)
        names = [m.name for m in measures]
        if "measures" in entry and names != list(entry["measures"]):
            out.append(CheckResult(f"golden:{fixture}:measures", False, float("inf"),
                                   f"expected {entry['measures']}, got {names}"))
            continue
        worst, where = 0.0, ""
        for row in entry["values"]:
            mu = select_measure(measures, row["measure"])
            got = float(cylinder_measure(sigma, row["word"], mu))
            delta = abs(got - evaluate_expr(row["value"]))
            if delta >= worst:
                worst, where = delta, f"{row['measure']}[{row['word']}]"
        out.append(CheckResult(f"golden:{fixture}", worst <= tol, worst, where))
    return out


ORACLE_CASES = (
    # fixture, word length, N, tolerance
    ("thue_morse", 3, 16, 5e-3),
    ("fibonacci", 3, 22, 5e-3),
    ("bkms", 2, 11, 1e-2),
)


def oracle_checks() -> list:
    out = []
    for fixture, L, N, tol in ORACLE_CASES:
        sigma = load_fixture(fixture)
        words = [w for n in range(1, L + 1) for w in sigma.domain.words(n)]
        rep = oracle_vs_formula(sigma, words, N, tol)
        worst = max(rep.rows, key=lambda r: r["delta"])
        out.append(CheckResult(f"oracle:{fixture}", rep.passed, rep.max_delta, worst["word"]))
    return out


def consistency_checks(L: int = 3, tol: float = 1e-9) -> list:
    out = []
    for fixture in ("thue_morse", "fibonacci", "periodic_leaf", "bkms",
                    "family_k1", "family_k2", "family_k3"):
        rep = consistency_suite(load_fixture(fixture), L, tol)
        out.append(CheckResult(f"consistency:{fixture}", rep.passed,
                               max(rep.max_violation, rep.normalization_error)))
    return out


def run_check_suite(golden: Optional[Path] = None) -> list:
    return oracle_checks() + consistency_checks() + golden_checks(golden)
