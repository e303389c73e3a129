"""Self-verification: analytic, combinatorial and numerical identities.

Each check records the measured deviation next to its tolerance so a
report is useful even when everything passes.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import combinatorics as comb
from .acv import build_acv, build_embeddings, normalized_gram
from .eigen import eigvals_sym, jacobi_eigvals, tridiagonalize
from .ensemble import (
    GAUSSIAN, RADEMACHER, UNIFORM, EpsilonPanel, entry_moment, student_t, truncate_spec,
)
from .laws import (
    LimitLaw, integrate_against, law_cdf, law_moment, law_pdf, law_quantile,
    stieltjes_residual, stieltjes_squared,
)
from .quadrature import integrate


@dataclass
class Check:
    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            out.append(f"{flag}  {c.name:<34} dev={c.deviation:.3e}  tol={c.tolerance:.1e}"
                       + (f"  {c.detail}" if c.detail else ""))
        return out


def _close(name, dev, tol, detail=""):
    dev = float(dev)
    return Check(name, bool(dev <= tol), dev, tol, detail)


def _exact(name, mismatches: list, detail=""):
    return Check(name, not mismatches, float(len(mismatches)), 0.0,
                 detail or (f"mismatches: {mismatches[:5]}" if mismatches else ""))


def _random_symmetric(rng, n):
    M = rng.standard_normal((n, n))
    return 0.5 * (M + M.T)


def _pdf_integral(law: LimitLaw, lo: float, hi: float) -> float:
    if law is LimitLaw.SQUARED:
        # x = u**2 tames the 1/sqrt(x) pole at the origin.
        return integrate(lambda u: law_pdf(law, u * u) * 2 * u,
                         math.sqrt(lo), math.sqrt(hi), abs_tol=1e-13)[0]
    return integrate(lambda x: law_pdf(law, x), lo, hi, abs_tol=1e-13)[0]


def _literal_acv(E: np.ndarray, T: int, s: int) -> np.ndarray:
    p = E.shape[0]
    X = np.zeros((p, p))
    for i in range(p):
        for j in range(p):
            acc = 0.0
            for t in range(s, s + T):
                acc += E[i, t] * E[j, t - s]
            X[i, j] = acc / T
    return X


def verify_suite(catalan: Callable[[int], int] | None = None, seed: int = 20240601) -> VerificationReport:
    """Run all checks.  ``catalan`` may be swapped out to exercise failure paths."""
    catalan = catalan or comb.catalan
    rng = np.random.default_rng(seed)
    checks: list[Check] = []
    laws = (LimitLaw.SEMICIRCLE, LimitLaw.QUARTER, LimitLaw.SQUARED)

    # --- limit laws ------------------------------------------------------
    for law in laws:
        lo, hi = {LimitLaw.SEMICIRCLE: (-2, 2), LimitLaw.QUARTER: (0, 2),
                  LimitLaw.SQUARED: (0, 4)}[law]
        checks.append(_close(f"pdf_normalization_{law.value}",
                             abs(_pdf_integral(law, lo, hi) - 1.0), 1e-10))

    ks = range(1, 9)
    checks.append(_exact("squared_moment_equals_catalan",
                         [k for k in ks if law_moment(LimitLaw.SQUARED, k) != catalan(k)]))
    dev = max(abs(integrate_against(LimitLaw.SQUARED, lambda x: x**k) - comb.moment_formula(k))
              / comb.moment_formula(k) for k in ks)
    checks.append(_close("squared_moment_quadrature", dev, 1e-8, "relative, k=1..8"))
    dev = max(abs(law_moment(LimitLaw.QUARTER, 2 * k) - comb.moment_formula(k)) for k in range(1, 7))
    checks.append(_close("quarter_even_moments", dev, 1e-8, "k=1..6"))

    dev = max(abs(stieltjes_residual(z)) for z in (-2, -1, 6, 2 + 1j))
    checks.append(_close("stieltjes_algebraic_identity", dev, 1e-12))
    dev = 0.0
    for z in (-1, -5, 6, 2 + 1j):
        quad = integrate_against(LimitLaw.SQUARED, lambda x, z=z: 1.0 / (x - z), abs_tol=1e-13)
        dev = max(dev, abs(stieltjes_squared(z) - quad))
    checks.append(_close("stieltjes_vs_quadrature", dev, 1e-6))
    z = 1e6
    checks.append(_close("stieltjes_asymptotic", abs(-z * stieltjes_squared(z) - 1.0), 1e-5))

    grid = np.linspace(0.0, 2.0, 1000)
    dev = np.max(np.abs(law_cdf(LimitLaw.QUARTER, grid)
                        - (2 * law_cdf(LimitLaw.SEMICIRCLE, grid) - 1)))
    checks.append(_close("cdf_pushforward_abs", dev, 1e-12))
    grid = np.linspace(0.0, 4.0, 1000)
    dev = np.max(np.abs(law_cdf(LimitLaw.SQUARED, grid) - law_cdf(LimitLaw.QUARTER, np.sqrt(grid))))
    checks.append(_close("cdf_pushforward_square", dev, 1e-12))

    dev = 0.0
    for law in laws:
        lo, hi = {LimitLaw.SEMICIRCLE: (-2, 2), LimitLaw.QUARTER: (0, 2),
                  LimitLaw.SQUARED: (0, 4)}[law]
        for x in np.linspace(lo, hi, 9)[1:-1]:
            dev = max(dev, abs(law_cdf(law, x) - _pdf_integral(law, lo, x)))
    checks.append(_close("cdf_closed_form_vs_quadrature", dev, 1e-9))

    dev = 0.0
    for law in laws:
        lo, hi = {LimitLaw.SEMICIRCLE: (-2, 2), LimitLaw.QUARTER: (0, 2),
                  LimitLaw.SQUARED: (0, 4)}[law]
        for x in np.linspace(lo, hi, 23)[1:-1]:
            dev = max(dev, abs(law_quantile(law, law_cdf(law, x)) - x))
    checks.append(_close("quantile_roundtrip", dev, 1e-8))

    # --- combinatorics ---------------------------------------------------
    checks.append(_exact("dyck_enumeration_equals_catalan",
                         [k for k in range(1, 13) if comb.count_dyck_paths(k) != catalan(k)]))
    checks.append(_exact("moment_formula_equals_catalan",
                         [k for k in range(1, 13) if comb.moment_formula(k) != catalan(k)]))
    checks.append(_exact("iso_class_diagonal",
                         [k for k in range(1, 21)
                          if comb.iso_class_count(k, k) != comb.moment_formula(k)]))
    bad = []
    for k in range(1, 21):
        for t in range(1, k + 1):
            try:
                comb.iso_class_count(k, t)
            except ArithmeticError:
                bad.append((k, t))
    checks.append(_exact("iso_class_integrality", bad))

    # --- eigensolver -----------------------------------------------------
    dev = 0.0
    for _ in range(100):
        M = _random_symmetric(rng, int(rng.integers(1, 13)))
        dev = max(dev, np.max(np.abs(eigvals_sym(M) - jacobi_eigvals(M))))
    checks.append(_close("ql_vs_jacobi", dev, 1e-10, "100 matrices, n<=12"))

    tr_dev = fro_dev = diag_dev = 0.0
    for n in (2, 16, 64, 256):
        M = _random_symmetric(rng, n)
        lam = eigvals_sym(M)
        tr_dev = max(tr_dev, abs(lam.sum() - np.trace(M)) / max(1.0, np.abs(np.diag(M)).sum()))
        fro2 = np.sum(M * M)
        fro_dev = max(fro_dev, abs(np.sum(lam**2) - fro2) / fro2)
        diag_dev = max(diag_dev, abs(tridiagonalize(M).diag.sum() - np.trace(M))
                       / max(1.0, np.abs(np.diag(M)).sum()))
    checks.append(_close("eig_trace_invariant", tr_dev, 1e-9, "n up to 256"))
    checks.append(_close("eig_frobenius_invariant", fro_dev, 1e-9, "n up to 256"))
    checks.append(_close("tridiagonal_trace_invariant", diag_dev, 1e-10))

    M = _random_symmetric(rng, 20)
    base = eigvals_sym(M)
    dev = max(np.max(np.abs(eigvals_sym(c * M) - c * base)) / (abs(c) * np.max(np.abs(base)))
              for c in (2.0, 1e-3))
    perm = rng.permutation(20)
    dev = max(dev, np.max(np.abs(eigvals_sym(M[np.ix_(perm, perm)]) - base)) / np.max(np.abs(base)))
    checks.append(_close("eig_scaling_permutation", dev, 1e-10))

    # --- ensemble and matrices --------------------------------------------
    dists = [GAUSSIAN, RADEMACHER, UNIFORM, student_t(5), student_t(9),
             truncate_spec(GAUSSIAN, 3.0), truncate_spec(student_t(5), 4096 ** 0.125),
             truncate_spec(UNIFORM, 1.2)]
    dev = max(abs(entry_moment(d, 2) - 1.0) for d in dists)
    checks.append(_close("entry_second_moment_unit", dev, 1e-8))
    checks.append(_close("student_t5_fourth_moment", abs(entry_moment(student_t(5), 4) - 9.0), 1e-9))

    dev = 0.0
    for p, T, s in ((1, 3, 1), (3, 5, 2), (4, 8, 1), (8, 6, 3)):
        E = rng.standard_normal((p, T + s))
        E1, E2 = build_embeddings(EpsilonPanel(p, T, s, 0, E))
        dev = max(dev, np.max(np.abs(build_acv(E1, E2, T, s).X - _literal_acv(E, T, s))))
    checks.append(_close("acv_product_vs_sum", dev, 1e-12))

    E = rng.standard_normal((12, 41))
    E1, E2 = build_embeddings(EpsilonPanel(12, 40, 1, 0, E))
    A = normalized_gram(build_acv(E1, E2, 40, 1)).A
    lam = eigvals_sym(A, psd=True)
    dev = max(abs(lam.sum() - np.trace(A)) / np.trace(A),
              abs(np.sum(lam**2) - np.sum(A * A)) / np.sum(A * A))
    checks.append(_close("gram_spectrum_trace_frobenius", dev, 1e-8))

    return VerificationReport(checks)
