"""States on the algebra: the KMS functional and its heat regularizations.

The truncated Gibbs expectation of a monomial S_rho S_sigma* is a ratio of
traces against exp(-t D^2).  Because the frame-diagonal Dirac variants are
diagonal on the orthogonal span basis, every stratum trace is an exact
rational; floats enter only through the Boltzmann weights.  In particular a
vanishing numerator is detected exactly, not to within roundoff.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

from .operators import GradeIndex
from .sheets import e_vector, inner, monomial_action
from .spectral import (
    heat_tail_bound,
    materialize,
    orthobasis,
    span_census,
    stratum_eigenvalue,
)
from .words import Word, prefix_compatible, tail, text, words_of_length

GIBBS_VARIANTS = ("d_kappa", "d_tilde")


def kms_phi(n: int, rho: Word, sigma: Word) -> Fraction:
    """Value of the canonical temperature state on S_rho S_sigma*."""
    if rho == sigma:
        return Fraction(1, n ** len(sigma))
    return Fraction(0)


def gauge_filter(rho: Word, sigma: Word) -> bool:
    """Whether the diagonal conditional expectation keeps S_rho S_sigma*."""
    return rho == sigma


def stratum_traces(n: int, rho: Word, sigma: Word, grade: GradeIndex) -> dict[int, Fraction]:
    """Exact trace of S_rho S_sigma* on each stratum of one block."""
    out: dict[int, Fraction] = {}
    for u in orthobasis(n, grade):
        v = materialize(n, u.coeffs)
        val = inner(v, monomial_action(rho, sigma, v)) / u.norm_sq
        if val:
            out[u.stratum] = out.get(u.stratum, Fraction(0)) + val
    return out


class GibbsValue(NamedTuple):
    value: float
    error_bound: float
    exact_zero: bool


def frohlich(variant: str, rho: Word, sigma: Word, t: float, n: int, max_grade: int) -> GibbsValue:
    """Truncated Gibbs expectation of S_rho S_sigma* for a census variant.

    error_bound uses the strict per-block eigenvalue minimum; the monomial
    is a contraction, so its trace tail is dominated by the heat tail.
    """
    if variant not in GIBBS_VARIANTS:
        raise ValueError(f"Gibbs expectations need a frame-diagonal variant, not {variant!r}")
    if t <= 0:
        raise ValueError("Gibbs expectation needs t > 0")
    numerator_terms = []
    denominator = 0.0
    for g in range(max_grade + 1):
        for k in range(g + 1):
            grade = GradeIndex(g - 2 * k, k)
            census = span_census(n, grade)
            if not census:
                continue
            traces = stratum_traces(n, rho, sigma, grade)
            for j, mult in census.items():
                lam = stratum_eigenvalue(variant, n, grade, j)
                weight = math.exp(-t * float(lam) ** 2)
                denominator += mult * weight
                a = traces.get(j)
                if a:
                    numerator_terms.append(float(a) * weight)
    tail = heat_tail_bound(variant, n, max_grade, t, strict=True)
    if not numerator_terms:
        return GibbsValue(0.0, tail / max(denominator - tail, 1e-300), True)
    value = math.fsum(numerator_terms) / denominator
    bound = tail * (1 + abs(value)) / max(denominator - tail, 1e-300)
    return GibbsValue(value, bound, False)


def cylinder_masses(variant: str, n: int, t: float, max_grade: int, depth: int) -> dict[str, float]:
    """Gibbs masses of the depth-d cylinder projections S_mu S_mu*."""
    return {
        text(mu): frohlich(variant, mu, mu, t, n, max_grade).value
        for mu in words_of_length(n, depth)
    }


def kms_table(variant: str, n: int, ts, max_grade: int, depth: int = 1) -> list[dict]:
    """Scaling diagnostics: each extra isometry should shrink mass by 1/N.

    Rows compare frohlich(rho+mu, rho+mu) against frohlich(mu, mu)/N and
    report the deviation; no exactness is claimed at finite t and grade.
    """
    rows = []
    for t in ts:
        base = {
            mu: frohlich(variant, mu, mu, t, n, max_grade).value
            for mu in words_of_length(n, depth)
        }
        for rho in words_of_length(n, 1):
            for mu, mass in base.items():
                extended = frohlich(variant, rho + mu, rho + mu, t, n, max_grade).value
                ratio = extended / mass if mass else float("nan")
                ideal = 1.0 / n
                rows.append(
                    {
                        "t": t,
                        "rho": text(rho),
                        "mu": text(mu),
                        "ratio": ratio,
                        "kms_ideal": ideal,
                        "deviation": ratio - ideal,
                    }
                )
    return rows


# ---------------------------------------------------------------------------
# the printed closed form for diagonal monomial matrix elements


def matrix_element_formula(n: int, mu: Word, nu: Word, rho: Word, sigma: Word) -> Fraction:
    """Printed closed form for <e, S_rho S_sigma* e>/<e, e> on basis pairs."""
    if rho != sigma:
        return Fraction(0)
    drop = Fraction(n) ** min(0, len(mu) - len(rho))
    if not (nu and mu and tail(mu) == tail(nu)):
        return drop if prefix_compatible(sigma, mu) else Fraction(0)
    first = (n - 2) * drop if prefix_compatible(sigma, mu) else Fraction(0)
    second = (
        Fraction(n) ** min(0, len(mu) - len(rho) - 1)
        if prefix_compatible(sigma, mu[:-1])
        else Fraction(0)
    )
    return (first + second) / (n - 1)


def matrix_element_direct(n: int, mu: Word, nu: Word, rho: Word, sigma: Word) -> Fraction:
    """The same matrix element evaluated from the model, no formula."""
    vec, nsq = e_vector(n, mu, nu)
    return inner(vec, monomial_action(rho, sigma, vec)) / nsq
