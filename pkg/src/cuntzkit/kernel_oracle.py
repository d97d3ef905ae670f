"""First-principles evaluation of the singular integral operator.

The operator acts sheet by sheet.  On the sheet with domain U the kernel is
N^{agreement length of the two source points}, and the defining expression

    T f(y1) = (1 - 1/N)^{-1} * integral over U of (f(y1) - f(y2)) N^{|y1 v y2|}

is computed two independent ways:

* "sphere" mode decomposes the integral over the metric annuli around y1
  and sums the finitely many resolved radii, asserting (not assuming) that
  the first unresolved radius contributes exactly zero;
* "direct" mode evaluates the double integral cellwise at a uniform
  refinement, where the diagonal cells drop out because f is constant there.

Both are exact over the rationals and must agree; the pair is the ground
truth the printed closed forms are adjudicated against.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .cylinder import CylinderFunction, annulus
from .sheets import GroupoidVector, Sheet, domain_indicator, inner
from .words import Word, common_prefix, kappa_v, words_of_length


class SphereSpec(NamedTuple):
    sheet: Sheet
    base_cell: Word
    ell: int


def sphere_volume(n: int, spec: SphereSpec) -> Fraction:
    """Exact mass of the radius-e^-ell sphere around any point of the base cell.

    Only the part of the annulus inside the sheet domain counts: points in
    excluded cells are at infinite distance (they sit on other sheets).
    """
    u = domain_indicator(n, spec.sheet)
    base = CylinderFunction.chi(n, spec.base_cell)
    if base * u != base:
        raise ValueError("base cell not inside the sheet domain")
    return (annulus(n, spec.base_cell, spec.ell) * u).integrate()


def _prefix_integrals(vals, n: int, depth: int, upto: int, cellmass: Fraction):
    """Integrals of a depth-`depth` value array over all prefixes of length <= upto.

    Returns a list indexed by prefix length; entry p is the tuple of integrals
    over the n^p cylinders of that depth, in lex order.
    """
    level = [v * cellmass for v in vals]
    levels = {depth: level}
    for p in range(depth - 1, -1, -1):
        level = [sum(level[i * n : (i + 1) * n], Fraction(0)) for i in range(len(level) // n)]
        levels[p] = level
    return [tuple(levels[p]) for p in range(upto + 1)]


def _expand(prefix_vals, p: int, n: int, depth: int):
    """Repeat length-p prefix values out to full depth-`depth` cell order."""
    reps = n ** (depth - p)
    return [v for v in prefix_vals for _ in range(reps)]


def _apply_t_sheet_sphere(n: int, sheet: Sheet, part: CylinderFunction) -> CylinderFunction:
    uvals_fn = domain_indicator(n, sheet)
    big_l = max(part.depth, sheet.k)
    depth = big_l + 1
    cellmass = Fraction(1, n ** depth)
    fvals = part.at_depth(depth)
    uvals = uvals_fn.at_depth(depth)
    f_pref = _prefix_integrals(fvals, n, depth, big_l + 1, cellmass)
    m_pref = _prefix_integrals(uvals, n, depth, big_l + 1, cellmass)

    total = [Fraction(0)] * len(fvals)
    for ell in range(big_l + 1):
        m_out = _expand(m_pref[ell], ell, n, depth)
        m_in = _expand(m_pref[ell + 1], ell + 1, n, depth)
        f_out = _expand(f_pref[ell], ell, n, depth)
        f_in = _expand(f_pref[ell + 1], ell + 1, n, depth)
        weight = Fraction(n) ** ell
        term = [
            f * (mo - mi) - (fo - fi)
            for f, mo, mi, fo, fi in zip(fvals, m_out, m_in, f_out, f_in)
        ]
        if ell == big_l:
            # first unresolved radius: must vanish identically, by locality
            live = [t for t, u in zip(term, uvals) if u]
            if any(live):
                raise AssertionError("annulus series did not terminate at the resolution depth")
        else:
            total = [t + weight * v for t, v in zip(total, term)]
    scale = 1 / (1 - Fraction(1, n))
    result = CylinderFunction(n, depth, [scale * t for t in total])
    return result * uvals_fn


def _apply_t_sheet_direct(n: int, sheet: Sheet, part: CylinderFunction) -> CylinderFunction:
    u = domain_indicator(n, sheet)
    depth = max(part.depth, sheet.k)
    cells = list(words_of_length(n, depth))
    fvals = part.at_depth(depth)
    uvals = u.at_depth(depth)
    cellmass = Fraction(1, n ** depth)
    scale = 1 / (1 - Fraction(1, n))
    out = []
    for a, wa in enumerate(cells):
        if not uvals[a]:
            out.append(Fraction(0))
            continue
        acc = Fraction(0)
        for b, wb in enumerate(cells):
            if b == a or not uvals[b]:
                continue
            ker = Fraction(n) ** len(common_prefix(wa, wb))
            acc += (fvals[a] - fvals[b]) * ker
        out.append(scale * acc * cellmass)
    return CylinderFunction(n, depth, out)


def apply_T(f: GroupoidVector, mode: str = "sphere") -> GroupoidVector:
    """The singular integral operator, exactly, sheet by sheet."""
    if mode not in ("sphere", "direct"):
        raise ValueError(f"unknown mode {mode!r}")
    work = _apply_t_sheet_sphere if mode == "sphere" else _apply_t_sheet_direct
    parts = {s: work(f.n, s, p) for s, p in f.parts.items()}
    return GroupoidVector(f.n, parts, validate=False)


def apply_fock_kernel(f: GroupoidVector) -> GroupoidVector:
    """Projection onto the span of the depth-zero sheet indicators.

    The kernel pairs each k=0 sheet with itself, so the image replaces every
    such part by its mean and kills all deeper sheets.
    """
    parts = {}
    for sheet, part in f.parts.items():
        if sheet.k == 0:
            mean = part.integrate()
            if mean:
                parts[sheet] = CylinderFunction.constant(f.n, mean)
    return GroupoidVector(f.n, parts, validate=False)


def paper_volumes(n: int, mu: Word, nu: Word, ell: int, case: str) -> Fraction:
    """The printed sphere-measure formulas, verbatim, for comparison only.

    case "in" is the three-way split for a point inside X_{mu,nu}; case "out"
    is the coefficient the intersection formula assigns wherever its
    indicator factors are satisfied.
    """
    if ell < 0:
        raise ValueError("negative radius index")
    if case == "in":
        kg = kappa_v(mu, nu)
        if ell >= len(nu):
            return Fraction(0)
        if ell >= kg:
            return Fraction(1, n ** ell) - Fraction(1, n ** (ell + 1))
        return Fraction((n - 1) ** 2, n ** (ell + 1))
    if case == "out":
        return Fraction(1, n ** len(nu))
    raise ValueError(f"unknown case {case!r}")
