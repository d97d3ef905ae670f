"""Exact model of the GNS Hilbert space of the gauge-invariant KMS state.

A vector is stored sheet by sheet.  The sheet (mu0, k) collects the groupoid
elements (mu0 s^k y, |mu0|-k, y) whose minimal shift-agreement index is
exactly k; its source domain U_{mu0,k} is the whole space unless k >= 1 and
mu0 is nonempty, in which case the cells whose k-th letter equals the last
letter of mu0 are excluded (there the agreement index would drop below k).
The transported measure is the cylinder measure of the source coordinate,
so inner products reduce to sheetwise integrals and distinct sheets are
orthogonal by construction.

Scalars stay rational throughout: the basis vectors are handled in their
unnormalized form (written e-check below) and their norm squares are
tracked separately.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple

from .cylinder import CylinderFunction
from .words import EMPTY, Word, strip, tail, words_of_length


class Sheet(NamedTuple):
    mu0: Word
    k: int


def letter_indicator(n: int, k: int, i: int) -> CylinderFunction:
    """Indicator of the depth-k cells whose k-th letter is i (k >= 1)."""
    vals = [Fraction(int(w[k - 1] == i)) for w in words_of_length(n, k)]
    return CylinderFunction(n, k, vals)


def domain_indicator(n: int, sheet: Sheet) -> CylinderFunction:
    """Indicator of the sheet's source domain U_{mu0,k}."""
    mu0, k = sheet
    if k == 0 or mu0 == EMPTY:
        return CylinderFunction.constant(n, 1)
    return CylinderFunction.constant(n, 1) - letter_indicator(n, k, tail(mu0))


class GroupoidVector:
    """Finitely supported vector: a map from sheets to cylinder functions."""

    __slots__ = ("n", "parts")

    def __init__(self, n: int, parts: dict | None = None, *, validate: bool = True) -> None:
        self.n = n
        self.parts = {s: f for s, f in (parts or {}).items() if f}
        if validate:
            for s, f in self.parts.items():
                if f * domain_indicator(n, s) != f:
                    raise ValueError(f"part on sheet {s} leaks outside its domain")

    @classmethod
    def zero(cls, n: int) -> "GroupoidVector":
        return cls(n, {})

    def __add__(self, other: "GroupoidVector") -> "GroupoidVector":
        if self.n != other.n:
            raise ValueError("alphabet mismatch")
        parts = dict(self.parts)
        for s, f in other.parts.items():
            parts[s] = parts[s] + f if s in parts else f
        return GroupoidVector(self.n, parts, validate=False)

    def __sub__(self, other: "GroupoidVector") -> "GroupoidVector":
        return self + (-other)

    def __neg__(self) -> "GroupoidVector":
        return GroupoidVector(self.n, {s: -f for s, f in self.parts.items()}, validate=False)

    def __mul__(self, c) -> "GroupoidVector":
        c = Fraction(c)
        return GroupoidVector(self.n, {s: f * c for s, f in self.parts.items()}, validate=False)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.parts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupoidVector):
            return NotImplemented
        return self.n == other.n and self.parts == other.parts

    def __hash__(self):
        return hash((self.n, frozenset(self.parts.items())))

    def __repr__(self):
        return f"GroupoidVector(n={self.n}, sheets={sorted(self.parts)})"

    def cells(self) -> list[tuple[Word, Word, Fraction]]:
        """Decomposition into basis cells: triples (mu, nu, value).

        Each sheet part is read off at its cell resolution; the depth-d cell
        w on sheet (mu0, k) is the indicator of the pair (mu0 + w[k:], w).
        """
        out = []
        for (mu0, k), f in sorted(self.parts.items()):
            d = max(f.depth, k)
            for w, v in f.support_at(d):
                out.append((mu0 + w[k:], w, v))
        return out


def inner(f: GroupoidVector, g: GroupoidVector) -> Fraction:
    """Hilbert space inner product: sheetwise integral of the product."""
    total = Fraction(0)
    for s, fp in f.parts.items():
        gp = g.parts.get(s)
        if gp is not None:
            total += (fp * gp).integrate()
    return total


@lru_cache(maxsize=None)
def chi_vector(n: int, mu: Word, nu: Word) -> GroupoidVector:
    """Indicator of the basis set X_{mu,nu}, placed on its sheet."""
    mu0, k = strip(mu, nu)
    return GroupoidVector(n, {Sheet(mu0, k): CylinderFunction.chi(n, nu)})


@lru_cache(maxsize=None)
def e_vector(n: int, mu: Word, nu: Word) -> tuple[GroupoidVector, Fraction]:
    """Unnormalized basis vector e-check_{mu,nu} and its exact norm square.

    Vectors are immutable, so the memoized instances are safe to share.
    """
    v = chi_vector(n, mu, nu)
    if nu and tail(mu) == tail(nu):
        v = v - chi_vector(n, mu[:-1], nu[:-1]) * Fraction(1, n)
    return v, inner(v, v)


def gen_action(i: int, f: GroupoidVector, adjoint: bool = False) -> GroupoidVector:
    """Apply the generating isometry S_i (or its adjoint) to f.

    Sheetwise rules, derived from S_i chi_{mu,nu} = chi_{i mu,nu} and
    re-stripping the resulting pair:
      S_i:  (mu0,k) -> (i+mu0,k); on (0,k), k>=1, the cells whose k-th letter
            is i reduce to (0,k-1), the rest land on ((i),k).
      S_i*: (i+rest,k) -> (rest,k); other nonempty mu0 die; (0,k) -> (0,k+1)
            keeping only the cells whose (k+1)-th letter is i.
    """
    n = f.n
    if not 1 <= i <= n:
        raise ValueError(f"letter {i} outside alphabet of size {n}")
    out: dict[Sheet, CylinderFunction] = {}

    def put(sheet: Sheet, part: CylinderFunction) -> None:
        if part:
            out[sheet] = out[sheet] + part if sheet in out else part

    for (mu0, k), part in f.parts.items():
        if not adjoint:
            if mu0 == EMPTY and k >= 1:
                ind = letter_indicator(n, k, i)
                put(Sheet(EMPTY, k - 1), part * ind)
                put(Sheet((i,), k), part - part * ind)
            else:
                put(Sheet((i,) + mu0, k), part)
        else:
            if mu0 == EMPTY:
                put(Sheet(EMPTY, k + 1), part * letter_indicator(n, k + 1, i))
            elif mu0[0] == i:
                put(Sheet(mu0[1:], k), part)
    return GroupoidVector(n, out, validate=False)


def monomial_action(rho: Word, sigma: Word, f: GroupoidVector) -> GroupoidVector:
    """Apply the partial isometry S_rho S_sigma* to f."""
    for a in sigma:
        f = gen_action(a, f, adjoint=True)
    for a in reversed(rho):
        f = gen_action(a, f)
    return f


def block_basis(n: int, grade_n: int, k: int) -> list[tuple[Word, Word]]:
    """Index pairs (mu, nu) of the weight space H_{n,k}, in (mu, nu) lex order."""
    if k < 0 or grade_n < -k:
        raise ValueError("invalid weight: need k >= 0 and n >= -k")
    return [
        (mu, nu)
        for mu in words_of_length(n, grade_n + k)
        for nu in words_of_length(n, k)
    ]


def block_coords(
    f: GroupoidVector, grade_n: int, k: int, *, component: bool = False
) -> tuple[Fraction, ...]:
    """Exact coefficients of f against the e-check family of H_{n,k}.

    The family is a tight frame of its span with frame constant N^-k, so the
    canonical (minimal-norm) coefficient of f along e-check_b is
    N^k <e-check_b, f>.  With component=False the reconstruction must equal
    f exactly; otherwise the coefficients of the orthogonal projection onto
    H_{n,k} are returned and any remainder is the caller's business.
    """
    n = f.n
    coeffs = []
    recon = GroupoidVector.zero(n)
    scale = Fraction(n) ** k
    for mu, nu in block_basis(n, grade_n, k):
        v, _ = e_vector(n, mu, nu)
        c = inner(v, f) * scale
        coeffs.append(c)
        if c:
            recon = recon + v * c
    if not component and recon != f:
        raise ValueError("vector has components outside the requested weight space")
    return tuple(coeffs)


def block_decompose(f: GroupoidVector) -> dict[tuple[int, int], tuple[Fraction, ...]]:
    """Split f into weight-space components, asserting nothing is left over.

    The candidate weights are read off the sheet structure: a part on sheet
    (mu0, j) at depth d contributes to weights (|mu0|-j, k) for j <= k <= d.
    """
    weights = set()
    for (mu0, j), part in f.parts.items():
        for k in range(j, max(part.depth, j) + 1):
            weights.add((len(mu0) - j, k))
    out = {}
    remainder = f
    for grade_n, k in sorted(weights):
        coeffs = block_coords(f, grade_n, k, component=True)
        if any(coeffs):
            out[(grade_n, k)] = coeffs
            recon = GroupoidVector.zero(f.n)
            for (mu, nu), c in zip(block_basis(f.n, grade_n, k), coeffs):
                if c:
                    recon = recon + e_vector(f.n, mu, nu)[0] * c
            remainder = remainder - recon
    if remainder:
        raise ValueError("vector does not decompose over the weight spaces")
    return out
