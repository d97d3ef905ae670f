"""Exact block matrices on the weight spaces H_{n,k}, and the boundary-fiber model.

Matrices are stored in the coefficient convention

    Op ech_a = sum_b entries[a][b] ech_b

against the lex-ordered unnormalized basis family of the block.  Because the
family is a tight frame rather than a basis, coefficient rows are the
canonical (minimal-norm) ones; Gram symmetry
entries[a][b]*norm_sq[b] == entries[b][a]*norm_sq[a] still holds exactly
because no named operator couples the two norm classes of a block.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from . import kernel_oracle
from .sheets import block_basis, block_coords, e_vector
from .words import EMPTY, Word, common_prefix, kappa_v, tail, words_of_length


class GradeIndex(NamedTuple):
    n: int
    k: int


class ResourceCapExceeded(Exception):
    """A block was larger than the configured exact-arithmetic cap."""


DIAGONAL_RULES = {
    "kappa": lambda mu, nu, n: Fraction(len(nu)),
    "kappa_g": lambda mu, nu, n: Fraction(kappa_v(mu, nu)),
    "c": lambda mu, nu, n: Fraction(len(mu) - len(nu)),
    "abs_c": lambda mu, nu, n: Fraction(abs(len(mu) - len(nu))),
    "Q": lambda mu, nu, n: Fraction(int(bool(nu) and tail(mu) == tail(nu))),
    "P_F": lambda mu, nu, n: Fraction(int(nu == EMPTY)),
    "T_tilde": lambda mu, nu, n: len(nu) - Fraction(kappa_v(mu, nu), n),
}

OPERATOR_NAMES = tuple(DIAGONAL_RULES) + ("B", "T_paper", "T_oracle")

D_VARIANTS = ("d_kappa", "d_tilde", "d_paper", "d_oracle")


class BlockOperator(NamedTuple):
    name: str
    alphabet: int
    grade: GradeIndex
    entries: tuple  # tuple of row tuples, exact rationals
    norm_sq_diag: tuple

    @property
    def dim(self) -> int:
        return len(self.entries)

    def apply_coeffs(self, coeffs):
        """Push a coefficient row through the operator (row-vector times matrix)."""
        out = [Fraction(0)] * self.dim
        for a, c in enumerate(coeffs):
            if c:
                row = self.entries[a]
                for b in range(self.dim):
                    if row[b]:
                        out[b] += c * row[b]
        return tuple(out)


def _check_cap(n: int, grade: GradeIndex, exact_cap: int) -> None:
    if grade.k < 0 or grade.n < -grade.k:
        raise ValueError("invalid grade: need k >= 0 and n >= -k")
    dim = n ** (grade.n + 2 * grade.k)
    if dim > exact_cap:
        raise ResourceCapExceeded(f"block dimension {dim} exceeds exact cap {exact_cap}")


def _norms(n: int, basis) -> tuple:
    out = []
    for mu, nu in basis:
        v = Fraction(1, n ** len(nu))
        if nu and tail(mu) == tail(nu):
            v *= 1 - Fraction(1, n)
        out.append(v)
    return tuple(out)


def _diagonal_block(name: str, n: int, grade: GradeIndex, basis) -> tuple:
    rule = DIAGONAL_RULES[name]
    dim = len(basis)
    rows = []
    for a, (mu, nu) in enumerate(basis):
        row = [Fraction(0)] * dim
        row[a] = rule(mu, nu, n)
        rows.append(tuple(row))
    return tuple(rows)


def _dispersion_block(n: int, basis) -> tuple:
    """The printed dispersion triple sum, taken literally."""
    index = {p: i for i, p in enumerate(basis)}
    scale = 1 / (1 - Fraction(1, n))
    dim = len(basis)
    rows = []
    for mu, nu in basis:
        row = [Fraction(0)] * dim
        if nu and tail(mu) != tail(nu):
            for m in range(1, n + 1):
                if m == tail(mu):
                    continue
                for gamma in words_of_length(n, len(nu) - 1):
                    ell = len(common_prefix(gamma, nu))
                    row[index[(mu, gamma + (m,))]] += scale * Fraction(n) ** (ell - len(nu))
        rows.append(tuple(row))
    return tuple(rows)


def _combine(blocks_and_scales, dim):
    rows = []
    for a in range(dim):
        row = [Fraction(0)] * dim
        for block, s in blocks_and_scales:
            src = block[a]
            for b in range(dim):
                if src[b]:
                    row[b] += s * src[b]
        rows.append(tuple(row))
    return tuple(rows)


def build_block(name: str, n: int, grade: GradeIndex, exact_cap: int = 729) -> BlockOperator:
    """Exact matrix of a named operator on one weight space."""
    grade = GradeIndex(*grade)
    _check_cap(n, grade, exact_cap)
    basis = block_basis(n, grade.n, grade.k)
    if name in DIAGONAL_RULES:
        entries = _diagonal_block(name, n, grade, basis)
    elif name == "B":
        entries = _dispersion_block(n, basis)
    elif name == "T_paper":
        parts = [
            (_diagonal_block("kappa", n, grade, basis), Fraction(1)),
            (_diagonal_block("kappa_g", n, grade, basis), Fraction(-1, n)),
            (_diagonal_block("Q", n, grade, basis), Fraction(1, n - 1)),
            (_dispersion_block(n, basis), Fraction(-1)),
        ]
        entries = _combine(parts, len(basis))
    elif name == "T_oracle":
        rows = []
        for mu, nu in basis:
            image = kernel_oracle.apply_T(e_vector(n, mu, nu)[0])
            rows.append(block_coords(image, grade.n, grade.k))
        entries = tuple(rows)
    else:
        raise ValueError(f"unknown operator name {name!r}")
    return BlockOperator(name, n, grade, entries, _norms(n, basis))


def assemble_D(variant: str, n: int, grade: GradeIndex, exact_cap: int = 729) -> BlockOperator:
    """One of the four Dirac candidates, blockwise: (2P_F - 1)|c| - T_variant."""
    grade = GradeIndex(*grade)
    t_name = {
        "d_kappa": "kappa",
        "d_tilde": "T_tilde",
        "d_paper": "T_paper",
        "d_oracle": "T_oracle",
    }.get(variant)
    if t_name is None:
        raise ValueError(f"unknown D variant {variant!r}")
    t_block = build_block(t_name, n, grade, exact_cap)
    sign = 1 if grade.k == 0 else -1
    shift = sign * abs(grade.n)
    rows = []
    for a, row in enumerate(t_block.entries):
        new = [-x for x in row]
        new[a] += shift
        rows.append(tuple(new))
    return BlockOperator(variant, n, grade, tuple(rows), t_block.norm_sq_diag)


class FiberPoint(NamedTuple):
    mu: Word
    k: int


class FiberBlock(NamedTuple):
    basis: tuple  # FiberPoints, sorted by (grade, k, mu)
    d_diag: tuple
    p_diag: tuple
    s_action: dict  # letter -> tuple of target indices (None = leaves truncation or 0)
    s_star_action: dict


def _boundary_letter(w_spec: tuple[Word, Word], pos: int) -> int:
    """1-indexed letter of the eventually periodic word preperiod + period^inf."""
    pre, per = w_spec
    if not per:
        raise ValueError("period must be nonempty")
    if pos <= len(pre):
        return pre[pos - 1]
    return per[(pos - len(pre) - 1) % len(per)]


def fiber_block(n: int, w_spec: tuple[Word, Word], max_grade: int) -> FiberBlock:
    """Discrete model on the source fiber of an eventually periodic boundary point.

    Points are pairs (mu, k), admissible when k = 0, mu is empty, or the last
    letter of mu differs from the k-th letter of the boundary word; the grade
    |mu| + k is truncated at max_grade.
    """
    pts = []
    for g in range(max_grade + 1):
        for k in range(g + 1):
            for mu in words_of_length(n, g - k):
                if k == 0 or mu == EMPTY or tail(mu) != _boundary_letter(w_spec, k):
                    pts.append(FiberPoint(mu, k))
    index = {p: i for i, p in enumerate(pts)}
    d_diag, p_diag = [], []
    for mu, k in pts:
        nn = abs(len(mu) - k)
        d_diag.append(Fraction(nn if k == 0 else -nn - k))
        p_diag.append(Fraction(int(k == 0)))
    s_action, s_star_action = {}, {}
    for i in range(1, n + 1):
        fwd, bwd = [], []
        for mu, k in pts:
            if mu == EMPTY and k >= 1:
                tgt = FiberPoint(EMPTY, k - 1) if i == _boundary_letter(w_spec, k) else FiberPoint((i,), k)
            else:
                tgt = FiberPoint((i,) + mu, k)
            fwd.append(index.get(tgt))
            if mu == EMPTY:
                back = FiberPoint(EMPTY, k + 1) if _boundary_letter(w_spec, k + 1) == i else None
            elif mu[0] == i:
                back = FiberPoint(mu[1:], k)
            else:
                back = None
            bwd.append(index.get(back) if back is not None else None)
        s_action[i] = tuple(fwd)
        s_star_action[i] = tuple(bwd)
    return FiberBlock(tuple(pts), tuple(d_diag), tuple(p_diag), s_action, s_star_action)
