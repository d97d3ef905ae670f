"""Exact measure calculus on the full one-sided shift space over {1..N}.

Functions here are locally constant with rational values, stored on the
complete list of depth-d cylinders in lexicographic order.  The measure is
the balanced Bernoulli measure giving each depth-d cell mass N^-d, which is
the Patterson-Sullivan / Hausdorff measure of the standard ultrametric.
No floating point enters this module.
"""

from __future__ import annotations

from fractions import Fraction

from .words import Word, words_of_length


def cell_index(w: Word, n: int) -> int:
    """Position of the depth-|w| cylinder C_w in lexicographic cell order."""
    i = 0
    for a in w:
        i = i * n + (a - 1)
    return i


class CylinderFunction:
    """A rational function on the shift space, constant on depth-d cylinders.

    The representation is canonical: either depth is 0 or some group of N
    sibling cells carries unequal values, so equal functions compare equal.
    """

    __slots__ = ("n", "depth", "values")

    def __init__(self, n: int, depth: int, values) -> None:
        vals = tuple(v if isinstance(v, Fraction) else Fraction(v) for v in values)
        if n < 2:
            raise ValueError("alphabet needs at least two letters")
        if len(vals) != n ** depth:
            raise ValueError(f"expected {n ** depth} cell values, got {len(vals)}")
        while depth > 0:
            merged = self._merge(vals, n)
            if merged is None:
                break
            vals = merged
            depth -= 1
        self.n = n
        self.depth = depth
        self.values = vals

    @staticmethod
    def _merge(vals, n):
        out = []
        for i in range(0, len(vals), n):
            head = vals[i]
            if any(vals[i + j] != head for j in range(1, n)):
                return None
            out.append(head)
        return tuple(out)

    @classmethod
    def constant(cls, n: int, value) -> "CylinderFunction":
        return cls(n, 0, (value,))

    @classmethod
    def zero(cls, n: int) -> "CylinderFunction":
        return cls(n, 0, (0,))

    @classmethod
    def chi(cls, n: int, w: Word) -> "CylinderFunction":
        """Indicator of the cylinder C_w."""
        vals = [Fraction(0)] * n ** len(w)
        vals[cell_index(w, n)] = Fraction(1)
        return cls(n, len(w), vals)

    def at_depth(self, d: int) -> tuple:
        """Values on all depth-d cells (d >= current depth), lex order."""
        if d < self.depth:
            raise ValueError("cannot coarsen below the canonical depth")
        reps = self.n ** (d - self.depth)
        if reps == 1:
            return self.values
        return tuple(v for v in self.values for _ in range(reps))

    def value_on(self, w: Word) -> Fraction:
        """The constant value taken on C_w; needs |w| >= depth."""
        if len(w) < self.depth:
            raise ValueError("cell coarser than the resolution of the function")
        return self.values[cell_index(w[: self.depth], self.n)]

    def support_at(self, d: int):
        """Pairs (w, value) over depth-d cells with nonzero value."""
        vals = self.at_depth(d)
        return [(w, v) for w, v in zip(words_of_length(self.n, d), vals) if v]

    def integrate(self) -> Fraction:
        return sum(self.values, Fraction(0)) / self.n ** self.depth

    def _binary(self, other, op):
        if isinstance(other, CylinderFunction):
            if other.n != self.n:
                raise ValueError("alphabet mismatch")
            d = max(self.depth, other.depth)
            return CylinderFunction(
                self.n, d, tuple(map(op, self.at_depth(d), other.at_depth(d)))
            )
        c = Fraction(other)
        return CylinderFunction(self.n, self.depth, tuple(op(v, c) for v in self.values))

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return CylinderFunction(self.n, self.depth, tuple(-v for v in self.values))

    def __bool__(self):
        return any(self.values)

    def __eq__(self, other):
        if not isinstance(other, CylinderFunction):
            return NotImplemented
        return (self.n, self.depth, self.values) == (other.n, other.depth, other.values)

    def __hash__(self):
        return hash((self.n, self.depth, self.values))

    def __repr__(self):
        return f"CylinderFunction(n={self.n}, depth={self.depth})"


def integrate(f: CylinderFunction) -> Fraction:
    return f.integrate()


def algebra(f: CylinderFunction, g, op: str) -> CylinderFunction:
    """Pointwise algebra dispatch: op is one of add, scale, multiply."""
    if op == "add":
        return f + g
    if op == "multiply":
        return f * g
    if op == "scale":
        return f * Fraction(g)
    raise ValueError(f"unknown op {op!r}")


def annulus(n: int, base: Word, ell: int) -> CylinderFunction:
    """Indicator of the points whose first disagreement with C_base is at ell.

    This is the metric sphere of radius e^-ell around any point of C_base,
    and it equals chi(base[:ell]) - chi(base[:ell+1]).  The sphere is only
    resolved when ell < |base|.
    """
    if not 0 <= ell < len(base):
        raise ValueError("annulus not resolved: need 0 <= ell < |base|")
    return CylinderFunction.chi(n, base[:ell]) - CylinderFunction.chi(n, base[: ell + 1])
