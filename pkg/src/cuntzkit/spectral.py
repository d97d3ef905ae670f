"""Spectral layer: eigenvalues, heat traces, commutator decay, rank counts.

The unnormalized basis family of a weight space is a tight frame with
relations (each refinement family of matched-tail vectors sums to zero), so
eigenvalues are computed on an explicit orthogonal basis of the actual span:

* "fathers": the suffix-free pairs, whose vectors are disjoint cells;
* per refinement family, the N-1 Helmert combinations of its members.

Both kinds have exact rational inner products, so symmetric matrices of any
block operator restricted to the span are exact; floats enter only in the
final eigenvalue iteration.  Frame-diagonal operators bypass matrices
entirely through a counting argument (the census), which keeps the headline
rank and heat-trace numbers for those operators fully exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

from .operators import D_VARIANTS, BlockOperator, GradeIndex, assemble_D
from .sheets import GroupoidVector, block_basis, e_vector, inner
from .words import Word, kappa_v, tail

# ---------------------------------------------------------------------------
# census: how many independent directions each agreement-index stratum holds


def stripped_pair_count(n: int, grade_n: int, j: int) -> int:
    """Count of suffix-free pairs with |mu| = grade_n + j, |nu| = j."""
    if j == 0:
        return n ** grade_n if grade_n >= 0 else 0
    if grade_n + j < 0:
        return 0
    if grade_n + j == 0:
        return n ** j
    return (n - 1) * n ** (grade_n + 2 * j - 1)


def pair_count(n: int, grade_n: int, k: int, j: int) -> int:
    """Pairs in the (grade_n, k) block whose agreement index is j."""
    if not 0 <= j <= k or grade_n + k < 0:
        return 0
    return stripped_pair_count(n, grade_n, j) * n ** (k - j)


def span_census(n: int, grade: GradeIndex) -> dict[int, int]:
    """Stratum -> dimension of its contribution to the block span.

    One refinement-family relation is lost per level-(k-1) pair, and each
    family sits inside the stratum of its parent, hence the difference.
    """
    grade = GradeIndex(*grade)
    out = {}
    for j in range(grade.k + 1):
        m = pair_count(n, grade.n, grade.k, j) - pair_count(n, grade.n, grade.k - 1, j)
        if m:
            out[j] = m
    return out


def span_dim(n: int, grade: GradeIndex) -> int:
    return sum(span_census(n, grade).values())


# ---------------------------------------------------------------------------
# orthogonal basis of the block span


class OrthoVector(NamedTuple):
    coeffs: dict  # sparse basis-pair -> rational weight
    norm_sq: Fraction
    stratum: int  # the agreement index shared by all contributing pairs


def orthobasis(n: int, grade: GradeIndex) -> list[OrthoVector]:
    grade = GradeIndex(*grade)
    out = []
    for mu, nu in block_basis(n, grade.n, grade.k):
        if kappa_v(mu, nu) == grade.k:
            nsq = Fraction(1, n ** grade.k)
            out.append(OrthoVector({(mu, nu): Fraction(1)}, nsq, grade.k))
    if grade.k >= 1 and grade.n + grade.k >= 1:
        for par_mu, par_nu in block_basis(n, grade.n, grade.k - 1):
            j = kappa_v(par_mu, par_nu)
            for top in range(1, n):
                coeffs = {(par_mu + (m,), par_nu + (m,)): Fraction(1) for m in range(1, top + 1)}
                coeffs[(par_mu + (top + 1,), par_nu + (top + 1,))] = Fraction(-top)
                nsq = Fraction(top * (top + 1), n ** grade.k)
                out.append(OrthoVector(coeffs, nsq, j))
    return out


def frame_gram(n: int, a: tuple[Word, Word], b: tuple[Word, Word]) -> Fraction:
    """Exact inner product of two unnormalized basis vectors of one block."""
    k = len(a[1])
    if a == b:
        nsq = Fraction(1, n ** k)
        if a[1] and tail(a[0]) == tail(a[1]):
            nsq *= 1 - Fraction(1, n)
        return nsq
    matched = lambda p: bool(p[1]) and tail(p[0]) == tail(p[1])
    if (
        matched(a)
        and matched(b)
        and a[0][:-1] == b[0][:-1]
        and a[1][:-1] == b[1][:-1]
    ):
        return Fraction(-1, n ** (k + 1))
    return Fraction(0)


def materialize(n: int, coeffs: dict) -> GroupoidVector:
    out = GroupoidVector.zero(n)
    for (mu, nu), c in coeffs.items():
        if c:
            out = out + e_vector(n, mu, nu)[0] * c
    return out


def ortho_matrix(block: BlockOperator) -> tuple[list[list[Fraction]], list[OrthoVector]]:
    """Exact matrix <u_i, Op u_j> of a block operator on the span basis."""
    n = block.alphabet
    basis = block_basis(n, block.grade.n, block.grade.k)
    index = {p: i for i, p in enumerate(basis)}
    ortho = orthobasis(n, block.grade)
    # frame-inner profiles g_i[b] = <u_i, ech_b>, sparse over sibling closures
    profiles = []
    for u in ortho:
        prof = {}
        for pair, w in u.coeffs.items():
            mu, nu = pair
            neighbours = [pair]
            if nu and tail(mu) == tail(nu):
                neighbours = [(mu[:-1] + (m,), nu[:-1] + (m,)) for m in range(1, n + 1)]
            for other in neighbours:
                g = frame_gram(n, other, pair)
                if g:
                    prof[index[other]] = prof.get(index[other], Fraction(0)) + w * g
        profiles.append(prof)
    rows = []
    for uj in ortho:
        cof = [Fraction(0)] * len(basis)
        for pair, w in uj.coeffs.items():
            a = index[pair]
            row = block.entries[a]
            for b in range(len(basis)):
                if row[b]:
                    cof[b] += w * row[b]
        rows.append(cof)
    mat = [
        [sum(cj[b] * gi for b, gi in profiles[i].items()) for cj in rows]
        for i in range(len(ortho))
    ]
    # mat[i][j] = <u_i, Op u_j>; sanity: symmetric for all shipped operators
    return mat, ortho


# ---------------------------------------------------------------------------
# exact rational linear algebra on small symmetric matrices


def rational_kernel_dim(mat: list[list[Fraction]]) -> int:
    """Nullity by Gaussian elimination over the rationals."""
    m = [row[:] for row in mat]
    rows, cols = len(m), len(m[0]) if m else 0
    rank = 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        rank += 1
        if r == rows:
            break
    return cols - rank


def exact_psd(mat: list[list[Fraction]]) -> bool:
    """Positive semidefiniteness by pivoted symmetric elimination."""
    m = [row[:] for row in mat]
    d = len(m)
    alive = list(range(d))
    while alive:
        piv = max(alive, key=lambda i: m[i][i])
        if m[piv][piv] < 0:
            return False
        if m[piv][piv] == 0:
            # all remaining diagonals are <= 0, hence 0; rows must vanish too
            return all(m[i][j] == 0 for i in alive for j in alive)
        alive.remove(piv)
        p = m[piv][piv]
        for i in alive:
            f = m[i][piv] / p
            if f:
                for j in alive:
                    m[i][j] -= f * m[piv][j]
    return True


# ---------------------------------------------------------------------------
# dense symmetric eigenvalues: cyclic Jacobi rotations


def jacobi_eigenvalues(a: list[list[float]], tol: float = 1e-14, max_sweeps: int = 60):
    d = len(a)
    if d == 0:
        return []
    m = [[float(x) for x in row] for row in a]
    scale = max(1.0, max(abs(m[i][j]) for i in range(d) for j in range(d)))
    for _ in range(max_sweeps):
        off = math.sqrt(sum(m[i][j] ** 2 for i in range(d) for j in range(i + 1, d)))
        if off <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = m[p][q]
                if abs(apq) <= tol * scale / (10 * d):
                    continue
                theta = (m[q][q] - m[p][p]) / (2 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                for r in range(d):
                    mrp, mrq = m[r][p], m[r][q]
                    m[r][p] = c * mrp - s * mrq
                    m[r][q] = s * mrp + c * mrq
                for r in range(d):
                    mpr, mqr = m[p][r], m[q][r]
                    m[p][r] = c * mpr - s * mqr
                    m[q][r] = s * mpr + c * mqr
    return sorted(m[i][i] for i in range(d))


def _cluster(values, tol):
    pairs = []
    for v in values:
        if pairs and abs(v - pairs[-1][0][-1]) <= tol:
            pairs[-1][0].append(v)
        else:
            pairs.append([[v]])
    return [(sum(g[0]) / len(g[0]), len(g[0])) for g in pairs]


class Spectrum(NamedTuple):
    grade: GradeIndex
    pairs: tuple  # ((eigenvalue, multiplicity), ...) ascending; exact when rational
    exact: bool

    @property
    def dim(self) -> int:
        return sum(m for _, m in self.pairs)


def _is_frame_diagonal(block: BlockOperator) -> bool:
    return all(
        not v for a, row in enumerate(block.entries) for b, v in enumerate(row) if a != b
    )


def spectrum(block: BlockOperator) -> Spectrum:
    """Eigenvalues (with multiplicity) of the operator on the block span."""
    n = block.alphabet
    if _is_frame_diagonal(block):
        basis = block_basis(n, block.grade.n, block.grade.k)
        per_stratum: dict[int, set] = {}
        for (mu, nu), d in zip(basis, (block.entries[i][i] for i in range(block.dim))):
            per_stratum.setdefault(kappa_v(mu, nu), set()).add(d)
        census = span_census(n, block.grade)
        merged: dict[Fraction, int] = {}
        for j, mult in census.items():
            vals = per_stratum[j]
            if len(vals) != 1:
                raise AssertionError("diagonal not constant on a stratum")
            v = next(iter(vals))
            merged[v] = merged.get(v, 0) + mult
        pairs = tuple(sorted(merged.items()))
        return Spectrum(block.grade, pairs, True)
    mat, ortho = ortho_matrix(block)
    norm = [math.sqrt(float(u.norm_sq)) for u in ortho]
    sym = [
        [float(mat[i][j]) / (norm[i] * norm[j]) for j in range(len(ortho))]
        for i in range(len(ortho))
    ]
    vals = jacobi_eigenvalues(sym)
    scale = max([1.0] + [abs(v) for v in vals])
    pairs = tuple(_cluster(vals, 1e-8 * scale))
    return Spectrum(block.grade, pairs, False)


# ---------------------------------------------------------------------------
# heat traces with reported tail bounds


def _grade_blocks(g: int):
    return [GradeIndex(g - 2 * k, k) for k in range(g + 1)]


def stratum_eigenvalue(variant: str, n: int, grade: GradeIndex, j: int) -> Fraction:
    """Eigenvalue of a frame-diagonal Dirac variant on one stratum."""
    grade = GradeIndex(*grade)
    if grade.k == 0:
        return Fraction(abs(grade.n))
    if variant == "d_kappa":
        return Fraction(-abs(grade.n) - grade.k)
    if variant == "d_tilde":
        return -abs(grade.n) - grade.k + Fraction(j, n)
    raise ValueError(f"no census spectrum for variant {variant!r}")


def census_eigenvalues(variant: str, n: int, grade: GradeIndex):
    """Exact (eigenvalue, multiplicity) list for the frame-diagonal variants."""
    grade = GradeIndex(*grade)
    out = {}
    for j, mult in span_census(n, grade).items():
        lam = stratum_eigenvalue(variant, n, grade, j)
        out[lam] = out.get(lam, 0) + mult
    return sorted(out.items())


def block_eigenvalues(variant: str, n: int, grade: GradeIndex, exact_cap: int = 729):
    if variant in ("d_kappa", "d_tilde"):
        return census_eigenvalues(variant, n, grade)
    return list(spectrum(assemble_D(variant, n, grade, exact_cap)).pairs)


_TAIL_PAPER = lambda n_abs, k: 2 * (n_abs + k)

_TAIL_STRICT = {
    "d_kappa": lambda n_abs, k, n: n_abs + k,
    "d_tilde": lambda n_abs, k, n: n_abs + k * (1 - 1.0 / n),
}


def _tail_sum(n: int, max_grade: int, t: float, lam) -> float:
    """Sum of dim * exp(-t lam(n,k)^2) over all blocks beyond max_grade.

    Terms are grouped by grade; the per-grade majorant (g+1) N^g exp(-t g^2)
    has strictly decreasing consecutive ratios, so once the ratio dips below
    1/2 the remainder is closed off geometrically.
    """
    total = 0.0
    g = max_grade + 1
    prev_major = None
    while True:
        term = sum(
            n ** g * math.exp(-t * float(lam(abs(g - 2 * k), k)) ** 2)
            for k in range(g + 1)
        )
        total += term
        major = (g + 1) * n ** g * math.exp(-t * g * g)
        if prev_major is not None and major < 0.5 * prev_major and major < 1e-18 * max(total, 1e-300):
            ratio = major / prev_major
            total += major * ratio / (1 - ratio)
            break
        prev_major = major
        g += 1
        if g > max_grade + 400:
            break
    return total


def heat_tail_bound(variant: str, n: int, max_grade: int, t: float, strict: bool = False) -> float:
    """Tail of the heat trace beyond max_grade, by the chosen block bound."""
    if strict:
        lam = _TAIL_STRICT[variant]
        return _tail_sum(n, max_grade, t, lambda n_abs, k: lam(n_abs, k, n))
    return _tail_sum(n, max_grade, t, _TAIL_PAPER)


def heat_trace(variant: str, ts, n: int, max_grade: int, exact_cap: int = 729):
    """Per-t partial heat traces over grades <= max_grade, with tail bounds.

    tail_bound uses the doubled block bound the summability argument quotes;
    tail_bound_strict (census variants only) uses the smallest actual
    eigenvalue magnitude per block and is the honest counterpart.
    """
    spectra = []
    for g in range(max_grade + 1):
        for grade in _grade_blocks(g):
            spectra.extend(block_eigenvalues(variant, n, grade, exact_cap))
    rows = []
    for t in ts:
        if t <= 0:
            raise ValueError("heat trace needs t > 0")
        partial = sum(m * math.exp(-t * float(lam) ** 2) for lam, m in spectra)
        row = {"t": t, "partial_trace": partial, "tail_bound": heat_tail_bound(variant, n, max_grade, t)}
        if variant in _TAIL_STRICT:
            row["tail_bound_strict"] = heat_tail_bound(variant, n, max_grade, t, strict=True)
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# commutator singular values and decay profile


class SummabilityProfile(NamedTuple):
    s_values: tuple
    fit: dict
    schatten: dict


def _apply_d_variant(variant: str, f: GroupoidVector, exact_cap: int):
    from .sheets import block_decompose

    out = GroupoidVector.zero(f.n)
    for (gn, k), coeffs in block_decompose(f).items():
        block = assemble_D(variant, f.n, GradeIndex(gn, k), exact_cap)
        out = out + materialize(f.n, dict(zip(block_basis(f.n, gn, k), block.apply_coeffs(coeffs))))
    return out


def _project_to_grades(f: GroupoidVector, max_grade: int):
    from .sheets import block_decompose

    out = GroupoidVector.zero(f.n)
    for (gn, k), coeffs in block_decompose(f).items():
        if gn + 2 * k <= max_grade:
            out = out + materialize(f.n, dict(zip(block_basis(f.n, gn, k), coeffs)))
    return out


def _fit_profile(svals) -> dict:
    floor = 1e-13 * (svals[0] if svals else 1.0)
    live = [s for s in svals if s > floor]
    if len(live) < 3:
        return {"kind": "finite_rank", "rank": len(live)}
    ys = [math.log(s) for s in live]
    xs_geo = list(range(len(live)))
    xs_pow = [math.log(j + 1) for j in range(len(live))]

    def lsq(xs):
        nn = len(xs)
        mx, my = sum(xs) / nn, sum(ys) / nn
        sxx = sum((x - mx) ** 2 for x in xs)
        sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
        slope = sxy / sxx
        resid = sum((y - my - slope * (x - mx)) ** 2 for x, y in zip(xs, ys))
        stot = sum((y - my) ** 2 for y in ys) or 1.0
        return slope, 1 - resid / stot

    g_slope, g_r2 = lsq(xs_geo)
    p_slope, p_r2 = lsq(xs_pow)
    if g_r2 >= p_r2:
        return {"kind": "geometric", "rate": math.exp(g_slope), "r2": g_r2}
    return {"kind": "power", "exponent": p_slope, "r2": p_r2}


def commutator_svd(
    op: str,
    pair: tuple[Word, Word],
    n: int,
    max_grade: int,
    ps=(Fraction(1, 2), 1, 2),
    exact_cap: int = 729,
) -> SummabilityProfile:
    """Singular values of [op, S_rho S_sigma*] compressed to grades <= max_grade."""
    from .kernel_oracle import apply_fock_kernel
    from .sheets import monomial_action

    rho, sigma = pair
    if op == "P_F":
        act = apply_fock_kernel
    elif op in D_VARIANTS:
        act = lambda f: _apply_d_variant(op, f, exact_cap)
    else:
        raise ValueError(f"unknown operator {op!r}")

    columns = []
    for g in range(max_grade + 1):
        for grade in _grade_blocks(g):
            for u in orthobasis(n, grade):
                vec = materialize(n, u.coeffs)
                com = act(monomial_action(rho, sigma, vec)) - monomial_action(
                    rho, sigma, act(vec)
                )
                if com:
                    com = _project_to_grades(com, max_grade)
                if com:
                    columns.append((com, u.norm_sq))
    if not columns:
        return SummabilityProfile((), {"kind": "finite_rank", "rank": 0}, {p: 0.0 for p in ps})
    gram = [
        [float(inner(ci, cj)) / math.sqrt(float(ni) * float(nj)) for cj, nj in columns]
        for ci, ni in columns
    ]
    eigs = jacobi_eigenvalues(gram)
    svals = tuple(sorted((math.sqrt(max(v, 0.0)) for v in eigs), reverse=True))
    svals = tuple(s for s in svals if s > 1e-15 * max(svals[0], 1.0)) if svals else ()
    fit = _fit_profile(list(svals))
    schatten = {p: sum(s ** float(p) for s in svals) for p in ps}
    return SummabilityProfile(svals, fit, schatten)


# ---------------------------------------------------------------------------
# rank comparison against the Fock projection


def projection_compare(variant: str, n: int, max_grade: int, exact_cap: int = 729):
    """Per block: nonnegative eigenvalue count minus the Fock dimension.

    Census variants are settled exactly.  For the other variants eigenvalues
    near zero are confirmed by an exact rational kernel computation so the
    reported ranks never hinge on float noise.
    """
    report = []
    total = 0
    for g in range(max_grade + 1):
        for grade in _grade_blocks(g):
            fock = n ** grade.n if grade.k == 0 else 0
            if variant in ("d_kappa", "d_tilde"):
                nonneg = sum(
                    m for lam, m in census_eigenvalues(variant, n, grade) if lam >= 0
                )
            else:
                block = assemble_D(variant, n, grade, exact_cap)
                spec = spectrum(block)
                if spec.exact:
                    nonneg = sum(m for lam, m in spec.pairs if lam >= 0)
                else:
                    scale = max([1.0] + [abs(v) for v, _ in spec.pairs])
                    thr = 1e-9 * (1 + scale)
                    nonneg = sum(m for lam, m in spec.pairs if lam > thr)
                    near = sum(m for lam, m in spec.pairs if abs(lam) <= thr)
                    if near:
                        mat, _ = ortho_matrix(block)
                        zero = rational_kernel_dim(mat)
                        if zero != near:
                            raise AssertionError(
                                f"float zero cluster {near} != exact kernel {zero} in {grade}"
                            )
                        nonneg += zero
            diff = nonneg - fock
            report.append({"n": grade.n, "k": grade.k, "nonneg": nonneg, "fock": fock, "difference": diff})
            total += diff
    return {"blocks": report, "total": total}
