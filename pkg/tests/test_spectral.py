"""Spectral layer: orthogonal span basis, census, eigenvalues, traces."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuntzkit.kernel_oracle import apply_T
from cuntzkit.operators import GradeIndex, assemble_D, build_block
from cuntzkit.sheets import block_basis, inner
from cuntzkit.spectral import (
    block_eigenvalues,
    census_eigenvalues,
    commutator_svd,
    exact_psd,
    frame_gram,
    heat_trace,
    jacobi_eigenvalues,
    materialize,
    ortho_matrix,
    orthobasis,
    pair_count,
    projection_compare,
    rational_kernel_dim,
    span_census,
    span_dim,
    spectrum,
)
from cuntzkit.words import kappa_v, word


def test_census_examples():
    assert span_census(3, GradeIndex(0, 1)) == {0: 2, 1: 6}
    assert span_census(3, GradeIndex(0, 2)) == {0: 6, 1: 12, 2: 54}
    assert span_census(2, GradeIndex(1, 0)) == {0: 2}
    assert span_census(2, GradeIndex(-1, 1)) == {1: 2}
    # span dim = full frame count minus one relation per refinement family
    assert span_dim(3, GradeIndex(0, 2)) == 81 - 9
    assert span_dim(2, GradeIndex(0, 4)) == 256 - 64


@given(
    n=st.sampled_from([2, 3]),
    grade_n=st.integers(min_value=-2, max_value=2),
    k=st.integers(min_value=0, max_value=2),
)
@settings(max_examples=40, deadline=None)
def test_census_matches_enumeration(n, grade_n, k):
    if grade_n + k < 0:
        return
    pairs = block_basis(n, grade_n, k)
    for j in range(k + 1):
        got = sum(1 for mu, nu in pairs if kappa_v(mu, nu) == j)
        assert got == pair_count(n, grade_n, k, j)


@pytest.mark.parametrize("n,grade", [(2, (0, 2)), (3, (0, 1)), (3, (1, 1)), (2, (-1, 2))])
def test_orthobasis_is_orthogonal_with_stated_norms(n, grade):
    basis = orthobasis(n, GradeIndex(*grade))
    census = span_census(n, GradeIndex(*grade))
    counts = {}
    vecs = []
    for u in basis:
        counts[u.stratum] = counts.get(u.stratum, 0) + 1
        vecs.append((materialize(n, u.coeffs), u.norm_sq))
    assert counts == census
    for i, (vi, ni) in enumerate(vecs):
        assert inner(vi, vi) == ni
        for vj, _ in vecs[i + 1 :]:
            assert inner(vi, vj) == 0


def test_helmert_norm_law():
    basis = orthobasis(3, GradeIndex(0, 1))
    helmerts = [u for u in basis if len(u.coeffs) > 1]
    assert [u.norm_sq for u in helmerts] == [Fraction(2, 3), Fraction(6, 3)]


@pytest.mark.parametrize("n", [2, 3])
def test_frame_gram_matches_inners(n):
    pairs = block_basis(n, 0, 2)[: 3 * n]
    for a in pairs:
        for b in pairs:
            va = materialize(n, {a: Fraction(1)})
            vb = materialize(n, {b: Fraction(1)})
            assert frame_gram(n, a, b) == inner(va, vb)


def test_ortho_matrix_matches_direct_pairing():
    block = build_block("T_oracle", 2, GradeIndex(1, 1))
    mat, ortho = ortho_matrix(block)
    for i, ui in enumerate(ortho):
        vi = materialize(2, ui.coeffs)
        for j, uj in enumerate(ortho):
            vj = materialize(2, uj.coeffs)
            assert mat[i][j] == inner(vi, apply_T(vj))
            assert mat[i][j] == mat[j][i]


def test_jacobi_on_known_matrix():
    vals = jacobi_eigenvalues([[-1 / 6, 1 / 2], [1 / 2, -1 / 6]])
    assert vals[0] == pytest.approx(-2 / 3, abs=1e-12)
    assert vals[1] == pytest.approx(1 / 3, abs=1e-12)


def test_spectrum_census_paths():
    spec = spectrum(assemble_D("d_kappa", 2, GradeIndex(1, 0)))
    assert spec.exact and spec.pairs == ((Fraction(1), 2),)
    spec = spectrum(assemble_D("d_tilde", 3, GradeIndex(0, 1)))
    assert spec.pairs == ((Fraction(-1), 2), (Fraction(-2, 3), 6))
    assert census_eigenvalues("d_tilde", 3, GradeIndex(0, 1)) == list(spec.pairs)


def test_spectrum_of_oracle_block():
    spec = spectrum(build_block("T_oracle", 3, GradeIndex(0, 1)))
    assert not spec.exact
    got = [(round(v, 9), m) for v, m in spec.pairs]
    assert got == [(0.0, 3), (1.0, 3), (1.5, 2)]


def test_spectrum_of_printed_dirac_block():
    spec = spectrum(assemble_D("d_paper", 3, GradeIndex(0, 1)))
    got = [(round(v, 9), m) for v, m in spec.pairs]
    assert got == [(-1.5, 2), (round(-2 / 3, 9), 3), (round(1 / 3, 9), 3)]


@pytest.mark.parametrize("n,grade", [(2, (0, 1)), (2, (1, 1)), (3, (0, 1)), (2, (0, 2))])
def test_oracle_blocks_exactly_psd(n, grade):
    mat, _ = ortho_matrix(build_block("T_oracle", n, GradeIndex(*grade)))
    assert exact_psd(mat)


def test_printed_t_block_not_psd():
    mat, _ = ortho_matrix(build_block("T_paper", 3, GradeIndex(0, 1)))
    assert not exact_psd(mat)


def test_rational_kernel_dim_counts_zero_modes():
    mat, _ = ortho_matrix(build_block("T_oracle", 3, GradeIndex(0, 1)))
    assert rational_kernel_dim(mat) == 3
    # at alphabet size 2 a k=1 father is the sheet indicator, hence a zero mode
    mat, _ = ortho_matrix(build_block("T_oracle", 2, GradeIndex(1, 1)))
    assert rational_kernel_dim(mat) == 4


def test_heat_trace_hand_value():
    rows = heat_trace("d_kappa", [1.0], 2, 1)
    t = rows[0]
    expected = 1 + 2 * math.exp(-1.0) + 2 * math.exp(-4.0)
    assert t["partial_trace"] == pytest.approx(expected, rel=1e-14)
    assert t["tail_bound"] > 0
    assert t["tail_bound_strict"] >= t["tail_bound"]


def test_heat_trace_monotone_in_grade_and_tail_small():
    prev = None
    for g in range(0, 7, 2):
        row = heat_trace("d_tilde", [1.0], 2, g)[0]
        if prev is not None:
            assert row["partial_trace"] > prev
        prev = row["partial_trace"]
    row = heat_trace("d_tilde", [1.0], 2, 6)[0]
    assert row["tail_bound"] < 1e-6 * row["partial_trace"]


def test_block_eigenvalues_float_variant():
    pairs = block_eigenvalues("d_paper", 3, GradeIndex(0, 1))
    assert sum(m for _, m in pairs) == 8


def test_fock_commutator_is_rank_one():
    prof = commutator_svd("P_F", (word("1"), ()), 2, 4)
    assert len(prof.s_values) == 1
    assert prof.s_values[0] == pytest.approx(2 ** -0.5, abs=1e-12)
    assert prof.fit["kind"] == "finite_rank" and prof.fit["rank"] == 1
    assert prof.schatten[1] == pytest.approx(2 ** -0.5, abs=1e-12)


def test_fock_commutator_stable_under_grade():
    a = commutator_svd("P_F", (word("1"), ()), 2, 3)
    b = commutator_svd("P_F", (word("1"), ()), 2, 5)
    sa = a.schatten[Fraction(1, 2)]
    sb = b.schatten[Fraction(1, 2)]
    assert abs(sa - sb) < 1e-12


def test_dirac_commutator_bounded_profile():
    prof = commutator_svd("d_tilde", (word("1"), ()), 2, 3)
    assert prof.s_values, "graded shift must not commute with the Dirac variant"
    assert prof.s_values[0] <= 3.0
    assert all(x >= y for x, y in zip(prof.s_values, prof.s_values[1:]))


@pytest.mark.parametrize("variant", ["d_kappa", "d_tilde"])
@pytest.mark.parametrize("n", [2, 3])
def test_projection_compare_census_variants_vanish(variant, n):
    out = projection_compare(variant, n, 4)
    assert out["total"] == 0
    assert all(row["difference"] == 0 for row in out["blocks"])


def test_projection_compare_printed_variant_sees_excess():
    out = projection_compare("d_paper", 3, 2)
    rows = {(r["n"], r["k"]): r["difference"] for r in out["blocks"]}
    assert rows[(0, 0)] == 0 and rows[(1, 0)] == 0
    assert rows[(0, 1)] == 3


def test_projection_compare_oracle_counts_zero_modes():
    out = projection_compare("d_oracle", 2, 2)
    rows = {(r["n"], r["k"]): r["difference"] for r in out["blocks"]}
    # the kernel of the block operator shows up as nonnegative modes
    assert rows[(0, 1)] == 2
