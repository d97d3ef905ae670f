from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cuntzkit.kernel_oracle import (
    SphereSpec,
    apply_T,
    apply_fock_kernel,
    paper_volumes,
    sphere_volume,
)
from cuntzkit.sheets import (
    GroupoidVector,
    Sheet,
    block_decompose,
    chi_vector,
    domain_indicator,
    e_vector,
    inner,
)
from cuntzkit.words import EMPTY, word, words_of_length, words_up_to


def ev(n, mu, nu):
    return e_vector(n, word(mu), word(nu))[0]


def test_sphere_volume_unit_sheet():
    for n in (2, 3):
        for ell in range(3):
            v = sphere_volume(n, SphereSpec(Sheet(EMPTY, 0), word("1121"), ell))
            assert v == Fraction(1, n ** ell) - Fraction(1, n ** (ell + 1))


def test_sphere_volume_pinned_examples():
    # N=3: the excluded letter leaves mass 1/3 at radius 1
    assert sphere_volume(3, SphereSpec(Sheet((1,), 1), word("2"), 0)) == Fraction(1, 3)
    # N=2: every admissible point starts with 2, the sphere at radius 1 is empty
    assert sphere_volume(2, SphereSpec(Sheet((1,), 1), word("2"), 0)) == 0


def test_sphere_volume_rejects_bad_cells():
    with pytest.raises(ValueError):
        sphere_volume(3, SphereSpec(Sheet((1,), 1), word("1"), 0))
    with pytest.raises(ValueError):
        sphere_volume(3, SphereSpec(Sheet(EMPTY, 0), word("1"), 1))


def test_sphere_volume_closed_form():
    # exhaustive truth table on deeper sheets
    for n in (2, 3):
        for k in (1, 2, 3):
            sheet = Sheet((2,), k)
            u = domain_indicator(n, sheet)
            for base in words_of_length(n, k + 1):
                if not u.value_on(base[:k]):
                    continue
                for ell in range(k + 1):
                    got = sphere_volume(n, SphereSpec(sheet, base, ell))
                    if ell >= k:
                        want = Fraction(n - 1, n ** (ell + 1))
                    elif ell == k - 1:
                        want = Fraction(n - 2, n ** (ell + 1))
                    else:
                        want = Fraction((n - 1) ** 2, n ** (ell + 2))
                    assert got == want


def test_paper_volumes_cases():
    assert paper_volumes(3, word("21"), word("31"), 1, "in") == Fraction(2, 9)
    assert paper_volumes(3, word("21"), word("31"), 5, "in") == 0
    assert paper_volumes(3, word("21"), word("31"), 0, "in") == Fraction(4, 3)
    assert paper_volumes(3, word("21"), word("31"), 0, "out") == Fraction(1, 9)
    with pytest.raises(ValueError):
        paper_volumes(3, word("21"), word("31"), 0, "over")


def test_known_oracle_values():
    n = 3
    expectations = [
        (("11", "1"), {("11", "1"): Fraction(3, 2)}),
        (("21", "31"), {("21", "31"): Fraction(2)}),
        (("221", "331"), {("221", "331"): Fraction(8, 3)}),
        (("1", "2"), {("1", "2"): Fraction(1, 2), ("1", "3"): Fraction(-1, 2)}),
        (("211", "11"), {("211", "11"): Fraction(5, 2)}),
        (("12", "22"), {("12", "22"): Fraction(2)}),
        (("1", "21"), {("1", "21"): Fraction(5, 2)}),
        (
            ("", "1"),
            {("", "1"): Fraction(1), ("", "2"): Fraction(-1, 2), ("", "3"): Fraction(-1, 2)},
        ),
        (
            ("2", "21"),
            {
                ("2", "21"): Fraction(7, 6),
                ("2", "23"): Fraction(-1, 2),
                ("2", "11"): Fraction(-1, 6),
                ("2", "13"): Fraction(-1, 6),
                ("2", "31"): Fraction(-1, 6),
                ("2", "33"): Fraction(-1, 6),
            },
        ),
    ]
    for (mu, nu), combo in expectations:
        got = apply_T(ev(n, mu, nu))
        want = GroupoidVector.zero(n)
        for (a, b), c in combo.items():
            want = want + ev(n, a, b) * c
        assert got == want, (mu, nu)


def test_fock_vectors_and_sheet_indicators_in_kernel():
    for n in (2, 3):
        for mu in words_up_to(n, 2):
            assert not apply_T(ev(n, "".join(map(str, mu)), ""))
        for sheet in [Sheet(EMPTY, 0), Sheet((1,), 1), Sheet((1, 2), 1), Sheet(EMPTY, 2)]:
            ind = GroupoidVector(n, {sheet: domain_indicator(n, sheet)})
            assert not apply_T(ind)
            assert not apply_T(ind, mode="direct")


def test_fock_kernel_examples():
    n = 3
    assert apply_fock_kernel(ev(n, "12", "")) == ev(n, "12", "")
    assert not apply_fock_kernel(ev(n, "1", "2"))
    got = apply_fock_kernel(chi_vector(n, word("11"), word("1")))
    assert got == chi_vector(n, word("1"), EMPTY) * Fraction(1, 3)
    for mu in words_up_to(n, 2):
        for nu in words_up_to(n, 2):
            v = e_vector(n, mu, nu)[0]
            once = apply_fock_kernel(v)
            assert apply_fock_kernel(once) == once


def pair_strategy(n, max_len):
    w = st.lists(st.integers(min_value=1, max_value=n), max_size=max_len).map(tuple)
    return st.tuples(w, w)


@given(pair_strategy(2, 2), pair_strategy(2, 2))
@settings(max_examples=40, deadline=None)
def test_mode_agreement_and_symmetry(p, q):
    n = 2
    f = ev(n, *("".join(map(str, w)) for w in p))
    g = ev(n, *("".join(map(str, w)) for w in q))
    tf = apply_T(f)
    assert tf == apply_T(f, mode="direct")
    assert inner(tf, g) == inner(f, apply_T(g))


def quadratic_form(f):
    # (1/2)(1-1/N)^{-1} double integral of (f(y1)-f(y2))^2 N^{|y1 v y2|}
    from cuntzkit.words import common_prefix

    n = f.n
    total = Fraction(0)
    for sheet, part in f.parts.items():
        u = domain_indicator(n, sheet)
        depth = max(part.depth, sheet.k)
        cells = list(words_of_length(n, depth))
        fv = part.at_depth(depth)
        uv = u.at_depth(depth)
        mass = Fraction(1, n ** depth)
        for a, wa in enumerate(cells):
            if not uv[a]:
                continue
            for b, wb in enumerate(cells):
                if b == a or not uv[b]:
                    continue
                total += (fv[a] - fv[b]) ** 2 * Fraction(n) ** len(common_prefix(wa, wb)) * mass * mass
    return total / 2 / (1 - Fraction(1, n))


def test_quadratic_form_identity_and_positivity():
    n = 3
    for mu, nu in [("11", "1"), ("1", "2"), ("2", "21"), ("", "1"), ("21", "31")]:
        f = ev(n, mu, nu)
        val = inner(f, apply_T(f))
        assert val == quadratic_form(f)
        assert val >= 0
    mixed = ev(n, "1", "2") + ev(n, "11", "1") * Fraction(3, 7)
    assert inner(mixed, apply_T(mixed)) == quadratic_form(mixed)


def test_grading_preserved():
    n = 3
    for mu, nu in [("11", "1"), ("1", "2"), ("2", "21"), ("", "1")]:
        f = ev(n, mu, nu)
        comps = block_decompose(apply_T(f))
        mu_w, nu_w = word(mu), word(nu)
        assert set(comps) <= {(len(mu_w) - len(nu_w), len(nu_w))}
