"""Verdicts pitting printed closed forms against the exact oracle.

Every check evaluates a claimed formula and the corresponding value computed
from first principles on the exact rational model, then records witnesses.
A witness holds the claimed value (field ``paper``), the computed value
(field ``oracle``), and an exact rational ``residual``: the difference
``oracle - paper`` for scalar comparisons, or a squared defect norm when two
vectors are compared (the verdict's scope string says which).  A verdict is
``verified`` when every witness residual is zero, ``refuted`` when none are,
and ``mixed`` otherwise, so a nonzero residual is a counterexample rather
than a rounding artifact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import __version__
from .cylinder import CylinderFunction, annulus
from .kernel_oracle import apply_T, paper_volumes
from .operators import DIAGONAL_RULES, ResourceCapExceeded, build_block
from .sheets import (
    GroupoidVector,
    Sheet,
    block_basis,
    chi_vector,
    domain_indicator,
    e_vector,
    gen_action,
    inner,
)
from .spectral import exact_psd, materialize, ortho_matrix
from .states import matrix_element_direct, matrix_element_formula
from .words import (
    EMPTY,
    Word,
    kappa_v,
    prefix_compatible,
    strip,
    tail,
    text,
    words_of_length,
    words_up_to,
)


@dataclass
class Verdict:
    id: str
    status: str
    scope: str
    witnesses: list

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "status": self.status,
            "scope": self.scope,
            "witnesses": self.witnesses,
        }


def _frac(x) -> str:
    return str(Fraction(x))


def _wname(w: Word) -> str:
    return text(w) or "-"


def _pair_name(mu: Word, nu: Word) -> str:
    return f"e({_wname(mu)},{_wname(nu)})"


def _witness(name: str, paper, oracle) -> dict:
    paper, oracle = Fraction(paper), Fraction(oracle)
    return {
        "input": name,
        "paper": _frac(paper),
        "oracle": _frac(oracle),
        "residual": _frac(oracle - paper),
    }


def _collect(vid: str, scope: str, rows, keep_zero=None, keep_nonzero=None) -> Verdict:
    """Fold witnesses into a Verdict; status always reflects the full row set."""
    bad = [w for w in rows if Fraction(w["residual"]) != 0]
    good = [w for w in rows if Fraction(w["residual"]) == 0]
    status = "verified" if not bad else ("refuted" if not good else "mixed")
    if keep_nonzero is not None:
        bad = bad[:keep_nonzero]
    if keep_zero is not None:
        good = good[:keep_zero]
    return Verdict(vid, status, scope, bad + good)


def _blocks_up_to(max_grade: int):
    for g in range(max_grade + 1):
        for k in range(g + 1):
            yield g - 2 * k, k


def _pairs_up_to(n: int, max_grade: int) -> list:
    out = []
    for gn, k in _blocks_up_to(max_grade):
        out.extend(block_basis(n, gn, k))
    return out


def _matched(mu: Word, nu: Word) -> bool:
    return bool(nu) and tail(mu) == tail(nu)


def _nu_bar(nu: Word, j: int) -> Word:
    # first j letters, saturating at the full word
    return nu if j >= len(nu) else nu[:j]


# ---------------------------------------------------------------------------
# structural suite


def _sheet_index_multiply(f: GroupoidVector) -> GroupoidVector:
    out = GroupoidVector.zero(f.n)
    for sheet, part in sorted(f.parts.items()):
        if sheet.k:
            out = out + GroupoidVector(f.n, {sheet: part * Fraction(sheet.k)})
    return out


def _brute_kappa(mu: Word, nu: Word, z: Word) -> int:
    """Cocycle value on the pair (mu+z, nu+z) by direct suffix matching.

    Finite words make the comparison exact: both suffixes have the same
    length, so no truncation can fake an equality.
    """
    x, y = mu + z, nu + z
    shift = len(mu) - len(nu)
    for j in range(max(0, -shift), len(y) + 1):
        if x[shift + j:] == y[j:]:
            return j
    raise AssertionError("suffixes must agree once the appended tail is reached")


def _norm_law_rows(n: int, grade: int) -> list:
    rows = []
    for mu, nu in _pairs_up_to(n, grade):
        law = Fraction(1, n ** len(nu))
        if _matched(mu, nu):
            law *= Fraction(n - 1, n)
        rows.append(_witness(f"|{_pair_name(mu, nu)}|^2", law, e_vector(n, mu, nu)[1]))
    return rows


def _orthogonality_rows(n: int, grade: int) -> list:
    rows = []
    for gn, k in _blocks_up_to(grade):
        basis = block_basis(n, gn, k)
        es = [e_vector(n, mu, nu)[0] for mu, nu in basis]
        for a, b in combinations(range(len(basis)), 2):
            name = f"<{_pair_name(*basis[a])},{_pair_name(*basis[b])}>"
            rows.append(_witness(name, 0, inner(es[a], es[b])))
    return rows


def _weight_rows(n: int, grade: int) -> list:
    blocks = list(_blocks_up_to(grade))
    rows = []
    for (g1, k1), (g2, k2) in combinations(blocks, 2):
        b1, b2 = block_basis(n, g1, k1)[:2], block_basis(n, g2, k2)[:2]
        for pa in b1:
            for pb in b2:
                name = f"<{_pair_name(*pa)},{_pair_name(*pb)}>"
                rows.append(_witness(name, 0, inner(e_vector(n, *pa)[0], e_vector(n, *pb)[0])))
    return rows


def _cuntz_rows(n: int, grade: int) -> list:
    rows = []
    pairs = _pairs_up_to(n, grade)
    for mu, nu in pairs:
        e, _ = e_vector(n, mu, nu)
        name = _pair_name(mu, nu)
        total = GroupoidVector.zero(n)
        for i in range(1, n + 1):
            total = total + gen_action(i, gen_action(i, e, adjoint=True))
            for j in range(1, n + 1):
                w = gen_action(i, gen_action(j, e), adjoint=True)
                d = w - e if i == j else w
                rows.append(_witness(f"|(S{i}*S{j} - d{i}{j}){name}|^2", 0, inner(d, d)))
        d = total - e
        rows.append(_witness(f"|(sum SiSi* - 1){name}|^2", 0, inner(d, d)))
    for (pa, pb) in list(zip(pairs, pairs[1:]))[:40]:
        ea, eb = e_vector(n, *pa)[0], e_vector(n, *pb)[0]
        lhs = inner(gen_action(1, ea), eb)
        rhs = inner(ea, gen_action(1, eb, adjoint=True))
        rows.append(_witness(f"<S1 {_pair_name(*pa)},{_pair_name(*pb)}> adjoint", 0, lhs - rhs))
    return rows


def _kappa_diag_rows(n: int, grade: int) -> list:
    rows = []
    for mu, nu in _pairs_up_to(n, grade):
        e, _ = e_vector(n, mu, nu)
        d = _sheet_index_multiply(e) - e * Fraction(kappa_v(mu, nu))
        rows.append(_witness(f"|(kG - kV){_pair_name(mu, nu)}|^2", 0, inner(d, d)))
    return rows


def _cocycle_rows(n: int, grade: int) -> list:
    rows = []
    tails = list(words_up_to(n, 2))
    for mu, nu in _pairs_up_to(n, grade):
        for z in tails:
            name = f"kappa mu={_wname(mu)} nu={_wname(nu)} z={_wname(z)}"
            rows.append(_witness(name, kappa_v(mu, nu), _brute_kappa(mu, nu, z)))
    return rows


def _dispersion_rows(n: int, grade: int, exact_cap: int):
    matched_rows, commut_rows = [], []
    for gn, k in _blocks_up_to(grade):
        bb = build_block("B", n, (gn, k), exact_cap=exact_cap)
        basis = block_basis(n, gn, k)
        for a, (mu, nu) in enumerate(basis):
            if _matched(mu, nu):
                wobble = sum(c * c for c in bb.entries[a])
                matched_rows.append(_witness(f"|B row {_pair_name(mu, nu)}|^2", 0, wobble))
        for name in ("kappa", "kappa_g", "c"):
            diag = [DIAGONAL_RULES[name](mu, nu, n) for mu, nu in basis]
            defect = Fraction(0)
            for a in range(len(basis)):
                row = bb.entries[a]
                for b in range(len(basis)):
                    if row[b]:
                        defect += (row[b] * (diag[b] - diag[a])) ** 2
            commut_rows.append(_witness(f"|[B,{name}]|^2 block ({gn},{k})", 0, defect))
    return matched_rows, commut_rows


def _positivity_rows(n: int, grade: int) -> list:
    rows = []
    for mu, nu in _pairs_up_to(n, grade):
        e, _ = e_vector(n, mu, nu)
        q = inner(e, apply_T(e))
        rows.append(_witness(f"min(<e,Te>,0) {_pair_name(mu, nu)}", 0, min(q, Fraction(0))))
    return rows


def _psd_rows(n: int, grade: int, exact_cap: int) -> list:
    rows = []
    for gn, k in _blocks_up_to(grade):
        block = build_block("T_oracle", n, (gn, k), exact_cap=exact_cap)
        s0, _ = ortho_matrix(block)
        rows.append(_witness(f"psd block ({gn},{k})", 1, int(exact_psd(s0))))
    return rows


def _mode_rows(n: int, grade: int) -> list:
    rows = []
    for mu, nu in _pairs_up_to(n, grade):
        e, _ = e_vector(n, mu, nu)
        d = apply_T(e, mode="sphere") - apply_T(e, mode="direct")
        rows.append(_witness(f"|(T_sphere - T_direct){_pair_name(mu, nu)}|^2", 0, inner(d, d)))
    return rows


def _opineq_rows(n: int, grade: int) -> list:
    rows = []
    for mu, nu in _pairs_up_to(n, grade):
        kap = DIAGONAL_RULES["kappa"](mu, nu, n)
        tt = DIAGONAL_RULES["T_tilde"](mu, nu, n)
        ac = DIAGONAL_RULES["abs_c"](mu, nu, n)
        low = (1 - Fraction(1, n)) * kap
        gaps = (low, tt - low, kap - tt, ac + low)
        violation = sum(max(Fraction(0), -g) for g in gaps)
        rows.append(_witness(f"opineq {_pair_name(mu, nu)}", 0, violation))
    return rows


def _sign_rows(n: int, grade: int) -> list:
    rows = []
    for mu, nu in _pairs_up_to(n, grade):
        p = DIAGONAL_RULES["P_F"](mu, nu, n)
        val = (2 * p - 1) * DIAGONAL_RULES["abs_c"](mu, nu, n) - DIAGONAL_RULES["T_tilde"](mu, nu, n)
        violation = max(Fraction(0), -((2 * p - 1) * val))
        rows.append(_witness(f"sign {_pair_name(mu, nu)}", 0, violation))
    return rows


def structural_suite(n: int, max_grade: int, exact_cap: int = 729) -> list[Verdict]:
    """Exact checks of the frame and operator structure, one verdict each."""
    g4, g3, g6 = min(max_grade, 4), min(max_grade, 3), min(max_grade, 6)
    matched_rows, commut_rows = _dispersion_rows(n, g4, exact_cap)

    def scope(g: int, what: str) -> str:
        return f"N={n}, pairs |mu|+|nu| <= {g}; {what}"

    return [
        _collect("basis.norms", scope(g6, "squared norm vs the stated norm law"),
                 _norm_law_rows(n, g6), keep_zero=6, keep_nonzero=16),
        _collect("basis.orthogonality", scope(g4, "pairwise inner products within each weight space"),
                 _orthogonality_rows(n, g4), keep_zero=6, keep_nonzero=16),
        _collect("basis.weights", scope(g3, "inner products across distinct weight spaces (two vectors each)"),
                 _weight_rows(n, g3), keep_zero=6, keep_nonzero=16),
        _collect("cuntz.relations", scope(g3, "isometry relations, completeness, and adjointness defects"),
                 _cuntz_rows(n, g3), keep_zero=6, keep_nonzero=16),
        _collect("kappa_g.diagonal", scope(g4, "sheet-index multiplication vs the pair cocycle value"),
                 _kappa_diag_rows(n, g4), keep_zero=6, keep_nonzero=16),
        _collect("kappa_g.cocycle", scope(g3, "closed-form cocycle vs suffix matching on extended finite words"),
                 _cocycle_rows(n, g3), keep_zero=6, keep_nonzero=16),
        _collect("dispersion.matched", scope(g4, "dispersion rows vanish on matched-tail pairs"),
                 matched_rows, keep_zero=6, keep_nonzero=16),
        _collect("dispersion.commutation", scope(g4, "commutators of the dispersion with the diagonal charges"),
                 commut_rows, keep_zero=6, keep_nonzero=16),
        _collect("oracle.positivity", scope(g4, "negative part of the oracle quadratic form"),
                 _positivity_rows(n, g4), keep_zero=6, keep_nonzero=16),
        _collect("oracle.psd", scope(g3, "exact positive semidefiniteness of each oracle block"),
                 _psd_rows(n, g3, exact_cap), keep_zero=6, keep_nonzero=16),
        _collect("oracle.modes", scope(g3, "sphere-integral vs direct-kernel evaluation of the oracle"),
                 _mode_rows(n, g3), keep_zero=6, keep_nonzero=16),
        _collect("opineq.chain", scope(max_grade, "operator inequality chains on diagonal values"),
                 _opineq_rows(n, max_grade), keep_zero=6, keep_nonzero=16),
        _collect("dirac.sign", scope(max_grade, "diagonal sign pattern of the reflected Dirac candidate"),
                 _sign_rows(n, max_grade), keep_zero=6, keep_nonzero=16),
    ]


# ---------------------------------------------------------------------------
# action of T: diagonal, off-diagonal, expansion formula, column norms


def _t_rows(n: int, max_grade: int, exact_cap: int) -> list:
    rows = []
    for gn, k in _blocks_up_to(max_grade):
        basis = block_basis(n, gn, k)
        tp = build_block("T_paper", n, (gn, k), exact_cap=exact_cap)
        bb = build_block("B", n, (gn, k), exact_cap=exact_cap)
        for a, (mu, nu) in enumerate(basis):
            e, nsq = e_vector(n, mu, nu)
            oracle_vec = apply_T(e)
            paper_vec = materialize(
                n, {basis[b]: c for b, c in enumerate(tp.entries[a]) if c})
            diag_o = inner(e, oracle_vec) / nsq
            diag_p = inner(e, paper_vec) / nsq
            off_o = oracle_vec - e * diag_o
            off_p = paper_vec - e * diag_p
            doff = off_o - off_p
            b_vec = materialize(
                n, {basis[b]: c for b, c in enumerate(bb.entries[a]) if c})
            col_paper = Fraction(0)
            if nu and not _matched(mu, nu):
                col_paper = Fraction(n, (n - 1) ** 2) * (1 - Fraction(1, n ** len(nu)))
            rows.append({
                "mu": mu,
                "nu": nu,
                "diag_paper": diag_p,
                "diag_oracle": diag_o,
                "off_paper_sq": inner(off_p, off_p) / nsq,
                "off_oracle_sq": inner(off_o, off_o) / nsq,
                "off_residual_sq": inner(doff, doff) / nsq,
                "col_paper": col_paper,
                "col_oracle": inner(b_vec, b_vec) / nsq,
            })
    return rows


def _expansion_prediction(n: int, mu: Word, nu: Word) -> GroupoidVector:
    """The printed expansion of (1 - 1/N) T chi_{mu,nu}, taken literally.

    Terms are accumulated as cylinder-prefix coefficients per sheet and
    expanded once, which is sums of indicators in disguise but much cheaper
    than repeated vector arithmetic.
    """
    kv = kappa_v(mu, nu)
    mu0 = mu[: len(mu) - len(nu) + kv]
    terms: dict = {}

    def put(sheet: Sheet, pref: Word, c: Fraction) -> None:
        bucket = terms.setdefault(sheet, {})
        bucket[pref] = bucket.get(pref, Fraction(0)) + c

    for gamma in words_of_length(n, kv):
        if kappa_v(mu, gamma) != kv:
            continue
        sheet = Sheet(*strip(mu0, gamma))
        for ell in range(len(nu)):
            coeff = Fraction(n ** ell, n ** len(nu))
            for pref, sgn in ((_nu_bar(nu, ell + 1), 1), (_nu_bar(nu, ell), -1)):
                if prefix_compatible(gamma, pref):
                    longer = gamma if len(gamma) >= len(pref) else pref
                    put(sheet, longer, sgn * coeff)
    put(Sheet(*strip(mu, nu)), nu,
        Fraction(n - 1, n) * (len(nu) - Fraction(kv, n)))
    parts = {}
    for sheet, coeffs in sorted(terms.items()):
        d = max(map(len, coeffs))
        vals = [sum((coeffs.get(w[:j], Fraction(0)) for j in range(d + 1)), Fraction(0))
                for w in words_of_length(n, d)]
        f = CylinderFunction(n, d, vals)
        if f:
            parts[sheet] = f
    return GroupoidVector(n, parts)


def adjudicate_T(n: int, max_grade: int, exact_cap: int = 729) -> list[Verdict]:
    """Compare the printed action of T against the oracle, piece by piece.

    The comparison is between actions on basis vectors: the oracle image and
    the printed row are materialized as vectors, split into a Rayleigh
    diagonal and the remainder, and each piece gets its own verdict.  The
    printed expansion of T on plain pair indicators and the printed
    dispersion column-norm law are adjudicated alongside.
    """
    rows = _t_rows(n, max_grade, exact_cap)
    diag_w, off_w, col_w, tch_w = [], [], [], []
    for r in rows:
        name = _pair_name(r["mu"], r["nu"])
        diag_w.append(_witness(name, r["diag_paper"], r["diag_oracle"]))
        off_w.append({
            "input": name,
            "paper": _frac(r["off_paper_sq"]),
            "oracle": _frac(r["off_oracle_sq"]),
            "residual": _frac(r["off_residual_sq"]),
        })
        col_w.append(_witness(f"|B {name}|^2", r["col_paper"], r["col_oracle"]))
    for mu, nu in _pairs_up_to(n, max_grade):
        pred = _expansion_prediction(n, mu, nu)
        actual = apply_T(chi_vector(n, mu, nu)) * Fraction(n - 1, n)
        diff = actual - pred
        tch_w.append({
            "input": f"chi({_wname(mu)},{_wname(nu)})",
            "paper": _frac(inner(pred, pred)),
            "oracle": _frac(inner(actual, actual)),
            "residual": _frac(inner(diff, diff)),
        })
    base = f"N={n}, pairs |mu|+|nu| <= {max_grade}"
    return [
        _collect("bigtcomp.diagonal",
                 f"{base}; Rayleigh diagonal of the oracle action vs the printed row; residual = oracle - paper",
                 diag_w),
        _collect("bigtcomp.offdiagonal",
                 f"{base}; squared norms of each off-diagonal part; residual = squared norm of their difference",
                 off_w),
        _collect("tchimunu",
                 f"{base}; squared norms of the printed expansion and the scaled oracle image of the pair indicator; "
                 "residual = squared norm of their difference",
                 tch_w),
        _collect("displem.colnorm",
                 f"{base}; |B e|^2 / |e|^2 vs the printed column-norm law",
                 col_w),
    ]


# ---------------------------------------------------------------------------
# sphere and overlap measures


def adjudicate_volumes(n: int, depth: int, exact_cap: int = 729) -> list[Verdict]:
    """Compare the printed sphere and overlap measures with direct integrals.

    Inside the strip the three printed cases are checked against the measure
    of the annulus minus its in-strip part; any printed value exceeding the
    total mass of the sheet domain is flagged on its witness.  Outside the
    strip the printed indicator expansion is evaluated cell by cell on the
    strip sheet, on every sheet its indicators name, and on the base sheet.
    """
    if n ** (depth + 1) > exact_cap:
        raise ResourceCapExceeded(f"volume scan at depth {depth} exceeds cap {exact_cap}")
    in_rows = {"lemmab.case1": [], "lemmab.case2": [], "lemmab.case3": []}
    out_rows = []
    for mu, nu in _pairs_up_to(n, depth):
        if not nu:
            continue
        kv = kappa_v(mu, nu)
        mu0, k = strip(mu, nu)
        sheet = Sheet(mu0, k)
        u = domain_indicator(n, sheet)
        sheet_mass = u.integrate()
        in_strip = CylinderFunction.chi(n, nu) * u
        base = nu + (1,)
        for ell in range(len(nu) + 1):
            ring = annulus(n, base, ell)
            oracle = (ring * u).integrate() - (ring * in_strip).integrate()
            paper = paper_volumes(n, mu, nu, ell, "in")
            w = _witness(f"mu={_wname(mu)} nu={_wname(nu)} ell={ell}", paper, oracle)
            if paper > sheet_mass:
                w["flag"] = f"exceeds sheet mass {_frac(sheet_mass)}"
            if ell >= len(nu):
                in_rows["lemmab.case1"].append(w)
            elif ell >= kv:
                in_rows["lemmab.case2"].append(w)
            else:
                in_rows["lemmab.case3"].append(w)
        gammas = [g for g in words_of_length(n, kv) if kappa_v(mu, g) == kv]
        sheets = {sheet, Sheet(EMPTY, 0)} | {Sheet(*strip(mu0, g)) for g in gammas}
        coeff = paper_volumes(n, mu, nu, 0, "out")
        d = len(nu) + 1
        for s in sorted(sheets):
            us = domain_indicator(n, s)
            on_strip = s == sheet
            for w in words_of_length(n, d):
                if us.value_on(w) != 1:
                    continue
                if on_strip and w[: len(nu)] == nu:
                    continue  # inside the strip; the in-strip cases cover it
                gw = w[:kv]
                fired = int(kappa_v(mu, gw) == kv and Sheet(*strip(mu0, gw)) == s)
                for ell in range(len(nu) + 1):
                    nb0, nb1 = _nu_bar(nu, ell), _nu_bar(nu, ell + 1)
                    paper = coeff * fired * (
                        int(w[: len(nb0)] == nb0) - int(w[: len(nb1)] == nb1))
                    oracle = Fraction(0)
                    if on_strip:
                        oracle = (annulus(n, w, ell) * in_strip).integrate()
                    name = (f"mu={_wname(mu)} nu={_wname(nu)} "
                            f"sheet=({_wname(s.mu0)},{s.k}) cell={_wname(w)} ell={ell}")
                    out_rows.append(_witness(name, paper, oracle))
    base_scope = f"N={n}, pairs |mu|+|nu| <= {depth} with nu nonempty"
    verdicts = [_collect(
        "lemmaa",
        f"{base_scope}; cells of depth |nu|+1 outside the strip, radii ell <= |nu|",
        out_rows, keep_zero=16, keep_nonzero=32)]
    for case in ("lemmab.case1", "lemmab.case2", "lemmab.case3"):
        verdicts.append(_collect(
            case, f"{base_scope}; base point inside the strip, radii ell <= |nu|",
            in_rows[case]))
    return verdicts


# ---------------------------------------------------------------------------
# matrix elements of monomials


def adjudicate_matrix_elements(n: int, max_grade: int, exact_cap: int = 729) -> Verdict:
    """Closed-form monomial matrix elements vs direct GNS computation."""
    rows = []
    ws = list(words_up_to(n, 2))
    off_pairs = list(combinations(ws[1 : n + 3], 2))[:6]
    for mu, nu in _pairs_up_to(n, max_grade):
        name = _pair_name(mu, nu)
        for rho in ws:
            rows.append(_witness(
                f"{name} rho={_wname(rho)} sigma={_wname(rho)}",
                matrix_element_formula(n, mu, nu, rho, rho),
                matrix_element_direct(n, mu, nu, rho, rho)))
        for rho, sigma in off_pairs:
            rows.append(_witness(
                f"{name} rho={_wname(rho)} sigma={_wname(sigma)}",
                matrix_element_formula(n, mu, nu, rho, sigma),
                matrix_element_direct(n, mu, nu, rho, sigma)))
    scope = (f"N={n}, pairs |mu|+|nu| <= {max_grade}; monomial words up to length 2, "
             "diagonal and mismatched")
    return _collect("matrix_element", scope, rows, keep_zero=64, keep_nonzero=64)


# ---------------------------------------------------------------------------
# correction fitting


_FIT_FEATURES = (
    ("const", lambda n, mu, nu: Fraction(1)),
    ("len_nu", lambda n, mu, nu: Fraction(len(nu))),
    ("kv", lambda n, mu, nu: Fraction(kappa_v(mu, nu))),
    ("matched", lambda n, mu, nu: Fraction(int(_matched(mu, nu)))),
    ("kv_pos", lambda n, mu, nu: Fraction(int(kappa_v(mu, nu) >= 1))),
    ("kv_pos_matched", lambda n, mu, nu: Fraction(int(kappa_v(mu, nu) >= 1 and _matched(mu, nu)))),
    ("kv_ge2_matched", lambda n, mu, nu: Fraction(int(kappa_v(mu, nu) >= 2 and _matched(mu, nu)))),
    ("kv_matched", lambda n, mu, nu: Fraction(kappa_v(mu, nu) * int(_matched(mu, nu)))),
)


def _strip_rule(n: int, mu: Word, nu: Word) -> Fraction:
    """Closed-form candidate for the diagonal defect, keyed on the stripped prefix."""
    kv = kappa_v(mu, nu)
    if kv == 0:
        return Fraction(0)
    if not mu:
        return Fraction(kv, n) + Fraction(1, n - 1)
    if not (nu and tail(mu) == tail(nu)):
        return Fraction(1, n)
    if not strip(mu, nu)[0]:
        return Fraction(kv, n)
    return Fraction(-1, n * (n - 1))


_STRIP_RULE_TEXT = (
    "kv=0 -> 0; mu empty -> kv/N + 1/(N-1); unmatched tails -> 1/N; "
    "stripped prefix empty -> kv/N; else -1/(N(N-1))"
)


def _solve_exact(a: list, b: list):
    """Solve a square rational system; None when singular."""
    d = len(a)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for c in range(d):
        piv = next((r for r in range(c, d) if m[r][c]), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        m[c] = [x / m[c][c] for x in m[c]]
        for r in range(d):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[i][d] for i in range(d)]


def _fit_one(xs: list, y: list):
    """Least-structure exact least squares over feature subsets.

    Tries subsets of at most three features, smallest first, and stops at the
    first exact interpolation; otherwise keeps the smallest subset minimizing
    the exact sum of squared errors.
    """
    names = [name for name, _ in _FIT_FEATURES]
    best = None
    for size in range(4):
        for idx in combinations(range(len(names)), size):
            a = [[sum(xs[p][i] * xs[p][j] for p in range(len(y))) for j in idx] for i in idx]
            rhs = [sum(xs[p][i] * y[p] for p in range(len(y))) for i in idx]
            coeffs = _solve_exact(a, rhs) if idx else []
            if coeffs is None:
                continue
            fitted = [sum((c * xs[p][i] for c, i in zip(coeffs, idx)), Fraction(0))
                      for p in range(len(y))]
            errs = [y[p] - fitted[p] for p in range(len(y))]
            sse = sum((e * e for e in errs), Fraction(0))
            cand = (sse, size, idx, coeffs, errs)
            if best is None or (cand[0], cand[1]) < (best[0], best[1]):
                best = cand
            if sse == 0:
                break
        if best is not None and best[0] == 0:
            break
    sse, _, idx, coeffs, errs = best
    return {
        "terms": {names[i]: _frac(c) for i, c in zip(idx, coeffs)},
        "sse": _frac(sse),
        "exact": sse == 0,
        "max_abs_residual": _frac(max((abs(e) for e in errs), default=Fraction(0))),
    }


def fit_correction(n_values, max_grade: int, pairs=None, exact_cap: int = 729) -> dict:
    """Describe the diagonal discrepancy by an exact least-structure fit.

    The data are the exact Rayleigh-diagonal residuals (oracle minus printed)
    of the T comparison; features are simple functions of |nu|, the cocycle
    value, and the matched-tail flag.  Each model also carries a secondary
    strip_candidate entry checking the piecewise rule keyed on whether the
    stripped common tail leaves an empty prefix.  The result is descriptive
    output only: a zero-residual data set yields the empty model, and nothing
    is ever asserted about either candidate.
    """
    models = {}
    total = nonzero = 0
    for n in n_values:
        rows = _t_rows(n, max_grade, exact_cap)
        if pairs is not None:
            keep = set(pairs)
            rows = [r for r in rows if (r["mu"], r["nu"]) in keep]
        xs = [[f(n, r["mu"], r["nu"]) for _, f in _FIT_FEATURES] for r in rows]
        y = [r["diag_oracle"] - r["diag_paper"] for r in rows]
        total += len(y)
        nonzero += sum(1 for v in y if v)
        model = _fit_one(xs, y)
        model["points"] = len(y)
        model["nonzero_points"] = sum(1 for v in y if v)
        errs = [y_i - _strip_rule(n, r["mu"], r["nu"]) for y_i, r in zip(y, rows)]
        model["strip_candidate"] = {
            "exact": not any(errs),
            "max_abs_residual": _frac(max((abs(e) for e in errs), default=Fraction(0))),
            "rule": _STRIP_RULE_TEXT,
        }
        models[str(n)] = model
    return {
        "max_grade": max_grade,
        "data_points": total,
        "nonzero_points": nonzero,
        "models": models,
    }


# ---------------------------------------------------------------------------
# report assembly


def report(n: int, max_grade: int, exact_cap: int = 729) -> dict:
    """Full adjudication report; deterministic for a fixed configuration."""
    verdicts = list(adjudicate_volumes(n, min(max_grade, 3), exact_cap=exact_cap))
    verdicts.extend(adjudicate_T(n, max_grade, exact_cap=exact_cap))
    verdicts.append(adjudicate_matrix_elements(n, min(max_grade, 3), exact_cap=exact_cap))
    return {
        "meta": {"N": n, "max_grade": max_grade, "version": __version__},
        "verdicts": [v.to_dict() for v in verdicts],
    }
