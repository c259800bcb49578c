"""Realization construction, OPE verification, Sugawara and embeddings."""

from dataclasses import replace
from fractions import Fraction

import pytest

from superarc.affine import (AffineRealization, build_realization,
                             central_charge_formula, sugawara,
                             verify_affine_ope, verify_conformal_embedding,
                             verify_coset)
from superarc.errors import (CriticalLevelError, RealizationSolveError,
                             UsageError)
from superarc.fields import central_charge, ope, virasoro_total


@pytest.fixture(scope="module")
def pair111():
    return build_realization("s2", 1, 1, 1)


def test_s2_111_counts_and_levels(pair111):
    inner, coset = pair111.inner, pair111.coset
    assert inner.algebra.name == "sp_2" and len(inner.currents) == 3
    assert inner.level == Fraction(1, 2)
    assert coset.algebra.name == "osp_1|2" and len(coset.currents) == 5
    assert coset.level == 1
    parities = sorted(b.parity for b in coset.algebra.basis)
    assert parities == [0, 0, 0, 1, 1]


def test_s2_111_all_pairs_pass(pair111):
    rep = verify_affine_ope(pair111.coset)
    assert rep.pairs_checked == 25 and rep.ok
    rep = verify_affine_ope(pair111.inner)
    assert rep.pairs_checked == 9 and rep.ok


def test_s2_111_mixed_pairs_regular(pair111):
    rep = verify_coset(pair111)
    assert rep.pairs_checked == 15 and rep.ok


def test_currents_weight_one_and_parity(pair111):
    for real in (pair111.inner, pair111.coset):
        for b in real.algebra.basis:
            x = real.currents[b.index]
            assert x.weight() == 1
            assert x.parity() == b.parity


def test_corrupted_current_is_flagged(pair111):
    bad = dict(pair111.coset.currents)
    bad[0] = 2 * bad[0]
    corrupted = AffineRealization(pair111.coset.algebra, pair111.coset.level,
                                  pair111.coset.ctx, bad)
    rep = verify_affine_ope(corrupted)
    assert not rep.ok
    assert any(f["pair"][0] == 0 or f["pair"][1] == 0 for f in rep.failures)
    # discrepancies are exact fields, not booleans
    assert all(not f["discrepancy"].is_zero() for f in rep.failures)


def test_coset_current_counts_match_pairing_enumeration():
    for n, m, r in [(1, 1, 1), (1, 2, 1), (1, 1, 2), (2, 1, 1)]:
        pair = build_realization("s2", n, m, r)
        expected = m * (m - 1) // 2 + r * (2 * r + 1) + 2 * m * r
        assert len(pair.coset.currents) == expected
        assert expected == pair.coset.algebra.dim


def test_pure_fermionic_degeneration():
    # m = 0 removes the beta-gamma half entirely
    pair = build_realization("s2", 1, 0, 1)
    assert pair.ctx.n_bg == 0 and pair.ctx.n_bc == 2
    assert pair.inner.level == 1 and pair.coset.level == 1
    assert len(pair.coset.currents) == 3     # osp(0|2) = sp_2


def test_sugawara_central_charges(pair111):
    L_inner = sugawara(pair111.inner)
    L_coset = sugawara(pair111.coset)
    assert central_charge(L_inner) == Fraction(3, 5)
    assert central_charge(L_coset) == Fraction(2, 5)
    assert central_charge_formula(pair111.inner) == Fraction(3, 5)
    assert central_charge_formula(pair111.coset) == Fraction(2, 5)


def test_sugawara_critical_level(pair111):
    critical = replace(pair111.coset, level=Fraction(-3, 2))
    with pytest.raises(CriticalLevelError):
        sugawara(critical)


def test_conformal_embedding_identity(pair111):
    rep = verify_conformal_embedding(pair111)
    assert rep.identity_defect.is_zero()
    assert rep.c_inner + rep.c_coset == rep.c_expected == 1
    assert rep.ok


def test_sugawara_vector_is_affine_primary(pair111):
    # ope(L, X) = X/(z-w)^2 + dX/(z-w) for every current of both realizations
    for real in (pair111.inner, pair111.coset):
        L = sugawara(real)
        for x in real.currents.values():
            r = ope(L, x)
            assert r.max_pole == 2
            assert r.pole(2) == x
            assert r.pole(1) == x.derivative()


def test_restriction_to_fewer_copies_reproduces_smaller_realization(pair111):
    # dropping every term that touches the second bosonic copy of the
    # (1,2,1) inner currents recovers the (1,1,1) inner currents
    from superarc.fields import BETA, GAMMA, FieldPoly
    big = build_realization("s2", 1, 2, 1)
    small = pair111
    kept_bg = small.ctx.n_bg

    def restrict(poly):
        terms = {}
        for t, c in poly.terms.items():
            if all(k not in (BETA, GAMMA) or i <= kept_bg for (k, i, d) in t):
                terms[t] = c
        return FieldPoly(small.ctx, terms)

    for i in range(big.inner.algebra.dim):
        assert restrict(big.inner.currents[i]) == small.inner.currents[i]


def test_s1_small_case():
    pair = build_realization("s1", 1, 1, 2)
    assert pair.inner.algebra.name == "gl_1" and pair.inner.level == 1
    assert pair.coset.algebra.name == "sl_2|1" and pair.coset.level == 1
    L_inner = sugawara(pair.inner)
    L_coset = sugawara(pair.coset)
    assert central_charge(L_inner) == 1
    assert central_charge(L_coset) == 0
    rep = verify_conformal_embedding(pair)
    assert rep.ok and rep.c_expected == 1


def test_s1_acceptance_case_levels():
    pair = build_realization("s1", 2, 1, 2)
    assert pair.inner.level == 1 and pair.coset.level == 2
    assert verify_affine_ope(pair.inner).ok
    assert verify_affine_ope(pair.coset).ok
    assert verify_coset(pair).ok


def test_gl_sugawara_against_free_conformal_vector():
    # gl_1 inner + sl(2|1) coset must reassemble L of S(1) x E(2)
    pair = build_realization("s1", 1, 1, 2)
    total = sugawara(pair.inner) + sugawara(pair.coset)
    assert total == virasoro_total(pair.ctx)


def test_bad_parameters():
    with pytest.raises(UsageError):
        build_realization("s3", 1, 1, 1)
    with pytest.raises(UsageError):
        build_realization("s2", 0, 1, 1)
    with pytest.raises(UsageError):
        build_realization("s2", 1, -1, 1)
    with pytest.raises(UsageError):
        build_realization("s2", 1, 1, 0)


def test_verification_failure_raises_on_build(monkeypatch, pair111):
    # sabotage the verifier to show the loud-failure path is wired in
    import superarc.affine as aff

    def broken(real):
        rep = verify_affine_ope(real)
        rep.failures.append({"pair": (0, 0), "defect": "pole_2",
                             "discrepancy": real.currents[0]})
        return rep

    monkeypatch.setattr(aff, "verify_affine_ope", broken)
    with pytest.raises(RealizationSolveError):
        aff.build_realization("s2", 1, 1, 1)
