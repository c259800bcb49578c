"""Structure-constant, form and Casimir checks for every algebra family."""

import json
from fractions import Fraction

import pytest

from superarc.errors import DegenerateFormError, UsageError
from superarc.liesuper import (EVEN, ODD, AlgebraVector, adjoint_casimir_matrix,
                               bracket, build_algebra, dual_basis, form)

ALGEBRAS = [
    ("gl", dict(n=2)),
    ("sl", dict(n=2)),
    ("sl", dict(n=3)),
    ("so", dict(m=2)),
    ("so", dict(m=3)),
    ("so", dict(m=5)),
    ("sp", dict(n=1)),
    ("sp", dict(n=2)),
    ("osp", dict(m=1, n=1)),
    ("osp", dict(m=2, n=1)),
    ("osp", dict(m=1, n=2)),
    ("osp", dict(m=3, n=1)),
    ("osp", dict(m=0, n=1)),
    ("sl_super", dict(r=2, m=1)),
    ("sl_super", dict(r=3, m=1)),
    ("sl_super", dict(r=2, m=0)),
]


@pytest.fixture(scope="module")
def algebras():
    return [build_algebra(fam, **kw) for fam, kw in ALGEBRAS]


def test_dimension_examples():
    sp2 = build_algebra("sp", n=1)
    assert (sp2.dim_even, sp2.dim_odd) == (3, 0)
    osp12 = build_algebra("osp", m=1, n=1)
    assert (osp12.dim_even, osp12.dim_odd) == (3, 2)
    assert osp12.sdim == 1
    assert build_algebra("so", m=1).dim == 0
    assert build_algebra("so", m=0).dim == 0
    osp14 = build_algebra("osp", m=1, n=2)
    assert (osp14.dim_even, osp14.dim_odd) == (10, 4)
    sl21 = build_algebra("sl_super", r=2, m=1)
    assert (sl21.dim_even, sl21.dim_odd) == (4, 4)


def test_dual_coxeter_values():
    assert build_algebra("sp", n=1).h_dual == 2
    assert build_algebra("osp", m=1, n=1).h_dual == Fraction(3, 2)
    assert build_algebra("osp", m=1, n=2).h_dual == Fraction(5, 2)
    assert build_algebra("sl_super", r=2, m=1).h_dual == 1
    assert build_algebra("so", m=5).h_dual == 3


def test_super_skew_symmetry_exhaustive(algebras):
    for g in algebras:
        for (i, j), comps in g.structure.items():
            sign = -1 if not (g.parity(i) and g.parity(j)) else 1
            back = g.bracket_basis(j, i)
            for k, c in comps.items():
                assert back.get(k, Fraction(0)) == sign * c, (g.name, i, j, k)


def test_super_jacobi_exhaustive(algebras):
    for g in algebras:
        if g.dim > 16:      # keep the cubic loop affordable; families overlap
            continue
        basis = [g.basis_vector(i) for i in range(g.dim)]
        for i in range(g.dim):
            for j in range(g.dim):
                sign = -1 if (g.parity(i) and g.parity(j)) else 1
                for k in range(g.dim):
                    lhs = bracket(basis[i], bracket(basis[j], basis[k]))
                    rhs = bracket(bracket(basis[i], basis[j]), basis[k]) + \
                        Fraction(sign) * bracket(basis[j], bracket(basis[i], basis[k]))
                    assert lhs.coeffs == rhs.coeffs, (g.name, i, j, k)


def test_form_invariance_exhaustive(algebras):
    for g in algebras:
        basis = [g.basis_vector(i) for i in range(g.dim)]
        for i in range(g.dim):
            for j in range(g.dim):
                for k in range(g.dim):
                    assert form(bracket(basis[i], basis[j]), basis[k]) == \
                        form(basis[i], bracket(basis[j], basis[k])), (g.name, i, j, k)


def test_form_is_even(algebras):
    for g in algebras:
        for i in range(g.dim):
            for j in range(g.dim):
                if g.parity(i) != g.parity(j):
                    assert g.form[i][j] == 0


def test_casimir_acts_by_twice_dual_coxeter(algebras):
    for g in algebras:
        if g.dim == 0 or g.family == "gl":
            continue
        if g.family == "sl_super" and g.params[0] == g.params[1]:
            continue
        C = adjoint_casimir_matrix(g)
        target = 2 * g.h_dual
        for i in range(g.dim):
            for j in range(g.dim):
                assert C[i][j] == (target if i == j else 0), (g.name, i, j)


def test_sp2_bracket_against_matrix_oracle():
    # independent oracle: 2x2 commutators of e, f, h
    e = [[0, 1], [0, 0]]
    f = [[0, 0], [1, 0]]
    h = [[1, 0], [0, -1]]

    def comm(a, b):
        prod1 = [[sum(a[i][t] * b[t][j] for t in range(2)) for j in range(2)]
                 for i in range(2)]
        prod2 = [[sum(b[i][t] * a[t][j] for t in range(2)) for j in range(2)]
                 for i in range(2)]
        return [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(prod1, prod2)]

    assert comm(e, f) == h
    g = build_algebra("sp", n=1)
    mats = {b.label: [list(map(Fraction, row)) for row in g.matrices[b.index]]
            for b in g.basis}
    # the model basis spans the same algebra: check [x, y] via coordinates
    for la in mats:
        for lb in mats:
            va = g.basis_vector([b.index for b in g.basis if b.label == la][0])
            vb = g.basis_vector([b.index for b in g.basis if b.label == lb][0])
            br = bracket(va, vb)
            expect = comm(mats[la], mats[lb])
            got = [[sum(c * g.matrices[k][i][j] for k, c in enumerate(br.coeffs))
                    for j in range(2)] for i in range(2)]
            assert got == [[Fraction(x) for x in row] for row in expect]


def test_even_self_bracket_vanishes(algebras):
    for g in algebras:
        for i in range(g.dim):
            if g.parity(i) == EVEN:
                v = g.basis_vector(i)
                assert bracket(v, v).is_zero(), (g.name, i)


def test_osp12_odd_self_bracket_nonzero():
    g = build_algebra("osp", m=1, n=1)
    odd = [i for i in range(g.dim) if g.parity(i) == ODD]
    assert len(odd) == 2
    for i in odd:
        v = g.basis_vector(i)
        assert not bracket(v, v).is_zero()


def test_dual_basis_repairing(algebras):
    for g in algebras:
        if g.dim == 0:
            continue
        if g.family == "sl_super" and g.params[0] == g.params[1]:
            continue
        duals = dual_basis(g)
        for i in range(g.dim):
            for j in range(g.dim):
                assert form(g.basis_vector(i), duals[j]) == (1 if i == j else 0)


def test_sp2_form_normalization():
    # (h, h) = 2 pins the highest-root normalization
    g = build_algebra("sp", n=1)
    h_idx = next(b.index for b in g.basis
                 if abs(g.matrices[b.index][0][0]) == 1
                 and g.matrices[b.index][0][0] == -g.matrices[b.index][1][1])
    assert g.form[h_idx][h_idx] == 2


def test_osp_even_restriction():
    # sp block carries the usual normalized form; so block carries -2 times it
    osp = build_algebra("osp", m=3, n=1)
    sp = build_algebra("sp", n=1)
    so = build_algebra("so", m=3)
    sp_labels = {b.label: b.index for b in sp.basis}
    so_labels = {b.label: b.index for b in so.basis}
    for a in osp.basis:
        for b in osp.basis:
            if a.label in sp_labels and b.label in sp_labels:
                assert osp.form[a.index][b.index] == \
                    sp.form[sp_labels[a.label]][sp_labels[b.label]]
            if a.label in so_labels and b.label in so_labels:
                assert osp.form[a.index][b.index] == \
                    -2 * so.form[so_labels[a.label]][so_labels[b.label]]


def test_osp_sdim_and_h_dual_formulas():
    for m, n in [(1, 1), (2, 1), (1, 2), (3, 1), (2, 2)]:
        g = build_algebra("osp", m=m, n=n)
        assert g.dim_even == m * (m - 1) // 2 + n * (2 * n + 1)
        assert g.dim_odd == 2 * m * n
        assert g.h_dual == Fraction(2 * n + 2 - m, 2)


def test_vector_arithmetic_and_parity():
    g = build_algebra("osp", m=1, n=1)
    even = [i for i in range(g.dim) if g.parity(i) == EVEN]
    odd = [i for i in range(g.dim) if g.parity(i) == ODD]
    assert g.basis_vector(even[0]).parity() == EVEN
    assert g.basis_vector(odd[0]).parity() == ODD
    mixed = g.basis_vector(even[0]) + g.basis_vector(odd[0])
    assert mixed.parity() is None
    assert (2 * g.basis_vector(even[0])).coeffs[even[0]] == 2


def test_mixed_algebra_error():
    a = build_algebra("sp", n=1)
    b = build_algebra("so", m=3)
    with pytest.raises(UsageError):
        bracket(a.basis_vector(0), b.basis_vector(0))


def test_degenerate_form_raises():
    g = build_algebra("sl_super", r=2, m=2)   # supertrace form kills the identity
    with pytest.raises(DegenerateFormError):
        dual_basis(g)


def test_build_errors():
    with pytest.raises(UsageError):
        build_algebra("e8")
    with pytest.raises(UsageError):
        build_algebra("sp", n=-1)
    with pytest.raises(UsageError):
        build_algebra("sp", n=0)
    with pytest.raises(UsageError):
        build_algebra("osp", m=-1, n=1)


def test_json_export_round_trips():
    g = build_algebra("osp", m=1, n=1)
    obj = g.to_json_dict()
    text = json.dumps(obj)
    back = json.loads(text)
    assert back["h_dual"] == "3/2"
    assert len(back["basis"]) == 5
    assert all(len(t) == 4 for t in back["structure"])
    # exact rational round trip through the p/q string encoding
    for i, j, k, c in back["structure"]:
        assert g.bracket_basis(i, j)[k] == Fraction(c)


def test_basis_order_even_first(algebras):
    for g in algebras:
        parities = [b.parity for b in g.basis]
        assert parities == sorted(parities)
