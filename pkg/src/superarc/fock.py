"""Exact linear algebra on the vacuum Fock module.

States are rational combinations of canonical monomials of negative modes
applied to the vacuum.  Modes are kept in physics normalization: a weight
1/2 generator has modes g_r with r in 1/2 + Z, stored as the doubled
integer 2r; creation modes have r < 0.  The commutation relations

    [beta_r, gamma_s] = delta_{r+s,0},  [gamma_r, beta_s] = -delta_{r+s,0},
    {b_r, c_s} = {c_r, b_s} = delta_{r+s,0}

are applied directly, which makes `act` an oracle for the symbolic OPE
engine: the pole-p coefficient of ope(a, b) must agree with
act(a, p-1, state_of(b)) exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import ResourceCapError
from .fields import (_CONTRACT, _KIND_ODD, FieldPoly, FreeFieldContext,
                     _derivative_poly, canonical_term, term_parity,
                     term_weight2)
from .linalg import EchelonBasis, vec_add
from .series import free_field_character

# a mode is (kind, index, r2) with r2 = 2r an odd integer; monomials are
# sorted tuples of creation modes (r2 < 0)
VACUUM: tuple = ()


def mono_weight2(mono) -> int:
    return -sum(m[2] for m in mono)


def mono_parity(mono) -> int:
    return sum(1 for m in mono if _KIND_ODD[m[0]]) & 1


def _create(kind, index, r2, mono):
    """Insert a creation mode; returns (sign, mono) or (0, None) on an odd
    square."""
    f = (kind, index, r2)
    pos = 0
    crossed_odd = 0
    for g in mono:
        if g < f:
            pos += 1
            if _KIND_ODD[g[0]]:
                crossed_odd += 1
        else:
            break
    if _KIND_ODD[kind]:
        if pos < len(mono) and mono[pos] == f:
            return 0, None
        if crossed_odd & 1:
            return -1, mono[:pos] + (f,) + mono[pos:]
    return 1, mono[:pos] + (f,) + mono[pos:]


def _annihilate(kind, index, r2, mono) -> dict:
    """Move an annihilation mode through the monomial, contracting as it goes."""
    out: dict = {}
    sign = 1
    odd = _KIND_ODD[kind]
    for t, (k2, i2, s2) in enumerate(mono):
        if i2 == index and r2 + s2 == 0:
            c = _CONTRACT.get((kind, k2), 0)
            if c:
                rest = mono[:t] + mono[t + 1:]
                vec_add(out, {rest: Fraction(sign * c)})
        if odd and _KIND_ODD[k2]:
            sign = -sign
    return out


def _gen_mode(kind, index, r2, vec: dict) -> dict:
    out: dict = {}
    for mono, c in vec.items():
        if r2 < 0:
            s, nm = _create(kind, index, r2, mono)
            if s:
                vec_add(out, {nm: Fraction(s) * c})
        else:
            vec_add(out, _annihilate(kind, index, r2, mono), c)
    return out


def _act_term(term, n: int, vec: dict) -> dict:
    """Apply the mode a_(n) of a canonical field term to a state vector."""
    if not vec:
        return {}
    if len(term) == 0:
        return dict(vec) if n == -1 else {}
    if len(term) == 1:
        k, idx, d = term[0]
        # (d^d g)_(n) = (-1)^d n(n-1)...(n-d+1) g_(n-d); then r2 = 2(n-d)+1
        coeff = Fraction(1)
        for t in range(d):
            coeff *= -(n - t)
        if coeff == 0:
            return {}
        m = n - d
        out = _gen_mode(k, idx, 2 * m + 1, vec)
        return {mo: coeff * c for mo, c in out.items()} if out else {}
    u, v = (term[0],), term[1:]
    w2_u, w2_v = 1 + 2 * term[0][2], sum(1 + 2 * f[2] for f in v)
    out: dict = {}
    sign = -1 if (term_parity(u) and term_parity(v)) else 1
    for mono, c in vec.items():
        w2 = mono_weight2(mono)
        # sum_j u_(-1-j) (v_(n+j) state): v_(M) kills once weight drops below 0
        j = 0
        while True:
            M = n + j
            if 2 * M + 2 > w2 + w2_v:     # resulting doubled weight < 0
                break
            inner = _act_term(v, M, {mono: c})
            if inner:
                du = (u[0][0], u[0][1], u[0][2] + j)
                contrib = _act_term((du,), -1, inner)
                vec_add(out, contrib, Fraction(1, factorial(j)))
            j += 1
        # (-1)^{p_u p_v} sum_j v_(n-1-j) (u_(j) state)
        j = 0
        while 2 * j + 2 <= w2 + w2_u:
            inner = _act_term(u, j, {mono: c})
            if inner:
                K = n - 1 - j
                if K >= 0:
                    vec_add(out, _act_term(v, K, inner), sign)
                else:
                    order = -K - 1
                    dv = _derivative_poly({v: Fraction(1)}, order)
                    scale = Fraction(sign, factorial(order))
                    for tv, cv in dv.items():
                        vec_add(out, _act_term(tv, -1, inner), cv * scale)
            j += 1
    return out


def act(a: FieldPoly, n: int, vec: dict) -> dict:
    """Exact action of the mode a_(n) on a state vector."""
    out: dict = {}
    for term, c in a.terms.items():
        vec_add(out, _act_term(term, n, vec), c)
    return out


#: spec name for the mode-action oracle; realizes a_(n) for any integer n
mode_action = act


def state_of(a: FieldPoly) -> dict:
    """State-field correspondence: a |0>."""
    return act(a, -1, {VACUUM: Fraction(1)})


def field_of_state(ctx: FreeFieldContext, vec: dict) -> FieldPoly:
    """Inverse correspondence on monomials: g_(-1-d)|0> is d^d g / d!."""
    out: dict = {}
    for mono, c in vec.items():
        coeff = c
        factors = []
        for (k, idx, r2) in mono:
            d = (-r2 - 1) // 2
            factors.append((k, idx, d))
            coeff /= factorial(d)
        s, t = canonical_term(factors)
        if s:
            vec_add(out, {t: coeff * s})
    return FieldPoly(ctx, out)


# -- bases -------------------------------------------------------------------

@dataclass
class GradedBasis:
    """Canonical monomial bases for each doubled weight 0..w2max."""

    ctx: FreeFieldContext
    w2max: int
    monomials: list     # index w2 -> sorted list of monomials

    def dim(self, w2: int) -> int:
        return len(self.monomials[w2])

    def dims(self) -> list[int]:
        return [len(ms) for ms in self.monomials]


def enumerate_basis(ctx: FreeFieldContext, w2max: int,
                    max_monomials: int = 2_000_000) -> GradedBasis:
    """All Fock monomials by weight, in canonical (sorted tuple) order."""
    gens = [(k, i) for k in (0, 1) for i in range(1, ctx.n_bg + 1)] + \
           [(k, i) for k in (2, 3) for i in range(1, ctx.n_bc + 1)]
    per_weight: list[list] = [[] for _ in range(w2max + 1)]
    total = 0

    def extend(mono, w2, start):
        nonlocal total
        per_weight[w2].append(mono)
        total += 1
        if total > max_monomials:
            raise ResourceCapError(
                f"monomial cap {max_monomials} exceeded enumerating weight {w2max / 2}")
        for gi in range(start, len(gens)):
            k, idx = gens[gi]
            r2 = -1
            while w2 + (-r2) <= w2max:
                f = (k, idx, r2)
                if mono and f < mono[-1]:
                    r2 -= 2
                    continue
                if _KIND_ODD[k] and mono and mono[-1] == f:
                    r2 -= 2
                    continue
                extend(mono + (f,), w2 + (-r2), gi)
                r2 -= 2

    extend(VACUUM, 0, 0)
    for ms in per_weight:
        ms.sort()
    basis = GradedBasis(ctx, w2max, per_weight)
    expected = free_field_character(ctx.n_bg, ctx.n_bc, w2max)
    if basis.dims() != expected:
        raise AssertionError("enumerated dimensions disagree with the character")
    return basis


def character_dims(ctx: FreeFieldContext, w2max: int) -> list[int]:
    return free_field_character(ctx.n_bg, ctx.n_bc, w2max)


# -- spans and the C2 quotient ------------------------------------------------

class WeightedSpan:
    """Per-weight echelon spans of a mode-closed subspace."""

    def __init__(self, ctx: FreeFieldContext, w2max: int):
        self.ctx = ctx
        self.w2max = w2max
        self.echelons = {w2: EchelonBasis() for w2 in range(w2max + 1)}
        self.vectors = {w2: [] for w2 in range(w2max + 1)}

    def insert(self, w2: int, vec: dict) -> bool:
        if not vec:
            return False
        eb = self.echelons[w2]
        res = eb.reduce(vec)
        if not res:
            return False
        lead = min(res)
        inv = Fraction(1, 1) / res[lead]
        res = {k: x * inv for k, x in res.items()}
        eb.rows[lead] = res
        self.vectors[w2].append(res)
        return True

    def dims(self) -> list[int]:
        return [self.echelons[w2].rank for w2 in range(self.w2max + 1)]


def span_closure(ctx: FreeFieldContext, generators: list[FieldPoly], w2max: int,
                 max_monomials: int = 2_000_000) -> WeightedSpan:
    """Smallest mode-closed subspace containing the vacuum and the generators.

    Applies every mode of every generator breadth-first by weight until the
    per-weight ranks stabilize.  Correct for strong generators whose ordered
    creation monomials never overshoot the target weight (affine currents).
    """
    span = WeightedSpan(ctx, w2max)
    character = character_dims(ctx, w2max)
    queue: list[tuple[int, dict]] = []

    def push(w2, vec):
        if span.echelons[w2].rank >= character[w2]:
            return    # weight space already full, vector is dependent
        if span.insert(w2, vec):
            queue.append((w2, span.vectors[w2][-1]))

    push(0, {VACUUM: Fraction(1)})
    gen_data = []
    for g in generators:
        w2g = int(2 * g.weight())
        gen_data.append((g, w2g))
        if w2g <= w2max:
            push(w2g, state_of(g))

    count = 0
    while queue:
        w2, vec = queue.pop()
        count += len(vec)
        if count > max_monomials:
            raise ResourceCapError(f"span cap {max_monomials} exceeded")
        for g, w2g in gen_data:
            # g_(n) maps doubled weight w2 to w2 + w2g - 2 - 2n
            base = w2 + w2g - 2
            n_lo = -((w2max - base) // 2)
            for n in range(n_lo, base // 2 + 1):
                out = act(g, n, vec)
                if out:
                    push(base - 2 * n, out)
    return span


def subalgebra_graded_dims(ctx: FreeFieldContext, generators: list[FieldPoly],
                           w2max: int, max_monomials: int = 2_000_000) -> list[int]:
    """Graded dimensions of the vertex subalgebra generated by the fields."""
    for g in generators:
        if g.weight() is None:
            raise ResourceCapError("generators must be weight-homogeneous")
    return span_closure(ctx, generators, w2max, max_monomials).dims()


@dataclass
class C2Presentation:
    """Generators with the polynomial relations of the Zhu quotient,
    certified through the recorded weight.

    Odd generator squares vanish identically in the supercommutative model
    (and their derivatives vanish with them); they are recorded in
    `odd_square_relations` as structural relations rather than as kernel
    polynomials.
    """

    generator_labels: list
    generator_parities: list
    relations: list            # list of dicts: monomial tuple (gen indices) -> Fraction
    relation_degrees: list
    odd_square_relations: list
    rv_dims: list              # dimension of the quotient per doubled weight
    dmax: int
    verified_w2: int


def c2_span(span: WeightedSpan, w2max: int) -> WeightedSpan:
    """Span of all a_(-2) b inside a mode-closed subspace, per weight."""
    ctx = span.ctx
    out = WeightedSpan(ctx, w2max)
    for w2a in range(1, w2max - 1):
        fields_a = [field_of_state(ctx, v) for v in span.vectors[w2a]]
        for w2b in range(0, w2max - w2a - 2 + 1):
            w2t = w2a + w2b + 2
            if w2t > w2max:
                continue
            for fa in fields_a:
                for vb in span.vectors[w2b]:
                    out.insert(w2t, act(fa, -2, vb))
    return out


def multiply_mod_c2(span: WeightedSpan, gen_fields: list[FieldPoly], mono) -> dict:
    """Evaluate a sorted generator monomial in the quotient algebra.

    The product is realized by iterated a_(-1); the result is a state vector
    reduced only later against the C2 span by the caller.
    """
    vec = {VACUUM: Fraction(1)}
    for gi in reversed(mono):
        vec = act(gen_fields[gi], -1, vec)
    return vec


def zhu_presentation(ctx: FreeFieldContext, gen_fields: list[FieldPoly],
                     labels: list[str], parities: list[int],
                     dmax: int, w2max: int,
                     span: WeightedSpan | None = None) -> C2Presentation:
    """Generators-and-relations presentation of the C2 quotient.

    Relations of each polynomial degree d <= dmax are the kernel of the
    multiplication map from degree-d supermonomials in the generators to
    the quotient at the corresponding weight.  The generators must share a
    common conformal weight.
    """
    from .errors import PresentationError
    w2gs = {int(2 * g.weight()) for g in gen_fields}
    if len(w2gs) != 1:
        raise PresentationError("generators must share a common weight")
    w2g = w2gs.pop()
    if dmax * w2g > w2max:
        raise PresentationError(
            f"degree cap {dmax} needs weight {dmax * w2g / 2} > certified "
            f"weight {w2max / 2}")
    if span is None:
        span = span_closure(ctx, gen_fields, w2max)
    c2 = c2_span(span, w2max)
    rv_dims = [a - b for a, b in zip(span.dims(), c2.dims())]
    if rv_dims[w2g] != len(gen_fields):
        raise AssertionError("degree-one relations among the currents")

    from .linalg import kernel_coefficients, rref_rows
    relations: list[dict] = []
    degrees: list[int] = []
    for d in range(2, dmax + 1):
        monos = _gen_monomials(len(gen_fields), parities, d)
        images = []
        eb = c2.echelons[d * w2g]
        for mono in monos:
            vec = multiply_mod_c2(span, gen_fields, mono)
            images.append(eb.reduce_full(vec))
        for coeffs in rref_rows(kernel_coefficients(images)):
            relations.append({monos[i]: c for i, c in coeffs.items()})
            degrees.append(d)
    odd_squares = [i for i, p in enumerate(parities) if p]
    return C2Presentation(list(labels), list(parities), relations, degrees,
                          odd_squares, rv_dims, dmax, w2max)


def _gen_monomials(n_gens: int, parities: list[int], degree: int) -> list[tuple]:
    """Sorted degree-d monomials in the generators, odd ones square-free."""
    out: list[tuple] = []

    def rec(prefix, start, left):
        if left == 0:
            out.append(tuple(prefix))
            return
        for g in range(start, n_gens):
            if parities[g] and prefix and prefix[-1] == g:
                continue
            rec(prefix + [g], g, left - 1)

    rec([], 0, degree)
    return out


def closure_is_stable(span: WeightedSpan, generators: list[FieldPoly]) -> bool:
    """One full extra sweep: applying every generator mode to every basis
    vector must produce nothing new."""
    for g in generators:
        w2g = int(2 * g.weight())
        for w2 in range(span.w2max + 1):
            for vec in span.vectors[w2]:
                base = w2 + w2g - 2
                n_lo = -((span.w2max - base) // 2)
                for n in range(n_lo, base // 2 + 1):
                    out = act(g, n, vec)
                    if out and span.echelons[base - 2 * n].reduce(out):
                        return False
    return True


def crosscheck_ope_modes(a: FieldPoly, b: FieldPoly) -> list:
    """Exact two-path comparison; returns a list of failing pole orders."""
    from .fields import ope
    result = ope(a, b)
    sb = state_of(b)
    bad = []
    poles = set(result.poles) | set(range(1, 1 + _max_pole_bound(a, b)))
    for p in sorted(poles):
        symbolic = state_of(result.pole(p))
        direct = act(a, p - 1, sb)
        diff = dict(symbolic)
        vec_add(diff, direct, -1)
        if diff:
            bad.append(p)
    return bad


def _max_pole_bound(a: FieldPoly, b: FieldPoly) -> int:
    wa = max((term_weight2(t) for t in a.terms), default=0)
    wb = max((term_weight2(t) for t in b.terms), default=0)
    return (wa + wb) // 2
