"""Symbolic calculus for beta-gamma / b-c free-field vertex superalgebras.

A field is a rational linear combination of normally ordered monomials in
derivatives of the generators.  Products nest to the left,
:a b c: = a_(-1)(b_(-1) c), and because all generator contractions are
multiples of the identity the creation modes supercommute, so a monomial is
canonically a sorted factor tuple with a Koszul sign.

The singular OPE is computed by mode recursion:

  * (da)_(n) b = -n a_(n-1) b  and  a_(n) db = d(a_(n) b) + n a_(n-1) b,
  * a_(n) :uv: = :(a_(n)u) v: + (-1)^{p_a p_u} :u (a_(n)v):  for a single
    factor a (the Wick integral term vanishes since a_(j)u is central),
  * :uv:_(n) c = sum_j u_(-1-j)(v_(n+j) c)
                 + (-1)^{p_u p_v} sum_j v_(n-1-j)(u_(j) c),

with base case the generator contractions.  All coefficients are exact
rationals; pole p of a(z)b(w) is a_(p-1) b.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import MismatchedContextError, NonVirasoroError, UsageError

BETA, GAMMA, BF, CF = range(4)
KIND_NAMES = ("beta", "gamma", "b", "c")
KIND_BY_NAME = {name: k for k, name in enumerate(KIND_NAMES)}
_KIND_ODD = (False, False, True, True)

# factor = (kind, index, derivative order); a term is a sorted factor tuple
Factor = tuple
Term = tuple

_CONTRACT = {(BETA, GAMMA): 1, (GAMMA, BETA): -1, (BF, CF): 1, (CF, BF): 1}


def factor_is_odd(f) -> bool:
    return _KIND_ODD[f[0]]


def term_parity(t: Term) -> int:
    return sum(1 for f in t if _KIND_ODD[f[0]]) & 1


def term_weight2(t: Term) -> int:
    return sum(1 + 2 * f[2] for f in t)


def _insert_factor(f, term):
    """Koszul-insert a factor into a sorted term.

    Returns (sign, new term) or (0, None) when an odd factor repeats.
    """
    pos = 0
    crossed_odd = 0
    for g in term:
        if g < f:
            pos += 1
            if _KIND_ODD[g[0]]:
                crossed_odd += 1
        else:
            break
    if _KIND_ODD[f[0]]:
        if pos < len(term) and term[pos] == f:
            return 0, None
        sign = -1 if crossed_odd & 1 else 1
    else:
        sign = 1
    return sign, term[:pos] + (f,) + term[pos:]


def canonical_term(factors) -> tuple:
    """Sort an arbitrary factor sequence with the Koszul sign of the
    permutation; returns (sign, term), or (0, None) when an odd factor
    repeats."""
    arr: list = []
    sign = 1
    for f in factors:
        pos = len(arr)
        crossed_odd = 0
        while pos > 0 and arr[pos - 1] > f:
            if _KIND_ODD[arr[pos - 1][0]]:
                crossed_odd += 1
            pos -= 1
        if _KIND_ODD[f[0]]:
            if (pos > 0 and arr[pos - 1] == f) or (pos < len(arr) and arr[pos] == f):
                return 0, None
            if crossed_odd & 1:
                sign = -sign
        arr.insert(pos, f)
    return sign, tuple(arr)


# -- raw polynomial helpers (dict Term -> Fraction) -------------------------

def _padd(dst: dict, src: dict, scale=1):
    if scale == 0:
        return dst
    for t, c in src.items():
        nv = dst.get(t, 0) + scale * c
        if nv:
            dst[t] = nv
        else:
            dst.pop(t, None)
    return dst


def _derivative_term(term: Term) -> dict:
    out: dict = {}
    for i, (k, idx, d) in enumerate(term):
        bumped = (k, idx, d + 1)
        # the bump happens in place: nothing sorts strictly between
        # (k,idx,d) and (k,idx,d+1), so re-sorting is sign-free; the only
        # casualty is an odd square, which vanishes
        if _KIND_ODD[k] and bumped in term:
            continue
        factors = list(term)
        factors[i] = bumped
        factors.sort()
        _padd(out, {tuple(factors): Fraction(1)})
    return out


def _derivative_poly(p: dict, order: int = 1) -> dict:
    for _ in range(order):
        out: dict = {}
        for t, c in p.items():
            _padd(out, _derivative_term(t), c)
        p = out
    return p


_NO_CACHE: dict = {}
_MODES_CACHE: dict = {}


def _no_poly_left(p: dict, b: Term) -> dict:
    out: dict = {}
    for t, c in p.items():
        _padd(out, _no_terms(t, b), c)
    return out


def _no_terms(a: Term, b: Term) -> dict:
    """Left-nested normal product a_(-1) b of two canonical terms."""
    cached = _NO_CACHE.get((a, b))
    if cached is not None:
        return dict(cached)
    if len(a) == 0:
        res = {b: Fraction(1)}
    elif len(a) == 1:
        s, t = _insert_factor(a[0], b)
        res = {t: Fraction(s)} if s else {}
    else:
        u, v = a[0], a[1:]
        res = {}
        # j = 0 creation term
        inner = _no_terms(v, b)
        for t, c in inner.items():
            _padd(res, _no_terms((u,), t), c)
        # u_(-1-j) (v_(j-1) b) for j >= 1
        mv = _modes_terms(v, b)
        for k, poly in mv.items():
            j = k + 1
            du = (u[0], u[1], u[2] + j)
            scale = Fraction(1, factorial(j))
            for t, c in poly.items():
                _padd(res, _no_terms((du,), t), c * scale)
        # (-1)^{p_u p_v} v_(-1-j) (u_(j) b)
        if factor_is_odd(u) and term_parity(v):
            sign = -1
        else:
            sign = 1
        mu = _modes_terms((u,), b)
        for j, poly in mu.items():
            dv = _derivative_poly({v: Fraction(1)}, j + 1)
            scale = Fraction(sign, factorial(j + 1))
            for tv, cv in dv.items():
                for t, c in poly.items():
                    _padd(res, _no_terms(tv, t), cv * c * scale)
    _NO_CACHE[(a, b)] = tuple(res.items())
    return dict(res)


def _modes_poly_left(vterm: Term, p: dict) -> dict:
    """All modes of vterm applied across a polynomial argument."""
    acc: dict = {}
    for t, c in p.items():
        for n, poly in _modes_terms(vterm, t).items():
            if n not in acc:
                acc[n] = {}
            _padd(acc[n], poly, c)
    return {n: poly for n, poly in acc.items() if poly}


def _modes_terms(a: Term, b: Term) -> dict:
    """Singular modes {n >= 0: a_(n) b} of two canonical terms."""
    cached = _MODES_CACHE.get((a, b))
    if cached is not None:
        return {n: dict(p) for n, p in cached}
    if len(a) == 0 or len(b) == 0:
        res: dict = {}
    elif len(a) == 1:
        k, idx, d = a[0]
        if d > 0:
            inner = _modes_terms(((k, idx, d - 1),), b)
            res = {}
            for n, poly in inner.items():
                _padd(res.setdefault(n + 1, {}), poly, Fraction(-(n + 1)))
            res = {n: p for n, p in res.items() if p}
        elif len(b) == 1:
            kb, idxb, db = b[0]
            if db > 0:
                inner = _modes_terms(a, ((kb, idxb, db - 1),))
                res = {}
                for n, poly in inner.items():
                    dp = _derivative_poly(dict(poly))
                    if dp:
                        _padd(res.setdefault(n, {}), dp)
                    _padd(res.setdefault(n + 1, {}), poly, Fraction(n + 1))
                res = {n: p for n, p in res.items() if p}
            else:
                s = _CONTRACT.get((k, kb), 0) if idx == idxb else 0
                res = {0: {(): Fraction(s)}} if s else {}
        else:
            u, v = b[0], b[1:]
            res = {}
            mu = _modes_terms(a, (u,))
            for n, poly in mu.items():
                s = poly.get((), 0)          # a_(n) u is always central
                if s:
                    _padd(res.setdefault(n, {}), {v: s})
            sign = -1 if (factor_is_odd(a[0]) and factor_is_odd(u)) else 1
            mv = _modes_terms(a, v)
            for n, poly in mv.items():
                contrib: dict = {}
                for t, c in poly.items():
                    _padd(contrib, _no_terms((u,), t), c)
                if contrib:
                    _padd(res.setdefault(n, {}), contrib, sign)
            res = {n: p for n, p in res.items() if p}
    else:
        u, v = a[0], a[1:]
        res = {}
        mv = _modes_terms(v, b)
        # u_(-1-j) (v_(n+j) b):  n runs over 0..M for each mode M of v
        for M, poly in mv.items():
            for n in range(M + 1):
                j = M - n
                du = (u[0], u[1], u[2] + j)
                scale = Fraction(1, factorial(j))
                contrib: dict = {}
                for t, c in poly.items():
                    _padd(contrib, _no_terms((du,), t), c * scale)
                if contrib:
                    _padd(res.setdefault(n, {}), contrib)
        sign = -1 if (factor_is_odd(u) and term_parity(v)) else 1
        mu = _modes_terms((u,), b)
        for j, poly in mu.items():
            # annihilation part v_(K) with K = n-1-j >= 0
            macc = _modes_poly_left(v, poly)
            for K, q in macc.items():
                _padd(res.setdefault(j + 1 + K, {}), q, sign)
            # creation part v_(n-1-j) with n <= j
            for n in range(j + 1):
                order = j - n
                dv = _derivative_poly({v: Fraction(1)}, order)
                scale = Fraction(sign, factorial(order))
                contrib = {}
                for tv, cv in dv.items():
                    for t, c in poly.items():
                        _padd(contrib, _no_terms(tv, t), cv * c * scale)
                if contrib:
                    _padd(res.setdefault(n, {}), contrib)
        res = {n: p for n, p in res.items() if p}
    _MODES_CACHE[(a, b)] = tuple((n, tuple(p.items())) for n, p in res.items())
    return res


def clear_caches():
    _NO_CACHE.clear()
    _MODES_CACHE.clear()


# -- public types ------------------------------------------------------------

@dataclass(frozen=True)
class FreeFieldContext:
    """Ranks of the bosonic (beta-gamma) and fermionic (b-c) parts."""

    n_bg: int
    n_bc: int

    def __post_init__(self):
        if self.n_bg < 0 or self.n_bc < 0 or (self.n_bg == 0 and self.n_bc == 0):
            raise UsageError(f"invalid context ranks ({self.n_bg}, {self.n_bc})")

    def rank_of(self, kind: int) -> int:
        return self.n_bg if kind in (BETA, GAMMA) else self.n_bc


class FieldPoly:
    """Exact-coefficient combination of normally ordered monomials."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: FreeFieldContext, terms: dict | None = None):
        self.ctx = ctx
        self.terms = {t: c for t, c in (terms or {}).items() if c}

    # construction ----------------------------------------------------------
    @classmethod
    def zero(cls, ctx):
        return cls(ctx, {})

    @classmethod
    def identity(cls, ctx, coeff=1):
        return cls(ctx, {(): Fraction(coeff)})

    @classmethod
    def generator(cls, ctx, kind, index: int):
        if isinstance(kind, str):
            if kind not in KIND_BY_NAME:
                raise UsageError(f"unknown generator kind {kind!r}")
            kind = KIND_BY_NAME[kind]
        if not 1 <= index <= ctx.rank_of(kind):
            raise UsageError(
                f"index {index} out of range for {KIND_NAMES[kind]} in context {ctx}")
        return cls(ctx, {((kind, index, 0),): Fraction(1)})

    # structure --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def weight(self):
        """Common conformal weight, or None when inhomogeneous."""
        weights = {term_weight2(t) for t in self.terms}
        if not weights:
            return Fraction(0)
        if len(weights) > 1:
            return None
        return Fraction(weights.pop(), 2)

    def parity(self):
        parities = {term_parity(t) for t in self.terms}
        if not parities:
            return 0
        if len(parities) > 1:
            return None
        return parities.pop()

    # arithmetic --------------------------------------------------------------
    def _check(self, other):
        if self.ctx != other.ctx:
            raise MismatchedContextError(f"{self.ctx} vs {other.ctx}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        _padd(out, other.terms)
        return FieldPoly(self.ctx, out)

    def __sub__(self, other):
        self._check(other)
        out = dict(self.terms)
        _padd(out, other.terms, -1)
        return FieldPoly(self.ctx, out)

    def __neg__(self):
        return FieldPoly(self.ctx, {t: -c for t, c in self.terms.items()})

    def __rmul__(self, scalar):
        scalar = Fraction(scalar)
        return FieldPoly(self.ctx, {t: scalar * c for t, c in self.terms.items()})

    __mul__ = __rmul__

    def __eq__(self, other):
        return isinstance(other, FieldPoly) and self.ctx == other.ctx \
            and self.terms == other.terms

    def __repr__(self):
        return f"FieldPoly({format_poly(self)})"

    def derivative(self, order: int = 1) -> "FieldPoly":
        return FieldPoly(self.ctx, _derivative_poly(dict(self.terms), order))

    # serialization ------------------------------------------------------------
    def to_json_obj(self) -> list:
        items = sorted(self.terms.items())
        return [{"coeff": str(c),
                 "factors": [[KIND_NAMES[k], i, d] for (k, i, d) in t]}
                for t, c in items]

    @classmethod
    def from_json_obj(cls, ctx, obj: list) -> "FieldPoly":
        out: dict = {}
        for entry in obj:
            factors = tuple((KIND_BY_NAME[k], i, d) for k, i, d in entry["factors"])
            s, t = canonical_term(factors)
            if s:
                _padd(out, {t: Fraction(entry["coeff"]) * s})
        return cls(ctx, out)


@dataclass(frozen=True)
class OPEResult:
    """Singular part of a(z)b(w): pole order -> coefficient field."""

    ctx: FreeFieldContext
    poles: dict

    def pole(self, p: int) -> FieldPoly:
        return self.poles.get(p, FieldPoly.zero(self.ctx))

    @property
    def max_pole(self) -> int:
        return max(self.poles, default=0)

    def is_regular(self) -> bool:
        return not self.poles

    def to_json_obj(self) -> dict:
        return {str(p): f.to_json_obj() for p, f in sorted(self.poles.items())}


def normal_order(a: FieldPoly, b: FieldPoly) -> FieldPoly:
    """Left-nested normally ordered product :a b:."""
    a._check(b)
    out: dict = {}
    for ta, ca in a.terms.items():
        for tb, cb in b.terms.items():
            _padd(out, _no_terms(ta, tb), ca * cb)
    return FieldPoly(a.ctx, out)


def ope(a: FieldPoly, b: FieldPoly) -> OPEResult:
    """Exact singular OPE; the empty pole map means a(z)b(w) is regular."""
    a._check(b)
    acc: dict = {}
    for ta, ca in a.terms.items():
        for tb, cb in b.terms.items():
            for n, poly in _modes_terms(ta, tb).items():
                _padd(acc.setdefault(n + 1, {}), poly, ca * cb)
    return OPEResult(a.ctx, {p: FieldPoly(a.ctx, poly)
                             for p, poly in acc.items() if poly})


def nth_product(a: FieldPoly, n: int, b: FieldPoly) -> FieldPoly:
    """The field a_(n) b for any integer n (creation modes included)."""
    a._check(b)
    if n >= 0:
        res = ope(a, b).pole(n + 1)
        return res
    order = -n - 1
    return Fraction(1, factorial(order)) * normal_order(a.derivative(order), b)


def virasoro_boson(ctx: FreeFieldContext) -> FieldPoly:
    """Conformal vector of the beta-gamma part, central charge -n_bg."""
    if ctx.n_bg == 0:
        raise UsageError("context has no beta-gamma pairs")
    half = Fraction(1, 2)
    out = FieldPoly.zero(ctx)
    for i in range(1, ctx.n_bg + 1):
        beta = FieldPoly.generator(ctx, BETA, i)
        gamma = FieldPoly.generator(ctx, GAMMA, i)
        out = out + half * (normal_order(beta, gamma.derivative())
                            - normal_order(beta.derivative(), gamma))
    return out


def virasoro_fermion(ctx: FreeFieldContext) -> FieldPoly:
    """Conformal vector of the b-c part, central charge +n_bc."""
    if ctx.n_bc == 0:
        raise UsageError("context has no b-c pairs")
    half = Fraction(1, 2)
    out = FieldPoly.zero(ctx)
    for i in range(1, ctx.n_bc + 1):
        bf = FieldPoly.generator(ctx, BF, i)
        cf = FieldPoly.generator(ctx, CF, i)
        out = out + half * (normal_order(bf.derivative(), cf)
                            - normal_order(bf, cf.derivative()))
    return out


def virasoro_total(ctx: FreeFieldContext) -> FieldPoly:
    parts = []
    if ctx.n_bg:
        parts.append(virasoro_boson(ctx))
    if ctx.n_bc:
        parts.append(virasoro_fermion(ctx))
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return total


def central_charge(L: FieldPoly) -> Fraction:
    """Read c off the self-OPE after checking the Virasoro shape.

    Requires pole 2 = 2L, pole 1 = dL, pole 3 = 0 and pole 4 central.
    """
    result = ope(L, L)
    for p in result.poles:
        if p > 4:
            raise NonVirasoroError(p, "pole order above 4")
    if not result.pole(3).is_zero():
        raise NonVirasoroError(3, "nonzero cubic pole")
    if result.pole(2) != 2 * L:
        raise NonVirasoroError(2, "quadratic pole is not 2L")
    if result.pole(1) != L.derivative():
        raise NonVirasoroError(1, "simple pole is not dL")
    quartic = result.pole(4)
    extra = {t: c for t, c in quartic.terms.items() if t != ()}
    if extra:
        raise NonVirasoroError(4, "quartic pole is not central")
    return 2 * quartic.terms.get((), Fraction(0))


def format_poly(p: FieldPoly) -> str:
    """Canonical ASCII form, e.g. '1/2 :beta_1 d^1 gamma_1: + -1/2 beta_2'."""
    if not p.terms:
        return "0"
    chunks = []
    for t, c in sorted(p.terms.items()):
        factors = " ".join(
            (f"d^{d} " if d else "") + f"{KIND_NAMES[k]}_{i}" for (k, i, d) in t)
        if not t:
            body = "1"
        elif len(t) == 1:
            body = factors
        else:
            body = f":{factors}:"
        if c == 1 and t:
            chunks.append(body)
        elif t:
            chunks.append(f"{c} {body}")
        else:
            chunks.append(str(c))
    return " + ".join(chunks)
