"""Finite-dimensional Lie superalgebras with exact rational data.

Every algebra is built from an explicit matrix model over Q, so structure
constants, invariant forms and dual bases are exact. Families covered:
gl_n, sl_n, so_m, sp_2n, sl(r|m) and osp(m|2n).

Conventions:
  * basis order is even elements first, then odd, with deterministic labels;
  * the form on gl_n/sl_n/sp_2n is the trace form of the standard
    representation, on so_m half the trace form (both give (theta,theta)=2
    on the simple even families);
  * osp(m|2n) preserves a form that is the identity on the orthogonal block
    and the antidiagonal symplectic form on the symplectic block, and its
    invariant form is minus the supertrace form, so the sp_2n block carries
    the usual normalized form and the so_m block carries -2 times its
    normalized form;
  * sl(r|m) carries the supertrace form of the standard representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateFormError, UsageError

EVEN, ODD = 0, 1


@dataclass(frozen=True)
class BasisElement:
    index: int
    parity: int
    label: str


def _zeros(rows, cols):
    return [[Fraction(0)] * cols for _ in range(rows)]


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = _zeros(n, m)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c:
                bt = b[t]
                for j in range(m):
                    if bt[j]:
                        oi[j] += c * bt[j]
    return out

def _matsub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]

def _matadd(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _symplectic_form(two_n):
    """Antidiagonal symplectic matrix: W[i][2n-1-i] = 1 for i < n, -1 above."""
    w = _zeros(two_n, two_n)
    n = two_n // 2
    for i in range(n):
        w[i][two_n - 1 - i] = Fraction(1)
        w[two_n - 1 - i][i] = Fraction(-1)
    return w


class _MatCoords:
    """Exact coordinatization of matrices against a fixed basis."""

    def __init__(self, basis_mats):
        self.rows = {}
        for idx, m in enumerate(basis_mats):
            vec = self._flatten(m)
            rec = {idx: Fraction(1)}
            while vec:
                lead = min(vec)
                pair = self.rows.get(lead)
                if pair is None:
                    break
                rv, rr = pair
                c = vec[lead]
                for k, x in rv.items():
                    nv = vec.get(k, 0) - c * x
                    if nv:
                        vec[k] = nv
                    else:
                        vec.pop(k, None)
                for k, x in rr.items():
                    nv = rec.get(k, 0) - c * x
                    if nv:
                        rec[k] = nv
                    else:
                        rec.pop(k, None)
            if not vec:
                raise ValueError("basis matrices are linearly dependent")
            lead = min(vec)
            inv = 1 / vec[lead]
            self.rows[lead] = ({k: x * inv for k, x in vec.items()},
                               {k: x * inv for k, x in rec.items()})

    @staticmethod
    def _flatten(m):
        return {(i, j): v for i, row in enumerate(m) for j, v in enumerate(row) if v}

    def coords(self, m) -> dict:
        vec = self._flatten(m)
        out: dict = {}
        while vec:
            lead = min(vec)
            pair = self.rows.get(lead)
            if pair is None:
                raise ValueError("matrix is not in the span of the basis")
            rv, rr = pair
            c = vec[lead]
            for k, x in rv.items():
                nv = vec.get(k, 0) - c * x
                if nv:
                    vec[k] = nv
                else:
                    vec.pop(k, None)
            for k, x in rr.items():
                nv = out.get(k, 0) + c * x
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return out


@dataclass(frozen=True)
class LieSuperAlgebra:
    """Exact structure constants, parities and invariant form for one algebra."""

    name: str
    family: str
    params: tuple
    basis: tuple
    structure: dict        # (i, j) -> {k: Fraction}, [xi_i, xi_j] = sum f_k xi_k
    form: tuple            # form[i][j] = (xi_i, xi_j)
    h_dual: Fraction
    matrices: tuple = field(repr=False, default=())
    super_dim: tuple = (0, 0)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def dim_even(self) -> int:
        return sum(1 for b in self.basis if b.parity == EVEN)

    @property
    def dim_odd(self) -> int:
        return sum(1 for b in self.basis if b.parity == ODD)

    @property
    def sdim(self) -> int:
        return self.dim_even - self.dim_odd

    def parity(self, i: int) -> int:
        return self.basis[i].parity

    def bracket_basis(self, i: int, j: int) -> dict:
        return self.structure.get((i, j), {})

    def vector(self, coeffs) -> "AlgebraVector":
        return AlgebraVector(self, tuple(Fraction(c) for c in coeffs))

    def basis_vector(self, i: int) -> "AlgebraVector":
        coeffs = [Fraction(0)] * self.dim
        coeffs[i] = Fraction(1)
        return AlgebraVector(self, tuple(coeffs))

    def to_json_dict(self) -> dict:
        triples = []
        for (i, j), comps in sorted(self.structure.items()):
            for k, c in sorted(comps.items()):
                triples.append([i, j, k, str(c)])
        return {
            "name": self.name,
            "family": self.family,
            "params": list(self.params),
            "basis": [{"index": b.index, "parity": b.parity, "label": b.label}
                      for b in self.basis],
            "structure": triples,
            "form": [[str(x) for x in row] for row in self.form],
            "h_dual": str(self.h_dual),
        }


@dataclass(frozen=True)
class AlgebraVector:
    algebra: LieSuperAlgebra
    coeffs: tuple

    def parity(self):
        """Parity flag for homogeneous vectors, None for mixed ones."""
        parities = {self.algebra.parity(i) for i, c in enumerate(self.coeffs) if c}
        if not parities:
            return EVEN
        if len(parities) > 1:
            return None
        return parities.pop()

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other):
        _same_algebra(self, other)
        return AlgebraVector(self.algebra,
                             tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        _same_algebra(self, other)
        return AlgebraVector(self.algebra,
                             tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rmul__(self, c):
        c = Fraction(c)
        return AlgebraVector(self.algebra, tuple(c * x for x in self.coeffs))


def _same_algebra(a: AlgebraVector, b: AlgebraVector):
    if a.algebra is not b.algebra and a.algebra != b.algebra:
        raise UsageError("vectors belong to different algebras")


def bracket(a: AlgebraVector, b: AlgebraVector) -> AlgebraVector:
    """Super bracket, extended bilinearly from the structure constants."""
    _same_algebra(a, b)
    g = a.algebra
    out = [Fraction(0)] * g.dim
    for i, ca in enumerate(a.coeffs):
        if not ca:
            continue
        for j, cb in enumerate(b.coeffs):
            if not cb:
                continue
            for k, f in g.bracket_basis(i, j).items():
                out[k] += ca * cb * f
    return AlgebraVector(g, tuple(out))


def form(a: AlgebraVector, b: AlgebraVector) -> Fraction:
    _same_algebra(a, b)
    g = a.algebra
    total = Fraction(0)
    for i, ca in enumerate(a.coeffs):
        if not ca:
            continue
        row = g.form[i]
        for j, cb in enumerate(b.coeffs):
            if cb:
                total += ca * cb * row[j]
    return total


def dual_basis(g: LieSuperAlgebra) -> list[AlgebraVector]:
    """Vectors xi'_j with (xi_i, xi'_j) = delta_ij exactly."""
    n = g.dim
    if n == 0:
        return []
    # solve form * D = I by Gaussian elimination on an augmented matrix
    aug = [[g.form[i][j] for j in range(n)] + [Fraction(1) if k == i else Fraction(0)
                                               for k in range(n)]
           for i, _ in enumerate(range(n))]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise DegenerateFormError(f"form of {g.name} is degenerate")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [x - c * y for x, y in zip(aug[r], aug[col])]
    # aug right half now holds inverse(form); column j gives xi'_j coefficients
    return [AlgebraVector(g, tuple(aug[i][n + j] for i in range(n))) for j in range(n)]


def adjoint_casimir_matrix(g: LieSuperAlgebra) -> list[list[Fraction]]:
    """Matrix of x -> sum_i (-1)^{p_i} [xi_i, [xi'_i, x]] on the adjoint module.

    The Koszul sign on odd dual pairs makes sum_i (-1)^{p_i} xi_i (x) xi'_i the
    invariant Casimir tensor for the plain pairing (xi_i, xi'_j) = delta_ij.
    For every simple (super)algebra built here the operator equals 2 h_dual
    times the identity, which pins the normalization of the form.
    """
    duals = dual_basis(g)
    n = g.dim
    out = _zeros(n, n)
    for j in range(n):
        x = g.basis_vector(j)
        acc = [Fraction(0)] * n
        for i in range(n):
            y = bracket(g.basis_vector(i), bracket(duals[i], x))
            sign = -1 if g.parity(i) == ODD else 1
            acc = [a + sign * c for a, c in zip(acc, y.coeffs)]
        for i in range(n):
            out[i][j] = acc[i]
    return out


# ---------------------------------------------------------------------------
# matrix-model builders
# ---------------------------------------------------------------------------

def _unit(dim, i, j):
    m = _zeros(dim, dim)
    m[i][j] = Fraction(1)
    return m


def _gl_basis(n):
    out = []
    for i in range(n):
        for j in range(n):
            out.append((f"E_{i + 1}_{j + 1}", EVEN, _unit(n, i, j)))
    return out


def _sl_basis(n):
    out = []
    for i in range(n):
        for j in range(n):
            if i != j:
                out.append((f"E_{i + 1}_{j + 1}", EVEN, _unit(n, i, j)))
    for i in range(n - 1):
        m = _zeros(n, n)
        m[i][i] = Fraction(1)
        m[i + 1][i + 1] = Fraction(-1)
        out.append((f"H_{i + 1}", EVEN, m))
    return out


def _so_basis(m):
    out = []
    for i in range(m):
        for j in range(i + 1, m):
            mat = _zeros(m, m)
            mat[i][j] = Fraction(1)
            mat[j][i] = Fraction(-1)
            out.append((f"M_{i + 1}_{j + 1}", EVEN, mat))
    return out


def _sp_basis(two_n):
    w = _symplectic_form(two_n)
    winv = [[-x for x in row] for row in w]    # W^2 = -I
    out = []
    for i in range(two_n):
        for j in range(i, two_n):
            s = _unit(two_n, i, j)
            if i != j:
                s[j][i] = Fraction(1)
            out.append((f"S_{i + 1}_{j + 1}", EVEN, _matmul(winv, s)))
    return out


def _embed(mat, dim, off_r, off_c):
    out = _zeros(dim, dim)
    for i, row in enumerate(mat):
        for j, v in enumerate(row):
            if v:
                out[off_r + i][off_c + j] = v
    return out


def _osp_basis(m, n):
    """osp(m|2n) inside gl(m|2n) preserving diag(I_m, W)."""
    two_n = 2 * n
    dim = m + two_n
    out = []
    for label, par, mat in _so_basis(m):
        out.append((label, par, _embed(mat, dim, 0, 0)))
    for label, par, mat in _sp_basis(two_n):
        out.append((label, par, _embed(mat, dim, m, m)))
    w = _symplectic_form(two_n)
    for s in range(two_n):
        for a in range(m):
            mat = _zeros(dim, dim)
            mat[m + s][a] = Fraction(1)                # C = E_{s a}
            for t in range(two_n):
                if w[s][t]:
                    mat[a][m + t] = -w[s][t]           # B = -C^T W
            out.append((f"F_{s + 1}_{a + 1}", ODD, mat))
    return out


def _sl_super_basis(r, m):
    dim = r + m
    out = []
    for i in range(r):
        for j in range(r):
            if i != j:
                out.append((f"E_{i + 1}_{j + 1}", EVEN, _unit(dim, i, j)))
    for i in range(m):
        for j in range(m):
            if i != j:
                out.append((f"E_{r + i + 1}_{r + j + 1}", EVEN, _unit(dim, r + i, r + j)))
    for k in range(dim - 1):
        mat = _zeros(dim, dim)
        mat[k][k] = Fraction(1)
        # across the block boundary the supertraceless Cartan is E_kk + E_k+1,k+1
        mat[k + 1][k + 1] = Fraction(1) if k == r - 1 else Fraction(-1)
        out.append((f"H_{k + 1}", EVEN, mat))
    for i in range(r):
        for j in range(m):
            out.append((f"F_{i + 1}_{j + 1}", ODD, _unit(dim, i, r + j)))
            out.append((f"G_{j + 1}_{i + 1}", ODD, _unit(dim, r + j, i)))
    return out


def _trace_pair(x, y, even_dim, *, half=False, supertrace=False, negate=False):
    prod = _matmul(x, y)
    even = sum((prod[i][i] for i in range(even_dim)), Fraction(0))
    odd = sum((prod[i][i] for i in range(even_dim, len(prod))), Fraction(0))
    val = even - odd if supertrace else even + odd
    if half:
        val /= 2
    if negate:
        val = -val
    return val


_FAMILIES = ("gl", "sl", "so", "sp", "sl_super", "osp")


def build_algebra(family: str, **params) -> LieSuperAlgebra:
    """Construct an algebra by family.

    gl/sl/sp take n, so takes m, osp takes (m, n) for osp(m|2n) and
    sl_super takes (r, m) for sl(r|m).
    """
    if family not in _FAMILIES:
        raise UsageError(f"unknown family {family!r}; expected one of {_FAMILIES}")

    def need(key, minimum):
        if key not in params:
            raise UsageError(f"family {family!r} requires parameter {key!r}")
        v = params[key]
        if not isinstance(v, int) or v < minimum:
            raise UsageError(f"parameter {key}={v!r} out of range (>= {minimum})")
        return v

    if family == "gl":
        n = need("n", 1)
        items, even_dim = _gl_basis(n), n
        name, prm = f"gl_{n}", (n,)
        h_dual = Fraction(n)
        pair = lambda x, y: _trace_pair(x, y, even_dim)
        sdim = (n, 0)
    elif family == "sl":
        n = need("n", 1)
        items, even_dim = _sl_basis(n), n
        name, prm = f"sl_{n}", (n,)
        h_dual = Fraction(n)
        pair = lambda x, y: _trace_pair(x, y, even_dim)
        sdim = (n, 0)
    elif family == "so":
        m = need("m", 0)
        items, even_dim = _so_basis(m), m
        name, prm = f"so_{m}", (m,)
        h_dual = Fraction(m - 2)
        pair = lambda x, y: _trace_pair(x, y, even_dim, half=True)
        sdim = (m, 0)
    elif family == "sp":
        n = need("n", 1)
        items, even_dim = _sp_basis(2 * n), 2 * n
        name, prm = f"sp_{2 * n}", (n,)
        h_dual = Fraction(n + 1)
        pair = lambda x, y: _trace_pair(x, y, even_dim)
        sdim = (2 * n, 0)
    elif family == "osp":
        m = need("m", 0)
        n = need("n", 0)
        items, even_dim = _osp_basis(m, n), m
        name, prm = f"osp_{m}|{2 * n}", (m, n)
        h_dual = Fraction(2 * n + 2 - m, 2)
        pair = lambda x, y: _trace_pair(x, y, even_dim, supertrace=True, negate=True)
        sdim = (m, 2 * n)
    else:
        r = need("r", 1)
        m = need("m", 0)
        items, even_dim = _sl_super_basis(r, m), r
        name, prm = f"sl_{r}|{m}", (r, m)
        h_dual = Fraction(r - m)
        pair = lambda x, y: _trace_pair(x, y, even_dim, supertrace=True)
        sdim = (r, m)

    items.sort(key=lambda it: (it[1], it[0]))    # even first, lexicographic labels
    labels = [it[0] for it in items]
    parities = [it[1] for it in items]
    mats = [it[2] for it in items]
    basis = tuple(BasisElement(i, parities[i], labels[i]) for i in range(len(items)))

    structure: dict = {}
    if mats:
        coords = _MatCoords(mats)
        for i, x in enumerate(mats):
            for j, y in enumerate(mats):
                br = _matsub(_matmul(x, y), _matmul(y, x)) \
                    if not (parities[i] and parities[j]) \
                    else _matadd(_matmul(x, y), _matmul(y, x))
                comps = coords.coords(br)
                if comps:
                    structure[(i, j)] = comps

    fm = tuple(tuple(pair(x, y) for y in mats) for x in mats)
    return LieSuperAlgebra(
        name=name, family=family, params=prm, basis=basis, structure=structure,
        form=fm, h_dual=h_dual,
        matrices=tuple(tuple(tuple(row) for row in m) for m in mats),
        super_dim=sdim,
    )
