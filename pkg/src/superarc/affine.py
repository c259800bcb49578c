"""Current realizations of sp/osp and gl/sl-type algebras in free fields.

The free-field generators are arranged into copies of the standard module:
for the orthosymplectic family the copy space carries the same invariant
form as the matrix model of the algebra, tensored with the symplectic slot
form; for the type-A family the copies split into a standard block and its
dual.  Each current is the unique weight-one quadratic whose zero mode acts
on the generators by the prescribed module map; the coefficients are
obtained from an exact linear solve, and the construction fails loudly if
that system is inconsistent.  All affine OPEs, coset regularity and the
conformal embedding are then verified exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (CriticalLevelError, MismatchedContextError,
                     RealizationSolveError, UsageError)
from .fields import (BETA, BF, CF, GAMMA, FieldPoly, FreeFieldContext,
                     _modes_terms, normal_order, ope, virasoro_total)
from .liesuper import (EVEN, ODD, LieSuperAlgebra, build_algebra, dual_basis)
from .linalg import solve_exact


@dataclass(frozen=True)
class _Frame:
    """Atoms (signed generators) carrying module structure for one family."""

    ctx: FreeFieldContext
    atom_phys: tuple        # atom index -> (sign, kind, phys index)
    atom_parity: tuple      # statistics parity per atom
    pairing: tuple          # contraction matrix <atom_i, atom_j>
    n_primary: int          # atoms 0..n_primary-1 form the standard block


def _atom_field(ctx, entry) -> FieldPoly:
    sign, kind, idx = entry
    return Fraction(sign) * FieldPoly.generator(ctx, kind, idx)


def _contraction_matrix(ctx, atom_phys):
    mat = []
    for a in atom_phys:
        row = []
        fa = _atom_field(ctx, a)
        for b in atom_phys:
            r = ope(fa, _atom_field(ctx, b))
            row.append(r.pole(1).terms.get((), Fraction(0)))
        mat.append(tuple(row))
    return tuple(mat)


def _frame_s2(n: int, m: int, r: int) -> _Frame:
    """m bosonic and 2r fermionic copies of the symplectic slot space C^2n."""
    ctx = FreeFieldContext(n * m, 2 * n * r)
    atom_phys = []
    atom_parity = []
    for a in range(m):
        for i in range(2 * n):
            if i < n:
                atom_phys.append((1, BETA, a * n + i + 1))
            else:
                atom_phys.append((1, GAMMA, a * n + (2 * n - 1 - i) + 1))
            atom_parity.append(0)
    for u in range(2 * r):
        for i in range(2 * n):
            if u < r:
                atom_phys.append((1, BF, u * 2 * n + i + 1))
            else:
                sign = 1 if i >= n else -1
                pid = (2 * r - 1 - u) * 2 * n + (2 * n - 1 - i)
                atom_phys.append((sign, CF, pid + 1))
            atom_parity.append(1)
    atoms = tuple(atom_phys)
    return _Frame(ctx, atoms, tuple(atom_parity),
                  _contraction_matrix(ctx, atoms), len(atoms))


def _frame_s1(n: int, m: int, r: int) -> _Frame:
    """r fermionic plus m bosonic copies of C^n and the dual copies."""
    ctx = FreeFieldContext(n * m, n * r)
    atom_phys = []
    atom_parity = []
    for A in range(r + m):
        for i in range(n):
            if A < r:
                atom_phys.append((1, BF, A * n + i + 1))
                atom_parity.append(1)
            else:
                atom_phys.append((1, BETA, (A - r) * n + i + 1))
                atom_parity.append(0)
    for A in range(r + m):
        for i in range(n):
            if A < r:
                atom_phys.append((1, CF, A * n + i + 1))
                atom_parity.append(1)
            else:
                atom_phys.append((1, GAMMA, (A - r) * n + i + 1))
                atom_parity.append(0)
    atoms = tuple(atom_phys)
    return _Frame(ctx, atoms, tuple(atom_parity),
                  _contraction_matrix(ctx, atoms), (r + m) * n)


def _complete_on_dual(frame: _Frame, rho: dict, parity_t: int) -> dict:
    """Extend a module map from the standard block to the dual block so the
    contraction pairing is invariant; the extension is unique."""
    n_p = frame.n_primary
    n_a = len(frame.atom_phys)
    dual = range(n_p, n_a)
    for y in dual:
        eqs = []
        for x in range(n_p):
            row = {z: frame.pairing[x][z] for z in dual if frame.pairing[x][z]}
            rhs = Fraction(0)
            for xp in range(n_p):
                c = rho.get((xp, x), 0)
                if c:
                    rhs += c * frame.pairing[xp][y]
            sign = -1 if (parity_t and frame.atom_parity[x]) else 1
            eqs.append((row, -sign * rhs))
        try:
            col = solve_exact(eqs)
        except ValueError as exc:
            raise RealizationSolveError(f"dual completion failed: {exc}") from exc
        for z, c in col.items():
            if c:
                rho[(z, y)] = c
    return rho


def _quadratic_basis(frame: _Frame):
    """Canonical weight-one quadratics in the physical generators."""
    ctx = frame.ctx
    singles = [(k, i, 0) for k in (BETA, GAMMA) for i in range(1, ctx.n_bg + 1)] + \
              [(k, i, 0) for k in (BF, CF) for i in range(1, ctx.n_bc + 1)]
    out = []
    for a in range(len(singles)):
        for b in range(a, len(singles)):
            fa, fb = singles[a], singles[b]
            if a == b and fa[0] in (BF, CF):
                continue
            out.append((fa, fb))
    return out


class _CurrentSolver:
    """Solves X_(0) = rho on the generator atoms for weight-one quadratics."""

    def __init__(self, frame: _Frame):
        self.frame = frame
        self.quads = _quadratic_basis(frame)
        phys_to_atom = {}
        for idx, (sign, kind, i) in enumerate(frame.atom_phys):
            phys_to_atom[(kind, i)] = (idx, sign)
        # rows[(j, x)] = {quad index: coefficient of atom_j in Q_(0) atom_x},
        # matching the (result, argument) keying of the module maps
        self.rows: dict = {}
        for qi, quad in enumerate(self.quads):
            for x, (sx, kx, ix) in enumerate(frame.atom_phys):
                poly = _modes_terms(quad, ((kx, ix, 0),)).get(0)
                if not poly:
                    continue
                for term, c in poly.items():
                    (kt, it, dt), = term
                    j, sj = phys_to_atom[(kt, it)]
                    key = (j, x)
                    row = self.rows.setdefault(key, {})
                    row[qi] = row.get(qi, Fraction(0)) + sx * c * Fraction(1, sj)

    def solve(self, rho: dict) -> FieldPoly:
        eqs = []
        keys = set(self.rows) | set(rho)
        for key in sorted(keys):
            eqs.append((self.rows.get(key, {}), Fraction(rho.get(key, 0))))
        try:
            sol = solve_exact(eqs)
        except ValueError as exc:
            raise RealizationSolveError(f"current normalization solve failed: {exc}") from exc
        terms = {}
        for qi, c in sol.items():
            if c:
                terms[self.quads[qi]] = c
        return FieldPoly(self.frame.ctx, terms)


@dataclass
class AffineRealization:
    """Currents of one algebra at a fixed level inside a free-field context."""

    algebra: LieSuperAlgebra
    level: Fraction
    ctx: FreeFieldContext
    currents: dict          # basis index -> FieldPoly

    def current_of(self, coeffs) -> FieldPoly:
        out = FieldPoly.zero(self.ctx)
        for i, c in coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs):
            if c:
                out = out + Fraction(c) * self.currents[i]
        return out


@dataclass
class RealizationPair:
    family: str
    n: int
    m: int
    r: int
    inner: AffineRealization
    coset: AffineRealization

    @property
    def ctx(self) -> FreeFieldContext:
        return self.inner.ctx


@dataclass
class VerifyReport:
    label: str
    pairs_checked: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json_obj(self) -> dict:
        return {
            "label": self.label,
            "pairs_checked": self.pairs_checked,
            "failures": [
                {"pair": list(f["pair"]), "defect": f["defect"],
                 "discrepancy": f["discrepancy"].to_json_obj()}
                for f in self.failures
            ],
            "ok": self.ok,
        }


def verify_affine_ope(real: AffineRealization) -> VerifyReport:
    """Check every ordered current pair against the level-k current OPE."""
    g = real.algebra
    failures = []
    zero = FieldPoly.zero(real.ctx)
    for i in range(g.dim):
        for j in range(g.dim):
            r = ope(real.currents[i], real.currents[j])
            for p in r.poles:
                if p > 2:
                    failures.append({"pair": (i, j), "defect": f"pole_{p}",
                                     "discrepancy": r.pole(p)})
            expect2 = FieldPoly.identity(real.ctx, real.level * g.form[i][j])
            diff2 = r.pole(2) - expect2
            if not diff2.is_zero():
                failures.append({"pair": (i, j), "defect": "pole_2",
                                 "discrepancy": diff2})
            expect1 = real.current_of(g.bracket_basis(i, j))
            diff1 = r.pole(1) - expect1
            if not diff1.is_zero():
                failures.append({"pair": (i, j), "defect": "pole_1",
                                 "discrepancy": diff1})
    return VerifyReport(f"affine[{g.name} k={real.level}]", g.dim ** 2, failures)


def verify_coset(pair: RealizationPair) -> VerifyReport:
    """All inner-by-coset OPEs must be regular."""
    failures = []
    count = 0
    for i, xi in sorted(pair.inner.currents.items()):
        for j, yj in sorted(pair.coset.currents.items()):
            count += 1
            r = ope(xi, yj)
            for p, poly in sorted(r.poles.items()):
                failures.append({"pair": (i, j), "defect": f"pole_{p}",
                                 "discrepancy": poly})
    return VerifyReport(f"coset[{pair.family} n={pair.n} m={pair.m} r={pair.r}]",
                        count, failures)


def sugawara(real: AffineRealization) -> FieldPoly:
    """Canonical conformal vector of the current algebra.

    For a simple (super)algebra this is 1/(2(k+h)) sum_i (-1)^{p_i}
    :X^{xi_i} X^{xi'_i}: with the plain dual basis; the Koszul sign on odd
    pairs matches the invariant Casimir tensor.  gl_n splits into its
    traceless part plus the Heisenberg vector of the trace current.
    """
    g = real.algebra
    k = real.level
    if g.family == "gl":
        return _sugawara_gl(real)
    if k + g.h_dual == 0:
        raise CriticalLevelError(f"critical level k = {k} for {g.name}")
    duals = dual_basis(g)
    out = FieldPoly.zero(real.ctx)
    for i in range(g.dim):
        sign = -1 if g.parity(i) == ODD else 1
        out = out + Fraction(sign) * normal_order(
            real.currents[i], real.current_of(duals[i].coeffs))
    return Fraction(1, 2) / (k + g.h_dual) * out


def _sugawara_gl(real: AffineRealization) -> FieldPoly:
    g = real.algebra
    k = real.level
    (n,) = g.params
    if k == 0:
        raise CriticalLevelError("gl trace current is critical at level 0")
    if n > 1 and k + n == 0:
        raise CriticalLevelError(f"critical level k = {k} for sl_{n} part")
    label_to_idx = {b.label: b.index for b in g.basis}
    # traceless part mapped through the sl_n basis
    out = FieldPoly.zero(real.ctx)
    if n > 1:
        sl = build_algebra("sl", n=n)
        sl_in_gl = []
        for b in sl.basis:
            coeffs = [Fraction(0)] * g.dim
            if b.label.startswith("E_"):
                coeffs[label_to_idx[b.label]] = Fraction(1)
            else:
                i = int(b.label.split("_")[1])
                coeffs[label_to_idx[f"E_{i}_{i}"]] = Fraction(1)
                coeffs[label_to_idx[f"E_{i + 1}_{i + 1}"]] = Fraction(-1)
            sl_in_gl.append(coeffs)
        duals = dual_basis(sl)
        for i in range(sl.dim):
            dual_coeffs = [Fraction(0)] * g.dim
            for j, c in enumerate(duals[i].coeffs):
                if c:
                    dual_coeffs = [a + c * b for a, b in zip(dual_coeffs, sl_in_gl[j])]
            out = out + normal_order(real.current_of(sl_in_gl[i]),
                                     real.current_of(dual_coeffs))
        out = Fraction(1, 2) / (k + n) * out
    trace = [Fraction(0)] * g.dim
    for i in range(1, n + 1):
        trace[label_to_idx[f"E_{i}_{i}"]] = Fraction(1)
    j_current = real.current_of(trace)
    out = out + Fraction(1, 2) / (k * n) * normal_order(j_current, j_current)
    return out


def central_charge_formula(real: AffineRealization) -> Fraction:
    g = real.algebra
    k = real.level
    if g.family == "gl":
        (n,) = g.params
        c = Fraction(1)
        if n > 1:
            c += k * (n * n - 1) / (k + n)
        return c
    return k * g.sdim / (k + g.h_dual)


@dataclass
class EmbeddingReport:
    pair: RealizationPair
    identity_defect: FieldPoly
    c_inner: Fraction
    c_coset: Fraction
    c_expected: Fraction

    @property
    def ok(self) -> bool:
        return self.identity_defect.is_zero() and \
            self.c_inner + self.c_coset == self.c_expected

    def to_json_obj(self) -> dict:
        return {
            "identity_defect": self.identity_defect.to_json_obj(),
            "c_inner": str(self.c_inner),
            "c_coset": str(self.c_coset),
            "c_sum_expected": str(self.c_expected),
            "ok": self.ok,
        }


def verify_conformal_embedding(pair: RealizationPair) -> EmbeddingReport:
    """The two Sugawara vectors must sum to the free-field conformal vector."""
    if pair.inner.ctx != pair.coset.ctx:
        raise MismatchedContextError("realizations live in different contexts")
    total = sugawara(pair.inner) + sugawara(pair.coset)
    defect = total - virasoro_total(pair.ctx)
    n, m, r = pair.n, pair.m, pair.r
    expected = Fraction(-n * m + 2 * n * r) if pair.family == "s2" \
        else Fraction(-n * m + n * r)
    return EmbeddingReport(pair, defect,
                           central_charge_formula(pair.inner),
                           central_charge_formula(pair.coset),
                           expected)


def build_realization(family: str, n: int, m: int, r: int,
                      verify: bool = True) -> RealizationPair:
    """Construct the inner/coset current pair on the free-field context.

    Levels are (-m/2 + r, n) for the orthosymplectic family "s2" and
    (-m + r, n) for the type-A family "s1".  With verify=True (the default)
    the affine OPEs of both realizations and the mutual regularity are
    checked exactly and any failure raises.
    """
    if family not in ("s1", "s2"):
        raise UsageError(f"unknown realization family {family!r}")
    if n < 1 or r < 1 or m < 0:
        raise UsageError(f"parameters out of range: n={n} m={m} r={r}")

    if family == "s2":
        frame = _frame_s2(n, m, r)
        inner_alg = build_algebra("sp", n=n)
        coset_alg = build_algebra("osp", m=m, n=r)
        inner_level = Fraction(-m, 2) + r
        coset_level = Fraction(n)
        copies, slots = m + 2 * r, 2 * n
    else:
        frame = _frame_s1(n, m, r)
        inner_alg = build_algebra("gl", n=n)
        coset_alg = build_algebra("sl_super", r=r, m=m)
        inner_level = Fraction(-m + r)
        coset_level = Fraction(n)
        copies, slots = r + m, n

    solver = _CurrentSolver(frame)

    def inner_rho(mat):
        rho = {}
        for A in range(copies):
            base = A * slots
            for i in range(slots):
                for j in range(slots):
                    if mat[j][i]:
                        rho[(base + j, base + i)] = mat[j][i]
        return rho

    def coset_rho(mat):
        rho = {}
        for A in range(copies):
            for B in range(copies):
                if any(mat[B][A] for _ in (0,)) and mat[B][A]:
                    for i in range(slots):
                        rho[(B * slots + i, A * slots + i)] = mat[B][A]
        return rho

    inner_currents = {}
    for b in inner_alg.basis:
        rho = inner_rho(inner_alg.matrices[b.index])
        if family == "s1":
            rho = _complete_on_dual(frame, rho, EVEN)
        x = solver.solve(rho)
        _check_current(x, b.parity, inner_alg.name, b.label)
        inner_currents[b.index] = x

    coset_currents = {}
    for b in coset_alg.basis:
        rho = coset_rho(coset_alg.matrices[b.index])
        if family == "s1":
            rho = _complete_on_dual(frame, rho, b.parity)
        x = solver.solve(rho)
        _check_current(x, b.parity, coset_alg.name, b.label)
        coset_currents[b.index] = x

    pair = RealizationPair(
        family, n, m, r,
        AffineRealization(inner_alg, inner_level, frame.ctx, inner_currents),
        AffineRealization(coset_alg, coset_level, frame.ctx, coset_currents))

    if verify:
        for real in (pair.inner, pair.coset):
            report = verify_affine_ope(real)
            if not report.ok:
                raise RealizationSolveError(
                    f"{report.label}: {len(report.failures)} OPE defects "
                    f"(first: pair {report.failures[0]['pair']} "
                    f"{report.failures[0]['defect']})")
        mixed = verify_coset(pair)
        if not mixed.ok:
            raise RealizationSolveError(
                f"{mixed.label}: {len(mixed.failures)} nonregular mixed OPEs")
    return pair


def _check_current(x: FieldPoly, parity: int, name: str, label: str):
    if x.weight() != 1:
        raise RealizationSolveError(f"{name} current {label} is not weight one")
    if x.parity() != parity:
        raise RealizationSolveError(f"{name} current {label} has wrong parity")
