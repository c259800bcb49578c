"""Exact sparse linear algebra over the rationals.

Vectors are dicts mapping an orderable column key to a nonzero Fraction.
All reductions eliminate on the smallest column first, so ranks, kernels
and echelon rows are deterministic for a fixed key order.
"""

from __future__ import annotations

from fractions import Fraction


def vec_add(dst: dict, src: dict, scale=1) -> dict:
    """dst += scale * src, dropping zero entries. Mutates and returns dst."""
    if scale == 0:
        return dst
    for k, v in src.items():
        nv = dst.get(k, 0) + scale * v
        if nv:
            dst[k] = nv
        else:
            dst.pop(k, None)
    return dst


def vec_scale(v: dict, c) -> dict:
    if c == 0:
        return {}
    return {k: c * x for k, x in v.items()}


class EchelonBasis:
    """Incremental row-echelon accumulator.

    Rows are stored monic, keyed by their pivot (smallest) column. A new
    vector is forward-reduced against existing rows; if anything survives
    it becomes a new pivot row.
    """

    def __init__(self):
        self.rows: dict = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        """Reduce the leading column until it is pivot-free (rank/membership
        use only; the residue may still touch non-leading pivot columns)."""
        vec = dict(vec)
        while vec:
            lead = min(vec)
            row = self.rows.get(lead)
            if row is None:
                return vec
            vec_add(vec, row, -vec[lead])
        return vec

    def reduce_full(self, vec: dict) -> dict:
        """Canonical residue: every pivot column is eliminated.

        Rows only touch columns at or above their pivot, so eliminating
        pivot columns in increasing order terminates.
        """
        vec = dict(vec)
        while True:
            hits = [c for c in vec if c in self.rows]
            if not hits:
                return vec
            col = min(hits)
            vec_add(vec, self.rows[col], -vec[col])

    def insert(self, vec: dict):
        """Insert a vector; return its pivot column, or None if dependent."""
        res = self.reduce(vec)
        if not res:
            return None
        lead = min(res)
        inv = Fraction(1, 1) / res[lead]
        self.rows[lead] = {k: x * inv for k, x in res.items()}
        return lead

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)


def rank_of(vectors) -> int:
    eb = EchelonBasis()
    for v in vectors:
        eb.insert(v)
    return eb.rank


def kernel_coefficients(vectors: list) -> list[dict]:
    """Coefficient vectors lambda with sum_i lambda_i * vectors[i] = 0.

    Returned dicts map input indices to Fractions; the basis is the one
    produced by forward elimination in input order, deterministically.
    """
    rows: dict = {}
    out: list[dict] = []
    for i, v in enumerate(vectors):
        vec = dict(v)
        aug = {i: Fraction(1)}
        while vec:
            lead = min(vec)
            pair = rows.get(lead)
            if pair is None:
                break
            rv, ra = pair
            c = vec[lead]
            vec_add(vec, rv, -c)
            vec_add(aug, ra, -c)
        if vec:
            lead = min(vec)
            inv = Fraction(1, 1) / vec[lead]
            rows[lead] = ({k: x * inv for k, x in vec.items()},
                          {k: x * inv for k, x in aug.items()})
        else:
            out.append(aug)
    return out


def rref_rows(vectors: list) -> list[dict]:
    """Fully reduced row-echelon basis of the span, sorted by pivot column."""
    eb = EchelonBasis()
    for v in vectors:
        eb.insert(v)
    pivots = sorted(eb.rows)
    # back-substitute so each pivot column appears in exactly one row
    reduced: dict = {}
    for p in reversed(pivots):
        row = dict(eb.rows[p])
        for q in [k for k in row if k != p and k in reduced]:
            vec_add(row, reduced[q], -row[q])
        reduced[p] = row
    return [reduced[p] for p in pivots]


def solve_exact(equations: list[tuple[dict, Fraction]]) -> dict:
    """Solve a linear system given as (coefficient-row, rhs) pairs.

    Returns the unique solution as a dict over the unknown keys appearing in
    the rows. Raises ValueError on inconsistency, and on underdetermined
    systems (any unknown column left without a pivot).
    """
    rows: dict = {}
    unknowns = set()
    for coeffs, rhs in equations:
        unknowns.update(coeffs)
        vec = dict(coeffs)
        b = rhs
        while vec:
            lead = min(vec)
            pair = rows.get(lead)
            if pair is None:
                break
            rv, rb = pair
            c = vec[lead]
            vec_add(vec, rv, -c)
            b = b - c * rb
        if vec:
            lead = min(vec)
            inv = Fraction(1, 1) / vec[lead]
            rows[lead] = ({k: x * inv for k, x in vec.items()}, b * inv)
        elif b != 0:
            raise ValueError("inconsistent linear system")
    missing = unknowns - set(rows)
    if missing:
        raise ValueError(f"underdetermined system; free unknowns: {sorted(missing)[:4]}")
    sol: dict = {}
    for p in sorted(rows, reverse=True):
        rv, rb = rows[p]
        val = rb
        for k, c in rv.items():
            if k != p:
                val -= c * sol[k]
        sol[p] = val
    return sol
