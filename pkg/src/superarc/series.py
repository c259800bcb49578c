"""Truncated graded-dimension series.

Weights live in (1/2)Z, so series are integer lists indexed by doubled
weight: entry w2 counts dimension at conformal weight w2/2.
"""

from __future__ import annotations

from math import comb


def one(w2max: int) -> list[int]:
    s = [0] * (w2max + 1)
    s[0] = 1
    return s


def mul(a: list[int], b: list[int], w2max: int) -> list[int]:
    out = [0] * (w2max + 1)
    for i, x in enumerate(a):
        if x == 0 or i > w2max:
            continue
        top = w2max - i
        for j, y in enumerate(b[: top + 1]):
            if y:
                out[i + j] += x * y
    return out


def mul_geometric(s: list[int], k: int, mult: int, w2max: int) -> list[int]:
    """Multiply by 1/(1-x^k)^mult (mult bosonic modes of doubled weight k)."""
    factor = [0] * (w2max + 1)
    t = 0
    while k * t <= w2max:
        factor[k * t] = comb(t + mult - 1, mult - 1)
        t += 1
    return mul(s, factor, w2max)


def mul_binomial(s: list[int], k: int, mult: int, w2max: int) -> list[int]:
    """Multiply by (1+x^k)^mult (mult fermionic modes of doubled weight k)."""
    factor = [0] * (w2max + 1)
    t = 0
    while k * t <= w2max and t <= mult:
        factor[k * t] = comb(mult, t)
        t += 1
    return mul(s, factor, w2max)


def free_field_character(n_bg: int, n_bc: int, w2max: int) -> list[int]:
    """Graded dimensions of the vacuum module for n_bg beta-gamma pairs and
    n_bc b-c pairs: each pair contributes two weight-1/2 generators, with
    modes at every weight in 1/2 + Z>=0."""
    s = one(w2max)
    k = 1
    while k <= w2max:
        if n_bg:
            s = mul_geometric(s, k, 2 * n_bg, w2max)
        if n_bc:
            s = mul_binomial(s, k, 2 * n_bc, w2max)
        k += 2
    return s


def free_differential_character(gens: list[tuple[bool, int]], w2max: int) -> list[int]:
    """Graded dimensions of the free differential superpolynomial algebra.

    `gens` lists (is_odd, doubled weight); each generator of doubled weight
    w contributes one variable at every doubled weight w, w+2, w+4, ...
    """
    s = one(w2max)
    for is_odd, w2 in gens:
        k = w2
        while k <= w2max:
            if is_odd:
                s = mul_binomial(s, k, 1, w2max)
            else:
                s = mul_geometric(s, k, 1, w2max)
            k += 2
    return s
