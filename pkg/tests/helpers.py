"""Shared generators and brute-force oracles for the test suite.

Oracles here deliberately use plain Python enumeration (no package
transforms) so they stay independent of the code paths they check.
"""

from fractions import Fraction
from itertools import product

import numpy as np

from compwiretap import MultilinearPolynomial, TruthTable


def maj3_table() -> TruthTable:
    def maj(point):
        return 1.0 if sum(point) > 0 else -1.0
    return TruthTable.from_function(3, maj)


def maj3_poly() -> MultilinearPolynomial:
    half = Fraction(1, 2)
    return MultilinearPolynomial(
        3, {0b001: half, 0b010: half, 0b100: half, 0b111: -half})


# The parity/threshold pair below is the worked Z-channel example: the
# induced posterior flips -1 to +1 with probability 1/4 and never flips
# +1, i.e. a Z-channel from Eve's point of view.

def zchannel_f_poly() -> MultilinearPolynomial:
    return MultilinearPolynomial(3, {0b111: Fraction(1)})


def zchannel_g_poly() -> MultilinearPolynomial:
    q = Fraction(1, 4)
    return MultilinearPolynomial(3, {
        0b000: q, 0b001: -q, 0b010: -q, 0b100: -q,
        0b011: q, 0b101: q, 0b110: q, 0b111: 3 * q,
    })


def chain_pair_polys(n: int):
    """f = (1/n) sum x_i x_{i+1}, g = (1/n) sum x_i."""
    inv = Fraction(1, n)
    f = MultilinearPolynomial(
        n, {(0b11 << i): inv for i in range(n - 1)})
    g = MultilinearPolynomial(n, {(1 << i): inv for i in range(n)})
    return f, g


def random_boolean_table(rng: np.random.Generator, n: int) -> TruthTable:
    return TruthTable(n, rng.integers(0, 2, 1 << n) * 2.0 - 1.0)


def random_rational_poly(rng: np.random.Generator, n: int,
                         max_degree: int | None = None,
                         max_terms: int = 8,
                         denominator: int = 24) -> MultilinearPolynomial:
    """Random sparse polynomial with small exact-rational coefficients.

    Every coefficient has |c| <= 4/24 = 1/6 (colliding masks overwrite,
    they never accumulate), so with the defaults the variance is at most
    8 * (1/6)**2 < 1/4.
    """
    coeffs = {}
    n_terms = int(rng.integers(1, max_terms + 1))
    for _ in range(n_terms):
        while True:
            mask = int(rng.integers(0, 1 << n))
            if max_degree is None or mask.bit_count() <= max_degree:
                break
        num = int(rng.integers(-4, 5))
        if num:
            coeffs[mask] = Fraction(num, denominator)
    return MultilinearPolynomial(n, coeffs)


# ---------------------------------------------------------------------------
# Brute-force oracles (pure Python enumeration)
# ---------------------------------------------------------------------------

def all_points(n: int):
    """All ±1 points in table-index order (variable 1 varies fastest)."""
    for index in range(1 << n):
        yield tuple(1 - 2 * ((index >> j) & 1) for j in range(n))


def eval_poly_at(coeffs: dict, point) -> Fraction:
    total = Fraction(0)
    for mask, value in coeffs.items():
        term = Fraction(value)
        for j, x in enumerate(point):
            if mask >> j & 1:
                term *= x
        total += term
    return total


def brute_joint(f_values, g_values):
    """Exact joint Pr(u=g, v=f) as {(u, v): Fraction} from value lists."""
    size = len(f_values)
    counts = {}
    for fv, gv in zip(f_values, g_values):
        key = (gv, fv)
        counts[key] = counts.get(key, 0) + 1
    return {(u, v): Fraction(c, size) for (u, v), c in counts.items()}


def brute_success_probability(f_values, g_values) -> Fraction:
    """sum over v of max_u Pr(u, v), by direct counting."""
    joint = brute_joint(f_values, g_values)
    v_values = {v for (_, v) in joint}
    total = Fraction(0)
    for v in v_values:
        total += max(p for (u, vv), p in joint.items() if vv == v)
    return total


def brute_commutes(f_values, g_values) -> bool:
    fibers = {}
    for fv, gv in zip(f_values, g_values):
        fibers.setdefault(fv, set()).add(gv)
    return all(len(us) == 1 for us in fibers.values())
