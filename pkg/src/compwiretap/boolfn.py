"""Core representations of real-valued Boolean functions on {-1,+1}^n.

Two dual views of a function are provided:

* :class:`TruthTable` -- dense evaluation on all 2**n points.
* :class:`MultilinearPolynomial` -- sparse Fourier expansion, a map from
  variable subsets (bit masks) to real coefficients.

Index/point convention, used everywhere in this package: the table index
``i`` encodes the point ``x`` with ``x_j = +1`` if bit ``(j-1)`` of ``i``
is 0, and ``x_j = -1`` if that bit is 1.  With this convention the
character ``x^S`` evaluated at index ``i`` equals ``(-1)**popcount(i & S)``
where mask ``S`` has bit ``(j-1)`` set for each variable ``j`` in the
subset.

Coefficients coming out of the fast transform are floats; coefficients
built from exact rationals (see :mod:`compwiretap.funcdsl`) are stored as
:class:`fractions.Fraction` and survive arithmetic exactly.  Both kinds
mix freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

#: Largest supported number of variables for dense tables (128 MiB of
#: 8-byte reals).  Larger n is rejected with a clear error.
MAX_N = 24

#: Coefficients with absolute value at or below this are dropped after a
#: floating-point transform (denormal dust).
PRUNE_TOL = 1e-12

#: Tolerance for deciding that a table value is +1 or -1.
BOOLEAN_TOL = 1e-9


class PreconditionError(ValueError):
    """A mathematical precondition of an operation does not hold."""


def _check_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if n > MAX_N:
        raise ValueError(
            f"n = {n} exceeds the dense enumeration cap of {MAX_N}")
    return int(n)


@dataclass(frozen=True)
class TruthTable:
    """Dense evaluation of a function on all 2**n points of {-1,+1}^n."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (1 << self.n,):
            raise ValueError(
                f"expected {1 << self.n} values for n={self.n}, "
                f"got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("table values must be finite")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, values) -> "TruthTable":
        """Build a table from a flat sequence, inferring n from its length."""
        values = np.asarray(values, dtype=np.float64)
        size = values.size
        if size < 2 or size & (size - 1):
            raise ValueError(f"table length {size} is not a power of two >= 2")
        return cls(size.bit_length() - 1, values)

    @classmethod
    def from_function(cls, n: int, fn) -> "TruthTable":
        """Evaluate ``fn(point)`` on every point, ``point`` a ±1 tuple."""
        _check_n(n)
        vals = [fn(tuple(index_to_point(i, n))) for i in range(1 << n)]
        return cls(n, np.array(vals, dtype=np.float64))

    def point(self, index: int) -> tuple:
        """The ±1 point encoded by ``index`` under the shared convention."""
        return index_to_point(index, self.n)

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)


def index_to_point(index: int, n: int) -> tuple:
    """Decode a table index into its ±1 point (variable 1 first)."""
    return tuple(1 - 2 * ((index >> j) & 1) for j in range(n))


def point_to_index(point) -> int:
    """Encode a ±1 point as a table index (inverse of index_to_point)."""
    index = 0
    for j, x in enumerate(point):
        if x == -1:
            index |= 1 << j
        elif x != 1:
            raise ValueError(f"point entries must be ±1, got {x!r}")
    return index


def points_matrix(n: int) -> np.ndarray:
    """(2**n, n) matrix of all ±1 points in index order."""
    _check_n(n)
    idx = np.arange(1 << n, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(n, dtype=np.int64)[None, :]) & 1
    return (1 - 2 * bits).astype(np.float64)


class MultilinearPolynomial:
    """Sparse map from subset masks to real Fourier coefficients.

    Zero coefficients are never stored; masks fit in ``n`` bits.
    Coefficient values may be floats or exact Fractions.
    """

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: dict):
        n = _check_n(n)
        clean = {}
        limit = 1 << n
        for mask, value in coeffs.items():
            mask = int(mask)
            if mask < 0 or mask >= limit:
                raise ValueError(
                    f"mask {mask} does not fit in n={n} bits")
            if not isinstance(value, Real):
                raise ValueError(f"coefficient {value!r} is not a real number")
            if isinstance(value, float) and not math.isfinite(value):
                raise ValueError(f"coefficient for mask {mask} is not finite")
            if value != 0:
                clean[mask] = value
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MultilinearPolynomial is immutable")

    def __eq__(self, other):
        if not isinstance(other, MultilinearPolynomial):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __repr__(self):
        return f"MultilinearPolynomial(n={self.n}, terms={len(self.coeffs)})"

    def with_n(self, n: int) -> "MultilinearPolynomial":
        """The same polynomial viewed over n >= current variables."""
        if n < self.n:
            used = 0
            for mask in self.coeffs:
                used |= mask
            if used >> n:
                raise ValueError(
                    f"cannot shrink to n={n}: a term uses a higher variable")
        return MultilinearPolynomial(n, self.coeffs)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def _butterfly(a: np.ndarray) -> np.ndarray:
    """In-place Walsh-Hadamard butterfly, O(n * 2**n).

    Computes ``out[S] = sum_i (-1)**popcount(i & S) * a[i]``.
    """
    size = a.size
    h = 1
    while h < size:
        b = a.reshape(-1, 2, h)
        x = b[:, 0, :].copy()
        b[:, 0, :] += b[:, 1, :]
        b[:, 1, :] = x - b[:, 1, :]
        h <<= 1
    return a


def wht(table: TruthTable) -> MultilinearPolynomial:
    """Fourier expansion of a table: coefficients f^(S) = E[f(x) * x^S].

    The forward transform divides by 2**n once at the end, so the
    coefficients are expectations.  Coefficients with absolute value at
    most :data:`PRUNE_TOL` are dropped.
    """
    a = _butterfly(table.values.astype(np.float64))
    a /= 1 << table.n
    coeffs = {}
    for mask in np.nonzero(np.abs(a) > PRUNE_TOL)[0]:
        coeffs[int(mask)] = float(a[mask])
    return MultilinearPolynomial(table.n, coeffs)


def inverse_wht(poly: MultilinearPolynomial) -> TruthTable:
    """Dense evaluation of a polynomial on all 2**n points.

    Exact rational coefficients are converted to floats here; this is
    the single exact-to-float boundary of the package.
    """
    a = np.zeros(1 << poly.n, dtype=np.float64)
    for mask, value in poly.coeffs.items():
        a[mask] = float(value)
    return TruthTable(poly.n, _butterfly(a))


def evaluate(poly: MultilinearPolynomial, point) -> Real:
    """Evaluate the polynomial at one point: sum_S f^(S) prod_{j in S} x_j.

    The point may have arbitrary real entries (not just ±1); exactness is
    preserved when both coefficients and entries are exact.
    """
    point = tuple(point)
    if len(point) != poly.n:
        raise ValueError(
            f"point has length {len(point)}, polynomial has n={poly.n}")
    total = 0
    for mask, value in poly.coeffs.items():
        term = value
        m = mask
        while m:
            j = (m & -m).bit_length() - 1
            term = term * point[j]
            m &= m - 1
        total = total + term
    return total


def evaluate_batch(poly: MultilinearPolynomial, points: np.ndarray) -> np.ndarray:
    """Evaluate the polynomial at a (m, n) matrix of real points."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != poly.n:
        raise ValueError(
            f"expected a (m, {poly.n}) point matrix, got {points.shape}")
    out = np.zeros(points.shape[0], dtype=np.float64)
    for mask, value in poly.coeffs.items():
        if mask == 0:
            out += float(value)
            continue
        m = mask
        j = (m & -m).bit_length() - 1
        term = points[:, j].copy()
        m &= m - 1
        while m:
            j = (m & -m).bit_length() - 1
            term *= points[:, j]
            m &= m - 1
        out += float(value) * term
    return out


# ---------------------------------------------------------------------------
# Fourier-analytic quantities
# ---------------------------------------------------------------------------

def mean(poly: MultilinearPolynomial) -> Real:
    """f^(empty set), the expectation under uniform ±1 inputs."""
    return poly.coeffs.get(0, 0)


def degree(poly: MultilinearPolynomial) -> int:
    """Largest subset size with a nonzero coefficient (0 for the zero poly)."""
    return max((mask.bit_count() for mask in poly.coeffs), default=0)


def term_count(poly: MultilinearPolynomial) -> int:
    """Number of nonzero coefficients."""
    return len(poly.coeffs)


def variance(poly: MultilinearPolynomial) -> Real:
    """sum over nonempty S of f^(S)**2."""
    return sum((v * v for m, v in poly.coeffs.items() if m != 0), start=0)


def influence_spectral(poly: MultilinearPolynomial, t: int) -> Real:
    """Influence of coordinate t: sum over S containing t of f^(S)**2."""
    if not 1 <= t <= poly.n:
        raise ValueError(f"coordinate t={t} out of range 1..{poly.n}")
    bit = 1 << (t - 1)
    return sum((v * v for m, v in poly.coeffs.items() if m & bit), start=0)


def max_influence(poly: MultilinearPolynomial) -> Real:
    """max_t Inf_t, zero for the zero or constant polynomial."""
    return max(influence_spectral(poly, t) for t in range(1, poly.n + 1))


@dataclass(frozen=True)
class InfluenceProfile:
    """Per-coordinate influences with the derived summary quantities."""

    influences: tuple
    max_influence: Real
    variance: Real
    mean: Real

    def to_dict(self) -> dict:
        return {
            "influences": [float(v) for v in self.influences],
            "max_influence": float(self.max_influence),
            "variance": float(self.variance),
            "mean": float(self.mean),
        }


def influence_profile(poly: MultilinearPolynomial) -> InfluenceProfile:
    infl = tuple(influence_spectral(poly, t) for t in range(1, poly.n + 1))
    return InfluenceProfile(
        influences=infl,
        max_influence=max(infl) if infl else 0,
        variance=variance(poly),
        mean=mean(poly),
    )


def is_boolean_valued(table: TruthTable) -> bool:
    """True iff every value is within BOOLEAN_TOL of +1 or -1."""
    return bool(np.all(np.abs(np.abs(table.values) - 1.0) <= BOOLEAN_TOL))


def influence_flip(table: TruthTable, t: int) -> float:
    """Pr[f(x) != f(x with coordinate t flipped)] for ±1-valued f.

    Requires a Boolean-valued table; values within BOOLEAN_TOL of ±1 are
    treated as that sign.
    """
    if not 1 <= t <= table.n:
        raise ValueError(f"coordinate t={t} out of range 1..{table.n}")
    if not is_boolean_valued(table):
        raise PreconditionError(
            "influence_flip requires a ±1-valued table "
            f"(tolerance {BOOLEAN_TOL:g})")
    flipped = np.arange(1 << table.n) ^ (1 << (t - 1))
    # values are within 1e-9 of ±1, so pointwise differences are ~0 or ~2
    differs = np.abs(table.values - table.values[flipped]) > 1.0
    return float(np.mean(differs))


# ---------------------------------------------------------------------------
# Arithmetic
# ---------------------------------------------------------------------------

def _require_same_n(f: MultilinearPolynomial, g: MultilinearPolynomial):
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: n={f.n} vs n={g.n}")


def sub(f: MultilinearPolynomial, g: MultilinearPolynomial) -> MultilinearPolynomial:
    """f - g by subtracting coefficient maps (exact when both exact)."""
    _require_same_n(f, g)
    coeffs = dict(f.coeffs)
    for mask, value in g.coeffs.items():
        coeffs[mask] = coeffs.get(mask, 0) - value
    return MultilinearPolynomial(f.n, coeffs)


def mul(f: MultilinearPolynomial, g: MultilinearPolynomial,
        via: str = "coeffs") -> MultilinearPolynomial:
    """Product f*g as a function on {-1,+1}^n.

    ``via="coeffs"`` convolves coefficients over the symmetric difference
    of masks (x_i**2 = 1), preserving exact rationals.  ``via="table"``
    multiplies dense tables pointwise and transforms back; the two paths
    agree within 1e-10 and the table path is the reference.
    """
    _require_same_n(f, g)
    if via == "coeffs":
        coeffs = {}
        for m1, v1 in f.coeffs.items():
            for m2, v2 in g.coeffs.items():
                mask = m1 ^ m2
                coeffs[mask] = coeffs.get(mask, 0) + v1 * v2
        return MultilinearPolynomial(f.n, coeffs)
    if via == "table":
        ft, gt = inverse_wht(f), inverse_wht(g)
        return wht(TruthTable(f.n, ft.values * gt.values))
    raise ValueError(f"unknown multiplication path {via!r}")
