"""Smooth-test invariance bounds and their Monte Carlo verification.

For a multilinear polynomial F of degree k and a C^4 test function psi
with sup|psi''''| <= C, the gap |E[psi(F(x))] - E[psi(F(y))]| between
independent input ensembles satisfying the moment hypothesis (mean 0,
second moment 1, third moment 0, fourth moment <= 9) is bounded by

    basic:        (C/12) * 9**k * sum_t Inf_t[F]**2
    low-influence: (C/12) * k * 9**k * eps      (Var[F] <= 1, Inf_t <= eps)

and for a pair (f, g) the noise decompositions obey

    additive  (N = f - g):  (C/3) * k * 9**k * eps,        k = k1*k2
    multiplicative (N = fg): (C/3) * k * l * 9**k * eps,   l = l1*l2

with k1, k2 the degrees, l1, l2 the term counts and eps a common bound
on every coordinate influence of f and g.  The left side is computed
exactly on ±1 inputs by enumeration; the Gaussian side is estimated by
seeded Monte Carlo, and a report compares the measured gap against the
bound with a confidence allowance of z standard errors.

The bound formulas keep exact rational arithmetic until the final
float conversion, so dyadic results are bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import ndtri

from .boolfn import (
    MultilinearPolynomial,
    PreconditionError,
    degree,
    evaluate_batch,
    influence_spectral,
    inverse_wht,
    is_boolean_valued,
    max_influence,
    mul,
    sub,
    term_count,
    variance,
)

#: Slack used when checking the lemma inequalities numerically.
LEMMA_SLACK = 1e-10

_VAR_QUARTER_TOL = 1e-12


def _frac(x) -> Fraction:
    """Exact rational view of a coefficient-derived quantity."""
    return x if isinstance(x, Fraction) else Fraction(float(x))


# ---------------------------------------------------------------------------
# Test functions and input distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """A C^4 test function with a known bound on sup|psi''''|."""

    name: str
    fn: Callable
    c4: float

    def __post_init__(self):
        if not (self.c4 >= 0 and math.isfinite(self.c4)):
            raise ValueError(f"c4 must be finite and >= 0, got {self.c4!r}")


PSI_CATALOG = {
    "identity": TestFunction("identity", lambda t: np.asarray(t, dtype=np.float64), 0.0),
    "square": TestFunction("square", np.square, 0.0),
    "cos": TestFunction("cos", np.cos, 1.0),
    "sin": TestFunction("sin", np.sin, 1.0),
    "quartic": TestFunction("quartic", lambda t: np.asarray(t, dtype=np.float64) ** 4, 24.0),
}


def _resolve_psi(psi) -> tuple:
    """Accept a TestFunction, a catalog name, or a bare callable."""
    if isinstance(psi, TestFunction):
        return psi.name, psi.fn
    if isinstance(psi, str):
        if psi not in PSI_CATALOG:
            raise ValueError(
                f"unknown test function {psi!r}; "
                f"choices: {sorted(PSI_CATALOG)}")
        tf = PSI_CATALOG[psi]
        return tf.name, tf.fn
    return getattr(psi, "__name__", "psi"), psi


@dataclass(frozen=True)
class InputDistribution:
    """A coordinate distribution with a seeded sampler.

    ``exact_moments`` holds (E[x], E[x^2], E[x^3], E[x^4]) when known in
    closed form.
    """

    name: str
    sampler: Callable  # (numpy Generator, size) -> ndarray
    exact_moments: tuple | None = None


DISTRIBUTIONS = {
    "rademacher": InputDistribution(
        "rademacher",
        lambda rng, size: rng.integers(0, 2, size) * 2.0 - 1.0,
        (0.0, 1.0, 0.0, 1.0)),
    "gaussian": InputDistribution(
        "gaussian",
        lambda rng, size: rng.standard_normal(size),
        (0.0, 1.0, 0.0, 3.0)),
    # Uniform on {-2, +2}: mean and third moment vanish but the second
    # moment is 4, deliberately violating the moment hypothesis.
    "uniform_pm2": InputDistribution(
        "uniform_pm2",
        lambda rng, size: (rng.integers(0, 2, size) * 2.0 - 1.0) * 2.0,
        (0.0, 4.0, 0.0, 16.0)),
}


@dataclass(frozen=True)
class MomentReport:
    """First four moments of a coordinate distribution with pass flags.

    ``moments`` are the declared exact moments when the distribution has
    them (stderrs are then zero); otherwise the empirical estimates.
    The sampled estimates are always included for cross-checking.
    """

    distribution: str
    samples: int
    seed: int
    moments: tuple
    stderrs: tuple
    empirical_moments: tuple
    empirical_stderrs: tuple
    flags: tuple
    passed: bool
    exact: bool

    def to_dict(self) -> dict:
        return {
            "distribution": self.distribution,
            "samples": self.samples,
            "seed": self.seed,
            "moments": list(self.moments),
            "stderrs": list(self.stderrs),
            "empirical_moments": list(self.empirical_moments),
            "empirical_stderrs": list(self.empirical_stderrs),
            "flags": list(self.flags),
            "passed": self.passed,
            "exact": self.exact,
        }


def _moment_flags(moments, stderrs) -> tuple:
    m1, m2, m3, m4 = moments
    s1, s2, s3, s4 = stderrs
    return (
        abs(m1 - 0.0) <= 5 * s1,
        abs(m2 - 1.0) <= 5 * s2,
        abs(m3 - 0.0) <= 5 * s3,
        m4 <= 9.0 + 5 * s4,
    )


def hypothesis_check(dist: InputDistribution, samples: int = 100_000,
                     seed: int = 0) -> MomentReport:
    """Check the moment hypothesis: E[x]=0, E[x^2]=1, E[x^3]=0, E[x^4]<=9.

    Each moment is tested with tolerance 5 standard errors; declared
    exact moments are tested exactly (zero stderr).
    """
    if samples < 10_000:
        raise PreconditionError(f"need at least 10^4 samples, got {samples}")
    rng = np.random.default_rng(seed)
    x = np.asarray(dist.sampler(rng, samples), dtype=np.float64)
    emp_moments = []
    emp_stderrs = []
    for k in range(1, 5):
        p = x ** k
        emp_moments.append(float(np.mean(p)))
        emp_stderrs.append(float(np.std(p, ddof=1) / math.sqrt(samples)))
    if dist.exact_moments is not None:
        moments = tuple(float(m) for m in dist.exact_moments)
        stderrs = (0.0, 0.0, 0.0, 0.0)
        exact = True
    else:
        moments = tuple(emp_moments)
        stderrs = tuple(emp_stderrs)
        exact = False
    flags = _moment_flags(moments, stderrs)
    return MomentReport(
        distribution=dist.name,
        samples=samples,
        seed=seed,
        moments=moments,
        stderrs=stderrs,
        empirical_moments=tuple(emp_moments),
        empirical_stderrs=tuple(emp_stderrs),
        flags=flags,
        passed=all(flags),
        exact=exact,
    )


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def _check_c4(c4):
    if not (c4 >= 0 and math.isfinite(c4)):
        raise ValueError(f"C must be finite and >= 0, got {c4!r}")


def basic_bound(poly: MultilinearPolynomial, c4) -> float:
    """(C/12) * 9**k * sum_t Inf_t[F]**2 with k = degree(F)."""
    _check_c4(c4)
    k = degree(poly)
    infl_sq = sum(
        (_frac(influence_spectral(poly, t)) ** 2
         for t in range(1, poly.n + 1)),
        start=Fraction(0))
    return float(_frac(c4) * Fraction(9 ** k, 12) * infl_sq)


def corollary_bound(poly: MultilinearPolynomial, c4, eps) -> float:
    """(C/12) * k * 9**k * eps, requiring Var[F] <= 1 and all Inf_t <= eps."""
    _check_c4(c4)
    var = variance(poly)
    if float(var) > 1.0 + 1e-12:
        raise PreconditionError(f"Var[F] = {float(var)} exceeds 1")
    eps_f = _frac(eps)
    for t in range(1, poly.n + 1):
        inf_t = _frac(influence_spectral(poly, t))
        if inf_t > eps_f + Fraction(1, 10 ** 12):
            raise PreconditionError(
                f"Inf_{t}[F] = {float(inf_t)} exceeds eps = {float(eps_f)}")
    k = degree(poly)
    return float(_frac(c4) * Fraction(k * 9 ** k, 12) * eps_f)


def _pair_epsilon(f: MultilinearPolynomial, g: MultilinearPolynomial) -> Fraction:
    return max(_frac(max_influence(f)), _frac(max_influence(g)))


def _degree_at_least_one(poly: MultilinearPolynomial) -> int:
    # A constant is a polynomial of degree at most 1; taking k_i >= 1
    # keeps the k = k1*k2 exponent from collapsing to zero.
    return max(degree(poly), 1)


def additive_bound(f: MultilinearPolynomial, g: MultilinearPolynomial,
                   c4) -> float:
    """(C/3) * k * 9**k * eps for the noise N = f - g, with k = k1*k2.

    Requires Var[f] <= 1/4 and Var[g] <= 1/4; eps is the largest
    coordinate influence over both functions, and k1, k2 are the degrees
    (taken as at least 1).
    """
    _check_c4(c4)
    for name, poly in (("f", f), ("g", g)):
        var = float(variance(poly))
        if var > 0.25 + _VAR_QUARTER_TOL:
            raise PreconditionError(f"Var[{name}] = {var} exceeds 1/4")
    k = _degree_at_least_one(f) * _degree_at_least_one(g)
    eps = _pair_epsilon(f, g)
    return float(_frac(c4) * Fraction(k * 9 ** k, 3) * eps)


def multiplicative_bound(f: MultilinearPolynomial, g: MultilinearPolynomial,
                         c4, use_product_degree: bool = False) -> float:
    """(C/3) * k * l * 9**k * eps for the noise N = f*g.

    Requires ±1-valued f and g.  By default k = deg(f)*deg(g) and
    l = terms(f)*terms(g), degrees taken as at least 1; with
    ``use_product_degree`` the exponent uses k = deg(f*g) instead, which
    is never larger and often far smaller.
    """
    _check_c4(c4)
    for name, poly in (("f", f), ("g", g)):
        if not is_boolean_valued(inverse_wht(poly)):
            raise PreconditionError(f"{name} is not ±1-valued")
    if use_product_degree:
        k = max(degree(mul(f, g)), 1)
    else:
        k = _degree_at_least_one(f) * _degree_at_least_one(g)
    l = term_count(f) * term_count(g)
    eps = _pair_epsilon(f, g)
    return float(_frac(c4) * Fraction(k * l * 9 ** k, 3) * eps)


# ---------------------------------------------------------------------------
# Expectations: exact ±1 side and Gaussian Monte Carlo side
# ---------------------------------------------------------------------------

def expect_exact(poly: MultilinearPolynomial, psi) -> float:
    """E[psi(F(x))] for uniform ±1 x, by dense enumeration."""
    _, fn = _resolve_psi(psi)
    table = inverse_wht(poly)
    return float(np.mean(np.asarray(fn(table.values), dtype=np.float64)))


# Counter-based sample generation: the Gaussian for (sample i, coordinate
# j) is a pure function of (seed, i, j) -- a splitmix64-style mix of the
# three words produces a 53-bit uniform that is mapped through the normal
# quantile.  Samples can therefore be produced in any chunking (or by any
# number of workers) with bit-identical results.

_CHUNK = 1 << 16
_K_INDEX = 0x9E3779B97F4A7C15
_K_COORD = 0xC2B2AE3D27D4EB4F
_K_SEED = 0xD6E8FEB86659FD93
_MASK64 = (1 << 64) - 1


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@lru_cache(maxsize=32)
def _gaussian_chunk(seed: int, n: int, start: int, length: int) -> np.ndarray:
    """Standard-Gaussian block for sample indices [start, start+length)."""
    idx = np.arange(start, start + length, dtype=np.uint64)[:, None]
    coord = np.arange(n, dtype=np.uint64)[None, :]
    base = np.uint64((seed * _K_SEED) & _MASK64)
    z = idx * np.uint64(_K_INDEX) + coord * np.uint64(_K_COORD) + base
    z = _mix64(z)
    z = _mix64(z + np.uint64(_K_INDEX))
    uniform = ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
    gauss = ndtri(uniform)
    gauss.flags.writeable = False
    return gauss


def expect_gaussian_mc(poly: MultilinearPolynomial, psi, samples: int,
                       seed: int = 0) -> tuple:
    """Monte Carlo estimate of E[psi(F(g))] with g i.i.d. standard normal.

    Returns (estimate, standard error).  Identical (seed, samples) give
    bit-identical results: samples are generated by the per-index counter
    scheme above and reduced chunkwise in a fixed order.
    """
    if samples < 1000:
        raise PreconditionError(f"need at least 10^3 samples, got {samples}")
    if not 0 <= seed < (1 << 64):
        raise ValueError("seed must be an unsigned 64-bit integer")
    _, fn = _resolve_psi(psi)
    total = 0.0
    total_sq = 0.0
    for start in range(0, samples, _CHUNK):
        length = min(_CHUNK, samples - start)
        block = _gaussian_chunk(seed, poly.n, start, length)
        vals = np.asarray(fn(evaluate_batch(poly, block)), dtype=np.float64)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
    estimate = total / samples
    var = max(0.0, (total_sq - samples * estimate * estimate) / (samples - 1))
    return estimate, math.sqrt(var / samples)


@dataclass(frozen=True)
class InvarianceReport:
    """Exact ±1 expectation vs Gaussian estimate vs theoretical bound."""

    psi: str
    lhs: float
    rhs: float
    stderr: float
    samples: int
    seed: int
    delta: float
    bound: float
    z: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "psi": self.psi,
            "lhs_exact": self.lhs,
            "rhs_gaussian": self.rhs,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
            "delta": self.delta,
            "bound": self.bound,
            "z": self.z,
            "passed": self.passed,
        }


def verify_invariance(poly: MultilinearPolynomial, psi, bound: float,
                      samples: int = 1_000_000, seed: int = 0,
                      z: float = 4.0) -> InvarianceReport:
    """Compare |exact - Monte Carlo| against bound + z * stderr."""
    name, _ = _resolve_psi(psi)
    lhs = expect_exact(poly, psi)
    rhs, stderr = expect_gaussian_mc(poly, psi, samples, seed)
    delta = abs(lhs - rhs)
    return InvarianceReport(
        psi=name,
        lhs=lhs,
        rhs=rhs,
        stderr=stderr,
        samples=samples,
        seed=seed,
        delta=delta,
        bound=float(bound),
        z=z,
        passed=delta <= float(bound) + z * stderr,
    )


# ---------------------------------------------------------------------------
# Lemma suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaCheck:
    name: str
    applicable: bool
    reason: str | None
    lhs: float | None
    bound: float | None
    passed: bool | None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "applicable": self.applicable,
            "reason": self.reason,
            "lhs": self.lhs,
            "bound": self.bound,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class LemmaSuiteReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.applicable)

    def to_dict(self) -> dict:
        return {
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }


def lemma_suite(f: MultilinearPolynomial,
                g: MultilinearPolynomial) -> LemmaSuiteReport:
    """Numerically check the three pairwise inequalities.

    1. Var[f - g] <= 1 when Var[f], Var[g] <= 1/4.
    2. Inf_t[f - g] <= 4*eps for every t.
    3. Inf_t[f * g] <= 4*eps*l1*l2 for ±1-valued f, g.

    eps is the largest coordinate influence over both functions.
    Precondition failures mark a lemma as not applicable rather than
    raising.
    """
    eps = float(_pair_epsilon(f, g))
    checks = []

    var_f, var_g = float(variance(f)), float(variance(g))
    if var_f > 0.25 + _VAR_QUARTER_TOL or var_g > 0.25 + _VAR_QUARTER_TOL:
        offender = "f" if var_f > 0.25 + _VAR_QUARTER_TOL else "g"
        checks.append(LemmaCheck(
            "variance_difference", False,
            f"Var[{offender}] exceeds 1/4", None, None, None))
    else:
        lhs = float(variance(sub(f, g)))
        checks.append(LemmaCheck(
            "variance_difference", True, None, lhs, 1.0,
            lhs <= 1.0 + LEMMA_SLACK))

    diff = sub(f, g)
    lhs = max(
        (float(influence_spectral(diff, t)) for t in range(1, diff.n + 1)),
        default=0.0)
    checks.append(LemmaCheck(
        "influence_difference", True, None, lhs, 4.0 * eps,
        lhs <= 4.0 * eps + LEMMA_SLACK))

    f_bool = is_boolean_valued(inverse_wht(f))
    g_bool = is_boolean_valued(inverse_wht(g))
    if not (f_bool and g_bool):
        offender = "f" if not f_bool else "g"
        checks.append(LemmaCheck(
            "influence_product", False,
            f"{offender} is not ±1-valued", None, None, None))
    else:
        prod = mul(f, g)
        lhs = max(
            (float(influence_spectral(prod, t)) for t in range(1, prod.n + 1)),
            default=0.0)
        bound = 4.0 * eps * term_count(f) * term_count(g)
        checks.append(LemmaCheck(
            "influence_product", True, None, lhs, bound,
            lhs <= bound + LEMMA_SLACK))

    return LemmaSuiteReport(tuple(checks))
