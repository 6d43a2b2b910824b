"""Channel constructions for a wiretapped computation pair (f, g).

Alice broadcasts v = f(x); the eavesdropper wants u = g(x).  With x
uniform on {-1,+1}^n this induces an exact joint distribution on (u, v),
from which the forward channel Pr(v | u), the posterior channel
Pr(u | v), the MAP estimate of u, and the additive (N = f - g) and
multiplicative (N = f * g) noise decompositions are all computed by
enumeration of the 2**n points.

Real-valued outputs are merged into alphabets with tolerance
:data:`VALUE_MERGE_TOL` so that float dust from transform round-trips
cannot split one semantic value into two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boolfn import (
    MultilinearPolynomial,
    PreconditionError,
    TruthTable,
    index_to_point,
    inverse_wht,
    is_boolean_valued,
    mul,
    sub,
    wht,
)

#: Distinct function values closer than this are merged into one symbol.
VALUE_MERGE_TOL = 1e-9


@dataclass(frozen=True)
class WiretapSpec:
    """A pair (f, g) on a common n, inputs uniform on {-1,+1}^n.

    Both the dense table and the Fourier expansion of each function are
    kept, since the channel constructions enumerate tables while the
    noise models also report polynomials.
    """

    f_table: TruthTable
    g_table: TruthTable
    f_poly: MultilinearPolynomial
    g_poly: MultilinearPolynomial

    def __post_init__(self):
        ns = {self.f_table.n, self.g_table.n, self.f_poly.n, self.g_poly.n}
        if len(ns) != 1:
            raise ValueError(f"f and g must share n, got {sorted(ns)}")

    @property
    def n(self) -> int:
        return self.f_table.n

    @classmethod
    def from_polys(cls, f: MultilinearPolynomial,
                   g: MultilinearPolynomial) -> "WiretapSpec":
        """Build from Fourier expansions, lifting both to a common n."""
        n = max(f.n, g.n)
        f, g = f.with_n(n), g.with_n(n)
        return cls(inverse_wht(f), inverse_wht(g), f, g)

    @classmethod
    def from_tables(cls, f: TruthTable, g: TruthTable) -> "WiretapSpec":
        if f.n != g.n:
            raise ValueError(f"f and g must share n, got {f.n} and {g.n}")
        return cls(f, g, wht(f), wht(g))


def _merge_values(values: np.ndarray, tol: float = VALUE_MERGE_TOL):
    """Cluster reals into an alphabet; gaps > tol split clusters.

    Returns (sorted representative values, per-input cluster labels).
    """
    uniq, inverse = np.unique(values, return_inverse=True)
    boundaries = np.flatnonzero(np.diff(uniq) > tol)
    cluster_of_uniq = np.zeros(len(uniq), dtype=np.int64)
    cluster_of_uniq[boundaries + 1] = 1
    cluster_of_uniq = np.cumsum(cluster_of_uniq)
    n_clusters = int(cluster_of_uniq[-1]) + 1 if len(uniq) else 0
    reps = np.zeros(n_clusters)
    counts = np.zeros(n_clusters)
    np.add.at(reps, cluster_of_uniq, uniq)
    np.add.at(counts, cluster_of_uniq, 1.0)
    reps /= counts
    return tuple(float(r) for r in reps), cluster_of_uniq[inverse]


@dataclass(frozen=True)
class JointDistribution:
    """Exact joint of (u = g(x), v = f(x)) under uniform x."""

    u_values: tuple
    v_values: tuple
    probs: np.ndarray  # shape (|U|, |V|), sums to 1

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.shape != (len(self.u_values), len(self.v_values)):
            raise ValueError("joint matrix shape does not match alphabets")
        if np.any(probs < 0):
            raise ValueError("joint probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"joint must sum to 1, got {probs.sum()!r}")
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    def u_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def v_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    def to_dict(self) -> dict:
        return {
            "u_values": list(self.u_values),
            "v_values": list(self.v_values),
            "probs": self.probs.tolist(),
        }


@dataclass(frozen=True)
class DiscreteChannel:
    """Row-stochastic conditional matrix Pr(output | input)."""

    inputs: tuple
    outputs: tuple
    matrix: np.ndarray
    prior: tuple | None = None
    dropped_inputs: tuple = ()

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.shape != (len(self.inputs), len(self.outputs)):
            raise ValueError("channel matrix shape does not match alphabets")
        if np.any(matrix < -1e-15) or np.any(matrix > 1 + 1e-12):
            raise ValueError("channel entries must lie in [0, 1]")
        rows = matrix.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > 1e-12):
            raise ValueError(f"channel rows must sum to 1, got {rows}")
        matrix = matrix.copy()
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    def to_dict(self) -> dict:
        return {
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "matrix": self.matrix.tolist(),
            "prior": None if self.prior is None else list(self.prior),
            "dropped_inputs": list(self.dropped_inputs),
        }


@dataclass(frozen=True)
class NoiseModel:
    """Additive (v = u + N) or multiplicative (v = u * N) decomposition."""

    kind: str
    noise_values: tuple
    noise_probs: tuple
    u_values: tuple
    joint_u_noise: np.ndarray  # shape (|U|, |N|)
    poly: MultilinearPolynomial
    # Binary-asymmetric-channel parameters (multiplicative only):
    # Pr(N = -1 | uN = -1) and Pr(N = -1 | uN = +1); None when the
    # conditioning event has probability zero (undefined, not 0).
    flip_one_to_minus: float | None = None
    flip_minus_to_one: float | None = None
    reconstruction_max_error: float = 0.0

    def to_dict(self) -> dict:
        def bac(v):
            return "undefined" if v is None else v
        out = {
            "kind": self.kind,
            "noise_values": list(self.noise_values),
            "noise_probs": list(self.noise_probs),
            "u_values": list(self.u_values),
            "joint_u_noise": np.asarray(self.joint_u_noise).tolist(),
            "reconstruction_max_error": self.reconstruction_max_error,
        }
        if self.kind == "multiplicative":
            out["bac"] = {
                "flip_one_to_minus": bac(self.flip_one_to_minus),
                "flip_minus_to_one": bac(self.flip_minus_to_one),
            }
        return out


@dataclass(frozen=True)
class CommutesReport:
    """Whether the estimate can always be exact, with a counterexample."""

    commutes: bool
    witness: tuple | None = None  # pair of ±1 points when not commuting

    def to_dict(self) -> dict:
        return {
            "commutes": self.commutes,
            "witness": None if self.witness is None
            else [list(self.witness[0]), list(self.witness[1])],
        }


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def joint_distribution(spec: WiretapSpec) -> JointDistribution:
    """Exact joint of (u, v) by enumerating all 2**n points."""
    u_values, u_labels = _merge_values(spec.g_table.values)
    v_values, v_labels = _merge_values(spec.f_table.values)
    probs = np.zeros((len(u_values), len(v_values)))
    np.add.at(probs, (u_labels, v_labels), 1.0 / (1 << spec.n))
    return JointDistribution(u_values, v_values, probs)


def classic_channel(spec: WiretapSpec) -> DiscreteChannel:
    """Forward channel Pr(v | u) with the prior Pr(u)."""
    joint = joint_distribution(spec)
    prior = joint.u_marginal()
    matrix = joint.probs / prior[:, None]
    return DiscreteChannel(joint.u_values, joint.v_values, matrix,
                           prior=tuple(float(p) for p in prior))


def posterior_channel(spec: WiretapSpec) -> DiscreteChannel:
    """Posterior channel Pr(u | v), rows indexed by v.

    Outputs v with zero marginal cannot arise from enumeration, but if a
    caller supplies a degenerate joint they are dropped and reported in
    ``dropped_inputs``.
    """
    joint = joint_distribution(spec)
    v_marg = joint.v_marginal()
    keep = v_marg > 0
    dropped = tuple(v for v, k in zip(joint.v_values, keep) if not k)
    matrix = (joint.probs[:, keep] / v_marg[keep][None, :]).T
    inputs = tuple(v for v, k in zip(joint.v_values, keep) if k)
    return DiscreteChannel(inputs, joint.u_values, matrix,
                           prior=tuple(float(p) for p in v_marg[keep]),
                           dropped_inputs=dropped)


def map_estimator(spec: WiretapSpec) -> dict:
    """MAP rule v -> argmax_u Pr(u | v); ties break to the smallest u."""
    joint = joint_distribution(spec)
    estimate = {}
    for j, v in enumerate(joint.v_values):
        column = joint.probs[:, j]
        # u_values are sorted ascending, and argmax returns the first
        # maximum, so ties resolve toward the smallest u.
        estimate[v] = joint.u_values[int(np.argmax(column))]
    return estimate


def eve_success_probability(spec: WiretapSpec) -> float:
    """Pr[MAP estimate equals u] = sum_v max_u Pr(u, v)."""
    joint = joint_distribution(spec)
    return float(joint.probs.max(axis=0).sum())


def commutes(spec: WiretapSpec) -> CommutesReport:
    """True iff f(x) = f(x') always forces g(x) = g(x').

    Checked by grouping points by (merged) f-value; a failing pair of
    points is returned as the witness.
    """
    _, u_labels = _merge_values(spec.g_table.values)
    _, v_labels = _merge_values(spec.f_table.values)
    order = np.argsort(v_labels, kind="stable")
    vs = v_labels[order]
    starts = np.flatnonzero(np.r_[True, np.diff(vs) != 0])
    ends = np.r_[starts[1:], len(vs)]
    for s, e in zip(starts, ends):
        fiber = order[s:e]
        us = u_labels[fiber]
        if us.min() != us.max():
            i0 = int(fiber[np.argmin(us)])
            i1 = int(fiber[np.argmax(us)])
            witness = (index_to_point(i0, spec.n), index_to_point(i1, spec.n))
            return CommutesReport(False, witness)
    return CommutesReport(True)


def additive_noise(spec: WiretapSpec) -> NoiseModel:
    """Decompose v = u + N with N = f - g, distributions by enumeration."""
    f_vals = spec.f_table.values
    g_vals = spec.g_table.values
    noise_raw = f_vals - g_vals
    noise_values, noise_labels = _merge_values(noise_raw)
    u_values, u_labels = _merge_values(g_vals)
    weight = 1.0 / (1 << spec.n)
    joint = np.zeros((len(u_values), len(noise_values)))
    np.add.at(joint, (u_labels, noise_labels), weight)
    recon = float(np.max(np.abs(g_vals + noise_raw - f_vals)))
    return NoiseModel(
        kind="additive",
        noise_values=noise_values,
        noise_probs=tuple(float(p) for p in joint.sum(axis=0)),
        u_values=u_values,
        joint_u_noise=joint,
        poly=sub(spec.f_poly, spec.g_poly),
        reconstruction_max_error=recon,
    )


def multiplicative_noise(spec: WiretapSpec) -> NoiseModel:
    """Decompose v = u * N with N = f * g; requires ±1-valued f and g.

    Values within the Boolean tolerance are canonicalized to exact ±1
    before the distributions and the binary-asymmetric-channel
    parameters are computed, so the reconstruction identity is exact.
    """
    if not is_boolean_valued(spec.f_table):
        raise PreconditionError("multiplicative noise requires ±1-valued f")
    if not is_boolean_valued(spec.g_table):
        raise PreconditionError("multiplicative noise requires ±1-valued g")
    f_sign = np.where(spec.f_table.values >= 0, 1.0, -1.0)
    g_sign = np.where(spec.g_table.values >= 0, 1.0, -1.0)
    noise = f_sign * g_sign  # exactly ±1
    noise_values, noise_labels = _merge_values(noise)
    u_values, u_labels = _merge_values(g_sign)
    weight = 1.0 / (1 << spec.n)
    joint = np.zeros((len(u_values), len(noise_values)))
    np.add.at(joint, (u_labels, noise_labels), weight)

    def flip_prob(observed: float) -> float | None:
        mask = f_sign == observed  # uN = f is Eve's observation
        if not mask.any():
            return None
        return float(np.mean(noise[mask] == -1.0))

    recon = float(np.max(np.abs(g_sign * noise - f_sign)))
    return NoiseModel(
        kind="multiplicative",
        noise_values=noise_values,
        noise_probs=tuple(float(p) for p in joint.sum(axis=0)),
        u_values=u_values,
        joint_u_noise=joint,
        poly=mul(spec.f_poly, spec.g_poly),
        flip_one_to_minus=flip_prob(-1.0),
        flip_minus_to_one=flip_prob(+1.0),
        reconstruction_max_error=recon,
    )
