"""Probe measurements, instrument refinement, ensembles, and joint statistics.

A rank-one probe POVM is stored as the m x K mixing isometry W acting on
Kraus indices: row j encodes the probe effect |w_j><w_j| via W[j, k] =
<w_j|k>, and the refined pure-instrument branches are E'_j = sum_k W[j, k]
E_k. Row phases of W are unphysical gauge, so measurement equality is tested
up to a per-row phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .channels import KrausChannel
from .errors import (
    BetaZero,
    DimensionMismatch,
    InsufficientFrame,
    NotDensity,
    NotIsometry,
    NotNormalized,
    NotPSD,
    SingularAverage,
)

ISOMETRY_ATOL = 1e-10

# Outcomes with p(j) below this are dropped from reports; the 0 log 0
# convention keeps every entropic quantity finite without them.
OUTCOME_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ProbeMeasurement:
    """Rank-one probe POVM as a Kraus-mixing isometry (m x K, W^dag W = I)."""

    mixing: np.ndarray

    @property
    def outcomes(self) -> int:
        return self.mixing.shape[0]

    @property
    def kraus_count(self) -> int:
        return self.mixing.shape[1]


def probe_measurement(mixing) -> ProbeMeasurement:
    w = numerics.as_matrix(mixing)
    m, k = w.shape
    if m < k or k < 1:
        raise DimensionMismatch(f"mixing must be m x K with m >= K >= 1, got {w.shape}")
    dev = float(np.abs(numerics.dagger(w) @ w - np.eye(k)).max())
    if dev > ISOMETRY_ATOL:
        raise NotIsometry(f"W^dag W deviates from identity by {dev:.3e}")
    return ProbeMeasurement(mixing=w.copy())


def canonical_measurement(kraus_count: int) -> ProbeMeasurement:
    """The do-nothing mixing W = I: read the probe in the Kraus basis."""
    return probe_measurement(np.eye(kraus_count, dtype=complex))


def hadamard_measurement() -> ProbeMeasurement:
    return probe_measurement(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2))


def rotation_measurement(theta: float) -> ProbeMeasurement:
    """Real rotation of the two-outcome probe basis by ``theta``."""
    c, s = np.cos(theta), np.sin(theta)
    return probe_measurement(np.array([[c, s], [-s, c]], dtype=complex))


def random_measurement(outcomes: int, kraus_count: int, seed) -> ProbeMeasurement:
    return probe_measurement(numerics.haar_isometry(outcomes, kraus_count, seed))


def measurements_equal(a: ProbeMeasurement, b: ProbeMeasurement, tol: float = 1e-9) -> bool:
    """Row-wise equality up to a phase per row (the unphysical gauge)."""
    if a.mixing.shape != b.mixing.shape:
        return False
    for ra, rb in zip(a.mixing, b.mixing):
        inner = complex(np.vdot(ra, rb))
        phase = inner / abs(inner) if abs(inner) > 0 else 1.0
        if float(np.abs(ra * phase - rb).max()) > tol:
            return False
    return True


def refine(channel: KrausChannel, meas: ProbeMeasurement) -> list[np.ndarray]:
    """Pure-instrument branches E'_j = sum_k W[j, k] E_k of the refined channel."""
    if meas.kraus_count != channel.kraus_count:
        raise DimensionMismatch(
            f"measurement mixes {meas.kraus_count} Kraus indices, channel has "
            f"{channel.kraus_count}"
        )
    ops = np.stack(channel.operators)
    refined = np.einsum("jk,kab->jab", meas.mixing, ops)
    return [refined[j] for j in range(meas.outcomes)]


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Decomposition {rho_i} of a state: each member PSD, sum_i rho_i = rho."""

    members: tuple[np.ndarray, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def weights(self) -> np.ndarray:
        return np.array([np.trace(m).real for m in self.members])

    @property
    def average(self) -> np.ndarray:
        return numerics.hermitize(sum(self.members))

    @property
    def beta(self) -> float:
        return float(self.weights.min())


def ensemble(members) -> Ensemble:
    """Validate and build an ensemble: PSD members, positive weights, unit total trace."""
    mats = [numerics.as_matrix(m) for m in members]
    if not mats:
        raise DimensionMismatch("an ensemble needs at least one member")
    d = mats[0].shape[0]
    for m in mats:
        if m.shape != (d, d):
            raise DimensionMismatch(f"members must all be {d} x {d}, got {m.shape}")
        herm_dev = float(np.abs(m - numerics.dagger(m)).max())
        low = float(np.linalg.eigvalsh(numerics.hermitize(m)).min())
        if herm_dev > 1e-10 or low < -1e-10:
            raise NotPSD(
                f"ensemble member not PSD within 1e-10 (hermiticity {herm_dev:.3e}, "
                f"min eigenvalue {low:.3e})"
            )
    total = sum(np.trace(m).real for m in mats)
    if abs(total - 1.0) > 1e-9:
        raise NotDensity(f"ensemble traces sum to {total:.12g}, expected 1 within 1e-09")
    if min(np.trace(m).real for m in mats) <= 0:
        raise BetaZero("every ensemble weight must be strictly positive")
    return Ensemble(members=tuple(m.copy() for m in mats))


def random_ensemble(rho, members: int, seed, *, floor: float = 0.01) -> Ensemble:
    """Seeded random decomposition of ``rho`` with all weights >= floor/members.

    Ginibre-random PSD pieces are conjugated into a resolution of the support
    of rho, then blended with the uniform split by ``floor`` so no weight can
    collapse to zero.
    """
    rho = numerics.ensure_density(rho)
    if members < 1:
        raise DimensionMismatch(f"need at least one member, got {members}")
    rng = numerics._rng(seed)
    d = rho.shape[0]
    pieces = []
    for _ in range(members):
        g = numerics.ginibre(d, d, rng)
        pieces.append(g @ numerics.dagger(g))
    s_inv_half = numerics.psd_power(sum(pieces), -0.5)
    sq = numerics.psd_power(rho, 0.5)
    mats = [sq @ (s_inv_half @ g @ s_inv_half) @ sq for g in pieces]
    mats = [
        numerics.hermitize((1 - floor) * m + floor * rho / members) for m in mats
    ]
    return ensemble(mats)


def joint_distribution(channel: KrausChannel, ens: Ensemble, meas: ProbeMeasurement) -> np.ndarray:
    """Joint outcome matrix p(i, j) = Tr[rho_i E'_j^dag E'_j].

    Rows are ensemble members, columns probe outcomes; marginals are the
    ensemble weights and the outcome probabilities.
    """
    if ens.members[0].shape != (channel.dim, channel.dim):
        raise DimensionMismatch(
            f"ensemble members are {ens.members[0].shape}, channel dimension is {channel.dim}"
        )
    refined = refine(channel, meas)
    effects = [numerics.dagger(e) @ e for e in refined]
    p = np.array([[np.trace(m @ f).real for f in effects] for m in ens.members])
    if p.min(initial=0.0) < -1e-9:
        raise NotPSD(f"joint probability {p.min():.3e} is negative beyond tolerance")
    return np.clip(p, 0.0, None)


def mutual_information(p) -> float:
    """Mutual information H(p_i) + H(p_j) - H(p_ij) of a joint matrix, in nats."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 2:
        raise DimensionMismatch(f"expected a joint matrix, got ndim={p.ndim}")
    if p.min(initial=0.0) < -1e-12:
        raise NotNormalized(f"joint entry {p.min():.3e} is negative")
    p = np.clip(p, 0.0, None)
    total = float(p.sum())
    if abs(total - 1.0) > 1e-9:
        raise NotNormalized(f"joint entries sum to {total:.12g}, expected 1 within 1e-09")
    info = (
        numerics.shannon_entropy(p.sum(axis=1))
        + numerics.shannon_entropy(p.sum(axis=0))
        - numerics.shannon_entropy(p.reshape(-1))
    )
    return max(info, 0.0)


@dataclass(frozen=True, eq=False)
class ICEnsemble:
    """Informationally complete ensemble with its frame effects and dual frame.

    frame_effects are the POVM elements P_i = rho^(-1/2) rho_i rho^(-1/2) on
    the support of rho; dual_frame holds the Hermitian (not PSD in general)
    operators rho'_i of the reconstruction identity O = sum_i Tr[O P_i] rho'_i;
    gamma is max_i ||rho'_i||_1.
    """

    base: Ensemble
    frame_effects: tuple[np.ndarray, ...]
    dual_frame: tuple[np.ndarray, ...]
    gamma: float


def ic_ensemble(rho, members: int, seed, *, cutoff: float = numerics.RANK_CUTOFF) -> ICEnsemble:
    """Seeded informationally complete decomposition of ``rho``.

    Draws ``members`` Haar-random unit vectors in the support of rho, turns
    them into a rank-one POVM on the support, and pushes that POVM through
    rho^(1/2) to get the ensemble. The dual frame is the canonical one: the
    pseudo-inverse of the frame map, i.e. the minimal-norm solution of the
    reconstruction identity on the support.

    Raises InsufficientFrame when members < rank(rho)^2 or the drawn frame
    fails to span (redraw with a new seed in that case).
    """
    rho = numerics.ensure_density(rho)
    rng = numerics._rng(seed)
    w, v = numerics.psd_eigh(rho)
    keep = w > cutoff
    r = int(keep.sum())
    if r == 0:
        raise SingularAverage("state has numerically empty support")
    basis = v[:, keep]
    if members < r * r:
        raise InsufficientFrame(
            f"need at least rank(rho)^2 = {r * r} members, got {members}"
        )
    vecs = []
    for _ in range(members):
        g = rng.normal(size=r) + 1j * rng.normal(size=r)
        vecs.append(g / np.linalg.norm(g))
    gram = sum(np.outer(u, u.conj()) for u in vecs)
    gw = np.linalg.eigvalsh(numerics.hermitize(gram))
    if float(gw.min()) <= cutoff * float(gw.max()):
        raise SingularAverage("frame vectors do not cover the support of rho")
    g_inv_half = numerics.psd_power(gram, -0.5, cutoff=cutoff * float(gw.max()))
    effects_s = [g_inv_half @ np.outer(u, u.conj()) @ g_inv_half for u in vecs]

    frame = np.stack([e.reshape(-1) for e in effects_s], axis=1)  # r^2 x members
    sing = np.linalg.svd(frame, compute_uv=False)
    if int((sing > sing[0] * 1e-10).sum()) < r * r:
        raise InsufficientFrame(
            f"frame rank {(sing > sing[0] * 1e-10).sum()} < rank(rho)^2 = {r * r}"
        )
    duals_flat = np.linalg.solve(frame @ numerics.dagger(frame), frame)
    duals_s = [numerics.hermitize(duals_flat[:, i].reshape(r, r)) for i in range(members)]

    sq = numerics.psd_power(rho, 0.5)
    effects = [numerics.hermitize(basis @ e @ numerics.dagger(basis)) for e in effects_s]
    duals = [basis @ dsup @ numerics.dagger(basis) for dsup in duals_s]
    base = ensemble([numerics.hermitize(sq @ e @ sq) for e in effects])
    gamma = max(numerics.trace_norm(dd) for dd in duals)
    return ICEnsemble(
        base=base,
        frame_effects=tuple(effects),
        dual_frame=tuple(duals),
        gamma=float(gamma),
    )


def reconstruct(ic: ICEnsemble, observable) -> np.ndarray:
    """Rebuild an operator on supp(rho) from its frame expectations."""
    obs = numerics.as_matrix(observable)
    out = np.zeros_like(obs)
    for effect, dual in zip(ic.frame_effects, ic.dual_frame):
        out = out + np.trace(obs @ effect) * dual
    return out
