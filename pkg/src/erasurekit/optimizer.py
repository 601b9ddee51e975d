"""Search for the erasure measurement maximizing the assisted fidelity, and
numerical detection of random-unitary decompositions (perfect erasure).

The objective F(W) = sum_j (Tr|E'_j rho|)^2 over mixing isometries W is
maximized by minorize-maximize ascent. At the current W the trace norms are
written variationally, Tr|A| = max_V Re Tr[V^dag A] over unitaries, and the
square is bounded below by its tangent, t^2 >= 2 t0 t - t0^2. Both touch at
the current point, so the resulting linear surrogate minorizes F there, and
its exact maximizer over isometries is the (conjugated) polar factor of the
m x K coefficient matrix G[j, k] = t_j Tr[V_j^dag E_k rho]. Each step is
therefore nondecreasing in F. The do-nothing mixing W = I is always restart 0,
a deterministically perturbed identity is restart 1 (the exact identity can
sit on an unstable fixed point of the ascent map), and the remaining restarts
are seeded Haar isometries.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import numerics
from .channels import KrausChannel, kraus_channel, validate
from .errors import BadOutcomeCount, ParamOutOfRange
from .probes import (
    OUTCOME_FLOOR,
    ProbeMeasurement,
    joint_distribution,
    mutual_information,
    probe_measurement,
    random_ensemble,
)

DEFAULT_RESTARTS = 32
DEFAULT_MAX_ITERS = 500
DEFAULT_TOL = 1e-12

# Restarts whose final values agree within this band count as tied, and ties
# go to the lowest restart index; exact float comparison would let ULP noise
# pick an arbitrary member of a degenerate optimum set.
RESTART_TIE_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    """Best mixing found, its value, and the full per-restart iteration trace."""

    best_mixing: ProbeMeasurement
    best_value: float
    trace: tuple[tuple[int, int, float], ...]
    converged: bool
    oracle_value: float | None = None

    def with_oracle(self, value: float) -> "OptimizationResult":
        return replace(self, oracle_value=float(value))


@dataclass(frozen=True, eq=False)
class RandomUnitaryVerdict:
    """Outcome of the perfect-erasure test.

    When true, ``witness`` holds pairs (weight, unitary) whose mixture
    reproduces the channel; ``residual`` measures how far the normalized
    refined branches are from unitarity at the best mixing found.
    """

    is_random_unitary: bool
    witness: tuple[tuple[float, np.ndarray], ...] | None
    residual: float


def _objective(ops: np.ndarray, rho: np.ndarray, w: np.ndarray) -> float:
    branches_rho = np.einsum("jk,kab->jab", w, ops) @ rho
    t = np.linalg.svd(branches_rho, compute_uv=False).sum(axis=1)
    return float((t**2).sum())


def _ascend(ops, rho, w, max_iters, tol, restart, trace):
    """MM ascent from ``w``; appends (restart, iter, value) rows, returns (w, value, converged)."""
    ops_rho = ops @ rho
    value = _objective(ops, rho, w)
    trace.append((restart, 0, value))
    converged = False
    for it in range(1, max_iters + 1):
        branches_rho = np.einsum("jk,kab->jab", w, ops) @ rho
        x, s, yh = np.linalg.svd(branches_rho)
        t = s.sum(axis=1)
        v = x @ yh
        g = t[:, None] * np.einsum("jab,kab->jk", v.conj(), ops_rho)
        gx, _, gyh = np.linalg.svd(g, full_matrices=False)
        w = (gx @ gyh).conj()
        new_value = _objective(ops, rho, w)
        trace.append((restart, it, new_value))
        if abs(new_value - value) < tol:
            value = new_value
            converged = True
            break
        value = new_value
    return w, value, converged


def _maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def _identity_start(m: int, kk: int) -> np.ndarray:
    w = np.zeros((m, kk), dtype=complex)
    w[:kk, :kk] = np.eye(kk)
    return w


def _perturbed_identity_start(m: int, kk: int) -> np.ndarray:
    # symmetric configurations like the which-path readout are exact (unstable)
    # fixed points of the ascent map; a tiny fixed real-generic offset lets the
    # trajectory fall off them while staying real for real-valued problems
    grid = np.sin(2.39996 * np.outer(np.arange(1, m + 1), np.arange(1, kk + 1)))
    x, _, yh = np.linalg.svd(_identity_start(m, kk) + 1e-6 * grid, full_matrices=False)
    return (x @ yh).astype(complex)


def optimize_erasure(
    channel: KrausChannel,
    rho=None,
    outcomes: int | None = None,
    *,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> OptimizationResult:
    """Maximize the assisted fidelity over m-outcome mixing isometries.

    ``rho`` defaults to the maximally mixed state, ``outcomes`` to the Kraus
    count. Restart r > 0 starts from the Haar isometry seeded by (seed, r);
    restarts tied within 1e-12 are resolved toward the lowest index, so
    results are deterministic and independent of any execution order.
    """
    validate(channel)
    rho = numerics.ensure_density(rho) if rho is not None else _maximally_mixed(channel.dim)
    kk = channel.kraus_count
    m = kk if outcomes is None else int(outcomes)
    if m < kk:
        raise BadOutcomeCount(f"need at least {kk} outcomes, got {m}")
    ops = np.stack(channel.operators)

    trace: list[tuple[int, int, float]] = []
    best_w, best_value, best_converged = None, -np.inf, False
    for r in range(max(restarts, 1)):
        if r == 0:
            w0 = _identity_start(m, kk)
        elif r == 1:
            w0 = _perturbed_identity_start(m, kk)
        else:
            w0 = numerics.haar_isometry(m, kk, np.random.default_rng([seed, r]))
        w, value, converged = _ascend(ops, rho, w0, max_iters, tol, r, trace)
        if value > best_value + RESTART_TIE_ATOL:
            best_w, best_value, best_converged = w, value, converged
    return OptimizationResult(
        best_mixing=probe_measurement(best_w),
        best_value=best_value,
        trace=tuple(trace),
        converged=best_converged,
    )


def sample_oracle(channel: KrausChannel, rho=None, samples: int = 1, seed: int = 0) -> float:
    """Brute-force baseline: max assisted fidelity over Haar-random square mixings.

    Independent of the ascent path (direct nuclear-norm evaluation on sampled
    unitaries); deterministic for a fixed seed.
    """
    validate(channel)
    rho = numerics.ensure_density(rho) if rho is not None else _maximally_mixed(channel.dim)
    if samples < 1:
        raise ParamOutOfRange(f"need at least one sample, got {samples}")
    kk = channel.kraus_count
    ops = np.stack(channel.operators)
    ops_rho = ops @ rho
    rng = np.random.default_rng(seed)
    best = -np.inf
    chunk = 4096
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        g = (rng.normal(size=(n, kk, kk)) + 1j * rng.normal(size=(n, kk, kk))) / np.sqrt(2)
        q, r = np.linalg.qr(g)
        d = np.diagonal(r, axis1=-2, axis2=-1)
        w = q * (d / np.abs(d))[:, None, :]
        branches_rho = np.einsum("njk,kab->njab", w, ops_rho)
        t = np.linalg.svd(branches_rho, compute_uv=False).sum(axis=-1)
        best = max(best, float((t**2).sum(axis=-1).max()))
        done += n
    return best


def detect_random_unitary(
    channel: KrausChannel,
    tol: float = 1e-6,
    *,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    result: OptimizationResult | None = None,
    polish_iters: int = 300,
    ensemble_checks: int = 20,
) -> RandomUnitaryVerdict:
    """Decide numerically whether the channel mixes unitaries.

    Optimizes erasure at the maximally mixed state (reusing ``result`` when it
    was produced for that configuration), then polishes the best mixing with
    further ascent so the normalized branches E'_j / sqrt(p(j) d) can be tested
    for unitarity at witness precision. A true verdict needs the optimum
    within ``tol`` of one, branch residuals below 10 sqrt(tol), and near-zero
    mutual information across seeded random ensembles.
    """
    validate(channel)
    d = channel.dim
    rho = _maximally_mixed(d)
    kk = channel.kraus_count
    if result is None or result.best_mixing.kraus_count != kk:
        result = optimize_erasure(channel, rho, restarts=restarts, seed=seed)
    ops = np.stack(channel.operators)
    w = result.best_mixing.mixing
    value = _objective(ops, rho, w)
    for _ in range(polish_iters):
        w2, v2, _ = _ascend(ops, rho, w, 1, 0.0, -1, [])
        if not v2 > value:
            break
        w, value = w2, v2
    best_value = value

    branches = np.einsum("jk,kab->jab", w, ops)
    probs = np.einsum("jab,jab->j", branches.conj(), branches).real / d
    kept = probs >= OUTCOME_FLOOR
    normalized = branches[kept] / np.sqrt(probs[kept])[:, None, None]
    residual = max(
        float(np.abs(numerics.dagger(u) @ u - np.eye(d)).max()) for u in normalized
    )

    if best_value < 1 - tol or residual >= 10 * np.sqrt(tol):
        return RandomUnitaryVerdict(False, None, residual)

    meas = probe_measurement(w)
    for check in range(ensemble_checks):
        ens = random_ensemble(rho, 4, np.random.default_rng([seed, 104729, check]))
        if mutual_information(joint_distribution(channel, ens, meas)) >= 1e-5:
            return RandomUnitaryVerdict(False, None, residual)

    weights = probs[kept] / probs[kept].sum()
    unitaries = tuple(numerics.polar_unitary(u) for u in normalized)
    witness = tuple((float(p), u) for p, u in zip(weights, unitaries))
    return RandomUnitaryVerdict(True, witness, residual)


def witness_channel(verdict: RandomUnitaryVerdict) -> KrausChannel:
    """Kraus family sqrt(p_j) U_j of a true verdict, for Choi reconstruction checks."""
    if not verdict.is_random_unitary or verdict.witness is None:
        raise ValueError("verdict carries no witness")
    return kraus_channel([np.sqrt(p) * u for p, u in verdict.witness])
