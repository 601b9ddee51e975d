"""Quantum channels as finite Kraus families, their dilations, and presets.

A channel E(rho) = sum_k E_k rho E_k^dag is stored as the concrete operator
family {E_k}, not as an abstract map: the family fixes which indirect
measurement realizes the channel, so two Kraus decompositions of the same
map are different probe configurations even though they are channel-equal
(equality is decided on Choi matrices).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotTracePreserving,
    ParamOutOfRange,
    UnknownPreset,
)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Kraus operators below this Frobenius norm are dropped at construction:
# they only produce zero-probability outcomes downstream.
ZERO_OPERATOR_NORM = 1e-12

COMPLETENESS_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A channel as a family of d x d Kraus operators with sum E_k^dag E_k = I."""

    dim: int
    operators: tuple[np.ndarray, ...]

    @property
    def kraus_count(self) -> int:
        return len(self.operators)


@dataclass(frozen=True, eq=False)
class DilationIsometry:
    """Isometry V = sum_k E_k (x) |k> from the system into system (x) environment."""

    matrix: np.ndarray
    dim: int
    env_dim: int


def kraus_channel(operators, *, drop_zero: bool = True) -> KrausChannel:
    """Build a channel from an operator family, dropping numerically zero members.

    Completeness is *not* checked here (see ``validate``): invalid families
    must be constructible so they can be diagnosed.
    """
    ops = [numerics.as_matrix(e) for e in operators]
    if not ops:
        raise DimensionMismatch("a channel needs at least one Kraus operator")
    d = ops[0].shape[0]
    for e in ops:
        if e.shape != (d, d):
            raise DimensionMismatch(f"Kraus operators must all be {d} x {d}, got {e.shape}")
    if drop_zero:
        kept = [e for e in ops if np.linalg.norm(e) >= ZERO_OPERATOR_NORM]
        ops = kept or ops[:1]
    return KrausChannel(dim=d, operators=tuple(e.copy() for e in ops))


def validate(channel: KrausChannel) -> None:
    """Raise NotTracePreserving unless sum_k E_k^dag E_k = I within 1e-9."""
    total = sum(numerics.dagger(e) @ e for e in channel.operators)
    deviation = float(np.abs(total - np.eye(channel.dim)).max())
    if deviation > COMPLETENESS_ATOL:
        raise NotTracePreserving(deviation)


def apply(channel: KrausChannel, rho) -> np.ndarray:
    """Channel action sum_k E_k rho E_k^dag on a density matrix."""
    rho = numerics.ensure_density(rho)
    if rho.shape != (channel.dim, channel.dim):
        raise DimensionMismatch(
            f"state is {rho.shape}, channel acts on dimension {channel.dim}"
        )
    out = np.zeros_like(rho)
    for e in channel.operators:
        out += e @ rho @ numerics.dagger(e)
    return numerics.hermitize(out)


def dilation(channel: KrausChannel) -> DilationIsometry:
    """Isometry V = sum_k E_k (x) |k> realizing the channel as an interaction.

    Row (i, k) of V (flat index i*K + k) is system index i, environment
    index k, so slicing rows k::K recovers E_k exactly. The environment
    dimension equals the number of Kraus operators: the minimal dilation.
    """
    validate(channel)
    d, kk = channel.dim, channel.kraus_count
    v = np.zeros((d * kk, d), dtype=complex)
    for k, e in enumerate(channel.operators):
        v[k::kk, :] = e
    return DilationIsometry(matrix=v, dim=d, env_dim=kk)


def complementary_apply(channel: KrausChannel, rho) -> np.ndarray:
    """Environment output state: entry (k, l) = Tr[E_l^dag E_k rho]."""
    rho = numerics.ensure_density(rho)
    if rho.shape != (channel.dim, channel.dim):
        raise DimensionMismatch(
            f"state is {rho.shape}, channel acts on dimension {channel.dim}"
        )
    ops = np.stack(channel.operators)
    env = np.einsum("kab,bc,lac->kl", ops, rho, ops.conj())
    return numerics.hermitize(env)


def dual_effect(channel: KrausChannel, j: int) -> np.ndarray:
    """Pullback of the environment projector |j><j| to the system: E_j^dag E_j."""
    if not 0 <= j < channel.kraus_count:
        raise IndexOutOfRange(
            f"Kraus index {j} outside [0, {channel.kraus_count})"
        )
    e = channel.operators[j]
    return numerics.hermitize(numerics.dagger(e) @ e)


def dual_apply(channel: KrausChannel, observable) -> np.ndarray:
    """Adjoint action on observables: sum_k E_k^dag O E_k (unit-preserving)."""
    obs = numerics.as_matrix(observable)
    if obs.shape != (channel.dim, channel.dim):
        raise DimensionMismatch(
            f"observable is {obs.shape}, channel acts on dimension {channel.dim}"
        )
    out = np.zeros_like(obs)
    for e in channel.operators:
        out += numerics.dagger(e) @ obs @ e
    return out


def choi_matrix(channel: KrausChannel) -> np.ndarray:
    """Unnormalized Choi matrix sum_k |E_k>><<E_k| (row-major vectorization)."""
    d = channel.dim
    c = np.zeros((d * d, d * d), dtype=complex)
    for e in channel.operators:
        v = e.reshape(-1)
        c += np.outer(v, v.conj())
    return c


def choi_distance(a: KrausChannel, b: KrausChannel) -> float:
    """Trace-norm distance between Choi matrices (decomposition independent)."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"channel dimensions differ: {a.dim} vs {b.dim}")
    return numerics.trace_norm(choi_matrix(a) - choi_matrix(b))


def channels_equal(a: KrausChannel, b: KrausChannel, tol: float = 1e-9) -> bool:
    return choi_distance(a, b) <= tol


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ParamOutOfRange(f"{name} must lie in [0, 1], got {value}")
    return value


def preset(name: str, **params) -> KrausChannel:
    """Named channel constructions.

    identity(dim=2)
        The ideal channel {I}.
    dephasing(p=0.5)
        Phase flip of strength p, stored in the which-path decomposition
        {(aI + bZ)/sqrt2, (aI - bZ)/sqrt2} with a = sqrt(1-p), b = sqrt(p),
        so the probe-canonical readout is the which-path one and the
        Hadamard mixing recovers the unitary branches {aI, bZ}. At p = 1/2
        the operators are exactly the projectors {|0><0|, |1><1|}.
    depolarizing(p=0.5)
        {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}.
    amplitude_damping(gamma=0.5)
        {[[1,0],[0,sqrt(1-g)]], [[0,sqrt(g)],[0,0]]}; the zero operator at
        g = 0 is dropped, leaving the identity channel.
    eraser_cnot()
        {|0><0|, |1><1|}: the system dephased by a CNOT onto the probe.
    partial_teleportation(lam0=0.5)
        E_j = D sigma_j / sqrt2 over the four Paulis, D = diag(sqrt(lam0),
        sqrt(1-lam0)); completeness is exact since lam0 + (1-lam0) = 1.
    random(dim=2, kraus=2, seed=0)
        Seeded Ginibre blocks orthonormalized into an isometry, then split.
    """
    known = {
        "identity",
        "dephasing",
        "depolarizing",
        "amplitude_damping",
        "eraser_cnot",
        "partial_teleportation",
        "random",
    }
    if name not in known:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {sorted(known)}")

    def take(allowed: dict):
        extra = set(params) - set(allowed)
        if extra:
            raise ParamOutOfRange(
                f"unexpected parameter(s) {sorted(extra)} for preset {name!r}"
            )
        return {k: params.get(k, v) for k, v in allowed.items()}

    if name == "identity":
        p = take({"dim": 2})
        d = int(p["dim"])
        if d < 1:
            raise ParamOutOfRange(f"dim must be >= 1, got {d}")
        return kraus_channel([np.eye(d, dtype=complex)])
    if name == "dephasing":
        p = _check_unit_interval("p", take({"p": 0.5})["p"])
        a, b = np.sqrt(1 - p), np.sqrt(p)
        return kraus_channel(
            [(a * PAULI_I + b * PAULI_Z) / np.sqrt(2), (a * PAULI_I - b * PAULI_Z) / np.sqrt(2)]
        )
    if name == "depolarizing":
        p = _check_unit_interval("p", take({"p": 0.5})["p"])
        weights = [1 - 3 * p / 4, p / 4, p / 4, p / 4]
        paulis = [PAULI_I, PAULI_X, PAULI_Y, PAULI_Z]
        return kraus_channel([np.sqrt(w) * s for w, s in zip(weights, paulis)])
    if name == "amplitude_damping":
        g = _check_unit_interval("gamma", take({"gamma": 0.5})["gamma"])
        e0 = np.array([[1, 0], [0, np.sqrt(1 - g)]], dtype=complex)
        e1 = np.array([[0, np.sqrt(g)], [0, 0]], dtype=complex)
        return kraus_channel([e0, e1])
    if name == "eraser_cnot":
        take({})
        return kraus_channel([np.diag([1, 0]).astype(complex), np.diag([0, 1]).astype(complex)])
    if name == "partial_teleportation":
        lam0 = _check_unit_interval("lam0", take({"lam0": 0.5})["lam0"])
        dd = np.diag([np.sqrt(lam0), np.sqrt(1 - lam0)]).astype(complex)
        paulis = [PAULI_I, PAULI_X, PAULI_Y, PAULI_Z]
        return kraus_channel([dd @ s / np.sqrt(2) for s in paulis])
    p = take({"dim": 2, "kraus": 2, "seed": 0})
    d, kk = int(p["dim"]), int(p["kraus"])
    if d < 1 or kk < 1:
        raise ParamOutOfRange(f"random preset needs dim >= 1 and kraus >= 1, got {d}, {kk}")
    v = numerics.haar_isometry(d * kk, d, p["seed"])
    return kraus_channel([v[k * d : (k + 1) * d, :] for k in range(kk)], drop_zero=False)
