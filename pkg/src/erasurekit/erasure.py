"""Entanglement fidelity, the assisted bound, the explicit correction scheme,
and numerical verification of the information-disturbance inequality chains.

Conventions. The uncorrected figure of merit is F_e(rho) = sum_k |Tr rho E_k|^2,
a decomposition-independent property of the channel. The assisted bound is

    F_ea(rho) = sum_j (Tr|E'_j rho|)^2 = sum_j p(j) F(rho, K_j)^2,

computed on the refined branches E'_j, with conditional states
K_j = rho^(1/2) E'_j^dag E'_j rho^(1/2) / p(j). The outcome-conditioned
correction that attains it applies (V_j)^dag . V_j where V_j is the unitary
polar factor of E'_j rho; the modulus must be taken on E'_j rho (state on the
left) or the bound can exceed one and the identity with the conditional
states breaks.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from . import numerics
from .channels import KrausChannel, kraus_channel, validate
from .errors import DimensionMismatch, EnsembleMismatch
from .probes import (
    Ensemble,
    OUTCOME_FLOOR,
    ProbeMeasurement,
    canonical_measurement,
    ic_ensemble,
    joint_distribution,
    mutual_information,
    refine,
)

SLACK_FLOOR = -1e-9


def _resolve_meas(channel: KrausChannel, meas: ProbeMeasurement | None) -> ProbeMeasurement:
    return canonical_measurement(channel.kraus_count) if meas is None else meas


def _refined(channel: KrausChannel, meas: ProbeMeasurement | None) -> list[np.ndarray]:
    return refine(channel, _resolve_meas(channel, meas))


def _check_state(channel: KrausChannel, rho) -> np.ndarray:
    rho = numerics.ensure_density(rho)
    if rho.shape != (channel.dim, channel.dim):
        raise DimensionMismatch(
            f"state is {rho.shape}, channel acts on dimension {channel.dim}"
        )
    return rho


def entanglement_fidelity(channel: KrausChannel, rho) -> float:
    """F_e(rho) = sum_k |Tr rho E_k|^2, independent of the Kraus decomposition."""
    rho = _check_state(channel, rho)
    return float(sum(abs(np.trace(rho @ e)) ** 2 for e in channel.operators))


def entanglement_fidelity_purification(channel: KrausChannel, rho) -> float:
    """F_e via the canonical purification |O> = (rho^(1/2) (x) I) sum_i |ii>.

    Builds the doubled-space output state explicitly and takes the overlap;
    an independent computation path used to cross-check the Kraus formula.
    """
    rho = _check_state(channel, rho)
    d = channel.dim
    omega = (numerics.psd_power(rho, 0.5) @ np.eye(d)).reshape(-1)
    eye = np.eye(d, dtype=complex)
    out = np.zeros((d * d, d * d), dtype=complex)
    for e in channel.operators:
        v = np.kron(e, eye) @ omega
        out += np.outer(v, v.conj())
    return float(np.real(omega.conj() @ out @ omega))


def assisted_fidelity(
    channel: KrausChannel, rho, meas: ProbeMeasurement | None = None
) -> float:
    """F_ea(rho) = sum_j (Tr|E'_j rho|)^2 on the refined branches (W = I default)."""
    rho = _check_state(channel, rho)
    return float(
        sum(numerics.trace_norm(e @ rho) ** 2 for e in _refined(channel, meas))
    )


def _branches(channel, rho, meas):
    """Refined branches with their outcome probabilities (clamped at zero)."""
    refined = _refined(channel, meas)
    probs = np.array(
        [max(np.trace(e @ rho @ numerics.dagger(e)).real, 0.0) for e in refined]
    )
    return refined, probs


def conditional_states(
    channel: KrausChannel, rho, meas: ProbeMeasurement | None = None
) -> list[tuple[float, np.ndarray]]:
    """Outcome probabilities with K_j = rho^(1/2) E'_j^dag E'_j rho^(1/2) / p(j).

    Outcomes with p(j) below the floor are omitted: their conditional states
    are undefined. The kept pairs satisfy sum_j p(j) K_j = rho up to the
    dropped mass.
    """
    rho = _check_state(channel, rho)
    refined, probs = _branches(channel, rho, meas)
    sq = numerics.psd_power(rho, 0.5)
    out = []
    for e, p in zip(refined, probs):
        if p < OUTCOME_FLOOR:
            continue
        k = numerics.hermitize(sq @ (numerics.dagger(e) @ e) @ sq) / p
        out.append((float(p), k))
    return out


def build_correction(
    channel: KrausChannel, rho, meas: ProbeMeasurement | None = None
) -> KrausChannel:
    """The corrected channel sum_j C_j(E'_j . E'_j^dag) as one Kraus family.

    C_j conjugates by the adjoint of the unitary polar factor V_j of E'_j rho,
    so each corrected operator is V_j^dag E'_j. Its entanglement fidelity at
    rho equals the assisted bound; for rank-deficient E'_j rho any valid polar
    completion gives the same corrected fidelity.
    """
    rho = _check_state(channel, rho)
    corrected = []
    for e in _refined(channel, meas):
        v = numerics.polar_unitary(e @ rho)
        corrected.append(numerics.dagger(v) @ e)
    return kraus_channel(corrected)


@dataclass(frozen=True)
class ErasureReport:
    """Every quantity of the two inequality chains for one configuration.

    Slacks are the per-link margins, each nonnegative up to -1e-9 for valid
    inputs. The converse fields (gamma, slack_converse) are present only when
    the report was produced with an informationally complete ensemble.
    """

    f_e: float
    f_ea: float
    mutual_info: float
    beta: float
    gamma: float | None
    slack_fidelity_trace: float
    slack_measurement_l1: float
    slack_pinsker: float
    slack_total: float
    slack_converse: float | None
    sum_pj_trace_sq: float
    sum_pj_l1_sq: float
    rho_invertible: bool

    def slacks(self) -> dict[str, float]:
        out = {
            "slack_fidelity_trace": self.slack_fidelity_trace,
            "slack_measurement_l1": self.slack_measurement_l1,
            "slack_pinsker": self.slack_pinsker,
            "slack_total": self.slack_total,
        }
        if self.slack_converse is not None:
            out["slack_converse"] = self.slack_converse
        return out

    def worst_slack(self) -> float:
        return min(self.slacks().values())

    def ok(self, floor: float = SLACK_FLOOR) -> bool:
        return self.worst_slack() >= floor

    def assert_ok(self, floor: float = SLACK_FLOOR) -> None:
        """Tripwire for fuzzing: name the offending link and its slack."""
        for link, value in self.slacks().items():
            assert value >= floor, f"{link} = {value:.6e} below {floor:.0e}"

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            out[f.name] = value
        return out


def _chain_quantities(channel, rho, ens, meas):
    """Shared plumbing for both verification chains."""
    refined, probs = _branches(channel, rho, meas)
    joint = joint_distribution(channel, ens, meas)
    weights = ens.weights
    p_out = joint.sum(axis=0)
    sq = numerics.psd_power(rho, 0.5)

    kept = [j for j in range(len(refined)) if probs[j] >= OUTCOME_FLOOR]
    cond_states = {
        j: numerics.hermitize(sq @ (numerics.dagger(refined[j]) @ refined[j]) @ sq)
        / probs[j]
        for j in kept
    }
    trace_dists = {j: numerics.trace_norm(rho - cond_states[j]) for j in kept}
    classical_l1 = {
        j: float(np.abs(weights - joint[:, j] / p_out[j]).sum()) for j in kept
    }

    f_e = entanglement_fidelity(channel, rho)
    f_ea = float(sum(numerics.trace_norm(e @ rho) ** 2 for e in refined))
    info = mutual_information(joint)
    return probs, kept, trace_dists, classical_l1, f_e, f_ea, info


def verify_direct(
    channel: KrausChannel,
    rho,
    ens: Ensemble,
    meas: ProbeMeasurement | None = None,
) -> ErasureReport:
    """Evaluate the direct chain link by link and report every slack.

    The chain descends from F_ea through the conditional-state trace
    distances, the measured (classical) l1 distances under the ensemble POVM
    {rho^(-1/2) rho_i rho^(-1/2)}, and the Pinsker bound, ending at
    1 - beta I / 4 <= 1 with beta = min_i p(i).
    """
    rho = _check_state(channel, rho)
    validate(channel)
    meas = _resolve_meas(channel, meas)
    mismatch = float(np.abs(ens.average - rho).max())
    if mismatch > 1e-9:
        raise EnsembleMismatch(
            f"ensemble average deviates from rho by {mismatch:.3e} (tolerance 1e-09)"
        )
    probs, kept, trace_dists, classical_l1, f_e, f_ea, info = _chain_quantities(
        channel, rho, ens, meas
    )
    beta = ens.beta
    sum_trace_sq = float(sum(probs[j] * trace_dists[j] ** 2 for j in kept))
    sum_l1_sq = float(sum(probs[j] * classical_l1[j] ** 2 for j in kept))
    a1 = 1 - sum_trace_sq / 4
    a2 = 1 - sum_l1_sq / 4
    a3 = 1 - beta * info / 4
    return ErasureReport(
        f_e=f_e,
        f_ea=f_ea,
        mutual_info=info,
        beta=beta,
        gamma=None,
        slack_fidelity_trace=a1 - f_ea,
        slack_measurement_l1=a2 - a1,
        slack_pinsker=a3 - a2,
        slack_total=1 - a3,
        slack_converse=None,
        sum_pj_trace_sq=sum_trace_sq,
        sum_pj_l1_sq=sum_l1_sq,
        rho_invertible=numerics.support_rank(rho) == channel.dim,
    )


def verify_converse(
    channel: KrausChannel,
    rho,
    meas: ProbeMeasurement | None = None,
    members: int | None = None,
    seed=0,
) -> ErasureReport:
    """Evaluate the converse chain on a seeded informationally complete ensemble.

    The chain climbs from 1 - sqrt2 |Gamma| sqrt(I) through the reconstruction
    bound 1 - |Gamma| sum_ij p(j)|p(i) - p(i|j)| up to F_ea; the reported
    slack_converse is the worst of the three links. Direct-chain slacks for
    the same IC ensemble are reported alongside.
    """
    rho = _check_state(channel, rho)
    validate(channel)
    meas = _resolve_meas(channel, meas)
    if members is None:
        members = numerics.support_rank(rho) ** 2
    ic = ic_ensemble(rho, members, seed)
    report = verify_direct(channel, rho, ic.base, meas)

    probs, kept, trace_dists, classical_l1, _, f_ea, info = _chain_quantities(
        channel, rho, ic.base, meas
    )
    b1 = 1 - float(sum(probs[j] * trace_dists[j] for j in kept))
    b2 = 1 - ic.gamma * float(sum(probs[j] * classical_l1[j] for j in kept))
    b3 = 1 - np.sqrt(2) * ic.gamma * np.sqrt(info)
    slack_converse = float(min(f_ea - b1, b1 - b2, b2 - b3))
    return ErasureReport(
        f_e=report.f_e,
        f_ea=report.f_ea,
        mutual_info=report.mutual_info,
        beta=report.beta,
        gamma=ic.gamma,
        slack_fidelity_trace=report.slack_fidelity_trace,
        slack_measurement_l1=report.slack_measurement_l1,
        slack_pinsker=report.slack_pinsker,
        slack_total=report.slack_total,
        slack_converse=slack_converse,
        sum_pj_trace_sq=report.sum_pj_trace_sq,
        sum_pj_l1_sq=report.sum_pj_l1_sq,
        rho_invertible=report.rho_invertible,
    )
