"""Sweep curves for the two motivating arrangements.

eraser: the which-path channel read out in a rotated probe basis; the
assisted fidelity follows (1 + |sin 2 theta|)/2, hitting 1 at the Hadamard
angle theta = pi/4 where the outcome statistics decouple from every input
ensemble.

teleport: the partial-teleportation family; the canonical four-outcome
readout gives (1 + 2 sqrt(lam0 (1 - lam0)))/2, equal to 1 exactly at the
maximally entangled resource lam0 = 1/2.
"""

from __future__ import annotations

import numpy as np

from .channels import preset
from .erasure import assisted_fidelity
from .errors import UnknownScenario
from .optimizer import optimize_erasure
from .probes import joint_distribution, mutual_information, random_ensemble, rotation_measurement

ERASER_GRID = 33
TELEPORT_GRID = 21

ERASER_COLUMNS = ("theta", "f_ea", "mutual_info")
TELEPORT_COLUMNS = ("lambda0", "f_ea_canonical", "f_ea_optimized")


def eraser_curve(points: int = ERASER_GRID, seed: int = 0, members: int = 4):
    """Rows (theta, f_ea, mutual_info) over theta in [0, pi/2] for a fixed seeded ensemble."""
    if points < 2:
        raise UnknownScenario(f"grid must have at least 2 points, got {points}")
    channel = preset("eraser_cnot")
    rho = np.eye(2, dtype=complex) / 2
    ens = random_ensemble(rho, members, np.random.default_rng([seed, 0]))
    rows = []
    for theta in np.linspace(0.0, np.pi / 2, points):
        meas = rotation_measurement(theta)
        f_ea = assisted_fidelity(channel, rho, meas)
        info = mutual_information(joint_distribution(channel, ens, meas))
        rows.append((float(theta), f_ea, info))
    return rows


def teleport_curve(points: int = TELEPORT_GRID, seed: int = 0, restarts: int = 8):
    """Rows (lambda0, f_ea_canonical, f_ea_optimized) over lambda0 in [0, 1]."""
    if points < 2:
        raise UnknownScenario(f"grid must have at least 2 points, got {points}")
    rho = np.eye(2, dtype=complex) / 2
    rows = []
    for lam0 in np.linspace(0.0, 1.0, points):
        channel = preset("partial_teleportation", lam0=float(lam0))
        f_canonical = assisted_fidelity(channel, rho)
        f_optimized = optimize_erasure(
            channel, rho, restarts=restarts, seed=seed
        ).best_value
        rows.append((float(lam0), f_canonical, f_optimized))
    return rows


def scenario_curve(name: str, points: int | None = None, seed: int = 0, restarts: int = 8):
    """Dispatch by scenario name; returns (column names, rows)."""
    if name == "eraser":
        return ERASER_COLUMNS, eraser_curve(points or ERASER_GRID, seed)
    if name == "teleport":
        return TELEPORT_COLUMNS, teleport_curve(points or TELEPORT_GRID, seed, restarts)
    raise UnknownScenario(f"unknown scenario {name!r}; choose eraser or teleport")
