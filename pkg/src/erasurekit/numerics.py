"""Dense complex matrix decompositions, distances, and entropy primitives.

All functions operate on plain numpy arrays and are pure: no hidden state,
randomness flows only through explicit seeds, and everything is safe to call
from any number of threads. Entropic quantities use the natural logarithm
(nats) throughout; the constants in the Pinsker-type bounds hold as written
only in that convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BetaZero,
    DimensionMismatch,
    DivergentRelativeEntropy,
    NotDensity,
    NotFinite,
    NotPSD,
)

# Eigenvalues of nominally-PSD matrices in [-EIG_CLAMP, 0) are float noise and
# are clamped to zero; anything below -PSD_VIOLATION is a genuine violation.
EIG_CLAMP = 1e-10
PSD_VIOLATION = 1e-8

# Rank cutoff for every on-support pseudo-power (rho**(+-1/2) and friends).
RANK_CUTOFF = 1e-10


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite complex 2-D array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise NotFinite("matrix contains NaN or Inf entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def hermitize(a: np.ndarray) -> np.ndarray:
    """Average away the anti-Hermitian float noise of a nominally Hermitian matrix."""
    return (a + a.conj().T) / 2


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(rows: int, cols: int, seed) -> np.ndarray:
    """Standard complex Gaussian matrix (independent N(0, 1/2) real and imag parts)."""
    rng = _rng(seed)
    return (rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))) / np.sqrt(2)


def polar_decompose(a) -> tuple[np.ndarray, np.ndarray]:
    """Right polar decomposition a = u @ p of a square matrix.

    Returns
    -------
    u : unitary factor. For rank-deficient ``a`` the action of ``u`` on the
        null space of ``p`` is not determined by ``a``; the singular-vector
        completion returned here is one valid choice and callers must not
        rely on it beyond ``u @ p == a``.
    p : positive-semidefinite factor ``sqrt(a^dag a)``.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"polar decomposition needs a square matrix, got {a.shape}")
    x, s, yh = np.linalg.svd(a)
    u = x @ yh
    p = (dagger(yh) * s) @ yh
    return u, hermitize(p)


def polar_unitary(a) -> np.ndarray:
    """Unitary factor of the right polar decomposition (singular-vector completion)."""
    return polar_decompose(a)[0]


def psd_eigh(p, *, violation: float = PSD_VIOLATION) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian PSD matrix with noise clamping.

    Rejects matrices that are not Hermitian within 1e-10 or have an eigenvalue
    below ``-violation``; eigenvalues in the noise band are clamped to zero.
    """
    p = as_matrix(p)
    if p.shape[0] != p.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {p.shape}")
    herm_dev = float(np.abs(p - dagger(p)).max(initial=0.0))
    if herm_dev > 1e-10:
        raise NotPSD(f"matrix is not Hermitian: max |P - P^dag| = {herm_dev:.3e}")
    w, v = np.linalg.eigh(hermitize(p))
    low = float(w.min(initial=0.0))
    if low < -violation:
        raise NotPSD(f"negative eigenvalue {low:.3e} below tolerance -{violation:.0e}")
    return np.clip(w, 0.0, None), v


def psd_sqrt(p) -> np.ndarray:
    """Positive-semidefinite square root, with eigenvalue noise clamped to zero."""
    w, v = psd_eigh(p)
    return hermitize((v * np.sqrt(w)) @ dagger(v))


def psd_power(p, exponent: float, *, cutoff: float = RANK_CUTOFF) -> np.ndarray:
    """PSD matrix power restricted to the support (eigenvalues above ``cutoff``).

    Negative exponents give the pseudo-inverse power on the support, which is
    how every rho**(+-1/2) in this package is taken.
    """
    w, v = psd_eigh(p)
    keep = w > cutoff
    vk = v[:, keep]
    return hermitize((vk * w[keep] ** exponent) @ dagger(vk))


def support_rank(p, *, cutoff: float = RANK_CUTOFF) -> int:
    """Number of eigenvalues of a PSD matrix above the rank cutoff."""
    w, _ = psd_eigh(p)
    return int((w > cutoff).sum())


def support_basis(p, *, cutoff: float = RANK_CUTOFF) -> np.ndarray:
    """Orthonormal columns spanning the support of a PSD matrix."""
    w, v = psd_eigh(p)
    return v[:, w > cutoff]


def trace_norm(a) -> float:
    """Trace norm ||a||_1 = sum of singular values."""
    a = as_matrix(a)
    return float(np.linalg.svd(a, compute_uv=False).sum())


def ensure_density(rho, *, trace_atol: float = 1e-9) -> np.ndarray:
    """Validate a density matrix: Hermitian, PSD within noise, unit trace."""
    rho = as_matrix(rho)
    try:
        psd_eigh(rho)
    except NotPSD as exc:
        raise NotDensity(str(exc)) from exc
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_atol:
        raise NotDensity(f"trace is {tr:.12g}, expected 1 within {trace_atol:.0e}")
    return rho


def uhlmann_fidelity(rho, sigma) -> float:
    """Uhlmann fidelity F(rho, sigma) = Tr sqrt(sqrt(rho) sigma sqrt(rho)).

    Both arguments must be density matrices of the same dimension. The result
    lies in [0, 1] up to float noise and is symmetric in its arguments.
    """
    rho = as_matrix(rho)
    sigma = as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"state shapes differ: {rho.shape} vs {sigma.shape}")
    for m in (rho, sigma):
        psd_eigh(m)
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > 1e-9:
            raise NotDensity(f"trace is {tr:.12g}, expected 1 within 1e-09")
    s = psd_sqrt(rho)
    w, _ = psd_eigh(s @ sigma @ s)
    return float(np.sqrt(w).sum())


def _as_weights(w) -> np.ndarray:
    w = np.asarray(w, dtype=float).reshape(-1)
    if not np.all(np.isfinite(w)):
        raise NotFinite("probability vector contains NaN or Inf entries")
    return w


def shannon_entropy(p) -> float:
    """Shannon entropy in nats, with the 0 ln 0 = 0 convention."""
    p = _as_weights(p)
    pos = p[p > 0]
    return float(-(pos * np.log(pos)).sum())


def relative_entropy(r, s) -> float:
    """Relative entropy D(r||s) = sum r(k) ln(r(k)/s(k)) in nats.

    Entries where r(k) = 0 contribute nothing regardless of s(k); an entry
    with r(k) > 0 but s(k) = 0 makes the divergence infinite and raises
    DivergentRelativeEntropy instead of returning a value.
    """
    r = _as_weights(r)
    s = _as_weights(s)
    if r.shape != s.shape:
        raise DimensionMismatch(f"length mismatch: {r.size} vs {s.size}")
    mask = r > 0
    if np.any(s[mask] <= 0):
        raise DivergentRelativeEntropy("s(k) = 0 on an outcome with r(k) > 0")
    rm = r[mask]
    return float((rm * np.log(rm / s[mask])).sum())


@dataclass(frozen=True)
class EntropyBounds:
    """l1 distance, divergence, and the slack of each Pinsker-type bound."""

    l1: float
    divergence: float
    lower_slack: float
    upper_slack: float


def verify_entropy_bounds(r, s) -> EntropyBounds:
    """Check (1/2)||r-s||_1^2 <= D(r||s) <= (1/beta)||r-s||_1^2, beta = min_k s(k).

    Returns the two slacks (each nonnegative up to float noise for valid
    inputs); ``s`` must be entrywise strictly positive for the upper bound.
    """
    r = _as_weights(r)
    s = _as_weights(s)
    if r.shape != s.shape:
        raise DimensionMismatch(f"length mismatch: {r.size} vs {s.size}")
    beta = float(s.min(initial=np.inf))
    if beta <= 0:
        raise BetaZero("upper bound needs min_k s(k) > 0")
    l1 = float(np.abs(r - s).sum())
    div = relative_entropy(r, s)
    return EntropyBounds(
        l1=l1,
        divergence=div,
        lower_slack=div - 0.5 * l1**2,
        upper_slack=l1**2 / beta - div,
    )


def haar_isometry(rows: int, cols: int, seed) -> np.ndarray:
    """Haar-distributed isometry (orthonormal columns) of shape rows x cols.

    QR of a complex Ginibre matrix with the diagonal phases of R normalized,
    which gives the exact Haar distribution. Deterministic for a fixed seed.
    """
    if cols < 1 or rows < cols:
        raise DimensionMismatch(f"need rows >= cols >= 1, got {rows} x {cols}")
    q, r = np.linalg.qr(ginibre(rows, cols, seed))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_unitary(d: int, seed) -> np.ndarray:
    """Haar-distributed d x d unitary, deterministic for a fixed seed."""
    if d < 1:
        raise DimensionMismatch(f"dimension must be >= 1, got {d}")
    return haar_isometry(d, d, seed)


def random_density(d: int, seed, *, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a normalized Ginibre product (full rank by default)."""
    if d < 1:
        raise DimensionMismatch(f"dimension must be >= 1, got {d}")
    r = d if rank is None else rank
    if not 1 <= r <= d:
        raise DimensionMismatch(f"rank must be in [1, {d}], got {r}")
    g = ginibre(d, r, seed)
    p = g @ dagger(g)
    return hermitize(p / np.trace(p).real)
