"""Brute-force verifiers for the closed-form channel algebra.

Everything here recomputes quantities the rest of the package obtains from
formulas, using a different route: explicit Kraus action on density matrices,
eigenvalue-based von Neumann entropies of Choi states, and Gaussian covariance
propagation for thermal-loss chains. The tests pit these against the fast
implementations; nothing else should depend on this module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, KrausError

# Eigenvalues at or below this are treated as exact zeros inside entropies.
EIG_ZERO_TOL = 1e-14
MATRIX_TOL = 1e-12

_I2 = np.eye(2, dtype=complex)
# Maximally entangled 2-qubit ket (|00> + |11>) / sqrt(2).
_BELL = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class QubitChannel:
    """A qubit channel given by its Kraus operators."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.kraus:
            raise KrausError("a channel needs at least one Kraus operator")
        total = np.zeros((2, 2), dtype=complex)
        for k in self.kraus:
            if k.shape != (2, 2):
                raise KrausError(f"Kraus operators must be 2x2, got shape {k.shape}")
            total += k.conj().T @ k
        if not np.allclose(total, _I2, atol=MATRIX_TOL, rtol=0.0):
            raise KrausError("Kraus set is not trace preserving")


def identity_channel() -> QubitChannel:
    return QubitChannel((_I2.copy(),))


def ad_channel(p: float) -> QubitChannel:
    """Amplitude damping: K0 = |0><0| + sqrt(1-p)|1><1|, K1 = sqrt(p)|0><1|."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"damping probability must lie in [0, 1], got {p}")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(p)], [0.0, 0.0]], dtype=complex)
    return QubitChannel((k0, k1))


def dephasing_channel(p: float) -> QubitChannel:
    """Phase flip with probability p."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"flip probability must lie in [0, 1], got {p}")
    k0 = np.sqrt(1.0 - p) * _I2
    k1 = np.sqrt(p) * np.diag([1.0, -1.0]).astype(complex)
    return QubitChannel((k0, k1))


def apply_channel(channel: QubitChannel, rho: np.ndarray) -> np.ndarray:
    """Sum_i K_i rho K_i^dagger."""
    out = np.zeros_like(rho, dtype=complex)
    for k in channel.kraus:
        out += k @ rho @ k.conj().T
    return out


def choi_of(channel: QubitChannel) -> np.ndarray:
    """Choi state (I (x) E)(|Phi><Phi|) with |Phi> maximally entangled."""
    rho = np.outer(_BELL, _BELL.conj())
    out = np.zeros((4, 4), dtype=complex)
    for k in channel.kraus:
        op = np.kron(_I2, k)
        out += op @ rho @ op.conj().T
    return out


def _check_density(rho: np.ndarray, size: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (size, size):
        raise DomainError(f"expected a {size}x{size} matrix, got shape {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=MATRIX_TOL, rtol=0.0):
        raise DomainError("matrix is not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) > MATRIX_TOL:
        raise DomainError(f"trace must be 1, got {np.trace(rho).real}")
    if np.linalg.eigvalsh(rho).min() < -MATRIX_TOL:
        raise DomainError("matrix is not positive semidefinite within tolerance")
    return rho


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in bits from the eigenvalue spectrum; tiny eigenvalues count as 0."""
    lam = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    lam = lam[lam > EIG_ZERO_TOL]
    return float(-(lam * np.log2(lam)).sum())


def trace_out_a(rho: np.ndarray) -> np.ndarray:
    """Partial trace over the first qubit of a 2-qubit state."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return np.einsum("abac->bc", r)


def trace_out_b(rho: np.ndarray) -> np.ndarray:
    """Partial trace over the second qubit of a 2-qubit state."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return np.einsum("abcb->ac", r)


def ci_rci(choi: np.ndarray) -> tuple[float, float]:
    """Coherent and reverse coherent information of a Choi state, in bits.

    The first tensor factor is the untouched reference, the second the channel
    output: I_C = S(Tr_A rho) - S(rho) and I_RC = S(Tr_B rho) - S(rho).
    """
    rho = _check_density(choi, 4)
    s_joint = von_neumann_entropy(rho)
    ic = von_neumann_entropy(trace_out_a(rho)) - s_joint
    irc = von_neumann_entropy(trace_out_b(rho)) - s_joint
    return ic, irc


def ad_rci_at_u(p: float, u: float) -> float:
    """Reverse coherent information of AD(p) for input excitation u.

    Purifies diag(1-u, u) as sqrt(1-u)|00> + sqrt(u)|11>, damps the second
    qubit, and returns S(rho_A) - S(rho_AB) from explicit eigenvalues.
    """
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"input excitation must lie in [0, 1], got {u}")
    psi = np.zeros(4, dtype=complex)
    psi[0] = np.sqrt(1.0 - u)
    psi[3] = np.sqrt(u)
    rho = np.outer(psi, psi.conj())
    out = np.zeros((4, 4), dtype=complex)
    for k in ad_channel(p).kraus:
        op = np.kron(_I2, k)
        out += op @ rho @ op.conj().T
    return von_neumann_entropy(trace_out_b(out)) - von_neumann_entropy(out)


def check_covariance(v: np.ndarray) -> np.ndarray:
    """Validate a single-mode covariance matrix (vacuum = I/2 convention)."""
    v = np.asarray(v, dtype=float)
    if v.shape != (2, 2):
        raise DomainError(f"covariance matrix must be 2x2, got shape {v.shape}")
    if not np.allclose(v, v.T, atol=MATRIX_TOL, rtol=0.0):
        raise DomainError("covariance matrix is not symmetric")
    if np.linalg.eigvalsh(v).min() <= 0.0:
        raise DomainError("covariance matrix is not positive definite")
    if np.linalg.det(v) < 0.25 - MATRIX_TOL:
        raise DomainError("covariance matrix violates the uncertainty bound det V >= 1/4")
    return v


def gaussian_propagate(v: np.ndarray, channels) -> np.ndarray:
    """Push a covariance matrix through a chain of thermal-loss channels.

    Each step maps V -> tau*V + (nbar + |1-tau|/2)*I. An empty chain returns
    the input unchanged.
    """
    out = check_covariance(v).copy()
    eye = np.eye(2)
    for tau, nbar in channels:
        if not 0.0 < tau <= 1.0:
            raise DomainError(f"transmissivity must lie in (0, 1], got {tau}")
        if nbar < 0.0:
            raise DomainError(f"thermal photon number must be >= 0, got {nbar}")
        out = tau * out + (nbar + 0.5 * abs(1.0 - tau)) * eye
    return out
