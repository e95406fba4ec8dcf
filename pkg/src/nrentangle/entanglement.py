"""Two-qubit concurrence: Wootters formula and closed-form transients.

The spin-flip operator in the |1>..|4> = |gg>, |ee>, |ge>, |eg> basis is

    sigma_y (x) sigma_y = [[ 0, -1, 0, 0],
                           [-1,  0, 0, 0],
                           [ 0,  0, 0, 1],
                           [ 0,  0, 1, 0]]
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

YY = np.array(
    [[0, -1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=complex,
)

SOURCES = ("wootters_on_trajectory", "analytic_unidir", "analytic_recip", "analytic_1d")


class ConcurrenceValidityError(ArithmeticError):
    pass


@dataclass
class ConcurrenceTrace:
    t: np.ndarray
    C: np.ndarray
    source: str

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.C = np.asarray(self.C, dtype=float)
        if self.source not in SOURCES:
            raise ValueError(f"unknown concurrence source {self.source!r}")
        if self.t.shape != self.C.shape:
            raise ValueError("t and C must have equal length")
        if np.any(self.C < -1e-12) or np.any(self.C > 1 + 1e-9):
            raise ValueError("concurrence outside [0, 1]")

    @property
    def peak(self) -> tuple:
        k = int(np.argmax(self.C))
        return float(self.t[k]), float(self.C[k])

    def to_csv(self, path, metadata: str = "") -> None:
        with open(Path(path), "w", newline="") as fh:
            fh.write(f"# metadata {metadata}\n")
            w = csv.writer(fh)
            w.writerow(["t_s", "C", "source"])
            for t, c in zip(self.t, self.C):
                w.writerow([repr(float(t)), repr(float(c)), self.source])


def spin_flip(rho) -> np.ndarray:
    return YY @ np.conj(rho) @ YY


def is_x_state(rho) -> bool:
    """True when only the diagonal, rho_12 and rho_34 (and conjugates) are nonzero."""
    rho = np.asarray(rho)
    return not np.any(rho[np.ix_([0, 1], [2, 3])]) and not np.any(rho[np.ix_([2, 3], [0, 1])])


def _wootters_x(rho) -> float:
    d = np.real(np.diag(rho))
    a = abs(rho[2, 3]) - np.sqrt(max(d[0] * d[1], 0.0))
    b = abs(rho[0, 1]) - np.sqrt(max(d[2] * d[3], 0.0))
    return float(2 * max(0.0, a, b))


def wootters(rho, *, method: str = "auto", imag_tol: float = 1e-9) -> float:
    """Concurrence from the eigenvalues of ``rho @ spin_flip(rho)``.

    A spectrum with exactly-zero eigenvalues is only resolved to about
    ``sqrt(eps)`` once the square roots are taken, so for X-shaped states
    (the block structure kept exactly by undriven evolution) ``method="auto"``
    uses the closed-form eigenvalues ``sqrt(rho33 rho44) +- |rho34|``,
    ``sqrt(rho11 rho22) +- |rho12|`` instead of the eigensolver.
    """
    rho = np.asarray(rho, dtype=complex)
    if method not in ("auto", "eig", "xstate"):
        raise ValueError(f"unknown method {method!r}")
    if method == "xstate" or (method == "auto" and is_x_state(rho)):
        if not is_x_state(rho):
            raise ValueError("state is not X-shaped")
        return _wootters_x(rho)
    u = np.linalg.eigvals(rho @ spin_flip(rho))
    big = np.abs(u.imag) > imag_tol * max(1.0, np.abs(u).max())
    if np.any(big):
        log.warning("rho rho~ has eigenvalues with imaginary parts up to %.3e", np.abs(u.imag).max())
    u = np.sort(u.real)[::-1]
    if u[-1] < -1e-6:
        raise ConcurrenceValidityError(f"rho rho~ eigenvalue {u[-1]:.3e} below -1e-6")
    u = np.clip(u, 0.0, None)
    lam = np.sqrt(u)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def wootters_trace(t, rhos) -> ConcurrenceTrace:
    return ConcurrenceTrace(t, [wootters(r) for r in rhos], "wootters_on_trajectory")


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    return t


def concurrence_unidir(t, gamma11, gamma21, g21):
    """``2 |Gamma21/2 + i g21| t exp(-Gamma11 t)`` for one-way coupling from |4>."""
    t = _check_t(t)
    return 2 * np.hypot(gamma21 / 2, g21) * t * np.exp(-gamma11 * t)


def c_max_unidir(gamma21_ratio, g21_ratio) -> float:
    """Peak of :func:`concurrence_unidir`, reached at ``Gamma11 t = 1``."""
    return 2 * np.hypot(gamma21_ratio / 2, g21_ratio) / np.e


def concurrence_recip(t, gamma11, gamma12, g12):
    """Transient concurrence of identical qubits in a reciprocal environment, from |4>."""
    if gamma12 > gamma11:
        raise ValueError("need Gamma12 <= Gamma11 (nonnegative subradiant rate)")
    t = _check_t(t)
    a = np.exp(-(gamma11 + gamma12) * t) - np.exp(-(gamma11 - gamma12) * t)
    return np.sqrt(0.25 * a**2 + np.exp(-2 * gamma11 * t) * np.sin(2 * g12 * t) ** 2)


def concurrence_1d(t, beta21, gamma11, k_dblprime, separation):
    t = _check_t(t)
    return 2 * beta21 * gamma11 * np.exp(-k_dblprime * abs(separation)) * t * np.exp(-gamma11 * t)
