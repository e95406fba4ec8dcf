"""Magnetized-plasma permittivity tensor and bulk-mode diagnostics.

Frequencies are angular (rad/s) throughout. The time convention is
``exp(-i omega t)``, so passive media have ``Im(eps) >= 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.constants import c as C0


class SingularPermittivityError(ValueError):
    """Raised at the lossless cyclotron resonance or a bulk TM resonance."""


def csqrt_decay(z):
    """Square root on the branch with ``Im >= 0`` (decaying ``exp(i k x)``)."""
    r = np.sqrt(np.asarray(z, dtype=complex))
    return np.where(r.imag < 0, -r, r) if np.ndim(r) else (-r if r.imag < 0 else r)


@dataclass(frozen=True)
class PlasmaParams:
    """Drude magnetoplasma. ``omega_c`` is signed; its sign sets the bias direction."""

    omega_p: float
    omega_c: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("omega_p must be positive")
        if self.nu < 0:
            raise ValueError("collision frequency nu must be >= 0")

    @classmethod
    def from_ratios(cls, omega, wp_ratio, wc_ratio=0.0, nu=0.0):
        return cls(omega_p=wp_ratio * omega, omega_c=wc_ratio * omega, nu=nu)


@dataclass(frozen=True)
class PermittivityTensor:
    eps11: complex
    eps12: complex
    eps33: complex

    def matrix(self) -> np.ndarray:
        """Full 3x3 tensor ``[[e11, i e12, 0], [-i e12, e11, 0], [0, 0, e33]]``."""
        e11, e12, e33 = self.eps11, self.eps12, self.eps33
        return np.array(
            [[e11, 1j * e12, 0.0], [-1j * e12, e11, 0.0], [0.0, 0.0, e33]],
            dtype=complex,
        )


@dataclass(frozen=True)
class OpaqueMedium:
    """Isotropic negative-permittivity half-space.

    Either a fixed ``eps_m`` or, when ``omega_p`` is given, an unbiased
    lossless plasma ``1 - omega_p**2 / omega**2`` (useful for dispersion
    sweeps where the opaque side is itself dispersive).
    """

    eps_m: complex = -2.0
    omega_p: Optional[float] = None

    def eps(self, omega: float) -> complex:
        if self.omega_p is None:
            return complex(self.eps_m)
        return complex(1.0 - (self.omega_p / omega) ** 2)


def permittivity(p: PlasmaParams, omega: float) -> PermittivityTensor:
    if not omega > 0:
        raise ValueError("omega must be positive")
    s = p.nu - 1j * omega
    den = s * s + p.omega_c**2
    if den == 0:
        raise SingularPermittivityError(
            f"cyclotron resonance: nu=0 and omega=|omega_c|={abs(p.omega_c):g}"
        )
    wp2 = p.omega_p**2
    eps11 = 1 + 1j * (wp2 / omega) * (s / den)
    eps12 = wp2 * p.omega_c / (omega * den)
    eps33 = 1 + 1j * wp2 / (omega * s)
    if p.nu == 0:
        # exact zeros, not 1e-17 residue
        eps11, eps12, eps33 = eps11.real + 0j, eps12.real + 0j, eps33.real + 0j
    return PermittivityTensor(complex(eps11), complex(eps12), complex(eps33))


def eps_effective(t: PermittivityTensor) -> complex:
    """Effective TM permittivity ``(e11**2 - e12**2) / e11``."""
    if t.eps11 == 0:
        raise SingularPermittivityError("eps11 = 0: bulk TM resonance")
    return (t.eps11**2 - t.eps12**2) / t.eps11


def bulk_wavenumbers(t: PermittivityTensor, omega: float) -> dict:
    k0 = omega / C0
    return {
        "k_TE": complex(k0 * csqrt_decay(t.eps33)),
        "k_TM": complex(k0 * csqrt_decay(eps_effective(t))),
    }


def passivity_check(t: PermittivityTensor, tol: float = 1e-12):
    """Return ``(is_passive, min_eig)`` of the anti-Hermitian part ``(e - e^H)/2i``."""
    e = t.matrix()
    loss = (e - e.conj().T) / 2j
    w = np.linalg.eigvalsh(0.5 * (loss + loss.conj().T))
    lo = float(w.min())
    return lo >= -tol, lo
