"""Coupling-rate matrices (dissipative Gamma, coherent g) for qubit pairs.

Rates are angular frequencies (rad/s). ``Gamma[i, j]`` describes the
influence of qubit ``j`` on qubit ``i`` and needs no symmetry.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.constants import c as C0, epsilon_0 as EPS0, hbar as HBAR

DEBYE = 1e-21 / C0  # C m


class IncompleteGreenDataError(ValueError):
    pass


class PassivityViolationError(ValueError):
    pass


class DegeneratePhaseError(ValueError):
    pass


@dataclass(frozen=True)
class Qubit:
    position: tuple
    dipole: tuple  # C m
    transition_omega0: float

    def __post_init__(self):
        if not np.linalg.norm(self.dipole) > 0:
            raise ValueError("dipole moment must be nonzero")
        if not self.transition_omega0 > 0:
            raise ValueError("transition frequency must be positive")


@dataclass(frozen=True)
class GreenSample:
    i: int
    j: int
    omega: float
    G: np.ndarray  # 3x3 complex, 1/m


@dataclass
class CouplingRates:
    Gamma: np.ndarray
    g: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.Gamma = np.asarray(self.Gamma, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        if self.Gamma.shape != self.g.shape or self.Gamma.ndim != 2:
            raise ValueError("Gamma and g must be square matrices of equal shape")

    @property
    def n(self) -> int:
        return self.Gamma.shape[0]

    def normalized(self, ref: float | None = None) -> "CouplingRates":
        ref = self.Gamma[0, 0] if ref is None else ref
        return CouplingRates(self.Gamma / ref, self.g / ref, dict(self.meta))

    def scaled(self, gamma11: float) -> "CouplingRates":
        """Rates rescaled so that ``Gamma[0, 0] == gamma11``."""
        return self.normalized(self.Gamma[0, 0] / gamma11)

    @classmethod
    def two_qubit(cls, gamma11, gamma21=0.0, g21=0.0, gamma12=0.0, g12=0.0, gamma22=None):
        gamma22 = gamma11 if gamma22 is None else gamma22
        return cls(
            np.array([[gamma11, gamma12], [gamma21, gamma22]]),
            np.array([[0.0, g12], [g21, 0.0]]),
        )


@dataclass(frozen=True)
class ChiralParams:
    """Phenomenological 1D chiral-waveguide couplings.

    ``gamma_1``/``gamma_2`` are the local decay terms; ``None`` means
    ``(gamma_R + gamma_L) / 2``, the guided share of each emitter.
    """

    gamma_R: float
    gamma_L: float
    k_R: float
    k_L: float
    x1: float
    x2: float
    gamma_1: float | None = None
    gamma_2: float | None = None

    def __post_init__(self):
        if self.gamma_R < 0 or self.gamma_L < 0:
            raise ValueError("gamma_R and gamma_L must be nonnegative")
        if not self.x2 > self.x1:
            raise ValueError("positions must satisfy x1 < x2")

    @property
    def local(self) -> tuple:
        default = 0.5 * (self.gamma_R + self.gamma_L)
        return (
            default if self.gamma_1 is None else self.gamma_1,
            default if self.gamma_2 is None else self.gamma_2,
        )


def _prefactor(omega0):
    return omega0**2 / (EPS0 * HBAR * C0**2)


def rates_from_green(qubits: Sequence[Qubit], samples: Iterable[GreenSample]) -> CouplingRates:
    """Rates from Green-tensor samples ``G(r_i, r_j, omega0)``.

    ``Gamma_ij = 2 K d_i . Im G . d_j`` and ``g_ij = K d_i . Re G . d_j`` with
    ``K = omega0**2 / (eps0 hbar c**2)``; omega0 is taken from qubit ``i``.
    """
    n = len(qubits)
    table = {}
    for s in samples:
        table[(s.i, s.j)] = np.asarray(s.G, dtype=complex)
    missing = [(i, j) for i in range(n) for j in range(n) if (i, j) not in table]
    if missing:
        raise IncompleteGreenDataError(f"missing Green samples for pairs {missing}")
    Gam = np.zeros((n, n))
    g = np.zeros((n, n))
    for (i, j), G in table.items():
        if i >= n or j >= n:
            continue
        di = np.asarray(qubits[i].dipole, dtype=float)
        dj = np.asarray(qubits[j].dipole, dtype=float)
        K = _prefactor(qubits[i].transition_omega0)
        Gam[i, j] = 2 * K * di @ G.imag @ dj
        g[i, j] = K * di @ G.real @ dj
    for i in range(n):
        if not Gam[i, i] > 0:
            raise PassivityViolationError(
                f"Gamma[{i},{i}] = {Gam[i, i]:g} <= 0: Im(d.G.d) must be positive at the qubit"
            )
        g[i, i] = 0.0  # Lamb shift not modelled
    return CouplingRates(Gam, g)


def load_green_samples(path) -> list:
    """Read the Green-sample JSON ingestion format.

    ``[{"i": 0, "j": 1, "omega_hz": 2e14, "G": [[[re, im], ...] x3] x3, "unit": "per_meter"}]``
    """
    data = json.loads(Path(path).read_text())
    out = []
    for rec in data:
        if rec.get("unit", "per_meter") != "per_meter":
            raise ValueError(f"unsupported Green unit {rec.get('unit')!r}")
        G = np.array([[complex(re, im) for re, im in row] for row in rec["G"]])
        if G.shape != (3, 3) or not np.all(np.isfinite(G)):
            raise ValueError("each Green sample must be a finite 3x3 tensor")
        out.append(GreenSample(int(rec["i"]), int(rec["j"]), 2 * np.pi * float(rec["omega_hz"]), G))
    return out


def dump_green_samples(samples: Iterable[GreenSample], path) -> None:
    recs = [
        {
            "i": s.i,
            "j": s.j,
            "omega_hz": s.omega / (2 * np.pi),
            "G": [[[z.real, z.imag] for z in row] for row in np.asarray(s.G, dtype=complex)],
            "unit": "per_meter",
        }
        for s in samples
    ]
    Path(path).write_text(json.dumps(recs, indent=1))


def plasmonic_1d_rates(beta12, beta21, gamma11, k_spp, x1, x2) -> CouplingRates:
    """SPP-channel rates of a 1D plasmonic guide.

    ``k_spp`` is one complex wavenumber or a pair ``(k_12, k_21)`` for the two
    directions. The diagonal holds the given ``gamma11``; the SPP share of it,
    ``(beta12 + beta21) * gamma11``, is reported in ``meta``.
    """
    if beta12 < 0 or beta21 < 0 or beta12 + beta21 > 1 + 1e-12:
        raise ValueError("need 0 <= beta_ij and beta12 + beta21 <= 1")
    k12, k21 = (k_spp, k_spp) if np.ndim(k_spp) == 0 else k_spp
    x = (x1, x2)
    beta = {(0, 1): beta12, (1, 0): beta21}
    kk = {(0, 1): complex(k12), (1, 0): complex(k21)}
    Gam = np.diag([gamma11, gamma11]).astype(float)
    g = np.zeros((2, 2))
    for (i, j), b in beta.items():
        sep = x[i] - x[j]
        k = kk[(i, j)]
        amp = b * gamma11 * np.exp(-k.imag * abs(sep))
        g[i, j] = amp * np.sin(k.real * sep)
        Gam[i, j] = 2 * amp * np.cos(k.real * sep)
    return CouplingRates(Gam, g, {"gamma_spp_diag": (beta12 + beta21) * gamma11})


def chiral_to_rates(c: ChiralParams) -> CouplingRates:
    d = c.x2 - c.x1
    zR = c.gamma_R * np.exp(1j * c.k_R * d)  # Gamma21/2 + i g21
    zL = c.gamma_L * np.exp(-1j * c.k_L * d)  # Gamma12/2 + i g12
    g1, g2 = c.local
    return CouplingRates(
        np.array([[2 * g1, 2 * zL.real], [2 * zR.real, 2 * g2]]),
        np.array([[0.0, zL.imag], [zR.imag, 0.0]]),
    )


def rates_to_chiral(r: CouplingRates, positions, *, expect_nonzero: bool = False) -> ChiralParams:
    """Invert :func:`chiral_to_rates`; wavenumbers are principal values.

    The ``2 pi / (x2 - x1)`` ambiguity of ``k_R``, ``k_L`` is flagged, not resolved.
    """
    x1, x2 = positions
    d = x2 - x1
    zR = r.Gamma[1, 0] / 2 + 1j * r.g[1, 0]
    zL = r.Gamma[0, 1] / 2 + 1j * r.g[0, 1]
    if expect_nonzero and (zR == 0 or zL == 0):
        raise DegeneratePhaseError("zero coupling leaves the propagation phase undefined")
    return ChiralParams(
        gamma_R=float(abs(zR)),
        gamma_L=float(abs(zL)),
        k_R=float(np.angle(zR)) / d,
        k_L=-float(np.angle(zL)) / d,
        x1=x1,
        x2=x2,
        gamma_1=r.Gamma[0, 0] / 2,
        gamma_2=r.Gamma[1, 1] / 2,
    )


def rwa_check(rates: CouplingRates, omega0: float, threshold: float = 1e-3) -> dict:
    ratio = float(np.max(np.diag(rates.Gamma)) / omega0)
    return {"max_gamma_over_omega0": ratio, "threshold": threshold, "pass": ratio < threshold}


def rates_from_profile(gamma11, gamma21_ratio, g21_ratio, gamma12_ratio, g12_ratio) -> CouplingRates:
    """Absolute two-qubit rates from normalized 2D profile samples."""
    r = CouplingRates.two_qubit(1.0, gamma21_ratio, g21_ratio, gamma12_ratio, g12_ratio)
    out = r.scaled(gamma11)
    out.meta["source"] = "greens2d"
    return out
