"""2D line-source field above a magnetoplasma / opaque-medium interface.

A z-directed unit magnetic line current sits at ``(0, d)`` in the plasma
half-space ``y > 0``; the opaque medium fills ``y < 0``. The field is the
free-space (Hankel) term plus a spectral integral over ``kx`` weighted by the
interface reflection coefficient ``R0``. Poles of ``R0`` are the surface
plasmon polaritons (SPPs).

Wavenumbers inside this module are rad/m; the pole search works internally
in units of the free-space wavenumber ``k0``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.constants import c as C0, epsilon_0 as EPS0
from scipy.integrate import quad_vec
from scipy.special import hankel1

from .materials import (
    OpaqueMedium,
    PlasmaParams,
    PermittivityTensor,
    csqrt_decay,
    eps_effective,
    permittivity,
)

log = logging.getLogger(__name__)

NU_REG_FRACTION = 1e-5
KMAX_FACTOR = 40.0
QUAD_RTOL = 1e-8
SELF_OFFSET_WAVELENGTHS = 0.01


class PoleError(ArithmeticError):
    """Evaluation exactly on the SPP dispersion curve."""


class RootMergeError(ArithmeticError):
    """Two dispersion roots too close to be resolved as simple poles."""


class QuadratureError(ArithmeticError):
    def __init__(self, msg, estimate=None, error=None):
        super().__init__(msg)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class InterfaceGeometry:
    plasma: PlasmaParams
    opaque: OpaqueMedium
    d: float

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError("source height d must be positive")


@dataclass(frozen=True)
class SppPole:
    kx: complex
    residue: complex
    direction: int  # +1: picked up for x > 0, -1: for x < 0


@dataclass
class FieldProfile:
    x: np.ndarray
    Hz_total: np.ndarray
    Hz_residue: np.ndarray
    Hz_incident: np.ndarray
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Media:
    t: PermittivityTensor
    eps_eff: complex
    eps_m: complex
    k0: float
    omega: float

    @property
    def A0(self) -> complex:
        # unit magnetic current
        return 1j * self.omega * EPS0 * self.eps_eff


def _media(geom: InterfaceGeometry, omega: float, nu: Optional[float] = None) -> _Media:
    p = geom.plasma
    if nu is not None and nu != p.nu:
        p = PlasmaParams(p.omega_p, p.omega_c, nu)
    t = permittivity(p, omega)
    return _Media(t, eps_effective(t), geom.opaque.eps(omega), omega / C0, omega)


def _quadrature_nu(geom: InterfaceGeometry, omega: float) -> float:
    return geom.plasma.nu if geom.plasma.nu > 0 else NU_REG_FRACTION * omega


def gamma_z(kx, eps, k0):
    """Vertical decay constant ``sqrt(kx**2 - eps k0**2)`` with ``Re >= 0``.

    Equivalent to ``-i * kz`` with ``Im(kz) >= 0``. On the cut (lossless,
    propagating kx) the limit from the lossy side, ``-i sqrt(|z|)``, is taken
    so the result does not depend on the sign of a zero imaginary part.
    """
    z = np.asarray(kx, dtype=complex) ** 2 - eps * k0 * k0
    r = np.sqrt(z)
    cut = (z.imag == 0) & (z.real < 0)
    if np.any(cut):
        r = np.where(cut, -1j * np.sqrt(np.abs(z.real)), r)
    return r if r.ndim else complex(r)


def _num_den(m: _Media, kx):
    gp = gamma_z(kx, m.eps_eff, m.k0)
    gm = gamma_z(kx, m.eps_m, m.k0)
    a = gp / m.eps_eff
    b = (1j * m.t.eps12 / m.t.eps11) * (1j * kx / m.eps_eff)
    c = gm / m.eps_m
    return a + b - c, a - b + c


def reflection_coefficient(geom: InterfaceGeometry, kx: complex, omega: float) -> complex:
    m = _media(geom, omega)
    num, den = _num_den(m, complex(kx))
    if den == 0 or abs(den) <= 1e-15 * abs(num):
        raise PoleError(f"kx={kx} lies on the SPP dispersion curve")
    return complex(num / den)


# ---------------------------------------------------------------- pole search


def _muller(f, z0, z1, z2, tol=1e-14, maxit=80):
    f0, f1, f2 = f(z0), f(z1), f(z2)
    for _ in range(maxit):
        h1, h2 = z1 - z0, z2 - z1
        if h1 == 0 or h2 == 0 or h1 + h2 == 0:
            return z2, False
        d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = np.sqrt(b * b - 4 * a * f2 + 0j)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        if den == 0:
            return z2, False
        dz = -2 * f2 / den
        z0, z1, z2 = z1, z2, z2 + dz
        f0, f1, f2 = f1, f2, f(z2)
        if abs(dz) < tol * max(1.0, abs(z2)) or f2 == 0:
            return z2, True
    return z2, False


def _winding(f, re0, re1, im0, im1, n=24):
    """Net number of phase windings of f around a rectangle."""
    s = np.linspace(0, 1, n, endpoint=False)
    path = np.concatenate(
        [
            re0 + (re1 - re0) * s + 1j * im0,
            re1 + 1j * (im0 + (im1 - im0) * s),
            re1 - (re1 - re0) * s + 1j * im1,
            re0 + 1j * (im1 - (im1 - im0) * s),
        ]
    )
    v = f(np.append(path, path[0]))
    dphi = np.angle(v[1:] / v[:-1])
    return int(np.rint(dphi.sum() / (2 * np.pi)))


def _denominator_normalized(m: _Media):
    return lambda q: _num_den(m, np.asarray(q) * m.k0)[1] / m.k0


def _refine_roots(fn, seeds, window, step):
    re0, re1, im0, im1 = window
    roots = []
    for s in seeds:
        z, ok = _muller(fn, s - step, s + step, s + 0.1j * step)
        if not ok or not np.isfinite(z):
            continue
        if not (re0 - 1e-12 <= z.real <= re1 + 1e-12 and im0 - 1e-12 <= z.imag <= im1 + 1e-12):
            continue
        roots.append(complex(z))
    return roots


def _dedupe(roots, tol=1e-8):
    out = []
    for r in sorted(roots, key=lambda z: (z.real, z.imag)):
        if all(abs(r - o) > tol * max(1.0, abs(r)) for o in out):
            out.append(r)
    return out


def _pole_side(geom, omega, q, m_true):
    if abs(q.imag) > 1e-12 * max(1.0, abs(q)):
        return 1 if q.imag > 0 else -1
    m_reg = _media(geom, omega, _quadrature_nu(geom, omega))
    fn = _denominator_normalized(m_reg)
    step = 1e-6 * max(1.0, abs(q))
    z, ok = _muller(fn, q - step, q + step, q + 0.1j * step)
    if not ok or z.imag == 0:
        log.warning("could not classify lossless pole %s; using sign of Re(kx)", q)
        return 1 if q.real >= 0 else -1
    return 1 if z.imag > 0 else -1


def _residue(m: _Media, kp: complex) -> complex:
    """Residue of R0 at a simple pole, with a 5-point numerical derivative of the denominator."""
    num, _ = _num_den(m, kp)
    h = 1e-4 * m.k0
    den = lambda z: _num_den(m, z)[1]
    dD = (-den(kp + 2 * h) + 8 * den(kp + h) - 8 * den(kp - h) + den(kp - 2 * h)) / (12 * h)
    if abs(dD) < 1e-8:
        raise RootMergeError(f"vanishing dispersion slope at kx={kp}: merging roots")
    return complex(num / dD)


def find_spp_poles(
    geom: InterfaceGeometry,
    omega: float,
    search_window: Optional[Sequence[float]] = None,
    *,
    nu: Optional[float] = None,
    cells: tuple = (160, 4),
) -> list:
    """Simple zeros of the ``R0`` denominator inside a kx rectangle.

    ``search_window`` is ``(re_min, re_max, im_min, im_max)`` in rad/m;
    default is ``|Re kx| <= 40 k0``, ``|Im kx| <= k0``. Seeds come from cells
    with nonzero phase winding plus local minima of ``|D|`` along the real
    axis; each seed is polished with Muller's method.
    """
    m = _media(geom, omega, nu)
    k0 = m.k0
    if search_window is None:
        window = (-KMAX_FACTOR, KMAX_FACTOR, -1.0, 1.0)
    else:
        window = tuple(v / k0 for v in search_window)
    re0, re1, im0, im1 = window
    fn = _denominator_normalized(m)

    seeds = []
    nre, nim = cells
    re_edges = np.linspace(re0, re1, nre + 1)
    im_edges = np.linspace(im0, im1, nim + 1)
    for a, b in zip(re_edges[:-1], re_edges[1:]):
        for c, d in zip(im_edges[:-1], im_edges[1:]):
            if _winding(fn, a, b, c, d) != 0:
                seeds.append(0.5 * (a + b) + 0.5j * (c + d))
    im_line = min(max(0.0, im0), im1)
    xs = np.linspace(re0, re1, max(2001, int(200 * (re1 - re0))))
    mag = np.abs(fn(xs + 1j * im_line))
    loc = np.nonzero((mag[1:-1] < mag[:-2]) & (mag[1:-1] < mag[2:]))[0] + 1
    seeds.extend(xs[loc] + 1j * im_line)

    step = 1e-3 * (re1 - re0) / nre
    cands = _dedupe(_refine_roots(fn, seeds, window, step))
    poles = []
    for q in cands:
        num = _num_den(m, q * k0)[0] / k0
        if abs(fn(q)) > 1e-8 * max(abs(num), 1e-300):
            continue
        kp = q * k0
        poles.append(SppPole(kp, _residue(m, kp), _pole_side(geom, omega, q, m)))
    for a, b in zip(poles[:-1], poles[1:]):
        if abs(a.kx - b.kx) < 1e-6 * k0:
            raise RootMergeError(f"poles {a.kx} and {b.kx} are merging")
    if not poles:
        log.warning(
            "no SPP pole converged in window %s (k0 units); %d seeds tried", window, len(seeds)
        )
    return poles


# ---------------------------------------------------------------- fields


def incident_field(geom: InterfaceGeometry, x, y, omega: float, *, nu: Optional[float] = None):
    """Line-source field without the interface, ``A0/(-4i) H0(k0 sqrt(eps_eff) rho)``."""
    m = _media(geom, omega, nu)
    x = np.asarray(x, dtype=float)
    rho = np.hypot(x, y - geom.d)
    if np.any(rho == 0):
        raise ValueError("incident field is singular at the source point")
    k = m.k0 * csqrt_decay(m.eps_eff)
    out = m.A0 / (-4j) * hankel1(0, k * rho)
    return out if out.ndim else complex(out)


def _scattered(geom, x, y, omega, rtol, kmax_factor, return_info=False):
    nu_q = _quadrature_nu(geom, omega)
    m = _media(geom, omega, nu_q)
    k0 = m.k0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = y + geom.d

    def integrand(kx):
        num, den = _num_den(m, kx)
        gp = gamma_z(kx, m.eps_eff, k0)
        return (num / den) / (2 * gp) * np.exp(-gp * h + 1j * kx * x)

    K = kmax_factor * k0
    window = (-K, K, -0.5 * k0, 0.5 * k0)
    poles = find_spp_poles(geom, omega, window, nu=nu_q)
    terms = []
    for p in poles:
        gp = gamma_z(p.kx, m.eps_eff, k0)
        terms.append((p.kx, p.residue / (2 * gp) * np.exp(-gp * h + 1j * p.kx * x)))

    def smooth(kx):
        v = integrand(kx)
        for kp, r in terms:
            v = v - r / (kx - kp)
        return v

    brk = {0.0}
    brk.update(float(kp.real) for kp, _ in terms)
    for eps in (m.eps_eff, m.eps_m):
        if eps.real > 0:
            kb = k0 * np.sqrt(eps.real)
            brk.update((kb, -kb))
    brk = sorted(b for b in brk if -K < b < K)

    core, err, info = quad_vec(
        smooth, -K, K, epsrel=rtol, epsabs=0.0, norm="max", points=brk,
        limit=20000, full_output=True,
    )
    if not info.success:
        raise QuadratureError(
            f"Sommerfeld quadrature did not converge ({info.message})", core, err
        )
    for kp, r in terms:
        # path runs along the real axis, off the pole: principal log is continuous
        core = core + r * np.log((K - kp) / (-K - kp))
    tail = 0.0
    for a, b in ((K, np.inf), (-np.inf, -K)):
        tv, te = quad_vec(integrand, a, b, epsrel=rtol, epsabs=1e-300, norm="max")
        tail = tail + tv
        err = err + te
    total = m.A0 / (2 * np.pi) * (core + tail)
    if return_info:
        return total, m, {"quad_error": float(err), "n_poles_subtracted": len(terms),
                          "nu_quadrature": nu_q, "intervals": int(info.intervals.shape[0])}
    return total, m


def sommerfeld_field(
    geom: InterfaceGeometry,
    x,
    y: float,
    omega: float,
    *,
    rtol: float = QUAD_RTOL,
    kmax_factor: float = KMAX_FACTOR,
):
    """Total ``Hz`` in the plasma: incident Hankel term plus the spectral integral.

    The real-axis integral is evaluated with adaptive Gauss-Kronrod
    subdivision after subtracting each near-axis SPP pole analytically. When
    the plasma is lossless a regularizing collision frequency of
    ``1e-5 omega`` is used for the whole quadrature field.
    """
    if y < 0:
        raise ValueError("observation point must lie in the plasma half-space (y >= 0)")
    scalar = np.ndim(x) == 0
    sc, m = _scattered(geom, x, y, omega, rtol, kmax_factor)
    inc = incident_field(geom, np.atleast_1d(x), y, omega, nu=_quadrature_nu(geom, omega))
    out = inc + sc
    return complex(out[0]) if scalar else out


def residue_field(geom: InterfaceGeometry, poles: Sequence[SppPole], x, y: float, omega: float):
    """Discrete SPP contribution. Forward poles act for x > 0, backward for x < 0.

    Closing the contour in the lower half-plane is clockwise, so backward
    poles carry ``-i A0``. At ``x = 0`` each side contributes half.
    """
    m = _media(geom, omega)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros(xa.shape, dtype=complex)
    h = y + geom.d
    for p in poles:
        gp = gamma_z(p.kx, m.eps_eff, m.k0)
        term = p.direction * 1j * m.A0 * p.residue * np.exp(-gp * h + 1j * p.kx * xa) / (2 * gp)
        step = np.where(p.direction * xa > 0, 1.0, np.where(xa == 0, 0.5, 0.0))
        out += step * term
    return complex(out[0]) if np.ndim(x) == 0 else out


def field_profile(geom: InterfaceGeometry, x, y: float, omega: float, **kw) -> FieldProfile:
    x = np.asarray(x, dtype=float)
    poles = find_spp_poles(geom, omega)
    sc, m, info = _scattered(geom, x, y, omega, kw.get("rtol", QUAD_RTOL),
                             kw.get("kmax_factor", KMAX_FACTOR), return_info=True)
    inc = incident_field(geom, x, y, omega, nu=info["nu_quadrature"])
    res = residue_field(geom, poles, x, y, omega)
    info["poles"] = [[p.kx.real, p.kx.imag] for p in poles]
    return FieldProfile(x, inc + sc, res, inc, info)


def normalized_rates_profile(
    geom: InterfaceGeometry,
    x_grid,
    omega: float,
    *,
    y: Optional[float] = None,
    x_self: Optional[float] = None,
) -> dict:
    """Coupling-rate ratios along the interface from ``Hz``.

    ``gamma_ratio = Re Hz(x) / Re Hz(x_self)`` and
    ``g_ratio = -Im Hz(x) / (2 Re Hz(x_self))``. The self point sits a small
    offset (default ``lambda0/100``) from the source because the Hankel term
    is singular there.
    """
    y = geom.d if y is None else y
    lam0 = 2 * np.pi * C0 / omega
    x_self = SELF_OFFSET_WAVELENGTHS * lam0 if x_self is None else x_self
    xg = np.asarray(x_grid, dtype=float)
    H = sommerfeld_field(geom, np.append(xg, x_self), y, omega)
    ref = H[-1].real
    H = H[:-1]
    return {
        "x": xg,
        "gamma_ratio": H.real / ref,
        "g_ratio": -H.imag / (2 * ref),
        "x_self": x_self,
        "self_field": complex(ref),
        "Hz": H,
    }
