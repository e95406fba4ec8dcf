"""Two-qubit master-equation dynamics in nonreciprocal environments.

Density matrices use the basis

    |1> = |g1 g2>,  |2> = |e1 e2>,  |3> = |g1 e2>,  |4> = |e1 g2>

and ``sigma_i = |g_i><e_i|`` acts on qubit ``i`` with identity on the other.
Rates and Rabi frequencies are angular (rad/s); hbar is absorbed, so the
Hamiltonian term is ``-i [H/hbar, rho]``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.integrate import solve_ivp

from .coupling import ChiralParams, CouplingRates

log = logging.getLogger(__name__)

BASIS_ORDER = (0, 3, 1, 2)  # computational |q1 q2> index of |1>..|4>, with g=0, e=1

Environment = Union[CouplingRates, ChiralParams]


class StepSizeError(ValueError):
    pass


class PositivityError(ArithmeticError):
    pass


class NonUniqueSteadyStateError(ArithmeticError):
    pass


def lowering_ops(n: int = 2) -> list:
    """``sigma_i`` for ``n`` qubits; two-qubit operators come in the |1>..|4> basis."""
    lower = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e|, g=0
    ops = []
    for i in range(n):
        mats = [np.eye(2, dtype=complex)] * n
        mats[i] = lower
        op = mats[0]
        for m in mats[1:]:
            op = np.kron(op, m)
        ops.append(op)
    if n == 2:
        p = list(BASIS_ORDER)
        ops = [op[np.ix_(p, p)] for op in ops]
    return ops


SIGMA = lowering_ops(2)


def basis_state(k: int) -> np.ndarray:
    """``|k><k|`` for k in 1..4."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[k - 1, k - 1] = 1.0
    return rho


def bell_state() -> np.ndarray:
    psi = np.array([1, 1, 0, 0], dtype=complex) / np.sqrt(2)
    return np.outer(psi, psi.conj())


def validate_density_matrix(rho, tol=1e-10, eig_tol=1e-9) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real:.12g}, not 1")
    if np.linalg.eigvalsh(rho).min() < -eig_tol:
        raise ValueError("density matrix has negative eigenvalues")
    return rho


@dataclass(frozen=True)
class DriveParams:
    Omega1: complex = 0.0
    Omega2: complex = 0.0
    Delta_l: float = 0.0

    @property
    def omegas(self) -> tuple:
        return (complex(self.Omega1), complex(self.Omega2))

    @property
    def is_zero(self) -> bool:
        return self.Omega1 == 0 and self.Omega2 == 0 and self.Delta_l == 0


@dataclass
class EvolutionConfig:
    t_end: float
    dt: Optional[float] = None
    method: str = "fixed_rk4"
    record_stride: int = 1

    def __post_init__(self):
        if self.method not in ("fixed_rk4", "adaptive_rk45"):
            raise ValueError(f"unknown integrator {self.method!r}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")


@dataclass
class Trajectory:
    t: np.ndarray
    rho: np.ndarray
    stats: dict = field(default_factory=dict)

    def populations(self) -> np.ndarray:
        return np.real(np.diagonal(self.rho, axis1=1, axis2=2))


# ---------------------------------------------------------------- generators


def lindblad_general(rho, rates: CouplingRates, n: Optional[int] = None) -> np.ndarray:
    """Dissipator for N qubits coupled through a general (nonreciprocal) environment."""
    n = rates.n if n is None else n
    rho = np.asarray(rho, dtype=complex)
    if rates.n != n or rho.shape != (2**n, 2**n):
        raise ValueError(f"dimension mismatch: {rates.n} rates, rho {rho.shape}, n={n}")
    s = SIGMA if n == 2 else lowering_ops(n)
    sd = [o.conj().T for o in s]
    G, g = rates.Gamma, rates.g
    out = np.zeros_like(rho)
    for i in range(n):
        nn = sd[i] @ s[i]
        out += 0.5 * G[i, i] * (2 * s[i] @ rho @ sd[i] - nn @ rho - rho @ nn)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            sj_rho = s[j] @ rho
            rho_sdj = rho @ sd[j]
            c1 = sj_rho @ sd[i] - sd[i] @ sj_rho  # [sigma_j rho, sigma_i^+]
            c2 = s[i] @ rho_sdj - rho_sdj @ s[i]  # [sigma_i, rho sigma_j^+]
            out += 0.5 * G[i, j] * (c1 + c2) + g[i, j] * (-1j * c1 + 1j * c2)
    return out


def lindblad_chiral(rho, c: ChiralParams) -> np.ndarray:
    """Phenomenological 1D chiral-waveguide dissipator for two qubits."""
    rho = np.asarray(rho, dtype=complex)
    s1, s2 = SIGMA
    s1d, s2d = s1.conj().T, s2.conj().T
    d = c.x2 - c.x1
    out = np.zeros_like(rho)
    for gj, s, sd in zip(c.local, (s1, s2), (s1d, s2d)):
        nn = sd @ s
        out += gj * (2 * s @ rho @ sd - rho @ nn - nn @ rho)
    eR = c.gamma_R * np.exp(1j * c.k_R * d)
    eL = c.gamma_L * np.exp(1j * c.k_L * d)
    out += eR * (s2 @ rho @ s1d - rho @ s1d @ s2)
    out += np.conj(eR) * (s1 @ rho @ s2d - s2d @ s1 @ rho)
    out += np.conj(eL) * (s1 @ rho @ s2d - rho @ s2d @ s1)
    out += eL * (s2 @ rho @ s1d - s1d @ s2 @ rho)
    return out


def _drive_operator(drive: DriveParams, n: int = 2) -> np.ndarray:
    s = SIGMA if n == 2 else lowering_ops(n)
    return sum(om * o.conj().T for om, o in zip(drive.omegas, s))


def hamiltonian_term(rho, drive: DriveParams, t: float = 0.0, n: int = 2) -> np.ndarray:
    """``-i [Hs + V(t), rho]`` with ``Hs = Delta_l sum sigma_i^+ sigma_i`` (Lamb shift dropped)
    and ``V(t) = -(Omega_i exp(-i Delta_l t) sigma_i^+ + h.c.)``."""
    rho = np.asarray(rho, dtype=complex)
    s = SIGMA if n == 2 else lowering_ops(n)
    Hs = drive.Delta_l * sum(o.conj().T @ o for o in s)
    A = _drive_operator(drive, n) * np.exp(-1j * drive.Delta_l * t)
    H = Hs - (A + A.conj().T)
    return -1j * (H @ rho - rho @ H)


def dissipator(rho, env: Environment) -> np.ndarray:
    if isinstance(env, ChiralParams):
        return lindblad_chiral(rho, env)
    return lindblad_general(rho, env)


def _superop(fn, dim: int) -> np.ndarray:
    """Matrix of a linear map on row-major ``vec(rho)``."""
    L = np.zeros((dim * dim, dim * dim), dtype=complex)
    for k in range(dim * dim):
        e = np.zeros(dim * dim, dtype=complex)
        e[k] = 1.0
        L[:, k] = fn(e.reshape(dim, dim)).reshape(-1)
    return L


def liouvillian(env: Environment, drive: Optional[DriveParams] = None) -> tuple:
    """Superoperators ``(L0, Lp, Lm)`` with ``L(t) = L0 + e^{-i D t} Lp + e^{+i D t} Lm``."""
    drive = drive or DriveParams()
    L0 = _superop(lambda r: dissipator(r, env), 4)
    Hs = drive.Delta_l * sum(o.conj().T @ o for o in SIGMA)
    L0 += _superop(lambda r: -1j * (Hs @ r - r @ Hs), 4)
    A = _drive_operator(drive)
    Ad = A.conj().T
    Lp = _superop(lambda r: 1j * (A @ r - r @ A), 4)
    Lm = _superop(lambda r: 1j * (Ad @ r - r @ Ad), 4)
    return L0, Lp, Lm


def max_rate(env: Environment, drive: Optional[DriveParams] = None) -> float:
    drive = drive or DriveParams()
    if isinstance(env, ChiralParams):
        scales = [*env.local, env.gamma_R, env.gamma_L]
    else:
        scales = [np.max(np.abs(env.Gamma)), np.max(np.abs(env.g))]
    scales += [abs(drive.Omega1), abs(drive.Omega2), abs(drive.Delta_l)]
    return float(max(scales))


# ---------------------------------------------------------------- integration


def _record(rho, stats, renorm_tol):
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    tr = np.trace(rho)
    trace_drift = float(abs(tr - 1))
    fixed = 0.5 * (rho + rho.conj().T)
    fixed = fixed / np.trace(fixed).real
    lo = float(np.linalg.eigvalsh(fixed).min())
    corr = float(np.max(np.abs(fixed - rho)))
    stats["max_trace_drift"] = max(stats["max_trace_drift"], trace_drift)
    stats["max_hermiticity_drift"] = max(stats["max_hermiticity_drift"], herm)
    stats["min_eigenvalue"] = min(stats["min_eigenvalue"], lo)
    stats["max_correction"] = max(stats["max_correction"], corr)
    if lo < -1e-6:
        raise PositivityError(f"density matrix eigenvalue {lo:.3e} below -1e-6")
    if corr > renorm_tol:
        raise PositivityError(f"renormalization correction {corr:.3e} exceeds {renorm_tol:g}")
    stats["n_recorded"] = stats.get("n_recorded", 0) + 1
    return fixed


def evolve(
    rho0,
    env: Environment,
    drive: Optional[DriveParams] = None,
    cfg: Optional[EvolutionConfig] = None,
    *,
    renorm_tol: float = 1e-6,
) -> Trajectory:
    """Integrate the master equation from ``rho0``.

    Each recorded sample is re-Hermitized and trace-normalized; the size of
    those corrections (and the drifts before correcting) lands in
    ``Trajectory.stats``.
    """
    drive = drive or DriveParams()
    if cfg is None:
        raise ValueError("an EvolutionConfig is required")
    rho0 = validate_density_matrix(rho0)
    scale = max_rate(env, drive)
    dt = cfg.dt if cfg.dt is not None else 1e-3 / scale
    if dt * scale >= 0.1:
        raise StepSizeError(f"dt * max_rate = {dt * scale:.3g} violates the 0.1 bound")
    nsteps = max(1, int(np.ceil(cfg.t_end / dt - 1e-9)))
    dt = cfg.t_end / nsteps

    L0, Lp, Lm = liouvillian(env, drive)
    D = drive.Delta_l
    if D == 0:
        Lc = L0 + Lp + Lm
        rhs = lambda t, v: Lc @ v
    else:
        rhs = lambda t, v: (L0 + np.exp(-1j * D * t) * Lp + np.exp(1j * D * t) * Lm) @ v

    stats = {
        "max_trace_drift": 0.0,
        "max_hermiticity_drift": 0.0,
        "min_eigenvalue": np.inf,
        "max_correction": 0.0,
        "dt": dt,
        "n_steps": nsteps,
        "method": cfg.method,
    }
    stride = cfg.record_stride
    rec_steps = list(range(0, nsteps + 1, stride))
    if rec_steps[-1] != nsteps:
        rec_steps.append(nsteps)
    times = np.array(rec_steps) * dt
    out = np.empty((len(rec_steps), 4, 4), dtype=complex)

    try:
        _integrate(cfg, rhs, rho0, dt, nsteps, rec_steps, times, out, stats, renorm_tol)
    except ArithmeticError as exc:
        k = stats.get("n_recorded", 0)
        exc.partial = Trajectory(times[:k], out[:k], stats)
        raise
    if stats["max_correction"] > 0:
        log.debug("renormalization corrections up to %.3e", stats["max_correction"])
    return Trajectory(times, out, stats)


def _integrate(cfg, rhs, rho0, dt, nsteps, rec_steps, times, out, stats, renorm_tol):
    if cfg.method == "fixed_rk4":
        v = rho0.reshape(-1).copy()
        out[0] = _record(rho0, stats, renorm_tol)
        k = 1
        for step in range(1, nsteps + 1):
            t = (step - 1) * dt
            k1 = rhs(t, v)
            k2 = rhs(t + dt / 2, v + dt / 2 * k1)
            k3 = rhs(t + dt / 2, v + dt / 2 * k2)
            k4 = rhs(t + dt, v + dt * k3)
            v = v + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if k < len(rec_steps) and step == rec_steps[k]:
                fixed = _record(v.reshape(4, 4), stats, renorm_tol)
                out[k] = fixed
                v = fixed.reshape(-1).copy()
                k += 1
    else:
        sol = solve_ivp(rhs, (0.0, cfg.t_end), rho0.reshape(-1), method="RK45",
                        t_eval=times, rtol=1e-10, atol=1e-12, max_step=100 * dt)
        if not sol.success:
            raise ArithmeticError(f"adaptive integration failed: {sol.message}")
        for k in range(len(times)):
            out[k] = _record(sol.y[:, k].reshape(4, 4), stats, renorm_tol)
        k = len(times)
    return k


def steady_state(env: Environment, drive: Optional[DriveParams] = None) -> np.ndarray:
    """Unique fixed point of the time-independent generator (resonant drive only)."""
    drive = drive or DriveParams()
    if drive.Delta_l != 0:
        raise ValueError("steady_state requires Delta_l = 0; integrate in time instead")
    L0, Lp, Lm = liouvillian(env, drive)
    L = L0 + Lp + Lm
    sv = np.linalg.svd(L, compute_uv=False)
    kernel = int(np.sum(sv <= 1e-9 * sv[0]))
    if kernel > 1:
        raise NonUniqueSteadyStateError(f"generator kernel has dimension {kernel}")
    tr_row = np.eye(4, dtype=complex).reshape(1, -1)
    A = np.vstack([L, tr_row])
    b = np.zeros(17, dtype=complex)
    b[-1] = 1.0
    v, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = np.linalg.norm(L @ v)
    if resid > 1e-10 * np.linalg.norm(L):
        raise ArithmeticError(f"steady-state residual {resid:.3e} too large")
    rho = v.reshape(4, 4)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def analytic_unidirectional(t, gamma11, gamma21, g21) -> np.ndarray:
    """Closed-form state from ``|4><4|`` with one-way coupling and no drive."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    gam = gamma21 / 2 + 1j * g21
    decay = np.exp(-gamma11 * t)
    rho = np.zeros(t.shape + (4, 4), dtype=complex)
    rho[..., 3, 3] = decay
    rho[..., 3, 2] = -gam * t * decay
    rho[..., 2, 3] = -np.conj(gam) * t * decay
    rho[..., 2, 2] = abs(gam) ** 2 * t**2 * decay
    rho[..., 0, 0] = 1 - decay - abs(gam) ** 2 * t**2 * decay
    return rho
