"""Scenario-level computations shared by the CLI, tests and demos.

Everything here returns plain data; file output lives in :mod:`nrentangle.cli`.
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from .coupling import CouplingRates, rwa_check
from .dynamics import DriveParams, EvolutionConfig, analytic_unidirectional, evolve, steady_state
from .entanglement import ConcurrenceTrace, concurrence_unidir, wootters, wootters_trace
from .greens2d import field_profile, find_spp_poles, normalized_rates_profile
from .materials import bulk_wavenumbers, eps_effective, permittivity
from .scenario import Scenario, ScenarioError, as_rates, frequency, length, values_list

log = logging.getLogger(__name__)


# ---------------------------------------------------------------- rates


def rates_report(sc: Scenario, profile_grid: Optional[np.ndarray] = None) -> dict:
    """Absolute and normalized rates, RWA diagnostics and (for greens2d) the x-profile."""
    out = {}
    if sc.rates_source == "greens2d":
        x = profile_grid
        if x is None:
            prof = sc.section("rates").get("profile") or {}
            spec = prof.get("x", {"linspace": ["-3 lambda0", "3 lambda0", 120]})
            x = np.array([length(v, sc.lambda0) for v in values_list(spec)])
        s = sc.separation
        xg = np.concatenate([x, [-s, s]])
        prof = normalized_rates_profile(sc.geometry(), xg, sc.omega, x_self=sc.x_self)
        out["profile"] = {k: (v[:-2] if isinstance(v, np.ndarray) else v) for k, v in prof.items()}
        pair = {"gamma_ratio": prof["gamma_ratio"][-2:], "g_ratio": prof["g_ratio"][-2:],
                "x_self": prof["x_self"]}
        env = sc.environment(pair)
    else:
        env = sc.environment()
    rates = as_rates(env)
    out["env"] = env
    out["rates"] = rates
    out["normalized"] = rates.normalized()
    out["rwa"] = rwa_check(rates, sc.omega0)
    return out


# ---------------------------------------------------------------- evolution


def unidirectional_applicable(rates: CouplingRates, rho0, drive: DriveParams) -> bool:
    """Whether the closed-form transient from |4> applies."""
    e4 = np.zeros((4, 4))
    e4[3, 3] = 1
    return (
        rates.n == 2
        and rates.Gamma[0, 1] == 0
        and rates.g[0, 1] == 0
        and rates.Gamma[0, 0] == rates.Gamma[1, 1]
        and drive.is_zero
        and np.array_equal(rho0, e4)
    )


def run_evolution(sc: Scenario, env=None, drive=None, cfg=None) -> dict:
    env = sc.environment() if env is None else env
    drive = sc.drive() if drive is None else drive
    cfg = sc.evolution() if cfg is None else cfg
    rho0 = sc.initial_state()
    traj = evolve(rho0, env, drive, cfg)
    conc = wootters_trace(traj.t, traj.rho)
    res = {"env": env, "rates": as_rates(env), "drive": drive, "cfg": cfg,
           "rho0": rho0, "traj": traj, "conc": conc}
    r = res["rates"]
    if unidirectional_applicable(r, rho0, drive):
        G11, G21, g21 = r.Gamma[0, 0], r.Gamma[1, 0], r.g[1, 0]
        an = analytic_unidirectional(traj.t, G11, G21, g21)
        Ca = concurrence_unidir(traj.t, G11, G21, g21)
        res["analytic"] = {
            "rho": an,
            "conc": ConcurrenceTrace(traj.t, Ca, "analytic_unidir"),
            "max_rho_deviation": float(np.max(np.abs(traj.rho - an))),
            "max_C_deviation": float(np.max(np.abs(conc.C - Ca))),
        }
    return res


# ---------------------------------------------------------------- sweeps


def _sweep_point(args) -> dict:
    tree, base_dir, assignment, measures, by_integration = args
    sc = Scenario(tree, Path(base_dir)).with_values(assignment)
    env = sc.environment()
    drive = sc.drive()
    row = {}
    if "steady" in measures:
        rho = steady_state(env, drive)
        row["C_ss"] = wootters(rho)
        if by_integration:
            G = float(np.max(np.diag(as_rates(env).Gamma)))
            cfg = EvolutionConfig(t_end=50.0 / G, record_stride=10**9)
            tr = evolve(sc.initial_state(), env, drive, cfg)
            row["C_ss_integrated"] = wootters(tr.rho[-1])
            row["ss_max_deviation"] = float(np.max(np.abs(tr.rho[-1] - rho)))
    if "transient" in measures:
        res = run_evolution(sc, env, drive)
        t, C = res["conc"].t, res["conc"].C
        k = int(np.argmax(C))
        row["C_max"] = float(C[k])
        row["t_at_max"] = float(t[k])
        st = res["traj"].stats
        for key in ("max_trace_drift", "max_hermiticity_drift", "min_eigenvalue", "max_correction"):
            row[key] = st[key]
    r = as_rates(env)
    row.update({
        "Gamma21_norm": r.Gamma[1, 0] / r.Gamma[0, 0],
        "g21_norm": r.g[1, 0] / r.Gamma[0, 0],
        "Gamma12_norm": r.Gamma[0, 1] / r.Gamma[0, 0],
        "g12_norm": r.g[0, 1] / r.Gamma[0, 0],
    })
    return row


def sweep_measures(sc: Scenario) -> tuple:
    m = sc.section("sweep").get("measure", "auto")
    if m == "auto":
        d = sc.section("drive")
        pumped = any(d.get(k, 0) not in (0, 0.0, "0") for k in ("Omega1", "Omega2"))
        paths = [p for ps, _ in sc.sweep_axes() for p in ps]
        pumped = pumped or any(p.startswith("drive.Omega") for p in paths)
        return ("steady",) if pumped else ("transient",)
    ms = (m,) if isinstance(m, str) else tuple(m)
    bad = [x for x in ms if x not in ("steady", "transient")]
    if bad:
        raise ScenarioError(f"unknown sweep measure(s) {bad}")
    return ms


def run_sweep(sc: Scenario, workers: int = 1, by_integration: bool = False) -> dict:
    """Evaluate every grid point; rows come back in grid order."""
    axes = sc.sweep_axes()
    measures = sweep_measures(sc)
    points = []
    for combo in itertools.product(*[range(len(v)) for _, v in axes]):
        assign, label = {}, []
        for (paths, vals), i in zip(axes, combo):
            for p in paths:
                assign[p] = vals[i]
            label.append(vals[i])
        points.append((combo, label, assign))
    jobs = [(sc.tree, str(sc.base_dir), a, measures, by_integration) for _, _, a in points]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    return {
        "axes": [{"paths": p, "values": v} for p, v in axes],
        "measures": measures,
        "points": [{"index": list(c), "values": lab, **row} for (c, lab, _), row in zip(points, rows)],
    }


# ---------------------------------------------------------------- fields


def field_grid(sc: Scenario) -> tuple:
    f = sc.section("field")
    spec = f.get("x", {"linspace": ["-2 lambda0", "2 lambda0", 400]})
    x = np.array([length(v, sc.lambda0) for v in values_list(spec)])
    y = length(f.get("y", sc.section("geometry").get("height", "0.1 lambda0")), sc.lambda0)
    return x, y


def run_field(sc: Scenario, x=None, y=None) -> dict:
    if sc.interface != "infinite_2d":
        raise ScenarioError("field profiles need geometry.interface = infinite_2d")
    geom = sc.geometry()
    gx, gy = field_grid(sc)
    x = gx if x is None else np.asarray(x, dtype=float)
    y = gy if y is None else y
    ok = ~((x == 0) & (y == geom.d))
    flags = np.where(ok, "", "source_point")
    Ht = np.full(x.shape, np.nan + 0j)
    Hr = np.full(x.shape, np.nan + 0j)
    Hi = np.full(x.shape, np.nan + 0j)
    prof = field_profile(geom, x[ok], y, sc.omega)
    Ht[ok], Hr[ok], Hi[ok] = prof.Hz_total, prof.Hz_residue, prof.Hz_incident
    poles = find_spp_poles(geom, sc.omega)
    return {"x": x, "y": y, "Hz_total": Ht, "Hz_residue": Hr, "Hz_incident": Hi,
            "flags": flags, "poles": poles, "meta": prof.meta}


def run_dispersion(sc: Scenario) -> list:
    """Bulk wavenumbers and SPP poles over a frequency grid (plasma parameters held absolute)."""
    d = sc.section("dispersion")
    spec = d.get("f", {"linspace": ["120 THz", "280 THz", 33]})
    omegas = [frequency(v) for v in values_list(spec)]
    geom = sc.geometry()
    rows = []
    for w in omegas:
        rec = {"omega": w, "flag": "", "poles": [], "k_TE": np.nan, "k_TM": np.nan, "eps_eff": np.nan}
        try:
            t = permittivity(geom.plasma, w)
            kb = bulk_wavenumbers(t, w)
            rec.update(k_TE=kb["k_TE"], k_TM=kb["k_TM"], eps_eff=eps_effective(t))
            rec["poles"] = find_spp_poles(geom, w)
            if not rec["poles"]:
                rec["flag"] = "no_pole"
        except (ArithmeticError, ValueError) as exc:
            rec["flag"] = f"error: {exc}"
        rows.append(rec)
    return rows
