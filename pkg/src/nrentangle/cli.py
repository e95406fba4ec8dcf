"""Command-line front end.

    python -m nrentangle <rates|evolve|sweep|field|dispersion|validate> --scenario FILE --out DIR

Exit status: 0 success, 2 invalid scenario, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coupling import rwa_check
from .entanglement import ConcurrenceTrace
from .experiments import rates_report, run_dispersion, run_evolution, run_field, run_sweep
from .output import RunRecord, trajectory_header, trajectory_rows, write_csv, write_json
from .scenario import Scenario, ScenarioError, as_rates, builtin

log = logging.getLogger("nrentangle")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


def _meta(sc: Scenario, command: str, **kw) -> dict:
    return {"scenario": sc.name, "scenario_hash": sc.hash, "command": command, **kw}


def _rate_rows(r, ref):
    for i in range(r.n):
        for j in range(r.n):
            yield [i + 1, j + 1, r.Gamma[i, j], r.g[i, j], r.Gamma[i, j] / ref, r.g[i, j] / ref]


def cmd_rates(sc: Scenario, out: Path) -> RunRecord:
    rec = RunRecord("rates", sc.name, sc.hash)
    rep = rates_report(sc)
    r = rep["rates"]
    ref = r.Gamma[0, 0]
    meta = _meta(sc, "rates", source=sc.rates_source)
    rec.add(write_csv(out / "rates.csv", ["i", "j", "Gamma_rad_s", "g_rad_s", "Gamma_norm", "g_norm"],
                      _rate_rows(r, ref), meta))
    body = {
        "Gamma": r.Gamma, "g": r.g,
        "Gamma_norm": rep["normalized"].Gamma, "g_norm": rep["normalized"].g,
        "rwa": rep["rwa"], "meta": r.meta, "scenario_hash": sc.hash,
    }
    if "profile" in rep:
        p = rep["profile"]
        rows = zip(p["x"], p["gamma_ratio"], p["g_ratio"])
        rec.add(write_csv(out / "rate_profile.csv", ["x_m", "gamma_ratio", "g_ratio"], rows,
                          _meta(sc, "rates", x_self_m=p["x_self"], self_field=p["self_field"])))
        body["x_self_m"] = p["x_self"]
    rec.add(write_json(out / "rates.json", body))
    return rec


def cmd_evolve(sc: Scenario, out: Path) -> RunRecord:
    rec = RunRecord("evolve", sc.name, sc.hash)
    try:
        res = run_evolution(sc)
    except ArithmeticError as exc:
        part = getattr(exc, "partial", None)
        if part is not None and len(part.t):
            meta = _meta(sc, "evolve", partial=True, error=str(exc))
            rec.add(write_csv(out / "trajectory.csv", trajectory_header(),
                              trajectory_rows(part.t, part.rho), meta))
            rec.renormalization = part.stats
        rec.status = f"failed: {exc}"
        rec.write(out)
        raise
    traj, conc = res["traj"], res["conc"]
    cfg = res["cfg"]
    meta = _meta(sc, "evolve", method=cfg.method, dt=traj.stats["dt"], record_stride=cfg.record_stride)
    rec.add(write_csv(out / "trajectory.csv", trajectory_header(), trajectory_rows(traj.t, traj.rho), meta))
    rec.add(write_json(out / "trajectory.json", {
        "scenario_hash": sc.hash,
        "integrator": {"method": cfg.method, "dt": traj.stats["dt"], "n_steps": traj.stats["n_steps"],
                       "record_stride": cfg.record_stride, "t_end": cfg.t_end},
        "renormalization": traj.stats,
    }))
    rec.add(write_csv(out / "concurrence.csv", ["t_s", "C", "source"],
                      ((t, c, conc.source) for t, c in zip(conc.t, conc.C)), meta))
    rec.renormalization = traj.stats
    if "analytic" in res:
        a = res["analytic"]
        ac: ConcurrenceTrace = a["conc"]
        rec.add(write_csv(out / "analytic.csv", ["t_s", "C", "rho44", "rho33", "source"],
                          ((t, c, r[3, 3].real, r[2, 2].real, ac.source)
                           for t, c, r in zip(ac.t, ac.C, a["rho"])), meta))
        rec.extra["analytic_max_rho_deviation"] = a["max_rho_deviation"]
        rec.extra["analytic_max_C_deviation"] = a["max_C_deviation"]
    tpk, cpk = conc.peak
    rec.extra["C_peak"] = cpk
    rec.extra["t_peak_s"] = tpk
    return rec


def cmd_sweep(sc: Scenario, out: Path, workers: int = 1, by_integration: bool = False) -> RunRecord:
    rec = RunRecord("sweep", sc.name, sc.hash)
    res = run_sweep(sc, workers, by_integration)
    axes = res["axes"]
    keys = []
    for p in res["points"]:
        for k in p:
            if k not in ("index", "values") and k not in keys:
                keys.append(k)
    header = [f"index{a}" for a in range(len(axes))] + ["+".join(a["paths"]) for a in axes] + keys
    rows = ([*p["index"], *p["values"], *[p.get(k, "") for k in keys]] for p in res["points"])
    rec.add(write_csv(out / "sweep.csv", header, rows, _meta(sc, "sweep", measures=list(res["measures"]))))
    return rec


def cmd_field(sc: Scenario, out: Path) -> RunRecord:
    rec = RunRecord("field", sc.name, sc.hash)
    f = run_field(sc)
    header = ["x_m", "re_total", "im_total", "re_residue", "im_residue", "re_incident", "im_incident", "flag"]
    rows = (
        [x, a.real, a.imag, b.real, b.imag, c.real, c.imag, fl]
        for x, a, b, c, fl in zip(f["x"], f["Hz_total"], f["Hz_residue"], f["Hz_incident"], f["flags"])
    )
    meta = _meta(sc, "field", y_m=f["y"], quad_error=f["meta"].get("quad_error"))
    rec.add(write_csv(out / "field.csv", header, rows, meta))
    rec.add(write_json(out / "poles.json", {
        "scenario_hash": sc.hash,
        "poles": [{"kx": p.kx, "residue": p.residue, "direction": p.direction} for p in f["poles"]],
    }))
    return rec


def cmd_dispersion(sc: Scenario, out: Path) -> RunRecord:
    rec = RunRecord("dispersion", sc.name, sc.hash)
    rows = []
    for r in run_dispersion(sc):
        w = r["omega"]
        f = w / (2 * np.pi)
        for kind in ("k_TE", "k_TM"):
            k = complex(r[kind])
            rows.append([w, f, kind, k.real, k.imag, "", r["flag"]])
        for p in r["poles"]:
            rows.append([w, f, "spp", p.kx.real, p.kx.imag, p.direction, ""])
    header = ["omega_rad_s", "f_hz", "kind", "k_re", "k_im", "direction", "flag"]
    rec.add(write_csv(out / "dispersion.csv", header, rows, _meta(sc, "dispersion")))
    return rec


def cmd_validate(sc: Scenario, out: Path) -> RunRecord:
    rec = RunRecord("validate", sc.name, sc.hash)
    rep = sc.validate()
    if not rep["errors"] and sc.rates_source != "greens2d":
        rep["rwa"] = rwa_check(as_rates(sc.environment()), sc.omega0)
    elif not rep["errors"]:
        g11 = sc.gamma11
        rep["rwa"] = {"max_gamma_over_omega0": g11 / sc.omega0, "threshold": 1e-3,
                      "pass": g11 / sc.omega0 < 1e-3}
    rec.add(write_json(out / "validate.json", rep))
    rec.extra["validation"] = rep
    if rep["errors"]:
        rec.status = "invalid"
    return rec


COMMANDS = {
    "rates": cmd_rates,
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
    "field": cmd_field,
    "dispersion": cmd_dispersion,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nrentangle", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--scenario", required=True,
                    help="scenario YAML file, or the name of a bundled scenario")
    ap.add_argument("--out", default=".", help="output directory (created if missing)")
    ap.add_argument("--workers", type=int, default=1, help="parallel sweep workers")
    ap.add_argument("--by-integration", action="store_true",
                    help="cross-check steady states by long-time integration")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _resolve(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    return builtin(name)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out)
    try:
        sc = Scenario.load(_resolve(args.scenario))
        if args.command != "validate":
            errs = sc.validate()["errors"]
            if errs:
                raise ScenarioError("; ".join(errs))
        if args.workers < 1:
            raise ScenarioError("--workers must be >= 1")
        out.mkdir(parents=True, exist_ok=True)
        fn = COMMANDS[args.command]
        if args.command == "sweep":
            rec = fn(sc, out, args.workers, args.by_integration)
        else:
            rec = fn(sc, out)
        rec.write(out)
    except (ScenarioError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if rec.status != "ok":
        print(json.dumps(rec.extra.get("validation", {}), indent=1), file=sys.stderr)
        return EXIT_INVALID
    print(f"{args.command}: wrote {', '.join(sorted(rec.outputs))} to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
