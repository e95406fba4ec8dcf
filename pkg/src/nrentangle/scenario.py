"""Scenario files: YAML trees with unit-suffixed numbers.

Quantities are written either as bare numbers or as ``"<value> <unit>"``
strings. What a bare number means depends on the field:

* plasma frequencies (``omega_p``, ``omega_c``, ``nu``): ratio to ``materials.omega``
* ``rates.gamma11``: rad/s
* other rates and Rabi frequencies: ratio to ``gamma11``
* times: multiples of ``1/gamma11``
* lengths: metres
* wavenumbers: multiples of ``k0 = omega0 / c``

Frequency units (``Hz`` ... ``THz``) denote cycles per second and are
converted to rad/s; ``rad/s`` is accepted verbatim.
"""
from __future__ import annotations

import copy
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml
from scipy.constants import c as C0

from .coupling import (
    DEBYE,
    ChiralParams,
    CouplingRates,
    Qubit,
    chiral_to_rates,
    load_green_samples,
    plasmonic_1d_rates,
    rates_from_green,
    rates_from_profile,
)
from .dynamics import DriveParams, EvolutionConfig, basis_state, bell_state, validate_density_matrix
from .greens2d import SELF_OFFSET_WAVELENGTHS, InterfaceGeometry, normalized_rates_profile
from .materials import OpaqueMedium, PlasmaParams

RATE_SOURCES = ("greens2d", "plasmonic_1d", "chiral", "direct", "file")
DEFAULT_GAMMA11 = 2 * np.pi * 900e6

_FREQ = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9, "thz": 1e12}
_LEN = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9}
_TIME = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15}
_NUM = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s]*)\s*$")


class ScenarioError(ValueError):
    pass


def _split(v):
    if isinstance(v, bool):
        raise ScenarioError(f"expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return float(v), ""
    if isinstance(v, str):
        m = _NUM.match(v)
        if m:
            return float(m.group(1)), m.group(2)
    raise ScenarioError(f"cannot parse quantity {v!r}")


def frequency(v, ref: Optional[float] = None) -> float:
    """rad/s from a frequency quantity; bare numbers scale ``ref``."""
    x, unit = _split(v)
    u = unit.lower()
    if u == "":
        if ref is None:
            raise ScenarioError(f"bare number {v!r} needs a unit here")
        return x * ref
    if u in ("rad/s", "rad_per_s"):
        return x
    if u in _FREQ:
        return 2 * np.pi * x * _FREQ[u]
    raise ScenarioError(f"unknown frequency unit {unit!r}")


def length(v, lambda0: Optional[float] = None) -> float:
    x, unit = _split(v)
    u = unit.lower()
    if u == "":
        return x
    if u in _LEN:
        return x * _LEN[u]
    if u in ("lambda0", "lambda"):
        if lambda0 is None:
            raise ScenarioError("lambda0 units need an operating frequency")
        return x * lambda0
    raise ScenarioError(f"unknown length unit {unit!r}")


def duration(v, gamma_ref: float) -> float:
    x, unit = _split(v)
    u = unit.lower()
    if u == "":
        return x / gamma_ref
    if u in _TIME:
        return x * _TIME[u]
    raise ScenarioError(f"unknown time unit {unit!r}")


def dipole(v) -> float:
    x, unit = _split(v)
    u = unit.lower()
    if u in ("d", "debye"):
        return x * DEBYE
    if u in ("c*m", "cm_si"):
        return x
    raise ScenarioError(f"dipole moments need a unit (D), got {v!r}")


def cplx(v, scale=lambda q: q) -> complex:
    """Complex quantity written as ``[re, im]`` or a single real value."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ScenarioError(f"complex values are [re, im] pairs, got {v!r}")
        return complex(scale(v[0]), scale(v[1]))
    return complex(scale(v), 0.0)


def values_list(spec) -> list:
    """Sweep values: an explicit list or ``{linspace|logspace: [a, b, n]}``."""
    if isinstance(spec, list):
        return list(spec)
    if isinstance(spec, dict) and len(spec) == 1:
        (kind, args), = spec.items()
        if kind in ("linspace", "logspace") and len(args) == 3:
            a, b, n = args
            xa, ua = _split(a)
            xb, ub = _split(b)
            if ua != ub:
                raise ScenarioError("range endpoints must share a unit")
            grid = np.linspace(xa, xb, int(n)) if kind == "linspace" else np.logspace(xa, xb, int(n))
            return [float(g) if not ua else f"{float(g)!r} {ua}" for g in grid]
    raise ScenarioError(f"cannot interpret value list {spec!r}")


def canonical_hash(tree: dict) -> str:
    blob = json.dumps(tree, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def set_path(tree: dict, path: str, value) -> None:
    keys = path.split(".")
    node = tree
    for k in keys[:-1]:
        if not isinstance(node, dict) or k not in node:
            raise ScenarioError(f"sweep path {path!r} does not resolve")
        node = node[k]
    if not isinstance(node, dict) or keys[-1] not in node:
        raise ScenarioError(f"sweep path {path!r} does not resolve")
    node[keys[-1]] = value


@dataclass
class Scenario:
    """Parsed scenario. ``tree`` keeps the raw YAML for hashing and sweeps."""

    tree: dict
    base_dir: Path = field(default_factory=Path.cwd)

    # ---- construction
    @classmethod
    def load(cls, path) -> "Scenario":
        path = Path(path)
        try:
            tree = yaml.safe_load(path.read_text())
        except yaml.YAMLError as exc:
            raise ScenarioError(f"{path}: {exc}") from exc
        if not isinstance(tree, dict):
            raise ScenarioError(f"{path}: top level must be a mapping")
        return cls(tree, path.parent)

    def with_values(self, assignments: dict) -> "Scenario":
        tree = copy.deepcopy(self.tree)
        for p, v in assignments.items():
            set_path(tree, p, v)
        return Scenario(tree, self.base_dir)

    @property
    def name(self) -> str:
        return str(self.tree.get("name", "scenario"))

    @property
    def hash(self) -> str:
        return canonical_hash(self.tree)

    def section(self, key) -> dict:
        s = self.tree.get(key) or {}
        if not isinstance(s, dict):
            raise ScenarioError(f"section {key!r} must be a mapping")
        return s

    # ---- materials and geometry
    @property
    def omega(self) -> float:
        m = self.section("materials")
        q = self.section("qubits")
        src = m.get("omega", q.get("omega0", "200 THz"))
        return frequency(src)

    @property
    def omega0(self) -> float:
        q = self.section("qubits")
        return frequency(q["omega0"]) if "omega0" in q else self.omega

    @property
    def lambda0(self) -> float:
        return 2 * np.pi * C0 / self.omega

    def plasma(self) -> PlasmaParams:
        p = self.section("materials").get("plasma") or {}
        w = self.omega
        return PlasmaParams(
            frequency(p.get("omega_p", 0.95), w),
            frequency(p.get("omega_c", 0.0), w),
            frequency(p.get("nu", 0.0), w),
        )

    def opaque(self) -> OpaqueMedium:
        o = self.section("materials").get("opaque") or {}
        wp = o.get("omega_p")
        return OpaqueMedium(
            cplx(o.get("eps_m", -2.0), float),
            None if wp is None else frequency(wp, self.omega),
        )

    def geometry(self) -> InterfaceGeometry:
        g = self.section("geometry")
        return InterfaceGeometry(self.plasma(), self.opaque(), length(g.get("height", "0.1 lambda0"), self.lambda0))

    @property
    def interface(self) -> str:
        kind = self.section("geometry").get("interface", "infinite_2d")
        if kind not in ("infinite_2d", "external_green"):
            raise ScenarioError(f"unknown interface type {kind!r}")
        return kind

    @property
    def x_self(self) -> float:
        g = self.section("geometry")
        return length(g.get("x_self", f"{SELF_OFFSET_WAVELENGTHS} lambda0"), self.lambda0)

    @property
    def separation(self) -> float:
        return length(self.section("qubits").get("separation", "2.4 um"), self.lambda0)

    # ---- rates
    @property
    def rates_source(self) -> str:
        r = self.section("rates")
        src = r.get("source")
        if src not in RATE_SOURCES:
            raise ScenarioError(f"rates.source must be one of {RATE_SOURCES}, got {src!r}")
        return src

    @property
    def gamma11(self) -> float:
        r = self.section("rates")
        default = DEFAULT_GAMMA11 if self.rates_source in ("greens2d",) else 1.0
        return frequency(r.get("gamma11", default), 1.0)

    @property
    def gamma_ref(self) -> float:
        """Rate unit for bare drive strengths and times: Gamma11 of the environment."""
        if self.rates_source == "file":
            return float(as_rates(self.environment()).Gamma[0, 0])
        return self.gamma11

    def _k0(self) -> float:
        return self.omega0 / C0

    def chiral(self) -> ChiralParams:
        r = self.section("rates")
        G = self.gamma11
        k0 = self._k0()
        x1 = length(r.get("x1", 0.0), self.lambda0)
        x2 = length(r.get("x2", self.separation + x1), self.lambda0)
        loc = [r.get(k) for k in ("gamma_1", "gamma_2")]
        return ChiralParams(
            frequency(r.get("gamma_R", 0.0), G),
            frequency(r.get("gamma_L", 0.0), G),
            float(_split(r.get("k_R", 0.0))[0]) * k0,
            float(_split(r.get("k_L", 0.0))[0]) * k0,
            x1,
            x2,
            *(None if v is None else frequency(v, G) for v in loc),
        )

    def environment(self, profile: Optional[dict] = None):
        """Dissipative environment: ``CouplingRates`` or ``ChiralParams``."""
        src = self.rates_source
        r = self.section("rates")
        if src == "chiral":
            return self.chiral()
        if src == "direct":
            G = self.gamma11
            out = CouplingRates.two_qubit(
                G,
                frequency(r.get("gamma21", 0.0), G),
                frequency(r.get("g21", 0.0), G),
                frequency(r.get("gamma12", 0.0), G),
                frequency(r.get("g12", 0.0), G),
                frequency(r["gamma22"], G) if "gamma22" in r else None,
            )
            out.meta["source"] = "direct"
            return out
        if src == "plasmonic_1d":
            G = self.gamma11
            k0 = self._k0()
            ks = r.get("k_spp", [1.0, 0.0])
            if isinstance(ks, dict):
                k = (cplx(ks["k12"]) * k0, cplx(ks["k21"]) * k0)
            else:
                k = cplx(ks) * k0
            x1 = length(r.get("x1", 0.0), self.lambda0)
            x2 = length(r.get("x2", self.separation + x1), self.lambda0)
            out = plasmonic_1d_rates(float(r.get("beta12", 0.0)), float(r.get("beta21", 0.0)), G, k, x1, x2)
            out.meta["source"] = "plasmonic_1d"
            return out
        if src == "file":
            samples = load_green_samples(self.base_dir / r["path"])
            out = rates_from_green(self.qubits(), samples)
            out.meta["source"] = "file"
            return out
        # greens2d
        prof = profile if profile is not None else self.rate_samples()
        gr, gg = prof["gamma_ratio"], prof["g_ratio"]
        out = rates_from_profile(self.gamma11, gr[1], gg[1], gr[0], gg[0])
        out.meta.update({"x_self_m": prof["x_self"], "separation_m": self.separation})
        return out

    def rate_samples(self) -> dict:
        """Normalized rates at ``x = -s`` (qubit 2 acting on 1) and ``x = +s``."""
        if self.interface != "infinite_2d":
            raise ScenarioError("greens2d rates need geometry.interface = infinite_2d")
        s = self.separation
        return normalized_rates_profile(self.geometry(), [-s, s], self.omega, x_self=self.x_self)

    def qubits(self) -> list:
        q = self.section("qubits")
        lst = q.get("list")
        if not lst:
            raise ScenarioError("file-sourced rates need qubits.list with positions and dipoles")
        out = []
        for item in lst:
            pos = [length(v, self.lambda0) for v in item["position"]]
            d = dipole(item.get("dipole", q.get("dipole", "60 D")))
            axis = np.asarray(item.get("axis", [0, 1, 0]), dtype=float)
            axis = axis / np.linalg.norm(axis)
            w0 = frequency(item["omega0"]) if "omega0" in item else self.omega0
            out.append(Qubit(tuple(pos), tuple(d * axis), w0))
        return out

    # ---- dynamics
    def drive(self) -> DriveParams:
        d = self.section("drive")
        G = self.gamma_ref
        return DriveParams(
            cplx(d.get("Omega1", 0.0), lambda v: frequency(v, G)),
            cplx(d.get("Omega2", 0.0), lambda v: frequency(v, G)),
            frequency(d.get("Delta_l", 0.0), G),
        )

    def initial_state(self) -> np.ndarray:
        s = self.tree.get("initial_state", "state4")
        if isinstance(s, str):
            if s == "bell":
                return bell_state()
            m = re.fullmatch(r"state([1-4])", s)
            if m:
                return basis_state(int(m.group(1)))
            raise ScenarioError(f"unknown initial state {s!r}")
        if isinstance(s, dict) and "custom" in s:
            rho = np.array([[cplx(v, float) for v in row] for row in s["custom"]])
            if rho.shape != (4, 4):
                raise ScenarioError("custom initial state must be 4x4")
            try:
                return validate_density_matrix(rho)
            except ValueError as exc:
                raise ScenarioError(f"custom initial state: {exc}") from exc
        raise ScenarioError(f"cannot interpret initial_state {s!r}")

    def evolution(self) -> EvolutionConfig:
        e = self.section("evolution")
        G = self.gamma_ref
        dt = e.get("dt")
        return EvolutionConfig(
            t_end=duration(e.get("t_end", 8.0), G),
            dt=None if dt is None else duration(dt, G),
            method=e.get("method", "fixed_rk4"),
            record_stride=int(e.get("record_stride", 10)),
        )

    def sweep_axes(self) -> list:
        sw = self.section("sweep")
        axes = sw.get("axes")
        if not axes:
            raise ScenarioError("scenario has no sweep.axes")
        out = []
        for ax in axes:
            paths = ax.get("paths") or [ax.get("path")]
            if not paths or any(p is None for p in paths):
                raise ScenarioError("each sweep axis needs 'path' or 'paths'")
            vals = values_list(ax["values"])
            for p in paths:
                set_path(copy.deepcopy(self.tree), p, vals[0])
            out.append((list(paths), vals))
        if len(out) > 2:
            raise ScenarioError("sweeps support one or two axes")
        return out

    def validate(self) -> dict:
        """Construct everything cheap; report ``errors`` (fatal) and ``warnings``."""
        problems, warnings = [], []
        checks = [
            ("materials.plasma", self.plasma),
            ("materials.opaque", self.opaque),
            ("geometry", self.geometry),
            ("rates.source", lambda: self.rates_source),
            ("drive", self.drive),
            ("initial_state", self.initial_state),
            ("evolution", self.evolution),
        ]
        src = None
        for label, fn in checks:
            try:
                v = fn()
                if label == "rates.source":
                    src = v
            except (ScenarioError, ValueError, KeyError, TypeError) as exc:
                problems.append(f"{label}: {exc}")
        if src and src != "greens2d":
            try:
                self.environment()
            except (ScenarioError, ValueError, KeyError, TypeError, OSError) as exc:
                problems.append(f"rates: {exc}")
        if src == "direct":
            r = self.section("rates")
            if "gamma22" in r and frequency(r["gamma22"], 1.0) != frequency(r.get("gamma11", 1.0), 1.0):
                warnings.append("rates: unequal Gamma11/Gamma22; analytic comparisons assume equality")
        if "sweep" in self.tree:
            try:
                self.sweep_axes()
            except ScenarioError as exc:
                problems.append(f"sweep: {exc}")
        return {"errors": problems, "warnings": warnings}


def as_rates(env) -> CouplingRates:
    return chiral_to_rates(env) if isinstance(env, ChiralParams) else env


def load(path) -> Scenario:
    return Scenario.load(path)


def builtin_dir() -> Path:
    return Path(__file__).parent / "scenarios"


def builtin(name: str) -> Path:
    p = builtin_dir() / f"{name}.yaml"
    if not p.exists():
        raise ScenarioError(f"no bundled scenario named {name!r}")
    return p
