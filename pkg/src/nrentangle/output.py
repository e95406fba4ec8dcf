"""CSV/JSON writers. Every CSV starts with a ``# metadata`` comment line."""
from __future__ import annotations

import csv
import json
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows, meta: dict) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write("# metadata " + json.dumps(meta, sort_keys=True, default=_jsonable) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    return path


def read_csv(path):
    """Return (metadata dict, header, rows as lists of str)."""
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("# metadata "):
            raise ValueError(f"{path} has no metadata line")
        meta = json.loads(first[len("# metadata "):])
        rd = csv.reader(fh)
        header = next(rd)
        return meta, header, list(rd)


def _jsonable(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.ndarray):
        return _jsonable_tree(o.tolist())
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.complexfloating):
        return [float(o.real), float(o.imag)]
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _jsonable_tree(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, list):
        return [_jsonable_tree(v) for v in o]
    return o


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True, default=_jsonable) + "\n")
    return path


def trajectory_rows(t, rho):
    """Rows of t_s, Re/Im of the 16 entries (row-major), then rho11..rho44."""
    flat = rho.reshape(len(t), 16)
    pops = np.real(np.diagonal(rho, axis1=1, axis2=2))
    for k in range(len(t)):
        row = [t[k]]
        for z in flat[k]:
            row += [z.real, z.imag]
        row += list(pops[k])
        yield row


def trajectory_header():
    h = ["t_s"]
    for a in range(1, 5):
        for b in range(1, 5):
            h += [f"re_rho{a}{b}", f"im_rho{a}{b}"]
    return h + [f"rho{k}{k}" for k in range(1, 5)]


@dataclass
class RunRecord:
    command: str
    scenario_name: str
    scenario_hash: str
    started: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    finished: str = ""
    outputs: list = field(default_factory=list)
    renormalization: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    status: str = "ok"

    def add(self, path) -> None:
        self.outputs.append(Path(path).name)

    def write(self, out_dir) -> Path:
        self.finished = datetime.now(timezone.utc).isoformat()
        rec = {
            "command": self.command,
            "scenario": self.scenario_name,
            "scenario_hash": self.scenario_hash,
            "software_version": __version__,
            "python": platform.python_version(),
            "started": self.started,
            "finished": self.finished,
            "outputs": sorted(self.outputs),
            "renormalization": self.renormalization,
            "status": self.status,
            **self.extra,
        }
        return write_json(Path(out_dir) / "run.json", rec)
