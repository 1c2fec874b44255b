"""Run configuration: one JSON document, optionally overridden from the command line."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .bounds import CGLParams
from .geometry import Domain
from .simulator import SimConfig
from .spectrum import MethodConstants

COMMANDS = ("spectrum", "bounds", "simulate", "report")

#: Keys a sweep point may override, and where they live in the document.
SWEEP_KEYS = {
    "lambda": ("params", "lambda"),
    "alpha": ("params", "alpha"),
    "kappa": ("params", "kappa"),
    "beta": ("params", "beta"),
    "gamma": ("params", "gamma"),
    "c": ("consts", "c"),
    "C_star": ("consts", "C_star"),
    "delta": (None, "delta"),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    domain: Domain
    params: CGLParams | None
    consts: MethodConstants
    raw: dict[str, Any]
    sim: SimConfig | None = None
    sweep: list[dict[str, float]] | None = None
    output_dir: Path = Path("out")
    m_max: int = 1000
    delta: float | None = None
    report_m: list[int] | None = None
    Lambda1: float | None = None

    def resolved(self) -> dict[str, Any]:
        """The fully resolved document echoed into every JSON output."""
        doc = {
            "command": self.command,
            "domain": self.domain.to_dict(),
            "params": self.params.to_dict() if self.params else None,
            "consts": {"c": self.consts.c, "C_star": self.consts.C_star},
            "derived_constants": self.consts.to_dict(),
            "m_max": self.m_max,
            "delta": self.delta,
            "Lambda1": self.Lambda1,
            "sim": self.sim.to_dict() if self.sim else None,
            "report_m": self.report_m,
            "sweep": self.sweep,
            "output_dir": str(self.output_dir),
        }
        return doc


def load_document(path: str | Path) -> dict[str, Any]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def apply_overrides(doc: Mapping[str, Any], **overrides: Any) -> dict[str, Any]:
    """Return a copy of ``doc`` with scalar command-line overrides applied."""
    doc = copy.deepcopy(dict(doc))
    if overrides.get("gamma") is not None:
        doc.setdefault("params", {})["gamma"] = overrides["gamma"]
    if overrides.get("c") is not None:
        doc.setdefault("consts", {})["c"] = overrides["c"]
    if overrides.get("m_max") is not None:
        doc["m_max"] = overrides["m_max"]
    if overrides.get("dt") is not None:
        doc.setdefault("sim", {})["dt"] = overrides["dt"]
    if overrides.get("t_end") is not None:
        doc.setdefault("sim", {})["t_end"] = overrides["t_end"]
    if overrides.get("seed") is not None:
        sim = doc.setdefault("sim", {})
        ic = sim.setdefault("initial_condition", {"kind": "random_smooth"})
        ic["seed"] = overrides["seed"]
    if overrides.get("out") is not None:
        doc["output_dir"] = overrides["out"]
    return doc


def apply_sweep_point(doc: Mapping[str, Any], point: Mapping[str, float]) -> dict[str, Any]:
    doc = copy.deepcopy(dict(doc))
    for key, value in point.items():
        if key not in SWEEP_KEYS:
            raise ConfigError(f"sweep key {key!r} not one of {sorted(SWEEP_KEYS)}")
        section, name = SWEEP_KEYS[key]
        target = doc if section is None else doc.setdefault(section, {})
        target[name] = value
    return doc


def parse(doc: Mapping[str, Any], command: str) -> RunConfig:
    """Validate a config document for ``command``; every failure is a :class:`ConfigError`."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    try:
        return _parse(doc, command)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        msg = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
        raise ConfigError(msg) from exc


def _parse(doc: Mapping[str, Any], command: str) -> RunConfig:
    if "domain" not in doc:
        raise ConfigError("config needs a 'domain' section")
    domain = Domain.from_dict(doc["domain"])
    consts_doc = doc.get("consts") or {}
    if "c" not in consts_doc:
        raise ConfigError("consts.c (Melas numerator) is required")
    needs_cstar = command in ("bounds", "report", "simulate")
    if needs_cstar and "C_star" not in consts_doc:
        raise ConfigError("consts.C_star (Lieb-Thirring constant) is required")
    consts = MethodConstants.for_dimension(domain.n, float(consts_doc["c"]),
                                           float(consts_doc.get("C_star", 1.0)))

    params = None
    if command != "spectrum":
        if "params" not in doc:
            raise ConfigError("config needs a 'params' section")
        params = CGLParams.from_dict(doc["params"])

    sim = None
    if command in ("simulate", "report"):
        if not doc.get("sim"):
            raise ConfigError(f"command {command!r} needs a 'sim' section")
        sim = SimConfig.from_dict(doc["sim"], domain=domain)

    m_max = doc.get("m_max", 1000)
    if int(m_max) != m_max or m_max < 1:
        raise ConfigError("m_max must be a positive integer")

    delta = doc.get("delta")
    if delta is not None and not float(delta) >= 0:
        raise ConfigError("delta must be nonnegative")

    Lambda1 = doc.get("Lambda1")
    if Lambda1 is not None and not float(Lambda1) > 0:
        raise ConfigError("Lambda1 must be positive")
    if Lambda1 is None and not domain.is_box and command in ("bounds", "report"):
        raise ConfigError("non-box domains need the first Dirichlet eigenvalue as 'Lambda1'")

    report_m = doc.get("report_m")
    if report_m is not None:
        report_m = [int(m) for m in report_m]
        top = sim.tangent_count if sim else 0
        if any(not 1 <= m <= top for m in report_m):
            raise ConfigError(f"report_m entries must lie in [1, tangent_count={top}]")

    sweep = doc.get("sweep")
    if sweep is not None:
        if not isinstance(sweep, list) or not all(isinstance(p, dict) for p in sweep):
            raise ConfigError("sweep must be a list of objects")
        for point in sweep:
            # validates keys and values for every point before anything runs
            _parse_point(doc, point, command)

    return RunConfig(command=command, domain=domain, params=params, consts=consts,
                     raw=dict(doc), sim=sim, sweep=sweep,
                     output_dir=Path(doc.get("output_dir", "out")), m_max=int(m_max),
                     delta=None if delta is None else float(delta), report_m=report_m,
                     Lambda1=None if Lambda1 is None else float(Lambda1))


def _parse_point(doc, point, command):
    sub = apply_sweep_point(doc, point)
    sub.pop("sweep", None)
    return _parse(sub, command)
