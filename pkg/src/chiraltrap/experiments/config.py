"""Declarative experiment configs: parsing, validation, sweeps and hashing.

A config is a JSON object. Angles may be written as arithmetic strings over
``pi`` (``"3*pi/4"``). Sweep axes are dotted paths into the config
(``"coupling.D"``, ``"geometry.zones.1.1"``); list indices are 0-based.

Canonical form: JSON with sorted keys, compact separators and floats in
shortest round-trip notation. The hash covers every field except the
presentation-only ones in :data:`NON_PHYSICS_FIELDS`.
"""

from __future__ import annotations

import ast
import copy
import hashlib
import itertools
import json
import math
import operator
from dataclasses import dataclass
from os import PathLike
from typing import Any

import numpy as np

from ..dynamics import InitialState, plane_wave_drive, uniform_drive
from ..geometry import DisorderSpec, LatticeGeometry, build_lattice, positive_spacing, three_zone
from ..hamiltonian import CouplingParams

KINDS = ("dynamics", "steady_state", "minimal_atoms")
NON_PHYSICS_FIELDS = ("name", "description", "output", "save_traces")
DEFAULT_REALIZATIONS = 100

DYNAMICS_OBSERVABLES = (
    "stop_time",
    "transport_mean",
    "transport_late",
    "transport_final",
    "total_final",
    "total",
    "transport",
    "trend",
    "trapped",
    "trap_fraction_min",
    "trap_final",
)
STEADY_OBSERVABLES = ("transport", "total")
SEARCH_OBSERVABLES = ("minimal_atoms",)


class ConfigError(ValueError):
    pass


_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def parse_angle(value) -> float:
    """Evaluate a number or an arithmetic string over ``pi``."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"expected a number or expression, got {value!r}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ConfigError(f"unsupported expression {value!r}")

    try:
        return ev(ast.parse(value, mode="eval"))
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse {value!r}") from exc


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(raw: dict) -> str:
    physics = {k: v for k, v in raw.items() if k not in NON_PHYSICS_FIELDS}
    return hashlib.sha256(canonical_json(physics).encode()).hexdigest()[:12]


_MISSING = object()


def get_path(obj, path: str):
    cur = obj
    for key in path.split("."):
        if isinstance(cur, list):
            try:
                cur = cur[int(key)]
            except (ValueError, IndexError):
                return _MISSING
        elif isinstance(cur, dict):
            if key not in cur:
                return _MISSING
            cur = cur[key]
        else:
            return _MISSING
    return cur


def set_path(obj, path: str, value) -> None:
    keys = path.split(".")
    cur = get_path(obj, ".".join(keys[:-1])) if len(keys) > 1 else obj
    last = keys[-1]
    if isinstance(cur, list):
        cur[int(last)] = value
    elif isinstance(cur, dict):
        cur[last] = value
    else:
        raise ConfigError(f"cannot set {path!r}")


@dataclass(frozen=True)
class SweepPoint:
    index: int
    label: str | None
    params: dict
    config: dict


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    raw: dict

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        cfg = cls(copy.deepcopy(raw))
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | PathLike) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(raw)

    def dump(self, path: str | PathLike) -> None:
        with open(path, "w") as fh:
            json.dump(self.raw, fh, indent=2)
            fh.write("\n")

    @property
    def name(self) -> str:
        return self.raw.get("name", "experiment")

    @property
    def kind(self) -> str:
        return self.raw.get("kind", "dynamics")

    @property
    def seed(self) -> int:
        return int(self.raw.get("seed", 0))

    @property
    def hash(self) -> str:
        return config_hash(self.raw)

    @property
    def observables(self) -> list[str]:
        return list(self.raw.get("observables", []))

    @property
    def save_traces(self) -> bool:
        return bool(self.raw.get("save_traces", True))

    def with_overrides(self, **fields) -> "ExperimentConfig":
        raw = copy.deepcopy(self.raw)
        raw.update({k: v for k, v in fields.items() if v is not None})
        return ExperimentConfig.from_dict(raw)

    def points(self) -> list[SweepPoint]:
        """Cases (outermost) times the Cartesian product of sweep axes, row-major."""
        cases = self.raw.get("cases") or [{"label": None, "set": {}}]
        axes = list((self.raw.get("sweep") or {}).items())
        names = [a for a, _ in axes]
        out = []
        for case in cases:
            for combo in itertools.product(*(vals for _, vals in axes)):
                cfg = copy.deepcopy(self.raw)
                params = dict(case.get("set", {}))
                for path, v in params.items():
                    set_path(cfg, path, v)
                for path, v in zip(names, combo):
                    set_path(cfg, path, v)
                    params[path] = v
                out.append(SweepPoint(len(out), case.get("label"), params, cfg))
        return out

    def validate(self) -> None:
        raw = self.raw
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        allowed = {
            "dynamics": DYNAMICS_OBSERVABLES,
            "steady_state": STEADY_OBSERVABLES,
            "minimal_atoms": SEARCH_OBSERVABLES,
        }[self.kind]
        for obs in self.observables:
            if obs.split("@")[0] not in allowed:
                raise ConfigError(f"observable {obs!r} not available for kind {self.kind!r}")
        sweep = raw.get("sweep") or {}
        if not isinstance(sweep, dict):
            raise ConfigError("sweep must map parameter paths to value lists")
        for path, values in sweep.items():
            if get_path(raw, path) is _MISSING:
                raise ConfigError(f"sweep axis {path!r} does not reference an existing parameter")
            if not isinstance(values, list) or not values:
                raise ConfigError(f"sweep axis {path!r} needs a nonempty list of values")
        for case in raw.get("cases") or []:
            for path in case.get("set", {}):
                if get_path(raw, path) is _MISSING:
                    raise ConfigError(f"case override {path!r} does not reference an existing parameter")
        # every point must build
        for point in self.points():
            build_point(point.config)


@dataclass(frozen=True, eq=False)
class PointSetup:
    """Physics objects for a single sweep point."""

    lattice: LatticeGeometry | None
    coupling: CouplingParams
    initial: InitialState | None
    times: np.ndarray | None
    drive: np.ndarray | None
    disorder: DisorderSpec | None
    trap_sites: tuple[int, int] | None
    search: dict | None


def _geometry(spec: dict) -> LatticeGeometry:
    if not isinstance(spec, dict):
        raise ConfigError("geometry must be an object")
    wrap = bool(spec.get("wrap_spacings", False))
    conv = (lambda x: positive_spacing(parse_angle(x))) if wrap else parse_angle
    if "zones" in spec:
        try:
            zones = [(int(b), conv(xi)) for b, xi in spec["zones"]]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"zones must be [bond_count, xi] pairs: {exc}") from exc
        return build_lattice(zones)
    if "three_zone" in spec:
        tz = spec["three_zone"]
        return three_zone(
            int(tz["n_side"]), int(tz["n_middle"]), conv(tz["xi_side"]), conv(tz["xi_middle"])
        )
    raise ConfigError("geometry needs 'zones' or 'three_zone'")


def _coupling(spec: dict) -> CouplingParams:
    if "D" in spec:
        return CouplingParams.from_directionality(float(spec["D"]), float(spec.get("gamma", 1.0)))
    if "gamma_L" in spec and "gamma_R" in spec:
        return CouplingParams(float(spec["gamma_L"]), float(spec["gamma_R"]))
    raise ConfigError("coupling needs 'D' or both 'gamma_L' and 'gamma_R'")


def _sites(value) -> list[int]:
    if isinstance(value, dict):
        return list(range(int(value["from"]), int(value["to"]) + 1))
    if isinstance(value, int):
        return list(range(1, value + 1))
    return [int(s) for s in value]


def _initial(spec: dict, n: int) -> InitialState:
    kind = spec.get("type")
    theta = parse_angle(spec.get("theta", 0.0))
    if kind == "single_site":
        return InitialState.single_site(n, int(spec["site"]))
    if kind == "two_site":
        a, b = _sites(spec["sites"])
        return InitialState.two_site(n, a, b, theta)
    if kind == "dicke_chain":
        return InitialState.dicke_chain(n, _sites(spec["sites"]), theta)
    if kind == "multi_excitation":
        return InitialState.multi_excitation(n, _sites(spec["sites"]))
    raise ConfigError(f"unknown initial state type {kind!r}")


def _times(spec: dict) -> np.ndarray:
    if "values" in spec:
        return np.array([float(t) for t in spec["values"]])
    t_max, dt = float(spec["t_max"]), float(spec["dt"])
    steps = int(round(t_max / dt))
    if steps < 1 or not math.isclose(steps * dt, t_max, rel_tol=1e-9):
        raise ConfigError(f"t_max={t_max} is not a multiple of dt={dt}")
    return np.arange(steps + 1) * dt


def build_point(cfg: dict) -> PointSetup:
    """Turn one fully-resolved config dict into physics objects (raises ConfigError)."""
    try:
        kind = cfg.get("kind", "dynamics")
        coupling = _coupling(cfg.get("coupling", {}))
        disorder = None
        if cfg.get("disorder"):
            d = cfg["disorder"]
            disorder = DisorderSpec(
                fraction=float(d.get("fraction", 0.0)),
                seed=int(cfg.get("seed", 0)),
                realizations=int(d.get("realizations", DEFAULT_REALIZATIONS)),
                scale=d.get("scale", "wavelength"),
            )
        if kind == "minimal_atoms":
            s = dict(cfg.get("search", {}))
            search = {
                "xi_side": parse_angle(s.get("xi_side", "pi/2")),
                "xi_middle": parse_angle(s.get("xi_middle", "pi")),
                "n_middle": int(s.get("n_middle", 1)),
                "search_bound": int(s.get("bound", 20)),
            }
            if "max_trend" in s:
                search["max_trend"] = float(s["max_trend"])
            return PointSetup(None, coupling, None, None, None, None, None, search)

        lattice = _geometry(cfg.get("geometry"))
        n = lattice.n_atoms
        trap = cfg.get("trap_sites")
        if trap is not None:
            trap = (int(trap[0]), int(trap[1]))
            if not 1 <= trap[0] <= trap[1] <= n:
                raise ConfigError(f"trap_sites {trap} outside 1..{n}")
        if kind == "steady_state":
            d = cfg.get("drive", {})
            amp = float(d.get("amplitude", 1.0))
            profile = d.get("profile", "uniform")
            if profile == "uniform":
                drive = uniform_drive(n, amp)
            elif profile == "plane_wave":
                drive = plane_wave_drive(lattice, amp)
            else:
                raise ConfigError(f"unknown drive profile {profile!r}")
            return PointSetup(lattice, coupling, None, None, drive, disorder, trap, None)
        initial = _initial(cfg.get("initial", {}), n)
        times = _times(cfg.get("times", {}))
        if times[0] != 0 or np.any(np.diff(times) <= 0):
            raise ConfigError("times must start at 0 and increase strictly")
        return PointSetup(lattice, coupling, initial, times, None, disorder, trap, None)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"invalid config: {exc!r}") from exc
