"""Execute experiment configs and persist traces, summaries and sweep tables."""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..dynamics import (
    AmplitudeTrace,
    evolve,
    site_populations,
    steady_state,
    stop_time_at_threshold,
    write_trace_csv,
)
from ..geometry import apply_disorder
from ..hamiltonian import build_multi, build_single
from ..observables import (
    EARLY_TIME,
    LATE_TIME,
    classify_trapped,
    minimal_trapping_atoms,
    transport_parameter,
    trend_parameter,
    window_mean,
)
from .config import ConfigError, ExperimentConfig, PointSetup, SweepPoint, build_point

log = logging.getLogger(__name__)

STOP_THRESHOLD = 0.1


@dataclass
class ResultRecord:
    config_hash: str
    point: int
    realization: int
    label: str | None
    params: dict
    observables: dict = field(default_factory=dict)
    traces: list[str] = field(default_factory=list)
    status: str = "ok"
    error: str | None = None
    elapsed_s: float = 0.0
    solver: str | None = None


@dataclass(frozen=True, eq=False)
class EnsembleTrace:
    times: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    realizations: int


def ensemble_average(traces: Sequence[AmplitudeTrace | tuple[np.ndarray, np.ndarray]]) -> EnsembleTrace:
    """Pointwise mean and standard error of the sector population over realizations.

    Accepts traces or ``(times, total_population)`` pairs.
    """
    if not traces:
        raise ValueError("need at least one realization")
    pairs = [(tr.times, tr.norm2) if isinstance(tr, AmplitudeTrace) else tr for tr in traces]
    times = np.asarray(pairs[0][0])
    for t, _ in pairs[1:]:
        if np.shape(t) != times.shape or np.any(np.asarray(t) != times):
            raise ValueError("realizations use mismatched time grids")
    totals = np.array([p for _, p in pairs])
    k = totals.shape[0]
    stderr = totals.std(axis=0, ddof=1) / np.sqrt(k) if k > 1 else np.zeros(times.size)
    return EnsembleTrace(times, totals.mean(axis=0), stderr, k)


def _at_time(trace: AmplitudeTrace, t: float) -> int:
    try:
        return trace.at(t)
    except KeyError as exc:
        raise ConfigError(f"observable needs t={t:g} on the time grid") from exc


def dynamics_observables(
    trace: AmplitudeTrace, names: Sequence[str], trap_sites: tuple[int, int] | None
) -> dict:
    pops = site_populations(trace)
    norm = trace.norm2
    tp = transport_parameter(pops)
    stop = stop_time_at_threshold(trace, STOP_THRESHOLD)
    window = np.arange(trace.times.size) <= stop.index
    out = {}
    for name in names:
        base, _, arg = name.partition("@")
        if base == "stop_time":
            out[name] = stop.time if stop.reached else None
        elif base == "transport_mean":
            out[name] = window_mean(tp, trace.times, window)
        elif base == "transport_late":
            late = window & (trace.times >= stop.time / 2)
            out[name] = window_mean(tp, trace.times, late)
        elif base == "transport_final":
            out[name] = float(tp[stop.index])
        elif base == "total_final":
            out[name] = float(norm[-1])
        elif base == "total":
            out[name] = float(norm[_at_time(trace, float(arg))])
        elif base == "transport":
            out[name] = float(tp[_at_time(trace, float(arg))])
        elif base == "trend":
            p1 = norm[_at_time(trace, EARLY_TIME)]
            p2 = norm[_at_time(trace, LATE_TIME)]
            out[name] = trend_parameter(p1, p2) if p1 > 0 else None
        elif base == "trapped":
            out[name] = bool(classify_trapped(trace))
        elif base in ("trap_fraction_min", "trap_final"):
            if trap_sites is None:
                raise ConfigError(f"{base} needs 'trap_sites'")
            lo, hi = trap_sites
            trap = pops[:, lo - 1 : hi].sum(axis=1) / trace.basis.excitations
            if base == "trap_final":
                out[name] = float(trap[-1])
            else:
                t_from = float(arg) if arg else 0.0
                sel = (trace.times >= t_from) & (norm > STOP_THRESHOLD)
                out[name] = float(np.min(trap[sel] / norm[sel])) if sel.any() else None
        else:
            raise ConfigError(f"unknown observable {name!r}")
    return out


def _generator(setup: PointSetup, lattice):
    single = build_single(lattice, setup.coupling)
    if setup.initial is not None and setup.initial.basis.excitations > 1:
        return build_multi(single, setup.initial.basis)
    return single.matrix


def _run_one(
    cfg: ExperimentConfig, point: SweepPoint, setup: PointSetup, realization: int, out_dir: Path
) -> tuple[ResultRecord, tuple[np.ndarray, np.ndarray] | None]:
    rec = ResultRecord(cfg.hash, point.index, realization, point.label, point.params)
    t0 = time.perf_counter()
    totals = None
    try:
        lattice = setup.lattice
        if setup.disorder is not None and lattice is not None:
            lattice = apply_disorder(lattice, setup.disorder, realization)
            rec.observables["disorder_rejections"] = lattice.info.get("rejections", 0)

        if cfg.kind == "minimal_atoms":
            n = minimal_trapping_atoms(setup.coupling.D, **setup.search)
            rec.observables["minimal_atoms"] = n
        elif cfg.kind == "steady_state":
            a = steady_state(build_single(lattice, setup.coupling), setup.drive)
            p = np.abs(a) ** 2
            for name in cfg.observables:
                rec.observables[name] = transport_parameter(p) if name == "transport" else float(p.sum())
        else:
            trace = evolve(_generator(setup, lattice), setup.initial, setup.times)
            rec.solver = trace.metadata["solver"]
            rec.observables.update(dynamics_observables(trace, cfg.observables, setup.trap_sites))
            if cfg.save_traces:
                suffix = f"_r{realization:03d}" if setup.disorder is not None else ""
                fname = f"trace_{cfg.hash}_{point.index:04d}{suffix}.csv"
                write_trace_csv(
                    trace,
                    out_dir / fname,
                    {"config_hash": cfg.hash, "point": point.index, "params": point.params},
                )
                rec.traces.append(fname)
            totals = (trace.times, trace.norm2)
    except Exception as exc:  # reported per point, the sweep continues
        log.warning("point %d realization %d failed: %s", point.index, realization, exc)
        rec.status = "error"
        rec.error = f"{type(exc).__name__}: {exc}"
        totals = None
    rec.elapsed_s = time.perf_counter() - t0
    return rec, totals


def _fmt(v) -> str:
    if isinstance(v, np.generic):
        v = v.item()
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_ensemble(path: Path, ens: EnsembleTrace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "mean_total", "stderr_total"])
        for t, m, s in zip(ens.times, ens.mean, ens.stderr):
            w.writerow([repr(float(t)), repr(float(m)), repr(float(s))])


def _write_sweeps(out_dir: Path, cfg: ExperimentConfig, records: list[ResultRecord]) -> list[str]:
    axes = list((cfg.raw.get("sweep") or {}).keys())
    has_cases = bool(cfg.raw.get("cases"))
    disordered = bool(cfg.raw.get("disorder"))
    names = []
    for obs in cfg.observables:
        fname = f"sweep_{obs.replace('@', '_at_')}.csv"
        with open(out_dir / fname, "w", newline="") as fh:
            w = csv.writer(fh)
            header = ["point", *(["case"] if has_cases else []), *axes]
            header += ["realization"] if disordered else []
            w.writerow(header + [obs])
            for r in records:
                row = [r.point, *([r.label] if has_cases else [])]
                row += [_fmt(r.params.get(a)) for a in axes]
                row += [r.realization] if disordered else []
                w.writerow(row + [_fmt(r.observables.get(obs))])
        names.append(fname)
    return names


def run(
    config: ExperimentConfig,
    out_dir: str | os.PathLike | None = None,
    threads: int = 1,
) -> list[ResultRecord]:
    """Run every sweep point (and disorder realization); write outputs to ``out_dir``.

    Failures are recorded per point with ``status == "error"``; the sweep is
    never aborted. Output content does not depend on ``threads``.
    """
    out = Path(out_dir or config.raw.get("output") or f"results/{config.name}")
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {out} is not writable: {exc}") from exc

    points = config.points()
    setups = [build_point(p.config) for p in points]
    tasks = []
    for point, setup in zip(points, setups):
        reps = setup.disorder.realizations if setup.disorder is not None else 1
        tasks.extend((point, setup, r) for r in range(reps))

    def work(task):
        point, setup, r = task
        return _run_one(config, point, setup, r, out)

    started = time.perf_counter()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]
    records = [r for r, _ in results]

    ensembles = {}
    for point, setup in zip(points, setups):
        if setup.disorder is None or setup.times is None:
            continue
        curves = [tot for (rec, tot) in results if rec.point == point.index and tot is not None]
        if not curves:
            continue
        ens = ensemble_average(curves)
        fname = f"ensemble_{config.hash}_{point.index:04d}.csv"
        _write_ensemble(out / fname, ens)
        ensembles[point.index] = {"file": fname, "realizations": ens.realizations}

    sweep_files = _write_sweeps(out, config, records)
    summary = {
        "name": config.name,
        "config_hash": config.hash,
        "config": config.raw,
        "n_points": len(points),
        "n_records": len(records),
        "failures": sum(r.status != "ok" for r in records),
        "ensembles": ensembles,
        "sweep_files": sweep_files,
        "metadata": {
            "disorder_distribution": "gaussian",
            "default_realizations": 100,
            "stop_threshold": STOP_THRESHOLD,
            "trend_times": [EARLY_TIME, LATE_TIME],
            "threads": threads,
            "wall_time_s": time.perf_counter() - started,
        },
        "records": [asdict(r) for r in records],
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, default=_json_default)
        fh.write("\n")
    return records


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
