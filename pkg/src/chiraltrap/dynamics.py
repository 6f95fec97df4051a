"""Time evolution, initial states and weak-drive steady states.

Evolution is exact: ``a(t) = V exp(w t) V^-1 a(0)`` from an eigendecomposition of
the generator. When the eigenvector matrix is too ill-conditioned (e.g. the
defective cascaded limit ``D = +-1``), a tight-tolerance DOP853 integration is
used instead; the chosen path is recorded in ``trace.metadata["solver"]``.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .geometry import LatticeGeometry
from .hamiltonian import FockBasis

log = logging.getLogger(__name__)

COND_LIMIT = 1e6


class NonDecayingModeError(np.linalg.LinAlgError):
    """The generator has a (near-)zero eigenvalue, so no weak-drive steady state exists."""

    def __init__(self, msg: str, null_vector: np.ndarray):
        super().__init__(msg)
        self.null_vector = null_vector


@dataclass(frozen=True, eq=False)
class InitialState:
    variant: str
    vector: np.ndarray
    basis: FockBasis
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex)
        if v.shape != (len(self.basis),):
            raise ValueError(f"state has shape {v.shape}, basis dimension is {len(self.basis)}")
        if abs(np.linalg.norm(v) - 1) > 1e-12:
            raise ValueError("initial state must be normalized")
        object.__setattr__(self, "vector", v)

    @classmethod
    def single_site(cls, n_sites: int, site: int) -> "InitialState":
        return cls.site_superposition(n_sites, [site], variant="single_site")

    @classmethod
    def two_site(cls, n_sites: int, first: int, second: int, theta: float = 0.0) -> "InitialState":
        """``(|first> + e^{i theta} |second>) / sqrt(2)`` in the single-excitation sector."""
        if first == second:
            raise ValueError("two_site needs distinct sites")
        st = cls.site_superposition(n_sites, [first, second], phases=[0.0, theta], variant="two_site")
        st.params["theta"] = float(theta)
        return st

    @classmethod
    def dicke_chain(
        cls, n_sites: int, sites: int | Sequence[int], theta: float = 0.0
    ) -> "InitialState":
        """Equal-weight excitation over ``sites``, with phase ``theta`` on the last one.

        An integer ``sites`` means the first ``sites`` atoms. ``theta = 0``
        gives a symmetric Dicke state.
        """
        if isinstance(sites, (int, np.integer)):
            sites = list(range(1, int(sites) + 1))
        sites = list(sites)
        phases = [0.0] * (len(sites) - 1) + [theta]
        st = cls.site_superposition(n_sites, sites, phases=phases, variant="dicke_chain")
        st.params["theta"] = float(theta)
        return st

    @classmethod
    def site_superposition(
        cls,
        n_sites: int,
        sites: Sequence[int],
        phases: Sequence[float] | None = None,
        variant: str = "superposition",
    ) -> "InitialState":
        basis = FockBasis(n_sites, 1)
        sites = [int(s) for s in sites]
        _check_sites(sites, n_sites)
        if len(set(sites)) != len(sites):
            raise ValueError(f"repeated sites in {sites}")
        phases = np.zeros(len(sites)) if phases is None else np.asarray(phases, dtype=float)
        v = np.zeros(n_sites, dtype=complex)
        v[np.array(sites) - 1] = np.exp(1j * phases) / np.sqrt(len(sites))
        return cls(variant, v, basis, {"sites": sites})

    @classmethod
    def multi_excitation(cls, n_sites: int, sites: Sequence[int]) -> "InitialState":
        """All of ``sites`` excited at once (one Fock state with ``M = len(sites)``)."""
        sites = [int(s) for s in sites]
        _check_sites(sites, n_sites)
        if len(set(sites)) != len(sites):
            raise ValueError("hard-core constraint: a site can hold one excitation")
        basis = FockBasis(n_sites, len(sites))
        v = np.zeros(len(basis), dtype=complex)
        v[basis.index(s - 1 for s in sites)] = 1.0
        return cls("multi_excitation", v, basis, {"sites": sites})


def _check_sites(sites: Iterable[int], n_sites: int) -> None:
    sites = list(sites)
    if not sites:
        raise ValueError("at least one site is required")
    bad = [s for s in sites if not 1 <= s <= n_sites]
    if bad:
        raise ValueError(f"sites {bad} outside 1..{n_sites}")


@dataclass(frozen=True, eq=False)
class AmplitudeTrace:
    times: np.ndarray
    amplitudes: np.ndarray  # (n_times, len(basis))
    basis: FockBasis
    metadata: dict = field(default_factory=dict)

    @property
    def norm2(self) -> np.ndarray:
        """Probability of remaining in the initial excitation sector."""
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    def at(self, t: float, atol: float = 1e-9) -> int:
        """Index of grid time ``t``; raises if ``t`` is not on the grid."""
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > atol:
            raise KeyError(f"time {t} is not on the trace grid")
        return idx


def _check_times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("times must be a nonempty 1D sequence")
    if t[0] != 0:
        raise ValueError("time grid must start at 0")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing")
    return t


def _as_matrix(generator) -> np.ndarray:
    return np.asarray(getattr(generator, "matrix", generator), dtype=complex)


def propagate_eig(g: np.ndarray, a0: np.ndarray, times: np.ndarray):
    """Exact propagation by eigendecomposition; returns ``(amplitudes, cond)``."""
    w, v = np.linalg.eig(g)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond):
        return None, cond
    c = np.linalg.solve(v, a0)
    # (T, K) * (K,) -> (T, K) then map back with V
    amps = (np.exp(np.outer(times, w)) * c) @ v.T
    return amps, cond


def propagate_ode(g: np.ndarray, a0: np.ndarray, times: np.ndarray, rtol=1e-12, atol=1e-14):
    if times.size == 1:
        return a0[None, :].copy()
    sol = solve_ivp(
        lambda _t, y: g @ y,
        (times[0], times[-1]),
        a0.astype(complex),
        method="DOP853",
        t_eval=times,
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise RuntimeError(f"integrator failed: {sol.message}")
    return sol.y.T


def evolve(
    generator,
    initial: InitialState,
    times,
    *,
    method: str = "auto",
    cond_limit: float = COND_LIMIT,
) -> AmplitudeTrace:
    """Propagate ``initial`` under ``da/dt = generator @ a`` on the grid ``times``.

    ``method`` is ``"auto"`` (eigendecomposition unless its eigenvector
    condition number exceeds ``cond_limit``), ``"eig"`` (raises instead of
    falling back) or ``"ode"``.
    """
    g = _as_matrix(generator)
    t = _check_times(times)
    a0 = initial.vector
    if g.shape != (a0.size, a0.size):
        raise ValueError(f"generator shape {g.shape} does not match state dimension {a0.size}")
    if method not in ("auto", "eig", "ode"):
        raise ValueError(f"unknown method {method!r}")

    meta = {"basis": initial.basis.describe(), "initial": initial.variant}
    amps = None
    if method in ("auto", "eig"):
        amps, cond = propagate_eig(g, a0, t)
        meta["eig_condition"] = float(cond)
        if amps is None or cond > cond_limit:
            if method == "eig":
                raise np.linalg.LinAlgError(
                    f"eigenvector condition {cond:.3g} exceeds {cond_limit:.3g}; "
                    "generator is (nearly) defective"
                )
            log.debug("eigenvector condition %.3g above %.3g, integrating instead", cond, cond_limit)
            amps = None
    if amps is None:
        amps = propagate_ode(g, a0, t)
        meta["solver"] = "ode"
    else:
        meta["solver"] = "eig"
    return AmplitudeTrace(t, amps, initial.basis, meta)


def site_populations(trace: AmplitudeTrace) -> np.ndarray:
    """Excited-state population of every site at every time, shape ``(T, N)``."""
    probs = np.abs(trace.amplitudes) ** 2
    if trace.basis.excitations == 1:
        return probs
    return probs @ trace.basis.occupancy.astype(float)


def total_population(trace: AmplitudeTrace) -> np.ndarray:
    return site_populations(trace).sum(axis=1)


def zone_population(trace: AmplitudeTrace, sites: tuple[int, int]) -> np.ndarray:
    """Summed population over the inclusive 1-based site range ``sites``."""
    lo, hi = sites
    n = trace.basis.n_sites
    if not 1 <= lo <= hi <= n:
        raise ValueError(f"site range {sites} is empty or outside 1..{n}")
    return site_populations(trace)[:, lo - 1 : hi].sum(axis=1)


class StopTime(NamedTuple):
    time: float
    index: int
    reached: bool


def stop_time_at_threshold(trace: AmplitudeTrace, threshold: float = 0.1) -> StopTime:
    """First grid time where the sector population (``P_tot / M``) drops to ``threshold``.

    Returns the final time with ``reached=False`` when the grid ends first.
    """
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    below = np.nonzero(trace.norm2 <= threshold)[0]
    if below.size == 0:
        return StopTime(float(trace.times[-1]), trace.times.size - 1, False)
    i = int(below[0])
    return StopTime(float(trace.times[i]), i, True)


def uniform_drive(n_sites: int, amplitude: float = 1.0) -> np.ndarray:
    return np.full(n_sites, amplitude, dtype=complex)


def plane_wave_drive(lattice: LatticeGeometry, amplitude: float = 1.0) -> np.ndarray:
    return amplitude * np.exp(1j * lattice.phases)


def steady_state(generator, drive, *, rcond: float = 1e-12) -> np.ndarray:
    """Weak-drive steady state: solve ``G a + 1j * drive = 0``."""
    g = _as_matrix(generator)
    drive = np.asarray(drive, dtype=complex)
    if drive.shape != (g.shape[0],):
        raise ValueError(f"drive has shape {drive.shape}, generator is {g.shape}")
    u, s, vh = np.linalg.svd(g)
    if s[-1] <= rcond * s[0]:
        null = vh[-1].conj()
        raise NonDecayingModeError(
            f"generator has a non-decaying mode (sigma_min/sigma_max = {s[-1] / s[0]:.2e}); "
            f"null vector {np.array2string(null, precision=3)}",
            null,
        )
    a = np.linalg.solve(g, -1j * drive)
    resid = np.linalg.norm(g @ a + 1j * drive)
    if resid > 1e-10 * max(np.linalg.norm(drive), 1e-300):
        raise np.linalg.LinAlgError(f"steady-state residual {resid:.2e} too large")
    return a


def write_trace_csv(
    trace: AmplitudeTrace, path: str | PathLike, sidecar: dict | None = None
) -> None:
    """Write ``t,site,population`` rows (1-based sites) plus a JSON sidecar next to it."""
    pops = site_populations(trace)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "site", "population"])
        for t, row in zip(trace.times, pops):
            ts = repr(float(t))
            for site, p in enumerate(row, start=1):
                w.writerow([ts, site, repr(float(p))])
    meta = {"basis": trace.basis.describe(), **trace.metadata, **(sidecar or {})}
    with open(f"{path}.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


def read_trace_csv(path: str | PathLike) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`write_trace_csv`: returns ``(times, populations)``."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    data = np.atleast_2d(data)
    times = np.unique(data[:, 0])
    n = int(data[:, 1].max())
    return times, data[:, 2].reshape(times.size, n)
