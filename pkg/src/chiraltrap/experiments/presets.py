"""Named experiment configs for the standard transport and trapping scenarios.

Geometry conventions used here:

* two-zone chains put the interface atom at the end of the first zone's bonds:
  N=7 is ``[(3, xi1), (3, xi2)]`` (interface atom 4), N=24 is
  ``[(11, xi1), (12, xi2)]`` (interface atom 12);
* the 100-atom trapping array is ``[(29, pi/2), (40, pi), (30, pi/2)]`` with
  interface atoms 30 and 70; the trapping zone is sites 30..70;
* the side-zone size search and the 30-atom double-excitation array use the
  mirror-symmetric :func:`chiraltrap.geometry.three_zone` layout.

Sweeps over ``[-pi, pi]`` set ``wrap_spacings`` so each angle is mapped to an
equivalent positive spacing (a ``2*pi`` offset where needed).
"""

from __future__ import annotations

import copy

import numpy as np

from .config import ExperimentConfig


class UnknownPresetError(KeyError):
    pass


def _grid(n: int = 41, lo: float = -np.pi, hi: float = np.pi) -> list[float]:
    return [float(x) for x in np.linspace(lo, hi, n)]


_D_SCAN = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


def _two_zone_n7(xi2="pi/2", D=0.2, t_max=400, dt=0.05, **extra) -> dict:
    cfg = {
        "kind": "dynamics",
        "geometry": {"zones": [[3, "pi"], [3, xi2]]},
        "coupling": {"D": D},
        "initial": {"type": "single_site", "site": 1},
        "times": {"t_max": t_max, "dt": dt},
        "observables": ["stop_time", "transport_mean", "transport_late", "transport_final"],
        "seed": 0,
    }
    cfg.update(extra)
    return cfg


def _steady_n24(D: float) -> dict:
    return {
        "kind": "steady_state",
        "geometry": {"zones": [[11, 0.0], [12, 0.0]], "wrap_spacings": True},
        "coupling": {"D": D},
        "drive": {"profile": "uniform", "amplitude": 1.0},
        "observables": ["transport", "total"],
        "sweep": {"geometry.zones.0.1": _grid(), "geometry.zones.1.1": _grid()},
        "seed": 0,
    }


def _multi_site_n24(D, xi2, initial, sweep) -> dict:
    return {
        "kind": "dynamics",
        "geometry": {"zones": [[11, "pi"], [12, xi2]]},
        "coupling": {"D": D},
        "initial": initial,
        "times": {"t_max": 2500, "dt": 0.5},
        "observables": ["stop_time", "transport_mean", "transport_late", "transport_final"],
        "sweep": sweep,
        "seed": 0,
    }


def _trap_n100(D, xi_mid="pi", initial=None, **extra) -> dict:
    cfg = {
        "kind": "dynamics",
        "geometry": {"zones": [[29, "pi/2"], [40, xi_mid], [30, "pi/2"]]},
        "coupling": {"D": D},
        "initial": initial or {"type": "single_site", "site": 50},
        "times": {"t_max": 4000, "dt": 2},
        "trap_sites": [30, 70],
        "observables": [
            "total@1000",
            "total@4000",
            "trend",
            "trapped",
            "trap_fraction_min@200",
            "trap_final",
        ],
        "seed": 0,
    }
    cfg.update(extra)
    return cfg


def _double_n30(D) -> dict:
    return {
        "kind": "dynamics",
        "geometry": {"three_zone": {"n_side": 10, "n_middle": 10, "xi_side": "pi/2", "xi_middle": "pi"}},
        "coupling": {"D": D},
        "initial": {"type": "multi_excitation", "sites": [15, 16]},
        "times": {"t_max": 400, "dt": 0.5},
        "trap_sites": [10, 21],
        "observables": ["stop_time", "total_final", "trap_final", "trap_fraction_min"],
        "seed": 0,
    }


def _catalog() -> dict[str, dict]:
    c: dict[str, dict] = {}

    c["fig2a"] = _two_zone_n7(
        xi2="pi", sweep={"geometry.zones.1.1": ["pi", "pi/8", "pi/2"]},
        description="N=7, xi1=pi, D=0.2, single excitation at site 1; xi2 in {pi, pi/8, pi/2}",
    )
    for name, what in (("fig2b", "probe atom P_4"), ("fig2c", "neighbour P_5")):
        c[name] = _two_zone_n7(
            xi2=0.0, dt=0.5, t_max=300,
            geometry={"zones": [[3, "pi"], [3, 0.0]], "wrap_spacings": True},
            sweep={"geometry.zones.1.1": _grid()},
            description=f"{what} versus xi2 in [-pi, pi] (read from traces)",
        )
    c["fig2d"] = copy.deepcopy(c["fig2a"])
    c["fig2d"]["description"] = "probe and neighbour decay for xi2 in {pi, pi/8, pi/2}"

    c["fig3a"] = _two_zone_n7(xi2="pi/8", sweep={"coupling.D": _D_SCAN},
                              description="T_p(t), N=7, xi2=pi/8, D scan")
    c["fig3b"] = _two_zone_n7(xi2="pi/2", sweep={"coupling.D": _D_SCAN},
                              description="T_p(t), N=7, xi2=pi/2, D scan")
    for name, D in (("fig3c", 0.5), ("fig3d", 0.9)):
        c[name] = _two_zone_n7(
            xi2=0.0, D=D, dt=0.5,
            geometry={"zones": [[3, "pi"], [3, 0.0]], "wrap_spacings": True},
            sweep={"geometry.zones.1.1": _grid()},
            description=f"T_p(t), N=7, D={D}, xi2 scan",
        )

    for name, D in (("fig4a", 0.2), ("fig4b", 0.5), ("fig4c", 0.9)):
        c[name] = _steady_n24(D)
        c[name]["description"] = f"steady-state T_p map, N=24, D={D}, uniform weak drive"

    thetas = _grid(33, 0.0, 2 * np.pi)
    c["fig5a"] = _multi_site_n24(
        0.2, "pi/8", {"type": "two_site", "sites": [1, 2], "theta": 0.0}, {"initial.theta": thetas}
    )
    c["fig5b"] = _multi_site_n24(
        0.4, "pi/4", {"type": "two_site", "sites": [1, 2], "theta": 0.0}, {"initial.theta": thetas}
    )
    c["fig5c"] = _multi_site_n24(
        0.2, "pi/8", {"type": "dicke_chain", "sites": 1, "theta": 0.0}, {"initial.sites": [1, 2, 3, 4]}
    )
    c["fig5a"]["description"] = "two-site excitation, theta scan, D=0.2, (pi, pi/8)"
    c["fig5b"]["description"] = "two-site excitation, theta scan, D=0.4, (pi, pi/4)"
    c["fig5c"]["description"] = "M-site symmetric excitation, M=1..4, D=0.2, (pi, pi/8)"

    c["fig6a"] = _trap_n100(0.2, description="three-zone trapping, D=0.2")
    c["fig6b"] = _trap_n100(0.5, description="three-zone trapping, D=0.5")
    c["fig6c"] = _trap_n100(0.0, xi_mid="pi/8", description="three-zone, D=0, middle spacing pi/8")
    c["fig6d"] = _trap_n100(
        0.0, xi_mid="3*pi/4",
        initial={"type": "dicke_chain", "sites": {"from": 30, "to": 70}, "theta": 0.0},
        description="three-zone, D=0, symmetric excitation over sites 30..70, middle spacing 3pi/4",
    )
    e = _trap_n100(0.2, description="total versus trapping-zone population for cases a-d")
    e["cases"] = [
        {"label": "a", "set": {"coupling.D": 0.2}},
        {"label": "b", "set": {"coupling.D": 0.5}},
        {"label": "c", "set": {"coupling.D": 0.0, "geometry.zones.1.1": "pi/8"}},
        {
            "label": "d",
            "set": {
                "coupling.D": 0.0,
                "geometry.zones.1.1": "3*pi/4",
                "initial": {"type": "dicke_chain", "sites": {"from": 30, "to": 70}, "theta": 0.0},
            },
        },
    ]
    c["fig6e"] = e
    f = _trap_n100(0.2, description="position disorder ensembles (1%, 5%) versus clean arrays")
    f.update(
        times={"t_max": 4000, "dt": 10},
        disorder={"fraction": 0.0, "realizations": 100, "scale": "wavelength"},
        sweep={"coupling.D": [0.2, 0.5], "disorder.fraction": [0.0, 0.01, 0.05]},
        observables=["total@1000", "total@4000", "trap_final"],
        save_traces=False,
    )
    c["fig6f"] = f

    c["fig7"] = {
        "kind": "minimal_atoms",
        "coupling": {"D": 0.2},
        "search": {"xi_side": "pi/2", "xi_middle": "pi", "n_middle": 1, "bound": 20},
        "observables": ["minimal_atoms"],
        "sweep": {"coupling.D": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]},
        "seed": 0,
        "description": "minimal side-zone size that keeps the excitation trapped",
    }

    c["fig8a"] = _two_zone_n7(
        xi2="pi/2", t_max=100,
        initial={"type": "multi_excitation", "sites": [1, 2]},
        sweep={"coupling.D": _D_SCAN},
        description="double excitation at sites 1,2, N=7, xi2=pi/2, D scan",
    )
    c["fig8b"] = _two_zone_n7(
        xi2=0.0, D=0.5, t_max=100, dt=0.1,
        geometry={"zones": [[3, "pi"], [3, 0.0]], "wrap_spacings": True},
        initial={"type": "multi_excitation", "sites": [1, 2]},
        sweep={"geometry.zones.1.1": _grid()},
        description="double excitation at sites 1,2, N=7, D=0.5, xi2 scan",
    )
    c["fig8c"] = _double_n30(0.2)
    c["fig8c"]["sweep"] = {"coupling.D": [0.2, 0.5]}
    c["fig8c"]["description"] = "double-excitation trapping, N1=N2=N3=10"
    c["fig8d"] = copy.deepcopy(c["fig8c"])
    c["fig8d"]["description"] = "total and trapping-zone populations for the double-excitation arrays"

    for name, cfg in c.items():
        cfg["name"] = name
    return c


def presets() -> dict[str, dict]:
    """Name -> raw config dict (fresh copies)."""
    return _catalog()


def get_preset(name: str) -> ExperimentConfig:
    catalog = _catalog()
    if name not in catalog:
        raise UnknownPresetError(f"unknown preset {name!r}; available: {', '.join(sorted(catalog))}")
    return ExperimentConfig.from_dict(catalog[name])
