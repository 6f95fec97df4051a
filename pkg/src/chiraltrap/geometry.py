"""1D lattice construction from zone specifications.

Positions are stored as dimensionless phases ``phi_mu = k_s * r_mu``. A zone is
specified by the number of *bonds* it owns and its spacing ``xi = k_s * d``.
The bond between atoms ``mu`` and ``mu + 1`` belongs to the zone containing
atom ``mu``, so an interface ("probe") atom has a bond of the previous zone on
its left and a bond of its own zone on its right.

Site indices exposed to callers are 1-based; arrays are 0-based.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

NEAR_ZERO_SPACING = 0.05
DISORDER_SCALES = ("wavelength", "spacing")
_MAX_REDRAWS = 10_000


class NearZeroSpacingWarning(UserWarning):
    """A spacing below 0.05 rad was passed without an explicit 2*pi offset."""


@dataclass(frozen=True)
class ZoneSpec:
    bond_count: int
    xi: float

    def __post_init__(self):
        if isinstance(self.bond_count, bool) or int(self.bond_count) != self.bond_count:
            raise ValueError(f"bond_count must be an integer, got {self.bond_count!r}")
        if self.bond_count < 1:
            raise ValueError(f"bond_count must be >= 1, got {self.bond_count}")
        if not math.isfinite(self.xi):
            raise ValueError(f"xi must be finite, got {self.xi}")
        if self.xi <= 0:
            raise ValueError(
                f"xi must be positive (got {self.xi}); add a multiple of 2*pi "
                "to express spacings at or below zero"
            )
        if self.xi < NEAR_ZERO_SPACING:
            warnings.warn(
                f"spacing xi={self.xi:.4g} is near zero; near-field effects are not "
                "modelled, pass xi + 2*pi*m to state the intended offset",
                NearZeroSpacingWarning,
                stacklevel=3,
            )
        object.__setattr__(self, "bond_count", int(self.bond_count))
        object.__setattr__(self, "xi", float(self.xi))


@dataclass(frozen=True)
class LatticeGeometry:
    """Ordered atom phases plus the 1-based indices of interface atoms.

    ``info`` carries provenance such as disorder parameters; it does not
    affect the physics.
    """

    phases: np.ndarray
    zone_boundaries: tuple[int, ...] = ()
    info: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        phases = np.array(self.phases, dtype=float)
        if phases.ndim != 1 or phases.size == 0:
            raise ValueError("phases must be a nonempty 1D sequence")
        if not np.all(np.isfinite(phases)):
            raise ValueError("phases must be finite")
        if np.any(np.diff(phases) <= 0):
            raise ValueError("phases must be strictly increasing")
        n = phases.size
        for b in self.zone_boundaries:
            if not 1 <= b <= n:
                raise ValueError(f"zone boundary {b} outside 1..{n}")
        phases.setflags(write=False)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "zone_boundaries", tuple(int(b) for b in self.zone_boundaries))

    @property
    def n_atoms(self) -> int:
        return self.phases.size

    @property
    def bonds(self) -> np.ndarray:
        return np.diff(self.phases)

    def zone_sites(self, zone: int) -> tuple[int, int]:
        """Inclusive 1-based site range of ``zone`` (0-based), interface atoms included."""
        edges = (1, *self.zone_boundaries, self.n_atoms)
        if not 0 <= zone < len(edges) - 1:
            raise IndexError(f"zone {zone} out of range for {len(edges) - 1} zones")
        return edges[zone], edges[zone + 1]

    def local_spacing(self) -> np.ndarray:
        """Spacing of the zone each atom belongs to (its right bond; last atom: left bond)."""
        bonds = self.bonds
        if bonds.size == 0:
            return np.zeros(1)
        return np.append(bonds, bonds[-1])


@dataclass(frozen=True)
class DisorderSpec:
    """Gaussian position fluctuations.

    ``scale`` selects what ``fraction`` multiplies: ``"wavelength"`` gives a
    phase standard deviation of ``2*pi*fraction`` on every atom, ``"spacing"``
    gives ``fraction`` times the atom's local nominal spacing.
    """

    fraction: float
    seed: int = 0
    realizations: int = 100
    scale: str = "wavelength"

    def __post_init__(self):
        if not math.isfinite(self.fraction) or self.fraction < 0:
            raise ValueError(f"fraction must be finite and >= 0, got {self.fraction}")
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")
        if self.scale not in DISORDER_SCALES:
            raise ValueError(f"scale must be one of {DISORDER_SCALES}, got {self.scale!r}")

    def sigma(self, lattice: LatticeGeometry) -> np.ndarray:
        if self.scale == "wavelength":
            return np.full(lattice.n_atoms, 2 * np.pi * self.fraction)
        return self.fraction * lattice.local_spacing()


def build_lattice(zones: Sequence[ZoneSpec | tuple[int, float]]) -> LatticeGeometry:
    """Concatenate the zones' bonds and take cumulative sums, starting at phase 0.

    >>> build_lattice([(1, 3.0)]).phases.tolist()
    [0.0, 3.0]
    """
    if len(zones) == 0:
        raise ValueError("at least one zone is required")
    specs = [z if isinstance(z, ZoneSpec) else ZoneSpec(*z) for z in zones]
    bonds = np.concatenate([np.full(z.bond_count, z.xi) for z in specs])
    phases = np.concatenate([[0.0], np.cumsum(bonds)])
    counts = np.cumsum([z.bond_count for z in specs])[:-1]
    boundaries = tuple(int(c) + 1 for c in counts)
    return LatticeGeometry(phases, boundaries)


def three_zone(n_side: int, n_middle: int, xi_side: float, xi_middle: float) -> LatticeGeometry:
    """Mirror-symmetric side/middle/side array with ``2*n_side + n_middle`` atoms.

    Each side zone holds ``n_side`` atoms, the outermost interface atoms
    included; the middle zone holds ``n_middle`` atoms between them. With
    ``n_side == 1`` the array is homogeneous at ``xi_middle``.
    """
    if n_side < 1 or n_middle < 1:
        raise ValueError("zone atom counts must be >= 1")
    if n_side == 1:
        return build_lattice([(n_middle + 1, xi_middle)])
    return build_lattice(
        [(n_side - 1, xi_side), (n_middle + 1, xi_middle), (n_side - 1, xi_side)]
    )


def _rng(seed: int, realization_index: int, attempt: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(realization_index), int(attempt)))
    return np.random.default_rng(ss)


def apply_disorder(
    lattice: LatticeGeometry, spec: DisorderSpec, realization_index: int
) -> LatticeGeometry:
    """Displace every atom by an independent zero-mean Gaussian draw.

    Draws depend only on ``(spec.seed, realization_index, atom index)``. A draw
    that breaks the strict ordering is discarded and replaced; the number of
    discarded draws is reported in ``info["rejections"]``.
    """
    if not 0 <= realization_index < spec.realizations:
        raise ValueError(
            f"realization_index {realization_index} outside [0, {spec.realizations})"
        )
    info = {
        "disorder_fraction": spec.fraction,
        "disorder_scale": spec.scale,
        "distribution": "gaussian",
        "seed": spec.seed,
        "realization": realization_index,
        "rejections": 0,
    }
    if spec.fraction == 0:
        return LatticeGeometry(lattice.phases, lattice.zone_boundaries, info)

    sigma = spec.sigma(lattice)
    for attempt in range(_MAX_REDRAWS):
        shift = sigma * _rng(spec.seed, realization_index, attempt).standard_normal(lattice.n_atoms)
        phases = lattice.phases + shift
        if np.all(np.diff(phases) > 0):
            info["rejections"] = attempt
            return LatticeGeometry(phases, lattice.zone_boundaries, info)
    raise RuntimeError(
        f"no ordered realization after {_MAX_REDRAWS} draws; disorder fraction too large"
    )


def positive_spacing(xi: float, floor: float = NEAR_ZERO_SPACING) -> float:
    """Map an angle in any branch to an equivalent spacing in ``[floor, 2*pi + floor)``.

    Spacings enter the couplings only through ``exp(i*xi)``, so adding
    ``2*pi*m`` leaves the dynamics unchanged; presets use this to express
    sweeps over ``[-pi, pi]`` as physical (positive) spacings.
    """
    x = math.fmod(xi, 2 * math.pi)
    if x < 0:
        x += 2 * math.pi
    if x < floor:
        x += 2 * math.pi
    return x
