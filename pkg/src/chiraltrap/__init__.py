"""Excitation transport and trapping in dissimilar chirally-coupled atomic arrays.

Atoms sit on a 1D waveguide with left/right decay rates ``gamma_L``/``gamma_R``.
Positions are expressed as dimensionless phases ``k_s * r``. The main engine
evolves amplitudes under the non-Hermitian no-jump generator in a fixed
excitation-number sector; :mod:`chiraltrap.oracle` provides a brute-force
master-equation cross-check for small chains.
"""

from .geometry import (
    DisorderSpec,
    LatticeGeometry,
    ZoneSpec,
    apply_disorder,
    build_lattice,
    three_zone,
)
from .hamiltonian import (
    CouplingParams,
    FockBasis,
    SingleExcitationHamiltonian,
    build_multi,
    build_single,
    dissipator_matrix,
)
from .dynamics import (
    AmplitudeTrace,
    InitialState,
    NonDecayingModeError,
    evolve,
    site_populations,
    steady_state,
    stop_time_at_threshold,
    total_population,
    zone_population,
)
from .observables import (
    TransportSplit,
    classify_trapped,
    minimal_trapping_atoms,
    transport_parameter,
    trend_parameter,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeTrace",
    "CouplingParams",
    "DisorderSpec",
    "FockBasis",
    "InitialState",
    "LatticeGeometry",
    "NonDecayingModeError",
    "SingleExcitationHamiltonian",
    "TransportSplit",
    "ZoneSpec",
    "apply_disorder",
    "build_lattice",
    "build_multi",
    "build_single",
    "classify_trapped",
    "dissipator_matrix",
    "evolve",
    "minimal_trapping_atoms",
    "site_populations",
    "steady_state",
    "stop_time_at_threshold",
    "three_zone",
    "total_population",
    "transport_parameter",
    "trend_parameter",
    "zone_population",
]
