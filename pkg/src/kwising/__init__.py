"""Kac-Ward transition operators for the planar Ising model."""

__version__ = "0.1.0"

from .errors import KacWardError
from .planar_graph import (
    DirectedEdge,
    EmbeddedGraph,
    Subtiling,
    build_dual,
    build_graph,
    dual_subtiling,
    full_subtiling,
    subtiling,
)
from .kacward import (
    b_matrix,
    conjugated_transition_matrix,
    factorize_symmetric,
    induced_weights,
    kac_ward_determinant,
    kac_ward_operator,
    transition_matrix,
)
from .spectral import is_contractive, operator_norm_conjugated, xi
from .ising import (
    CouplingSystem,
    free_energy_density,
    partition_bruteforce,
    partition_free_kw,
    partition_plus_kw,
)
from .regimes import certified_norm_bound, envelope_high, envelope_low, in_high_regime, in_low_regime
from .isoradial import hexagonal_patch, square_patch, triangular_patch, zinvariant_couplings

__all__ = [name for name in dir() if not name.startswith("_")]
