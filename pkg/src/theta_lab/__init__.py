"""Clique covers and set representations of k-uniform hypergraphs."""

from .cover import (
    CliqueCover,
    CoverCertificate,
    SetRepresentation,
    Verdict,
    cover_to_representation,
    project_representation,
    representation_to_cover,
    verify_clique_cover,
    verify_representation,
    verify_theta_cover,
)
from .errors import GenerationError, InputError, ParseError, PreconditionError, ResourceError
from .exact import SolveLimits, cc_exact, independence_number, theta_exact, vartheta_exact
from .hypergraph import (
    Hypergraph,
    complement_edges,
    degree,
    is_clique,
    is_d_balanced,
    is_independent,
    max_degree,
)
from .randcover import BalancedConfig, GeneralConfig, balanced_cover, build_aux_graph, clean, general_cover

__version__ = "0.1.0"
