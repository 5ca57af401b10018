"""Spectral analysis of randomly weighted random networks.

Normalized Laplacian spectra, their agreement with the semicircle law, and
random-walk first-arrival times with a semicircle closed-form approximation.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CensoredEstimateError, ConfigError, DegenerateNodeError, DegenerateSpectrumError, DisconnectedGraphError,
    EdgeListError, GenerationError, GraphError, NetSpectraError, NumericError,
)
from .graph import DegreeStats, WeightedGraph, degree_stats, is_connected, read_edge_list, volume, write_edge_list  # noqa: E402,E501
from .generators import (  # noqa: E402
    GenConfig, WeightDistribution, assign_weights, degree_histogram, gen_ba, gen_ba_cut, gen_er, generate_connected,
    make_rng, tail_exponent,
)
from .spectral import (  # noqa: E402
    EigenHistogram, SemicircleFit, SpectralDecomposition, bin_probability, eig_sym, eigenvalue_histogram,
    fit_semicircle, normalized_laplacian, semicircle_density, semicircle_relative_error, spectrum, wigner_density,
)
from .walk import (  # noqa: E402
    first_arrival_matrix, first_arrival_spectral, m_tilde, m_tilde_quadrature, mc_first_arrival,
    mean_first_arrival, relative_error_m, transition_step,
)
