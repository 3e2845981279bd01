"""Regional TEC map reconstruction from sparse GNSS measurements.

Dense maps are recovered from scattered point values by a weighted-l1,
gradient-regularized compressive-sensing program in the 2D-DCT domain;
an ordinary-Kriging baseline and a seeded evaluation harness round out
the toolkit.  See the `tecmap` CLI for the file-based pipeline.
"""

from .exceptions import (
    DegenerateInputError,
    DimensionError,
    FitError,
    NoObservationsError,
    OutOfRegionError,
    ParameterError,
    ParseError,
    TecMapError,
    ValidationError,
)
from .grid import DEFAULT_GRID, Grid, TecMap, devectorize, nearest_grid_index, vectorize
from .dct import SpectralCoeffs, dct2_forward, dct2_inverse, sparsity_level
from .synthetic import SyntheticKind, synth_map, synthetic_sparsity_table
from .sensing import ObservationSet, Station, build_observation_set
from .solver import ReconstructionResult, SolverParams, reconstruct
from .kriging import (
    KrigingParams,
    ScatteredObs,
    SemivariogramModel,
    kriging_predict,
)
from .evaluation import (
    cross_check,
    default_station_network,
    normalized_error_energy,
    station_measurements,
    sweep_observation_count,
)

__all__ = [
    "DEFAULT_GRID",
    "Grid",
    "TecMap",
    "SpectralCoeffs",
    "vectorize",
    "devectorize",
    "nearest_grid_index",
    "dct2_forward",
    "dct2_inverse",
    "sparsity_level",
    "SyntheticKind",
    "synth_map",
    "synthetic_sparsity_table",
    "Station",
    "ObservationSet",
    "build_observation_set",
    "SolverParams",
    "ReconstructionResult",
    "reconstruct",
    "KrigingParams",
    "ScatteredObs",
    "SemivariogramModel",
    "kriging_predict",
    "default_station_network",
    "station_measurements",
    "normalized_error_energy",
    "sweep_observation_count",
    "cross_check",
    "TecMapError",
    "ParameterError",
    "DimensionError",
    "OutOfRegionError",
    "DegenerateInputError",
    "NoObservationsError",
    "FitError",
    "ParseError",
    "ValidationError",
]
