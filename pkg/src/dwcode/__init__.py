"""Domain-wall colour codes: lattices, deformations, decoders and threshold tools.

Typical use::

    from dwcode import make_code, NoiseChannel, RestrictionDecoder
    code = make_code("x3z3", d=5)
    dec = RestrictionDecoder(code, NoiseChannel(0.1, 10))
"""
from __future__ import annotations

__version__ = "0.1.0"

from .pauli import PauliOperator, BinaryMatrix, gf2_rank, gf2_solve, kernel_basis
from .lattice import (
    Color,
    LatticeKind,
    BoundaryKind,
    BoundarySpec,
    LatticeSpec,
    Lattice,
    build_hex_triangular,
    build_hex_periodic,
    build_hex_coprime,
    build_488_triangular,
    build_square_surface,
    build_lattice,
)
from .noise import NoiseChannel, channel_probs, parse_eta, sample_errors, effective_permuted_channel
from .code import (
    BudgetError,
    DeformationSpec,
    StabilizerCode,
    make_code,
    make_deformation,
    apply_deformation,
    measure_kappa,
    count_short_pure_logicals,
    min_weight_pure_logical,
    verify_distance,
)
from .exact import MalformedSyndromeError, Syndrome, DecodeResult, MLDecoder, ml_decode, exact_logical_rate, syndrome_of
from .matching import SyndromeGraph, Matching, mwpm, brute_force_mwpm, NoPerfectMatchingError
from .decoders import SyndromeMismatchError
from .restriction import RestrictionDecoder, build_restricted_graphs, restriction_decode
from .infinite_bias import InfiniteBiasDecoder, DomainDecoder, infinite_bias_decode
from .surface import SurfaceMatchingDecoder, surface_matching_decode
from .experiment import SweepConfig, TrialStatistics, PointStats, run_sweep, run_trial, wilson_interval
from .analysis import fit_threshold, fit_subthreshold, hashing_bound, ThresholdEstimate, ScalingFit

__all__ = [name for name in dir() if not name.startswith("_")]
