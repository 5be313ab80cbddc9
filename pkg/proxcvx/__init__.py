from .catalog import Box, FunctionSpec, GridSpec, Piece, builtin, builtin_names, evaluate, sample_grid
from .schema import spec_from_dict, spec_from_json, spec_to_dict, spec_to_json
from .prox_core import ProxQuery, ProxResult, SolverConfig, check_pr2, minimize, moreau, moreau_gradient, objective, prox
from .certify import (
    AlphaCertificate, AlphaInterval, alpha_interval, check_alpha, check_envelope_minimality,
    check_firm_nonexpansive, sample_pairs, scaling_consistency,
)
from .subdiff import charmin_check, in_subdiff, strong_qcx_consequence, strongly_G_check
from .diagnostics import (
    coercivity_probe, estimate_strong_qcx_modulus, identity_selftest, lattice_triples, quasiconvexity_probe,
    random_triples,
)
from .ppa import PPAConfig, PPATrace, ProximalPointMethod, check_fejer, check_monotone, run
from .state import Attainment, CertificateStatus, Closure, Coercivity, Multiplicity, PieceKind, QcxKind, StepMode, StopReason, SubdiffKind
from .error import (
    ProxCvxError, CatalogError, UnknownFunctionError, InvalidParameterError, ProxError, EmptyFeasibleSetError,
    NonseparableError, DivergentProxError, MultivaluedProxError, InfeasiblePointError, DimensionMismatchError, ConfigError,
)
from .writer import TraceWriter, WitnessWriter

__all__ = [
    'Box',
    'FunctionSpec',
    'GridSpec',
    'Piece',
    'builtin',
    'builtin_names',
    'evaluate',
    'sample_grid',
    'spec_from_dict',
    'spec_from_json',
    'spec_to_dict',
    'spec_to_json',
    'ProxQuery',
    'ProxResult',
    'SolverConfig',
    'check_pr2',
    'minimize',
    'moreau',
    'moreau_gradient',
    'objective',
    'prox',
    'AlphaCertificate',
    'AlphaInterval',
    'alpha_interval',
    'check_alpha',
    'check_envelope_minimality',
    'check_firm_nonexpansive',
    'sample_pairs',
    'scaling_consistency',
    'charmin_check',
    'in_subdiff',
    'strong_qcx_consequence',
    'strongly_G_check',
    'coercivity_probe',
    'estimate_strong_qcx_modulus',
    'identity_selftest',
    'lattice_triples',
    'quasiconvexity_probe',
    'random_triples',
    'PPAConfig',
    'PPATrace',
    'ProximalPointMethod',
    'check_fejer',
    'check_monotone',
    'run',
    'Attainment',
    'CertificateStatus',
    'Closure',
    'Coercivity',
    'Multiplicity',
    'PieceKind',
    'QcxKind',
    'StepMode',
    'StopReason',
    'SubdiffKind',
    'ProxCvxError',
    'CatalogError',
    'UnknownFunctionError',
    'InvalidParameterError',
    'ProxError',
    'EmptyFeasibleSetError',
    'NonseparableError',
    'DivergentProxError',
    'MultivaluedProxError',
    'InfeasiblePointError',
    'DimensionMismatchError',
    'ConfigError',
    'TraceWriter',
    'WitnessWriter',
]

__version__ = '0.1.0'
