"""Locally correctable and locally testable codes at desk scale.

Component codes (Reed-Solomon, multiplicity, tensor), bipartite sampler
graphs, the distance-amplification transform with its local corrector and
tester, binary concatenation, instrumented oracles, and brute-force ground
truth for verification.
"""

from .amplifier import AmplifiedCode, AmplifierParams, RsFallbackCode, build_amplified, derive_parameters
from .api import (
    Alphabet,
    ConstructionFailure,
    CorrectFailure,
    CorruptionChannel,
    LocalCode,
    QueryCountingOracle,
    TrialReport,
    as_local_decoder,
    run_correction_trials,
    run_test_trials,
)
from .concat import BinaryBlockCode, ConcatenatedCode, build_inner_greedy
from .exhaustive import EnumeratedCode, exact_rejection_probability
from .gf import BinaryField, FieldElement, FieldMismatchError, Poly
from .multiplicity import MultiplicityCode
from .rs import ReedSolomonCode, generalized_berlekamp_welch
from .sampler import (
    CertReport,
    SamplerGraph,
    SamplerParams,
    build_complete,
    build_explicit,
    build_seeded_random,
)
from .schedule import check_schedules
from .tensor import TensorCode

__all__ = [
    "AmplifiedCode",
    "AmplifierParams",
    "Alphabet",
    "BinaryBlockCode",
    "BinaryField",
    "CertReport",
    "ConcatenatedCode",
    "ConstructionFailure",
    "CorrectFailure",
    "CorruptionChannel",
    "EnumeratedCode",
    "FieldElement",
    "FieldMismatchError",
    "LocalCode",
    "MultiplicityCode",
    "Poly",
    "QueryCountingOracle",
    "ReedSolomonCode",
    "RsFallbackCode",
    "SamplerGraph",
    "SamplerParams",
    "TensorCode",
    "TrialReport",
    "as_local_decoder",
    "build_amplified",
    "build_complete",
    "build_explicit",
    "build_inner_greedy",
    "build_seeded_random",
    "check_schedules",
    "derive_parameters",
    "exact_rejection_probability",
    "generalized_berlekamp_welch",
    "run_correction_trials",
    "run_test_trials",
]

__version__ = "0.1.0"
