"""Finite pregeometry toolkit.

Matroids behind rank/closure oracles, inclusion-exclusion flatness
verdicts, ping-pong sequence search, formula-closure fixpoints over
staged structures, a stage-faithful recursive-copy simulator, and the
spectrum-shape rule engine.  See the README for the CLI.
"""

from .errors import FlatgeomError
from .matroid import (
    Circuit,
    Flat,
    GroundSet,
    Matroid,
    closure_table_matroid,
    free_matroid,
    linear_matroid,
    sparse_paving_matroid,
    uniform_matroid,
)
from .flatness import FlatCollection, FlatnessVerdict, check_flat, delta, is_disintegrated
from .pingpong import (
    PPSConfig,
    PPSRun,
    PPSSequence,
    pps_candidates,
    pps_find_cycle,
    pps_run,
    pps_verify,
)
from .formula_closure import (
    EnumeratedStructure,
    GeometricStructure,
    acl_enumerate_via_lambda,
    ild_estimate,
    lambda_closure,
    lambda_step,
    psi_witness_check,
)
from .effective import (
    Delta2Schedule,
    Sigma1Schedule,
    StagewisePresentation,
    delta2_acl_schedule,
    going_down_run,
    trace_verify,
)
from .spectrum import (
    SpectrumSet,
    TheoryProfile,
    Verdict,
    classify,
    enumerate_case_analysis,
    validate_profile,
)

__version__ = "0.1.0"
