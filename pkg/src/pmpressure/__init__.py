"""Certified thermodynamic-formalism toolkit for the intermittent interval
map family f(x) = x(1 + x^alpha) mod 1.

Everything user-facing re-exported here: map geometry (`map_kernel`),
the potential expression algebra (`potentials`), certified pressure
brackets (`pressure`), phase classification and transition diagnostics
(`phases`), tail estimates (`tails`), the canned validation scenarios
(`benchbook`), and the `pmpress` command line (`cli`).
"""
from .benchbook import CheckResult, all_passed, report_json, run_all, run_scenario
from .map_kernel import (
    Cylinder,
    MapParams,
    NeutralOrbit,
    PartitionDepthError,
    ReturnPartition,
    branch_point,
    cylinder_endpoints,
    cylinder_for,
    cylinders,
    deriv,
    eval_map,
    first_return,
    inv_left,
    inv_right,
    make_params,
    neutral_orbit,
    preimages,
    return_partition,
    return_time,
)
from .phases import (
    INTERMITTENT,
    STATIONARY,
    UNDETERMINED,
    DecayFit,
    DimensionBracket,
    DistortionConstants,
    GroundStateReport,
    PhaseVerdict,
    TransitionBracket,
    boundary_tau,
    classify,
    ct_bracket,
    decay_fit,
    distortion_constants,
    ground_state_check,
    hausdorff_subsystem,
    kernel_projection,
    z1_criterion,
)
from .potentials import (
    ZERO,
    Const,
    HolderData,
    NegLogDf,
    Omega,
    Potential,
    Tabulated,
    birkhoff,
    eval_potential,
    holder_data,
    load_table,
    parse_potential,
    print_potential,
    zeta_n,
    zeta_sequence,
)
from .pressure import (
    BracketInconsistencyError,
    InducedLetters,
    PressureBracket,
    WordTree,
    induced_series,
    pressure,
    pressure_cylinder,
    pressure_induced,
    pressure_preimage,
)
from .tails import NeutralTailBounds, neutral_tail_bounds

__all__ = [n for n in dir() if not n.startswith("_")]
__version__ = "0.1.0"
