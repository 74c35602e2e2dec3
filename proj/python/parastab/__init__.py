"""Moreau-Yosida penalized parabolic obstacle problems in 1D with
oblique-projection feedback stabilization."""

from parastab._core import (
    Bc,
    BoundReport,
    DecayFit,
    DivergenceError,
    FeedbackOperator,
    Field,
    Mesh,
    ProblemData,
    Scenario,
    SingularGramError,
    SubspacePair,
    TimeSeries,
    Window,
    __version__,
    build_feedback,
    build_mesh,
    build_pair,
    estimate_beta_Mplus,
    fit_decay,
    integral,
    l2_inner,
    l2_norm,
    make_actuators,
    make_eigenbasis,
    nonlinearity,
    penalty,
    run_coupled,
    run_scenario,
    run_uncontrolled,
    sample,
    scenario_default,
    scenario_nonsmooth,
    sufficiency_margins,
)

__all__ = [
    "Bc",
    "BoundReport",
    "DecayFit",
    "DivergenceError",
    "FeedbackOperator",
    "Field",
    "Mesh",
    "ProblemData",
    "Scenario",
    "SingularGramError",
    "SubspacePair",
    "TimeSeries",
    "Window",
    "__version__",
    "build_feedback",
    "build_mesh",
    "build_pair",
    "estimate_beta_Mplus",
    "fit_decay",
    "integral",
    "l2_inner",
    "l2_norm",
    "make_actuators",
    "make_eigenbasis",
    "nonlinearity",
    "penalty",
    "run_coupled",
    "run_scenario",
    "run_uncontrolled",
    "sample",
    "scenario_default",
    "scenario_nonsmooth",
    "sufficiency_margins",
]
