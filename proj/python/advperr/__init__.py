"""Adversarial perception errors for a deterministic driving simulator.

Thin python wrapper around the C++ core: scenario loading, closed-loop
rollouts, perception metrics, the probabilistic error model, and the attack
search algorithms.
"""

import os as _os

_pkg_scenarios = _os.path.join(_os.path.dirname(__file__), "scenarios")
if _os.path.isdir(_pkg_scenarios) and "ADVPERR_SCENARIO_DIR" not in _os.environ:
    _os.environ["ADVPERR_SCENARIO_DIR"] = _pkg_scenarios

from ._core import (  # noqa: E402
    AgentError,
    AgentState,
    Detection,
    ErrorSequence,
    GroundTruthSequence,
    PemModel,
    PerceivedSequence,
    Rollout,
    Scenario,
    Vec2,
    apply_errors,
    bundled_scenarios,
    cli_main,
    default_pem,
    full_drop_error,
    generate_ground_truth,
    heuristic_search,
    load_error_sequence,
    load_pem_model,
    load_scenario,
    metric_report,
    nds,
    nds_t,
    pem_log_likelihood,
    random_search,
    robustness_probe,
    rollout,
    sample_errors,
    save_error_sequence,
    scenario_hash,
    segment_drop_error,
)

__all__ = [
    "AgentError",
    "AgentState",
    "Detection",
    "ErrorSequence",
    "GroundTruthSequence",
    "PemModel",
    "PerceivedSequence",
    "Rollout",
    "Scenario",
    "Vec2",
    "apply_errors",
    "bundled_scenarios",
    "cli_main",
    "default_pem",
    "full_drop_error",
    "generate_ground_truth",
    "heuristic_search",
    "load_error_sequence",
    "load_pem_model",
    "load_scenario",
    "metric_report",
    "nds",
    "nds_t",
    "pem_log_likelihood",
    "random_search",
    "robustness_probe",
    "rollout",
    "sample_errors",
    "save_error_sequence",
    "scenario_hash",
    "segment_drop_error",
]
