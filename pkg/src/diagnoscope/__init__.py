"""Propositional fault diagnosis toolkit.

Builds exact posterior tables over fault interpretations by enumeration,
ranks diagnoses under five competing strategies (single-fault, posterior
marginal, most likely interpretation, consistency-based, abductive), and
selects treatment sets by expected utility. Models are described either
through the Python API or the line-oriented ``.fdl`` language exposed by
the ``diagnoscope`` command.
"""

from .decision import (
    TreatmentDecision,
    additive_fix_threshold,
    expected_utility,
    expected_utility_over_table,
    optimal_treatment,
    state_utility,
)
from .dsl import (
    ParsedBundle,
    ParseError,
    SourceSpan,
    parse_model_file,
    serialize_bundle,
)
from .errors import (
    DiagnoscopeError,
    FreeObservableError,
    InconsistentScenarioError,
    NegativeObservationError,
    NoFiniteThresholdError,
    SearchSpaceError,
    UnexplainableObservationError,
    UnknownAtomError,
    ZeroProbabilityObservationError,
)
from .formulas import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    conjunction,
    disjunction,
)
from .logic import (
    CompletedTheory,
    Scenario,
    abductive_explanations,
    clark_completion,
    consistency_diagnoses,
    evaluate_formula,
    maximal_scenarios,
    scenario_consistent,
    scenario_explains,
)
from .model import (
    AdditiveEntry,
    CausalRule,
    Diagnosis,
    FaultModel,
    Hypothesis,
    Interpretation,
    JointEntry,
    ObservableVar,
    ObservationSet,
    TreatmentAction,
    UtilityModel,
    ValidationFinding,
    enumerate_interpretations,
    index_of_assignment,
    interpretation_at,
    validate_model,
)
from .probability import (
    PosteriorTable,
    TableEntry,
    covering_mass_set,
    joint_prior,
    marginal,
    most_likely_interpretations,
    posterior_table,
)
from .strategies import (
    Candidate,
    RankedDiagnoses,
    Strategy,
    StrategyReport,
    compare_strategies,
    diagnose_abductive,
    diagnose_consistency,
    diagnose_mpe,
    diagnose_posterior,
    diagnose_single_fault,
)

__version__ = "0.1.0"

__all__ = [
    "AdditiveEntry",
    "And",
    "Atom",
    "Candidate",
    "CausalRule",
    "CompletedTheory",
    "Const",
    "Diagnosis",
    "DiagnoscopeError",
    "FALSE",
    "FaultModel",
    "Formula",
    "FreeObservableError",
    "Hypothesis",
    "Iff",
    "Implies",
    "InconsistentScenarioError",
    "Interpretation",
    "JointEntry",
    "NegativeObservationError",
    "NoFiniteThresholdError",
    "Not",
    "ObservableVar",
    "ObservationSet",
    "Or",
    "ParseError",
    "ParsedBundle",
    "PosteriorTable",
    "RankedDiagnoses",
    "Scenario",
    "SearchSpaceError",
    "SourceSpan",
    "Strategy",
    "StrategyReport",
    "TRUE",
    "TableEntry",
    "TreatmentAction",
    "TreatmentDecision",
    "UnexplainableObservationError",
    "UnknownAtomError",
    "UtilityModel",
    "ValidationFinding",
    "ZeroProbabilityObservationError",
    "abductive_explanations",
    "additive_fix_threshold",
    "clark_completion",
    "compare_strategies",
    "conjunction",
    "consistency_diagnoses",
    "covering_mass_set",
    "diagnose_abductive",
    "diagnose_consistency",
    "diagnose_mpe",
    "diagnose_posterior",
    "diagnose_single_fault",
    "disjunction",
    "enumerate_interpretations",
    "evaluate_formula",
    "expected_utility",
    "expected_utility_over_table",
    "index_of_assignment",
    "interpretation_at",
    "joint_prior",
    "marginal",
    "maximal_scenarios",
    "most_likely_interpretations",
    "optimal_treatment",
    "parse_model_file",
    "posterior_table",
    "scenario_consistent",
    "scenario_explains",
    "serialize_bundle",
    "state_utility",
    "validate_model",
]
