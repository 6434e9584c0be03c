"""The five probabilistic diagnosis strategies and their comparison.

Each strategy answers "what is the most likely diagnosis?" under a
different reading of the question:

* single-fault: which one hypothesis, with all others normal, best
  explains the data (scored by the full interpretation's posterior);
* posterior: which individual hypothesis has the highest marginal;
* mpe: which total interpretation has the highest posterior;
* consistency: minimal fault sets consistent with the observations,
  scored by the marginal of their positive conjunction;
* abductive: minimal fault sets entailing the observations, scored the
  same way.

They can disagree on the same input; compare_strategies runs all of them
and flags every pair whose leaders differ once projected to fault sets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .decision import TreatmentDecision, optimal_treatment
from .errors import DiagnoscopeError
from .formulas import Atom, conjunction
from .logic import abductive_explanations, clark_completion, consistency_diagnoses
from .model import (
    Diagnosis,
    FaultModel,
    Interpretation,
    ObservationSet,
    TreatmentAction,
    UtilityModel,
)
from .probability import (
    DEFAULT_TIE_EPSILON,
    marginal,
    most_likely_interpretations,
    posterior_table,
)


class Strategy(str, enum.Enum):
    SINGLE_FAULT = "single-fault"
    POSTERIOR = "posterior"
    MPE = "mpe"
    CONSISTENCY = "consistency"
    ABDUCTIVE = "abductive"


@dataclass(frozen=True)
class Candidate:
    """One ranked answer: a fault set with its score; MPE candidates also
    carry the full interpretation and its table index."""

    fault_set: frozenset[str]
    score: float
    index: int | None = None
    interpretation: Interpretation | None = None

    def as_diagnosis(self) -> Diagnosis:
        return Diagnosis(self.fault_set, self.score)


@dataclass(frozen=True)
class RankedDiagnoses:
    strategy: Strategy
    candidates: tuple[Candidate, ...]
    ties: tuple[Candidate, ...]

    @property
    def leader(self) -> Candidate | None:
        return self.candidates[0] if self.candidates else None


@dataclass(frozen=True)
class StrategyReport:
    """Cross-strategy comparison: every ranking, every leader's fault set,
    per-strategy failures, and the pairs whose leaders disagree."""

    rankings: tuple[tuple[Strategy, RankedDiagnoses], ...]
    leaders: tuple[tuple[str, frozenset[str]], ...]
    failures: tuple[tuple[str, str], ...]
    disagreements: tuple[tuple[str, str], ...]
    agreement: bool
    treatment: TreatmentDecision | None = None


def _decl_key(model: FaultModel, fault_set: frozenset[str]) -> tuple[int, ...]:
    order = model.hypothesis_index
    return tuple(sorted(order[name] for name in fault_set))


def _ties(candidates: list[Candidate], tie_epsilon: float) -> tuple[Candidate, ...]:
    if not candidates:
        return ()
    top = candidates[0].score
    return tuple(c for c in candidates if c.score >= top - tie_epsilon)


def diagnose_single_fault(
    model: FaultModel,
    observations: ObservationSet,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> RankedDiagnoses:
    """Hypotheses whose exactly-one-fault interpretation is still possible,
    scored by that full interpretation's posterior. May be empty."""
    table = posterior_table(model, observations)
    count = len(model.hypotheses)
    candidates: list[Candidate] = []
    for k, hypothesis in enumerate(model.hypotheses):
        index = ((1 << count) - 1) ^ (1 << (count - 1 - k))
        entry = table.entries[index]
        if entry.posterior > 0.0:
            candidates.append(
                Candidate(frozenset({hypothesis.id}), entry.posterior)
            )
    candidates.sort(key=lambda c: (-c.score, _decl_key(model, c.fault_set)))
    return RankedDiagnoses(
        Strategy.SINGLE_FAULT, tuple(candidates), _ties(candidates, tie_epsilon)
    )


def diagnose_posterior(
    model: FaultModel,
    observations: ObservationSet,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> RankedDiagnoses:
    """Every hypothesis scored by its posterior marginal."""
    table = posterior_table(model, observations)
    candidates = [
        Candidate(frozenset({hypothesis.id}), marginal(table, Atom(hypothesis.id)))
        for hypothesis in model.hypotheses
    ]
    candidates.sort(key=lambda c: (-c.score, _decl_key(model, c.fault_set)))
    return RankedDiagnoses(
        Strategy.POSTERIOR, tuple(candidates), _ties(candidates, tie_epsilon)
    )


def diagnose_mpe(
    model: FaultModel,
    observations: ObservationSet,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> RankedDiagnoses:
    """All interpretations ranked by posterior; leaders per the tie rule."""
    table = posterior_table(model, observations)
    candidates = [
        Candidate(
            frozenset(entry.interpretation.true_ids()),
            entry.posterior,
            index=entry.index,
            interpretation=entry.interpretation,
        )
        for entry in sorted(table.entries, key=lambda e: (-e.posterior, e.index))
    ]
    tied = tuple(
        Candidate(
            frozenset(entry.interpretation.true_ids()),
            entry.posterior,
            index=entry.index,
            interpretation=entry.interpretation,
        )
        for entry in most_likely_interpretations(table, tie_epsilon)
    )
    return RankedDiagnoses(Strategy.MPE, tuple(candidates), tied)


def _scored_fault_sets(
    model: FaultModel,
    observations: ObservationSet,
    diagnoses: list[Diagnosis],
    tie_epsilon: float,
    strategy: Strategy,
) -> RankedDiagnoses:
    table = posterior_table(model, observations)
    order = model.hypothesis_index
    candidates = []
    for diagnosis in diagnoses:
        names = sorted(diagnosis.faulty, key=lambda n: order[n])
        score = marginal(table, conjunction([Atom(name) for name in names]))
        candidates.append(Candidate(diagnosis.faulty, score))
    candidates.sort(
        key=lambda c: (-c.score, len(c.fault_set), _decl_key(model, c.fault_set))
    )
    return RankedDiagnoses(strategy, tuple(candidates), _ties(candidates, tie_epsilon))


def diagnose_consistency(
    model: FaultModel,
    observations: ObservationSet,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> RankedDiagnoses:
    """Minimal consistent fault sets scored by the marginal of their
    positive conjunction (normal literals are not part of the scored
    formula)."""
    theory = clark_completion(model)
    diagnoses = consistency_diagnoses(theory, model, observations)
    return _scored_fault_sets(
        model, observations, diagnoses, tie_epsilon, Strategy.CONSISTENCY
    )


def diagnose_abductive(
    model: FaultModel,
    observations: ObservationSet,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> RankedDiagnoses:
    """Minimal explaining fault sets, scored as in diagnose_consistency."""
    theory = clark_completion(model)
    diagnoses = abductive_explanations(theory, model, observations)
    return _scored_fault_sets(
        model, observations, diagnoses, tie_epsilon, Strategy.ABDUCTIVE
    )


_RUNNERS = (
    (Strategy.SINGLE_FAULT, diagnose_single_fault),
    (Strategy.POSTERIOR, diagnose_posterior),
    (Strategy.MPE, diagnose_mpe),
    (Strategy.CONSISTENCY, diagnose_consistency),
    (Strategy.ABDUCTIVE, diagnose_abductive),
)

TREATMENT_LABEL = "treatment"


def compare_strategies(
    model: FaultModel,
    observations: ObservationSet,
    utility: UtilityModel | None = None,
    treatments: tuple[TreatmentAction, ...] = (),
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> StrategyReport:
    """Run every applicable strategy and flag leader disagreements.

    Leaders are compared as fault sets: MPE leaders project to their true
    hypotheses, the treatment decision (when a utility model is given)
    projects to the targets of the chosen treatments. Per-strategy errors
    become failure records, not exceptions.
    """
    rankings: list[tuple[Strategy, RankedDiagnoses]] = []
    leaders: list[tuple[str, frozenset[str]]] = []
    failures: list[tuple[str, str]] = []
    for strategy, runner in _RUNNERS:
        try:
            ranking = runner(model, observations, tie_epsilon)
        except DiagnoscopeError as exc:
            failures.append((strategy.value, str(exc)))
            continue
        rankings.append((strategy, ranking))
        if ranking.leader is not None:
            leaders.append((strategy.value, ranking.leader.fault_set))
    treatment = None
    if utility is not None:
        try:
            treatment = optimal_treatment(model, observations, utility, treatments)
            targets = {t.target for t in treatments if t.id in treatment.chosen}
            leaders.append((TREATMENT_LABEL, frozenset(targets)))
        except DiagnoscopeError as exc:
            failures.append((TREATMENT_LABEL, str(exc)))
    disagreements = tuple(
        (label_a, label_b)
        for i, (label_a, set_a) in enumerate(leaders)
        for label_b, set_b in leaders[i + 1 :]
        if set_a != set_b
    )
    return StrategyReport(
        rankings=tuple(rankings),
        leaders=tuple(leaders),
        failures=tuple(failures),
        disagreements=disagreements,
        agreement=not disagreements,
        treatment=treatment,
    )
