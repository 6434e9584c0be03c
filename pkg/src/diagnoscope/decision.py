"""Utility-based treatment selection over the posterior table.

Utility is state-based: the value of a treatment set depends on which
hypotheses are actually faulty, not on any diagnosis object. Expected
utility sums over posterior-table rows; the optimizer sweeps all 2^l
treatment subsets exhaustively. For purely additive utilities each
treatment also has a closed-form probability threshold above which
treating beats skipping.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import NoFiniteThresholdError, SearchSpaceError
from .model import (
    AdditiveEntry,
    FaultModel,
    Interpretation,
    ObservationSet,
    TreatmentAction,
    UtilityModel,
    ZERO_ENTRY,
)
from .probability import PosteriorTable, posterior_table

DEFAULT_TREATMENT_LIMIT = 20


@dataclass(frozen=True)
class TreatmentDecision:
    """The chosen treatment set, its expected utility, and (for additive
    utilities) each treatment's standalone contribution."""

    chosen: frozenset[str]
    expected_utility: float
    per_treatment_breakdown: dict[str, float] | None = None


def _entry_value(entry: AdditiveEntry, treating: bool, faulty: bool) -> float:
    if treating:
        return entry.treat_faulty if faulty else entry.treat_ok
    return entry.skip_faulty if faulty else entry.skip_ok


def state_utility(
    interpretation: Interpretation,
    selected: frozenset[str],
    utility: UtilityModel,
    treatments: tuple[TreatmentAction, ...],
) -> float:
    """Utility of choosing ``selected`` when ``interpretation`` is the truth."""
    total = 0.0
    for treatment in treatments:
        entry = utility.additive.get(treatment.id, ZERO_ENTRY)
        total += _entry_value(
            entry, treatment.id in selected, interpretation.value(treatment.target)
        )
    for joint in utility.joint_entries:
        if all(interpretation.value(name) == pol for name, pol in joint.when) and all(
            (tid in selected) == pol for tid, pol in joint.given
        ):
            total += joint.value
    return total


def expected_utility_over_table(
    table: PosteriorTable,
    utility: UtilityModel,
    treatments: tuple[TreatmentAction, ...],
    selected: frozenset[str],
) -> float:
    """Expectation of state_utility under an already-built posterior table."""
    return sum(
        entry.posterior * state_utility(entry.interpretation, selected, utility, treatments)
        for entry in table.entries
    )


def expected_utility(
    model: FaultModel,
    observations: ObservationSet,
    utility: UtilityModel,
    treatments: tuple[TreatmentAction, ...],
    selected: frozenset[str],
) -> float:
    """Expected utility of the treatment set ``selected`` given the observations."""
    table = posterior_table(model, observations)
    return expected_utility_over_table(table, utility, treatments, selected)


def optimal_treatment(
    model: FaultModel,
    observations: ObservationSet,
    utility: UtilityModel,
    treatments: tuple[TreatmentAction, ...],
    limit: int = DEFAULT_TREATMENT_LIMIT,
) -> TreatmentDecision:
    """Exhaustively maximize expected utility over all treatment subsets.

    Ties go to the smallest set, then lexicographically smallest ids.
    """
    if len(treatments) > limit:
        raise SearchSpaceError(
            f"treatment space too large: {len(treatments)} treatments exceed the cap of {limit}"
        )
    table = posterior_table(model, observations)
    ids = sorted(treatment.id for treatment in treatments)
    best_set: frozenset[str] = frozenset()
    best_utility = float("-inf")
    for size in range(len(ids) + 1):
        for combo in itertools.combinations(ids, size):
            selected = frozenset(combo)
            value = expected_utility_over_table(table, utility, treatments, selected)
            if value > best_utility:
                best_utility = value
                best_set = selected
    breakdown: dict[str, float] | None = None
    if not utility.joint_entries:
        breakdown = {}
        for treatment in treatments:
            entry = utility.additive.get(treatment.id, ZERO_ENTRY)
            treating = treatment.id in best_set
            faulty_prob = sum(
                e.posterior
                for e in table.entries
                if e.interpretation.value(treatment.target)
            )
            breakdown[treatment.id] = faulty_prob * _entry_value(
                entry, treating, True
            ) + (1.0 - faulty_prob) * _entry_value(entry, treating, False)
    return TreatmentDecision(best_set, best_utility, breakdown)


def additive_fix_threshold(entry: AdditiveEntry) -> float:
    """Fault probability above which treating beats skipping.

    Solves p*treat_faulty + (1-p)*treat_ok > p*skip_faulty + (1-p)*skip_ok
    for p. Raises NoFiniteThresholdError when the comparison has no
    crossing of that form inside [0, 1).
    """
    gain = (entry.treat_faulty - entry.skip_faulty) + (entry.skip_ok - entry.treat_ok)
    if gain == 0.0:
        diff = entry.treat_ok - entry.skip_ok
        if diff > 0:
            direction = "always-treat"
        elif diff < 0:
            direction = "never-treat"
        else:
            direction = "indifferent"
        raise NoFiniteThresholdError(
            f"no finite threshold: utility difference is constant ({direction})",
            direction,
        )
    if gain < 0.0:
        raise NoFiniteThresholdError(
            "no finite threshold: treating pays off only at low fault probability (reversed)",
            "reversed",
        )
    threshold = (entry.skip_ok - entry.treat_ok) / gain
    if threshold >= 1.0:
        raise NoFiniteThresholdError(
            "no finite threshold: treating is dominated (never treat)", "never-treat"
        )
    if threshold < 0.0:
        raise NoFiniteThresholdError(
            "no finite threshold: skipping is dominated (always treat)", "always-treat"
        )
    return threshold
