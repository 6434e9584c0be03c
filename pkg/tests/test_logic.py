from __future__ import annotations

import itertools
import random

import pytest

from diagnoscope.errors import (
    FreeObservableError,
    InconsistentScenarioError,
    NegativeObservationError,
    UnexplainableObservationError,
    UnknownAtomError,
)
from diagnoscope.formulas import TRUE, And, Atom, Not, Or
from diagnoscope.logic import (
    Scenario,
    abductive_explanations,
    clark_completion,
    consistency_diagnoses,
    evaluate_formula,
    maximal_scenarios,
    scenario_consistent,
    scenario_explains,
)
from diagnoscope.model import (
    CausalRule,
    FaultModel,
    Hypothesis,
    Interpretation,
    ObservableVar,
    ObservationSet,
    interpretation_at,
)

from .oracle import minimal_sets, random_model, ruled_observables, satisfying_fault_sets


def interp(model, **values: bool) -> Interpretation:
    return Interpretation(model.hypothesis_ids, tuple(values[n] for n in model.hypothesis_ids))


def test_completion_of_circuit4(circuit4):
    theory = clark_completion(circuit4)
    assert theory.definitions == {
        "E": Or((Atom("A"), And((Atom("B"), Atom("C"))), And((Atom("B"), Atom("D")))))
    }


def test_completion_single_rule_and_empty_body():
    model = FaultModel(
        hypotheses=(Hypothesis("A", 0.1),),
        observables=(ObservableVar("E"), ObservableVar("F")),
        rules=(CausalRule(("A",), "E"), CausalRule((), "F")),
    )
    theory = clark_completion(model)
    assert theory.definitions["E"] == Atom("A")
    assert theory.definitions["F"] == TRUE


def test_completion_emits_nothing_for_free_observables():
    model = FaultModel(
        hypotheses=(Hypothesis("A", 0.1),),
        observables=(ObservableVar("E"), ObservableVar("F", free=True)),
        rules=(CausalRule(("A",), "E"),),
    )
    assert "F" not in clark_completion(model).definitions


def test_evaluate_expands_observables(circuit4):
    theory = clark_completion(circuit4)
    assert evaluate_formula(theory, Atom("E"), interp(circuit4, A=True, B=False, C=False, D=False))
    assert not evaluate_formula(theory, Atom("E"), interp(circuit4, A=False, B=True, C=False, D=False))
    assert evaluate_formula(theory, TRUE, interpretation_at(circuit4, 5))


def test_evaluate_is_pure(circuit4):
    theory = clark_completion(circuit4)
    formula = Or((Atom("E"), Not(Atom("A"))))
    row = interpretation_at(circuit4, 11)
    assert evaluate_formula(theory, formula, row) == evaluate_formula(theory, formula, row)


def test_evaluate_errors(circuit4):
    theory = clark_completion(circuit4)
    row = interpretation_at(circuit4, 0)
    with pytest.raises(UnknownAtomError, match="unknown atom"):
        evaluate_formula(theory, Atom("Z"), row)
    free_model = FaultModel(
        hypotheses=circuit4.hypotheses,
        observables=circuit4.observables + (ObservableVar("F", free=True),),
        rules=circuit4.rules,
    )
    with pytest.raises(FreeObservableError):
        evaluate_formula(clark_completion(free_model), Atom("F"), row)


def test_scenario_consistent_cases(circuit4):
    theory = clark_completion(circuit4)
    observe = ObservationSet.of("E")
    assert scenario_consistent(theory, Scenario.of_faults("A"), observe)
    # with A and B both normal no extension produces current
    denial = Scenario((("A", False), ("B", False)))
    assert not scenario_consistent(theory, denial, observe)
    assert scenario_consistent(theory, Scenario(), ObservationSet())


def test_scenario_explains_cases(circuit4):
    theory = clark_completion(circuit4)
    assert scenario_explains(theory, Scenario.of_faults("A"), Atom("E"))
    assert not scenario_explains(theory, Scenario.of_faults("B"), Atom("E"))
    assert scenario_explains(theory, Scenario.of_faults("A"), TRUE)


def test_scenario_explains_rejects_inconsistent():
    model = FaultModel(
        hypotheses=(Hypothesis("A", 0.1), Hypothesis("B", 0.1)),
        observables=(ObservableVar("E"),),
        rules=(CausalRule(("A",), "E"),),
        extra_facts=(Not(And((Atom("A"), Atom("B")))),),
    )
    theory = clark_completion(model)
    with pytest.raises(InconsistentScenarioError, match="inconsistent scenario"):
        scenario_explains(theory, Scenario.of_faults("A", "B"), Atom("E"))
    # a self-contradictory scenario is inconsistent too
    with pytest.raises(InconsistentScenarioError):
        scenario_explains(theory, Scenario((("A", True), ("A", False))), Atom("E"))


def test_maximal_scenarios_counts(circuit4):
    theory = clark_completion(circuit4)
    unconstrained = maximal_scenarios(theory, circuit4)
    assert len(unconstrained) == 16
    assert all(len(s.asserted) == 4 for s in unconstrained)

    constrained_model = FaultModel(
        hypotheses=circuit4.hypotheses,
        observables=circuit4.observables,
        rules=circuit4.rules,
        extra_facts=(Not(And((Atom("A"), Atom("B")))),),
    )
    constrained = maximal_scenarios(clark_completion(constrained_model), constrained_model)
    assert len(constrained) == 12

    tiny = FaultModel(
        hypotheses=(Hypothesis("A", 0.3),),
        observables=(ObservableVar("E"),),
        rules=(CausalRule(("A",), "E"),),
    )
    assert len(maximal_scenarios(clark_completion(tiny), tiny)) == 2


def test_consistency_diagnoses_circuit4(circuit4, observe_current):
    theory = clark_completion(circuit4)
    result = consistency_diagnoses(theory, circuit4, observe_current)
    assert [sorted(d.faulty) for d in result] == [["A"], ["B", "C"], ["B", "D"]]
    assert all(d.probability is None for d in result)

    no_current = consistency_diagnoses(theory, circuit4, ObservationSet.of("!E"))
    assert [d.faulty for d in no_current] == [frozenset()]

    with pytest.raises(UnknownAtomError):
        consistency_diagnoses(theory, circuit4, ObservationSet.of("X"))


def test_consistency_unexplainable():
    model = FaultModel(
        hypotheses=(Hypothesis("A", 0.1),),
        observables=(ObservableVar("E"),),
        rules=(CausalRule(("A",), "E"),),
        extra_facts=(Not(Atom("A")),),
    )
    theory = clark_completion(model)
    with pytest.raises(UnexplainableObservationError, match="unexplainable"):
        consistency_diagnoses(theory, model, ObservationSet.of("E"))


def test_abductive_explanations_circuit4(circuit4, observe_current):
    theory = clark_completion(circuit4)
    result = abductive_explanations(theory, circuit4, observe_current)
    assert [sorted(d.faulty) for d in result] == [["A"], ["B", "C"], ["B", "D"]]

    with pytest.raises(NegativeObservationError, match="positive"):
        abductive_explanations(theory, circuit4, ObservationSet.of("!E"))


def test_abductive_single_rule_model():
    model = FaultModel(
        hypotheses=(Hypothesis("A", 0.2),),
        observables=(ObservableVar("E"),),
        rules=(CausalRule(("A",), "E"),),
    )
    theory = clark_completion(model)
    result = abductive_explanations(theory, model, ObservationSet.of("E"))
    assert [d.faulty for d in result] == [frozenset({"A"})]


def _all_small_monotone_models():
    """All models with <= 3 hypotheses, <= 2 observables, <= 3 rules
    (duplicate-free rule sets, no hard constraints)."""
    hyp_ids = ("H0", "H1", "H2")
    obs_ids = ("O0", "O1")
    bodies = []
    for size in range(len(hyp_ids) + 1):
        bodies.extend(itertools.combinations(hyp_ids, size))
    all_rules = [
        CausalRule(body, head) for body in bodies for head in obs_ids
    ]
    hypotheses = tuple(Hypothesis(name, 0.3) for name in hyp_ids)
    for count in range(1, 4):
        for rule_set in itertools.combinations(all_rules, count):
            ruled = {rule.head for rule in rule_set}
            observables = tuple(
                ObservableVar(name, free=name not in ruled) for name in obs_ids
            )
            yield FaultModel(hypotheses, observables, rule_set), sorted(ruled)


def test_monotone_equivalence_exhaustive():
    """With positive-conjunction rules and no hard constraints,
    consistency-based and abductive diagnoses coincide on positive
    observations, including the error case."""
    checked = 0
    for model, ruled in _all_small_monotone_models():
        theory = clark_completion(model)
        for k in range(1, len(ruled) + 1):
            for chosen in itertools.combinations(ruled, k):
                observations = ObservationSet.of(*chosen)
                try:
                    consistent = consistency_diagnoses(theory, model, observations)
                except UnexplainableObservationError:
                    with pytest.raises(UnexplainableObservationError):
                        abductive_explanations(theory, model, observations)
                    continue
                abduced = abductive_explanations(theory, model, observations)
                assert [d.faulty for d in consistent] == [d.faulty for d in abduced]
                checked += 1
    assert checked > 500


def test_diagnoses_are_subset_minimal():
    rng = random.Random(11)
    for _ in range(60):
        model = random_model(rng, max_hypotheses=4, max_rules=4, with_facts=True)
        theory = clark_completion(model)
        ruled = ruled_observables(model)
        if not ruled:
            continue
        observations = ObservationSet.of(rng.choice(ruled))
        for op in (consistency_diagnoses, abductive_explanations):
            try:
                result = op(theory, model, observations)
            except UnexplainableObservationError:
                continue
            returned = {d.faulty for d in result}
            for diag in result:
                for smaller_size in range(len(diag.faulty)):
                    for subset in itertools.combinations(diag.faulty, smaller_size):
                        assert frozenset(subset) not in returned


def test_consistency_matches_brute_force_oracle():
    rng = random.Random(23)
    for trial in range(80):
        model = random_model(
            rng,
            max_hypotheses=4 if trial < 60 else 8,
            max_rules=5,
            with_facts=True,
        )
        theory = clark_completion(model)
        ruled = ruled_observables(model)
        if not ruled:
            continue
        name = rng.choice(ruled)
        polarity = rng.random() < 0.8
        observations = ObservationSet(((name, polarity),))
        expected = minimal_sets(satisfying_fault_sets(model, observations.literals))
        try:
            result = consistency_diagnoses(theory, model, observations)
        except UnexplainableObservationError:
            assert expected == set()
            continue
        assert {d.faulty for d in result} == expected
        # ordering: cardinality first, then declaration order
        order = model.hypothesis_index
        keys = [
            (len(d.faulty), tuple(sorted(order[n] for n in d.faulty))) for d in result
        ]
        assert keys == sorted(keys)


def test_consistency_at_twelve_hypotheses():
    """Disjoint rule bodies make the minimal diagnoses the bodies themselves;
    checks the search (and its ordering) well above the worked-example size."""
    ids = tuple(f"G{k}" for k in range(12))
    bodies = (("G0",), ("G1", "G2"), ("G3", "G4", "G5"),
              ("G6", "G7", "G8", "G9"), ("G10", "G11"))
    model = FaultModel(
        hypotheses=tuple(Hypothesis(name, 0.1) for name in ids),
        observables=(ObservableVar("E"),),
        rules=tuple(CausalRule(body, "E") for body in bodies),
    )
    theory = clark_completion(model)
    result = consistency_diagnoses(theory, model, ObservationSet.of("E"))
    assert [sorted(d.faulty) for d in result] == [
        ["G0"], ["G1", "G2"], ["G10", "G11"],
        ["G3", "G4", "G5"], ["G6", "G7", "G8", "G9"],
    ]
    quiet = consistency_diagnoses(theory, model, ObservationSet.of("!E"))
    assert [d.faulty for d in quiet] == [frozenset()]


def test_logic_ops_are_deterministic(circuit4, observe_current):
    theory = clark_completion(circuit4)
    first = consistency_diagnoses(theory, circuit4, observe_current)
    second = consistency_diagnoses(theory, circuit4, observe_current)
    assert first == second
    assert maximal_scenarios(theory, circuit4) == maximal_scenarios(theory, circuit4)
