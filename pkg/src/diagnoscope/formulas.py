"""Propositional formula trees over named atoms.

Formulas are immutable and hashable. Evaluation is resolver-based: callers
supply the mapping from atom names to truth values, which lets the logic
layer substitute rule-defined observables transparently. Rendering emits
the same operator spellings the model language uses (``! & | -> <->``)
with minimal parentheses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable


class Formula:
    """Base class for formula nodes."""


@dataclass(frozen=True)
class Const(Formula):
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    operands: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    operands: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    antecedent: Formula
    consequent: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


def conjunction(operands: Iterable[Formula]) -> Formula:
    """n-ary conjunction; flattens nested conjunctions, empty input is TRUE."""
    flat: list[Formula] = []
    for op in operands:
        if isinstance(op, And):
            flat.extend(op.operands)
        else:
            flat.append(op)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disjunction(operands: Iterable[Formula]) -> Formula:
    """n-ary disjunction; flattens nested disjunctions, empty input is FALSE."""
    flat: list[Formula] = []
    for op in operands:
        if isinstance(op, Or):
            flat.extend(op.operands)
        else:
            flat.append(op)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def atom_names(formula: Formula) -> frozenset[str]:
    """All atom names occurring in the formula."""
    names: set[str] = set()
    stack = [formula]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            names.add(node.name)
        elif isinstance(node, Not):
            stack.append(node.operand)
        elif isinstance(node, (And, Or)):
            stack.extend(node.operands)
        elif isinstance(node, Implies):
            stack.append(node.antecedent)
            stack.append(node.consequent)
        elif isinstance(node, Iff):
            stack.append(node.left)
            stack.append(node.right)
    return frozenset(names)


def evaluate(formula: Formula, resolve: Callable[[str], bool]) -> bool:
    """Evaluate under ``resolve``, which maps atom names to truth values."""
    if isinstance(formula, Const):
        return formula.value
    if isinstance(formula, Atom):
        return resolve(formula.name)
    if isinstance(formula, Not):
        return not evaluate(formula.operand, resolve)
    if isinstance(formula, And):
        return all(evaluate(op, resolve) for op in formula.operands)
    if isinstance(formula, Or):
        return any(evaluate(op, resolve) for op in formula.operands)
    if isinstance(formula, Implies):
        return (not evaluate(formula.antecedent, resolve)) or evaluate(
            formula.consequent, resolve
        )
    if isinstance(formula, Iff):
        return evaluate(formula.left, resolve) == evaluate(formula.right, resolve)
    raise TypeError(f"not a formula: {formula!r}")


# Operator precedence, loosest first; atoms and constants bind tightest.
_PREC_IFF = 1
_PREC_IMPLIES = 2
_PREC_OR = 3
_PREC_AND = 4
_PREC_NOT = 5
_PREC_ATOM = 6


def render(formula: Formula) -> str:
    """Render in model-language syntax with minimal parentheses."""
    return _render(formula, 0)


def _render(formula: Formula, min_prec: int) -> str:
    if isinstance(formula, Const):
        return "true" if formula.value else "false"
    if isinstance(formula, Atom):
        return formula.name
    if isinstance(formula, Not):
        return "!" + _render(formula.operand, _PREC_NOT)
    if isinstance(formula, And):
        text = " & ".join(_render(op, _PREC_AND) for op in formula.operands)
        return _wrap(text, _PREC_AND, min_prec)
    if isinstance(formula, Or):
        text = " | ".join(_render(op, _PREC_OR) for op in formula.operands)
        return _wrap(text, _PREC_OR, min_prec)
    if isinstance(formula, Implies):
        # right-associative: antecedent needs strictly tighter binding
        text = (
            _render(formula.antecedent, _PREC_IMPLIES + 1)
            + " -> "
            + _render(formula.consequent, _PREC_IMPLIES)
        )
        return _wrap(text, _PREC_IMPLIES, min_prec)
    if isinstance(formula, Iff):
        text = (
            _render(formula.left, _PREC_IFF + 1)
            + " <-> "
            + _render(formula.right, _PREC_IFF)
        )
        return _wrap(text, _PREC_IFF, min_prec)
    raise TypeError(f"not a formula: {formula!r}")


def _wrap(text: str, prec: int, min_prec: int) -> str:
    return f"({text})" if prec < min_prec else text
