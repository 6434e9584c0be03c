"""Line-oriented model description language (.fdl): parser and serializer.

Statement forms, one per line (``#`` starts a comment, blank lines are
ignored):

    hypothesis <id> prior <decimal>
    observable <id> [free]
    rule <id> (& <id>)* => <observable-id>        # empty body: rule true => <id>
    fact <formula>                                # operators: ! & | -> <->
    observe [!]<observable-id>
    treatment <id> targets <hypothesis-id>
    utility <treatment-id> treat-faulty <v> treat-ok <v> skip-faulty <v> skip-ok <v>
    utility joint when <lit> (& <lit>)* given <lit> (& <lit>)* value <v>

Joint-utility literals accept ``!`` on hypothesis ids (fault absent) and on
treatment ids (treatment not chosen). Identifiers may contain internal
hyphens (``treat-faulty`` is one token); ``true`` and ``false`` are
reserved. Parsing stops at the first syntax error; semantic problems
(priors out of range, unknown ids, contradictory observations, ...) are
collected as validation findings on the parsed bundle instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DiagnoscopeError
from .formulas import (
    FALSE,
    TRUE,
    Atom,
    Formula,
    Iff,
    Implies,
    Not,
    conjunction,
    disjunction,
    render,
)
from .model import (
    AdditiveEntry,
    CausalRule,
    FaultModel,
    Hypothesis,
    JointEntry,
    ObservableVar,
    ObservationSet,
    RESERVED_WORDS,
    TreatmentAction,
    UtilityModel,
    ValidationFinding,
    validate_decision_inputs,
    validate_model,
    validate_observations,
)

_STATEMENT_KEYWORDS = (
    "hypothesis",
    "observable",
    "rule",
    "fact",
    "observe",
    "treatment",
    "utility",
)

_ADDITIVE_LABELS = ("treat-faulty", "treat-ok", "skip-faulty", "skip-ok")


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of a token in the source text."""

    line: int
    column: int
    length: int


class ParseError(DiagnoscopeError):
    """First syntax error found; parsing does not continue past it."""

    def __init__(self, span: SourceSpan, message: str, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.span = span
        self.message = message
        self.expected = tuple(expected)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "number", or the punctuation text itself
    text: str
    span: SourceSpan


def _tokenize_line(text: str, line_no: int) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "#":
            break
        if ch.isspace():
            i += 1
            continue
        start = i
        matched_multi = None
        for punct in ("<->", "->", "=>"):
            if text.startswith(punct, i):
                matched_multi = punct
                break
        if matched_multi is not None:
            tokens.append(
                Token(matched_multi, matched_multi, SourceSpan(line_no, start + 1, len(matched_multi)))
            )
            i += len(matched_multi)
            continue
        if ch.isdigit() or (ch in "+-" and i + 1 < n and text[i + 1].isdigit()):
            i += 1
            while i < n and text[i].isdigit():
                i += 1
            if i < n and text[i] == "." and i + 1 < n and text[i + 1].isdigit():
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
            tokens.append(
                Token("number", text[start:i], SourceSpan(line_no, start + 1, i - start))
            )
            continue
        if ch.isalpha() or ch == "_":
            i += 1
            while i < n:
                if text[i].isalnum() or text[i] == "_":
                    i += 1
                elif text[i] == "-" and i + 1 < n and text[i + 1].isalpha():
                    i += 2
                else:
                    break
            tokens.append(
                Token("ident", text[start:i], SourceSpan(line_no, start + 1, i - start))
            )
            continue
        if ch in "()!&|":
            tokens.append(Token(ch, ch, SourceSpan(line_no, start + 1, 1)))
            i += 1
            continue
        raise ParseError(
            SourceSpan(line_no, start + 1, 1), f"unexpected character {ch!r}"
        )
    return tokens


class _Cursor:
    """Token stream over one line; errors point at the offending token, or
    at the last token when the line ends too early."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def _end_span(self) -> SourceSpan:
        return self.tokens[-1].span

    def fail(self, what: str, expected: tuple[str, ...]) -> ParseError:
        token = self.peek()
        if token is None:
            return ParseError(
                self._end_span(), f"unexpected end of line, expected {what}", expected
            )
        return ParseError(
            token.span, f"expected {what}, found '{token.text}'", expected
        )

    def expect_ident(self, what: str = "identifier") -> Token:
        token = self.peek()
        if token is None or token.kind != "ident":
            raise self.fail(what, (what,))
        return self.advance()

    def expect_name(self, what: str) -> Token:
        token = self.expect_ident(what)
        if token.text in RESERVED_WORDS:
            raise ParseError(
                token.span, f"reserved word '{token.text}' cannot be used as {what}", (what,)
            )
        return token

    def expect_keyword(self, keyword: str) -> Token:
        token = self.peek()
        if token is None or token.kind != "ident" or token.text != keyword:
            raise self.fail(f"'{keyword}'", (keyword,))
        return self.advance()

    def expect_number(self, what: str = "decimal value") -> float:
        token = self.peek()
        if token is None or token.kind != "number":
            raise self.fail(what, (what,))
        self.advance()
        return float(token.text)

    def expect_punct(self, punct: str) -> Token:
        token = self.peek()
        if token is None or token.kind != punct:
            raise self.fail(f"'{punct}'", (punct,))
        return self.advance()

    def expect_end(self) -> None:
        token = self.peek()
        if token is not None:
            raise ParseError(
                token.span,
                f"unexpected token '{token.text}' after statement",
                ("end of line",),
            )


@dataclass
class Document:
    """Raw parse result of one source text, before cross-reference checks."""

    hypotheses: list[Hypothesis] = field(default_factory=list)
    observables: list[ObservableVar] = field(default_factory=list)
    rules: list[CausalRule] = field(default_factory=list)
    facts: list[Formula] = field(default_factory=list)
    observations: list[tuple[str, bool]] = field(default_factory=list)
    has_observations: bool = False
    treatments: list[TreatmentAction] = field(default_factory=list)
    additive: list[tuple[str, AdditiveEntry]] = field(default_factory=list)
    joints: list[JointEntry] = field(default_factory=list)


@dataclass(frozen=True)
class ParsedBundle:
    """A validated model bundle; ``findings`` is empty when everything checks out."""

    model: FaultModel
    observations: ObservationSet | None
    utility: UtilityModel | None
    treatments: tuple[TreatmentAction, ...]
    findings: tuple[ValidationFinding, ...]


def parse_document(text: str) -> Document:
    """Parse one source text; raises ParseError at the first syntax error."""
    doc = Document()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokenize_line(raw, line_no)
        if not tokens:
            continue
        head = tokens[0]
        if head.kind != "ident" or head.text not in _STATEMENT_KEYWORDS:
            raise ParseError(
                head.span, f"unknown keyword '{head.text}'", _STATEMENT_KEYWORDS
            )
        cursor = _Cursor(tokens)
        cursor.advance()
        _STATEMENT_PARSERS[head.text](cursor, doc)
    return doc


def _parse_hypothesis(cursor: _Cursor, doc: Document) -> None:
    name = cursor.expect_name("hypothesis identifier")
    cursor.expect_keyword("prior")
    prior = cursor.expect_number("prior probability")
    cursor.expect_end()
    doc.hypotheses.append(Hypothesis(name.text, prior))


def _parse_observable(cursor: _Cursor, doc: Document) -> None:
    name = cursor.expect_name("observable identifier")
    free = False
    if not cursor.at_end():
        cursor.expect_keyword("free")
        free = True
        cursor.expect_end()
    doc.observables.append(ObservableVar(name.text, free))


def _parse_rule(cursor: _Cursor, doc: Document) -> None:
    body: list[str] = []
    token = cursor.peek()
    if token is not None and token.kind == "ident" and token.text == "true":
        cursor.advance()
    else:
        body.append(cursor.expect_name("hypothesis identifier").text)
        while not cursor.at_end() and cursor.peek().kind == "&":
            amp = cursor.advance()
            nxt = cursor.peek()
            if nxt is None or nxt.kind != "ident" or nxt.text in RESERVED_WORDS:
                raise ParseError(
                    amp.span, "dangling '&' in rule body", ("hypothesis identifier",)
                )
            body.append(cursor.advance().text)
    cursor.expect_punct("=>")
    head = cursor.expect_name("observable identifier")
    cursor.expect_end()
    doc.rules.append(CausalRule(tuple(body), head.text))


def _parse_fact(cursor: _Cursor, doc: Document) -> None:
    formula = _parse_formula(cursor)
    cursor.expect_end()
    doc.facts.append(formula)


def _parse_observe(cursor: _Cursor, doc: Document) -> None:
    polarity = True
    if not cursor.at_end() and cursor.peek().kind == "!":
        cursor.advance()
        polarity = False
    name = cursor.expect_name("observable identifier")
    cursor.expect_end()
    doc.observations.append((name.text, polarity))
    doc.has_observations = True


def _parse_treatment(cursor: _Cursor, doc: Document) -> None:
    name = cursor.expect_name("treatment identifier")
    cursor.expect_keyword("targets")
    target = cursor.expect_name("hypothesis identifier")
    cursor.expect_end()
    doc.treatments.append(TreatmentAction(name.text, target.text))


def _parse_literal_list(cursor: _Cursor, what: str) -> tuple[tuple[str, bool], ...]:
    literals: list[tuple[str, bool]] = []
    while True:
        polarity = True
        if not cursor.at_end() and cursor.peek().kind == "!":
            cursor.advance()
            polarity = False
        name = cursor.expect_name(what)
        literals.append((name.text, polarity))
        if cursor.at_end() or cursor.peek().kind != "&":
            break
        cursor.advance()
    return tuple(literals)


def _parse_utility(cursor: _Cursor, doc: Document) -> None:
    token = cursor.peek()
    if token is not None and token.kind == "ident" and token.text == "joint":
        cursor.advance()
        cursor.expect_keyword("when")
        when = _parse_literal_list(cursor, "hypothesis literal")
        cursor.expect_keyword("given")
        given = _parse_literal_list(cursor, "treatment literal")
        cursor.expect_keyword("value")
        value = cursor.expect_number("utility value")
        cursor.expect_end()
        doc.joints.append(JointEntry(when, given, value))
        return
    name = cursor.expect_name("treatment identifier")
    values: list[float] = []
    for label in _ADDITIVE_LABELS:
        cursor.expect_keyword(label)
        values.append(cursor.expect_number("utility value"))
    cursor.expect_end()
    doc.additive.append((name.text, AdditiveEntry(*values)))


_STATEMENT_PARSERS = {
    "hypothesis": _parse_hypothesis,
    "observable": _parse_observable,
    "rule": _parse_rule,
    "fact": _parse_fact,
    "observe": _parse_observe,
    "treatment": _parse_treatment,
    "utility": _parse_utility,
}


def _parse_formula(cursor: _Cursor) -> Formula:
    return _parse_iff(cursor)


def _parse_iff(cursor: _Cursor) -> Formula:
    left = _parse_implies(cursor)
    token = cursor.peek()
    if token is not None and token.kind == "<->":
        cursor.advance()
        return Iff(left, _parse_iff(cursor))
    return left


def _parse_implies(cursor: _Cursor) -> Formula:
    left = _parse_or(cursor)
    token = cursor.peek()
    if token is not None and token.kind == "->":
        cursor.advance()
        return Implies(left, _parse_implies(cursor))
    return left


def _parse_or(cursor: _Cursor) -> Formula:
    items = [_parse_and(cursor)]
    while not cursor.at_end() and cursor.peek().kind == "|":
        cursor.advance()
        items.append(_parse_and(cursor))
    return disjunction(items)


def _parse_and(cursor: _Cursor) -> Formula:
    items = [_parse_unary(cursor)]
    while not cursor.at_end() and cursor.peek().kind == "&":
        cursor.advance()
        items.append(_parse_unary(cursor))
    return conjunction(items)


def _parse_unary(cursor: _Cursor) -> Formula:
    token = cursor.peek()
    if token is None:
        raise cursor.fail("formula", ("identifier", "'!'", "'('", "true", "false"))
    if token.kind == "!":
        cursor.advance()
        return Not(_parse_unary(cursor))
    if token.kind == "(":
        cursor.advance()
        inner = _parse_formula(cursor)
        cursor.expect_punct(")")
        return inner
    if token.kind == "ident":
        cursor.advance()
        if token.text == "true":
            return TRUE
        if token.text == "false":
            return FALSE
        return Atom(token.text)
    raise ParseError(
        token.span,
        f"unexpected token '{token.text}' in formula",
        ("identifier", "'!'", "'('", "true", "false"),
    )


def assemble_bundle(documents: list[Document]) -> ParsedBundle:
    """Merge documents into one validated bundle.

    Contradictory observations and duplicate utility entries are reported
    as findings (keeping the first occurrence), so a bundle is always
    produced; callers decide whether findings block further work.
    """
    model = FaultModel(
        hypotheses=tuple(h for doc in documents for h in doc.hypotheses),
        observables=tuple(o for doc in documents for o in doc.observables),
        rules=tuple(r for doc in documents for r in doc.rules),
        extra_facts=tuple(f for doc in documents for f in doc.facts),
    )
    findings = validate_model(model)

    seen_polarity: dict[str, bool] = {}
    literal_order: list[tuple[str, bool]] = []
    has_observations = any(doc.has_observations for doc in documents)
    for doc in documents:
        for name, polarity in doc.observations:
            if name in seen_polarity:
                if seen_polarity[name] != polarity:
                    findings.append(
                        ValidationFinding(
                            "contradictory-observation",
                            f"contradictory observation of '{name}'",
                        )
                    )
                continue
            seen_polarity[name] = polarity
            literal_order.append((name, polarity))
    observations = ObservationSet(tuple(literal_order)) if has_observations else None
    if observations is not None:
        findings.extend(validate_observations(model, observations))

    treatments = tuple(t for doc in documents for t in doc.treatments)
    additive: dict[str, AdditiveEntry] = {}
    for doc in documents:
        for tid, entry in doc.additive:
            if tid in additive:
                findings.append(
                    ValidationFinding(
                        "duplicate-utility",
                        f"duplicate utility entry for treatment '{tid}'",
                    )
                )
                continue
            additive[tid] = entry
    joints = tuple(j for doc in documents for j in doc.joints)
    utility = UtilityModel(additive, joints) if additive or joints else None
    findings.extend(validate_decision_inputs(model, treatments, utility))
    return ParsedBundle(model, observations, utility, treatments, tuple(findings))


def parse_model_file(text: str) -> ParsedBundle:
    """Parse and validate one source text."""
    return assemble_bundle([parse_document(text)])


def _format_number(value: float) -> str:
    return repr(float(value))


def _format_literals(literals: tuple[tuple[str, bool], ...]) -> str:
    return " & ".join(name if pol else f"!{name}" for name, pol in literals)


def serialize_bundle(bundle: ParsedBundle) -> str:
    """Render a bundle back to source text; reparsing yields an equal bundle."""
    lines: list[str] = []
    for hypothesis in bundle.model.hypotheses:
        lines.append(
            f"hypothesis {hypothesis.id} prior {_format_number(hypothesis.prior)}"
        )
    for observable in bundle.model.observables:
        suffix = " free" if observable.free else ""
        lines.append(f"observable {observable.id}{suffix}")
    for rule in bundle.model.rules:
        body = " & ".join(rule.body) if rule.body else "true"
        lines.append(f"rule {body} => {rule.head}")
    for fact in bundle.model.extra_facts:
        lines.append(f"fact {render(fact)}")
    if bundle.observations is not None:
        for name, polarity in bundle.observations.literals:
            lines.append(f"observe {name}" if polarity else f"observe !{name}")
    for treatment in bundle.treatments:
        lines.append(f"treatment {treatment.id} targets {treatment.target}")
    if bundle.utility is not None:
        for tid, entry in bundle.utility.additive.items():
            lines.append(
                f"utility {tid}"
                f" treat-faulty {_format_number(entry.treat_faulty)}"
                f" treat-ok {_format_number(entry.treat_ok)}"
                f" skip-faulty {_format_number(entry.skip_faulty)}"
                f" skip-ok {_format_number(entry.skip_ok)}"
            )
        for joint in bundle.utility.joint_entries:
            lines.append(
                f"utility joint when {_format_literals(joint.when)}"
                f" given {_format_literals(joint.given)}"
                f" value {_format_number(joint.value)}"
            )
    return "\n".join(lines) + "\n"
