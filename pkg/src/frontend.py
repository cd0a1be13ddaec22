# 前端：理论文件 (.dth) 与派生文件 (.dpf) 的词法/语法分析，以及项的美化输出

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

from src.calculus import check_formation, check_type, typecheck
from src.elaborator import (
    elaborate_conditional,
    elaborate_seq_pair,
    elaborate_throw,
    elaborate_try_catch,
)
from src.error_handler import (
    DeckitError,
    DuplicateName,
    EffectSideError,
    TheorySyntaxError,
    TypeMismatch,
)
from src.logging_config import get_logger
from src.models import (
    EMPTY,
    UNIT,
    Base,
    Comp,
    Const,
    Copair,
    CopairSource,
    Copr,
    Decoration,
    Derivation,
    EffectVal,
    EmptyType,
    EqJudgment,
    Equation,
    Final,
    Handler,
    Id,
    Initial,
    Injection,
    Lookup,
    NameVar,
    Pair,
    PairKind,
    Prod,
    Proj,
    PropComp,
    Strength,
    Sum,
    Tag,
    Term,
    TermJudgment,
    TermVar,
    TryCatchSpec,
    TypeExpr,
    TypeVar,
    UnitType,
    Untag,
    UntagAll,
    Update,
)
from src.profiles import ProfileSide, get_profile
from src.theory import (
    AxiomDecl,
    BaseTypeDecl,
    CheckStmt,
    EffectDecl,
    EvalStmt,
    OpDecl,
    Side,
    Theory,
    TryBlock,
)
from src.values import (
    UNIT_VAL,
    Atom,
    InL,
    InR,
    Packet,
    StatePoint,
    StateVal,
    TupleVal,
    Value,
)

logger = get_logger(__name__)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<propcomp>\(\.\))
  | (?P<op>==|=>|->|<<|[~.,|()\[\]{}:=*+;])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:-[A-Za-z0-9_]+)*)
  | (?P<number>[0-9]+)
    """,
    re.VERBOSE,
)

_STRENGTHS = {"==": Strength.STRONG, "~": Strength.WEAK, "<<": Strength.ORDERED}
_STRENGTH_WORDS = {s.value: s for s in Strength}

_PAIRS = {"pair": PairKind.SYMMETRIC, "lpair": PairKind.LEFT, "rpair": PairKind.RIGHT}
_COPAIRS = {"copair": PairKind.SYMMETRIC, "lcopair": PairKind.LEFT, "rcopair": PairKind.RIGHT}
_PAIR_WORDS = {kind: word for word, kind in _PAIRS.items()}
_COPAIR_WORDS = {kind: word for word, kind in _COPAIRS.items()}

KEYWORDS = frozenset(
    ["id", "pr1", "pr2", "final", "in1", "in2", "initial", "tag", "untag", "untagall",
     "lookup", "update", "throw", "try", "catch", "catchall", "if", "seqpair", "all",
     "ok", "exn", "raise", "inl", "inr"]
    + list(_PAIRS) + list(_COPAIRS)
)

EFFECT_TYPE_PREFIX = "V_"


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TheorySyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind == "propcomp":
            tokens.append(Token("op", "(.)", line, pos - line_start + 1))
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------


def pretty_type(t: TypeExpr) -> str:
    if isinstance(t, UnitType):
        return "1"
    if isinstance(t, EmptyType):
        return "0"
    if isinstance(t, Base):
        return t.name
    if isinstance(t, EffectVal):
        name = t.name.name if isinstance(t.name, NameVar) else t.name
        return f"{EFFECT_TYPE_PREFIX}{name}"
    if isinstance(t, Prod):
        return f"({pretty_type(t.left)} * {pretty_type(t.right)})"
    if isinstance(t, Sum):
        return f"({pretty_type(t.left)} + {pretty_type(t.right)})"
    if isinstance(t, TypeVar):
        return t.name
    if isinstance(t, CopairSource):
        return f"[{pretty_type(t.left)} | {pretty_type(t.right)}]"
    return repr(t)


def _name(name) -> str:
    return name.name if isinstance(name, NameVar) else name


def pretty_term(term: Term) -> str:
    if isinstance(term, Comp):
        return f"{_operand(term.outer)} . {pretty_term(term.inner)}"
    if isinstance(term, PropComp):
        return f"{_operand(term.outer)} (.) {pretty_term(term.inner)}"
    if isinstance(term, Id):
        return f"id[{pretty_type(term.t)}]"
    if isinstance(term, Pair):
        return f"{_PAIR_WORDS[term.kind]}({pretty_term(term.first)}, {pretty_term(term.second)})"
    if isinstance(term, Copair):
        return (f"{_COPAIR_WORDS[term.kind]}({pretty_term(term.first)} | "
                f"{pretty_term(term.second)})")
    if isinstance(term, Proj):
        return f"pr{term.index}[{pretty_type(term.left)}, {pretty_type(term.right)}]"
    if isinstance(term, Copr):
        return f"in{term.index}[{pretty_type(term.left)}, {pretty_type(term.right)}]"
    if isinstance(term, Injection):
        return f"inj{term.index}[{pretty_type(term.left)}, {pretty_type(term.right)}]"
    if isinstance(term, Final):
        return f"final[{pretty_type(term.t)}]"
    if isinstance(term, Initial):
        return f"initial[{pretty_type(term.t)}]"
    if isinstance(term, UntagAll):
        return "untagall"
    if isinstance(term, (Tag, Untag, Lookup, Update)):
        return f"{type(term).__name__.lower()}[{_name(term.name)}]"
    if isinstance(term, Const):
        return term.opname
    if isinstance(term, TermVar):
        return term.name
    return repr(term)


def _operand(term: Term) -> str:
    text = pretty_term(term)
    return f"({text})" if isinstance(term, (Comp, PropComp)) else text


def pretty_equation(eq: Equation) -> str:
    return f"{pretty_term(eq.lhs)} {eq.strength.symbol} {pretty_term(eq.rhs)}"


def pretty_judgment(judgment) -> str:
    if isinstance(judgment, EqJudgment):
        return pretty_equation(judgment.eq)
    return (f"{pretty_term(judgment.term)} : {pretty_type(judgment.source)} -> "
            f"{pretty_type(judgment.target)} deco {int(judgment.deco)}")


def pretty_derivation(derivation: Derivation, indent: int = 0) -> str:
    pad = "  " * indent
    head = f"{pad}(rule {derivation.rule}"
    if derivation.instantiation:
        head += " [" + "; ".join(_pretty_binding(k, v) for k, v in derivation.instantiation) + "]"
    conclusion = derivation.conclusion
    if isinstance(conclusion, EqJudgment):
        eq = conclusion.eq
        head += (f" (concl {eq.strength.value} {_concl_term(eq.lhs)} {_concl_term(eq.rhs)})")
    else:
        head += (f" (concl term {_concl_term(conclusion.term)} {pretty_type(conclusion.source)} "
                 f"{pretty_type(conclusion.target)} {int(conclusion.deco)})")
    lines = [head] + [pretty_derivation(p, indent + 1) for p in derivation.premises]
    return "\n".join(lines) + ")"


def _concl_term(term: Term) -> str:
    text = pretty_term(term)
    return f"({text})" if isinstance(term, (Comp, PropComp)) else text


def _pretty_binding(name: str, value) -> str:
    if isinstance(value, str):
        return f"name {name} = {value}"
    if isinstance(value, (Base, UnitType, EmptyType, Prod, Sum, EffectVal)):
        return f"type {name} = {pretty_type(value)}"
    return f"term {name} = {pretty_term(value)}"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


@dataclass
class _TheoryDraft:
    name: str
    side: Side
    profile_name: str
    effects: List[EffectDecl]
    base_types: List[BaseTypeDecl]
    ops: List[OpDecl]
    axioms: List[AxiomDecl]
    checks: List[CheckStmt]
    evals: List[EvalStmt]
    try_blocks: List[TryBlock]

    def build(self) -> Theory:
        return Theory(
            name=self.name,
            side=self.side,
            profile=get_profile(self.profile_name),
            effects=tuple(self.effects),
            base_types=tuple(self.base_types),
            ops=tuple(self.ops),
            axioms=tuple(self.axioms),
            checks=tuple(self.checks),
            evals=tuple(self.evals),
            try_blocks=tuple(self.try_blocks),
        )


class Parser:
    """Recursive-descent parser shared by theory files, derivation files and the CLI."""

    def __init__(self, text: str, theory: Optional[Theory] = None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.theory = theory
        self.try_blocks: List[TryBlock] = []

    # -- token helpers -----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.peek()
        if token.kind != "eof":
            self.pos += 1
        return token

    def at(self, text: str, offset: int = 0) -> bool:
        token = self.peek(offset)
        return token.kind in ("op", "ident", "number") and token.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected '{text}'")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        token = self.peek()
        if token.kind != "ident":
            raise self.error(f"expected {what}")
        return self.advance()

    def error(self, message: str, token: Optional[Token] = None) -> TheorySyntaxError:
        token = token or self.peek()
        found = "end of input" if token.kind == "eof" else f"'{token.text}'"
        return TheorySyntaxError(f"{message}, found {found}", token.line, token.column)

    def end(self) -> None:
        if self.peek().kind != "eof":
            raise self.error("unexpected trailing input")

    # -- types -------------------------------------------------------------

    def type_expr(self) -> TypeExpr:
        left = self.type_product()
        while self.accept("+"):
            left = Sum(left, self.type_product())
        return left

    def type_product(self) -> TypeExpr:
        left = self.type_atom()
        while self.accept("*"):
            left = Prod(left, self.type_atom())
        return left

    def type_atom(self) -> TypeExpr:
        if self.accept("("):
            t = self.type_expr()
            self.expect(")")
            return t
        token = self.peek()
        if token.kind == "number" and token.text in ("0", "1"):
            self.advance()
            return UNIT if token.text == "1" else EMPTY
        if token.kind == "ident":
            self.advance()
            if token.text.startswith(EFFECT_TYPE_PREFIX) and len(token.text) > 2:
                return EffectVal(token.text[len(EFFECT_TYPE_PREFIX):])
            return Base(token.text)
        raise self.error("expected a type")

    def _bracketed_types(self, count: int) -> List[TypeExpr]:
        self.expect("[")
        types = [self.type_expr()]
        for _ in range(count - 1):
            self.expect(",")
            types.append(self.type_expr())
        self.expect("]")
        return types

    def _bracketed_name(self) -> str:
        self.expect("[")
        name = self.ident("a name").text
        self.expect("]")
        return name

    # -- terms -------------------------------------------------------------

    def term(self) -> Term:
        left = self.term_atom()
        if self.accept("."):
            return Comp(left, self.term())
        if self.accept("(.)"):
            return PropComp(left, self.term())
        return left

    def _two_terms(self, separator: str) -> Tuple[Term, Term]:
        self.expect("(")
        first = self.term()
        self.expect(separator)
        second = self.term()
        self.expect(")")
        return first, second

    def term_atom(self) -> Term:
        token = self.peek()
        if self.accept("("):
            term = self.term()
            self.expect(")")
            return term
        if token.kind != "ident":
            raise self.error("expected a term")
        word = token.text
        self.advance()
        if word == "id":
            return Id(*self._bracketed_types(1))
        if word in ("pr1", "pr2"):
            return Proj(int(word[-1]), *self._bracketed_types(2))
        if word in ("in1", "in2"):
            return Copr(int(word[-1]), *self._bracketed_types(2))
        if word == "final":
            return Final(*self._bracketed_types(1))
        if word == "initial":
            return Initial(*self._bracketed_types(1))
        if word == "tag":
            return Tag(self._bracketed_name())
        if word == "untag":
            return Untag(self._bracketed_name())
        if word == "untagall":
            return UntagAll()
        if word == "lookup":
            return Lookup(self._bracketed_name())
        if word == "update":
            return Update(self._bracketed_name())
        if word in _PAIRS:
            return Pair(_PAIRS[word], *self._two_terms(","))
        if word in _COPAIRS:
            return Copair(_COPAIRS[word], *self._two_terms("|"))
        if word in ("throw", "try", "if", "seqpair"):
            return self._sugar(word, token)
        if word in KEYWORDS:
            raise self.error("unexpected keyword", token)
        return Const(word)

    def _sugar(self, word: str, token: Token) -> Term:
        if self.theory is None:
            raise TheorySyntaxError(f"{word} needs a theory in scope", token.line, token.column)
        try:
            if word == "throw":
                self.expect("[")
                target = self.type_expr()
                self.expect(",")
                name = self.ident("an exception name").text
                self.expect("]")
                return elaborate_throw(target, name, self.theory)
            if word == "if":
                self.expect("(")
                b = self.term()
                self.expect(",")
                f = self.term()
                self.expect(",")
                g = self.term()
                self.expect(")")
                return elaborate_conditional(b, f, g, self.theory)
            if word == "seqpair":
                return elaborate_seq_pair(*self._two_terms(","), self.theory)
            return self._try_catch(token)
        except TheorySyntaxError:
            raise
        except DeckitError as error:
            raise error.at(token.line, token.column)

    def _try_catch(self, token: Token) -> Term:
        self.expect("(")
        body = self.term()
        self.expect(")")
        self.expect("catch")
        self.expect("(")
        handlers: List[Handler] = []
        while True:
            name = self.ident("an exception name or 'all'").text
            self.expect("=>")
            handlers.append(Handler(None if name == "all" else name, self.term()))
            if not self.accept(","):
                break
        self.expect(")")
        catch_all = None
        if self.accept("catchall"):
            self.expect("(")
            catch_all = self.term()
            self.expect(")")
        spec = TryCatchSpec(body, tuple(handlers), catch_all)
        term = elaborate_try_catch(spec, self.theory)
        source, target = typecheck(term, self.theory)
        self.try_blocks.append(TryBlock(spec, term, source, target, token.line))
        return term

    def equation(self) -> Equation:
        lhs = self.term()
        token = self.peek()
        if token.kind != "op" or token.text not in _STRENGTHS:
            raise self.error("expected '==', '~' or '<<'")
        self.advance()
        return Equation(lhs, self.term(), _STRENGTHS[token.text])

    # -- values ------------------------------------------------------------

    def value(self) -> Value:
        token = self.peek()
        if self.accept("ok"):
            return self.value()
        if self.accept("exn"):
            name = self.ident("an exception name").text
            return Packet(name, self.value())
        if self.accept("raise"):
            self.expect("(")
            name = self.ident("an exception name").text
            self.expect(",")
            payload = self.value()
            self.expect(")")
            return Packet(name, payload)
        if self.accept("inl"):
            return InL(self.value())
        if self.accept("inr"):
            return InR(self.value())
        if self.at("{"):
            return self.state()
        if self.accept("("):
            if self.accept(")"):
                return UNIT_VAL
            first = self.value()
            if self.accept(")"):
                return first
            self.expect(",")
            if self.at("{"):
                state = self.state()
                self.expect(")")
                return StatePoint(first, state)
            second = self.value()
            self.expect(")")
            return TupleVal(first, second)
        if token.kind in ("ident", "number"):
            self.advance()
            return Atom(token.text)
        raise self.error("expected a value")

    def state(self) -> StateVal:
        start = self.expect("{")
        given: Dict[str, Value] = {}
        if not self.at("}"):
            while True:
                location = self.ident("a location name")
                self.expect("=")
                if location.text in given:
                    raise DuplicateName(f"location {location.text} appears twice",
                                        location.line, location.column)
                given[location.text] = self.value()
                if not self.accept(","):
                    break
        self.expect("}")
        if self.theory is None or not self.theory.uses_state_model:
            return StateVal(tuple(given.items()))
        declared = self.theory.effect_names()
        if set(given) != set(declared):
            raise TheorySyntaxError(
                f"a state must bind exactly {', '.join(declared) or 'no locations'}",
                start.line, start.column,
            )
        return StateVal(tuple((name, given[name]) for name in declared))

    # -- derivations ---------------------------------------------------------

    def derivation(self) -> Derivation:
        self.expect("(")
        self.expect("rule")
        name = self.ident("a rule name").text
        if name == "axiom" and self.accept(":"):
            name = f"axiom:{self.ident('an axiom name').text}"
        instantiation = []
        if self.accept("["):
            while True:
                instantiation.append(self._binding())
                if not self.accept(";"):
                    break
            self.expect("]")
        conclusion = self._conclusion()
        premises = []
        while self.at("("):
            premises.append(self.derivation())
        self.expect(")")
        return Derivation(name, conclusion, tuple(premises), tuple(instantiation))

    def _binding(self):
        kind = self.ident("'term', 'type' or 'name'")
        var = self.ident("a metavariable").text
        self.expect("=")
        if kind.text == "term":
            return var, self.term()
        if kind.text == "type":
            return var, self.type_expr()
        if kind.text == "name":
            return var, self.ident("a name").text
        raise self.error("expected 'term', 'type' or 'name'", kind)

    def _conclusion(self):
        self.expect("(")
        self.expect("concl")
        kind = self.ident("a conclusion kind")
        if kind.text in _STRENGTH_WORDS:
            lhs = self.term()
            rhs = self.term()
            self.expect(")")
            return EqJudgment(Equation(lhs, rhs, _STRENGTH_WORDS[kind.text]))
        if kind.text == "term":
            term = self.term()
            source = self.type_expr()
            target = self.type_expr()
            deco = self.peek()
            if deco.kind != "number" or deco.text not in ("0", "1", "2"):
                raise self.error("expected a decoration 0, 1 or 2")
            self.advance()
            self.expect(")")
            return TermJudgment(term, source, target, Decoration(int(deco.text)))
        raise self.error("expected strong, weak, ordered or term", kind)

    # -- theories ----------------------------------------------------------

    def theory_file(self) -> Theory:
        self.expect("theory")
        name = self.ident("a theory name").text
        side_token = self.ident("exceptions, states or none")
        try:
            side = Side(side_token.text)
        except ValueError:
            raise self.error("expected exceptions, states or none", side_token) from None
        self.expect("logic")
        profile_token = self.ident("a logic profile")
        try:
            profile = get_profile(profile_token.text)
        except DeckitError as error:
            raise error.at(profile_token.line, profile_token.column)
        _check_profile_side(side, profile, profile_token)

        draft = _TheoryDraft(name, side, profile.name, [], [], [], [], [], [], [])
        while self.peek().kind != "eof":
            keyword = self.ident("a statement keyword")
            handler = getattr(self, f"_stmt_{keyword.text}", None)
            if handler is None:
                raise self.error("unknown statement", keyword)
            try:
                handler(draft, keyword)
            except TheorySyntaxError:
                raise
            except DeckitError as error:
                raise error.at(keyword.line, keyword.column)
        draft.try_blocks = list(self.try_blocks)
        return draft.build()

    def _scope(self, draft: _TheoryDraft) -> Theory:
        self.theory = draft.build()
        return self.theory

    def _effect_decl(self, draft: _TheoryDraft, keyword: Token, side: Side) -> None:
        if draft.side is not side:
            raise EffectSideError(f"'{keyword.text}' declarations need a {side.value} theory, "
                                  f"'{draft.name}' is {draft.side.value}")
        token = self.ident("a name")
        if token.text in {e.name for e in draft.effects}:
            raise DuplicateName(f"{keyword.text} {token.text} is declared twice")
        self.expect("of")
        atoms = self._atom_set()
        draft.effects.append(EffectDecl(token.text, tuple(Atom(a) for a in atoms)))

    def _stmt_exception(self, draft: _TheoryDraft, keyword: Token) -> None:
        self._effect_decl(draft, keyword, Side.EXCEPTIONS)

    def _stmt_location(self, draft: _TheoryDraft, keyword: Token) -> None:
        self._effect_decl(draft, keyword, Side.STATES)

    def _atom_set(self) -> Tuple[str, ...]:
        self.expect("{")
        atoms: List[str] = []
        while not self.at("}"):
            token = self.peek()
            if token.kind not in ("ident", "number"):
                raise self.error("expected an element")
            self.advance()
            if token.text in atoms:
                raise DuplicateName(f"element {token.text} is listed twice",
                                    token.line, token.column)
            atoms.append(token.text)
            if not self.accept(","):
                break
        self.expect("}")
        if not atoms:
            raise self.error("a carrier needs at least one element")
        return tuple(atoms)

    def _stmt_type(self, draft: _TheoryDraft, keyword: Token) -> None:
        token = self.ident("a type name")
        if token.text.startswith(EFFECT_TYPE_PREFIX) or token.text in KEYWORDS:
            raise self.error("reserved type name", token)
        if token.text in {b.name for b in draft.base_types}:
            raise DuplicateName(f"type {token.text} is declared twice")
        self.expect("=")
        draft.base_types.append(BaseTypeDecl(token.text, self._atom_set()))

    def _stmt_op(self, draft: _TheoryDraft, keyword: Token) -> None:
        token = self.ident("an operation name")
        if token.text in KEYWORDS:
            raise self.error("reserved operation name", token)
        if token.text in {o.name for o in draft.ops}:
            raise DuplicateName(f"op {token.text} is declared twice")
        self.expect(":")
        source = self.type_expr()
        self.expect("->")
        target = self.type_expr()
        self.expect("deco")
        deco_token = self.peek()
        if deco_token.kind != "number" or deco_token.text not in ("0", "1", "2"):
            raise self.error("expected a decoration 0, 1 or 2")
        self.advance()
        theory = self._scope(draft)
        check_type(source, theory)
        check_type(target, theory)
        self.expect("{")
        rows = []
        while not self.at("}"):
            given = self.value()
            self.expect("=>")
            rows.append((given, self.value()))
            self.accept(";")
        self.expect("}")
        draft.ops.append(OpDecl(token.text, source, target, Decoration(int(deco_token.text)),
                                tuple(rows), keyword.line))

    def _stmt_axiom(self, draft: _TheoryDraft, keyword: Token) -> None:
        token = self.ident("an axiom name")
        if token.text in {a.name for a in draft.axioms}:
            raise DuplicateName(f"axiom {token.text} is declared twice")
        self.expect(":")
        self._scope(draft)
        eq = self.equation()
        _check_equation(eq, self.theory)
        draft.axioms.append(AxiomDecl(token.text, eq, keyword.line))

    def _stmt_check(self, draft: _TheoryDraft, keyword: Token) -> None:
        name = f"check-{len(draft.checks) + 1}"
        if self.peek().kind == "ident" and self.at(":", 1):
            name = self.advance().text
            self.advance()
        if name in {c.name for c in draft.checks}:
            raise DuplicateName(f"check {name} is declared twice")
        self._scope(draft)
        eq = self.equation()
        _check_equation(eq, self.theory)
        self.expect("expect")
        verdict = self.ident("holds or fails")
        if verdict.text not in ("holds", "fails"):
            raise self.error("expected holds or fails", verdict)
        draft.checks.append(CheckStmt(name, eq, verdict.text == "holds", keyword.line))

    def _stmt_eval(self, draft: _TheoryDraft, keyword: Token) -> None:
        self._scope(draft)
        term = self.term()
        typecheck(term, self.theory)
        self.expect("on")
        draft.evals.append(EvalStmt(term, self.value(), keyword.line))


def _check_profile_side(side: Side, profile, token: Token) -> None:
    allowed = {
        Side.EXCEPTIONS: (ProfileSide.MONAD, ProfileSide.NONE),
        Side.STATES: (ProfileSide.COMONAD, ProfileSide.NONE),
        Side.NONE: (ProfileSide.MONAD, ProfileSide.COMONAD, ProfileSide.NONE),
    }[side]
    if profile.side not in allowed:
        raise EffectSideError(
            f"logic {profile.name} does not fit a theory of side {side.value}",
            token.line, token.column,
        )


def _check_equation(eq: Equation, theory: Theory) -> None:
    lhs = typecheck(eq.lhs, theory)
    rhs = typecheck(eq.rhs, theory)
    if lhs[0] != rhs[0]:
        raise TypeMismatch(lhs[0], rhs[0], ("rhs",), "equation sides need a common source")
    if lhs[1] != rhs[1]:
        raise TypeMismatch(lhs[1], rhs[1], ("rhs",), "equation sides need a common target")


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def parse_theory(text: str) -> Theory:
    theory = Parser(text).theory_file()
    logger.info(
        f"Parsed theory '{theory.name}' ({theory.side.value}, {theory.profile.name}): "
        f"{len(theory.effects)} names, {len(theory.ops)} ops, {len(theory.checks)} checks"
    )
    return theory


def parse_derivation(text: str, theory: Optional[Theory] = None) -> Derivation:
    parser = Parser(text, theory)
    derivation = parser.derivation()
    parser.end()
    logger.debug(f"Parsed derivation with {derivation.size()} nodes")
    return derivation


def _parse_whole(text: str, theory: Optional[Theory], method: str):
    parser = Parser(text, theory)
    result = getattr(parser, method)()
    parser.end()
    return result


def parse_term(text: str, theory: Optional[Theory] = None) -> Term:
    return _parse_whole(text, theory, "term")


def parse_type(text: str) -> TypeExpr:
    return _parse_whole(text, None, "type_expr")


def parse_equation(text: str, theory: Optional[Theory] = None) -> Equation:
    return _parse_whole(text, theory, "equation")


def parse_value(text: str, theory: Optional[Theory] = None) -> Value:
    return _parse_whole(text, theory, "value")


def _read(path: Union[str, Path]) -> str:
    return Path(path).read_text(encoding="utf-8")


def load_theory(path: Union[str, Path]) -> Theory:
    logger.debug(f"Loading theory from {path}")
    return parse_theory(_read(path))


def load_derivation(path: Union[str, Path], theory: Optional[Theory] = None) -> Derivation:
    logger.debug(f"Loading derivation from {path}")
    return parse_derivation(_read(path), theory)


def check_theory(theory: Theory) -> List[str]:
    """Formation diagnostics for every declaration and statement of the theory."""
    diagnostics: List[str] = []
    max_leaf = theory.profile.max_leaf
    for op in theory.ops:
        if op.deco > max_leaf:
            diagnostics.append(f"line {op.line}: op {op.name} has decoration {int(op.deco)}, "
                               f"{theory.profile.name} permits ≤{max_leaf}")
    statements = (
        [(f"axiom {a.name}", a.line, (a.equation.lhs, a.equation.rhs)) for a in theory.axioms]
        + [(f"check {c.name}", c.line, (c.equation.lhs, c.equation.rhs)) for c in theory.checks]
        + [("eval", e.line, (e.term,)) for e in theory.evals]
    )
    for label, line, terms in statements:
        for term in terms:
            for violation in check_formation(term, theory.profile, theory):
                diagnostics.append(f"line {line}: {label}: {violation}")
    return diagnostics
