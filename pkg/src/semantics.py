# 按理论的效应侧选择有限模型，并缓存每个理论的环境

from functools import lru_cache
from typing import Optional, Union

from src import model_exceptions, model_states
from src.calculus import typecheck
from src.config_manager import Limits
from src.error_handler import FrontendError, TypeMismatch
from src.frontend import pretty_type
from src.models import Equation, Strength, Term, Verdict
from src.theory import Theory
from src.values import format_value

Denotation = Union[model_exceptions.ExcDenotation, model_states.StDenotation]
Environment = Union[model_exceptions.ExceptionEnvironment, model_states.StateEnvironment]


def model_for(theory: Theory):
    return model_states if theory.uses_state_model else model_exceptions


@lru_cache(maxsize=64)
def _environment(theory: Theory, limits: Limits) -> Environment:
    return model_for(theory).build_environment(theory, limits)


def environment(theory: Theory, limits: Optional[Limits] = None) -> Environment:
    return _environment(theory, limits or Limits())


def evaluate(term: Term, theory: Theory, limits: Optional[Limits] = None) -> Denotation:
    typecheck(term, theory)
    return model_for(theory).evaluate(term, environment(theory, limits))


def equation_types(eq: Equation, theory: Theory):
    lhs = typecheck(eq.lhs, theory)
    rhs = typecheck(eq.rhs, theory)
    if lhs[0] != rhs[0]:
        raise TypeMismatch(lhs[0], rhs[0], ("rhs",), "equation sides need a common source")
    if lhs[1] != rhs[1]:
        raise TypeMismatch(lhs[1], rhs[1], ("rhs",), "equation sides need a common target")
    return lhs


def decide(eq: Equation, theory: Theory, limits: Optional[Limits] = None) -> Verdict:
    equation_types(eq, theory)
    return model_for(theory).decide(eq, environment(theory, limits))


def compare(lhs: Denotation, rhs: Denotation, strength: Strength, theory: Theory,
            equation: Optional[Equation] = None) -> Verdict:
    return model_for(theory).compare(lhs, rhs, strength, equation)


def apply(term: Term, theory: Theory, value: object, limits: Optional[Limits] = None) -> object:
    den = evaluate(term, theory, limits)
    try:
        return den(value)
    except KeyError:
        raise FrontendError(
            f"{format_value(value)} is not an input of a term with source {pretty_type(den.source)}"
        ) from None
