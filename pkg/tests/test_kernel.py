# 证明核：语料库中的派生必须被接受，变异后的派生必须在预期的位置被拒绝

from pathlib import Path

import pytest
import yaml

from src.frontend import load_derivation, parse_derivation, pretty_derivation
from src.kernel import check_derivation, match, substitute
from src.models import Comp, NameVar, Tag, TermVar, Untag

from tests.conftest import PROOFS, corpus_theory


def _manifest():
    with open(PROOFS / "manifest.yaml", "r", encoding="utf-8") as f:
        return yaml.safe_load(f)["proofs"]


class TestCorpusProofs:
    @pytest.mark.parametrize("entry", _manifest(), ids=lambda e: e["file"])
    def test_accepted(self, entry):
        theory = corpus_theory(Path(entry["theory"]).stem)
        verdict = check_derivation(load_derivation(PROOFS / entry["file"], theory), theory)
        assert verdict.accepted, str(verdict)
        assert verdict.nodes == entry["nodes"]

    @pytest.mark.parametrize("entry", _manifest(), ids=lambda e: e["file"])
    def test_pretty_printed_proof_is_still_accepted(self, entry):
        theory = corpus_theory(Path(entry["theory"]).stem)
        derivation = load_derivation(PROOFS / entry["file"], theory)
        reparsed = parse_derivation(pretty_derivation(derivation), theory)
        assert reparsed == derivation
        assert check_derivation(reparsed, theory).accepted


# (theory, derivation, path, rule, reason prefix)
MUTATIONS = [
    pytest.param(
        "demo",
        "(rule ax-untag-tagg (concl weak (untag[T] . tag[T]) id[V_T]))",
        (), "ax-untag-tagg", "unknown rule 'ax-untag-tagg' in EXC",
        id="unknown-rule",
    ),
    pytest.param(
        "eq_bool",
        "(rule weak-strong (concl strong not not) (rule refl (concl strong not not)))",
        (), "weak-strong", "unknown rule 'weak-strong' in EQ",
        id="rule-outside-profile",
    ),
    pytest.param(
        "demo",
        "(rule s-sym (concl strong id[Bool] id[Bool])"
        " (rule w-refl (concl weak id[Bool] id[Bool])))",
        (), "s-sym", "premise does not match s-sym",
        id="premise-strength",
    ),
    pytest.param(
        "demo",
        "(rule s-sym (concl strong id[Bool] id[Bool])"
        " (rule w-refl (concl strong id[Bool] id[Bool])))",
        (0,), "w-refl", "conclusion does not match rule w-refl",
        id="nested-conclusion-strength",
    ),
    pytest.param(
        "demo",
        "(rule weak-strong (concl strong (untag[T] . tag[T]) (untag[T] . tag[T]))"
        " (rule w-refl (concl weak (untag[T] . tag[T]) (untag[T] . tag[T]))))",
        (), "weak-strong", "weak-strong requires f with decoration ≤ 1",
        id="weak-strong-on-catcher",
    ),
    pytest.param(
        "demo",
        "(rule effect (concl strong (untag[T] . tag[T]) (untag[T] . tag[T]))"
        " (rule w-refl (concl weak (untag[T] . tag[T]) (untag[T] . tag[T]))))",
        (), "effect", "effect expects 2 premise(s), got 1",
        id="missing-premise",
    ),
    pytest.param(
        "eq_bool",
        "(rule axiom:nope (concl strong (not . not) id[Bool]))",
        (), "axiom:nope", "unknown axiom 'nope'",
        id="unknown-axiom",
    ),
    pytest.param(
        "eq_bool",
        "(rule axiom:not-not (concl strong not id[Bool]))",
        (), "axiom:not-not", "conclusion is not axiom not-not",
        id="axiom-conclusion",
    ),
    pytest.param(
        "demo",
        "(rule s-refl (concl strong id[Bool] id[V_T]))",
        (), "s-refl", "equation sides have different types",
        id="ill-typed-judgment",
    ),
    pytest.param(
        "demo",
        "(rule s-refl (concl strong pair(half, half) pair(half, half)))",
        (), "s-refl", "not well-formed in EXC",
        id="formation",
    ),
    pytest.param(
        "demo",
        "(rule ax-untag-tag-ne (concl weak (untag[T] . tag[T]) (initial[V_T] . tag[T])))",
        (), "ax-untag-tag-ne", "ax-untag-tag-ne requires distinct T and R",
        id="distinct-names",
    ),
    pytest.param(
        "demo",
        "(rule s-refl [term f = half] (concl strong id[Bool] id[Bool]))",
        (), "s-refl", "instantiation of f disagrees with the conclusion",
        id="explicit-instantiation",
    ),
    pytest.param(
        "demo",
        "(rule s-sym (concl strong id[Bool] id[Bool]) (rule id (concl term id[Bool] Bool Bool 0)))",
        (), "s-sym", "s-sym premises must be equations",
        id="term-premise-for-equation",
    ),
    pytest.param(
        "exc_proofs",
        "(rule w-subs (concl weak ((untag[T] . tag[T]) . (pick . guard)) (id[V_T] . (pick . guard)))"
        " (rule ax-untag-tag (concl weak (untag[T] . tag[T]) id[V_T])))",
        (), "w-subs", "w-subs requires pure f",
        id="w-subs-on-propagator",
    ),
    pytest.param(
        "eq_bool",
        "(rule trans (concl strong ((not . not) . not) not)"
        " (rule subs (concl strong ((not . not) . not) (id[Bool] . not))"
        "   (rule axiom:not-not (concl strong (not . not) id[Bool])))"
        " (rule id-target (concl strong (id[Bool] . not) (not . not))))",
        (), "trans", "premise does not match trans",
        id="broken-chain",
    ),
]


class TestMutations:
    @pytest.mark.parametrize("theory_name, text, path, rule, reason", MUTATIONS)
    def test_rejected_at(self, theory_name, text, path, rule, reason):
        theory = corpus_theory(theory_name)
        derivation = parse_derivation(text, theory)
        verdict = check_derivation(derivation, theory)
        assert not verdict.accepted
        assert verdict.path == path
        assert verdict.rule == rule
        assert verdict.reason.startswith(reason)
        assert verdict.nodes == derivation.size()


class TestMatching:
    def test_repeated_metavariable_must_agree(self):
        pattern = Comp(Untag(NameVar("T")), Tag(NameVar("T")))
        bindings = {}
        assert match(pattern, Comp(Untag("T"), Tag("T")), bindings)
        assert bindings == {NameVar("T"): "T"}
        assert not match(pattern, Comp(Untag("T"), Tag("R")), {})

    def test_substitute_inverts_match(self):
        pattern = Comp(TermVar("g"), TermVar("f"))
        concrete = Comp(Untag("T"), Tag("T"))
        bindings = {}
        assert match(pattern, concrete, bindings)
        assert substitute(pattern, bindings) == concrete
