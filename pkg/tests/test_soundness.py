# 可靠性检验、副条件反例与相容性定理

import pytest

from src.config_manager import Limits
from src.error_handler import EnumerationLimitExceeded, UnknownWitness
from src.frontend import parse_theory
from src.models import UNIT, Base, TermVar
from src.profiles import PROFILE_NAMES
from src.rules import get_rule, rule_catalog
from src.soundness import (
    check_all_rules,
    check_compatibility,
    check_rule_sound,
    find_side_condition_witness,
    schema_metavars,
)

from tests.conftest import PROFILE_THEORIES, corpus_theory

CATALOG_CASES = [
    pytest.param(profile, rule.name, id=f"{profile}-{rule.name}")
    for profile in PROFILE_NAMES
    for rule in rule_catalog(profile)
]


@pytest.fixture
def tiny_exc():
    return parse_theory(
        """
        theory tiny exceptions logic EXC
        exception T of {a, b}
        """
    )


class TestRuleSoundness:
    def test_reflexivity_is_sound(self, exc_core):
        report = check_rule_sound("s-refl", exc_core, samples=20)
        assert report.sound
        assert report.tried == 20
        assert report.premises_true > 0

    @pytest.mark.parametrize(
        "rule, theory_name", [("w-subs", "demo"), ("effect", "demo"), ("copair-u", "states")]
    )
    def test_catalog_rule_has_no_counterexample(self, request, rule, theory_name):
        report = check_rule_sound(rule, request.getfixturevalue(theory_name), samples=100)
        assert report.sound, [f.conclusion for f in report.failures]

    @pytest.mark.property_test
    @pytest.mark.parametrize("profile, rule", CATALOG_CASES)
    def test_every_catalog_rule_at_full_sample_size(self, profile, rule):
        theory = corpus_theory(PROFILE_THEORIES[profile])
        report = check_rule_sound(rule, theory, samples=500, seed=42)
        assert report.profile == profile
        assert report.tried == 500
        assert report.sound, [f.conclusion for f in report.failures]

    def test_reports_keep_catalog_order_with_workers(self, exc_core):
        reports = check_all_rules(exc_core, rules=["s-sym", "s-refl"], samples=10, workers=2)
        assert [r.rule for r in reports] == ["s-sym", "s-refl"]
        assert all(r.profile == "EXC" for r in reports)

    def test_schema_metavariables(self):
        found = schema_metavars(get_rule("weak-strong", "EXC"))
        assert TermVar("f") in found
        assert TermVar("g") in found


class TestWitnesses:
    @pytest.mark.parametrize(
        "variant, theory_name",
        [
            ("w-subs-unrestricted", "exc_core"),
            ("weak-strong-at-2", "exc_core"),
            ("weak-strong-at-2", "states"),
            ("w-repl-unrestricted", "states"),
        ],
    )
    def test_weakened_rule_has_a_witness(self, request, variant, theory_name):
        theory = request.getfixturevalue(theory_name)
        witness = find_side_condition_witness(variant, theory, samples=50)
        assert witness.found, witness.note
        assert all(v.holds for v in witness.premises)
        assert not witness.conclusion.holds

    def test_copair_of_catchers_has_no_solution(self, exc_core):
        witness = find_side_condition_witness("copair-of-catchers", exc_core)
        assert witness.found
        assert witness.note.startswith("0 candidate table(s)")

    def test_copair_of_catchers_needs_exceptions(self, states):
        assert not find_side_condition_witness("copair-of-catchers", states).found

    def test_unknown_variant(self, exc_core):
        with pytest.raises(UnknownWitness, match="copair-of-catchers"):
            find_side_condition_witness("no-such-variant", exc_core)


class TestCompatibility:
    def test_exception_constructions_exist_uniquely(self, tiny_exc):
        results = check_compatibility(tiny_exc)
        assert [r.construction for r in results] == ["l-pair", "r-pair", "copair"]
        assert all(r.holds for r in results), [r.examples for r in results]

    def test_state_constructions_exist_uniquely(self, one_location):
        results = check_compatibility(one_location, target=UNIT)
        assert [r.construction for r in results] == ["copair", "l-pair", "r-pair"]
        assert all(r.holds for r in results), [r.examples for r in results]

    @pytest.mark.parametrize(
        "theory_name, modifiers, accessors",
        [
            # |S|=4，目标 V_X：每个输入点 2×4 个输出
            ("states", 8 ** 4, 2 ** 4),
            # |S|=3，目标 V_C：每个输入点 3×3 个输出
            ("comon_counter", 9 ** 3, 3 ** 3),
        ],
    )
    def test_corpus_state_theories_cover_whole_function_spaces(
        self, theory_name, modifiers, accessors
    ):
        copair, left, right = check_compatibility(corpus_theory(theory_name))
        assert copair.checked == modifiers ** 2
        assert left.checked == right.checked == accessors * modifiers
        assert all(r.holds for r in (copair, left, right))

    @pytest.mark.parametrize(
        "theory_name, pures, propagators",
        [
            # 四个异常包：传播子在每个输入点有 2+4 个输出
            ("exc_core", 2, 6),
            ("handlers", 2, 7),
            ("demo", 2, 5),
        ],
    )
    def test_corpus_exception_theories_cover_whole_function_spaces(
        self, theory_name, pures, propagators
    ):
        left, right, copair = check_compatibility(corpus_theory(theory_name))
        assert left.checked == right.checked == pures * propagators
        assert copair.checked == propagators ** 2
        assert all(r.holds for r in (left, right, copair))

    @pytest.mark.parametrize("atoms, size", [("p, q", 2), ("p, q, r", 3)])
    def test_two_locations_with_a_larger_source(self, atoms, size):
        theory = parse_theory(
            f"""
            theory wide states logic ST_PLUS
            location X of {{0, 1}}
            location Y of {{0, 1}}
            type A = {{{atoms}}}
            """
        )
        copair, left, right = check_compatibility(theory, source=Base("A"))
        points = size * 4
        assert copair.checked == (8 ** points) ** 2
        assert left.checked == right.checked == 2 ** points * 8 ** points
        assert all(r.holds for r in (copair, left, right)), [r.examples for r in (copair, left, right)]

    @pytest.mark.parametrize("payloads, outputs", [("a", 3), ("a, b", 4)])
    def test_exception_pairs_over_two_element_carriers(self, payloads, outputs):
        theory = parse_theory(
            f"""
            theory pairs exceptions logic EXC
            exception T of {{{payloads}}}
            type B = {{tt, ff}}
            """
        )
        left, right, copair = check_compatibility(theory, source=Base("B"), target=Base("B"))
        assert left.checked == right.checked == 2 ** 2 * outputs ** 2
        assert copair.checked == (outputs ** 2) ** 2
        assert all(r.holds for r in (left, right, copair))

    def test_three_valued_carriers_with_two_locations(self):
        theory = parse_theory(
            """
            theory wide3 states logic ST
            location X of {0, 1}
            location Y of {0, 1}
            type A = {p, q, r}
            type C = {c0, c1, c2}
            """
        )
        copair, left, right = check_compatibility(theory, source=Base("A"), target=Base("C"))
        assert copair.checked == (12 ** 12) ** 2
        assert all(r.holds for r in (copair, left, right))

    def test_local_case_limit_is_enforced(self, states):
        with pytest.raises(EnumerationLimitExceeded, match="enumeration limit 10"):
            check_compatibility(states, limits=Limits(max_candidates=10))
