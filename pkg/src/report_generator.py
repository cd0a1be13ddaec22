# 报告生成模块 - 把检查、求值、证明和可靠性结果渲染成文本或 JSON

import json
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from src.frontend import pretty_equation, pretty_term, pretty_type
from src.kernel import KernelVerdict
from src.logging_config import get_logger
from src.models import Counterexample, Verdict
from src.oracle import OracleReport
from src.rules import EqPremise, RuleDescriptor, TermConclusion, TermPremise
from src.soundness import CompatResult, SoundnessReport, Witness
from src.theory import CheckStmt
from src.values import format_value

logger = get_logger(__name__)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CheckOutcome:
    """A check statement together with its verdict."""

    check: CheckStmt
    verdict: Verdict

    @property
    def passed(self) -> bool:
        return self.verdict.holds == self.check.expect


def _value(value: object) -> Optional[str]:
    return None if value is None else format_value(value)


def counterexample_dict(cx: Optional[Counterexample]) -> Optional[Dict[str, Any]]:
    if cx is None:
        return None
    return {
        "input": _value(cx.input),
        "lhs": _value(cx.lhs),
        "rhs": _value(cx.rhs),
        "strength": cx.strength.value,
        "reason": cx.reason,
    }


def format_counterexample(cx: Counterexample) -> str:
    text = (f"on input {_value(cx.input)}: lhs gives {_value(cx.lhs)}, "
            f"rhs gives {_value(cx.rhs)} ({cx.strength.value})")
    if cx.reason:
        text += f" [{cx.reason}]"
    return text


def describe_rule(rule: RuleDescriptor) -> str:
    """One-line rendering `name: premises |- conclusions`."""

    def premise(p) -> str:
        if isinstance(p, TermPremise):
            return (f"{pretty_term(p.term)}^{int(p.max_deco)} : {pretty_type(p.source)} -> "
                    f"{pretty_type(p.target)}")
        text = pretty_equation(p.equation)
        return f"{text} for each {p.for_each}" if isinstance(p, EqPremise) and p.for_each else text

    def conclusion(c) -> str:
        if isinstance(c, TermConclusion):
            deco = "min" if c.deco is None else str(int(c.deco))
            return (f"{pretty_term(c.term)} : {pretty_type(c.source)} -> "
                    f"{pretty_type(c.target)} deco {deco}")
        return pretty_equation(c)

    premises = [premise(p) for p in rule.term_premises] + [premise(p) for p in rule.eq_premises]
    text = f"{rule.name}: " + ("; ".join(premises) + " |- " if premises else "|- ")
    text += "; ".join(conclusion(c) for c in rule.conclusions)
    if rule.distinct:
        text += "  (" + ", ".join(f"{a} != {b}" for a, b in rule.distinct) + ")"
    return text


class ReportGenerator:
    """把各子命令的结果渲染为人类可读文本或结构化 JSON。

    The JSON documents follow schemas/report.schema.json: every document has
    `command`, `ok` and `schema_version`, plus a command-specific payload.
    """

    def __init__(self, as_json: bool = False, timing: bool = False):
        self.as_json = as_json
        self.timing = timing

    def _emit(self, command: str, ok: bool, payload: Dict[str, Any], lines: List[str],
              elapsed: Optional[float] = None) -> str:
        logger.debug(f"rendering {command} report ({'json' if self.as_json else 'text'})")
        if self.as_json:
            document: Dict[str, Any] = {"schema_version": SCHEMA_VERSION, "command": command,
                                        "ok": ok}
            document.update(payload)
            if self.timing and elapsed is not None:
                document["elapsed_seconds"] = round(elapsed, 3)
            return json.dumps(document, indent=2, ensure_ascii=False)
        if self.timing and elapsed is not None:
            lines.append(f"elapsed: {elapsed:.3f}s")
        return "\n".join(lines)

    # -- check -------------------------------------------------------------

    def render_check(self, theory_name: str, diagnostics: Sequence[str]) -> str:
        lines = [f"theory {theory_name}: {len(diagnostics)} diagnostic(s)"]
        lines += [f"  {d}" for d in diagnostics]
        return self._emit("check", not diagnostics,
                          {"theory": theory_name, "diagnostics": list(diagnostics)}, lines)

    # -- verify ------------------------------------------------------------

    def render_verify(self, theory_name: str, outcomes: Sequence[CheckOutcome],
                      oracle: Optional[OracleReport] = None,
                      elapsed: Optional[float] = None) -> str:
        lines = []
        entries = []
        for outcome in outcomes:
            check, verdict = outcome.check, outcome.verdict
            status = "PASS" if outcome.passed else "FAIL"
            actual = "holds" if verdict.holds else "fails"
            expected = "holds" if check.expect else "fails"
            lines.append(f"[{status}] {check.name}: {pretty_equation(check.equation)} "
                         f"({actual}, expected {expected})")
            if verdict.counterexample is not None and not outcome.passed:
                lines.append(f"       counterexample {format_counterexample(verdict.counterexample)}")
            entries.append({
                "name": check.name,
                "line": check.line,
                "equation": pretty_equation(check.equation),
                "strength": check.equation.strength.value,
                "expected": expected,
                "actual": actual,
                "passed": outcome.passed,
                "counterexample": counterexample_dict(verdict.counterexample),
            })
        passed = sum(1 for o in outcomes if o.passed)
        ok = passed == len(outcomes)
        payload: Dict[str, Any] = {"theory": theory_name, "checks": entries}
        if oracle is not None and oracle.blocks:
            ok = ok and oracle.agrees
            lines.append(f"try/catch oracle: {oracle.blocks} block(s), {oracle.inputs} input(s), "
                         f"{len(oracle.mismatches)} mismatch(es)")
            lines += [f"  {m}" for m in oracle.mismatches]
            payload["oracle"] = {
                "blocks": oracle.blocks,
                "inputs": oracle.inputs,
                "mismatches": [str(m) for m in oracle.mismatches],
            }
        lines.append(f"{passed}/{len(outcomes)} checks as expected")
        return self._emit("verify", ok, payload, lines, elapsed)

    # -- eval --------------------------------------------------------------

    def render_eval(self, rows: Sequence[Dict[str, Any]]) -> str:
        lines = [f"{r['term']} on {r['input']} = {r['output']}" for r in rows]
        return self._emit("eval", True, {"results": list(rows)}, lines)

    # -- prove -------------------------------------------------------------

    def render_proof(self, proof_name: str, verdict: KernelVerdict) -> str:
        payload = {
            "proof": proof_name,
            "accepted": verdict.accepted,
            "nodes": verdict.nodes,
            "path": list(verdict.path) if verdict.path is not None else None,
            "rule": verdict.rule,
            "reason": verdict.reason,
        }
        return self._emit("prove", verdict.accepted, payload, [f"{proof_name}: {verdict}"])

    # -- soundness ---------------------------------------------------------

    def render_soundness(self, reports: Sequence[SoundnessReport],
                         elapsed: Optional[float] = None) -> str:
        lines = []
        entries = []
        for report in reports:
            status = "sound" if report.sound else "UNSOUND"
            note = " (no instance with true premises)" if report.budget_exhausted else ""
            lines.append(f"{report.rule:<18} {status:<8} tried {report.tried}, "
                         f"premises true {report.premises_true}{note}")
            for failure in report.failures[:3]:
                shown = ", ".join(f"{k} = {v}" for k, v in sorted(failure.instantiation.items()))
                lines.append(f"    {failure.conclusion} with {shown}")
                if failure.counterexample is not None:
                    lines.append(f"      {format_counterexample(failure.counterexample)}")
                elif failure.detail:
                    lines.append(f"      {failure.detail}")
            entries.append({
                "rule": report.rule,
                "profile": report.profile,
                "tried": report.tried,
                "premises_true": report.premises_true,
                "budget_exhausted": report.budget_exhausted,
                "failures": [
                    {
                        "instantiation": dict(sorted(f.instantiation.items())),
                        "conclusion": f.conclusion,
                        "counterexample": counterexample_dict(f.counterexample),
                        "detail": f.detail,
                    }
                    for f in report.failures
                ],
            })
        unsound = [r.rule for r in reports if not r.sound]
        lines.append(f"{len(reports) - len(unsound)}/{len(reports)} rules sound")
        return self._emit("soundness", not unsound, {"rules": entries}, lines, elapsed)

    # -- rules -------------------------------------------------------------

    def render_rules(self, profile_name: str, catalog: Sequence[RuleDescriptor]) -> str:
        lines = [f"{profile_name}: {len(catalog)} rules"] + [f"  {describe_rule(r)}" for r in catalog]
        payload = {
            "profile": profile_name,
            "rules": [{"name": r.name, "schema": describe_rule(r)} for r in catalog],
        }
        return self._emit("rules", True, payload, lines)

    # -- compat ------------------------------------------------------------

    def render_compat(self, theory_name: str, results: Sequence[CompatResult]) -> str:
        lines = []
        entries = []
        for result in results:
            status = "holds" if result.holds else "FAILS"
            lines.append(f"{result.construction:<8} {status}: {result.checked} case(s), "
                         f"{result.missing} missing, {result.ambiguous} ambiguous, "
                         f"{result.mismatched} mismatched")
            lines += [f"    {e}" for e in result.examples]
            entries.append({
                "construction": result.construction,
                "checked": result.checked,
                "missing": result.missing,
                "ambiguous": result.ambiguous,
                "mismatched": result.mismatched,
                "holds": result.holds,
            })
        ok = all(r.holds for r in results)
        return self._emit("compat", ok, {"theory": theory_name, "results": entries}, lines)

    # -- witness -----------------------------------------------------------

    def render_witness(self, witness: Witness) -> str:
        lines = [f"{witness.variant}: {'witness found' if witness.found else 'no witness'}"]
        for name, value in sorted(witness.instantiation.items()):
            lines.append(f"  {name} = {value}")
        for verdict in witness.premises:
            lines.append(f"  premise    {pretty_equation(verdict.equation)}: {verdict}")
        if witness.conclusion is not None:
            lines.append(f"  conclusion {pretty_equation(witness.conclusion.equation)}: "
                         f"{witness.conclusion}")
            if witness.conclusion.counterexample is not None:
                lines.append(f"    {format_counterexample(witness.conclusion.counterexample)}")
        if witness.note:
            lines.append(f"  {witness.note}")
        payload = {
            "variant": witness.variant,
            "found": witness.found,
            "instantiation": dict(sorted(witness.instantiation.items())),
            "premises": [pretty_equation(v.equation) for v in witness.premises],
            "conclusion": (pretty_equation(witness.conclusion.equation)
                           if witness.conclusion is not None else None),
            "counterexample": (counterexample_dict(witness.conclusion.counterexample)
                               if witness.conclusion is not None else None),
            "note": witness.note,
        }
        return self._emit("witness", witness.found, payload, lines)
