"""deckit 命令行入口。

解析理论文件、检查构成、求值、验证派生树并运行可靠性检验。
"""

import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click

from src import __version__, semantics
from src.config_manager import ConfigManager, Limits
from src.error_handler import ErrorHandler, ExitStatus, UndeclaredName
from src.frontend import (
    check_theory,
    load_derivation,
    load_theory,
    parse_term,
    parse_type,
    parse_value,
    pretty_term,
)
from src.kernel import check_derivation
from src.logging_config import get_logger, setup_logging
from src.oracle import cross_check
from src.profiles import PROFILE_NAMES, get_profile
from src.report_generator import CheckOutcome, ReportGenerator
from src.rules import rule_catalog
from src.soundness import WITNESS_VARIANTS, check_all_rules, check_compatibility
from src.soundness import find_side_condition_witness
from src.theory import Theory
from src.values import StatePoint, StateVal, format_value

logger = get_logger(__name__)

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class Context:
    def __init__(self, config: ConfigManager):
        self.config = config
        self.limits: Limits = config.get_limits()
        self.errors = ErrorHandler()


def json_option(func: Callable) -> Callable:
    return click.option("--json", "as_json", is_flag=True, help="输出结构化 JSON 报告")(func)


def _finish(ctx: Context, operation: Callable[[], ExitStatus], name: str) -> None:
    status = ctx.errors.run_guarded(operation, name)
    if status is not ExitStatus.OK:
        for error in ctx.errors.errors[-1:]:
            click.echo(f"error: {error}", err=True)
    sys.exit(int(status))


def _load(path: str) -> Theory:
    theory = load_theory(path)
    logger.info(
        f"Loaded theory '{theory.name}' ({theory.side.value}, logic {theory.profile.name}): "
        f"{len(theory.effects)} effect name(s), {len(theory.ops)} op(s), {len(theory.checks)} check(s)"
    )
    return theory


@click.group()
@click.version_option(__version__, prog_name="deckit")
@click.option("--config", default="deckit.yaml", help="配置文件路径", show_default=True)
@click.option("--log-level", default=None, type=click.Choice(LOG_LEVELS, case_sensitive=False),
              help="日志级别（默认取配置文件）")
@click.pass_context
def cli(click_ctx: click.Context, config: str, log_level: Optional[str]) -> None:
    """deckit - 装饰等式逻辑的证明核与有限模型检查器。"""
    manager = ConfigManager(config)
    logging_config = manager.get_logging_config()
    setup_logging(log_level or logging_config.get("level", "WARNING"),
                  logging_config.get("directory"))
    click_ctx.obj = Context(manager)


@cli.command()
@click.argument("theory_file", type=click.Path(exists=True, dir_okay=False))
@json_option
@click.pass_obj
def check(ctx: Context, theory_file: str, as_json: bool) -> None:
    """解析并检查理论文件的类型与构成。"""

    def run() -> ExitStatus:
        theory = _load(theory_file)
        diagnostics = check_theory(theory)
        click.echo(ReportGenerator(as_json).render_check(theory.name, diagnostics))
        return ExitStatus.INVALID_INPUT if diagnostics else ExitStatus.OK

    _finish(ctx, run, "check")


@cli.command()
@click.argument("theory_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--only", default=None, help="只运行指定名称的 check 语句")
@click.option("--timing", is_flag=True, help="报告耗时")
@json_option
@click.pass_obj
def verify(ctx: Context, theory_file: str, only: Optional[str], timing: bool,
           as_json: bool) -> None:
    """运行所有 check 语句并与期望比较。"""

    def run() -> ExitStatus:
        start = time.perf_counter()
        theory = _load(theory_file)
        checks = list(theory.checks)
        if only is not None:
            checks = [c for c in checks if c.name == only]
            if not checks:
                raise UndeclaredName("check", only)
        outcomes = [CheckOutcome(c, semantics.decide(c.equation, theory, ctx.limits))
                    for c in checks]
        oracle = cross_check(theory, ctx.limits) if only is None else None
        elapsed = time.perf_counter() - start
        report = ReportGenerator(as_json, timing)
        click.echo(report.render_verify(theory.name, outcomes, oracle, elapsed))
        failed = [o for o in outcomes if not o.passed]
        logger.info(f"verify: {len(outcomes) - len(failed)}/{len(outcomes)} as expected")
        if failed or (oracle is not None and not oracle.agrees):
            return ExitStatus.CHECK_FAILED
        return ExitStatus.OK

    _finish(ctx, run, "verify")


def _eval_rows(theory: Theory, term, value, state: Optional[StateVal],
               limits: Limits) -> List[Dict[str, Any]]:
    inputs = [value]
    if theory.uses_state_model and not isinstance(value, StatePoint):
        states = [state] if state is not None else list(semantics.environment(theory, limits).states)
        inputs = [StatePoint(value, s) for s in states]
    return [
        {
            "term": pretty_term(term),
            "input": format_value(x),
            "output": format_value(semantics.apply(term, theory, x, limits)),
        }
        for x in inputs
    ]


@cli.command(name="eval")
@click.argument("theory_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--term", "term_text", default=None, help="要求值的项（默认运行文件中的 eval 语句）")
@click.option("--input", "input_text", default=None, help="输入值")
@click.option("--state", "state_text", default=None, help="初始状态，如 {X=0}")
@json_option
@click.pass_obj
def eval_command(ctx: Context, theory_file: str, term_text: Optional[str],
                 input_text: Optional[str], state_text: Optional[str], as_json: bool) -> None:
    """在有限模型中对项求值。"""

    def run() -> ExitStatus:
        theory = _load(theory_file)
        state = parse_value(state_text, theory) if state_text is not None else None
        if state is not None and not isinstance(state, StateVal):
            raise click.BadParameter("expected a state such as {X=0}", param_hint="--state")
        rows: List[Dict[str, Any]] = []
        if term_text is not None:
            if input_text is None:
                raise click.BadParameter("--term needs --input", param_hint="--input")
            term = parse_term(term_text, theory)
            rows += _eval_rows(theory, term, parse_value(input_text, theory), state, ctx.limits)
        else:
            for stmt in theory.evals:
                rows += _eval_rows(theory, stmt.term, stmt.input, state, ctx.limits)
        click.echo(ReportGenerator(as_json).render_eval(rows))
        return ExitStatus.OK

    _finish(ctx, run, "eval")


@cli.command()
@click.argument("theory_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--proof", "proof_file", required=True,
              type=click.Path(exists=True, dir_okay=False), help="派生文件 (.dpf)")
@json_option
@click.pass_obj
def prove(ctx: Context, theory_file: str, proof_file: str, as_json: bool) -> None:
    """用证明核检查派生树。"""

    def run() -> ExitStatus:
        theory = _load(theory_file)
        derivation = load_derivation(proof_file, theory)
        verdict = check_derivation(derivation, theory)
        click.echo(ReportGenerator(as_json).render_proof(Path(proof_file).name, verdict))
        return ExitStatus.OK if verdict.accepted else ExitStatus.CHECK_FAILED

    _finish(ctx, run, "prove")


@cli.command()
@click.argument("theory_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--rules", "rule_names", default="all", show_default=True,
              help="all 或逗号分隔的规则名")
@click.option("--samples", type=int, default=None, help="每条规则的采样数（默认取配置）")
@click.option("--seed", type=int, default=None, help="随机种子（默认取配置）")
@click.option("--workers", type=int, default=None, help="并行线程数（默认取配置）")
@click.option("--timing", is_flag=True, help="报告耗时")
@json_option
@click.pass_obj
def soundness(ctx: Context, theory_file: str, rule_names: str, samples: Optional[int],
              seed: Optional[int], workers: Optional[int], timing: bool, as_json: bool) -> None:
    """在有限模型中随机检验推理规则的可靠性。"""

    def run() -> ExitStatus:
        settings = ctx.config.get_soundness_settings()
        start = time.perf_counter()
        theory = _load(theory_file)
        names = None if rule_names == "all" else [n.strip() for n in rule_names.split(",")]
        reports = check_all_rules(
            theory,
            names,
            samples=samples if samples is not None else settings.samples,
            seed=seed if seed is not None else settings.seed,
            max_depth=settings.max_depth,
            workers=workers if workers is not None else settings.workers,
            limits=ctx.limits,
        )
        elapsed = time.perf_counter() - start
        click.echo(ReportGenerator(as_json, timing).render_soundness(reports, elapsed))
        return ExitStatus.OK if all(r.sound for r in reports) else ExitStatus.CHECK_FAILED

    _finish(ctx, run, "soundness")


@cli.command()
@click.option("--logic", required=True, type=click.Choice(PROFILE_NAMES, case_sensitive=False),
              help="逻辑配置")
@json_option
@click.pass_obj
def rules(ctx: Context, logic: str, as_json: bool) -> None:
    """打印逻辑配置的规则目录。"""

    def run() -> ExitStatus:
        profile = get_profile(logic)
        click.echo(ReportGenerator(as_json).render_rules(profile.name, rule_catalog(profile)))
        return ExitStatus.OK

    _finish(ctx, run, "rules")


@cli.command()
@click.argument("theory_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--source", "source_text", default=None, help="源类型（默认 1）")
@click.option("--target", "target_text", default=None, help="目标类型（默认第一个 V_T）")
@json_option
@click.pass_obj
def compat(ctx: Context, theory_file: str, source_text: Optional[str],
           target_text: Optional[str], as_json: bool) -> None:
    """穷举检查配对与余配对的存在唯一性。"""

    def run() -> ExitStatus:
        theory = _load(theory_file)
        source = parse_type(source_text) if source_text else None
        target = parse_type(target_text) if target_text else None
        results = check_compatibility(theory, source, target, ctx.limits)
        click.echo(ReportGenerator(as_json).render_compat(theory.name, results))
        return ExitStatus.OK if all(r.holds for r in results) else ExitStatus.CHECK_FAILED

    _finish(ctx, run, "compat")


@cli.command()
@click.argument("theory_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("variant", type=click.Choice(WITNESS_VARIANTS))
@click.option("--samples", type=int, default=None, help="随机搜索的采样数")
@click.option("--seed", type=int, default=None, help="随机种子")
@json_option
@click.pass_obj
def witness(ctx: Context, theory_file: str, variant: str, samples: Optional[int],
            seed: Optional[int], as_json: bool) -> None:
    """为去掉副条件的规则寻找反例。"""

    def run() -> ExitStatus:
        settings = ctx.config.get_soundness_settings()
        theory = _load(theory_file)
        found = find_side_condition_witness(
            variant, theory,
            samples=samples if samples is not None else settings.samples,
            seed=seed if seed is not None else settings.seed,
            limits=ctx.limits,
        )
        click.echo(ReportGenerator(as_json).render_witness(found))
        return ExitStatus.OK if found.found else ExitStatus.CHECK_FAILED

    _finish(ctx, run, "witness")


if __name__ == "__main__":
    cli()
