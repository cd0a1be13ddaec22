# 朴素的 try/catch 解释器，用来交叉检验展开后的核心项

from dataclasses import dataclass, field
from typing import List, Optional

from src import semantics
from src.config_manager import Limits
from src.logging_config import get_logger
from src.models import TryCatchSpec
from src.theory import Side, Theory, TryBlock
from src.values import UNIT_VAL, Packet, format_value

logger = get_logger(__name__)


def run_try_catch(spec: TryCatchSpec, theory: Theory, value: object,
                  limits: Optional[Limits] = None) -> object:
    """Run a try/catch block directly: first matching clause wins, packets in pass through.

    `all =>` 子句匹配任何异常，排在它后面的子句和 catchall 都不会执行。
    """
    if isinstance(value, Packet):
        return value
    result = semantics.apply(spec.body, theory, value, limits)
    if not isinstance(result, Packet):
        return result

    for handler in spec.handlers:
        if handler.name is None:
            return semantics.apply(handler.body, theory, UNIT_VAL, limits)
        if handler.name == result.name:
            return semantics.apply(handler.body, theory, result.payload, limits)
    if spec.catch_all is not None:
        return semantics.apply(spec.catch_all, theory, UNIT_VAL, limits)
    return result


@dataclass
class Mismatch:
    line: int
    input: object
    elaborated: object
    expected: object

    def __str__(self) -> str:
        return (
            f"line {self.line}: on {format_value(self.input)} the elaborated term gives "
            f"{format_value(self.elaborated)}, the handlers give {format_value(self.expected)}"
        )


@dataclass
class OracleReport:
    blocks: int = 0
    inputs: int = 0
    mismatches: List[Mismatch] = field(default_factory=list)

    @property
    def agrees(self) -> bool:
        return not self.mismatches


def cross_check_block(block: TryBlock, theory: Theory,
                      limits: Optional[Limits] = None) -> List[Mismatch]:
    env = semantics.environment(theory, limits)
    den = semantics.evaluate(block.term, theory, limits)
    mismatches = []
    for x in env.inputs(block.source, 2):
        expected = run_try_catch(block.spec, theory, x, limits)
        if den(x) != expected:
            mismatches.append(Mismatch(block.line, x, den(x), expected))
    return mismatches


def cross_check(theory: Theory, limits: Optional[Limits] = None) -> OracleReport:
    report = OracleReport()
    if theory.side is not Side.EXCEPTIONS:
        return report
    env = semantics.environment(theory, limits)
    for block in theory.try_blocks:
        report.blocks += 1
        report.inputs += len(env.inputs(block.source, 2))
        report.mismatches += cross_check_block(block, theory, limits)
    if report.mismatches:
        logger.warning(f"{len(report.mismatches)} try/catch input(s) disagree with the oracle")
    else:
        logger.debug(f"oracle agrees on {report.blocks} try/catch block(s)")
    return report
