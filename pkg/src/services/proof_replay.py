"""
证明重放服务
构造块分解 T_1 ... T_{k+2}, S，检查块之间的交换模式，
汇总拟态射系数账本并端到端重新推出上界
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from loguru import logger

from . import homology_rep, scl_bounds, trace_words
from .trace_words import Word
from ..utils.formatting import rational_to_dict, render_rational


@dataclass(frozen=True)
class ChainBlock:
    """一个块；position 为 T_i 的 i，S 为 None"""
    label: str
    position: Optional[int]
    index_range: Optional[Tuple[int, int]]
    squared_first: bool
    direction: str
    word: Word

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "word": _twist_string(self.word),
            "range": None if self.index_range is None else list(self.index_range),
            "squared_first": self.squared_first,
            "direction": self.direction,
        }


@dataclass(frozen=True)
class Violation:
    """两个非相邻块中相交的曲线对 (a, b)"""
    first: str
    second: str
    a: int
    b: int

    def __str__(self) -> str:
        return f"{self.first}/{self.second}: c{self.a}, c{self.b}"


@dataclass(frozen=True)
class LinearForm:
    """c_h·φ_h + c_r·φ_r，φ_h = φ(t_{s_h})，φ_r = φ(t_{s_r})"""
    phi_h: Fraction = Fraction(0)
    phi_r: Fraction = Fraction(0)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(self.phi_h + other.phi_h, self.phi_r + other.phi_r)

    def __neg__(self) -> "LinearForm":
        return LinearForm(-self.phi_h, -self.phi_r)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def to_dict(self) -> Dict[str, Any]:
        return {"phi_h": rational_to_dict(self.phi_h), "phi_r": rational_to_dict(self.phi_r)}

    def __str__(self) -> str:
        terms = []
        if self.phi_h:
            terms.append(f"{render_rational(self.phi_h)}·φ_h")
        if self.phi_r:
            terms.append(f"{render_rational(self.phi_r)}·φ_r")
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class PhiLedger:
    """拟态射取值账本

    defect_inequality = (A, B, 1)，表示 A|φ_h| <= B|φ_r| + D(φ)
    """
    g: int
    h: int
    k: int
    r: int
    entries: Dict[str, LinearForm]
    product_value: LinearForm
    defect_inequality: Tuple[Fraction, Fraction, Fraction]
    scl_coefficient: Fraction
    constant: Fraction

    def to_dict(self) -> Dict[str, Any]:
        A, B, D = self.defect_inequality
        return {
            "entries": {label: form.to_dict() for label, form in self.entries.items()},
            "product_value": self.product_value.to_dict(),
            "defect_coefficients": {
                "phi_h": rational_to_dict(A),
                "phi_r": rational_to_dict(B),
                "defect": rational_to_dict(D),
            },
            "scl_coefficient": rational_to_dict(self.scl_coefficient),
            "constant": rational_to_dict(self.constant),
        }


@dataclass
class ReplayReport:
    """一次重放的结果"""
    g: int
    h: int
    k: int
    r: int
    blocks: List[ChainBlock]
    checks: Dict[str, bool]
    ledger: PhiLedger
    bound: Fraction
    findings: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "g": self.g,
            "h": self.h,
            "k": self.k,
            "r": self.r,
            "blocks": [block.to_dict() for block in self.blocks],
            "checks": {name: "pass" if ok else "fail" for name, ok in self.checks.items()},
            "ledger": self.ledger.to_dict(),
            "bound": rational_to_dict(self.bound),
            "findings": list(self.findings),
            "passed": self.passed,
        }

    def render_text(self) -> str:
        lines = [f"Proof replay g={self.g} h={self.h} (k={self.k}, r={self.r})"]
        for block in self.blocks:
            lines.append(f"  {block.label:<6} {_twist_string(block.word)}")
        lines.append("  checks (homology_* are homology-level verification):")
        for name, ok in self.checks.items():
            lines.append(f"    [{'pass' if ok else 'FAIL'}] {name}")
        lines.append("  ledger:")
        for label, form in self.ledger.entries.items():
            lines.append(f"    φ({label}) = {form}")
        lines.append(f"    φ(T1...T{self.k + 2}) = {self.ledger.product_value}")
        A, B, _ = self.ledger.defect_inequality
        lines.append(f"    {render_rational(A)}|φ_h| <= {render_rational(B)}|φ_r| + D(φ)")
        for finding in self.findings:
            lines.append(f"  finding: {finding}")
        lines.append(f"  bound: {render_rational(self.bound)}")
        return "\n".join(lines)


def _twist_string(word: Word) -> str:
    if not word.letters:
        return "1"
    return " ".join(f"t{letter.index}" if letter.sign == 1 else f"t{letter.index}^-1"
                    for letter in word.letters)


def build_blocks(g: int, h: int) -> List[ChainBlock]:
    """T_1, ..., T_{k+2}, S（r = 0 时 T_k 为空字）"""
    k, r = scl_bounds.decompose(g, h)
    size = 2 * g + 1

    def block(label, position, low, high, squared, direction, indices):
        index_range = (low, high) if low <= high else None
        return ChainBlock(label, position, index_range, squared, direction, Word.from_signed(indices, size))

    blocks = [block("T1", 1, 1, 2 * h, True, "ascending", homology_rep.first_block_word(h))]
    for i in range(2, k):
        low, high = 2 * (i - 1) * h + 1, 2 * i * h
        blocks.append(block(f"T{i}", i, low, high, False, "ascending", range(low, high + 1)))

    low, high = 2 * (k - 1) * h + 1, 2 * (g - h)
    blocks.append(block(f"T{k}", k, low, high, False, "ascending", range(low, high + 1)))

    low, high = 2 * (g - h) + 1, 2 * g
    blocks.append(block(f"T{k + 1}", k + 1, low, high, False, "ascending", range(low, high + 1)))
    blocks.append(block(f"T{k + 2}", k + 2, 2 * (g - h) + 2, 2 * g + 1, True, "descending",
                        homology_rep.last_block_word(g, h)))
    blocks.append(block("S", None, 2, 2 * (g - h) + 1, False, "descending",
                        homology_rep.descending_block_word(g, h)))
    logger.debug(f"({g},{h}) 块分解: " + ", ".join(f"{b.label}={_twist_string(b.word)}" for b in blocks))
    return blocks


def _t_blocks(blocks: List[ChainBlock]) -> List[ChainBlock]:
    return [block for block in blocks if block.position is not None]


def commutation_violations(blocks: List[ChainBlock]) -> List[Violation]:
    """序列中相距 >= 2 的 T 块之间所有 |a-b| <= 1 的字母对

    距离按块在列表中的位置计算，S 不参与。
    """
    t_blocks = _t_blocks(blocks)
    violations = []
    for p, first in enumerate(t_blocks):
        first_indices = sorted({letter.index for letter in first.word.letters})
        for second in t_blocks[p + 2:]:
            second_indices = sorted({letter.index for letter in second.word.letters})
            for a in first_indices:
                for b in second_indices:
                    if not trace_words.commutes(a, b):
                        violations.append(Violation(first.label, second.label, a, b))
    return violations


def check_commutation_pattern(blocks: List[ChainBlock]) -> bool:
    """相距 >= 2 的块逐字母两两不交（曲线下标相差 >= 2）"""
    return not commutation_violations(blocks)


def effective_blocks(blocks: List[ChainBlock]) -> List[ChainBlock]:
    """去掉空字的 T 块"""
    return [block for block in _t_blocks(blocks) if block.word.letters]


def _violation_bridges_empty_block(violation: Violation, blocks: List[ChainBlock]) -> bool:
    labels = [block.label for block in _t_blocks(blocks)]
    p, q = labels.index(violation.first), labels.index(violation.second)
    between = _t_blocks(blocks)[p + 1:q]
    return all(not block.word.letters for block in between)


def block_exponents(g: int, h: int) -> Dict[str, int]:
    """各块对应分离扭转的幂次（账本系数的分母除以 2 再乘 2）"""
    k, r = scl_bounds.decompose(g, h)
    exponents = {"T1": 4 * h}
    for i in range(2, k):
        exponents[f"T{i}"] = 4 * h + 2
    if r > 0:
        exponents[f"T{k}"] = 4 * r + 2
    exponents[f"T{k + 1}"] = 4 * h + 2
    exponents[f"T{k + 2}"] = 4 * h
    exponents["S"] = 4 * (g - h) + 2
    return exponents


def check_block_powers(g: int, h: int) -> Dict[str, int]:
    """每个块的对应幂次在同调上的偏差，全部为 0 才算通过"""
    exponents = block_exponents(g, h)
    residuals = {}
    for block in build_blocks(g, h):
        if block.label not in exponents:
            continue
        matrix = homology_rep.evaluate(block.word.to_signed(), g)
        residuals[block.label] = homology_rep.residual(
            homology_rep.power(matrix, exponents[block.label]), homology_rep.identity(g)
        )
    return residuals


def assemble_ledger(g: int, h: int) -> PhiLedger:
    """按各块的拟态射取值组装账本并化简亏量不等式"""
    k, r = scl_bounds.decompose(g, h)

    entries: Dict[str, LinearForm] = {"T1": LinearForm(Fraction(1, 4 * h))}
    for i in range(2, k):
        entries[f"T{i}"] = LinearForm(Fraction(1, 4 * h + 2))
    # r = 0 时 t_{s_0} 为恒等，φ_r 项为零
    entries[f"T{k}"] = LinearForm(phi_r=Fraction(1, 4 * r + 2)) if r > 0 else LinearForm()
    entries[f"T{k + 1}"] = LinearForm(Fraction(1, 4 * h + 2))
    entries[f"T{k + 2}"] = LinearForm(Fraction(1, 4 * h))
    entries["S"] = LinearForm(Fraction(1, 4 * (g - h) + 2))

    product_value = -entries["S"]
    block_sum = LinearForm()
    for label, form in entries.items():
        if label != "S":
            block_sum = block_sum + form

    # |φ(T_1...T_{k+2}) - Σ φ(T_i)| = |A φ_h + B φ_r| <= D(φ)
    difference = product_value - block_sum
    A, B = -difference.phi_h, -difference.phi_r
    contributions = [-product_value.phi_h] + [form.phi_h for label, form in entries.items() if label != "S"]
    if any(c < 0 for c in contributions) or B < 0 or A <= 0:
        raise ArithmeticError(f"({g},{h}) 账本系数符号不一致: A={A}, B={B}")

    ledger = PhiLedger(
        g=g,
        h=h,
        k=k,
        r=r,
        entries=entries,
        product_value=product_value,
        defect_inequality=(A, B, Fraction(1)),
        scl_coefficient=B / A,
        constant=1 / (2 * A),
    )
    logger.debug(f"({g},{h}) 账本: A={A}, B={B}")
    return ledger


def derive_bound(ledger: PhiLedger) -> Fraction:
    """scl_h <= (B/A)·scl_r + 1/(2A)，对 φ_r 递归代入同样的账本"""
    if ledger.r == 0:
        return ledger.constant
    return ledger.scl_coefficient * derive_bound(assemble_ledger(ledger.g, ledger.r)) + ledger.constant


def _bookkeeping_ok(g: int, h: int, k: int, r: int, blocks: List[ChainBlock]) -> bool:
    by_label = {block.label: block for block in blocks}
    lengths_ok = (
        len(by_label[f"T{k}"].word) == 2 * r
        and len(by_label["T1"].word) == 2 * h + 1
        and len(by_label[f"T{k + 2}"].word) == 2 * h + 1
        and len(by_label["S"].word) == 2 * (g - h)
    )
    # t_1^2 t_2 ... t_{2g} t_{2g+1}^2 t_{2g} ... t_2
    expected = [1] + list(range(1, 2 * g + 2)) + list(range(2 * g + 1, 1, -1))
    concatenated = []
    for block in blocks:
        concatenated.extend(block.word.to_signed())
    return lengths_ok and concatenated == expected


def _substitution_ok(certificate: trace_words.ConjugationCertificate, images: List[Word], size: int) -> bool:
    """把块级证书代入曲线下标，逐步重新检查"""
    for step in certificate.steps:
        before = trace_words.substitute(step.before, images, size)
        after = trace_words.substitute(step.after, images, size)
        conjugator = trace_words.substitute(step.conjugator, images, size)
        if not trace_words.equal(trace_words.conjugate(before, conjugator), after):
            return False
    straight = trace_words.substitute(certificate.straight, images, size)
    product = Word(tuple(letter for image in images for letter in image.letters), size)
    return straight == product


def replay_report(g: int, h: int, oracle_max_n: int = 6, homology_max_genus: int = 8) -> ReplayReport:
    """重放整个证明：块、交换模式、共轭证书、同调检查、账本与上界"""
    try:
        k, r = scl_bounds.decompose(g, h)
    except ValueError as e:
        raise ValueError(f"replay(g={g}, h={h}): {e}") from e

    try:
        blocks = build_blocks(g, h)
        checks: Dict[str, bool] = {}
        findings: List[str] = []

        checks["block_bookkeeping"] = _bookkeeping_ok(g, h, k, r, blocks)

        raw = commutation_violations(blocks)
        effective = effective_blocks(blocks)
        bridged = all(_violation_bridges_empty_block(v, blocks) for v in raw)
        checks["commutation_pattern"] = check_commutation_pattern(effective) and bridged
        if raw:
            findings.append(
                f"raw blocks violate the distance-2 commutation pattern ({'; '.join(str(v) for v in raw)}); "
                f"T{k} is empty, so the rearrangement uses the {len(effective)} nonempty blocks"
            )

        certificate = trace_words.lemma8_verify(len(effective), oracle_max_n)
        checks["lemma8_certificate"] = certificate.valid
        checks["lemma8_substitution"] = _substitution_ok(certificate, [b.word for b in effective], 2 * g + 1)

        if g <= homology_max_genus:
            checks["homology_hyperelliptic"] = homology_rep.check_hyperelliptic(g)
            checks["homology_chain_relation"] = homology_rep.check_chain_relation(g, h)
            checks["homology_T1_power"] = homology_rep.check_T1_power(g, h)
            checks["homology_S_power"] = homology_rep.check_S_power(g, h)
            checks["homology_eq5"] = homology_rep.check_eq5(g, h)
            checks["homology_block_powers"] = not any(check_block_powers(g, h).values())
        else:
            findings.append(f"homology checks skipped above genus {homology_max_genus}")

        ledger = assemble_ledger(g, h)
        A = ledger.defect_inequality[0]
        expected_A = Fraction((g + 1) * (2 * g + 1) - (2 * g - 2 * h + 1) * r,
                              2 * h * (2 * h + 1) * (2 * g - 2 * h + 1))
        checks["coefficient_identity"] = scl_bounds.coefficient_identity_check(g, h) and A == expected_A

        derived = derive_bound(ledger)
        checks["bound_agreement"] = derived == scl_bounds.bound(g, h).value
    except Exception as e:
        logger.error(f"({g},{h}) 重放失败: {e}")
        # 内部失败不是参数错误
        raise RuntimeError(f"replay(g={g}, h={h}): {type(e).__name__}: {e}") from e

    report = ReplayReport(g, h, k, r, blocks, checks, ledger, derived, findings)
    if not report.passed:
        failed = [name for name, ok in checks.items() if not ok]
        logger.warning(f"({g},{h}) 重放未通过: {failed}")
    return report
