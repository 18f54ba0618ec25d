"""
稳定交换子长度上界服务
分离扭转 t_{s_h} 的递归上界、两个闭式推论、证明中的系数恒等式，
以及与已知参考常数的比较（全部为精确有理数运算）
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Tuple

import sympy
from loguru import logger

from ..utils.formatting import rational_to_dict, render_decimal


G2_NOTE = ("g = 2: the abelianization of the mapping class group is Z/10, "
           "scl is still defined; bound emitted without special-casing")


@dataclass(frozen=True)
class TraceStep:
    """递归路径上的一层"""
    g: int
    h: int
    k: int
    r: int
    value: Fraction

    def to_dict(self) -> Dict[str, Any]:
        return {"g": self.g, "h": self.h, "k": self.k, "r": self.r, "value": rational_to_dict(self.value)}


@dataclass(frozen=True)
class BoundResult:
    """B(g, h) 及其递归路径"""
    g: int
    h: int
    value: Fraction
    decomposition: Optional[Tuple[int, int]]
    trace: Tuple[TraceStep, ...]
    via_symmetry: bool = False
    notes: Tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "g": self.g,
            "h": self.h,
            "value": rational_to_dict(self.value),
            "decomposition": None if self.decomposition is None else
            {"k": self.decomposition[0], "r": self.decomposition[1]},
            "via_symmetry": self.via_symmetry,
            "trace": [step.to_dict() for step in self.trace],
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class BoundRow:
    """表格的一行"""
    g: int
    h: int
    k: Optional[int]
    r: Optional[int]
    bound: Fraction
    lower_ref: Fraction
    nonsep_ref: Fraction
    decimal: str
    via_symmetry: bool = False


@dataclass(frozen=True)
class SweepCheck:
    """一项精确扫描检查"""
    name: str
    passed: bool
    checked: int
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "checked": self.checked, "detail": self.detail}


def _require_range(g: int, h: int):
    if g < 2:
        raise ValueError(f"genus must be >= 2, got {g}")
    if not 1 <= h <= g // 2:
        raise ValueError(f"h must be in 1..{g // 2} for genus {g}, got {h}")


def decompose(g: int, h: int) -> Tuple[int, int]:
    """g = k h + r，0 <= r <= h-1（带余除法，唯一）"""
    _require_range(g, h)
    k, r = divmod(g, h)
    return k, r


def leading_factor(g: int, h: int, r: int) -> Fraction:
    """h(2h+1)(2g-2h+1) / ((g+1)(2g+1) - (2g-2h+1) r)"""
    numerator = h * (2 * h + 1) * (2 * g - 2 * h + 1)
    denominator = (g + 1) * (2 * g + 1) - (2 * g - 2 * h + 1) * r
    return Fraction(numerator, denominator)


@lru_cache(maxsize=None)
def _bound_value(g: int, h: int) -> Fraction:
    if h == 0 or h == g:
        return Fraction(0)
    if h > g // 2:
        return _bound_value(g, g - h)

    k, r = divmod(g, h)
    return leading_factor(g, h, r) * (_bound_value(g, r) / (2 * r + 1) + 1)


def _trace(g: int, h: int) -> List[TraceStep]:
    steps = []
    while 0 < h <= g // 2:
        k, r = divmod(g, h)
        steps.append(TraceStep(g, h, k, r, _bound_value(g, h)))
        h = r
    return steps


def bound(g: int, h: int) -> BoundResult:
    """递归上界 B(g, h)

    B(g,0) = B(g,g) = 0；h > [g/2] 时由共轭对称取 B(g, g-h)
    """
    if g < 2:
        raise ValueError(f"genus must be >= 2, got {g}")
    if not 0 <= h <= g:
        raise ValueError(f"h must be in 0..{g}, got {h}")

    notes = [G2_NOTE] if g == 2 else []
    via_symmetry = h > g // 2 and h != g
    effective = g - h if via_symmetry else h
    if via_symmetry:
        notes.append(f"via symmetry: B({g},{h}) = B({g},{effective})")

    decomposition = None
    if 0 < effective <= g // 2:
        decomposition = divmod(g, effective)

    value = _bound_value(g, effective)
    logger.debug(f"B({g},{h}) = {value}")
    return BoundResult(
        g=g,
        h=h,
        value=value,
        decomposition=decomposition,
        trace=tuple(_trace(g, effective)),
        via_symmetry=via_symmetry,
        notes=tuple(notes),
    )


def corollary1(g: int) -> Fraction:
    """3(2g-1) / ((g+1)(2g+1))"""
    if g < 2:
        raise ValueError(f"genus must be >= 2, got {g}")
    return Fraction(3 * (2 * g - 1), (g + 1) * (2 * g + 1))


def corollary2(g: int, h: int) -> Fraction:
    """g = k h 时的闭式 h(2h+1)(2g-2h+1) / ((g+1)(2g+1))"""
    _require_range(g, h)
    if g % h:
        raise ValueError(f"h = {h} does not divide g = {g}")
    return Fraction(h * (2 * h + 1) * (2 * g - 2 * h + 1), (g + 1) * (2 * g + 1))


def coefficient_identity_check(g: int, h: int) -> bool:
    """1/(4(g-h)+2) + 2/(4h) + (k-1)/(4h+2) 等于
    ((g+1)(2g+1) - (2g-2h+1) r) / (2h(2h+1)(2g-2h+1))
    """
    k, r = decompose(g, h)
    lhs = Fraction(1, 4 * (g - h) + 2) + Fraction(2, 4 * h) + Fraction(k - 1, 4 * h + 2)
    rhs = Fraction((g + 1) * (2 * g + 1) - (2 * g - 2 * h + 1) * r,
                   2 * h * (2 * h + 1) * (2 * g - 2 * h + 1))
    return lhs == rhs


def coefficient_identity_symbolic() -> bool:
    """用多项式展开独立证明系数恒等式（代入 k h = g - r）"""
    g, h, r = sympy.symbols('g h r')
    # 通分到 2h(2h+1)(2g-2h+1) 后的分子
    numerator = h * (2 * h + 1) + (2 * h + 1) * (2 * g - 2 * h + 1) + (g - r - h) * (2 * g - 2 * h + 1)
    target = (g + 1) * (2 * g + 1) - (2 * g - 2 * h + 1) * r
    if sympy.expand(numerator - target) != 0:
        return False

    k = (g - r) / h
    lhs = 1 / (4 * (g - h) + 2) + sympy.Rational(2) / (4 * h) + (k - 1) / (4 * h + 2)
    rhs = target / (2 * h * (2 * h + 1) * (2 * g - 2 * h + 1))
    return sympy.cancel(lhs - rhs) == 0


def reference_lower_bound(g: int) -> Fraction:
    """已知下界 1/(18g+6)（仅作参考常数）"""
    if g < 2:
        raise ValueError(f"genus must be >= 2, got {g}")
    return Fraction(1, 18 * g + 6)


def reference_nonsep_upper(g: int) -> Fraction:
    """非分离曲线的已知上界 1/(4g+6+2/g) = g/(4g^2+6g+2)"""
    if g < 1:
        raise ValueError(f"genus must be >= 1, got {g}")
    return Fraction(g, 4 * g * g + 6 * g + 2)


def table_rows_for_genus(g: int, hs: Iterable[int], precision: int) -> List[BoundRow]:
    """单个亏格的表格行（供并行调度按亏格切分）"""
    rows = []
    for h in sorted(set(hs)):
        result = bound(g, h)
        k, r = result.decomposition if result.decomposition else (None, None)
        rows.append(BoundRow(
            g=g,
            h=h,
            k=k,
            r=r,
            bound=result.value,
            lower_ref=reference_lower_bound(g),
            nonsep_ref=reference_nonsep_upper(g),
            decimal=render_decimal(result.value, precision),
            via_symmetry=result.via_symmetry,
        ))
    return rows


def table(g_min: int, g_max: int, h_spec: Any = "all", precision: int = 8) -> List[BoundRow]:
    """(g, h) 表格，按 (g, h) 排序

    h_spec 为 "all"（1..g-1）、单个整数或整数列表
    """
    if g_min < 2 or g_min > g_max:
        raise ValueError(f"empty or invalid genus range {g_min}..{g_max}")

    rows: List[BoundRow] = []
    for g in range(g_min, g_max + 1):
        if h_spec == "all":
            hs = range(1, g)
        elif isinstance(h_spec, int):
            hs = [h_spec]
        else:
            hs = list(h_spec)
        # 超出 0..g 的 h 在该亏格下没有意义
        rows.extend(table_rows_for_genus(g, [h for h in hs if 0 <= h <= g], precision))

    if not rows:
        raise ValueError(f"table {g_min}..{g_max} with h={h_spec} is empty")
    rows.sort(key=lambda row: (row.g, row.h))
    return rows


def identity_sweep(g_min: int = 2, g_max: int = 300) -> List[SweepCheck]:
    """系数恒等式与各项一致性的精确扫描"""
    if g_min < 2 or g_min > g_max:
        raise ValueError(f"empty or invalid genus range {g_min}..{g_max}")
    logger.info(f"开始精确扫描 g = {g_min}..{g_max}")
    checks = []

    count, failures = 0, []
    for g in range(g_min, g_max + 1):
        for h in range(1, g // 2 + 1):
            count += 1
            if not coefficient_identity_check(g, h):
                failures.append((g, h))
    checks.append(SweepCheck("coefficient_identity", not failures, count, _describe(failures)))

    checks.append(SweepCheck("coefficient_identity_symbolic", coefficient_identity_symbolic(), 1))

    failures = [g for g in range(g_min, g_max + 1) if bound(g, 1).value != corollary1(g)]
    checks.append(SweepCheck("corollary1", not failures, g_max - g_min + 1, _describe(failures)))

    count, failures = 0, []
    for g in range(g_min, g_max + 1):
        for h in range(1, g // 2 + 1):
            if g % h == 0:
                count += 1
                if bound(g, h).value != corollary2(g, h):
                    failures.append((g, h))
    checks.append(SweepCheck("corollary2", not failures, count, _describe(failures)))

    count, failures = 0, []
    for g in range(g_min, g_max + 1):
        for h in range(0, g + 1):
            count += 1
            if bound(g, h).value != bound(g, g - h).value:
                failures.append((g, h))
    checks.append(SweepCheck("symmetry", not failures, count, _describe(failures)))

    count, failures = 0, []
    for g in range(g_min, g_max + 1):
        lower = reference_lower_bound(g)
        for h in range(1, g):
            count += 1
            if bound(g, h).value < lower:
                failures.append((g, h))
    checks.append(SweepCheck("lower_bound_sandwich", not failures, count, _describe(failures)))

    scaled = [g * bound(g, 1).value for g in range(g_min, g_max + 1)]
    increasing = all(a < b for a, b in zip(scaled, scaled[1:]))
    below_three = all(value < 3 for value in scaled)
    detail = "" if increasing and below_three else "g*B(g,1) not strictly increasing below 3"
    checks.append(SweepCheck("asymptotic_order", increasing and below_three, len(scaled), detail))

    if g_min <= 100 <= g_max:
        value = 100 * bound(100, 1).value
        inside = Fraction(29, 10) <= value <= 3
        checks.append(SweepCheck("asymptotic_g100", inside, 1, f"100*B(100,1) = {value}"))

    logger.info(f"精确扫描完成，{sum(1 for check in checks if check.passed)}/{len(checks)} 项通过")
    return checks


def _describe(failures: list) -> str:
    if not failures:
        return ""
    shown = ", ".join(str(item) for item in failures[:5])
    more = f" (+{len(failures) - 5} more)" if len(failures) > 5 else ""
    return f"failed at {shown}{more}"
