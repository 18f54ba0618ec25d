"""
有理数格式化工具
精确值的渲染与解析（十进制仅用于展示）
"""

import re
from fractions import Fraction
from typing import Dict, Optional


_RATIONAL_PATTERN = re.compile(r'^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$')


def render_rational(value: Fraction) -> str:
    """渲染为 "p/q"，整数时只输出 p"""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_decimal(value: Fraction, precision: int) -> str:
    """按给定位数渲染十进制（四舍六入五成双）"""
    if precision < 0:
        raise ValueError(f"precision must be non-negative, got {precision}")

    # Fraction 的 round() 对恰好一半的情况取偶数
    scaled = round(value * 10 ** precision)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled))
    if precision == 0:
        return sign + digits

    digits = digits.rjust(precision + 1, '0')
    return f"{sign}{digits[:-precision]}.{digits[-precision:]}"


def render_approx(value: Fraction, precision: int) -> str:
    """精确值加近似值，例如 "90/91 (≈0.98901099)" """
    return f"{render_rational(value)} (≈{render_decimal(value, precision)})"


def rational_to_dict(value: Optional[Fraction]) -> Optional[Dict[str, int]]:
    """JSON 用的 {num, den} 结构"""
    if value is None:
        return None
    return {"num": value.numerator, "den": value.denominator}


def rational_from_dict(data: Dict[str, int]) -> Fraction:
    return Fraction(int(data["num"]), int(data["den"]))


def parse_rational(text: str) -> Fraction:
    """解析 "p/q" 或 "p" 形式的精确有理数"""
    match = _RATIONAL_PATTERN.match(text)
    if not match:
        raise ValueError(f"not an exact rational: {text!r}")

    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) else 1
    if denominator == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(numerator, denominator)
