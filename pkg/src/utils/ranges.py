"""
参数范围解析工具
解析 --g / --h / --n 的取值（单个整数、a..b 区间、逗号列表、all）
"""

import re
from typing import List, Optional, Tuple, Union


_INT_PATTERN = re.compile(r'^\s*(-?\d+)\s*$')
_RANGE_PATTERN = re.compile(r'^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$')

HSpec = Union[str, List[int]]


def parse_int(text: str) -> Optional[int]:
    """解析整数，失败返回 None"""
    if text is None:
        return None
    match = _INT_PATTERN.match(text)
    if not match:
        return None
    return int(match.group(1))


def parse_range(text: str) -> Optional[Tuple[int, int]]:
    """解析 "a..b" 或单个整数 "a"，失败或空区间返回 None"""
    if text is None:
        return None

    match = _RANGE_PATTERN.match(text)
    if match:
        low, high = int(match.group(1)), int(match.group(2))
    else:
        value = parse_int(text)
        if value is None:
            return None
        low = high = value

    if low > high:
        return None
    return low, high


def parse_h_spec(text: str) -> Optional[HSpec]:
    """解析 h 的取值："all"、单个整数、逗号列表或区间"""
    if text is None:
        return None

    text = text.strip().lower()
    if text == "all":
        return "all"

    if ',' in text:
        values = [parse_int(part) for part in text.split(',')]
        if any(value is None for value in values):
            return None
        return sorted(set(values))

    bounds = parse_range(text)
    if bounds is None:
        return None
    return list(range(bounds[0], bounds[1] + 1))


def expand_h(h_spec: HSpec, g: int, replay: bool = False) -> List[int]:
    """按亏格展开 h 的取值

    "all" 在表格中表示 1..g-1，在证明重放中表示 1..[g/2]
    """
    if h_spec == "all":
        upper = g // 2 if replay else g - 1
        return list(range(1, upper + 1))
    return list(h_spec)
