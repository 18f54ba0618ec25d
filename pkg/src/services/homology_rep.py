"""
一阶同调上的辛表示服务
Dehn 扭转 t_{c_1} ... t_{c_{2g+1}} 作为横截变换 x -> x + <x, v> v 作用在
H_1 上，逐条验证证明中用到的关系（同调层面的必要条件）
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import sympy
from loguru import logger


VERIFICATION_LABEL = "homology-level verification"


@dataclass(frozen=True)
class HomologyCheck:
    """单项同调检查结果；residual 为 |M - 目标| 的最大元素"""
    name: str
    params: Dict[str, int]
    passed: bool
    residual: int = 0

    def to_dict(self) -> Dict[str, Any]:
        data = {"name": self.name, "params": dict(self.params), "passed": self.passed}
        if not self.passed:
            data["residual"] = self.residual
        return data


def _require_genus(g: int):
    if g < 1:
        raise ValueError(f"genus must be >= 1, got {g}")


def _require_index(g: int, i: int):
    _require_genus(g)
    if not 1 <= i <= 2 * g + 1:
        raise ValueError(f"twist index must be in 1..{2 * g + 1}, got {i}")


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix.flags.writeable = False
    return matrix


def _zeros(size: int) -> np.ndarray:
    return np.array([[0] * size for _ in range(size)], dtype=object)


@lru_cache(maxsize=None)
def identity(g: int) -> np.ndarray:
    _require_genus(g)
    size = 2 * g
    return _frozen(np.array([[int(r == c) for c in range(size)] for r in range(size)], dtype=object))


@lru_cache(maxsize=None)
def intersection_form(g: int) -> np.ndarray:
    """基 a_1, b_1, ..., a_g, b_g 下的交叉形式 J，<a_i, b_i> = 1"""
    _require_genus(g)
    J = _zeros(2 * g)
    for i in range(g):
        J[2 * i, 2 * i + 1] = 1
        J[2 * i + 1, 2 * i] = -1
    return _frozen(J)


def pairing(x: np.ndarray, y: np.ndarray, g: int) -> int:
    """<x, y> = x^T J y"""
    return int(x @ intersection_form(g) @ y)


def _basis(g: int, position: int) -> np.ndarray:
    vector = np.array([0] * (2 * g), dtype=object)
    vector[position] = 1
    return vector


@lru_cache(maxsize=None)
def chain_classes(g: int) -> tuple:
    """链曲线的同调类 v_1 .. v_{2g+1}

    v_{2i} = b_i，v_{2i-1} = a_i - a_{i-1}（a_0 = 0），v_{2g+1} = -a_g
    """
    _require_genus(g)
    a = [_basis(g, 2 * i) for i in range(g)]
    b = [_basis(g, 2 * i + 1) for i in range(g)]

    classes = []
    for i in range(g):
        previous = a[i - 1] if i > 0 else np.array([0] * (2 * g), dtype=object)
        classes.append(_frozen(a[i] - previous))
        classes.append(_frozen(b[i].copy()))
    classes.append(_frozen(-a[g - 1]))
    return tuple(classes)


def transvection(v: np.ndarray, g: int, power: int = 1) -> np.ndarray:
    """x -> x + power * <x, v> v 的矩阵 I + power * v (Jv)^T"""
    Jv = intersection_form(g) @ v
    return identity(g) + power * np.outer(v, Jv)


@lru_cache(maxsize=None)
def twist_matrix(g: int, i: int) -> np.ndarray:
    """t_{c_i} 在 H_1 上的作用"""
    _require_index(g, i)
    return _frozen(transvection(chain_classes(g)[i - 1], g))


@lru_cache(maxsize=None)
def inverse_twist_matrix(g: int, i: int) -> np.ndarray:
    _require_index(g, i)
    return _frozen(transvection(chain_classes(g)[i - 1], g, power=-1))


def evaluate(word: Sequence[int], g: int) -> np.ndarray:
    """从左到右相乘；负下标取逆矩阵，空字为单位阵"""
    J = intersection_form(g)
    result = identity(g)
    for value in word:
        if value == 0:
            raise ValueError("signed index 0 is not a twist")
        _require_index(g, abs(value))
        v = chain_classes(g)[abs(value) - 1]
        sign = 1 if value > 0 else -1
        # M (I + s v (Jv)^T) = M + s (Mv)(Jv)^T，秩一更新
        result = result + sign * np.outer(result @ v, J @ v)
    return result


def power(matrix: np.ndarray, exponent: int) -> np.ndarray:
    return np.linalg.matrix_power(matrix, exponent)


def is_symplectic(matrix: np.ndarray, g: int) -> bool:
    """M^T J M = J"""
    J = intersection_form(g)
    return bool(np.array_equal(matrix.T @ J @ matrix, J))


def determinant(matrix: np.ndarray) -> int:
    return int(sympy.Matrix(matrix.tolist()).det())


def residual(matrix: np.ndarray, target: np.ndarray) -> int:
    """最大偏差 max |M - target|，0 表示相等"""
    return max((abs(int(x)) for x in (matrix - target).flat), default=0)


def _require_h(g: int, h: int, upper: int, name: str):
    if not 1 <= h <= upper:
        raise ValueError(f"h must be in 1..{upper} for {name} at genus {g}, got {h}")


def chain_word(h: int) -> List[int]:
    return list(range(1, 2 * h + 1))


def chain_relation_residual(g: int, h: int, exponent: Optional[int] = None) -> int:
    _require_genus(g)
    _require_h(g, h, g, "the chain relation")
    exponent = 4 * h + 2 if exponent is None else exponent
    return residual(power(evaluate(chain_word(h), g), exponent), identity(g))


def check_chain_relation(g: int, h: int, exponent: Optional[int] = None) -> bool:
    """(t_1 ... t_{2h})^{4h+2} 在同调上为单位阵（分离扭转属于 Torelli 群）"""
    return chain_relation_residual(g, h, exponent) == 0


def hyperelliptic_word(g: int) -> List[int]:
    """t_1 t_2 ... t_{2g} t_{2g+1}^2 t_{2g} ... t_1"""
    ascending = list(range(1, 2 * g + 1))
    return ascending + [2 * g + 1, 2 * g + 1] + ascending[::-1]


def hyperelliptic_residual(g: int) -> int:
    _require_genus(g)
    iota = evaluate(hyperelliptic_word(g), g)
    deviation = residual(iota, -identity(g))
    for i in range(1, 2 * g + 2):
        t = twist_matrix(g, i)
        deviation = max(deviation, residual(iota @ t, t @ iota))
    return deviation


def check_hyperelliptic(g: int) -> bool:
    """iota 作用为 -I，且与每个 t_i 交换"""
    return hyperelliptic_residual(g) == 0


def _require_block_params(g: int, h: int):
    _require_genus(g)
    if g < 2:
        raise ValueError(f"block decomposition needs genus >= 2, got {g}")
    _require_h(g, h, g // 2, "the block decomposition")


def first_block_word(h: int) -> List[int]:
    """T_1 = t_1^2 t_2 ... t_{2h}"""
    return [1] + list(range(1, 2 * h + 1))


def last_block_word(g: int, h: int) -> List[int]:
    """T_{k+2} = t_{2g+1}^2 t_{2g} ... t_{2(g-h)+2}"""
    return [2 * g + 1] + list(range(2 * g + 1, 2 * (g - h) + 1, -1))


def descending_block_word(g: int, h: int) -> List[int]:
    """S = t_{2(g-h)+1} t_{2(g-h)} ... t_2"""
    return list(range(2 * (g - h) + 1, 1, -1))


def T1_power_residual(g: int, h: int, exponent: Optional[int] = None) -> int:
    _require_block_params(g, h)
    exponent = 4 * h if exponent is None else exponent
    first = residual(power(evaluate(first_block_word(h), g), exponent), identity(g))
    last = residual(power(evaluate(last_block_word(g, h), g), exponent), identity(g))
    return max(first, last)


def check_T1_power(g: int, h: int, exponent: Optional[int] = None) -> bool:
    """T_1^{4h} 与 T_{k+2}^{4h} 在同调上为单位阵"""
    return T1_power_residual(g, h, exponent) == 0


def S_power_residual(g: int, h: int) -> int:
    _require_block_params(g, h)
    exponent = 4 * (g - h) + 2
    return residual(power(evaluate(descending_block_word(g, h), g), exponent), identity(g))


def check_S_power(g: int, h: int) -> bool:
    """S^{4(g-h)+2} 在同调上为单位阵（逆序链）"""
    return S_power_residual(g, h) == 0


def eq5_residual(g: int, h: int, s_word: Optional[Sequence[int]] = None) -> int:
    """T_1 ... T_{k+2} · S 与 -I 的偏差；s_word 可替换 S 以做扰动检查"""
    # 延迟导入，避免与 proof_replay 循环引用
    from .proof_replay import build_blocks

    _require_block_params(g, h)
    blocks = build_blocks(g, h)
    product: List[int] = []
    for block in blocks:
        if block.label != "S":
            product.extend(block.word.to_signed())
    if s_word is None:
        s_word = blocks[-1].word.to_signed()
    return residual(evaluate(product + list(s_word), g), -identity(g))


def check_eq5(g: int, h: int, s_word: Optional[Sequence[int]] = None) -> bool:
    """T_1 T_2 ... T_{k+2} = iota · S^-1，等价于 T_1 ... T_{k+2} S 作用为 -I"""
    return eq5_residual(g, h, s_word) == 0


def check_braid(g: int, i: int) -> bool:
    """t_i t_{i+1} t_i = t_{i+1} t_i t_{i+1}"""
    _require_index(g, i + 1)
    return bool(np.array_equal(evaluate([i, i + 1, i], g), evaluate([i + 1, i, i + 1], g)))


def check_commutation(g: int, i: int, j: int) -> bool:
    """t_i t_j = t_j t_i"""
    return bool(np.array_equal(evaluate([i, j], g), evaluate([j, i], g)))


def verification_suite(g: int) -> List[HomologyCheck]:
    """单个亏格下的全部同调检查"""
    _require_genus(g)
    logger.info(f"开始亏格 {g} 的同调验证...")
    checks: List[HomologyCheck] = []

    J = intersection_form(g)
    checks.append(HomologyCheck(
        "intersection_form", {"g": g},
        bool(np.array_equal(J.T, -J)) and bool(np.array_equal(J @ J, -identity(g))),
    ))

    classes = chain_classes(g)
    pattern_ok = True
    for i in range(len(classes)):
        for j in range(len(classes)):
            expected = 1 if j == i + 1 else (-1 if i == j + 1 else 0)
            if pairing(classes[i], classes[j], g) != expected:
                pattern_ok = False
    checks.append(HomologyCheck("chain_classes", {"g": g}, pattern_ok))

    for i in range(1, 2 * g + 2):
        M = twist_matrix(g, i)
        ok = is_symplectic(M, g) and determinant(M) == 1
        ok = ok and bool(np.array_equal(M @ inverse_twist_matrix(g, i), identity(g)))
        checks.append(HomologyCheck("twist_symplectic", {"g": g, "i": i}, ok))

    for i in range(1, 2 * g + 1):
        checks.append(HomologyCheck("braid", {"g": g, "i": i}, check_braid(g, i)))
    for i in range(1, 2 * g + 2):
        for j in range(i + 2, 2 * g + 2):
            checks.append(HomologyCheck("commutation", {"g": g, "i": i, "j": j}, check_commutation(g, i, j)))

    deviation = hyperelliptic_residual(g)
    checks.append(HomologyCheck("hyperelliptic", {"g": g}, deviation == 0, deviation))

    for h in range(1, g + 1):
        deviation = chain_relation_residual(g, h)
        checks.append(HomologyCheck("chain_relation", {"g": g, "h": h}, deviation == 0, deviation))

    if g >= 2:
        for h in range(1, g // 2 + 1):
            deviation = T1_power_residual(g, h)
            checks.append(HomologyCheck("T1_power", {"g": g, "h": h}, deviation == 0, deviation))
            deviation = S_power_residual(g, h)
            checks.append(HomologyCheck("S_power", {"g": g, "h": h}, deviation == 0, deviation))
            deviation = eq5_residual(g, h)
            checks.append(HomologyCheck("eq5", {"g": g, "h": h}, deviation == 0, deviation))

    failed = [check for check in checks if not check.passed]
    if failed:
        logger.warning(f"亏格 {g} 有 {len(failed)} 项同调检查未通过")
    else:
        logger.info(f"亏格 {g} 的 {len(checks)} 项同调检查全部通过")
    return checks
