"""
迹群（自由部分交换群）字服务
生成元 x_i 与 x_j 在 |i-j| >= 2 时交换；提供堆叠正规形、相等判定、
共轭，以及交错积与顺序积共轭的逐步证书
"""

import heapq
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from loguru import logger


@dataclass(frozen=True)
class Generator:
    """带符号的生成元 x_index^sign（下标从 1 开始）"""
    index: int
    sign: int = 1

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"generator index must be >= 1, got {self.index}")
        if self.sign not in (1, -1):
            raise ValueError(f"generator sign must be +1 or -1, got {self.sign}")

    def inverse(self) -> "Generator":
        return Generator(self.index, -self.sign)

    def signed(self) -> int:
        return self.index * self.sign

    def __str__(self) -> str:
        return f"x{self.index}" if self.sign == 1 else f"x{self.index}^-1"


@dataclass(frozen=True)
class Word:
    """字：生成元序列，空序列为单位元"""
    letters: Tuple[Generator, ...]
    alphabet_size: int

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise ValueError(f"alphabet_size must be positive, got {self.alphabet_size}")
        object.__setattr__(self, 'letters', tuple(self.letters))
        for letter in self.letters:
            if letter.index > self.alphabet_size:
                raise ValueError(
                    f"letter {letter} outside alphabet of size {self.alphabet_size}"
                )

    @classmethod
    def from_signed(cls, indices: Iterable[int], alphabet_size: int) -> "Word":
        """由带符号整数构造，例如 [1, -3] 表示 x1 x3^-1"""
        letters = []
        for value in indices:
            if value == 0:
                raise ValueError("signed index 0 is not a generator")
            letters.append(Generator(abs(value), 1 if value > 0 else -1))
        return cls(tuple(letters), alphabet_size)

    @classmethod
    def identity(cls, alphabet_size: int) -> "Word":
        return cls((), alphabet_size)

    def to_signed(self) -> List[int]:
        return [letter.signed() for letter in self.letters]

    def inverse(self) -> "Word":
        return Word(tuple(letter.inverse() for letter in reversed(self.letters)), self.alphabet_size)

    def __mul__(self, other: "Word") -> "Word":
        _require_same_alphabet(self, other)
        return Word(self.letters + other.letters, self.alphabet_size)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(str(letter) for letter in self.letters)


@dataclass(frozen=True)
class HeapNormalForm:
    """正规形：同一群元素的字给出同一序列"""
    canonical_letters: Tuple[Generator, ...]

    def __str__(self) -> str:
        if not self.canonical_letters:
            return "1"
        return " ".join(str(letter) for letter in self.canonical_letters)


def _require_same_alphabet(w1: Word, w2: Word):
    if w1.alphabet_size != w2.alphabet_size:
        raise ValueError(
            f"alphabet mismatch: {w1.alphabet_size} vs {w2.alphabet_size}"
        )


def commutes(i: int, j: int) -> bool:
    """x_i 与 x_j 是否交换（仅 |i-j| >= 2）"""
    if i < 1 or j < 1:
        raise ValueError(f"indices must be >= 1, got ({i}, {j})")
    return abs(i - j) >= 2


def _pile(letters: Iterable[Generator], alphabet_size: int) -> List[deque]:
    """逐个字母堆叠，顶端互逆时直接消去

    每个生成元一列；不交换的相邻列压入 0 作为占位。
    第 0 列和第 n+1 列是哨兵。
    """
    piles = [deque() for _ in range(alphabet_size + 2)]
    for letter in letters:
        i, epsilon = letter.index, letter.sign
        if piles[i] and piles[i][-1] == -epsilon:
            for j in (i - 1, i, i + 1):
                piles[j].pop()
        else:
            piles[i].append(epsilon)
            piles[i - 1].append(0)
            piles[i + 1].append(0)
    return piles


def _depile(piles: List[deque], alphabet_size: int) -> List[Generator]:
    """反复取出下标最小的极小块

    取出第 i 列的块只会改变第 i-1、i、i+1 列的底部。
    """
    def available(i: int) -> bool:
        return 1 <= i <= alphabet_size and bool(piles[i]) and piles[i][0] != 0

    candidates = [i for i in range(1, alphabet_size + 1) if available(i)]
    queued = set(candidates)
    letters = []
    while candidates:
        chosen = heapq.heappop(candidates)
        queued.discard(chosen)

        letters.append(Generator(chosen, piles[chosen][0]))
        for j in (chosen - 1, chosen, chosen + 1):
            piles[j].popleft()
        for j in (chosen - 1, chosen, chosen + 1):
            if j not in queued and available(j):
                heapq.heappush(candidates, j)
                queued.add(j)
    return letters


def normalize(w: Word) -> HeapNormalForm:
    """计算正规形（自由约化与交换同时进行）"""
    piles = _pile(w.letters, w.alphabet_size)
    return HeapNormalForm(tuple(_depile(piles, w.alphabet_size)))


def equal(w1: Word, w2: Word) -> bool:
    """两个字在群中是否相等"""
    _require_same_alphabet(w1, w2)
    return normalize(w1) == normalize(w2)


def conjugate(w: Word, by: Word) -> Word:
    """by · w · by^-1，不做约化"""
    _require_same_alphabet(w, by)
    return by * w * by.inverse()


def _moves(state: Tuple[int, ...]) -> Iterable[Tuple[int, ...]]:
    for p in range(len(state) - 1):
        a, b = state[p], state[p + 1]
        if a == -b:
            yield state[:p] + state[p + 2:]
        elif commutes(abs(a), abs(b)):
            yield state[:p] + (b, a) + state[p + 2:]


def _closure(start: Tuple[int, ...], max_states: int) -> Optional[Set[Tuple[int, ...]]]:
    seen = {start}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for nxt in _moves(state):
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > max_states:
                    return None
                queue.append(nxt)
    return seen


def bfs_equal(w1: Word, w2: Word, max_states: int = 200_000) -> Optional[bool]:
    """穷举交换与消去移动的相等判定（独立于正规形的对照）

    两个字相等当且仅当它们的移动闭包相交。
    状态数超过 max_states 时无法判定，返回 None。
    """
    _require_same_alphabet(w1, w2)
    start1, start2 = tuple(w1.to_signed()), tuple(w2.to_signed())
    reachable = _closure(start1, max_states)
    if reachable is None:
        logger.warning(f"BFS 状态数超过上限 {max_states}: {w1}")
        return None

    seen = {start2}
    queue = deque([start2])
    while queue:
        state = queue.popleft()
        if state in reachable:
            return True
        for nxt in _moves(state):
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > max_states:
                    logger.warning(f"BFS 状态数超过上限 {max_states}: {w2}")
                    return None
                queue.append(nxt)
    return False


def search_conjugator(before: Word, after: Word, pool: Sequence[int],
                      max_length: int = 3) -> Optional[Word]:
    """在 pool 的升序子积（长度 <= max_length）中搜索共轭元"""
    _require_same_alphabet(before, after)
    for length in range(max_length + 1):
        for indices in combinations(sorted(pool), length):
            candidate = Word.from_signed(indices, before.alphabet_size)
            if equal(conjugate(before, candidate), after):
                return candidate
    return None


def substitute(word: Word, images: Sequence[Word], alphabet_size: int) -> Word:
    """把 x_i 替换成 images[i-1]（逆字母替换成逆字）"""
    letters: List[Generator] = []
    for letter in word.letters:
        image = images[letter.index - 1]
        if image.alphabet_size != alphabet_size:
            raise ValueError(f"image of x{letter.index} has wrong alphabet size")
        letters.extend(image.letters if letter.sign == 1 else image.inverse().letters)
    return Word(tuple(letters), alphabet_size)


def _require_positive(n: int):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")


def lemma8_endpoints(n: int) -> Tuple[Word, Word]:
    """(奇数下标积 · 偶数下标积, x_1 x_2 ... x_n)"""
    _require_positive(n)
    interleaved = list(range(1, n + 1, 2)) + list(range(2, n + 1, 2))
    straight = list(range(1, n + 1))
    return Word.from_signed(interleaved, n), Word.from_signed(straight, n)


def lemma8_words(n: int) -> List[Word]:
    """中间字 X_0 .. X_n

    X_j = x_1...x_j · (i > j 且 i ≡ j mod 2) · (i > j 且 i ≢ j mod 2)
    """
    _require_positive(n)
    words = []
    for j in range(n + 1):
        indices = list(range(1, j + 1))
        indices += list(range(j + 2, n + 1, 2))
        indices += list(range(j + 1, n + 1, 2))
        words.append(Word.from_signed(indices, n))
    return words


def lemma8_conjugator(n: int, j: int) -> Word:
    """C_j = x_{j+2} x_{j+4} ...，满足 C_j X_{j+1} C_j^-1 = X_j"""
    _require_positive(n)
    if not 0 <= j < n:
        raise ValueError(f"step index must be in 0..{n - 1}, got {j}")
    return Word.from_signed(range(j + 2, n + 1, 2), n)


@dataclass(frozen=True)
class ConjugationStep:
    """一步共轭：conjugate(before, conjugator) 等于 after"""
    j: int
    conjugator: Word
    before: Word
    after: Word
    valid: bool
    oracle: Optional[bool] = None
    searched_conjugator: Optional[Word] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "j": self.j,
            "conjugator": str(self.conjugator),
            "before": str(self.before),
            "after": str(self.after),
            "valid": self.valid,
            "oracle": self.oracle,
            "searched_conjugator": None if self.searched_conjugator is None else str(self.searched_conjugator),
        }


@dataclass(frozen=True)
class ConjugationCertificate:
    """交错积与顺序积共轭的证书"""
    n: int
    interleaved: Word
    straight: Word
    steps: Tuple[ConjugationStep, ...]
    valid: bool
    oracle_checked: bool = False
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def steps_valid(self) -> int:
        return sum(1 for step in self.steps if step.valid and step.oracle is not False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "interleaved": str(self.interleaved),
            "straight": str(self.straight),
            "steps": [step.to_dict() for step in self.steps],
            "valid": self.valid,
            "oracle_checked": self.oracle_checked,
            "notes": list(self.notes),
        }

    def summary(self) -> str:
        oracle = "oracle checked" if self.oracle_checked else "oracle skipped"
        status = "valid" if self.valid else "INVALID"
        return (f"n={self.n}: {self.steps_valid}/{len(self.steps)} steps valid, "
                f"{oracle}, certificate {status}")

    def render_text(self) -> str:
        lines = [
            f"Conjugation certificate n={self.n}",
            f"  interleaved: {self.interleaved}",
            f"  straight:    {self.straight}",
        ]
        for step in self.steps:
            mark = "ok" if step.valid and step.oracle is not False else "FAIL"
            lines.append(f"  [{mark}] X{step.j} = ({step.conjugator}) . X{step.j + 1} . ({step.conjugator})^-1")
            lines.append(f"        before: {step.before}")
            lines.append(f"        after:  {step.after}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        lines.append(f"  {self.summary()}")
        return "\n".join(lines)


def lemma8_verify(n: int, oracle_max_n: int = 6, max_states: int = 200_000) -> ConjugationCertificate:
    """逐步验证 X_1 与 X_n 共轭

    n <= oracle_max_n 时每步还要通过 BFS 移动搜索和共轭元穷举。
    步骤失败不抛异常，只把证书标记为无效。
    """
    _require_positive(n)
    interleaved, straight = lemma8_endpoints(n)
    words = lemma8_words(n)
    notes = []

    endpoints_ok = equal(words[1], interleaved) and equal(words[n], straight)
    if not endpoints_ok:
        logger.error(f"n={n} 端点与中间字不一致")
        notes.append("endpoint words do not match X_1 / X_n")

    oracle_checked = n <= oracle_max_n
    pool = list(range(2, n + 1))
    steps = []
    for j in range(1, n):
        conjugator = lemma8_conjugator(n, j)
        before, after = words[j + 1], words[j]
        oracle: Optional[bool] = None
        searched: Optional[Word] = None
        try:
            valid = equal(conjugate(before, conjugator), after)
            if oracle_checked:
                searched = search_conjugator(before, after, pool)
                moved = bfs_equal(conjugate(before, conjugator), after, max_states)
                if moved is None:
                    notes.append(f"step {j}: move search exceeded {max_states} states, oracle inconclusive")
                oracle = False if searched is None else moved
        except Exception as e:
            logger.error(f"n={n} 第 {j} 步验证出错: {e}")
            valid = False
            notes.append(f"step {j} raised {type(e).__name__}: {e}")

        if not valid or oracle is False:
            logger.warning(f"n={n} 第 {j} 步未通过: {before} -> {after}")
        steps.append(ConjugationStep(j, conjugator, before, after, valid, oracle, searched))

    all_valid = endpoints_ok and all(step.valid and step.oracle is not False for step in steps)
    logger.debug(f"n={n} 证书生成完成，共 {len(steps)} 步，有效: {all_valid}")
    return ConjugationCertificate(
        n=n,
        interleaved=interleaved,
        straight=straight,
        steps=tuple(steps),
        valid=all_valid,
        oracle_checked=oracle_checked,
        notes=tuple(notes),
    )
