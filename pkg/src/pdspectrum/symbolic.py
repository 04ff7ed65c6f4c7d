"""The type alphabet, its labelled graph, the two orders and the symbolic space.

Everything here is exact: words are tuples of letters, infinite words are
eventually periodic and binary codes evaluate to rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Iterable, Iterator, Optional, Sequence

from .errors import InadmissibleWord, InvalidInput

LETTERS = ("0_e", "0_o", "1_e", "1_o", "2_e", "2_o", "3_el", "3_er", "3_ol", "3_or")
START_LETTERS = ("3_el", "0_e")

# edge -> label; successors are listed left to right
EDGES = {
    ("3_ol", "0_e"): "", ("3_or", "0_e"): "",
    ("3_el", "0_o"): "", ("3_er", "0_o"): "",
    ("0_o", "3_el"): "00", ("0_o", "1_e"): "0", ("0_o", "3_er"): "10",
    ("0_e", "3_ol"): "01", ("0_e", "1_o"): "1", ("0_e", "3_or"): "11",
    ("1_o", "2_e"): "0", ("1_o", "3_er"): "10",
    ("1_e", "3_ol"): "01", ("1_e", "2_o"): "1",
    ("2_o", "2_e"): "0", ("2_o", "3_el"): "10", ("2_o", "1_e"): "1",
    ("2_e", "1_o"): "0", ("2_e", "3_or"): "01", ("2_e", "2_o"): "1",
}

SUCCESSORS: dict = {a: tuple(b for (x, b) in EDGES if x == a) for a in LETTERS}
PREDECESSORS: dict = {b: tuple(a for (a, y) in EDGES if y == b) for b in LETTERS}


def _closure(pairs: Iterable[tuple]) -> frozenset:
    rel = set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    return frozenset(rel)


# generating relations of the weak order and the strong order on letters
WEAK_ORDER = _closure([
    ("3_ol", "1_o"), ("1_o", "3_or"), ("3_or", "2_o"),
    ("2_e", "3_el"), ("3_el", "1_e"), ("1_e", "3_er"),
    ("3_el", "0_e"),
])
STRONG_ORDER = _closure([
    ("3_ol", "1_o"), ("1_o", "2_o"), ("3_ol", "3_or"), ("3_or", "2_o"),
    ("2_e", "3_el"), ("3_el", "3_er"), ("2_e", "1_e"), ("1_e", "3_er"),
])


def letter_precedes(a: str, b: str) -> bool:
    return (a, b) in WEAK_ORDER


def letter_less(a: str, b: str) -> bool:
    return (a, b) in STRONG_ORDER


def check_letter(a: str) -> str:
    if a not in SUCCESSORS:
        raise InvalidInput(f"unknown letter {a!r}")
    return a


def is_admissible(word: Sequence[str], start: bool = True) -> bool:
    """Every adjacent pair is an edge; with ``start`` the first letter opens a path."""
    if not word:
        return True
    if any(a not in SUCCESSORS for a in word):
        return False
    if start and word[0] not in START_LETTERS:
        return False
    return all((a, b) in EDGES for a, b in zip(word, word[1:]))


def check_word(word: Sequence[str], start: bool = True) -> tuple:
    word = tuple(word)
    if not is_admissible(word, start):
        raise InadmissibleWord(f"inadmissible word {' '.join(word)}")
    return word


def parse_word(text: str) -> tuple:
    """Letters separated by spaces or commas, e.g. ``"0_e 1_o 2_e"``."""
    parts = [p for p in text.replace(",", " ").split() if p]
    for p in parts:
        check_letter(p)
    return tuple(parts)


def format_word(word: Sequence[str]) -> str:
    return " ".join(word)


def initial_label(first: str) -> str:
    return "0" if first == "3_el" else ""


def pi_star(word: Sequence[str]) -> str:
    """Binary code read off a finite admissible word."""
    word = check_word(word)
    if not word:
        raise InadmissibleWord("empty word")
    return initial_label(word[0]) + "".join(EDGES[a, b] for a, b in zip(word, word[1:]))


def admissible_words(n: int, first: Iterable[str] = START_LETTERS) -> Iterator[tuple]:
    """All admissible words of length ``n + 1`` with the given first letters."""
    stack = [(a,) for a in reversed(tuple(first))]
    while stack:
        w = stack.pop()
        if len(w) == n + 1:
            yield w
            continue
        for b in reversed(SUCCESSORS[w[-1]]):
            stack.append(w + (b,))


def compare_words(u: Sequence[str], v: Sequence[str]) -> int:
    """Weak order on words of equal length by the first differing letter."""
    for a, b in zip(u, v):
        if a != b:
            if letter_precedes(a, b):
                return -1
            if letter_precedes(b, a):
                return 1
            raise InvalidInput(f"letters {a} and {b} are not comparable")
    return (len(u) > len(v)) - (len(u) < len(v))


# -- eventually periodic words ---------------------------------------------------


def _primitive(period: tuple) -> tuple:
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period[:d] * (n // d) == period:
            return period[:d]
    return period


def _canonical(pre: tuple, period: tuple) -> tuple[tuple, tuple]:
    if not period:
        return pre, period
    period = _primitive(period)
    while pre and pre[-1] == period[-1]:
        pre = pre[:-1]
        period = period[-1:] + period[:-1]
    return pre, period


@dataclass(frozen=True)
class SymbolicPoint:
    """An eventually periodic word ``pre period period ...`` of the symbolic space.

    An empty period stands for a finite word (a cylinder prefix).
    """

    pre: tuple
    period: tuple = ()

    def __post_init__(self):
        pre, period = _canonical(tuple(self.pre), tuple(self.period))
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "period", period)
        full = pre + period + period[:1]
        if not full:
            raise InadmissibleWord("empty symbolic point")
        if not is_admissible(full):
            raise InadmissibleWord(f"inadmissible point {self}")

    @classmethod
    def parse(cls, text: str) -> "SymbolicPoint":
        """``"pre (period)"`` with the period in parentheses, e.g. ``"3_el (0_o 3_er)"``."""
        if "(" in text:
            head, _, rest = text.partition("(")
            body, _, tail = rest.partition(")")
            if tail.strip():
                raise InvalidInput(f"trailing text after period in {text!r}")
            return cls(parse_word(head), parse_word(body))
        return cls(parse_word(text), ())

    @property
    def infinite(self) -> bool:
        return bool(self.period)

    def letter(self, i: int) -> str:
        if i < len(self.pre):
            return self.pre[i]
        if not self.period:
            raise IndexError(i)
        return self.period[(i - len(self.pre)) % len(self.period)]

    def prefix(self, n: int) -> tuple:
        """``omega|_n``: the first ``n + 1`` letters."""
        return tuple(self.letter(i) for i in range(n + 1))

    def __len__(self):
        if self.period:
            raise TypeError("infinite word has no length")
        return len(self.pre)

    def __str__(self):
        head = format_word(self.pre)
        if not self.period:
            return head
        body = "(" + format_word(self.period) + ")"
        return f"{head} {body}" if head else body

    def tail_is(self, cycle: Sequence[str]) -> bool:
        """Whether the periodic part is a rotation of ``cycle``."""
        if len(self.period) != len(cycle):
            return False
        doubled = tuple(self.period) * 2
        cycle = tuple(cycle)
        return any(doubled[i:i + len(cycle)] == cycle for i in range(len(cycle)))


def _horizon(u: SymbolicPoint, v: SymbolicPoint) -> int:
    """Index past which two eventually periodic words agree if they agree up to it."""
    pu, pv = len(u.period) or 1, len(v.period) or 1
    return max(len(u.pre), len(v.pre)) + pu * pv // gcd(pu, pv)


def first_difference(u: SymbolicPoint, v: SymbolicPoint) -> Optional[int]:
    """Index of the first differing letter, ``None`` when the words are equal."""
    if u == v:
        return None
    if not (u.infinite and v.infinite):
        n = min(_length(u), _length(v))
        for i in range(n):
            if u.letter(i) != v.letter(i):
                return i
        return None
    for i in range(_horizon(u, v)):
        if u.letter(i) != v.letter(i):
            return i
    return None


def _length(u: SymbolicPoint):
    return len(u.pre) if not u.period else float("inf")


def cmp_weak(u: SymbolicPoint, v: SymbolicPoint) -> int:
    """Total order on the symbolic space: -1, 0 or 1."""
    i = first_difference(u, v)
    if i is None:
        return 0
    a, b = u.letter(i), v.letter(i)
    if letter_precedes(a, b):
        return -1
    if letter_precedes(b, a):
        return 1
    raise InvalidInput(f"letters {a} and {b} at index {i} are not comparable")


def cmp_strong(u: SymbolicPoint, v: SymbolicPoint) -> str:
    """Partial order: ``'less'``, ``'greater'``, ``'equal'`` or ``'incomparable'``."""
    i = first_difference(u, v)
    if i is None:
        return "equal"
    a, b = u.letter(i), v.letter(i)
    if letter_less(a, b):
        return "less"
    if letter_less(b, a):
        return "greater"
    return "incomparable"


OMEGA_MIN = SymbolicPoint(("3_el",), ("0_o", "3_el"))
OMEGA_MAX = SymbolicPoint((), ("0_e", "3_or"))


# -- binary codes -------------------------------------------------------------------


def _canonical_bits(pre: str, period: str) -> tuple[str, str]:
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period[:d] * (n // d) == period:
            period = period[:d]
            break
    while pre and pre[-1] == period[-1]:
        pre = pre[:-1]
        period = period[-1] + period[:-1]
    return pre, period


@dataclass(frozen=True)
class BinaryCode:
    """Eventually periodic binary sequence ``pre period period ...``."""

    pre: str
    period: str

    def __post_init__(self):
        if any(c not in "01" for c in self.pre + self.period):
            raise InvalidInput("binary code must use 0 and 1")
        if not self.period:
            raise InvalidInput("binary code needs a nonempty period; use finite()")
        pre, period = _canonical_bits(self.pre, self.period)
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "period", period)

    @classmethod
    def finite(cls, word: str) -> "BinaryCode":
        return cls(word, "0")

    @classmethod
    def from_rational(cls, q: Fraction) -> "BinaryCode":
        """Binary expansion of ``0 <= q < 1``; dyadic values get the one ending in zeros."""
        q = Fraction(q)
        if not 0 <= q < 1:
            raise InvalidInput(f"{q} is not in [0, 1)")
        bits = []
        seen = {}
        while q not in seen:
            seen[q] = len(bits)
            q *= 2
            bits.append("1" if q >= 1 else "0")
            if q >= 1:
                q -= 1
        start = seen[q]
        return cls("".join(bits[:start]), "".join(bits[start:]))

    @classmethod
    def parse(cls, text: str) -> "BinaryCode":
        text = text.replace(" ", "")
        if "(" in text:
            head, _, rest = text.partition("(")
            body = rest.rstrip(")")
            return cls(head, body)
        return cls.finite(text)

    def bit(self, i: int) -> str:
        if i < len(self.pre):
            return self.pre[i]
        return self.period[(i - len(self.pre)) % len(self.period)]

    def prefix(self, n: int) -> str:
        return "".join(self.bit(i) for i in range(n))

    def __str__(self):
        return f"{self.pre}({self.period})"

    def epsilon(self) -> Fraction:
        """Exact value of ``sum bit_i 2^-i``."""
        a, b = len(self.pre), len(self.period)
        head = Fraction(int(self.pre, 2) if a else 0, 2**a)
        tail = Fraction(int(self.period, 2), (2**b - 1) * 2**a)
        return head + tail

    def compare(self, other: "BinaryCode") -> int:
        """Lexicographic order of the infinite sequences."""
        pu, pv = len(self.period), len(other.period)
        n = max(len(self.pre), len(other.pre)) + pu * pv // gcd(pu, pv)
        for i in range(n):
            x, y = self.bit(i), other.bit(i)
            if x != y:
                return -1 if x < y else 1
        return 0


def epsilon(code: BinaryCode) -> Fraction:
    return code.epsilon()


def Pi(omega: SymbolicPoint) -> BinaryCode:
    """Label code of an infinite eventually periodic word."""
    if not omega.infinite:
        raise InvalidInput("Pi needs an infinite word; use pi_star for prefixes")
    p = len(omega.pre)
    head = initial_label(omega.letter(0))
    head += "".join(EDGES[omega.letter(i), omega.letter(i + 1)] for i in range(p))
    cycle = "".join(
        EDGES[omega.letter(i), omega.letter(i + 1)] for i in range(p, p + len(omega.period))
    )
    if not cycle:
        raise InadmissibleWord("cycle without labels")
    if p == 0:
        # the edge into the first letter is not part of the code
        head = initial_label(omega.letter(0))
    return BinaryCode(head, cycle)


def Pi_star(word: Sequence[str]) -> str:
    return pi_star(word)


def ids(omega: SymbolicPoint) -> Fraction:
    """Integrated density of states at ``pi(omega)``."""
    return Pi(omega).epsilon()


def ids_of_zero(code: str) -> Fraction:
    """IDS at ``z_code``: ``sum code_i / 2^i + 1 / 2^(n+1)``."""
    n = len(code)
    value = Fraction(int(code, 2) if code else 0, 2**n)
    return value + Fraction(1, 2 ** (n + 1))


# -- inverse of Pi -------------------------------------------------------------------


def Pi_inverse(code: BinaryCode, limit: int = 8) -> list[SymbolicPoint]:
    """All infinite words with the given label code, sorted by the weak order.

    Walks the product of the graph with the positions of the code: a state is
    a letter together with the index of the next unread bit.  Positions wrap
    around the period, so the state space is finite and every infinite path is
    a lasso.  States without an infinite continuation are pruned first.
    """
    a, b = len(code.pre), len(code.period)
    size = a + b

    def advance(pos: int, label: str) -> Optional[int]:
        for c in label:
            if code.bit(pos) != c:
                return None
            pos += 1
            if pos >= size:
                pos = a + (pos - a) % b
        return pos

    starts = []
    for s in START_LETTERS:
        pos = advance(0, initial_label(s))
        if pos is not None:
            starts.append((s, pos))

    graph: dict = {}
    todo = list(starts)
    while todo:
        state = todo.pop()
        if state in graph:
            continue
        letter, pos = state
        nxt = []
        for nb in SUCCESSORS[letter]:
            p2 = advance(pos, EDGES[letter, nb])
            if p2 is not None:
                nxt.append((nb, p2))
        graph[state] = nxt
        todo.extend(nxt)

    alive = set(graph)
    changed = True
    while changed:
        changed = False
        for state in list(alive):
            if not any(t in alive for t in graph[state]):
                alive.discard(state)
                changed = True

    found: list[SymbolicPoint] = []

    def walk(path: list):
        if len(found) >= limit:
            return
        state = path[-1]
        for t in graph[state]:
            if t not in alive:
                continue
            if t in path:
                k = path.index(t)
                letters = [s[0] for s in path]
                found.append(SymbolicPoint(tuple(letters[:k]), tuple(letters[k:])))
                continue
            path.append(t)
            walk(path)
            path.pop()

    for s in starts:
        if s in alive:
            walk([s])
    unique = sorted(set(found), key=_weak_key)
    return unique


def _weak_key(omega: SymbolicPoint):
    from functools import cmp_to_key

    return cmp_to_key(cmp_weak)(omega)


def sort_weak(points: Iterable[SymbolicPoint]) -> list[SymbolicPoint]:
    from functools import cmp_to_key

    return sorted(points, key=cmp_to_key(cmp_weak))


# -- gap edge classes and partner maps -----------------------------------------------

CYCLES = {
    "E_l^o": ("2_o", "1_e"),
    "E_r^o": ("0_o", "3_el"),
    "E_l^e": ("0_e", "3_or"),
    "E_r^e": ("2_e", "1_o"),
    "E~_l": ("0_o", "3_er"),
    "E~_r": ("0_e", "3_ol"),
    "F": ("2_e", "2_o"),
}


def edge_class(omega: SymbolicPoint) -> Optional[str]:
    """Name of the eventually 2-periodic class containing ``omega``, if any."""
    if not omega.infinite:
        return None
    for name, cycle in CYCLES.items():
        if omega.tail_is(cycle):
            return name
    return None


def _split_tail(omega: SymbolicPoint, cycle: tuple) -> tuple[tuple, int]:
    """Shortest head ``h`` with ``omega = h cycle^infinity``; also the cycle phase.

    Returns the head and ``0`` or ``1``: ``1`` means the head is followed by
    the second letter of ``cycle`` first (``omega = h c1 (c0 c1)^inf``).
    """
    word = list(omega.pre)
    period = list(omega.period)
    # unroll to start the tail at a multiple of the cycle
    if tuple(period) == cycle:
        head = tuple(word)
    else:
        head = tuple(word) + (period[0],)
    # strip whole cycles from the end of the head
    while len(head) >= 2 and head[-2:] == cycle:
        head = head[:-2]
    phase = 0
    if head and head[-1] == cycle[1]:
        head = head[:-1]
        phase = 1
    return head, phase


def _expand(head: tuple, tail: tuple, cycle: tuple) -> SymbolicPoint:
    return SymbolicPoint(tuple(head) + tuple(tail), cycle)


def ell(omega: SymbolicPoint) -> SymbolicPoint:
    """Partner of a point of ``E~_l`` in ``E~_r``."""
    cyc = CYCLES["E~_l"]
    if not omega.tail_is(cyc):
        from .errors import NotGapEdgeClass

        raise NotGapEdgeClass(f"{omega} is not in E~_l")
    head, phase = _split_tail(omega, cyc)
    target = CYCLES["E~_r"]
    if phase == 1:
        # omega = head 3_er (0_o 3_er)^inf with head ending in 1_o
        if not head or head[-1] != "1_o":
            raise AssertionError(f"unexpected E~_l head {head}")
        return _expand(head[:-1] + ("3_or",), (), target)
    # omega = head (0_o 3_er)^inf with head ending in 3_el
    if head == ("3_el",):
        return SymbolicPoint((), target)
    if not head or head[-1] != "3_el":
        raise AssertionError(f"unexpected E~_l head {head}")
    return _expand(head[:-1] + ("1_e", "3_ol"), (), target)


def ell_inverse(omega: SymbolicPoint) -> SymbolicPoint:
    cyc = CYCLES["E~_r"]
    if not omega.tail_is(cyc):
        from .errors import NotGapEdgeClass

        raise NotGapEdgeClass(f"{omega} is not in E~_r")
    head, phase = _split_tail(omega, cyc)
    target = CYCLES["E~_l"]
    if phase == 1:
        # omega = head 3_ol (0_e 3_ol)^inf with head ending in 1_e
        if not head or head[-1] != "1_e":
            raise AssertionError(f"unexpected E~_r head {head}")
        return _expand(head[:-1] + ("3_el",), (), target)
    if not head:
        return SymbolicPoint(("3_el",), target)
    if head[-1] != "3_or":
        raise AssertionError(f"unexpected E~_r head {head}")
    return _expand(head[:-1] + ("1_o", "3_er"), (), target)


def ell_o(omega: SymbolicPoint) -> SymbolicPoint:
    """Partner of a point of ``E_l^o`` (left gap edge, a zero) in ``E_r^o``."""
    cyc = CYCLES["E_l^o"]
    if not omega.tail_is(cyc):
        from .errors import NotGapEdgeClass

        raise NotGapEdgeClass(f"{omega} is not in E_l^o")
    head, phase = _split_tail(omega, cyc)
    target = CYCLES["E_r^o"]
    if phase == 1:
        # omega = head 1_e (2_o 1_e)^inf, head ends in 0_o
        if not head or head[-1] != "0_o":
            raise AssertionError(f"unexpected E_l^o head {head}")
        return _expand(head + ("3_er",), (), target)
    # omega = head (2_o 1_e)^inf, head ends in 2_e preceded by 1_o or 2_o
    if len(head) < 2 or head[-1] != "2_e":
        raise AssertionError(f"unexpected E_l^o head {head}")
    before = head[-2]
    if before == "1_o":
        return _expand(head[:-1] + ("3_er",), (), target)
    if before == "2_o":
        return _expand(head[:-1] + ("3_el",), (), target)
    raise AssertionError(f"unexpected E_l^o head {head}")


def ell_o_inverse(omega: SymbolicPoint) -> SymbolicPoint:
    cyc = CYCLES["E_r^o"]
    if not omega.tail_is(cyc) or omega == OMEGA_MIN:
        from .errors import NotGapEdgeClass

        raise NotGapEdgeClass(f"{omega} is not in E_r^o minus the minimum")
    head, phase = _split_tail(omega, cyc)
    target = CYCLES["E_l^o"]
    if phase == 1:
        # omega = head 3_el (0_o 3_el)^inf, head ends in 2_o
        if not head or head[-1] != "2_o":
            raise AssertionError(f"unexpected E_r^o head {head}")
        return _expand(head + ("2_e",), (), target)
    # omega = head (0_o 3_el)^inf, head ends in 3_er preceded by 1_o or 0_o
    if len(head) < 2 or head[-1] != "3_er":
        raise AssertionError(f"unexpected E_r^o head {head}")
    before = head[-2]
    if before == "1_o":
        return _expand(head[:-1] + ("2_e",), (), target)
    if before == "0_o":
        return _expand(head[:-1] + ("1_e",), (), target)
    raise AssertionError(f"unexpected E_r^o head {head}")


def ell_e(omega: SymbolicPoint) -> SymbolicPoint:
    """Partner of a point of ``E_r^e`` (right gap edge, a zero) in ``E_l^e``."""
    cyc = CYCLES["E_r^e"]
    if not omega.tail_is(cyc):
        from .errors import NotGapEdgeClass

        raise NotGapEdgeClass(f"{omega} is not in E_r^e")
    head, phase = _split_tail(omega, cyc)
    target = CYCLES["E_l^e"]
    if phase == 1:
        # omega = head 1_o (2_e 1_o)^inf, head ends in 0_e
        if not head or head[-1] != "0_e":
            raise AssertionError(f"unexpected E_r^e head {head}")
        return _expand(head + ("3_ol",), (), target)
    if len(head) < 2 or head[-1] != "2_o":
        raise AssertionError(f"unexpected E_r^e head {head}")
    before = head[-2]
    if before == "1_e":
        return _expand(head[:-1] + ("3_ol",), (), target)
    if before == "2_e":
        return _expand(head[:-1] + ("3_or",), (), target)
    raise AssertionError(f"unexpected E_r^e head {head}")


def ell_e_inverse(omega: SymbolicPoint) -> SymbolicPoint:
    cyc = CYCLES["E_l^e"]
    if not omega.tail_is(cyc) or omega == OMEGA_MAX:
        from .errors import NotGapEdgeClass

        raise NotGapEdgeClass(f"{omega} is not in E_l^e minus the maximum")
    head, phase = _split_tail(omega, cyc)
    target = CYCLES["E_r^e"]
    if phase == 1:
        # omega = head 3_or (0_e 3_or)^inf, head ends in 2_e
        if not head or head[-1] != "2_e":
            raise AssertionError(f"unexpected E_l^e head {head}")
        return _expand(head + ("2_o",), (), target)
    if len(head) < 2 or head[-1] != "3_ol":
        raise AssertionError(f"unexpected E_l^e head {head}")
    before = head[-2]
    if before == "1_e":
        return _expand(head[:-1] + ("2_o",), (), target)
    if before == "0_e":
        return _expand(head[:-1] + ("1_o",), (), target)
    raise AssertionError(f"unexpected E_l^e head {head}")


def gap_partner(omega: SymbolicPoint) -> SymbolicPoint:
    """The other edge of the gap whose edge is coded by ``omega``."""
    cls = edge_class(omega)
    if cls == "E~_l":
        return ell(omega)
    if cls == "E_l^o":
        return ell_o(omega)
    if cls == "E_r^e":
        return ell_e(omega)
    from .errors import NotGapEdgeClass

    raise NotGapEdgeClass(f"{omega} is not in E~_l, E_l^o or E_r^e")


def coding_of_zero(code: str) -> SymbolicPoint:
    """The word coding ``z_code``: in ``E_l^o`` for odd length, ``E_r^e`` for even."""
    n = len(code)
    target = BinaryCode(code + "0", "1") if n % 2 else BinaryCode(code + "1", "0")
    want = "E_l^o" if n % 2 else "E_r^e"
    hits = [w for w in Pi_inverse(target) if edge_class(w) == want]
    if len(hits) != 1:
        raise AssertionError(f"zero {code!r} has {len(hits)} codings in {want}")
    return hits[0]


def eventually_periodic_points(max_total: int, first: Iterable[str] = START_LETTERS):
    """Canonical infinite words with ``len(pre) + len(period) <= max_total``."""
    seen = set()
    for total in range(1, max_total + 1):
        for w in admissible_words(total - 1, first):
            for k in range(total):
                pre, period = w[:k], w[k:]
                if (period[-1], period[0]) not in EDGES:
                    continue
                try:
                    p = SymbolicPoint(pre, period)
                except InadmissibleWord:
                    continue
                if p not in seen:
                    seen.add(p)
                    yield p
