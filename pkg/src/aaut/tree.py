"""Vertices, balls and ends of the boundary of the rooted tree T_{d,k}.

A vertex is a tuple of digits: the first digit lies in ``range(k)``, every
later digit in ``range(d)``.  The empty tuple is the root; it names the whole
boundary and is never a :class:`Ball`.  Planar order on the boundary is the
lexicographic order of digit tuples.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from .errors import DomainError, ParseError, PartialityError, PrefixError, ShapeError

Address = Tuple[int, ...]

ROOT: Address = ()


@dataclass(frozen=True, slots=True)
class Shape:
    """Branching data of T_{d,k}: the root has ``k`` children, other vertices ``d``."""

    d: int
    k: int

    def __post_init__(self):
        if not (isinstance(self.d, int) and isinstance(self.k, int)):
            raise DomainError("shape parameters must be integers")
        if self.d < 2 or self.k < 2:
            raise DomainError(f"need d >= 2 and k >= 2, got d={self.d} k={self.k}")

    def arity(self, level: int) -> int:
        """Number of children of a vertex at ``level``."""
        return self.k if level == 0 else self.d

    def __str__(self):
        return f"d={self.d} k={self.k}"


def parse_shape(text: str) -> Shape:
    """Parse ``"d,k"`` (as used on the command line) into a :class:`Shape`."""
    try:
        d, k = (int(x) for x in text.split(","))
    except ValueError:
        raise ParseError(f"bad shape {text!r}, expected 'd,k'") from None
    return Shape(d, k)


def is_valid_address(shape: Shape, addr: Address) -> bool:
    for i, digit in enumerate(addr):
        if not (isinstance(digit, int) and 0 <= digit < (shape.k if i == 0 else shape.d)):
            return False
    return True


def check_address(shape: Shape, addr: Address) -> Address:
    addr = tuple(addr)
    if not is_valid_address(shape, addr):
        raise DomainError(f"address {format_address(addr)} has digits out of range for {shape}")
    return addr


def format_address(addr: Address) -> str:
    if not addr:
        return "root"
    return ".".join(str(x) for x in addr)


def parse_address(text: str, shape: Shape, allow_root: bool = False) -> Address:
    """Parse dot-separated digits, e.g. ``"1.0.1"``; ``"root"`` only if allowed."""
    text = text.strip()
    if text == "root":
        if not allow_root:
            raise ParseError("the root does not name a proper ball here")
        return ROOT
    if not text or text.startswith(".") or text.endswith("."):
        raise ParseError(f"bad address {text!r}")
    try:
        addr = tuple(int(tok) for tok in text.split("."))
    except ValueError:
        raise ParseError(f"bad address {text!r}") from None
    if any(tok == "" or not tok.isdigit() for tok in text.split(".")):
        raise ParseError(f"bad address {text!r}")
    if not is_valid_address(shape, addr):
        raise ParseError(f"address {text!r} has digits out of range for {shape}")
    return addr


def is_prefix(a: Address, b: Address) -> bool:
    """True iff ``a`` is a (not necessarily proper) prefix of ``b``."""
    return len(a) <= len(b) and b[: len(a)] == a


def subtree_end(addr: Address) -> Address:
    """Smallest address (in tuple order) greater than every extension of ``addr``."""
    return addr[:-1] + (addr[-1] + 1,)


@dataclass(frozen=True, slots=True)
class Ball:
    """The proper ball of ends passing through the vertex ``addr``."""

    shape: Shape
    addr: Address

    def __post_init__(self):
        object.__setattr__(self, "addr", tuple(self.addr))
        if not self.addr:
            raise DomainError("the whole boundary is not a proper ball")
        check_address(self.shape, self.addr)

    @classmethod
    def parse(cls, text: str, shape: Shape) -> "Ball":
        return cls(shape, parse_address(text, shape))

    @property
    def level(self) -> int:
        return len(self.addr)

    def children(self):
        return [Ball(self.shape, self.addr + (i,)) for i in range(self.shape.d)]

    def contains(self, other: "Ball") -> bool:
        return is_prefix(self.addr, other.addr)

    def __str__(self):
        return format_address(self.addr)


class Relation(enum.Enum):
    DISJOINT = "disjoint"
    EQUAL = "equal"
    FIRST_INSIDE_SECOND = "first_inside_second"
    SECOND_INSIDE_FIRST = "second_inside_first"


def _same_shape(a: Ball, b: Ball):
    if a.shape != b.shape:
        raise ShapeError(f"balls on different trees: {a.shape} vs {b.shape}")


def ball_relation(a: Ball, b: Ball) -> Relation:
    _same_shape(a, b)
    if a.addr == b.addr:
        return Relation.EQUAL
    if is_prefix(b.addr, a.addr):
        return Relation.FIRST_INSIDE_SECOND
    if is_prefix(a.addr, b.addr):
        return Relation.SECOND_INSIDE_FIRST
    return Relation.DISJOINT


def diameter(b: Ball) -> Fraction:
    """Exact diameter ``d ** -level`` of a ball."""
    return Fraction(1, b.shape.d ** b.level)


def level_addresses(shape: Shape, n: int):
    """All vertices at level ``n`` in planar order."""
    if n < 1:
        raise DomainError(f"level must be >= 1, got {n}")
    return [(a,) + rest for a in range(shape.k) for rest in itertools.product(range(shape.d), repeat=n - 1)]


def spherical_partition(shape: Shape, n: int):
    """The partition of the boundary into all balls at level ``n``."""
    from .partition import RegularPartition

    return RegularPartition._trusted(shape, tuple(level_addresses(shape, n)))


def last_address(shape: Shape, n: int) -> Address:
    if n < 1:
        raise DomainError(f"last_ball needs n >= 1, got {n}")
    return (shape.k - 1,) + (shape.d - 1,) * (n - 1)


def penult_address(shape: Shape, n: int) -> Address:
    if n < 2:
        raise DomainError(f"penult_ball needs n >= 2, got {n}")
    return (shape.k - 1,) + (shape.d - 1,) * (n - 2) + (shape.d - 2,)


def last_ball(shape: Shape, n: int) -> Ball:
    """Final ball of the level-``n`` sphere in planar order."""
    return Ball(shape, last_address(shape, n))


def penult_ball(shape: Shape, n: int) -> Ball:
    """Penultimate ball of the level-``n`` sphere in planar order."""
    return Ball(shape, penult_address(shape, n))


def _rightmost_depth(shape: Shape, addr: Address) -> int:
    # greatest l with addr inside last_ball(l), 0 if none
    if not addr or addr[0] != shape.k - 1:
        return 0
    depth = 1
    for digit in addr[1:]:
        if digit != shape.d - 1:
            break
        depth += 1
    return depth


def delta_depth(a: Ball, b: Ball) -> int:
    """Greatest ``l >= 1`` such that both balls lie inside ``last_ball(l)``."""
    _same_shape(a, b)
    da, db = _rightmost_depth(a.shape, a.addr), _rightmost_depth(b.shape, b.addr)
    if da == 0 or db == 0:
        raise PartialityError("delta_depth is only defined for balls inside last_ball(1)")
    return min(da, db)


def planar_compare(a: Address, b: Address) -> int:
    """Return -1, 0 or 1 comparing two disjoint (or equal) regions in planar order."""
    a, b = tuple(a), tuple(b)
    if a == b:
        return 0
    if is_prefix(a, b) or is_prefix(b, a):
        raise PrefixError(f"{format_address(a)} and {format_address(b)} are nested")
    return -1 if a < b else 1


@dataclass(frozen=True, slots=True)
class End:
    """An eventually periodic end ``preperiod . period^infinity``, kept canonical.

    Canonical form: the period is primitive and the preperiod is as short as
    possible (equivalently, it does not end with the period's last digit).
    """

    shape: Shape
    preperiod: Address
    period: Address

    def __post_init__(self):
        pre, per = tuple(self.preperiod), tuple(self.period)
        if not per:
            raise DomainError("an end needs a nonempty period")
        pre, per = _canonical_end(pre, per)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)
        if not is_valid_address(self.shape, self.prefix(len(pre) + 2 * len(per))):
            raise DomainError("end has digits out of range")

    def prefix(self, n: int) -> Address:
        """The first ``n`` digits of the end."""
        out = list(self.preperiod[:n])
        while len(out) < n:
            out.extend(self.period[: n - len(out)])
        return tuple(out)

    def __str__(self):
        head = "".join(f"{x}." for x in self.preperiod)
        return head + "(" + ".".join(str(x) for x in self.period) + ")"

    @classmethod
    def parse(cls, text: str, shape: Shape) -> "End":
        """Parse ``"0.1.(1.0)"``: digits, then the period in parentheses."""
        text = text.strip()
        if not text.endswith(")") or "(" not in text:
            raise ParseError(f"bad end {text!r}, expected e.g. '0.(1)'")
        head, _, body = text[:-1].partition("(")
        try:
            pre = tuple(int(t) for t in head.split(".") if t != "") if head else ()
            per = tuple(int(t) for t in body.split("."))
        except ValueError:
            raise ParseError(f"bad end {text!r}") from None
        if head and not head.endswith("."):
            raise ParseError(f"bad end {text!r}")
        try:
            return cls(shape, pre, per)
        except DomainError as exc:
            raise ParseError(str(exc)) from None


def _primitive_root(word: Address) -> Address:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


def _canonical_end(pre: Address, per: Address):
    per = _primitive_root(per)
    while pre and pre[-1] == per[-1]:
        pre = pre[:-1]
        per = per[-1:] + per[:-1]
    return pre, per
