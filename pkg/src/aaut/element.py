"""Elements of the Higman-Thompson group V_{d,k} as reduced prefix-substitution maps.

An element is a bijection between two complete prefix codes; the domain leaf
``p`` acts on the boundary by ``p.s -> sigma(p).s``.  Composition follows the
convention ``(g * h)(x) = g(h(x))``.

Element file format::

    aaut v1
    shape d=2 k=2
    map 0.0 -> 0
    map 0.1 -> 1.0
    map 1 -> 1.1
"""

from __future__ import annotations

import re
from typing import Iterable, List, Optional, Sequence, Tuple

from . import kernels
from .errors import (
    DomainError,
    NotAdmissibleError,
    NotBijectiveError,
    NotDeepEnoughError,
    ParseError,
    ShapeError,
)
from .partition import RegularPartition, _kraft_complete, image_addrs
from .tree import (
    Address,
    Ball,
    End,
    Shape,
    check_address,
    format_address,
    is_prefix,
    parse_address,
)

Pair = Tuple[Address, Address]

HEADER = "aaut v1"
_SHAPE_RE = re.compile(r"^shape d=(\d+) k=(\d+)$")
_MAP_RE = re.compile(r"^map (\S+) -> (\S+)$")


def _validate_code(shape: Shape, addrs: List[Address], side: str):
    from .errors import IncompleteError, OverlapError

    addrs = sorted(addrs)
    for a in addrs:
        if not a:
            raise OverlapError(f"{side} code contains the root")
        check_address(shape, a)
    for a, b in zip(addrs, addrs[1:]):
        if is_prefix(a, b):
            raise OverlapError(f"{side} leaves {format_address(a)} and {format_address(b)} overlap")
    if not _kraft_complete(shape, addrs):
        raise IncompleteError(f"{side} code does not cover the boundary")


class Element:
    """A finitary almost automorphism given by its leaf map.

    Instances are immutable.  The constructor validates and reduces unless
    told otherwise; arithmetic results are always reduced.
    """

    __slots__ = ("shape", "pairs", "_map", "_inv", "_maxlen", "_sorted", "_hash")

    def __init__(self, shape: Shape, pairs: Iterable[Pair], reduce: bool = True, check: bool = True):
        pairs = [(tuple(p), tuple(q)) for p, q in pairs]
        if check:
            doms = [p for p, _ in pairs]
            imgs = [q for _, q in pairs]
            if len(set(doms)) != len(doms):
                raise NotBijectiveError("a domain leaf is mapped twice")
            if len(set(imgs)) != len(imgs):
                raise NotBijectiveError("two domain leaves share an image")
            _validate_code(shape, doms, "domain")
            _validate_code(shape, imgs, "range")
        if reduce:
            pairs = kernels.reduce_pairs(pairs, shape.d)
        else:
            pairs.sort()
        self.shape = shape
        self.pairs = tuple(pairs)
        self._map = None
        self._inv = None
        self._maxlen = None
        self._sorted = None
        self._hash = None

    @classmethod
    def _raw(cls, shape: Shape, pairs) -> "Element":
        obj = cls.__new__(cls)
        obj.shape = shape
        obj.pairs = tuple(pairs)
        obj._map = obj._inv = obj._maxlen = obj._sorted = obj._hash = None
        return obj

    @classmethod
    def identity(cls, shape: Shape) -> "Element":
        return cls._raw(shape, [((i,), (i,)) for i in range(shape.k)])

    @classmethod
    def from_permutation(cls, partition: RegularPartition, perm: Sequence[int]) -> "Element":
        """The element sending part ``i`` of ``partition`` canonically onto part ``perm[i]``."""
        addrs = partition.addrs
        if sorted(perm) != list(range(len(addrs))):
            raise NotBijectiveError("not a permutation of the parts")
        return cls(partition.shape, [(addrs[i], addrs[j]) for i, j in enumerate(perm)], check=False)

    # -- views ---------------------------------------------------------

    @property
    def mapping(self) -> dict:
        if self._map is None:
            self._map = dict(self.pairs)
        return self._map

    @property
    def inverse_mapping(self) -> dict:
        if self._inv is None:
            self._inv = {q: p for p, q in self.pairs}
        return self._inv

    @property
    def maxlen(self) -> int:
        if self._maxlen is None:
            self._maxlen = max(len(p) for p, _ in self.pairs)
        return self._maxlen

    @property
    def sorted_domain(self) -> list:
        if self._sorted is None:
            self._sorted = [p for p, _ in self.pairs]
        return self._sorted

    @property
    def domain(self) -> RegularPartition:
        return RegularPartition._trusted(self.shape, self.sorted_domain)

    @property
    def range(self) -> RegularPartition:
        return RegularPartition._trusted(self.shape, sorted(q for _, q in self.pairs))

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.shape == other.shape and self.pairs == other.pairs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, self.pairs))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{format_address(p)}->{format_address(q)}" for p, q in self.pairs)
        return f"Element({self.shape}: {body})"

    @property
    def is_identity(self) -> bool:
        return all(p == q for p, q in self.pairs)

    @property
    def is_reduced(self) -> bool:
        return list(self.pairs) == kernels.reduce_pairs(list(self.pairs), self.shape.d)

    # -- arithmetic ----------------------------------------------------

    def compose(self, other: "Element") -> "Element":
        """``self o other``: apply ``other`` first."""
        if self.shape != other.shape:
            raise ShapeError(f"cannot compose elements on {self.shape} and {other.shape}")
        raw = kernels.compose_pairs(self.mapping, self.sorted_domain, self.maxlen, list(other.pairs))
        return Element._raw(self.shape, kernels.reduce_pairs(raw, self.shape.d))

    __mul__ = compose

    def inverse(self) -> "Element":
        return Element._raw(self.shape, sorted((q, p) for p, q in self.pairs))

    __invert__ = inverse

    def power(self, n: int) -> "Element":
        if n < 0:
            return self.inverse().power(-n)
        result = Element.identity(self.shape)
        base = self
        while n:
            if n & 1:
                result = base.compose(result)
            n >>= 1
            if n:
                base = base.compose(base)
        return result

    def __pow__(self, n: int) -> "Element":
        return self.power(n)

    # -- action on the boundary ----------------------------------------

    def apply_to_address(self, addr) -> Address:
        """Image of the ball ``addr``; it must lie inside a domain leaf."""
        addr = addr.addr if isinstance(addr, Ball) else tuple(addr)
        img = kernels.image(self.mapping, addr, self.maxlen)
        if img is None:
            raise NotDeepEnoughError(f"{format_address(addr)} is split by the domain code")
        return img

    def __call__(self, ball: Ball) -> Ball:
        if ball.shape != self.shape:
            raise ShapeError(f"ball on {ball.shape}, element on {self.shape}")
        return Ball(self.shape, self.apply_to_address(ball.addr))

    def apply_to_end(self, e: End) -> End:
        if e.shape != self.shape:
            raise ShapeError(f"end on {e.shape}, element on {self.shape}")
        head = e.prefix(self.maxlen)
        p = kernels.leaf_prefix(self.mapping, head, self.maxlen)
        n = len(p)
        pre, per = e.preperiod, e.period
        if n <= len(pre):
            rest_pre, rest_per = pre[n:], per
        else:
            j = (n - len(pre)) % len(per)
            rest_pre, rest_per = (), per[j:] + per[:j]
        return End(self.shape, self.mapping[p] + rest_pre, rest_per)

    def leaves_under(self, addr: Address) -> List[Pair]:
        lo, hi = kernels.extension_range(self.sorted_domain, addr)
        m = self.mapping
        return [(p, m[p]) for p in self.sorted_domain[lo:hi]]

    def is_homothety_on(self, b) -> bool:
        """True iff the restriction to ``b`` is a single prefix substitution."""
        addr = b.addr if isinstance(b, Ball) else tuple(b)
        if kernels.leaf_prefix(self.mapping, addr, self.maxlen) is not None:
            return True
        under = self.leaves_under(addr)
        if not under:
            return False
        n = len(addr)
        w = None
        for p, q in under:
            t = p[n:]
            if len(q) < len(t) or q[len(q) - len(t):] != t:
                return False
            head = q[: len(q) - len(t)]
            if w is None:
                w = head
            elif head != w:
                return False
        return bool(w)

    def coarsest_admissible(self) -> RegularPartition:
        """The domain code of the reduced form."""
        return self.domain

    def in_stab(self, p: RegularPartition) -> bool:
        """True iff ``p`` is admissible for this element and preserved by it."""
        if p.shape != self.shape:
            raise ShapeError("partition and element on different trees")
        try:
            imgs = image_addrs(self, p.addrs)
        except NotAdmissibleError:
            return False
        return sorted(imgs) == list(p.addrs)

    def in_stab_spherical(self) -> Optional[int]:
        """Least ``n`` with this element in the stabilizer of the level-``n`` sphere."""
        if any(len(p) != len(q) for p, q in self.pairs):
            return None
        return self.maxlen

    def fixes_pointwise(self, b) -> bool:
        addr = b.addr if isinstance(b, Ball) else tuple(b)
        p = kernels.leaf_prefix(self.mapping, addr, self.maxlen)
        if p is not None:
            return self.mapping[p] == p
        return all(p == q for p, q in self.leaves_under(addr))

    def supported_in(self, b) -> bool:
        """True iff every point outside ``b`` is fixed."""
        return self.supported_in_union([b])

    def supported_in_union(self, balls) -> bool:
        addrs = [b.addr if isinstance(b, Ball) else tuple(b) for b in balls]
        for p, q in self.pairs:
            if p != q and not any(is_prefix(a, p) for a in addrs):
                return False
        return True

    def support(self) -> Tuple[Ball, ...]:
        """Disjoint balls covering exactly the points moved by this element.

        Moved domain leaves are merged into their parent whenever a full
        sibling block is moved; the root is never produced.
        """
        moved = {p for p, q in self.pairs if p != q}
        d = self.shape.d
        stack = sorted({p[:-1] for p in moved if len(p) >= 2})
        while stack:
            parent = stack.pop()
            kids = [parent + (i,) for i in range(d)]
            if all(c in moved for c in kids):
                moved.difference_update(kids)
                moved.add(parent)
                if len(parent) >= 2:
                    stack.append(parent[:-1])
        return tuple(Ball(self.shape, a) for a in sorted(moved))

    # -- text form -----------------------------------------------------

    def serialize(self) -> str:
        if self.is_reduced:
            pairs = self.pairs
        else:
            pairs = kernels.reduce_pairs(list(self.pairs), self.shape.d)
        lines = [HEADER, f"shape d={self.shape.d} k={self.shape.k}"]
        lines += [f"map {format_address(p)} -> {format_address(q)}" for p, q in pairs]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, shape: Optional[Shape] = None) -> "Element":
        """Parse the element file format.

        The header lines may be omitted when ``shape`` is given; ``;`` also
        separates lines, so ``"map 0 -> 1; map 1 -> 0"`` is accepted.
        """
        lines = [ln.strip() for ln in text.replace(";", "\n").split("\n")]
        lines = [ln for ln in lines if ln]
        if lines and lines[0].startswith("aaut"):
            if lines[0] != HEADER:
                raise ParseError(f"unsupported header {lines[0]!r}")
            lines = lines[1:]
            if not lines:
                raise ParseError("missing shape line")
            m = _SHAPE_RE.match(lines[0])
            if not m:
                raise ParseError(f"bad shape line {lines[0]!r}")
            try:
                file_shape = Shape(int(m.group(1)), int(m.group(2)))
            except DomainError as exc:
                raise ParseError(str(exc)) from None
            if shape is not None and shape != file_shape:
                raise ShapeError(f"file declares {file_shape}, expected {shape}")
            shape = file_shape
            lines = lines[1:]
        elif lines and lines[0].startswith("shape"):
            raise ParseError("shape line without header")
        if shape is None:
            raise ParseError("no shape given")
        pairs = []
        for ln in lines:
            m = _MAP_RE.match(ln)
            if not m:
                raise ParseError(f"bad line {ln!r}")
            pairs.append((parse_address(m.group(1), shape), parse_address(m.group(2), shape)))
        if not pairs:
            raise ParseError("element has no map lines")
        return cls(shape, pairs)


# -- module-level API ------------------------------------------------------


def parse(text: str, shape: Optional[Shape] = None) -> Element:
    return Element.parse(text, shape)


def serialize(g: Element) -> str:
    return g.serialize()


def reduce(g: Element) -> Element:
    """Canonical reduced form of a possibly unreduced element."""
    return Element._raw(g.shape, kernels.reduce_pairs(list(g.pairs), g.shape.d))


def compose(g: Element, h: Element) -> Element:
    return g.compose(h)


def invert(g: Element) -> Element:
    return g.inverse()


def power(g: Element, n: int) -> Element:
    return g.power(n)


def commutator(a: Element, b: Element) -> Element:
    """``[a, b] = a b a^-1 b^-1``."""
    return a.compose(b).compose(a.inverse()).compose(b.inverse())


def split_leaf(g: Element, leaf: Address) -> Element:
    """Unreduced copy of ``g`` with ``leaf`` replaced by its children (same element)."""
    m = dict(g.pairs)
    img = m.pop(tuple(leaf))
    for i in range(g.shape.d):
        m[tuple(leaf) + (i,)] = img + (i,)
    return Element(g.shape, m.items(), reduce=False, check=False)


def element_from_map(shape: Shape, mapping: dict) -> Element:
    return Element(shape, mapping.items())


def apply_to_address(g: Element, a) -> Address:
    return g.apply_to_address(a)


def apply_to_end(g: Element, e: End) -> End:
    return g.apply_to_end(e)


def is_homothety_on(g: Element, b) -> bool:
    return g.is_homothety_on(b)


def coarsest_admissible(g: Element) -> RegularPartition:
    return g.coarsest_admissible()


def in_stab(g: Element, p: RegularPartition) -> bool:
    return g.in_stab(p)


def in_stab_spherical(g: Element) -> Optional[int]:
    return g.in_stab_spherical()


def fixes_pointwise(g: Element, b) -> bool:
    return g.fixes_pointwise(b)


def supported_in(g: Element, b) -> bool:
    return g.supported_in(b)


def support(g: Element):
    return g.support()
