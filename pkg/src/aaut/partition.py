"""Regular partitions of the boundary and the refinement operators built on them.

A regular partition is a complete prefix code: a finite set of vertices, none a
prefix of another, whose balls cover the boundary.  Parts are always stored in
planar order.  The operators ``theta``, ``delta_refinement`` and ``omega`` are
the building blocks of the refinement engine in :mod:`aaut.classify`.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence

from . import kernels
from .errors import IncompleteError, NotAdmissibleError, OverlapError, ParseError, ShapeError
from .tree import Address, Ball, Shape, check_address, format_address, parse_address


def _kraft_complete(shape: Shape, addrs: Sequence[Address]) -> bool:
    # a prefix-free code is complete iff its ball measures sum to one
    depth = max(len(a) for a in addrs)
    total = sum(shape.d ** (depth - len(a)) for a in addrs)
    return total == shape.k * shape.d ** (depth - 1)


class RegularPartition:
    """A finite partition of the boundary into proper balls."""

    __slots__ = ("shape", "addrs", "_index")

    def __init__(self, shape: Shape, parts: Iterable):
        addrs = []
        for part in parts:
            if isinstance(part, Ball):
                if part.shape != shape:
                    raise ShapeError(f"part {part} is on {part.shape}, not {shape}")
                addrs.append(part.addr)
            else:
                addrs.append(check_address(shape, part))
        addrs.sort()
        if not addrs:
            raise IncompleteError("a partition needs at least one part")
        for a in addrs:
            if not a:
                raise OverlapError("the root is not a proper ball")
        for a, b in zip(addrs, addrs[1:]):
            if len(a) <= len(b) and b[: len(a)] == a:
                raise OverlapError(f"parts {format_address(a)} and {format_address(b)} overlap")
        if not _kraft_complete(shape, addrs):
            raise IncompleteError("parts do not cover the boundary")
        self.shape = shape
        self.addrs = tuple(addrs)
        self._index = None

    @classmethod
    def _trusted(cls, shape: Shape, addrs) -> "RegularPartition":
        obj = cls.__new__(cls)
        obj.shape = shape
        obj.addrs = tuple(addrs)
        obj._index = None
        return obj

    @classmethod
    def parse(cls, text: str, shape: Shape) -> "RegularPartition":
        """Parse the comma-separated form, e.g. ``"0.0,0.1,1"``."""
        toks = [t for t in text.split(",")]
        if not text.strip() or any(not t.strip() for t in toks):
            raise ParseError(f"bad partition {text!r}")
        return cls(shape, [parse_address(t, shape) for t in toks])

    @property
    def parts(self):
        return tuple(Ball(self.shape, a) for a in self.addrs)

    @property
    def index(self):
        """Dict keyed by parts, for prefix lookups."""
        if self._index is None:
            self._index = dict.fromkeys(self.addrs)
        return self._index

    def __len__(self):
        return len(self.addrs)

    def __iter__(self):
        return iter(self.parts)

    def __contains__(self, item):
        addr = item.addr if isinstance(item, Ball) else tuple(item)
        return addr in self.index

    def __eq__(self, other):
        if not isinstance(other, RegularPartition):
            return NotImplemented
        return self.shape == other.shape and self.addrs == other.addrs

    def __hash__(self):
        return hash((self.shape, self.addrs))

    def __str__(self):
        return ",".join(format_address(a) for a in self.addrs)

    def __repr__(self):
        return f"RegularPartition({self.shape}, [{self}])"


def validate_partition(parts: Iterable, shape: Optional[Shape] = None) -> RegularPartition:
    """Check that ``parts`` is a complete prefix code and return it in planar order."""
    parts = list(parts)
    if shape is None:
        shapes = {p.shape for p in parts if isinstance(p, Ball)}
        if len(shapes) != 1:
            raise ShapeError("cannot infer a single shape from the parts")
        shape = shapes.pop()
    return RegularPartition(shape, parts)


def _check_shapes(*objs):
    shapes = {o.shape for o in objs}
    if len(shapes) != 1:
        raise ShapeError(f"operands on different trees: {sorted(map(str, shapes))}")


def refines(fine: RegularPartition, coarse: RegularPartition) -> bool:
    """True iff every part of ``fine`` lies inside a part of ``coarse``."""
    _check_shapes(fine, coarse)
    index = coarse.index
    maxlen = max(len(a) for a in coarse.addrs)
    return all(kernels.leaf_prefix(index, a, maxlen) is not None for a in fine.addrs)


def common_refinement(p: RegularPartition, q: RegularPartition) -> RegularPartition:
    """The coarsest partition refining both ``p`` and ``q``."""
    _check_shapes(p, q)
    merged = sorted(set(p.addrs) | set(q.addrs))
    return RegularPartition._trusted(p.shape, kernels.minimal_sorted(merged))


def image_addrs(g, addrs: Sequence[Address]) -> List[Address]:
    """Images of the balls ``addrs`` under ``g``; raises if one is not admissible."""
    mapping, maxlen = g.mapping, g.maxlen
    out = []
    for a in addrs:
        img = kernels.image(mapping, a, maxlen)
        if img is None:
            raise NotAdmissibleError(
                f"part {format_address(a)} is split by the domain code", part=a
            )
        out.append(img)
    return out


def is_admissible(p: RegularPartition, g) -> bool:
    mapping, maxlen = g.mapping, g.maxlen
    return all(kernels.leaf_prefix(mapping, a, maxlen) is not None for a in p.addrs)


def apply_element(g, p: RegularPartition) -> RegularPartition:
    """The partition ``g.P`` of images of the parts of ``p``."""
    _check_shapes(g, p)
    return RegularPartition._trusted(p.shape, sorted(image_addrs(g, p.addrs)))


def _ball_addr(b, shape):
    if isinstance(b, Ball):
        if b.shape != shape:
            raise ShapeError(f"ball {b} is on {b.shape}, not {shape}")
        return b.addr
    return check_address(shape, b)


def orbit_candidates(X: RegularPartition, A: Sequence) -> List[Address]:
    """Sorted, deduplicated set ``{a(Z) : Z in X, a in A}``."""
    cands = set()
    for a in A:
        _check_shapes(a, X)
        cands.update(image_addrs(a, X.addrs))
    return sorted(cands)


def theta(R, X: RegularPartition, A: Sequence):
    """Minimal balls ``a(Z)`` inside ``R`` (``Z`` in ``X``, ``a`` in ``A``); ``(R,)`` if none.

    Returns a tuple of :class:`Ball` in planar order.
    """
    r = _ball_addr(R, X.shape)
    found = kernels.theta_sweep([r], orbit_candidates(X, A))[0]
    return tuple(Ball(X.shape, a) for a in (found or [r]))


def delta_refinement(g, K: Sequence, p: RegularPartition) -> RegularPartition:
    """Union over ``Q`` in ``g.p`` of ``theta(Q, p, K)``; a partition refining ``g.p``."""
    _check_shapes(g, p)
    targets = sorted(image_addrs(g, p.addrs))
    cands = orbit_candidates(p, K)
    out = []
    for t, found in zip(targets, kernels.theta_sweep(targets, cands)):
        out.extend(found or [t])
    return RegularPartition._trusted(p.shape, out)


def omega(p: RegularPartition, g):
    """Parts ``Q`` of ``g.p`` strictly containing some part of ``p``, in planar order."""
    _check_shapes(g, p)
    mine = list(p.addrs)
    out = []
    for q in sorted(image_addrs(g, p.addrs)):
        lo, hi = kernels.extension_range(mine, q)
        if any(mine[i] != q for i in range(lo, hi)):
            out.append(Ball(p.shape, q))
    return tuple(out)


class Tag:
    """Provenance of a part: it equals ``gamma(source)`` with ``gamma`` a homothety there.

    ``gamma`` is either given directly or defined as ``step o parent.gamma`` and
    materialized on first access.
    """

    __slots__ = ("source", "_gamma", "parent", "step", "depth")

    def __init__(self, source: Address, gamma=None, parent: "Tag" = None, step=None):
        self.source = source
        self._gamma = gamma
        self.parent = parent
        self.step = step
        self.depth = 0 if parent is None else parent.depth + 1

    @property
    def gamma(self):
        if self._gamma is None:
            chain = []
            node = self
            while node._gamma is None:
                chain.append(node)
                node = node.parent
            acc = node._gamma
            for node in reversed(chain):
                acc = node.step.compose(acc)
                node._gamma = acc
        return self._gamma


class TaggedPartition:
    """A regular partition whose parts carry :class:`Tag` provenance."""

    __slots__ = ("partition", "tags")

    def __init__(self, partition: RegularPartition, tags: Sequence[Tag]):
        if len(tags) != len(partition):
            raise ValueError("one tag per part required")
        self.partition = partition
        self.tags = tuple(tags)

    @property
    def shape(self):
        return self.partition.shape

    def items(self):
        return zip(self.partition.addrs, self.tags)

    def check(self) -> Optional[str]:
        """Return None if every tag is valid, else a description of the first failure."""
        for addr, tag in self.items():
            gamma = tag.gamma
            img = kernels.image(gamma.mapping, tag.source, gamma.maxlen)
            if img is None:
                return f"tag of {format_address(addr)} is not a homothety on its source"
            if img != addr:
                return f"tag of {format_address(addr)} maps its source to {format_address(img)}"
        return None
