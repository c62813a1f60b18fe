"""Elliptic/translation classification of elements and finitely generated subgroups.

The core is :class:`RefinementEngine`.  Starting from a partition ``P_0``
admissible for ``g`` and for a finite group ``K`` (given as permutations of
the parts of a partition it preserves), it iterates

    P_{n+1} = g^-1 . Delta(P_n),   Delta(P) = union over Q in g.P of Theta_K(Q, P)

Each part carries a tag ``(gamma, source)`` with ``gamma(source) = part``.
Either the sequence stabilizes, and the limit is preserved by ``g`` and
``K``, or two tags with the same source become strictly nested, and
``xi^-1 delta`` contracts the source ball: a translation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import kernels
from .element import Element
from .errors import CertificateError, IterationCapExceeded, ShapeError
from .partition import (
    RegularPartition,
    Tag,
    TaggedPartition,
    common_refinement,
    image_addrs,
    omega,
)
from .tree import Address, Ball, Shape, format_address, is_prefix, level_addresses

DEFAULT_ITER_CAP = 10_000
DEFAULT_CLOSURE_CAP = 1_000_000

Perm = Tuple[int, ...]


# -- verdicts ----------------------------------------------------------------


@dataclass(frozen=True)
class Elliptic:
    invariant_partition: RegularPartition
    order: int

    def to_json(self):
        return {
            "class": "elliptic",
            "order": self.order,
            "invariant_partition": [format_address(a) for a in self.invariant_partition.addrs],
        }


@dataclass(frozen=True)
class Translation:
    """``witness ** power`` is a homothety on ``ball`` onto ``image``, strictly inside it."""

    witness: Element
    ball: Ball
    power: int
    image: Ball

    def to_json(self):
        return {
            "class": "translation",
            "witness": self.witness.serialize(),
            "ball": str(self.ball),
            "power": self.power,
            "image": str(self.image),
        }


@dataclass(frozen=True)
class FiniteSubgroupCert:
    """A finite subgroup acting by ``generator_perms`` on the parts of ``base_partition``.

    ``order`` is None when the closure outgrew ``closure_cap``.
    """

    base_partition: RegularPartition
    generator_perms: Tuple[Perm, ...]
    order: Optional[int]
    closure_cap: int = DEFAULT_CLOSURE_CAP

    @property
    def cap_exceeded(self) -> bool:
        return self.order is None

    def to_json(self):
        out = {
            "class": "elliptic",
            "order": self.order if self.order is not None else "cap_exceeded",
            "invariant_partition": [format_address(a) for a in self.base_partition.addrs],
        }
        if self.order is None:
            out["cap"] = self.closure_cap
        return out


Classification = Union[Elliptic, Translation]


@dataclass(frozen=True)
class Stabilized:
    partition: RegularPartition
    iterations: int


@dataclass(frozen=True)
class Witness:
    """``gamma`` is a homothety on ``source`` with ``gamma(source) = image`` strictly inside."""

    gamma: Element
    source: Ball
    image: Ball
    iterations: int
    # for K trivial the witness is a power of g; this records the exponent
    exponent: Optional[int] = None


# -- permutation helpers -----------------------------------------------------


def perm_compose(a: Perm, b: Perm) -> Perm:
    """``a o b``: apply ``b`` first."""
    return tuple(a[i] for i in b)


def perm_inverse(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def perm_order(a: Perm) -> int:
    seen = [False] * len(a)
    order = 1
    for i in range(len(a)):
        if not seen[i]:
            n, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = a[j]
                n += 1
            order = math.lcm(order, n)
    return order


def induced_permutation(g: Element, q: RegularPartition) -> Perm:
    """The permutation of the parts of ``q`` induced by ``g``, which must preserve ``q``."""
    pos = {a: i for i, a in enumerate(q.addrs)}
    try:
        return tuple(pos[b] for b in image_addrs(g, q.addrs))
    except KeyError:
        raise CertificateError("element does not preserve the partition") from None


def _then(a: Perm, b: Perm) -> Perm:
    # apply a, then b
    return tuple(map(b.__getitem__, a))


def group_order(perms: Sequence[Perm], degree: int, cap: Optional[int] = None) -> Optional[int]:
    """Exact order of the permutation group generated by ``perms`` (Schreier-Sims).

    With ``cap`` given, returns None as soon as the order is known to exceed it:
    current orbit sizes only grow, so their product bounds the order from below.
    """
    identity = tuple(range(degree))
    strong = [tuple(p) for p in dict.fromkeys(perms) if tuple(p) != identity]
    base: List[int] = []
    trans: List[Dict[int, Tuple[Perm, Perm]]] = []
    # Schreier generators already sifted, per level; valid until the transversal changes
    tested: List[set] = []

    def moved_point(p):
        return next(x for x in range(degree) if p[x] != x)

    def level_gens(i):
        fixed = base[:i]
        return [s for s in strong if all(s[b] == b for b in fixed)]

    def orbit(i):
        b = base[i]
        gens = level_gens(i)
        t = {b: (identity, identity)}
        queue = [b]
        for y in queue:
            u = t[y][0]
            for s in gens:
                z = s[y]
                if z not in t:
                    v = _then(u, s)
                    t[z] = (v, perm_inverse(v))
                    queue.append(z)
        trans[i] = t
        tested[i] = set()

    def sift(h, start):
        for i in range(start, len(base)):
            y = h[base[i]]
            entry = trans[i].get(y)
            if entry is None:
                return h, i
            h = _then(h, entry[1])
        return h, len(base)

    def add_base_point(p):
        base.append(moved_point(p))
        trans.append({})
        tested.append(set())

    for s in strong:
        if all(s[b] == b for b in base):
            add_base_point(s)
    for i in range(len(base)):
        orbit(i)
    if cap is not None and math.prod(len(t) for t in trans) > cap:
        return None
    i = len(base) - 1
    while i >= 0:
        restart = False
        done = tested[i]
        for y, (u, _) in list(trans[i].items()):
            for s in level_gens(i):
                if (y, s) in done:
                    continue
                done.add((y, s))
                h = _then(_then(u, s), trans[i][s[y]][1])
                if h == identity:
                    continue
                r, j = sift(h, i + 1)
                if r == identity:
                    continue
                strong.append(r)
                if j == len(base):
                    add_base_point(r)
                for l in range(i + 1, j + 1):
                    orbit(l)
                if cap is not None and math.prod(len(t) for t in trans) > cap:
                    return None
                i = j
                restart = True
                break
            if restart:
                break
        if not restart:
            i -= 1
    return math.prod(len(t) for t in trans)


def closure_order(perms: Sequence[Perm], degree: int, cap: int = DEFAULT_CLOSURE_CAP) -> Optional[int]:
    """Order of the group generated by ``perms``; None if it exceeds ``cap``."""
    order = group_order(perms, degree, cap)
    return order if order is not None and order <= cap else None


def closure_order_bfs(perms: Sequence[Perm], degree: int, cap: int = DEFAULT_CLOSURE_CAP) -> Optional[int]:
    """Same contract as :func:`closure_order`, by breadth-first enumeration of the group."""
    identity = tuple(range(degree))
    seen = {identity}
    frontier = [identity]
    gens = [p for p in set(perms) if p != identity]
    while frontier:
        nxt = []
        for p in frontier:
            for s in gens:
                q = tuple(s[i] for i in p)
                if q not in seen:
                    seen.add(q)
                    if len(seen) > cap:
                        return None
                    nxt.append(q)
        frontier = nxt
    return len(seen)


class PartitionAction:
    """A finite subgroup of V acting by permutations on the parts of ``base``.

    Elements of V preserving a partition act canonically on each part, so the
    permutation determines the element.
    """

    def __init__(self, base: RegularPartition, perms: Sequence[Perm] = ()):
        self.base = base
        self.perms = tuple(tuple(p) for p in perms)
        self._orbits = None
        self._elements: Dict[Perm, Element] = {}

    @classmethod
    def trivial(cls, shape: Shape) -> "PartitionAction":
        return cls(RegularPartition._trusted(shape, level_addresses(shape, 1)))

    @classmethod
    def from_elements(cls, base: RegularPartition, elements: Sequence[Element]) -> "PartitionAction":
        return cls(base, [induced_permutation(e, base) for e in elements])

    @property
    def shape(self):
        return self.base.shape

    @property
    def is_trivial(self) -> bool:
        identity = tuple(range(len(self.base)))
        return all(p == identity for p in self.perms)

    def orbits(self) -> List[Dict[int, Perm]]:
        """For each part ``i``: ``{j: perm}`` over its orbit, ``perm`` sending ``i`` to ``j``."""
        if self._orbits is None:
            n = len(self.base)
            identity = tuple(range(n))
            result = []
            for i in range(n):
                orb = {i: identity}
                frontier = [i]
                while frontier:
                    nxt = []
                    for j in frontier:
                        for s in self.perms:
                            t = s[j]
                            if t not in orb:
                                orb[t] = perm_compose(s, orb[j])
                                nxt.append(t)
                    frontier = nxt
                result.append(orb)
            self._orbits = result
        return self._orbits

    def element(self, perm: Perm) -> Element:
        e = self._elements.get(perm)
        if e is None:
            e = Element.from_permutation(self.base, perm)
            self._elements[perm] = e
        return e

    def generators(self) -> List[Element]:
        return [self.element(p) for p in self.perms]


# -- refinement engine -------------------------------------------------------


@dataclass
class StepRecord:
    """One engine iteration: ``after = g^-1 . Delta(before)``.

    ``provenance[i]`` explains part ``i`` of ``after``: ``("kept", B)`` when it
    equals the part ``B`` of ``before``, or ``("moved", k, Z)`` when it equals
    ``g^-1 k (Z)`` for ``Z`` in ``before`` and ``k`` in ``K``.
    """

    before: TaggedPartition
    after: TaggedPartition
    provenance: List[tuple] = field(default_factory=list)


class RefinementEngine:
    def __init__(self, g: Element, K: Optional[PartitionAction], p0: RegularPartition,
                 iter_cap: int = DEFAULT_ITER_CAP, record: bool = False):
        if K is None:
            K = PartitionAction.trivial(g.shape)
        if not (g.shape == K.shape == p0.shape):
            raise ShapeError("engine inputs on different trees")
        self.g = g
        self.g_inv = g.inverse()
        self.K = K
        self.iter_cap = iter_cap
        self.record = record
        self.history: List[StepRecord] = []
        # validates admissibility of p0 for g
        image_addrs(g, p0.addrs)
        base_index = K.base.index
        base_maxlen = max(len(a) for a in K.base.addrs)
        self._base_pos = {a: i for i, a in enumerate(K.base.addrs)}
        for a in p0.addrs:
            if kernels.leaf_prefix(base_index, a, base_maxlen) is None:
                raise CertificateError(f"p0 part {format_address(a)} does not refine K's partition")
        self._base_index, self._base_maxlen = base_index, base_maxlen
        self._steps: Dict[Perm, Element] = {}
        identity = Element.identity(g.shape)
        tags = [Tag(a, gamma=identity) for a in p0.addrs]
        self.current = TaggedPartition(p0, tags)
        self._seen: Dict[Address, Dict[Address, Tag]] = {}
        for a, t in zip(p0.addrs, tags):
            self._seen.setdefault(t.source, {})[a] = t
        self.iterations = 0

    def _step_element(self, perm: Perm) -> Element:
        # g^-1 o k
        e = self._steps.get(perm)
        if e is None:
            e = self.g_inv.compose(self.K.element(perm))
            self._steps[perm] = e
        return e

    def _candidates(self, parts: Sequence[Address]):
        """Orbit images ``k(Z)``, each with a witness ``(perm, index of Z)``."""
        orbits = self.K.orbits()
        base = self.K.base.addrs
        out: Dict[Address, Tuple[Perm, int]] = {}
        for zi, z in enumerate(parts):
            a = kernels.leaf_prefix(self._base_index, z, self._base_maxlen)
            i = self._base_pos[a]
            suffix = z[len(a):]
            for j, perm in orbits[i].items():
                c = base[j] + suffix
                if c not in out:
                    out[c] = (perm, zi)
        return out

    def step(self):
        """Advance one iteration; returns a Stabilized, a Witness, or None to continue."""
        if self.iterations >= self.iter_cap:
            raise IterationCapExceeded(f"no verdict after {self.iter_cap} iterations")
        self.iterations += 1
        cur = self.current
        parts = cur.partition.addrs
        tags = cur.tags
        targets = image_addrs(self.g, parts)
        cands = self._candidates(parts)
        found_lists = kernels.theta_sweep(targets, sorted(cands))
        new = []
        moved = []
        prov = [] if self.record else None
        for b, tag, q, found in zip(parts, tags, targets, found_lists):
            if not found:
                new.append((b, tag))
                if prov is not None:
                    prov.append((b, ("kept", b)))
                continue
            n = len(q)
            for c in found:
                perm, zi = cands[c]
                part = b + c[n:]
                item = (part, Tag(tags[zi].source, parent=tags[zi], step=self._step_element(perm)))
                new.append(item)
                moved.append(item)
                if prov is not None:
                    prov.append((part, ("moved", self.K.element(perm), parts[zi])))
        new.sort(key=lambda x: x[0])
        nxt = TaggedPartition(
            RegularPartition._trusted(cur.shape, [a for a, _ in new]), [t for _, t in new]
        )
        if self.record:
            prov.sort(key=lambda x: x[0])
            self.history.append(StepRecord(cur, nxt, [p for _, p in prov]))
        self.current = nxt
        if len(nxt.partition) == len(cur.partition):
            return self._stabilized(cur.partition)
        return self._scan(moved)

    def _scan(self, items) -> Optional[Witness]:
        # a same-source ancestor of a fresh part yields a contracting gamma
        for addr, tag in items:
            seen = self._seen.setdefault(tag.source, {})
            for i in range(1, len(addr)):
                xi = seen.get(addr[:i])
                if xi is not None:
                    return self._witness(xi, tag)
            seen.setdefault(addr, tag)
        return None

    def _witness(self, xi: Tag, delta: Tag) -> Witness:
        gamma = xi.gamma.inverse().compose(delta.gamma)
        src = xi.source
        img = kernels.image(gamma.mapping, src, gamma.maxlen)
        if img is None or not (len(img) > len(src) and img[: len(src)] == src):
            raise CertificateError("extracted witness does not contract its source")
        exponent = None
        if self.K.is_trivial:
            # tags are g^-depth when K is trivial
            exponent = xi.depth - delta.depth
        shape = self.g.shape
        return Witness(gamma, Ball(shape, src), Ball(shape, img), self.iterations, exponent)

    def _stabilized(self, q: RegularPartition) -> Stabilized:
        if omega(q, self.g):
            raise CertificateError("stabilized partition is not preserved by g")
        for k in self.K.generators():
            if omega(q, k):
                raise CertificateError("stabilized partition is not preserved by K")
        return Stabilized(q, self.iterations)

    def run(self) -> Union[Stabilized, Witness]:
        while True:
            res = self.step()
            if res is not None:
                return res


def refinement_engine(g: Element, K: Optional[PartitionAction] = None,
                      p0: Optional[RegularPartition] = None,
                      iter_cap: int = DEFAULT_ITER_CAP) -> Union[Stabilized, Witness]:
    """Run the tagged refinement from ``p0`` (default: common refinement of K's and g's codes)."""
    if K is None:
        K = PartitionAction.trivial(g.shape)
    if p0 is None:
        p0 = common_refinement(K.base, g.coarsest_admissible())
    return RefinementEngine(g, K, p0, iter_cap).run()


# -- certificates ------------------------------------------------------------


def contracting_leaf(h: Element) -> Optional[Tuple[Address, Address]]:
    """First domain leaf ``p`` (planar order) whose image strictly extends ``p``."""
    for p, q in h.pairs:
        if len(q) > len(p) and q[: len(p)] == p:
            return p, q
    return None


def expanding_leaf(h: Element) -> Optional[Tuple[Address, Address]]:
    for p, q in h.pairs:
        if len(p) > len(q) and p[: len(q)] == q:
            return p, q
    return None


def _power_certificate(g: Element, bound: int) -> Optional[Translation]:
    # smallest |n| <= bound, positive first, whose reduced power has a contracting leaf
    pos = neg = Element.identity(g.shape)
    g_inv = g.inverse()
    for n in range(1, bound + 1):
        pos = g.compose(pos)
        leaf = contracting_leaf(pos)
        if leaf:
            return Translation(g, Ball(g.shape, leaf[0]), n, Ball(g.shape, leaf[1]))
        neg = g_inv.compose(neg)
        leaf = contracting_leaf(neg)
        if leaf:
            return Translation(g, Ball(g.shape, leaf[0]), -n, Ball(g.shape, leaf[1]))
    return None


def _leaf_certificate(gamma: Element, w: Witness) -> Translation:
    leaf = contracting_leaf(gamma)
    if leaf is None:
        return Translation(gamma, w.source, 1, w.image)
    return Translation(gamma, Ball(gamma.shape, leaf[0]), 1, Ball(gamma.shape, leaf[1]))


def classify_element(g: Element, iter_cap: int = DEFAULT_ITER_CAP) -> Classification:
    """Elliptic with invariant partition and exact order, or a translation certificate."""
    res = RefinementEngine(g, None, g.coarsest_admissible(), iter_cap).run()
    if isinstance(res, Stabilized):
        q = res.partition
        return Elliptic(q, perm_order(induced_permutation(g, q)))
    if res.exponent:
        cert = _power_certificate(g, abs(res.exponent))
        if cert is not None:
            return cert
    return _leaf_certificate(res.gamma, res)


def classify_subgroup(gens: Sequence[Element], iter_cap: int = DEFAULT_ITER_CAP,
                      closure_cap: int = DEFAULT_CLOSURE_CAP) -> Union[FiniteSubgroupCert, Translation]:
    """Decide whether ``<gens>`` is finite; certificate either way.

    Generators are absorbed one at a time: the engine runs for the next
    generator against the finite group built so far.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    shape = gens[0].shape
    if any(g.shape != shape for g in gens):
        raise ShapeError("generators on different trees")
    K = PartitionAction.trivial(shape)
    absorbed: List[Element] = []
    for g in gens:
        p0 = common_refinement(K.base, g.coarsest_admissible())
        res = RefinementEngine(g, K, p0, iter_cap).run()
        if isinstance(res, Witness):
            return _leaf_certificate(res.gamma, res)
        absorbed.append(g)
        K = PartitionAction.from_elements(res.partition, absorbed)
    order = closure_order(K.perms, len(K.base), closure_cap)
    return FiniteSubgroupCert(K.base, K.perms, order, closure_cap)


@dataclass(frozen=True)
class WitnessCheck:
    ok: bool
    reason: str = "ok"

    def __bool__(self):
        return self.ok


def verify_witness(w: Translation) -> WitnessCheck:
    if w.power == 0:
        return WitnessCheck(False, "zero_power")
    if w.ball.shape != w.witness.shape or w.image.shape != w.witness.shape:
        return WitnessCheck(False, "shape_mismatch")
    h = w.witness.power(w.power)
    if not h.is_homothety_on(w.ball):
        return WitnessCheck(False, "not_homothety")
    img = _homothety_image(h, w.ball.addr)
    if img != w.image.addr:
        return WitnessCheck(False, "image_mismatch")
    if not (len(img) > w.ball.level and is_prefix(w.ball.addr, img)):
        return WitnessCheck(False, "image_not_strictly_inside")
    return WitnessCheck(True)


def _homothety_image(h: Element, addr: Address) -> Address:
    img = kernels.image(h.mapping, addr, h.maxlen)
    if img is not None:
        return img
    p, q = h.leaves_under(addr)[0]
    t = p[len(addr):]
    return q[: len(q) - len(t)]


# -- brute-force oracle --------------------------------------------------------


@dataclass(frozen=True)
class OracleElliptic:
    order: int


@dataclass(frozen=True)
class OracleTranslation:
    power: int
    ball: Ball


@dataclass(frozen=True)
class OracleUnknown:
    max_power: int


def oracle_classify(g: Element, max_power: int):
    """Semi-decide by computing ``g, g^2, ..., g^max_power`` in reduced form."""
    if max_power < 1:
        raise ValueError("max_power must be >= 1")
    h = Element.identity(g.shape)
    for n in range(1, max_power + 1):
        h = g.compose(h)
        if h.is_identity:
            return OracleElliptic(n)
        leaf = contracting_leaf(h)
        if leaf:
            return OracleTranslation(n, Ball(g.shape, leaf[0]))
        leaf = expanding_leaf(h)
        if leaf:
            # h^-1 sends the image ball strictly inside itself
            return OracleTranslation(-n, Ball(g.shape, leaf[1]))
    return OracleUnknown(max_power)


def order_of(g: Element, iter_cap: int = DEFAULT_ITER_CAP):
    """Order of ``g``; ``math.inf`` for translations."""
    res = classify_element(g, iter_cap)
    return res.order if isinstance(res, Elliptic) else math.inf
