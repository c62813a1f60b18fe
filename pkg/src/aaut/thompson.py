"""Thompson-type subgroups inside V_{d,k} and executable checks of commutator
and breaking-triple constructions used in commensuration arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Tuple

from .classify import Translation, verify_witness
from .element import Element, commutator
from .errors import (
    CertificateError,
    ConstructionFailure,
    DomainError,
    NotDeepEnoughError,
    PreconditionError,
    UnsupportedShape,
    VerificationError,
)
from .tree import (
    Ball,
    Shape,
    delta_depth,
    diameter,
    format_address,
    is_prefix,
    last_address,
    last_ball,
    penult_address,
    spherical_partition,
)


def _image_ranks(g: Element) -> List[int]:
    rank = {q: i for i, q in enumerate(sorted(q for _, q in g.pairs))}
    return [rank[q] for _, q in g.pairs]


def is_in_F(g: Element) -> bool:
    """Leaf images, read in planar order of the domain leaves, are in planar order."""
    ranks = _image_ranks(g)
    return ranks == sorted(ranks)


def is_in_T(g: Element) -> bool:
    """Leaf images are a cyclic rotation of planar order."""
    ranks = _image_ranks(g)
    n = len(ranks)
    s = ranks[0]
    return all(r == (s + i) % n for i, r in enumerate(ranks))


def _x0_pattern_below(shape: Shape, b) -> List[Tuple[tuple, tuple]]:
    # b.0.i -> b.i (i < d-1 handled below), order preserving, contracting b.(d-1)
    d = shape.d
    dom = [b + (0, i) for i in range(d)] + [b + (j,) for j in range(1, d)]
    img = [b + (j,) for j in range(d - 1)] + [b + (d - 1, i) for i in range(d)]
    return list(zip(sorted(dom), sorted(img)))


def standard_x0_x1(shape: Shape) -> Tuple[Element, Element]:
    """The classical generators x0, x1 of F; only for d = k = 2."""
    if (shape.d, shape.k) != (2, 2):
        raise UnsupportedShape("the classical x0, x1 live on T_{2,2}")
    return f_generators(shape)


def f_generators(shape: Shape) -> Tuple[Element, Element]:
    """Two order-preserving elements: ``x0`` and ``x1`` = identity on the first ball,
    x0's pattern inside the last level-1 ball.

    For d = k = 2 these are the classical generators of Thompson's group F.
    """
    x0 = rightmost_translation(shape)
    top = shape.k - 1
    pairs = [((j,), (j,)) for j in range(top)] + _x0_pattern_below(shape, (top,))
    return x0, Element(shape, pairs)


def rightmost_contract(g: Element, ns: Iterable[int]) -> List[int]:
    """Levels ``n`` at which g(last(n)) = last(n+1) or g(penult(n)) = penult(n+1) fails."""
    shape = g.shape
    bad = []
    for n in ns:
        ok = True
        for addr_of in (last_address, penult_address):
            try:
                img = g.apply_to_address(addr_of(shape, n))
            except NotDeepEnoughError:
                ok = False
                break
            if img != addr_of(shape, n + 1):
                ok = False
        if not ok:
            bad.append(n)
    return bad


def rightmost_translation(shape: Shape, check_range=range(2, 13)) -> Element:
    """An order-preserving element, admissible on the level-2 sphere, shifting the
    last and penultimate balls one level down the rightmost branch.
    """
    d, k = shape.d, shape.k
    dom = [(0, i) for i in range(d)] + [(j,) for j in range(1, k)]
    img = [(j,) for j in range(k - 1)] + [(k - 1, i) for i in range(d)]
    g = Element(shape, zip(sorted(dom), sorted(img)))
    if g.maxlen > 2 or rightmost_contract(g, check_range):
        raise ConstructionFailure(f"no rightmost translation found for {shape}")
    return g


def two_balls_from_translation(cert: Translation) -> Tuple[Ball, Ball, int]:
    """Disjoint balls ``B1``, ``B2`` with ``gamma^n(B1)`` and ``gamma^n(B2)`` strictly in ``B2``."""
    check = verify_witness(cert)
    if not check:
        raise CertificateError(f"translation certificate rejected: {check.reason}")
    n = cert.power
    B, B2 = cert.ball, cert.image
    shape = B.shape
    B1 = None
    for child in B.children():
        if not is_prefix(child.addr, B2.addr):
            B1 = child
            break
    h = cert.witness.power(n)
    for ball in (B1, B2):
        img = h.apply_to_address(ball.addr)
        if not (len(img) > B2.level and is_prefix(B2.addr, img)):
            raise CertificateError(f"gamma^n({ball}) is not strictly inside {B2}")
    return B1, B2, n


def double_commutator_identity(g: Element, k: Element, h: Element) -> bool:
    """``[[g,k],h] == (g k g^-1) k^-1 (h k h^-1) (hg k^-1 (hg)^-1)`` in reduced form."""
    lhs = commutator(commutator(g, k), h)
    hg = h * g
    rhs = (g * k * ~g) * ~k * (h * k * ~h) * (hg * ~k * ~hg)
    return lhs == rhs


def tran_branch_experiment(cert: Translation, x: Element, y: Element, k_range=(1, 2, 3)) -> dict:
    """For each ``k``, check ``u_k = [x, gamma^{kn}]`` is supported in ``B1`` and
    its image, and that ``[[x, gamma^{kn}], y] == [x, y]``.
    """
    B1, B2, n = two_balls_from_translation(cert)
    gamma = cert.witness
    violated = []
    if not x.supported_in(B1):
        violated.append(f"x not supported in {B1}")
    if not y.supported_in(B1):
        violated.append(f"y not supported in {B1}")
    moved = gamma.power(n).apply_to_address(B1.addr)
    if is_prefix(B1.addr, moved) or is_prefix(moved, B1.addr):
        violated.append(f"gamma^n({B1}) meets {B1}")
    if violated:
        raise PreconditionError("; ".join(violated))
    target = commutator(x, y)
    checks = []
    for k in k_range:
        gk = gamma.power(k * n)
        image_b1 = Ball(gamma.shape, gk.apply_to_address(B1.addr))
        u = commutator(x, gk)
        v = commutator(u, y)
        checks.append({
            "k": k,
            "u_supported": u.supported_in_union([B1, image_b1]),
            "v_equals_commutator": v == target,
        })
    ok = all(c["u_supported"] and c["v_equals_commutator"] for c in checks)
    return {
        "experiment": "tran_branch",
        "B1": str(B1),
        "B2": str(B2),
        "power": n,
        "checks": checks,
        "ok": ok,
    }


# -- breaking triples ----------------------------------------------------------


@dataclass(frozen=True)
class BreakingTriple:
    """``h`` breaks the tree below ``B`` for ``(U, W)``."""

    h: Element
    U: Ball
    W: Ball
    B: Ball


@dataclass(frozen=True)
class WeaklyBreakingTriple:
    """``(z, R_n, S_n)`` with R_n, S_n the penultimate and last balls of level ``n``."""

    z: Element
    n: int


def _disjoint(a, b) -> bool:
    return not (is_prefix(a, b) or is_prefix(b, a))


def check_breaking(t: BreakingTriple):
    """Raise :class:`VerificationError` naming the first failed clause."""
    h, U, W, B = t.h, t.U, t.W, t.B
    if diameter(U) != diameter(W):
        raise VerificationError("diam(U) != diam(W)", clause="equal_diameters")
    if not (B.contains(U) and B.contains(W)):
        raise VerificationError("U or W not inside B", clause="inside_B")
    if not h.fixes_pointwise(W):
        raise VerificationError("h moves points of W", clause="fixes_W")
    if not h.is_homothety_on(U):
        raise VerificationError("h is not a homothety on U", clause="homothety_on_U")
    img = h.apply_to_address(U.addr)
    if not _disjoint(img, B.addr):
        raise VerificationError(f"h(U) = {format_address(img)} meets B", clause="image_leaves_B")


def is_breaking_triple(t: BreakingTriple) -> bool:
    try:
        check_breaking(t)
    except VerificationError:
        return False
    return True


def check_weakly_breaking(z: Element, n: int):
    if n < 1:
        raise DomainError("weakly breaking triples need n >= 1")
    if n == 1:
        # every element preserves the trivial partition S_0
        raise VerificationError("z lies in Stab(S_0)", clause="not_in_stab_n_minus_1")
    shape = z.shape
    if not z.in_stab(spherical_partition(shape, n)):
        raise VerificationError(f"z not in Stab(S_{n})", clause="in_stab_n")
    if z.in_stab(spherical_partition(shape, n - 1)):
        raise VerificationError(f"z already in Stab(S_{n - 1})", clause="not_in_stab_n_minus_1")
    if not z.fixes_pointwise(last_ball(shape, n)):
        raise VerificationError("z moves points of the last ball", clause="fixes_last")
    img = z.apply_to_address(penult_address(shape, n))
    if not _disjoint(img, last_address(shape, n - 1)):
        raise VerificationError("z(R_n) meets S_{n-1}", clause="penult_escapes")


def is_weakly_breaking(z: Element, n: int) -> bool:
    try:
        check_weakly_breaking(z, n)
    except VerificationError:
        return False
    return True


def compose_weakly_breaking(a: Tuple[Element, int], b: Tuple[Element, int]) -> Tuple[Element, int]:
    """``(z_a, i)``, ``(z_b, j)`` with ``j > i`` give the triple ``(z_b z_a, j)``."""
    (za, i), (zb, j) = a, b
    if j <= i:
        raise VerificationError(f"need j > i, got i={i}, j={j}", clause="level_order")
    check_weakly_breaking(za, i)
    check_weakly_breaking(zb, j)
    z = zb * za
    check_weakly_breaking(z, j)
    return z, j


def delta_gap(a: Ball, b: Ball) -> int:
    """Greatest ``l`` with both balls inside the last ball of level ``l``."""
    return delta_depth(a, b)


def random_weakly_breaking(shape: Shape, n: int, rng) -> Element:
    """A random weakly breaking element at level ``n`` (a permutation of the level-n sphere)."""
    S = spherical_partition(shape, n)
    parts = list(S.addrs)
    pos = {a: i for i, a in enumerate(parts)}
    last = pos[last_address(shape, n)]
    penult = pos[penult_address(shape, n)]
    outside = [i for i, a in enumerate(parts) if not is_prefix(last_address(shape, n - 1), a)]
    perm = [None] * len(parts)
    perm[last] = last
    perm[penult] = rng.choice(outside)
    rest_src = [i for i in range(len(parts)) if perm[i] is None]
    rest_dst = [i for i in range(len(parts)) if i not in (last, perm[penult])]
    rng.shuffle(rest_dst)
    for s, t in zip(rest_src, rest_dst):
        perm[s] = t
    return Element.from_permutation(S, perm)


def random_breaking_triple(shape: Shape, rng) -> BreakingTriple:
    """``h`` swaps a ball ``U`` below ``B`` with a same-size ball outside ``B``."""
    B = (rng.randrange(shape.k),)
    level = rng.randrange(3, 5)
    inside = [a for a in spherical_partition(shape, level).addrs if is_prefix(B, a)]
    outside = [a for a in spherical_partition(shape, level).addrs if not is_prefix(B, a)]
    U, W = rng.sample(inside, 2)
    V = rng.choice(outside)
    S = spherical_partition(shape, level)
    pos = {a: i for i, a in enumerate(S.addrs)}
    perm = list(range(len(S)))
    perm[pos[U]], perm[pos[V]] = pos[V], pos[U]
    h = Element.from_permutation(S, perm)
    return BreakingTriple(h, Ball(shape, U), Ball(shape, W), Ball(shape, B))
