"""Seeded pseudorandom elements.

All randomness comes from :class:`random.Random` (Mersenne Twister MT19937),
seeded with an integer, so outputs are byte-stable for a given seed.
"""

from __future__ import annotations

import random
from typing import List, Optional

from .element import Element
from .errors import DomainError
from .partition import RegularPartition
from .tree import Address, Ball, Shape, level_addresses


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def achievable_leaf_count(shape: Shape, n: int) -> bool:
    """Codes grown from the level-1 code by splits have ``k + m(d-1)`` leaves."""
    return n >= shape.k and (n - shape.k) % (shape.d - 1) == 0


def random_code(shape: Shape, leaf_count: int, rng, root: Optional[Address] = None) -> List[Address]:
    """Grow a complete prefix code by uniform random leaf splits.

    With ``root`` given, grows a code of the subtree below ``root`` instead,
    starting from ``[root]``.
    """
    if root is None:
        if not achievable_leaf_count(shape, leaf_count):
            raise DomainError(
                f"{leaf_count} leaves unreachable: need k + m(d-1) with k={shape.k}, d={shape.d}"
            )
        leaves = level_addresses(shape, 1)
    else:
        if leaf_count < 1 or (leaf_count - 1) % (shape.d - 1):
            raise DomainError(f"{leaf_count} leaves unreachable below a vertex")
        leaves = [tuple(root)]
    while len(leaves) < leaf_count:
        i = rng.randrange(len(leaves))
        leaf = leaves.pop(i)
        leaves.extend(leaf + (j,) for j in range(shape.d))
    return sorted(leaves)


def random_element(shape: Shape, leaf_count: int, seed=None) -> Element:
    """Random domain and range codes of ``leaf_count`` leaves paired by a random bijection."""
    rng = _rng(seed)
    dom = random_code(shape, leaf_count, rng)
    rng_code = random_code(shape, leaf_count, rng)
    rng.shuffle(rng_code)
    return Element(shape, zip(dom, rng_code), check=False)


def random_leaf_count(shape: Shape, max_leaves: int, rng) -> int:
    choices = [n for n in range(shape.k, max_leaves + 1) if achievable_leaf_count(shape, n)]
    return rng.choice(choices)


def random_torsion(shape: Shape, leaf_count: int, seed=None) -> Element:
    """A random permutation of the parts of a random partition (finite order)."""
    rng = _rng(seed)
    code = random_code(shape, leaf_count, rng)
    perm = list(range(len(code)))
    rng.shuffle(perm)
    return Element.from_permutation(RegularPartition._trusted(shape, code), perm)


def random_local_element(ball: Ball, leaf_count: int, seed=None) -> Element:
    """A random element supported in ``ball``: identity outside, random pairing inside."""
    rng = _rng(seed)
    shape = ball.shape
    dom = random_code(shape, leaf_count, rng, root=ball.addr)
    img = random_code(shape, leaf_count, rng, root=ball.addr)
    rng.shuffle(img)
    pairs = [(c, c) for c in complement_code(shape, ball.addr)]
    pairs += list(zip(dom, img))
    return Element(shape, pairs, check=False)


def complement_code(shape: Shape, addr: Address) -> List[Address]:
    """Balls partitioning the complement of the ball ``addr``: siblings along its path."""
    out = []
    for level in range(len(addr)):
        for digit in range(shape.arity(level)):
            if digit != addr[level]:
                out.append(addr[:level] + (digit,))
    return sorted(out)
