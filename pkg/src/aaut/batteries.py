"""Randomized verification batteries behind ``aaut verify``.

Each battery returns a list of check records ``{"name", "pass", ...}``; failed
records carry the serialized inputs so the instance can be replayed.
"""

from __future__ import annotations

import random
from typing import List, Optional, Sequence

from .classify import Translation, classify_element
from .errors import AAutError
from .randgen import random_element, random_leaf_count, random_local_element
from .thompson import (
    compose_weakly_breaking,
    double_commutator_identity,
    is_breaking_triple,
    random_breaking_triple,
    random_weakly_breaking,
    rightmost_contract,
    rightmost_translation,
    standard_x0_x1,
    tran_branch_experiment,
    two_balls_from_translation,
)
from .tree import Shape

TEST_SHAPES = (Shape(2, 2), Shape(3, 2), Shape(2, 3), Shape(3, 3))


def _shapes(shape: Optional[Shape]) -> Sequence[Shape]:
    return (shape,) if shape is not None else TEST_SHAPES


def identity_battery(seed: int, count: int = 1000, shape: Optional[Shape] = None,
                     max_leaves: int = 8) -> List[dict]:
    rng = random.Random(seed)
    shapes = _shapes(shape)
    checks = []
    for i in range(count):
        sh = shapes[i % len(shapes)]
        g, k, h = (random_element(sh, random_leaf_count(sh, max_leaves, rng), rng) for _ in range(3))
        ok = double_commutator_identity(g, k, h)
        rec = {"name": f"identity[{i}]", "shape": str(sh), "pass": ok}
        if not ok:
            rec["instance"] = [x.serialize() for x in (g, k, h)]
        checks.append(rec)
    return checks


def random_translation(shape: Shape, rng, max_leaves: int = 8, attempts: int = 200) -> Translation:
    """Classify random elements until one is a translation."""
    for _ in range(attempts):
        g = random_element(shape, random_leaf_count(shape, max_leaves, rng), rng)
        res = classify_element(g)
        if isinstance(res, Translation):
            return res
    return classify_element(rightmost_translation(shape))


def tran_branch_config(shape: Shape, rng, max_local: int = 7):
    """A translation certificate and two random elements supported in its ``B1``."""
    cert = random_translation(shape, rng)
    B1, _, _ = two_balls_from_translation(cert)
    sizes = [1 + m * (shape.d - 1) for m in range(1, (max_local - 1) // (shape.d - 1) + 1)]
    x = random_local_element(B1, rng.choice(sizes), rng)
    y = random_local_element(B1, rng.choice(sizes), rng)
    return cert, x, y


def tran_branch_battery(seed: int, count: int = 50, shape: Optional[Shape] = None,
                        k_range=(1, 2, 3)) -> List[dict]:
    rng = random.Random(seed)
    shapes = _shapes(shape)
    checks = []
    for i in range(count):
        sh = shapes[i % len(shapes)]
        cert, x, y = tran_branch_config(sh, rng)
        report = tran_branch_experiment(cert, x, y, k_range)
        rec = {"name": f"tran-branch[{i}]", "shape": str(sh), "pass": report["ok"],
               "B1": report["B1"], "checks": report["checks"]}
        if not report["ok"]:
            rec["instance"] = {"witness": cert.witness.serialize(), "ball": str(cert.ball),
                               "power": cert.power, "x": x.serialize(), "y": y.serialize()}
        checks.append(rec)
    return checks


def rightmost_battery(shape: Optional[Shape] = None, levels=range(2, 13)) -> List[dict]:
    checks = []
    for sh in _shapes(shape):
        g = rightmost_translation(sh)
        bad = rightmost_contract(g, levels)
        rec = {"name": f"rightmost[{sh}]", "shape": str(sh), "pass": not bad,
               "levels": [min(levels), max(levels)]}
        if bad:
            rec["failed_levels"] = bad
            rec["instance"] = g.serialize()
        checks.append(rec)
        if (sh.d, sh.k) == (2, 2):
            x0 = standard_x0_x1(sh)[0]
            checks.append({"name": f"rightmost[{sh}] == x0", "shape": str(sh), "pass": g == x0})
    return checks


def triples_battery(seed: int, count: int = 100, shape: Optional[Shape] = None) -> List[dict]:
    rng = random.Random(seed)
    shapes = _shapes(shape)
    checks = []
    for idx in range(count):
        sh = shapes[idx % len(shapes)]
        i = rng.randrange(2, 4)
        j = rng.randrange(i + 1, 5)
        a = random_weakly_breaking(sh, i, rng)
        b = random_weakly_breaking(sh, j, rng)
        rec = {"name": f"weakly-breaking[{idx}]", "shape": str(sh), "i": i, "j": j}
        try:
            compose_weakly_breaking((a, i), (b, j))
            rec["pass"] = True
        except AAutError as exc:
            rec["pass"] = False
            rec["error"] = str(exc)
            rec["instance"] = [a.serialize(), b.serialize()]
        checks.append(rec)
        t = random_breaking_triple(sh, rng)
        ok = is_breaking_triple(t)
        rec = {"name": f"breaking[{idx}]", "shape": str(sh), "pass": ok}
        if not ok:
            rec["instance"] = {"h": t.h.serialize(), "U": str(t.U), "W": str(t.W), "B": str(t.B)}
        checks.append(rec)
    return checks
