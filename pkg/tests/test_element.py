import itertools
import random

import pytest
from hypothesis import given, strategies as st

from aaut.element import (
    Element,
    commutator,
    compose,
    invert,
    parse,
    power,
    reduce,
    serialize,
    split_leaf,
)
from aaut.errors import (
    IncompleteError,
    NotBijectiveError,
    NotDeepEnoughError,
    OverlapError,
    ParseError,
    ShapeError,
)
from aaut.partition import RegularPartition, apply_element
from aaut.tree import Ball, End, Shape, diameter, level_addresses

from conftest import S22, el, elements, seeds


def pairs_text(g):
    return "; ".join(f"{'.'.join(map(str, p))}->{'.'.join(map(str, q))}" for p, q in g.pairs)


def deep_addresses(shape, level, rng, count=40):
    return [tuple([rng.randrange(shape.k)] + [rng.randrange(shape.d) for _ in range(level - 1)])
            for _ in range(count)]


class TestParse:
    def test_x0(self, x0):
        assert pairs_text(x0) == "0.0->0; 0.1->1.0; 1->1.1"
        assert x0.serialize() == "aaut v1\nshape d=2 k=2\nmap 0.0 -> 0\nmap 0.1 -> 1.0\nmap 1 -> 1.1\n"

    def test_identity(self):
        assert el("map 0 -> 0; map 1 -> 1").is_identity
        assert Element.identity(S22) == el("map 0 -> 0; map 1 -> 1")

    def test_identity_on_finer_code_normalizes(self):
        g = el("map 0.0 -> 0.0; map 0.1 -> 0.1; map 1 -> 1")
        assert pairs_text(g) == "0->0; 1->1"

    def test_errors(self):
        with pytest.raises(NotBijectiveError):
            el("map 0 -> 0; map 1 -> 0")
        with pytest.raises(IncompleteError):
            el("map 0 -> 0; map 1.0 -> 1")
        with pytest.raises(OverlapError):
            el("map 0 -> 0; map 0.1 -> 1.0; map 1 -> 1.1")
        for bad in ["map 0 => 1; map 1 -> 0", "aaut v2\nshape d=2 k=2\nmap 0 -> 1\nmap 1 -> 0\n",
                    "map 0 -> 2; map 1 -> 0", "aaut v1\nshape d=2\nmap 0 -> 1\n"]:
            with pytest.raises((ParseError, ValueError)):
                parse(bad, S22) if not bad.startswith("aaut") else parse(bad)

    def test_header_required_without_shape(self):
        with pytest.raises(ParseError):
            parse("map 0 -> 1; map 1 -> 0")

    def test_header_shape_conflict(self):
        with pytest.raises((ParseError, ShapeError)):
            parse("aaut v1\nshape d=2 k=2\nmap 0 -> 1\nmap 1 -> 0\n", Shape(3, 2))

    @given(elements())
    def test_round_trip(self, g):
        text = serialize(g)
        assert parse(text) == g
        assert serialize(parse(text)) == text
        assert text.endswith("\n") and not any(line != line.rstrip() for line in text.split("\n"))


class TestReduce:
    def test_examples(self):
        g = Element(S22, [((0, 0), (1, 0)), ((0, 1), (1, 1)), ((1,), (0,))], reduce=False)
        assert pairs_text(reduce(g)) == "0->1; 1->0"
        h = el("map 0.0 -> 1.1; map 0.1 -> 1.0; map 1 -> 0")
        assert len(h) == 3 and h.is_reduced

    def test_root_never_collapses(self, sigma):
        assert pairs_text(sigma) == "0->1; 1->0"

    @given(elements(), seeds)
    def test_split_then_reduce(self, g, seed):
        rng = random.Random(seed)
        h = g
        for _ in range(rng.randrange(1, 4)):
            leaf = rng.choice([p for p, _ in h.pairs])
            h = split_leaf(h, leaf)
        assert not h.is_reduced
        assert reduce(h) == g
        assert reduce(reduce(h)) == reduce(h)


class TestArithmetic:
    def test_examples(self, x0):
        assert pairs_text(compose(x0, x0)) == "0.0.0->0; 0.0.1->1.0; 0.1->1.1.0; 1->1.1.1"
        assert pairs_text(invert(x0)) == "0->0.0; 1.0->0.1; 1.1->1"
        assert power(x0, 0).is_identity
        assert power(x0, -2) == invert(compose(x0, x0))

    def test_r_cubed(self, r):
        assert not (r ** 2).is_identity
        assert (r ** 3).is_identity

    def test_shape_error(self, x0):
        with pytest.raises(ShapeError):
            x0 * Element.identity(Shape(3, 2))

    @given(elements(count=3))
    def test_group_axioms(self, gs):
        g, h, k = gs
        e = Element.identity(g.shape)
        assert (g * h) * k == g * (h * k)
        assert (g * ~g).is_identity and (~g * g).is_identity
        assert g * e == g == e * g
        assert ~(g * h) == ~h * ~g

    @given(elements(count=2), seeds)
    def test_compose_pointwise(self, gs, seed):
        # independent route: evaluate both factors on deep addresses
        g, h = gs
        rng = random.Random(seed)
        gh = g * h
        level = g.maxlen + h.maxlen + 1
        for a in deep_addresses(g.shape, level, rng):
            assert gh.apply_to_address(a) == g.apply_to_address(h.apply_to_address(a))

    @given(elements(), st.integers(-4, 4), st.integers(-4, 4))
    def test_power_law(self, g, m, n):
        assert g.power(m) * g.power(n) == g.power(m + n)

    def test_commutator_convention(self, x0, sigma):
        assert commutator(x0, sigma) == x0 * sigma * ~x0 * ~sigma


class TestAction:
    def test_apply_examples(self, x0):
        assert x0.apply_to_address((1, 0)) == (1, 1, 0)
        with pytest.raises(NotDeepEnoughError):
            x0.apply_to_address((0,))
        e = Element.identity(S22)
        assert e.apply_to_address((0, 1, 1)) == (0, 1, 1)
        assert x0(Ball(S22, (1,))) == Ball(S22, (1, 1))

    def test_end_examples(self, x0):
        assert str(x0.apply_to_end(End.parse("(0)", S22))) == "(0)"
        assert str(x0.apply_to_end(End.parse("(1)", S22))) == "(1)"
        assert str(x0.apply_to_end(End.parse("0.(1)", S22))) == "1.0.(1)"

    @given(elements(count=2), st.lists(st.integers(0, 8), max_size=4), st.lists(st.integers(0, 8), min_size=1, max_size=3))
    def test_end_commutes_with_compose(self, gs, pre, per):
        g, h = gs
        shape = g.shape
        pre = [pre[0] % shape.k] + [x % shape.d for x in pre[1:]] if pre else []
        per = [x % shape.d for x in per]
        if not pre:
            per[0] %= shape.k
            per = [per[0] % min(shape.k, shape.d)] + per[1:]
        e = End(shape, tuple(pre), tuple(per))
        assert (g * h).apply_to_end(e) == g.apply_to_end(h.apply_to_end(e))

    def test_homothety_examples(self, x0):
        assert x0.is_homothety_on(Ball(S22, (1,)))
        assert not x0.is_homothety_on(Ball(S22, (0,)))
        e = Element.identity(S22)
        assert all(e.is_homothety_on(Ball(S22, a)) for a in level_addresses(S22, 3))

    def test_homothety_above_leaves(self):
        # g is coherent on ball 0 even though its domain leaves sit below it
        g = el("map 0.0 -> 1.0.0; map 0.1 -> 1.0.1; map 1.0 -> 0; map 1.1 -> 1.1")
        assert pairs_text(g) == "0->1.0; 1.0->0; 1.1->1.1"
        h = el("map 0.0 -> 1.1; map 0.1 -> 1.0; map 1 -> 0")
        assert not h.is_homothety_on(Ball(S22, (0,)))


class TestStab:
    def test_coarsest(self, x0, sigma):
        assert str(x0.coarsest_admissible()) == "0.0,0.1,1"
        assert str(Element.identity(S22).coarsest_admissible()) == "0,1"
        assert str(sigma.coarsest_admissible()) == "0,1"

    def test_in_stab_examples(self, x0, sigma):
        assert sigma.in_stab(RegularPartition.parse("0,1", S22))
        assert not x0.in_stab(RegularPartition.parse("0,1", S22))
        assert not x0.in_stab(RegularPartition.parse("0.0,0.1,1", S22))

    def test_spherical_examples(self, x0, sigma, s2swap):
        assert sigma.in_stab_spherical() == 1
        assert x0.in_stab_spherical() is None
        assert s2swap.in_stab_spherical() == 2

    @given(elements())
    def test_spherical_isometry(self, g):
        n = g.in_stab_spherical()
        levels_kept = all(len(p) == len(q) for p, q in g.pairs)
        assert (n is not None) == levels_kept
        if n is not None:
            from aaut.tree import spherical_partition
            assert g.in_stab(spherical_partition(g.shape, n))
            assert n == 1 or not g.in_stab(spherical_partition(g.shape, n - 1))
            for p, q in g.pairs:
                assert diameter(Ball(g.shape, p)) == diameter(g(Ball(g.shape, p)))
                for child in Ball(g.shape, p).children():
                    assert diameter(g(child)) == diameter(child)


class TestSupport:
    def test_examples(self, x0):
        s1 = el("map 0 -> 0; map 1.0.0 -> 1.0.1; map 1.0.1 -> 1.0.0; map 1.1 -> 1.1")
        assert s1.supported_in(Ball(S22, (1, 0)))
        assert not s1.supported_in(Ball(S22, (1, 0, 0)))
        assert not x0.fixes_pointwise(Ball(S22, (1,)))
        assert s1.fixes_pointwise(Ball(S22, (1, 1)))
        assert Element.identity(S22).support() == ()
        assert [str(b) for b in s1.support()] == ["1.0"]

    @given(elements(), seeds)
    def test_support_matches_pointwise(self, g, seed):
        rng = random.Random(seed)
        supp = [b.addr for b in g.support()]
        for a in deep_addresses(g.shape, g.maxlen + 1, rng):
            inside = any(a[: len(s)] == s for s in supp)
            if not inside:
                assert g.apply_to_address(a) == a
        for s in supp:
            assert not g.fixes_pointwise(Ball(g.shape, s))
            assert g.supported_in_union([Ball(g.shape, t) for t in supp])
