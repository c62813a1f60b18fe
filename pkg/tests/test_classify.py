import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from aaut.classify import (
    Elliptic,
    FiniteSubgroupCert,
    OracleElliptic,
    OracleTranslation,
    OracleUnknown,
    PartitionAction,
    RefinementEngine,
    Stabilized,
    Translation,
    Witness,
    classify_element,
    classify_subgroup,
    closure_order,
    closure_order_bfs,
    group_order,
    induced_permutation,
    oracle_classify,
    order_of,
    perm_order,
    refinement_engine,
    verify_witness,
)
from aaut.element import Element
from aaut.errors import IterationCapExceeded, ShapeError
from aaut.partition import RegularPartition, apply_element, common_refinement, refines
from aaut.tree import Ball, Shape, spherical_partition

from conftest import S22, _element, el, elements, seeds, shapes


def B(text, shape=S22):
    return Ball.parse(text, shape)


def P(text, shape=S22):
    return RegularPartition.parse(text, shape)


class TestClassifyElement:
    def test_x0(self, x0):
        res = classify_element(x0)
        assert res == Translation(x0, B("1"), 1, B("1.1"))
        assert verify_witness(res)

    def test_identity(self):
        res = classify_element(Element.identity(S22))
        assert res == Elliptic(P("0,1"), 1)

    def test_r(self, r):
        res = classify_element(r)
        assert res == Elliptic(P("0,1.0,1.1"), 3)
        for n in (1, 2):
            assert classify_element(r ** n).invariant_partition == P("0,1.0,1.1")

    def test_x1(self, x1):
        assert isinstance(classify_element(x1), Translation)

    def test_inverse_translation(self, x0):
        res = classify_element(~x0)
        assert isinstance(res, Translation) and verify_witness(res)

    def test_cap(self):
        slow = el("map 0.0 -> 0.0.1; map 0.1 -> 1.0.0.0; map 1.0.0.0 -> 1.1.1; map 1.0.0.1 -> 1.0.1; "
                  "map 1.0.1.0 -> 0.1; map 1.0.1.1.0 -> 0.0.0; map 1.0.1.1.1 -> 1.1.0; map 1.1 -> 1.0.0.1")
        with pytest.raises(IterationCapExceeded):
            classify_element(slow, iter_cap=3)
        assert classify_element(slow, iter_cap=8) is not None

    @given(elements(max_leaves=10))
    def test_certificates_sound(self, g):
        res = classify_element(g)
        if isinstance(res, Translation):
            assert res.witness == g
            assert verify_witness(res)
            assert order_of(g) == math.inf
        else:
            assert g.in_stab(res.invariant_partition)
            assert g.power(res.order).is_identity
            assert all(not g.power(d).is_identity for d in range(1, res.order) if res.order % d == 0)

    @given(elements(max_leaves=10, torsion=True))
    def test_torsion_is_elliptic(self, g):
        res = classify_element(g)
        assert isinstance(res, Elliptic)

    @given(elements(max_leaves=10))
    def test_oracle_agreement(self, g):
        orc = oracle_classify(g, 500)
        res = classify_element(g)
        if isinstance(orc, OracleElliptic):
            assert isinstance(res, Elliptic) and res.order == orc.order
        elif isinstance(orc, OracleTranslation):
            assert isinstance(res, Translation)


class TestOracle:
    def test_examples(self, x0, r, sigma):
        assert oracle_classify(x0, 10) == OracleTranslation(1, B("1"))
        assert oracle_classify(r, 10) == OracleElliptic(3)
        assert oracle_classify(sigma, 1) == OracleUnknown(1)
        assert oracle_classify(sigma, 2) == OracleElliptic(2)
        assert oracle_classify(~x0, 10) == OracleTranslation(1, B("0"))
        # only leaf 0.1.0 -> 0.1 is nested: it expands, so the inverse contracts 0.1
        expander = el("map 0.0 -> 1; map 0.1.0 -> 0.1; map 0.1.1 -> 0.0.1; map 1 -> 0.0.0")
        assert oracle_classify(expander, 10) == OracleTranslation(-1, B("0.1"))
        with pytest.raises(ValueError):
            oracle_classify(x0, 0)

    def test_order_of(self, x0, r):
        assert order_of(x0) == math.inf
        assert order_of(r) == 3
        assert order_of(Element.identity(S22)) == 1


class TestVerifyWitness:
    def test_examples(self, x0, sigma):
        assert verify_witness(Translation(x0, B("1"), 1, B("1.1")))
        bad = verify_witness(Translation(sigma, B("0"), 1, B("1")))
        assert not bad and bad.reason == "image_not_strictly_inside"
        assert not verify_witness(Translation(x0, B("1"), -1, B("1.1")))
        assert verify_witness(Translation(x0, B("1"), 0, B("1.1"))).reason == "zero_power"
        assert verify_witness(Translation(x0, B("1"), 1, B("1.0"))).reason == "image_mismatch"
        assert verify_witness(Translation(x0, B("0"), 1, B("0.0"))).reason == "not_homothety"

    def test_power_two(self, x0):
        assert verify_witness(Translation(x0, B("1"), 2, B("1.1.1")))


class TestEngine:
    def test_x0_first_step(self, x0):
        eng = RefinementEngine(x0, None, P("0.0,0.1,1"))
        res = eng.step()
        assert isinstance(res, Witness) and res.exponent == -1
        assert str(eng.current.partition) == "0.0.0,0.0.1,0.1,1"

    def test_x0_witness(self, x0):
        res = refinement_engine(x0, p0=P("0.0,0.1,1"))
        assert isinstance(res, Witness)
        assert res.image.addr[: res.source.level] == res.source.addr
        assert res.gamma == x0.power(res.exponent)

    def test_sigma(self, sigma):
        res = refinement_engine(sigma, p0=P("0,1"))
        assert res == Stabilized(P("0,1"), 1)

    def test_shape_mismatch(self, sigma):
        with pytest.raises(ShapeError):
            RefinementEngine(sigma, None, RegularPartition(Shape(3, 2), [(0,), (1,)]))

    @given(shapes, seeds, seeds, seeds)
    def test_monotone_with_provenance(self, shape, s1, s2, s3):
        k1, k2 = _element(shape, s1, 6, torsion=True), _element(shape, s2, 6, torsion=True)
        g = _element(shape, s3, 8)
        res = classify_subgroup([k1, k2])
        if not isinstance(res, FiniteSubgroupCert):
            return
        K = PartitionAction(res.base_partition, res.generator_perms)
        p0 = common_refinement(K.base, g.coarsest_admissible())
        eng = RefinementEngine(g, K, p0, record=True)
        out = eng.run()
        g_inv = g.inverse()
        for rec in eng.history:
            before, after = rec.before.partition, rec.after.partition
            assert refines(after, before)
            assert rec.after.check() is None
            for part, prov in zip(after.addrs, rec.provenance):
                if prov[0] == "kept":
                    assert prov[1] == part and prov[1] in before
                else:
                    _, k, z = prov
                    assert z in before
                    assert k.in_stab(K.base)
                    assert g_inv.apply_to_address(k.apply_to_address(z)) == part
        if isinstance(out, Stabilized):
            assert g.in_stab(out.partition)
            assert all(k.in_stab(out.partition) for k in K.generators())


class TestSubgroup:
    def test_sigma(self, sigma):
        res = classify_subgroup([sigma])
        assert res.base_partition == P("0,1") and res.order == 2

    def test_r_sigma(self, r, sigma):
        res = classify_subgroup([r, sigma])
        assert isinstance(res, Translation) and verify_witness(res)

    def test_sigma_s2swap(self, sigma, s2swap):
        res = classify_subgroup([sigma, s2swap])
        assert res.base_partition == spherical_partition(S22, 2)
        assert res.order == 8
        assert 24 % res.order == 0

    def test_closure_cap(self, sigma, s2swap):
        res = classify_subgroup([sigma, s2swap], closure_cap=3)
        assert res.cap_exceeded and res.to_json()["order"] == "cap_exceeded"

    def test_empty_and_mixed(self, sigma):
        with pytest.raises(ValueError):
            classify_subgroup([])
        with pytest.raises(ShapeError):
            classify_subgroup([sigma, Element.identity(Shape(3, 2))])

    @given(elements(count=3, max_leaves=7, torsion=True))
    def test_order_independent_verdict(self, gens):
        kinds = {type(classify_subgroup(list(p))) for p in itertools.permutations(gens)}
        assert len(kinds) == 1

    @given(elements(count=2, max_leaves=7, torsion=True))
    def test_finite_certificate(self, gens):
        res = classify_subgroup(list(gens))
        if isinstance(res, Translation):
            assert verify_witness(res)
            return
        for g in gens:
            assert g.in_stab(res.base_partition)
            assert list(induced_permutation(g, res.base_partition)) in [list(p) for p in res.generator_perms]


class TestPermutations:
    def test_order_and_closure(self):
        assert perm_order((1, 2, 0, 4, 3)) == 6
        assert closure_order([(1, 0, 2), (0, 2, 1)], 3) == 6
        assert closure_order([(1, 2, 3, 0)], 4) == 4
        assert closure_order([], 3) == 1
        assert closure_order([(1, 0, 2), (0, 2, 1)], 3, cap=5) is None

    def test_symmetric_groups(self):
        for n in (5, 12, 21):
            cycle = tuple(range(1, n)) + (0,)
            swap = (1, 0) + tuple(range(2, n))
            assert group_order([cycle, swap], n) == math.factorial(n)
            assert closure_order([cycle, swap], n, cap=10**6) == (math.factorial(n) if n < 10 else None)

    @given(st.integers(1, 8).flatmap(lambda n: st.tuples(
        st.just(n), st.lists(st.permutations(list(range(n))), max_size=3))))
    def test_three_routes_agree(self, data):
        from sympy.combinatorics import Permutation, PermutationGroup
        n, gens = data
        gens = [tuple(g) for g in gens]
        expected = PermutationGroup([Permutation(list(g)) for g in gens]).order() if gens else 1
        assert group_order(gens, n) == expected
        assert closure_order_bfs(gens, n) == expected
        assert closure_order(gens, n, cap=expected) == expected
        if expected > 1:
            assert closure_order(gens, n, cap=expected - 1) is None
