"""Tests for cone membership, sampling, property suites, residue cones,
lifting reports, nil orderings, and anisotropy certificates."""

import random
from fractions import Fraction

import pytest

from gaugecones.field import FunctionField, GammaVal, OrderingSpec, enumerate_orderings
from gaugecones.algebra import (
    HermContext,
    Involution,
    QuatDivSpec,
    base_spec,
    complex_spec,
    hamilton_spec,
)
from gaugecones.matrices import MatE
from gaugecones.gauges import in_gauge_ring, residue_element
from gaugecones.cones import (
    AnisotropyResult,
    ConeSpec,
    InvalidCone,
    UnsupportedVariant,
    anisotropy_certificate,
    check_prepositive_axioms,
    compatibility_suite,
    cone_member,
    lift_exists,
    lift_set,
    nil_orderings,
    residue_cone,
    sample_cone,
    wadth_check,
)


@pytest.fixture
def F2():
    return FunctionField(["x", "y"])


def make_cone(F, entries, eta=(1, 1), kind="base"):
    spec = {"base": base_spec, "complex": complex_spec, "hamilton": hamilton_spec}[kind](F)
    return ConeSpec(HermContext(spec, tuple(entries)), OrderingSpec(eta))


class TestConeMember:
    def test_identity_member(self, F2):
        x, _ = F2.vars()
        for kind in ("base", "complex", "hamilton"):
            C = make_cone(F2, [F2.one, x], kind=kind)
            assert cone_member(MatE.identity(C.espec, 2), C)

    def test_mixed_signs_rejected(self, F2):
        C = make_cone(F2, [F2.one, F2.one])
        a = MatE.diagonal(C.espec, [F2.one, -F2.one])
        assert not cone_member(a, C)

    def test_shifted_member(self, F2):
        x, _ = F2.vars()
        C = make_cone(F2, [F2.one, x], eta=(1, 1))
        a = MatE.diagonal(C.espec, [x, F2.one])
        assert cone_member(a, C)

    def test_invalid_cone(self, F2):
        x, _ = F2.vars()
        C = make_cone(F2, [F2.one, x], eta=(-1, 1))
        assert not C.valid
        with pytest.raises(InvalidCone):
            cone_member(MatE.identity(C.espec, 2), C)

    def test_negative_definite_form(self, F2):
        # all-negative form entries still give a cone containing 1
        C = make_cone(F2, [-F2.one, -F2.from_fraction(2)])
        assert C.valid
        assert cone_member(MatE.identity(C.espec, 2), C)

    def test_flip_all_signs(self, F2):
        rng = random.Random(51)
        x, y = F2.vars()
        C = make_cone(F2, [F2.one, x * y], eta=(1, 1))
        Cneg = ConeSpec(C.ctx, OrderingSpec((-1, -1)))
        for a in sample_cone(C, count=8, rng=rng):
            assert cone_member(a, C)


class TestSampling:
    def test_samples_are_members(self, F2):
        rng = random.Random(52)
        x, y = F2.vars()
        for kind, form, eta in (
            ("base", [F2.one, x], (1, 1)),
            ("complex", [F2.one, x * y], (-1, -1)),
            ("hamilton", [F2.one, F2.one], (1, -1)),
        ):
            C = make_cone(F2, form, eta=eta, kind=kind)
            for a in sample_cone(C, count=10, rng=rng):
                assert cone_member(a, C)

    def test_generators_respected(self, F2):
        rng = random.Random(53)
        C = make_cone(F2, [F2.one, F2.one])
        s = MatE.diagonal(C.espec, [F2.from_fraction(2), F2.one])
        for a in sample_cone(C, S=[s], count=5, rng=rng):
            assert cone_member(a, C)


class TestAxioms:
    def test_prepositive_axioms(self, F2):
        x, _ = F2.vars()
        C = make_cone(F2, [F2.one, x])
        report = check_prepositive_axioms(C, samples=25, seed=1)
        assert report.ok, {k: v.violations for k, v in report.conditions.items()}

    def test_compatibility_suite(self, F2):
        x, y = F2.vars()
        for kind, form in (("base", [F2.one, x]), ("hamilton", [F2.one, F2.one])):
            C = make_cone(F2, form, kind=kind)
            report = compatibility_suite(C, sample_count=25, seed=2)
            assert report.ok, {
                k: v.violations for k, v in report.conditions.items() if not v.ok
            }


class TestResidueCone:
    def test_blockwise_structure(self, F2):
        x, _ = F2.vars()
        C = make_cone(F2, [F2.one, x])
        rc = residue_cone(C)
        assert len(rc.block_specs) == 2
        assert all(s.n == 1 for s in rc.block_specs)

    def test_members_project(self, F2):
        rng = random.Random(54)
        x, _ = F2.vars()
        C = make_cone(F2, [F2.one, x, 2 * x])
        rc = residue_cone(C)
        G = C.gauge()
        done = 0
        while done < 10:
            a = sample_cone(C, count=1, rng=rng)[0]
            if not in_gauge_ring(a, G):
                continue
            assert rc.member(residue_element(a, G))
            done += 1

    def test_residue_members_lift(self, F2):
        rng = random.Random(55)
        x, _ = F2.vars()
        for eta in ((1, 1), (1, -1)):
            C = make_cone(F2, [F2.one, x, 2 * x], eta=eta)
            rc = residue_cone(C)
            for _ in range(10):
                blocks = [
                    sample_cone(spec, count=1, rng=rng)[0] for spec in rc.block_specs
                ]
                assert rc.member(blocks)
                a = rc.lift(blocks)
                assert cone_member(a, C)
                assert residue_element(a, C.gauge()) == blocks

    def test_negative_residue_forms_lift(self, F2):
        # at eta(x) = -1 the normalized form is <-x, -3x>, with negative residues
        rng = random.Random(57)
        x, _ = F2.vars()
        C = make_cone(F2, [x, 3 * x], eta=(-1, 1))
        assert C.valid
        rc = residue_cone(C)
        assert rc.block_specs[0].ctx.e[0].as_fraction() < 0
        for _ in range(5):
            blocks = [sample_cone(s, count=1, rng=rng)[0] for s in rc.block_specs]
            a = rc.lift(blocks)
            assert cone_member(a, C)
            assert residue_element(a, C.gauge()) == blocks

    def test_residue_of_ideal_is_zero(self, F2):
        x, _ = F2.vars()
        C = make_cone(F2, [F2.one, x])
        G = C.gauge()
        blocks = residue_element(MatE.identity(C.espec, 2).scale(x), G)
        assert rc_all_zero(blocks)
        assert residue_cone(C).member(blocks)


def rc_all_zero(blocks):
    return all(b.is_zero for b in blocks)


class TestLifting:
    def test_quaternion_lift_sets(self, F2):
        x, y = F2.vars()
        gamma = QuatDivSpec(x, y, Involution.GAMMA)
        report = lift_set(gamma)
        assert [P.eta for P in report.liftable] == [(-1, -1)]
        assert report.harrison_matches
        sigma = QuatDivSpec(x, y, Involution.INT_I_GAMMA)
        report = lift_set(sigma)
        assert [P.eta for P in report.liftable] == [(-1, 1)]
        assert report.harrison_matches

    def test_lift_exists_examples(self, F2):
        x, y = F2.vars()
        gamma = QuatDivSpec(x, y, Involution.GAMMA)
        assert lift_exists(gamma, OrderingSpec((-1, -1)))
        assert not lift_exists(gamma, OrderingSpec((1, 1)))
        ctx = HermContext(base_spec(F2), (F2.one, F2.one))
        for P in enumerate_orderings(2):
            assert lift_exists(ctx, P)

    def test_constant_form_lifts_everywhere(self, F2):
        ctx = HermContext(base_spec(F2), (F2.one, F2.from_fraction(2)))
        report = lift_set(ctx)
        assert report.liftable == report.base_orderings
        assert report.harrison_matches

    def test_harrison_random_forms(self, F2):
        rng = random.Random(56)
        for F in (F2, FunctionField(["x", "y", "z"])):
            for _ in range(10):
                n = rng.randint(1, 3)
                entries = tuple(
                    F.monomial(
                        [rng.randint(0, 2) for _ in range(F.r)],
                        rng.choice([-3, -2, -1, 1, 2, 3]),
                    )
                    for _ in range(n)
                )
                report = lift_set(HermContext(base_spec(F), entries))
                assert report.harrison_matches

    def test_wadth(self, F2):
        x, _ = F2.vars()
        res = wadth_check(HermContext(base_spec(F2), (F2.one, F2.from_fraction(2), F2.from_fraction(3))))
        assert (res.all_lift, res.coset_index_one, res.lift_count) == (True, True, 4)
        res = wadth_check(HermContext(base_spec(F2), (F2.one, x)))
        assert (res.all_lift, res.coset_index_one) == (False, False)
        res = wadth_check(HermContext(base_spec(F2), (F2.one, x ** 2)))
        assert (res.all_lift, res.coset_index_one, res.lift_count) == (True, True, 4)


class TestNil:
    def test_example(self, F2):
        x, y = F2.vars()
        gamma = nil_orderings(QuatDivSpec(x, y, Involution.GAMMA))
        assert [P.eta for P in gamma.nil] == [(-1, 1), (1, -1), (1, 1)]
        sigma = nil_orderings(QuatDivSpec(x, y, Involution.INT_I_GAMMA))
        assert [P.eta for P in sigma.nil] == [(-1, -1)]

    def test_hamilton_empty(self, F2):
        m1 = F2.from_fraction(-1)
        assert nil_orderings(QuatDivSpec(m1, m1, Involution.GAMMA)).nil == ()

    def test_unsupported(self, F2):
        with pytest.raises(UnsupportedVariant):
            nil_orderings(HermContext(base_spec(F2), (F2.one,)))


class TestAnisotropy:
    def test_units_certified(self, F2):
        ctx = HermContext(base_spec(F2), (F2.one, F2.one))
        P = OrderingSpec((1, 1))
        res = anisotropy_certificate([F2.one, F2.one, F2.one], ctx, P)
        assert res.status == "CERTIFIED"
        assert res.falsifier is None

    def test_hyperbolic_refuted(self, F2):
        ctx = HermContext(base_spec(F2), (F2.one,))
        P = OrderingSpec((1, 1))
        res = anisotropy_certificate([F2.one, -F2.one], ctx, P)
        assert res.status == "UNKNOWN"
        assert res.falsifier is not None

    def test_index_one_certified(self, F2):
        x, _ = F2.vars()
        ctx = HermContext(base_spec(F2), (F2.one,))
        P = OrderingSpec((1, 1))
        res = anisotropy_certificate([F2.one, x], ctx, P)
        assert res.status == "CERTIFIED"

    def test_negative_entry_unknown(self, F2):
        x, _ = F2.vars()
        ctx = HermContext(base_spec(F2), (F2.one,))
        res = anisotropy_certificate([F2.one, x], ctx, OrderingSpec((-1, 1)))
        assert res.status == "UNKNOWN"
