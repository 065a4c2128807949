"""Positive cones on matrix algebras with involution, and their liftings.

A positive cone over a compatible ordering P is described intensionally: for
(M_n(E), ad_h) with h definite at P, the unique cone containing 1 consists of
the ad_h-symmetric matrices whose Gram twist diag(e) a is positive
semidefinite at P.  The module provides membership, cone sampling, the
prepositive-cone and gauge-compatibility property suites, residue cones,
Baer-Krull lifting reports with the Harrison characterization, nil-ordering
computation for quaternion algebras, and strong-anisotropy certificates.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Optional, Sequence

from .field import (
    FieldError,
    FunctionField,
    GammaVal,
    OrderingSpec,
    RatFunc,
    enumerate_orderings,
)
from .algebra import (
    EElement,
    ESpec,
    HermContext,
    Involution,
    QuatDivSpec,
    trace_form,
)
from .matrices import MatE, psd_at, reduced_charpoly
from .gauges import (
    GaugeContext,
    IndefiniteForm,
    form_coset_index,
    gauge_value,
    in_gauge_ideal,
    in_gauge_ring,
    residue_decomposition,
    residue_element,
)


class InvalidCone(FieldError):
    """No positive cone containing 1 exists over this ordering."""


class UnsupportedVariant(FieldError):
    """Operation is only defined for quaternion division presentations."""


class ConeSpec:
    """The unique positive cone containing 1 on (M_n(E), ad_h) over P.

    valid is true iff h is definite at P (equivalently, iff the trace form is
    definite at P); an invalid spec rejects every membership query.
    """

    __slots__ = ("ctx", "P", "valid", "_gauge")

    def __init__(self, ctx: HermContext, P: OrderingSpec):
        self.ctx = ctx
        self.P = P
        try:
            self._gauge = GaugeContext(ctx, P)
            self.valid = True
        except IndefiniteForm:
            self._gauge = None
            self.valid = False

    def gauge(self) -> GaugeContext:
        if self._gauge is None:
            raise InvalidCone("form is not definite at the ordering")
        return self._gauge

    @property
    def n(self) -> int:
        return self.ctx.n

    @property
    def espec(self) -> ESpec:
        return self.ctx.espec

    @property
    def field(self) -> FunctionField:
        return self.ctx.field


def cone_member(a: MatE, C: ConeSpec) -> bool:
    """Membership in the positive cone: ad_h-symmetric with a positive
    semidefinite Gram twist at the ordering."""
    if not C.valid:
        raise InvalidCone("form is not definite at the ordering")
    G = C.gauge()
    if not G.is_symmetric(a):
        return False
    return psd_at(G.gram_twist(a), C.P)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def random_positive_scalar(F: FunctionField, P: OrderingSpec, rng: random.Random,
                           maxdeg: int = 2, height: int = 6) -> RatFunc:
    """A monomial that is positive at P, with a random valuation."""
    exps = [rng.randint(0, maxdeg) for _ in range(F.r)]
    c = Fraction(rng.randint(1, height), rng.randint(1, 3))
    u = F.monomial(exps, c)
    if u.sign_at(P) < 0:
        u = -u
    return u


def random_matrix(spec: ESpec, n: int, rng: random.Random,
                  maxdeg: int = 2, height: int = 6) -> MatE:
    """Sparse random matrix with monomial entries."""
    F = spec.field

    def entry() -> EElement:
        coords = []
        for _ in range(spec.dim):
            if rng.random() < 0.5:
                coords.append(F.zero)
            else:
                exps = [rng.randint(0, maxdeg) for _ in range(F.r)]
                coords.append(F.monomial(exps, rng.randint(-height, height) or 1))
        return EElement(spec, tuple(coords))

    return MatE(spec, [[entry() for _ in range(n)] for _ in range(n)])


def sample_cone(C: ConeSpec, S: Optional[Sequence[MatE]] = None,
                count: int = 1, rng: Optional[random.Random] = None) -> list[MatE]:
    """Random cone members: sums of u_i sigma(x_i) s_i x_i with u_i positive
    at P and s_i drawn from the generating members S (default {1})."""
    if not C.valid:
        raise InvalidCone("form is not definite at the ordering")
    rng = rng or random.Random(0)
    G = C.gauge()
    if S is None:
        S = [MatE.identity(C.espec, C.n)]
    out = []
    for _ in range(count):
        acc = MatE.zeros(C.espec, C.n)
        for _ in range(rng.randint(1, 2)):
            u = random_positive_scalar(C.field, C.P, rng)
            x = random_matrix(C.espec, C.n, rng)
            s = S[rng.randrange(len(S))]
            acc = acc + (G.sigma(x) * s * x).scale(u)
        out.append(acc)
    return out


def _scale_into_ring(a: MatE, G: GaugeContext, strict: bool = False) -> RatFunc:
    """A square scalar u with u*a in the gauge ring (ideal when strict);
    returns u (multiply the caller's related elements by the same u)."""
    w = gauge_value(a, G)
    if w.is_inf:
        return G.field.one
    target = [-c / 2 for c in w.coords]
    exps = [math.ceil(t) + (1 if strict else 0) for t in target]
    m = G.field.monomial(exps)
    return m * m


# ---------------------------------------------------------------------------
# Property suites
# ---------------------------------------------------------------------------

@dataclass
class ConditionResult:
    tried: int = 0
    violations: list = dataclass_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class CompatReport:
    seed: int
    conditions: dict[str, ConditionResult]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.conditions.values())


def check_prepositive_axioms(C: ConeSpec, samples: int = 50,
                             seed: int = 0) -> CompatReport:
    """Sampled verification of the prepositive-cone axioms: 0 and 1 belong,
    closure under addition and under sigma(x) . x sandwiches, stability under
    positive scalars, and properness."""
    rng = random.Random(seed)
    G = C.gauge()
    res = {k: ConditionResult() for k in ("zero_one", "addition", "sandwich", "scalar", "proper")}

    def check(name, cond, witness):
        res[name].tried += 1
        if not cond:
            res[name].violations.append(witness)

    check("zero_one", cone_member(MatE.zeros(C.espec, C.n), C), "0")
    check("zero_one", cone_member(MatE.identity(C.espec, C.n), C), "1")
    for k in range(samples):
        a, b = sample_cone(C, count=2, rng=rng)
        check("addition", cone_member(a + b, C), (k, "a+b"))
        x = random_matrix(C.espec, C.n, rng)
        check("sandwich", cone_member(G.sigma(x) * a * x, C), (k, "sigma(x) a x"))
        u = random_positive_scalar(C.field, C.P, rng)
        check("scalar", cone_member(a.scale(u), C), (k, "u a"))
        if not a.is_zero:
            check("proper", not cone_member(-a, C), (k, "-a"))
    return CompatReport(seed, res)


def compatibility_suite(C: ConeSpec, sample_count: int = 200,
                        seed: int = 0) -> CompatReport:
    """The gauge-compatibility conditions of the cone's gauge, plus the
    perturbation property for elements with invertible residue.

    C0: the gauge of a sum of members is the minimum of the gauges.
    C1: 0 <= a <= b implies w(b) <= w(a).
    C2/C3: sandwiched members inherit gauge-ring / gauge-ideal membership.
    C4: a member difference sandwiched in the ideal lies in the ideal.
    C5: the residue cone satisfies the prepositive-cone axioms.
    C6: a member of the ideal is strictly below 1.
    C7: 1 plus a symmetric element of the ideal is a member.
    complicated: a member with invertible residue stays a member under
    perturbation by a symmetric element of the ideal.
    """
    rng = random.Random(seed)
    G = C.gauge()
    names = ["C0", "C1", "C2", "C3", "C4", "C5", "C6", "C7", "complicated"]
    res = {k: ConditionResult() for k in names}

    def check(name, cond, witness):
        res[name].tried += 1
        if not cond:
            res[name].violations.append(witness)

    zero = GammaVal.zero(C.field.r)
    one_mat = MatE.identity(C.espec, C.n)

    for k in range(sample_count):
        a, c = sample_cone(C, count=2, rng=rng)
        b = a + c

        # C0: w(a + c) = min(w(a), w(c)) on members
        check("C0", gauge_value(b, G) == min(gauge_value(a, G), gauge_value(c, G)),
              (k, "C0"))

        # C1: 0 <= a <= b gives w(b) <= w(a)
        if not a.is_zero:
            check("C1", not gauge_value(a, G) < gauge_value(b, G), (k, "C1"))

        # C2: scale the sandwich into the ring, membership of the bound
        # forces membership of the inner element
        u = _scale_into_ring(b, G)
        check("C2", in_gauge_ring(a.scale(u), G) and in_gauge_ring(b.scale(u), G),
              (k, "C2"))

        # C3: same with the ideal
        u = _scale_into_ring(b, G, strict=True)
        check("C3", in_gauge_ideal(a.scale(u), G) and in_gauge_ideal(b.scale(u), G),
              (k, "C3"))

        # C4: difference of ideal members is sandwiched: -(a+c) <= a-c <= a+c
        ua = _scale_into_ring(b, G, strict=True)
        d = (a - c).scale(ua)
        check("C4", in_gauge_ideal(d, G), (k, "C4"))

        # C6: member of the ideal is strictly below 1
        m = a.scale(_scale_into_ring(a, G, strict=True))
        check("C6", cone_member(one_mat - m, C) and m != one_mat, (k, "C6"))

        # C7: 1 + symmetric ideal element is a member
        x = random_matrix(C.espec, C.n, rng)
        s = G.sigma(x) + x
        s = s.scale(_scale_into_ring(s, G, strict=True))
        check("C7", cone_member(one_mat + s, C), (k, "C7"))

        # perturbation of a member with invertible residue
        u0 = random_positive_scalar(C.field, C.P, rng, maxdeg=0)
        cmat = one_mat.scale(u0) + m
        if _residue_invertible(cmat, G):
            check("complicated", cone_member(cmat + s, C), (k, "complicated"))

    # C5: the residue cone is a prepositive cone on the residue algebra
    rc = residue_cone(C)
    for block in rc.block_specs:
        rep = check_prepositive_axioms(block, samples=sample_count, seed=seed + 1)
        res["C5"].tried += sum(r.tried for r in rep.conditions.values())
        for r in rep.conditions.values():
            res["C5"].violations.extend(r.violations)
    return CompatReport(seed, res)


def _residue_invertible(a: MatE, G: GaugeContext) -> bool:
    if not in_gauge_ring(a, G):
        return False
    for block in residue_element(a, G):
        p = reduced_charpoly(block)
        if p.coeffs[0].is_zero:
            return False
    return True


# ---------------------------------------------------------------------------
# Residue cones
# ---------------------------------------------------------------------------

@dataclass
class ResidueCone:
    """The residue cone, blockwise: the positive cone of each residue block
    context over the unique ordering of the residue field."""

    cone: ConeSpec
    block_specs: tuple[ConeSpec, ...]

    def member(self, blocks: Sequence[MatE]) -> bool:
        return all(cone_member(b, spec) for b, spec in zip(blocks, self.block_specs))

    def lift(self, blocks: Sequence[MatE]) -> MatE:
        """The monomial preimage of a residue element, undoing the gauge shift."""
        G = self.cone.gauge()
        e = G.ctx.e
        dec = residue_decomposition(G)
        F = self.cone.field
        espec = self.cone.espec
        out = [[espec.zero() for _ in range(self.cone.n)] for _ in range(self.cone.n)]
        for block, mat in zip(dec.blocks, blocks):
            for s, i in enumerate(block.indices):
                for t, j in enumerate(block.indices):
                    shift = (e[j].val() - e[i].val()).half()
                    mono = F.monomial([int(c) for c in shift.coords])
                    coords = tuple(
                        F.from_fraction(c.as_fraction()) * mono
                        for c in mat.rows[s][t].coords
                    )
                    out[i][j] = EElement(espec, coords)
        return MatE(espec, out)


def residue_cone(C: ConeSpec) -> ResidueCone:
    if not C.valid:
        raise InvalidCone("form is not definite at the ordering")
    dec = residue_decomposition(C.gauge())
    P0 = OrderingSpec(())
    F0 = dec.residue_espec.field
    specs = []
    for block in dec.blocks:
        h = tuple(F0.from_fraction(q) for q in block.residue_form)
        specs.append(ConeSpec(HermContext(dec.residue_espec, h), P0))
    return ResidueCone(C, tuple(specs))


# ---------------------------------------------------------------------------
# Baer-Krull lifting
# ---------------------------------------------------------------------------

AlgebraLike = HermContext | QuatDivSpec


def lift_exists(spec: AlgebraLike, P: OrderingSpec) -> bool:
    """Whether the residue cone lifts over P: the trace form of the algebra
    with involution is definite at P."""
    signs = {f.sign_at(P) for f in trace_form(spec).entries}
    return len(signs) == 1 and 0 not in signs


@dataclass
class LiftReport:
    base_orderings: tuple[OrderingSpec, ...]
    liftable: tuple[OrderingSpec, ...]
    trace_entries: tuple[RatFunc, ...]
    epsilons: tuple[int, ...]  # per valuation class; 0 marks a mixed class
    harrison_generators: tuple[RatFunc, ...]
    harrison_set: tuple[OrderingSpec, ...]

    @property
    def harrison_matches(self) -> bool:
        return self.liftable == self.harrison_set


def lift_set(spec: AlgebraLike) -> LiftReport:
    """All liftable orderings, with the Harrison-set cross-characterization.

    Trace-form entries are grouped by valuation class mod twice the value
    group; a class is assigned the common sign of its leading coefficients
    (mixed classes admit no lifting at all).  An ordering is liftable iff
    sign(epsilon_l) eta(rho_l) is constant over the classes, i.e. iff it lies
    in the Harrison set of the epsilon_l rho_l or of their negatives.
    """
    tf = trace_form(spec)
    F = tf.entries[0].field
    orderings = tuple(enumerate_orderings(F.r))
    liftable = tuple(P for P in orderings if lift_exists(spec, P))

    classes: dict[GammaVal, list[RatFunc]] = {}
    order: list[GammaVal] = []
    for f in tf.entries:
        cls = f.val().mod_group(2)
        if cls not in classes:
            classes[cls] = []
            order.append(cls)
        classes[cls].append(f)
    epsilons = []
    generators = []
    mixed = False
    for cls in order:
        signs = {1 if f.unit_part_residue() > 0 else -1 for f in classes[cls]}
        if len(signs) != 1:
            epsilons.append(0)
            mixed = True
            continue
        eps = signs.pop()
        epsilons.append(eps)
        rho = F.monomial([int(c) for c in cls.coords], eps)
        generators.append(rho)
    if mixed:
        harrison = ()
    else:
        harrison = tuple(
            P
            for P in orderings
            if len({g.sign_at(P) for g in generators}) == 1
        )
    return LiftReport(
        orderings, liftable, tf.entries, tuple(epsilons), tuple(generators), harrison
    )


@dataclass
class WadthResult:
    all_lift: bool
    coset_index_one: bool
    lift_count: int


def wadth_check(spec: AlgebraLike) -> WadthResult:
    """Every ordering lifts iff the gauge value set is the base value group,
    in which case the number of liftings is the full count of orderings."""
    report = lift_set(spec)
    if isinstance(spec, HermContext):
        index_one = form_coset_index(spec) == 1
    else:
        va, vb = spec.a.val(), spec.b.val()
        zero = GammaVal.zero(spec.field.r)
        index_one = va.mod_group(2) == zero and vb.mod_group(2) == zero
    return WadthResult(
        len(report.liftable) == len(report.base_orderings),
        index_one,
        len(report.liftable),
    )


@dataclass
class NilReport:
    nil: tuple[OrderingSpec, ...]


def nil_orderings(spec) -> NilReport:
    """Orderings admitting no positive cone on a quaternion algebra.

    For quaternion conjugation (symplectic) these are the orderings where
    (a,b) splits; for Int(i) composed with conjugation (orthogonal) the
    orderings where (a,b) stays division, i.e. where a and b are both
    negative.
    """
    if not isinstance(spec, QuatDivSpec):
        raise UnsupportedVariant("nil orderings are computed for quaternion algebras")
    F = spec.field
    out = []
    for P in enumerate_orderings(F.r):
        division = spec.a.sign_at(P) == -1 and spec.b.sign_at(P) == -1
        is_nil = division if spec.inv is Involution.INT_I_GAMMA else not division
        if is_nil:
            out.append(P)
    return NilReport(tuple(out))


# ---------------------------------------------------------------------------
# Anisotropy certificates
# ---------------------------------------------------------------------------

@dataclass
class AnisotropyResult:
    status: str  # "CERTIFIED" or "UNKNOWN"
    falsifier: Optional[tuple] = None


def anisotropy_certificate(coeffs: Sequence[RatFunc], ctx: HermContext,
                           P: OrderingSpec, multiplier: int = 2,
                           seed: int = 0, attempts: int = 200) -> AnisotropyResult:
    """Certificate of strong anisotropy for the diagonal hermitian form with
    the given coefficients over (M_n(E), ad_h).

    CERTIFIED when the sufficient hypotheses hold: all coefficients strictly
    positive at P and either of unit valuation (residues positive) or with a
    gauge value set equal to the base value group.  Otherwise UNKNOWN, with a
    refutation search over bounded-height isotropy witnesses; a found
    witness is returned and disproves anisotropy.
    """
    rng = random.Random(seed)
    F = ctx.field
    zero = GammaVal.zero(F.r)
    positive = all(f.sign_at(P) == 1 for f in coeffs)
    units = all(f.val() == zero for f in coeffs)
    certified = positive and (units or form_coset_index(ctx) == 1)

    witness = _isotropy_falsifier(coeffs, ctx, P, rng, attempts, multiplier)
    if certified:
        if witness is not None:
            raise FieldError("certificate contradicted by an isotropy witness")
        return AnisotropyResult("CERTIFIED")
    return AnisotropyResult("UNKNOWN", witness)


def _isotropy_falsifier(coeffs, ctx, P, rng, attempts, multiplier):
    """Search for x_i, not all zero, with sum sigma(x_i) a_i x_i = 0."""
    spec = ctx.espec
    n = ctx.n
    e = ctx.e

    def sigma(m):
        rows = [
            [m.rows[j][i].conj().scale(e[j] / e[i]) for j in range(n)]
            for i in range(n)
        ]
        return MatE(spec, rows)

    ell = len(coeffs)
    pool = [Fraction(q) for q in (1, -1, 2, -2, Fraction(1, 2))]

    def total(xs):
        acc = MatE.zeros(spec, n)
        for f, x in zip(coeffs, xs):
            acc = acc + (sigma(x) * x).scale(f)
        return acc

    # structured attempts: two-coordinate scalar witnesses t^2 a_i = -a_j
    for i in range(ell):
        for j in range(i + 1, ell):
            for t in pool:
                if (coeffs[i] * t * t + coeffs[j]).is_zero:
                    xs = [MatE.zeros(spec, n) for _ in range(ell)]
                    xs[i] = MatE.identity(spec, n).scale(coeffs[i].field.from_fraction(t))
                    xs[j] = MatE.identity(spec, n)
                    if total(xs).is_zero:
                        return tuple(xs)
    # random attempts
    for _ in range(attempts):
        xs = []
        nonzero = False
        for _ in range(ell):
            if rng.random() < 0.4:
                xs.append(MatE.zeros(spec, n))
            else:
                x = random_matrix(spec, n, rng, maxdeg=multiplier, height=4)
                nonzero = nonzero or not x.is_zero
                xs.append(x)
        if nonzero and total(xs).is_zero:
            return tuple(xs)
    return None
