"""Gauges on matrix algebras with involution.

For (M_n(E), ad_h) with h = <e_1,...,e_n> definite at a compatible ordering,
the associated gauge is w(a) = min over i,j of v_E(a_ij) + (v(e_i)-v(e_j))/2.
This module computes gauge values, the gauge ring and ideal, the value set as
a union of cosets of the base value group, the residue algebra decomposition
with its residue forms, eigenvalue valuations, and the stable subgroup test
w(a^{-1}) = -w(a).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .field import (
    FieldError,
    FunctionField,
    GammaVal,
    OrderingSpec,
    RatFunc,
    newton_root_valuations,
)
from .algebra import EElement, EKind, ESpec, HermContext, v_E
from .matrices import DimensionMismatch, MatE, Singular, reduced_charpoly


class IndefiniteForm(FieldError):
    """The diagonal form is not definite at the ordering."""


class NotSymmetric(FieldError):
    """Operation requires an ad_h-symmetric element."""


class NotInRing(FieldError):
    """Residue requested for an element outside the gauge ring."""


class GaugeContext:
    """A gauge on (M_n(E), ad_h) at a compatible ordering.

    The form must be definite at P; if every entry is negative the context
    stores the negated form (same adjoint involution, same gauge) and records
    normalized_sign = -1.
    """

    __slots__ = ("ctx", "P", "normalized_sign", "_half_vals")

    def __init__(self, ctx: HermContext, P: OrderingSpec):
        signs = {f.sign_at(P) for f in ctx.e}
        if len(signs) != 1 or 0 in signs:
            raise IndefiniteForm("form entries must share a strict sign at P")
        self.normalized_sign = signs.pop()
        if self.normalized_sign < 0:
            ctx = HermContext(ctx.espec, tuple(-f for f in ctx.e))
        self.ctx = ctx
        self.P = P
        self._half_vals = tuple(f.val().half() for f in ctx.e)

    @property
    def n(self) -> int:
        return self.ctx.n

    @property
    def espec(self) -> ESpec:
        return self.ctx.espec

    @property
    def field(self) -> FunctionField:
        return self.ctx.field

    def sigma(self, a: MatE) -> MatE:
        """The adjoint involution Int(e^{-1}) composed with bar-transpose."""
        self._check_size(a)
        e = self.ctx.e
        rows = [
            [
                a.rows[j][i].conj().scale(e[j] / e[i])
                for j in range(self.n)
            ]
            for i in range(self.n)
        ]
        return MatE(self.espec, rows)

    def is_symmetric(self, a: MatE) -> bool:
        return self.sigma(a) == a

    def gram_twist(self, a: MatE) -> MatE:
        """diag(e) * a; hermitian exactly when a is ad_h-symmetric."""
        self._check_size(a)
        return MatE(
            self.espec,
            [[x.scale(self.ctx.e[i]) for x in row] for i, row in enumerate(a.rows)],
        )

    def _check_size(self, a: MatE):
        if a.n != self.n or a.m != self.n:
            raise DimensionMismatch(f"expected a {self.n}x{self.n} matrix")


def gauge_value(a: MatE, G: GaugeContext) -> GammaVal:
    """w(a) = min over i,j of v_E(a_ij) + (v(e_i) - v(e_j))/2; INF iff a = 0."""
    G._check_size(a)
    best = GammaVal.infinity()
    hv = G._half_vals
    for i in range(G.n):
        for j in range(G.n):
            x = a.rows[i][j]
            if x.is_zero:
                continue
            cand = v_E(x) + hv[i] - hv[j]
            if cand < best:
                best = cand
    return best


def in_gauge_ring(a: MatE, G: GaugeContext) -> bool:
    return not gauge_value(a, G) < GammaVal.zero(G.field.r)


def in_gauge_ideal(a: MatE, G: GaugeContext) -> bool:
    return gauge_value(a, G) > GammaVal.zero(G.field.r)


@dataclass(frozen=True)
class CosetSet:
    """A finite union of cosets of the value group, by canonical representatives
    with coordinates in [0, 1)."""

    reps: frozenset[GammaVal]

    def __len__(self):
        return len(self.reps)


def value_coset_set(G: GaugeContext) -> CosetSet:
    """The value set of the gauge as a union of cosets of the value group."""
    reps = {
        (G._half_vals[i] - G._half_vals[j]).mod_group(1)
        for i in range(G.n)
        for j in range(G.n)
    }
    return CosetSet(frozenset(reps))


def coset_index(G: GaugeContext) -> int:
    return len(value_coset_set(G))


def form_coset_index(ctx: HermContext) -> int:
    """Coset index of the gauge value set, from the form alone (it does not
    depend on the ordering)."""
    hv = [f.val().half() for f in ctx.e]
    return len({(a - b).mod_group(1) for a in hv for b in hv})


@dataclass(frozen=True)
class ResidueBlock:
    class_rep: GammaVal  # valuation class mod twice the value group
    indices: tuple[int, ...]
    residue_form: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class ResidueDecomposition:
    """The residue algebra of the gauge ring: a product of matrix blocks over
    the residue coefficient algebra E0, one per valuation class of the form."""

    blocks: tuple[ResidueBlock, ...]
    residue_espec: ESpec


def _residue_espec(espec: ESpec) -> ESpec:
    F0 = FunctionField([])
    if espec.kind is EKind.BASE:
        return ESpec(EKind.BASE, F0)
    if espec.kind is EKind.COMPLEX:
        return ESpec(EKind.COMPLEX, F0)
    m1 = F0.from_fraction(-1)
    return ESpec(EKind.QUAT, F0, m1, m1)


def residue_decomposition(G: GaugeContext) -> ResidueDecomposition:
    """Group form indices by valuation class mod twice the value group; the
    residue form of a block collects the leading coefficients of its entries."""
    order: list[GammaVal] = []
    groups: dict[GammaVal, list[int]] = {}
    for i, f in enumerate(G.ctx.e):
        cls = f.val().mod_group(2)
        if cls not in groups:
            groups[cls] = []
            order.append(cls)
        groups[cls].append(i)
    blocks = []
    for cls in order:
        idx = tuple(groups[cls])
        form = tuple(G.ctx.e[i].unit_part_residue() for i in idx)
        blocks.append(ResidueBlock(cls, idx, form))
    return ResidueDecomposition(tuple(blocks), _residue_espec(G.espec))


def is_dubrovin(G: GaugeContext) -> bool:
    """Whether the gauge ring has a single residue block."""
    return len(residue_decomposition(G).blocks) == 1


def residue_element(a: MatE, G: GaugeContext) -> list[MatE]:
    """Image of a gauge-ring element in the residue algebra, one matrix per block.

    Within a block, the (s, t) entry is the residue of a_ij times the monomial
    of exponent (v(e_i) - v(e_j))/2, the same shift that enters the gauge
    value; entries across blocks vanish.
    """
    if not in_gauge_ring(a, G):
        raise NotInRing("element has negative gauge value")
    dec = residue_decomposition(G)
    F = G.field
    e = G.ctx.e
    out = []
    for block in dec.blocks:
        rows = []
        for i in block.indices:
            row = []
            for j in block.indices:
                shift = (e[i].val() - e[j].val()).half()
                mono = F.monomial([int(c) for c in shift.coords])
                coords = tuple(
                    Fraction((c * mono).residue()) for c in a.rows[i][j].coords
                )
                row.append(
                    EElement(
                        dec.residue_espec,
                        tuple(dec.residue_espec.field.from_fraction(q) for q in coords),
                    )
                )
            rows.append(row)
        out.append(MatE(dec.residue_espec, rows))
    return out


def eigen_valuations(b: MatE, G: GaugeContext) -> list[GammaVal]:
    """Valuations of the eigenvalues of an ad_h-symmetric matrix.

    Computed from the Newton polygon of the reduced characteristic polynomial;
    similarity invariance makes the symmetrized model unnecessary.  The
    minimum equals the gauge value.
    """
    if not G.is_symmetric(b):
        raise NotSymmetric("matrix is not ad_h-symmetric")
    return newton_root_valuations(reduced_charpoly(b))


def in_st(a: MatE, G: GaugeContext) -> bool:
    """Whether w(a^{-1}) = -w(a), tested via the eigenvalue valuations of
    sigma(a) a, which must all coincide."""
    a.inverse()  # raises Singular when a is not invertible
    s = G.sigma(a) * a
    vals = newton_root_valuations(reduced_charpoly(s))
    return all(v == vals[0] for v in vals)


def quat_division_gauge(q: EElement) -> GammaVal:
    """The gauge w(q) = v(conj(q) q) / 2 on a quaternion division algebra."""
    return v_E(q)


def min_gauge_matrix(M: MatE, entry_gauge: Callable[[EElement], GammaVal]) -> GammaVal:
    """The entrywise-minimum gauge on matrices over a gauged algebra."""
    best = GammaVal.infinity()
    for row in M.rows:
        for x in row:
            if x.is_zero:
                continue
            g = entry_gauge(x)
            if g < best:
                best = g
    return best
