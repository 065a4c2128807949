"""Coefficient algebras E over the base field, with involution.

E is one of F itself, F(sqrt(-1)), or a quaternion algebra (a,b)_F with
basis 1, i, j, k = ij and relations i^2 = a, j^2 = b, ji = -ij.  The module
provides the bar conjugation, the norm form n_E(x) = conj(x) x, the valuation
extension v_E = (1/2) val(n_E), trace forms of the in-scope algebras with
involution, and symmetric congruence diagonalization over F.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .field import (
    FieldError,
    FunctionField,
    GammaVal,
    OrderingSpec,
    RatFunc,
)


class SpecMismatch(FieldError):
    """Operands live over different coefficient algebras."""


class IndeterminateNorm(FieldError):
    """Norm-term valuations may collide; v_E is not determined."""


class LengthMismatch(FieldError):
    """Diagonal forms of different ranks compared."""


class EKind(Enum):
    BASE = "base"
    COMPLEX = "complex"
    QUAT = "quat"


@dataclass(frozen=True)
class ESpec:
    """One of the coefficient algebras: F, F(sqrt(-1)), or (a,b)_F."""

    kind: EKind
    field: FunctionField
    a: Optional[RatFunc] = None
    b: Optional[RatFunc] = None

    def __post_init__(self):
        if self.kind is EKind.QUAT:
            if self.a is None or self.b is None or self.a.is_zero or self.b.is_zero:
                raise ValueError("quaternion parameters must be nonzero")
        elif self.a is not None or self.b is not None:
            raise ValueError("parameters only apply to quaternion algebras")

    @property
    def dim(self) -> int:
        return {EKind.BASE: 1, EKind.COMPLEX: 2, EKind.QUAT: 4}[self.kind]

    def zero(self) -> "EElement":
        z = self.field.zero
        return EElement(self, (z,) * self.dim)

    def one(self) -> "EElement":
        return self.scalar(self.field.one)

    def scalar(self, f) -> "EElement":
        if isinstance(f, (int, Fraction)):
            f = self.field.from_fraction(f)
        z = self.field.zero
        return EElement(self, (f,) + (z,) * (self.dim - 1))

    def basis(self) -> list["EElement"]:
        z, o = self.field.zero, self.field.one
        out = []
        for t in range(self.dim):
            coords = [z] * self.dim
            coords[t] = o
            out.append(EElement(self, tuple(coords)))
        return out

    def is_hamilton(self) -> bool:
        """Quaternions with a = b = -1."""
        m1 = self.field.from_fraction(-1)
        return self.kind is EKind.QUAT and self.a == m1 and self.b == m1


def base_spec(field: FunctionField) -> ESpec:
    return ESpec(EKind.BASE, field)


def complex_spec(field: FunctionField) -> ESpec:
    return ESpec(EKind.COMPLEX, field)


def quat_spec(field: FunctionField, a: RatFunc, b: RatFunc) -> ESpec:
    return ESpec(EKind.QUAT, field, a, b)


def hamilton_spec(field: FunctionField) -> ESpec:
    m1 = field.from_fraction(-1)
    return quat_spec(field, m1, m1)


class EElement:
    """Element of a coefficient algebra, as coordinates on the standard basis."""

    __slots__ = ("spec", "coords")

    def __init__(self, spec: ESpec, coords: Sequence[RatFunc]):
        coords = tuple(coords)
        if len(coords) != spec.dim:
            raise SpecMismatch("coordinate count does not match the algebra")
        self.spec = spec
        self.coords = coords

    def _check(self, other: "EElement"):
        if self.spec != other.spec:
            raise SpecMismatch("elements of different coefficient algebras")

    def __add__(self, other: "EElement") -> "EElement":
        self._check(other)
        return EElement(self.spec, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "EElement") -> "EElement":
        self._check(other)
        return EElement(self.spec, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "EElement":
        return EElement(self.spec, tuple(-a for a in self.coords))

    def __mul__(self, other: "EElement") -> "EElement":
        self._check(other)
        k = self.spec.kind
        if k is EKind.BASE:
            return EElement(self.spec, (self.coords[0] * other.coords[0],))
        if k is EKind.COMPLEX:
            x0, x1 = self.coords
            y0, y1 = other.coords
            return EElement(self.spec, (x0 * y0 - x1 * y1, x0 * y1 + x1 * y0))
        a, b = self.spec.a, self.spec.b
        x0, x1, x2, x3 = self.coords
        y0, y1, y2, y3 = other.coords
        return EElement(
            self.spec,
            (
                x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
                x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
                x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
                x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
            ),
        )

    def scale(self, f) -> "EElement":
        if isinstance(f, (int, Fraction)):
            f = self.spec.field.from_fraction(f)
        return EElement(self.spec, tuple(f * a for a in self.coords))

    def conj(self) -> "EElement":
        """Bar conjugation: identity on F, negates all imaginary coordinates."""
        if self.spec.kind is EKind.BASE:
            return self
        return EElement(self.spec, (self.coords[0],) + tuple(-a for a in self.coords[1:]))

    def norm(self) -> RatFunc:
        """n_E(x) = conj(x) x, central in F."""
        k = self.spec.kind
        if k is EKind.BASE:
            return self.coords[0] * self.coords[0]
        if k is EKind.COMPLEX:
            x0, x1 = self.coords
            return x0 * x0 + x1 * x1
        a, b = self.spec.a, self.spec.b
        x0, x1, x2, x3 = self.coords
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    def trd(self) -> RatFunc:
        """Reduced trace: x + conj(x) as a scalar (x itself for F)."""
        if self.spec.kind is EKind.BASE:
            return self.coords[0]
        return 2 * self.coords[0]

    def real_part(self) -> RatFunc:
        return self.coords[0]

    def is_central(self) -> bool:
        return all(a.is_zero for a in self.coords[1:])

    def inverse(self) -> "EElement":
        # conj(x)/n(x); the in-scope norm forms are anisotropic over F
        n = self.norm()
        if n.is_zero:
            raise ZeroDivisionError("element has zero norm")
        return self.conj().scale(self.spec.field.one / n)

    @property
    def is_zero(self) -> bool:
        return all(a.is_zero for a in self.coords)

    def __eq__(self, other):
        if not isinstance(other, EElement):
            return NotImplemented
        return self.spec == other.spec and self.coords == other.coords

    def __hash__(self):
        return hash((self.spec, self.coords))

    def __repr__(self):
        names = {1: ("",), 2: ("", "s"), 4: ("", "i", "j", "k")}[self.spec.dim]
        parts = [f"({c}){n}" for c, n in zip(self.coords, names) if not c.is_zero]
        return " + ".join(parts) if parts else "0"


def v_E(x: EElement) -> GammaVal:
    """Valuation extension v_E(x) = (1/2) val(n_E(x)).

    For F, F(sqrt(-1)) and (-1,-1)_F this is the minimum of the coordinate
    valuations: the norm is a sum of squares (up to positive units) whose
    leading terms cannot cancel.  For a general quaternion algebra (a,b)_F
    the four norm terms must lie in pairwise distinct classes mod twice the
    value group, otherwise cancellation cannot be ruled out.
    """
    if x.is_zero:
        return GammaVal.infinity()
    spec = x.spec
    if spec.kind is not EKind.QUAT or spec.is_hamilton():
        return min(c.val() for c in x.coords if not c.is_zero)
    va, vb = spec.a.val(), spec.b.val()
    classes = {
        GammaVal.zero(spec.field.r).mod_group(2),
        va.mod_group(2),
        vb.mod_group(2),
        (va + vb).mod_group(2),
    }
    if len(classes) != 4:
        raise IndeterminateNorm(
            "norm-term valuation classes collide; v_E is not determined"
        )
    shifts = [GammaVal.zero(spec.field.r), va, vb, va + vb]
    terms = [
        s + c.val().scale(2) for s, c in zip(shifts, x.coords) if not c.is_zero
    ]
    return min(terms).half()


# ---------------------------------------------------------------------------
# Algebras with involution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HermContext:
    """(M_n(E), ad_h) for a diagonal hermitian form h = <e_1,...,e_n> over F.

    The adjoint involution is sigma = Int(e^{-1}) composed with bar-transpose.
    E must be F, F(sqrt(-1)) or (-1,-1)_F.
    """

    espec: ESpec
    e: tuple[RatFunc, ...]

    def __post_init__(self):
        if self.espec.kind is EKind.QUAT and not self.espec.is_hamilton():
            raise ValueError("matrix contexts require F, F(sqrt(-1)) or (-1,-1)_F")
        if not self.e:
            raise ValueError("empty form")
        if any(f.is_zero for f in self.e):
            raise ValueError("form entries must be invertible")

    @property
    def n(self) -> int:
        return len(self.e)

    @property
    def field(self) -> FunctionField:
        return self.espec.field


class Involution(Enum):
    GAMMA = "gamma"
    INT_I_GAMMA = "int_i_gamma"


@dataclass(frozen=True)
class QuatDivSpec:
    """A quaternion algebra (a,b)_F with quaternion conjugation gamma or Int(i) o gamma."""

    a: RatFunc
    b: RatFunc
    inv: Involution

    def __post_init__(self):
        if self.a.is_zero or self.b.is_zero:
            raise ValueError("quaternion parameters must be nonzero")

    @property
    def field(self) -> FunctionField:
        return self.a.field

    def espec(self) -> ESpec:
        return quat_spec(self.field, self.a, self.b)

    def apply(self, x: EElement) -> EElement:
        g = x.conj()
        if self.inv is Involution.GAMMA:
            return g
        i = self.espec().basis()[1]
        return (i * g) * i.inverse()


AlgebraSpec = HermContext | QuatDivSpec


@dataclass(frozen=True)
class DiagForm:
    """Diagonal hermitian form <a_1,...,a_m> with invertible entries."""

    entries: tuple[RatFunc, ...]

    def __post_init__(self):
        if any(f.is_zero for f in self.entries):
            raise ValueError("form entries must be invertible")

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class CongruenceResult:
    """D = C^t G C with C invertible; entries of D may include zeros."""

    entries: tuple[RatFunc, ...]
    transform: tuple[tuple[RatFunc, ...], ...]


def diag_congruence(G: Sequence[Sequence[RatFunc]]) -> CongruenceResult:
    """Diagonalize a symmetric matrix over F by congruence, recording the transform."""
    n = len(G)
    if n == 0:
        return CongruenceResult((), ())
    field = G[0][0].field
    A = [list(row) for row in G]
    for i in range(n):
        for j in range(i + 1, n):
            if A[i][j] != A[j][i]:
                raise ValueError("matrix is not symmetric")
    C = [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]

    def add_col(dst, src, c):
        # column op A <- A + c * col_src into col_dst, mirrored on rows, tracked in C
        for t in range(n):
            A[t][dst] = A[t][dst] + c * A[t][src]
        for t in range(n):
            A[dst][t] = A[dst][t] + c * A[src][t]
        for t in range(n):
            C[t][dst] = C[t][dst] + c * C[t][src]

    def swap_cols(p, q):
        for t in range(n):
            A[t][p], A[t][q] = A[t][q], A[t][p]
        A[p], A[q] = A[q], A[p]
        for t in range(n):
            C[t][p], C[t][q] = C[t][q], C[t][p]

    for k in range(n):
        if A[k][k].is_zero:
            pivot = next((t for t in range(k + 1, n) if not A[t][t].is_zero), None)
            if pivot is not None:
                swap_cols(k, pivot)
            else:
                off = next(
                    (t for t in range(k + 1, n) if not A[k][t].is_zero), None
                )
                if off is None:
                    continue
                add_col(k, off, field.one)
        d = A[k][k]
        for t in range(k + 1, n):
            if not A[k][t].is_zero:
                add_col(t, k, -A[k][t] / d)
    return CongruenceResult(
        tuple(A[t][t] for t in range(n)),
        tuple(tuple(row) for row in C),
    )


def trace_form(spec: AlgebraSpec) -> DiagForm:
    """Diagonalization of the trace form (x, y) -> Trd(sigma(x) y) over F."""
    if isinstance(spec, QuatDivSpec):
        basis = spec.espec().basis()
        gram = [
            [(spec.apply(u) * v).trd() for v in basis] for u in basis
        ]
    else:
        basis = _matrix_basis(spec)
        gram = [[_matrix_trace_pairing(spec, u, v) for v in basis] for u in basis]
    entries = diag_congruence(gram).entries
    if any(f.is_zero for f in entries):
        raise ValueError("trace form is degenerate")
    return DiagForm(entries)


def _matrix_basis(ctx: HermContext):
    """Standard F-basis q * E_ij of M_n(E), as (q, i, j) triples."""
    return [
        (q, i, j)
        for q in ctx.espec.basis()
        for i in range(ctx.n)
        for j in range(ctx.n)
    ]


def _matrix_trace_pairing(ctx: HermContext, u, v) -> RatFunc:
    # Trd(sigma(q E_ij) q' E_kl) = [i=k][j=l] * e_i/e_j * trd(conj(q) q')
    q, i, j = u
    p, k, l = v
    if i != k or j != l:
        return ctx.field.zero
    return (ctx.e[i] / ctx.e[j]) * (q.conj() * p).trd()


def same_square_class_form(d1: DiagForm, d2: DiagForm, P: OrderingSpec) -> bool:
    """Whether the forms match entrywise up to squares, at the ordering P.

    At a fixed compatible ordering, an entry is determined up to squares by
    its sign at P and its valuation class mod twice the value group.
    """
    if len(d1) != len(d2):
        raise LengthMismatch(f"ranks {len(d1)} and {len(d2)}")

    def key(f: RatFunc):
        return (f.sign_at(P), f.val().mod_group(2))

    return sorted(
        (key(f) for f in d1.entries), key=lambda t: (t[0], t[1].coords)
    ) == sorted((key(f) for f in d2.entries), key=lambda t: (t[0], t[1].coords))
