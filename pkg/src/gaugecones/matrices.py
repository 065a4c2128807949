"""Matrices over the coefficient algebras.

Provides exact matrix arithmetic over E, the complex 2n x 2n embedding of a
quaternionic matrix, reduced characteristic polynomials with coefficients in
the base field, right-eigenvalue tests, Cayley-Hamilton verification, exact
positive-semidefiniteness at an ordering, and extraction of eigenvalues lying
in the base field.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from sympy import QQ
from sympy.polys.rings import ring as _sympy_ring

from .field import FieldError, FunctionField, PolyX, RatFunc, OrderingSpec, _to_fraction
from .algebra import EElement, EKind, ESpec, SpecMismatch, complex_spec


class DimensionMismatch(FieldError):
    """Matrix sizes are incompatible."""


class WrongKind(FieldError):
    """Operation requires a different coefficient algebra."""


class NotHermitian(FieldError):
    """Operation requires a bar-transpose-symmetric matrix."""


class Singular(FieldError):
    """Matrix is not invertible."""


class MatE:
    """Square or rectangular matrix with entries in a coefficient algebra E."""

    __slots__ = ("spec", "rows")

    def __init__(self, spec: ESpec, rows: Sequence[Sequence[EElement]]):
        rows = tuple(tuple(r) for r in rows)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise DimensionMismatch("ragged or empty matrix")
        for r in rows:
            for x in r:
                if x.spec != spec:
                    raise SpecMismatch("entry lives over a different algebra")
        self.spec = spec
        self.rows = rows

    @classmethod
    def identity(cls, spec: ESpec, n: int) -> "MatE":
        z, o = spec.zero(), spec.one()
        return cls(spec, [[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, spec: ESpec, n: int, m: int | None = None) -> "MatE":
        z = spec.zero()
        m = n if m is None else m
        return cls(spec, [[z] * m for _ in range(n)])

    @classmethod
    def from_scalar_rows(cls, spec: ESpec, rows: Sequence[Sequence[RatFunc]]) -> "MatE":
        return cls(spec, [[spec.scalar(f) for f in r] for r in rows])

    @classmethod
    def diagonal(cls, spec: ESpec, entries: Sequence[EElement | RatFunc]) -> "MatE":
        z = spec.zero()
        es = [x if isinstance(x, EElement) else spec.scalar(x) for x in entries]
        n = len(es)
        return cls(spec, [[es[i] if i == j else z for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return len(self.rows[0])

    @property
    def is_square(self) -> bool:
        return self.n == self.m

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other: "MatE") -> "MatE":
        if (self.n, self.m) != (other.n, other.m):
            raise DimensionMismatch("sizes differ")
        return MatE(
            self.spec,
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
        )

    def __sub__(self, other: "MatE") -> "MatE":
        return self + (-other)

    def __neg__(self) -> "MatE":
        return MatE(self.spec, [[-a for a in r] for r in self.rows])

    def __mul__(self, other: "MatE") -> "MatE":
        if self.m != other.n:
            raise DimensionMismatch("inner sizes differ")
        z = self.spec.zero()
        out = []
        for i in range(self.n):
            row = []
            for j in range(other.m):
                acc = z
                for k in range(self.m):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return MatE(self.spec, out)

    def scale(self, f) -> "MatE":
        return MatE(self.spec, [[a.scale(f) for a in r] for r in self.rows])

    def scale_left(self, q: EElement) -> "MatE":
        return MatE(self.spec, [[q * a for a in r] for r in self.rows])

    def bar_transpose(self) -> "MatE":
        return MatE(
            self.spec,
            [[self.rows[j][i].conj() for j in range(self.n)] for i in range(self.m)],
        )

    def trace(self) -> EElement:
        if not self.is_square:
            raise DimensionMismatch("trace of a non-square matrix")
        acc = self.spec.zero()
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    @property
    def is_zero(self) -> bool:
        return all(x.is_zero for r in self.rows for x in r)

    def is_hermitian(self) -> bool:
        return self.is_square and self == self.bar_transpose()

    def inverse(self) -> "MatE":
        """Gauss-Jordan inverse over the (division) coefficient algebra."""
        if not self.is_square:
            raise DimensionMismatch("inverse of a non-square matrix")
        n = self.n
        A = [list(r) for r in self.rows]
        B = [list(r) for r in MatE.identity(self.spec, n).rows]
        for col in range(n):
            pivot = next(
                (r for r in range(col, n) if not A[r][col].norm().is_zero), None
            )
            if pivot is None:
                raise Singular("matrix is not invertible")
            A[col], A[pivot] = A[pivot], A[col]
            B[col], B[pivot] = B[pivot], B[col]
            inv = A[col][col].inverse()
            A[col] = [inv * x for x in A[col]]
            B[col] = [inv * x for x in B[col]]
            for r in range(n):
                if r == col or A[r][col].is_zero:
                    continue
                c = A[r][col]
                A[r] = [x - c * y for x, y in zip(A[r], A[col])]
                B[r] = [x - c * y for x, y in zip(B[r], B[col])]
        return MatE(self.spec, B)

    def __eq__(self, other):
        if not isinstance(other, MatE):
            return NotImplemented
        return self.spec == other.spec and self.rows == other.rows

    def __hash__(self):
        return hash((self.spec, self.rows))

    def __repr__(self):
        body = "; ".join(", ".join(repr(x) for x in r) for r in self.rows)
        return f"MatE[{body}]"


def chi(M: MatE) -> MatE:
    """Complex 2n x 2n image of a quaternionic matrix.

    Writing each entry as q = (x0 + x1 i) + (x2 + x3 i) j, the image is the
    block matrix [[M1, M2], [-conj(M2), conj(M1)]] over F(sqrt(-1)).
    """
    if M.spec.kind is not EKind.QUAT:
        raise WrongKind("complex embedding needs quaternionic entries")
    C = complex_spec(M.spec.field)

    def part(q: EElement, lo: int) -> EElement:
        return EElement(C, (q.coords[lo], q.coords[lo + 1]))

    n = M.n
    m1 = [[part(M.rows[i][j], 0) for j in range(n)] for i in range(n)]
    m2 = [[part(M.rows[i][j], 2) for j in range(n)] for i in range(n)]
    top = [m1[i] + m2[i] for i in range(n)]
    bot = [
        [-m2[i][j].conj() for j in range(n)] + [m1[i][j].conj() for j in range(n)]
        for i in range(n)
    ]
    return MatE(C, top + bot)


def _charpoly_commutative(M: MatE) -> list[EElement]:
    """Characteristic polynomial coefficients (constant first) over a
    commutative E, by the Faddeev-LeVerrier recursion."""
    n = M.n
    I = MatE.identity(M.spec, n)
    coeffs = [M.spec.one()]  # leading coefficient, built backwards
    N = I
    for k in range(1, n + 1):
        N = M * N
        ck = (-N.trace()).scale(Fraction(1, k))
        coeffs.append(ck)
        N = N + I.scale_left(ck)
    coeffs.reverse()
    return coeffs


def _as_scalar(q: EElement) -> RatFunc:
    for c in q.coords[1:]:
        if not c.is_zero:
            raise FieldError("coefficient has a nonzero imaginary part")
    return q.coords[0]


def _poly_mul(a: list[EElement], b: list[EElement], spec: ESpec) -> list[EElement]:
    out = [spec.zero()] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[i + j] = out[i + j] + u * v
    return out


def reduced_charpoly(M: MatE) -> PolyX:
    """Reduced characteristic polynomial with coefficients in F.

    Degree n over F itself; degree 2n over F(sqrt(-1)) (the polynomial times
    its conjugate) and over the quaternions (characteristic polynomial of the
    complex embedding).  Coefficients are exactly real.
    """
    if not M.is_square:
        raise DimensionMismatch("characteristic polynomial of a non-square matrix")
    F = M.spec.field
    if M.spec.kind is EKind.BASE:
        coeffs = _charpoly_commutative(M)
        return PolyX(F, [c.coords[0] for c in coeffs])
    if M.spec.kind is EKind.COMPLEX:
        q = _charpoly_commutative(M)
        qbar = [c.conj() for c in q]
        prod = _poly_mul(q, qbar, M.spec)
        return PolyX(F, [_as_scalar(c) for c in prod])
    coeffs = _charpoly_commutative(chi(M))
    return PolyX(F, [_as_scalar(c) for c in coeffs])


def is_right_eigenvalue(M: MatE, lam: EElement) -> bool:
    """Whether lam is a right eigenvalue of M (some x != 0 with Mx = x lam)."""
    if lam.spec != M.spec:
        raise SpecMismatch("eigenvalue lives over a different algebra")
    p = reduced_charpoly(M)
    if all(c.is_zero for c in lam.coords[1:]) or M.spec.kind is not EKind.QUAT:
        # central case: direct evaluation in E
        acc = M.spec.zero()
        for c in reversed(p.coeffs):
            acc = acc * lam + M.spec.scalar(c)
        return acc.is_zero
    # non-central quaternion: lam satisfies X^2 - trd(lam) X + n(lam)
    F = M.spec.field
    q = PolyX(F, [lam.norm(), -lam.trd(), F.one])
    _, rem = p.divmod(q)
    return rem.is_zero


def cayley_hamilton_check(M: MatE) -> bool:
    """Whether the reduced characteristic polynomial annihilates M."""
    p = reduced_charpoly(M)
    n = M.n
    acc = MatE.zeros(M.spec, n)
    I = MatE.identity(M.spec, n)
    for c in reversed(p.coeffs):
        acc = acc * M + I.scale(c)
    return acc.is_zero


def psd_at(M: MatE, P: OrderingSpec) -> bool:
    """Exact positive-semidefiniteness of a hermitian matrix at an ordering.

    All eigenvalues of a hermitian matrix are real over the real closure, and
    they are all nonnegative iff (-1)^k times the coefficient of X^(d-k) in
    the reduced characteristic polynomial is nonnegative at P for every k.
    """
    if not M.is_hermitian():
        raise NotHermitian("matrix is not bar-transpose symmetric")
    if M.n == 1:
        x = M.rows[0][0].real_part()
        return x.is_zero or x.sign_at(P) > 0
    if M.n == 2:
        # eigenvalues are the roots of X^2 - tr X + det, real and with
        # tr and det scalar by hermitian symmetry; nonnegative roots of a
        # real-rooted quadratic mean tr >= 0 and det >= 0
        tr = (M.rows[0][0] + M.rows[1][1]).real_part()
        det = (M.rows[0][0] * M.rows[1][1] - M.rows[0][1] * M.rows[1][0]).real_part()
        return (tr.is_zero or tr.sign_at(P) > 0) and (det.is_zero or det.sign_at(P) > 0)
    p = reduced_charpoly(M)
    d = p.degree
    sign = 1
    for k in range(d + 1):
        c = p.coeffs[d - k]
        if not c.is_zero and c.sign_at(P) != sign:
            return False
        sign = -sign
    return True


def f_eigenvalues(M: MatE) -> tuple[list[RatFunc], bool]:
    """Eigenvalues of a hermitian matrix that lie in the base field.

    Returns (roots with multiplicity, splits) where splits is true iff the
    reduced characteristic polynomial factors completely into linear factors
    over F.  Over F(sqrt(-1)) and the quaternions each base-field eigenvalue
    appears twice in the reduced polynomial; the halved multiplicity is
    reported.
    """
    if not M.is_hermitian():
        raise NotHermitian("matrix is not bar-transpose symmetric")
    p = reduced_charpoly(M)
    roots, splits = _rational_roots(p)
    if M.spec.kind is not EKind.BASE:
        halved = []
        grouped: dict[RatFunc, int] = {}
        for r in roots:
            grouped[r] = grouped.get(r, 0) + 1
        for r, mult in grouped.items():
            if mult % 2:
                raise FieldError("odd multiplicity in a doubled polynomial")
            halved.extend([r] * (mult // 2))
        roots = halved
    return sorted(roots, key=lambda f: str(f)), splits


def _rational_roots(p: PolyX) -> tuple[list[RatFunc], bool]:
    """Roots of p in F with multiplicity, and whether p splits over F."""
    F = p.field
    names = ("_X",) + F.varnames
    built = _sympy_ring(names, QQ)
    R = built[0]
    fring = F._ring

    # clear denominators: multiply by the product of coefficient denominators
    den = F.one
    for c in p.coeffs:
        den = den * RatFunc(F, F._field.new(c._f.denom, fring.one))
    cleared = [c * den for c in p.coeffs]
    total = R.zero
    for i, c in enumerate(cleared):
        if c.is_zero:
            continue
        if c._f.denom != fring.one:
            raise FieldError("denominator clearing failed")
        total += R.from_terms(
            [((i,) + exps, coeff) for exps, coeff in c._f.numer.terms()]
        )
    _, factors = total.factor_list()
    roots: list[RatFunc] = []
    splits = True
    for fac, mult in factors:
        degx = max(mono[0] for mono in fac.monoms())
        if degx == 0:
            continue
        if degx > 1:
            splits = False
            continue
        a_terms = [(exps[1:], c) for exps, c in fac.terms() if exps[0] == 1]
        b_terms = [(exps[1:], c) for exps, c in fac.terms() if exps[0] == 0]
        A = fring.from_terms(a_terms) if a_terms else fring.zero
        B = fring.from_terms(b_terms) if b_terms else fring.zero
        root = RatFunc(F, F._field.new(-B, fring.one)) / RatFunc(
            F, F._field.new(A, fring.one)
        )
        roots.extend([root] * mult)
    return roots, splits
