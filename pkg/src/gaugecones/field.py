"""Exact arithmetic for the rational function field Q(x_1,...,x_r).

The field carries the lex monomial valuation (first declared variable most
significant) with value group Z^r ordered lexicographically, and the family
of compatible orderings given by a sign for each variable.  All arithmetic
is exact; equality of field elements is structural on canonical forms.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.fields import field as _sympy_field


class FieldError(Exception):
    """Base class for errors raised by this module."""


class NegativeValuation(FieldError):
    """Residue requested for an element of negative valuation."""


class NotMonicAfterNormalization(FieldError):
    """Polynomial cannot be made monic (zero leading coefficient)."""


class ExprSyntaxError(FieldError):
    """Parse error; carries the offending position in the source text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownVariable(FieldError):
    """Parse error: identifier is not a declared variable."""


# ---------------------------------------------------------------------------
# Value group
# ---------------------------------------------------------------------------

_INF_MARKER = object()


@functools.total_ordering
class GammaVal:
    """Element of the totally ordered value group, or infinity.

    Finite values are vectors of rationals compared lexicographically with
    coordinate 0 most significant; infinity exceeds every finite value and
    absorbs addition.
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        if coords is _INF_MARKER:
            self.coords = None
        else:
            self.coords = tuple(Fraction(c) for c in coords)

    @classmethod
    def infinity(cls) -> "GammaVal":
        return cls(_INF_MARKER)

    @classmethod
    def zero(cls, r: int) -> "GammaVal":
        return cls([0] * r)

    @property
    def is_inf(self) -> bool:
        return self.coords is None

    def __add__(self, other: "GammaVal") -> "GammaVal":
        if self.is_inf or other.is_inf:
            return GammaVal.infinity()
        return GammaVal([a + b for a, b in zip(self.coords, other.coords, strict=True)])

    def __sub__(self, other: "GammaVal") -> "GammaVal":
        if self.is_inf:
            return GammaVal.infinity()
        if other.is_inf:
            raise ValueError("cannot subtract infinity")
        return GammaVal([a - b for a, b in zip(self.coords, other.coords, strict=True)])

    def __neg__(self) -> "GammaVal":
        if self.is_inf:
            raise ValueError("cannot negate infinity")
        return GammaVal([-a for a in self.coords])

    def scale(self, k) -> "GammaVal":
        if self.is_inf:
            return GammaVal.infinity()
        k = Fraction(k)
        return GammaVal([k * a for a in self.coords])

    def half(self) -> "GammaVal":
        return self.scale(Fraction(1, 2))

    def mod_group(self, modulus: int) -> "GammaVal":
        """Canonical representative with coordinates reduced into [0, modulus)."""
        if self.is_inf:
            raise ValueError("infinity has no coset representative")
        return GammaVal([a % modulus for a in self.coords])

    def __eq__(self, other) -> bool:
        if not isinstance(other, GammaVal):
            return NotImplemented
        return self.coords == other.coords

    def __lt__(self, other: "GammaVal") -> bool:
        if not isinstance(other, GammaVal):
            return NotImplemented
        if self.is_inf:
            return False
        if other.is_inf:
            return True
        return self.coords < other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        if self.is_inf:
            return "GammaVal(INF)"
        return f"GammaVal({', '.join(str(c) for c in self.coords)})"


INF = GammaVal.infinity()


# ---------------------------------------------------------------------------
# Orderings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderingSpec:
    """A compatible ordering of the field, given by a sign for each variable.

    The residue field Q carries its unique ordering; the sign vector lifts it
    through the valuation, so two specs are equal iff their signs are equal.
    """

    eta: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (-1, 1) for s in self.eta):
            raise ValueError("signs must be +1 or -1")

    def sign_of_monomial(self, exponents: Sequence[int]) -> int:
        s = 1
        for eta_i, a_i in zip(self.eta, exponents, strict=True):
            if a_i % 2:
                s *= eta_i
        return s

    def __repr__(self):
        return "OrderingSpec(" + "".join("+" if s > 0 else "-" for s in self.eta) + ")"


def enumerate_orderings(r: int) -> list[OrderingSpec]:
    """All 2^r compatible orderings, lexicographic on sign vectors (-1 first)."""
    if r < 0:
        raise ValueError("r must be >= 0")
    specs = [OrderingSpec(())]
    for _ in range(r):
        specs = [OrderingSpec(s.eta + (e,)) for s in specs for e in (-1, 1)]
    return specs


# ---------------------------------------------------------------------------
# The field and its elements
# ---------------------------------------------------------------------------

def _to_fraction(c) -> Fraction:
    return Fraction(int(QQ.numer(c)), int(QQ.denom(c)))


class FunctionField:
    """The field Q(x_1,...,x_r), r >= 0, with named variables."""

    def __init__(self, varnames: Sequence[str]):
        names = list(varnames)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.varnames = tuple(names)
        self.r = len(names)
        built = _sympy_field(names, QQ)
        self._field = built[0]
        self._ring = self._field.ring
        self.zero = RatFunc(self, self._field.zero)
        self.one = RatFunc(self, self._field.one)

    def var(self, i: int) -> "RatFunc":
        return RatFunc(self, self._field.gens[i])

    def vars(self) -> list["RatFunc"]:
        return [self.var(i) for i in range(self.r)]

    def from_fraction(self, q) -> "RatFunc":
        q = Fraction(q)
        return RatFunc(self, self._field.ground_new(QQ(q.numerator, q.denominator)))

    def monomial(self, exponents: Sequence[int], coeff=1) -> "RatFunc":
        coeff = Fraction(coeff)
        if coeff == 0:
            return self.zero
        exps = [int(e) for e in exponents]
        num = self._ring.from_terms(
            [(tuple(max(e, 0) for e in exps), QQ(coeff.numerator, coeff.denominator))]
        )
        den = self._ring.from_terms([(tuple(max(-e, 0) for e in exps), QQ(1))])
        return RatFunc(self, self._field.new(num, den))

    def parse(self, src: str) -> "RatFunc":
        return _Parser(self, src).parse()

    def __eq__(self, other):
        return isinstance(other, FunctionField) and self.varnames == other.varnames

    def __hash__(self):
        return hash(self.varnames)

    def __repr__(self):
        return f"FunctionField({', '.join(self.varnames) or 'Q'})"


def _lex_min_term(poly):
    """(exponent vector, coefficient) of the lex-minimal monomial of a nonzero poly."""
    return min(poly.terms(), key=lambda t: t[0])


class RatFunc:
    """Element of a FunctionField, stored in canonical reduced form."""

    __slots__ = ("field", "_f")

    def __init__(self, field: FunctionField, frac):
        self.field = field
        self._f = frac

    # -- ring structure ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.field != self.field:
                raise FieldError("elements of different fields")
            return other._f
        if isinstance(other, (int, Fraction)):
            return self.field.from_fraction(other)._f
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        f = self._f
        one = f.field.ring.one
        # polynomial fast path: no gcd cancellation needed when both denoms are 1
        if f.denom == one and o.denom == one:
            return RatFunc(self.field, f.field.raw_new(f.numer + o.numer, one))
        return RatFunc(self.field, f + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        f = self._f
        one = f.field.ring.one
        if f.denom == one and o.denom == one:
            return RatFunc(self.field, f.field.raw_new(f.numer - o.numer, one))
        return RatFunc(self.field, f - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFunc(self.field, o - self._f)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        f = self._f
        one = f.field.ring.one
        if f.denom == one and o.denom == one:
            return RatFunc(self.field, f.field.raw_new(f.numer * o.numer, one))
        return RatFunc(self.field, f * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not o:
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.field, self._f / o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not self._f:
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.field, o / self._f)

    def __neg__(self):
        return RatFunc(self.field, -self._f)

    def __pow__(self, n: int):
        return RatFunc(self.field, self._f ** n)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.from_fraction(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.field == other.field and self._f == other._f

    def __hash__(self):
        return hash((self.field, self._f))

    def __bool__(self):
        return bool(self._f)

    @property
    def is_zero(self) -> bool:
        return not self._f

    def is_constant(self) -> bool:
        return self._f.denom.is_ground and (
            not self._f.numer or self._f.numer.is_ground
        )

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise FieldError("not a constant")
        if not self._f.numer:
            return Fraction(0)
        return _to_fraction(self._f.numer.coeff(1)) / _to_fraction(self._f.denom.coeff(1))

    # -- valuation-theoretic structure -------------------------------------

    def val(self) -> GammaVal:
        """Lex monomial valuation; INF on zero."""
        if not self._f:
            return GammaVal.infinity()
        en, _ = _lex_min_term(self._f.numer)
        ed, _ = _lex_min_term(self._f.denom)
        return GammaVal([a - b for a, b in zip(en, ed)])

    def leading_term(self) -> tuple[tuple[int, ...], Fraction]:
        """Exponent vector and coefficient of the valuation-leading monomial."""
        if not self._f:
            raise FieldError("zero has no leading term")
        en, cn = _lex_min_term(self._f.numer)
        ed, cd = _lex_min_term(self._f.denom)
        return tuple(a - b for a, b in zip(en, ed)), _to_fraction(cn) / _to_fraction(cd)

    def sign_at(self, P: OrderingSpec) -> int:
        """Sign of the element at the compatible ordering P."""
        if len(P.eta) != self.field.r:
            raise FieldError("ordering arity mismatch")
        if not self._f:
            return 0
        exps, coeff = self.leading_term()
        s = 1 if coeff > 0 else -1
        return s * P.sign_of_monomial(exps)

    def residue(self) -> Fraction:
        """Image in the residue field Q; requires nonnegative valuation."""
        v = self.val()
        if v.is_inf:
            return Fraction(0)
        zero = GammaVal.zero(self.field.r)
        if v < zero:
            raise NegativeValuation(f"val = {v}")
        if v > zero:
            return Fraction(0)
        _, coeff = self.leading_term()
        return coeff

    def unit_part_residue(self) -> Fraction:
        """Residue of self * x^(-val(self)); the leading coefficient. Nonzero input."""
        _, coeff = self.leading_term()
        return coeff

    def __repr__(self):
        return f"RatFunc({self._f})"

    def __str__(self):
        return str(self._f)


def val(f: RatFunc) -> GammaVal:
    return f.val()


def sign_at(f: RatFunc, P: OrderingSpec) -> int:
    return f.sign_at(P)


def residue(f: RatFunc) -> Fraction:
    return f.residue()


# ---------------------------------------------------------------------------
# Univariate polynomials over the field
# ---------------------------------------------------------------------------

class PolyX:
    """Polynomial in one variable X with RatFunc coefficients, constant term first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FunctionField, coeffs: Iterable[RatFunc]):
        cs = list(coeffs)
        while cs and cs[-1].is_zero:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        if self.is_zero:
            raise FieldError("zero polynomial has no degree")
        return len(self.coeffs) - 1

    def leading_coeff(self) -> RatFunc:
        return self.coeffs[-1]

    def monic(self) -> "PolyX":
        if self.is_zero:
            raise NotMonicAfterNormalization("zero polynomial")
        lc = self.leading_coeff()
        return PolyX(self.field, [c / lc for c in self.coeffs])

    def __eq__(self, other):
        return (
            isinstance(other, PolyX)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __add__(self, other: "PolyX") -> "PolyX":
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.field.zero
        a = list(self.coeffs) + [z] * (n - len(self.coeffs))
        b = list(other.coeffs) + [z] * (n - len(other.coeffs))
        return PolyX(self.field, [x + y for x, y in zip(a, b)])

    def __sub__(self, other: "PolyX") -> "PolyX":
        return self + PolyX(self.field, [-c for c in other.coeffs])

    def __mul__(self, other: "PolyX") -> "PolyX":
        if self.is_zero or other.is_zero:
            return PolyX(self.field, [])
        z = self.field.zero
        out = [z] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return PolyX(self.field, out)

    def scale(self, c: RatFunc) -> "PolyX":
        return PolyX(self.field, [c * a for a in self.coeffs])

    def divmod(self, other: "PolyX") -> tuple["PolyX", "PolyX"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        z = self.field.zero
        rem = list(self.coeffs)
        d = other.degree
        lc = other.leading_coeff()
        quo = [z] * max(0, len(rem) - d)
        while len(rem) - 1 >= d and rem:
            k = len(rem) - 1 - d
            q = rem[-1] / lc
            quo[k] = q
            for j in range(d + 1):
                rem[k + j] = rem[k + j] - q * other.coeffs[j]
            while rem and rem[-1].is_zero:
                rem.pop()
        return PolyX(self.field, quo), PolyX(self.field, rem)

    def evaluate(self, x: RatFunc) -> RatFunc:
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"PolyX({[str(c) for c in self.coeffs]})"


def newton_root_valuations(p: PolyX) -> list[GammaVal]:
    """Root valuations of a univariate polynomial, by its lower Newton polygon.

    The polynomial is normalized monic first.  Roots over any valued
    extension have valuations equal to the negated slopes of the lower
    convex hull of the points (i, val(c_i)); zero roots contribute INF.
    Returns a multiset (list, ascending) of size deg p.
    """
    if p.is_zero or len(p.coeffs) < 2:
        raise NotMonicAfterNormalization("need a nonzero polynomial of degree >= 1")
    p = p.monic()
    m = 0
    while p.coeffs[m].is_zero:
        m += 1
    out = [GammaVal.infinity()] * m
    pts = [(i, p.coeffs[i].val()) for i in range(m, len(p.coeffs)) if not p.coeffs[i].is_zero]
    # lower convex hull, left to right; y-values live in the ordered group
    hull: list[tuple[int, GammaVal]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            x3, y3 = pt
            # drop the middle point if it lies on or above segment 1-3
            if (y2 - y1).scale(x3 - x2) >= (y3 - y2).scale(x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        mult = x2 - x1
        slope = (y2 - y1).scale(Fraction(1, mult))
        out.extend([-slope] * mult)
    out.sort()
    return out


# ---------------------------------------------------------------------------
# Expression parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([()+\-*/^]))")


class _Parser:
    """Recursive-descent parser for the field expression grammar.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' posint)?
    base   := int | var | '(' expr ')'
    """

    def __init__(self, field: FunctionField, src: str):
        self.field = field
        self.src = src
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(src):
            m = _TOKEN_RE.match(src, pos)
            if m is None or m.end() == pos:
                stripped = src[pos:].lstrip()
                if not stripped:
                    break
                bad = pos + len(src[pos:]) - len(stripped)
                raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", bad)
            if m.group(1) is not None:
                self.tokens.append(("int", m.group(1), m.start(1)))
            elif m.group(2) is not None:
                self.tokens.append(("name", m.group(2), m.start(2)))
            else:
                self.tokens.append(("op", m.group(3), m.start(3)))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.src))

    def _next(self):
        tok = self._peek()
        self.i += 1
        return tok

    def parse(self) -> RatFunc:
        v = self._expr()
        kind, text, pos = self._peek()
        if kind is not None:
            raise ExprSyntaxError(f"unexpected token {text!r}", pos)
        return v

    def _expr(self) -> RatFunc:
        kind, text, _ = self._peek()
        negate = False
        if kind == "op" and text in "+-":
            self._next()
            negate = text == "-"
        v = self._term()
        if negate:
            v = -v
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text in "+-":
                self._next()
                t = self._term()
                v = v + t if text == "+" else v - t
            else:
                return v

    def _term(self) -> RatFunc:
        v = self._factor()
        while True:
            kind, text, pos = self._peek()
            if kind == "op" and text in "*/":
                self._next()
                f = self._factor()
                if text == "/":
                    if f.is_zero:
                        raise ExprSyntaxError("division by zero", pos)
                    v = v / f
                else:
                    v = v * f
            else:
                return v

    def _factor(self) -> RatFunc:
        v = self._base()
        kind, text, _ = self._peek()
        if kind == "op" and text == "^":
            self._next()
            kind, text, pos = self._next()
            if kind != "int":
                raise ExprSyntaxError("exponent must be a nonnegative integer", pos)
            v = v ** int(text)
        return v

    def _base(self) -> RatFunc:
        kind, text, pos = self._next()
        if kind == "int":
            return self.field.from_fraction(int(text))
        if kind == "name":
            try:
                idx = self.field.varnames.index(text)
            except ValueError:
                raise UnknownVariable(f"unknown variable {text!r}") from None
            return self.field.var(idx)
        if kind == "op" and text == "(":
            v = self._expr()
            kind, text, pos = self._next()
            if text != ")":
                raise ExprSyntaxError("expected ')'", pos)
            return v
        raise ExprSyntaxError(f"unexpected token {text!r}", pos)


def parse_element(src: str, varnames: Sequence[str]) -> RatFunc:
    """Parse an expression into a field element over the named variables."""
    return FunctionField(varnames).parse(src)
