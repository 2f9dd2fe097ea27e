"""Exact coefficient rings: rationals, Laurent polynomials, truncated series.

Everything in this package computes over the scalar tower

    Fraction  ->  Laurent  ->  Series       (and QFrac for field steps)

where ``Laurent`` is the ring of Laurent polynomials in a fixed tuple of
invertible variables (usually the single quantum parameter ``q``) with
``Fraction`` coefficients, and ``Series`` is a multivariate power series
truncated in *total* degree of its formal variables, with ``Laurent``
coefficients.  The quantum parameter is a genuine Laurent variable: it is
never truncated, carries negative powers, and its natural derivation is
``q * d/dq``.  ``QFrac`` is the fraction field of a univariate ``Laurent``
ring; it only appears inside linear solves and is demoted back to ``Laurent``
whenever the denominator cancels.

No floating point is used anywhere; all arithmetic is exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

Rational = Fraction

Exponents = tuple[int, ...]


def as_fraction(value: int | Fraction) -> Fraction:
    """Coerce an int (or Fraction) to Fraction, rejecting floats loudly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact scalar, got {type(value).__name__}")


def fraction_to_str(value: Fraction) -> str:
    """Canonical "num/den" form, "num" when the denominator is 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def fraction_from_str(text: str) -> Fraction:
    return Fraction(text)


class Laurent:
    """A Laurent polynomial over Q in a fixed tuple of variables.

    Terms are held in a dict mapping integer exponent tuples to nonzero
    Fractions.  Instances are immutable by convention: no method mutates
    ``terms`` after construction.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, variables: tuple[str, ...], terms: Mapping[Exponents, Fraction]):
        self.vars = variables
        self.terms = {e: c for e, c in terms.items() if c != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, variables: tuple[str, ...]) -> "Laurent":
        return cls(variables, {})

    @classmethod
    def const(cls, variables: tuple[str, ...], value: int | Fraction) -> "Laurent":
        c = as_fraction(value)
        if c == 0:
            return cls(variables, {})
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def gen(cls, variables: tuple[str, ...], name: str, power: int = 1,
            coeff: int | Fraction = 1) -> "Laurent":
        i = variables.index(name)
        exps = tuple(power if j == i else 0 for j in range(len(variables)))
        return cls(variables, {exps: as_fraction(coeff)})

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(x == 0 for x in e) for e in self.terms)

    def constant_value(self) -> Fraction:
        """The constant coefficient (the full value if ``is_constant``)."""
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        return self.constant_value()

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "Laurent") -> None:
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Laurent.const(self.vars, other)
        if not isinstance(other, Laurent):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, Fraction(0)) + c
            if s == 0:
                terms.pop(e, None)
            else:
                terms[e] = s
        return Laurent(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Laurent.const(self.vars, other)
        if not isinstance(other, Laurent):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = as_fraction(other)
            if c == 0:
                return Laurent.zero(self.vars)
            return Laurent(self.vars, {e: k * c for e, k in self.terms.items()})
        if not isinstance(other, Laurent):
            return NotImplemented
        self._check(other)
        terms: dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return Laurent(self.vars, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = as_fraction(other)
            if c == 0:
                raise ZeroDivisionError("division of Laurent by zero scalar")
            return self * (1 / c)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if len(self.terms) == 1:
                ((e, c),) = self.terms.items()
                return Laurent(self.vars, {tuple(n * x for x in e): c ** n})
            raise ValueError("negative power of a non-monomial Laurent polynomial")
        result = Laurent.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Laurent.const(self.vars, other)
        if not isinstance(other, Laurent):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # -- derivations and substitutions --------------------------------------

    def log_deriv(self, name: str) -> "Laurent":
        """The logarithmic derivation q * d/dq in the named variable."""
        i = self.vars.index(name)
        return Laurent(self.vars, {e: c * e[i] for e, c in self.terms.items() if e[i] != 0})

    def deriv(self, name: str) -> "Laurent":
        """The plain derivation d/dq in the named variable."""
        i = self.vars.index(name)
        terms: dict[Exponents, Fraction] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            shifted = tuple(x - 1 if j == i else x for j, x in enumerate(e))
            terms[shifted] = terms.get(shifted, Fraction(0)) + c * e[i]
        return Laurent(self.vars, {e: c for e, c in terms.items() if c != 0})

    def scale_var(self, name: str, factor: int | Fraction) -> "Laurent":
        """Substitute q -> factor * q (factor a nonzero rational)."""
        c0 = as_fraction(factor)
        if c0 == 0:
            raise ValueError("scale factor must be invertible")
        i = self.vars.index(name)
        return Laurent(self.vars, {e: c * c0 ** e[i] for e, c in self.terms.items()})

    def eval_var(self, name: str, value: int | Fraction) -> "Laurent":
        """Substitute a rational value, returning a Laurent in the remaining variables."""
        v = as_fraction(value)
        i = self.vars.index(name)
        rest = self.vars[:i] + self.vars[i + 1:]
        terms: dict[Exponents, Fraction] = {}
        for e, c in self.terms.items():
            if e[i] < 0 and v == 0:
                raise ZeroDivisionError("evaluating a negative power at 0")
            coeff = c * v ** e[i]
            key = e[:i] + e[i + 1:]
            s = terms.get(key, Fraction(0)) + coeff
            if s == 0:
                terms.pop(key, None)
            else:
                terms[key] = s
        return Laurent(rest, terms)

    def compress_var(self, name: str, m: int) -> "Laurent":
        """Substitute q^m -> q.  All exponents of ``name`` must be divisible by m."""
        i = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            if e[i] % m != 0:
                raise ValueError(f"exponent {e[i]} of {name} not divisible by {m}")
            terms[tuple(x // m if j == i else x for j, x in enumerate(e))] = c
        return Laurent(self.vars, terms)

    def rename_vars(self, new: tuple[str, ...]) -> "Laurent":
        if len(new) != len(self.vars):
            raise ValueError("variable count mismatch")
        return Laurent(new, dict(self.terms))

    def promote(self, new: tuple[str, ...]) -> "Laurent":
        """Embed into a larger variable tuple (old variables keep their names)."""
        pos = [new.index(v) for v in self.vars]
        terms = {}
        for e, c in self.terms.items():
            big = [0] * len(new)
            for p, x in zip(pos, e):
                big[p] = x
            terms[tuple(big)] = c
        return Laurent(new, terms)

    # -- inspection ---------------------------------------------------------

    def degree_range(self, name: str) -> tuple[int, int]:
        """(min, max) exponent of the named variable; (0, 0) for the zero polynomial."""
        i = self.vars.index(name)
        if not self.terms:
            return (0, 0)
        exps = [e[i] for e in self.terms]
        return (min(exps), max(exps))

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        return sorted(self.terms.items())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = [fraction_to_str(c)] if (c != 1 or all(x == 0 for x in e)) else []
            for name, x in zip(self.vars, e):
                if x == 1:
                    factors.append(name)
                elif x != 0:
                    factors.append(f"{name}^{x}")
            parts.append("*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


QVARS = ("q",)


def qlaurent(pairs: Iterable[tuple[int, int | Fraction]]) -> Laurent:
    """Convenience constructor for the univariate quantum ring Q[q, q^-1]."""
    return Laurent(QVARS, {(p,): as_fraction(c) for p, c in pairs})


# ---------------------------------------------------------------------------
# Univariate fraction field
# ---------------------------------------------------------------------------


def _poly_divmod(a: Laurent, b: Laurent) -> tuple[Laurent, Laurent]:
    """Division with remainder of univariate polynomials (exponents >= 0)."""
    (name,) = a.vars
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    q = Laurent.zero(a.vars)
    r = a
    db = b.degree_range(name)[1]
    lead_b = b.terms[(db,)]
    while not r.is_zero():
        dr = r.degree_range(name)[1]
        if dr < db:
            break
        c = r.terms[(dr,)] / lead_b
        mono = Laurent(a.vars, {(dr - db,): c})
        q = q + mono
        r = r - mono * b
    return q, r


def _poly_gcd(a: Laurent, b: Laurent) -> Laurent:
    """Monic gcd of univariate polynomials with nonnegative exponents."""
    (name,) = a.vars
    while not b.is_zero():
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if a.is_zero():
        return a
    lead = a.terms[(a.degree_range(name)[1],)]
    return a / lead


class QFrac:
    """An element of the fraction field of a univariate Laurent ring.

    Normal form: the denominator is a monic polynomial with nonzero constant
    term (monomial content is pushed into the Laurent numerator), and the
    numerator's polynomial part is coprime to it.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Laurent, den: Laurent):
        if len(num.vars) > 1:
            raise ValueError("QFrac requires a univariate Laurent ring")
        if den.is_zero():
            raise ZeroDivisionError("QFrac with zero denominator")
        if len(num.vars) == 0:
            self.num = num / den.constant_value()
            self.den = Laurent.const((), 1)
            return
        name = num.vars[0]
        # Push the denominator's monomial content q^k and leading unit into num.
        lo = den.degree_range(name)[0]
        if lo != 0:
            shift = Laurent(den.vars, {(-lo,): Fraction(1)})
            den = den * shift
            num = num * shift
        hi = den.degree_range(name)[1]
        lead = den.terms[(hi,)]
        if lead != 1:
            den = den / lead
            num = num / lead
        if not den.is_constant() and not num.is_zero():
            nlo = num.degree_range(name)[0]
            shift = Laurent(num.vars, {(-nlo,): Fraction(1)})
            npoly = num * shift
            g = _poly_gcd(npoly, den)
            if g.degree_range(name)[1] > 0:
                npoly, _ = _poly_divmod(npoly, g)
                den, _ = _poly_divmod(den, g)
                num = npoly * Laurent(num.vars, {(nlo,): Fraction(1)})
        self.num = num
        self.den = den

    @classmethod
    def from_laurent(cls, value: Laurent) -> "QFrac":
        return cls(value, Laurent.const(value.vars, 1))

    @classmethod
    def const(cls, variables: tuple[str, ...], value: int | Fraction) -> "QFrac":
        return cls(Laurent.const(variables, value), Laurent.const(variables, 1))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def try_laurent(self) -> Laurent | None:
        if self.den.is_constant():
            return self.num / self.den.constant_value()
        return None

    def as_laurent(self) -> Laurent:
        value = self.try_laurent()
        if value is None:
            raise ValueError(f"denominator does not cancel: {self}")
        return value

    @staticmethod
    def _coerce(value, variables) -> "QFrac":
        if isinstance(value, QFrac):
            return value
        if isinstance(value, Laurent):
            return QFrac.from_laurent(value)
        if isinstance(value, (int, Fraction)):
            return QFrac.const(variables, value)
        return None

    def __add__(self, other):
        o = self._coerce(other, self.num.vars)
        if o is None:
            return NotImplemented
        return QFrac(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return QFrac(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other, self.num.vars)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other, self.num.vars)
        if o is None:
            return NotImplemented
        return QFrac(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other, self.num.vars)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero QFrac")
        return QFrac(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other, self.num.vars)
        return o / self

    def inverse(self) -> "QFrac":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return QFrac(self.den, self.num)

    def __eq__(self, other):
        o = self._coerce(other, self.num.vars)
        if o is None:
            return NotImplemented
        return (self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den.is_constant() and self.den.constant_value() == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Truncated multivariate power series
# ---------------------------------------------------------------------------


class Series:
    """A power series in formal variables, truncated in total degree.

    Coefficients are scalars of any one ring in the tower (usually Laurent).
    A term whose exponents sum to more than ``order`` is discarded by every
    operation, so instances represent elements of R[[x]] / (x)^{order+1}.
    """

    __slots__ = ("vars", "order", "terms")

    def __init__(self, variables: tuple[str, ...], order: int,
                 terms: Mapping[Exponents, object]):
        self.vars = variables
        self.order = order
        kept = {}
        for e, c in terms.items():
            if sum(e) > order:
                continue
            if _scalar_is_zero(c):
                continue
            kept[e] = c
        self.terms = kept

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, variables: tuple[str, ...], order: int) -> "Series":
        return cls(variables, order, {})

    @classmethod
    def const(cls, variables: tuple[str, ...], order: int, value) -> "Series":
        return cls(variables, order, {(0,) * len(variables): value})

    @classmethod
    def gen(cls, variables: tuple[str, ...], order: int, name: str, one) -> "Series":
        i = variables.index(name)
        exps = tuple(1 if j == i else 0 for j in range(len(variables)))
        return cls(variables, order, {exps: one})

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        """The coefficient at exponent 0 (a scalar of the coefficient ring)."""
        key = (0,) * len(self.vars)
        if key in self.terms:
            return self.terms[key]
        return None  # caller supplies its own zero scalar

    def _check(self, other: "Series") -> None:
        if self.vars != other.vars or self.order != other.order:
            raise ValueError("series ring mismatch")

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            if e in terms:
                s = terms[e] + c
                if _scalar_is_zero(s):
                    del terms[e]
                else:
                    terms[e] = s
            else:
                terms[e] = c
        return Series(self.vars, self.order, terms)

    def __neg__(self):
        return Series(self.vars, self.order, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Laurent, QFrac)):
            return self.scale(other)
        if not isinstance(other, Series):
            return NotImplemented
        self._check(other)
        order = self.order
        terms: dict[Exponents, object] = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) > order:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                if e in terms:
                    terms[e] = terms[e] + prod
                else:
                    terms[e] = prod
        return Series(self.vars, order, terms)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Laurent, QFrac)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = as_fraction(other)
            return self.scale(1 / c)
        return NotImplemented

    def scale(self, scalar) -> "Series":
        if isinstance(scalar, (int, Fraction)) and scalar == 0:
            return Series.zero(self.vars, self.order)
        return Series(self.vars, self.order,
                      {e: c * scalar for e, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (self.vars == other.vars and self.order == other.order
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.vars, self.order, frozenset(self.terms.items())))

    # -- calculus ------------------------------------------------------------

    def deriv(self, name: str) -> "Series":
        """Partial derivative in a formal series variable."""
        i = self.vars.index(name)
        terms: dict[Exponents, object] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            shifted = tuple(x - 1 if j == i else x for j, x in enumerate(e))
            terms[shifted] = c * e[i]
        return Series(self.vars, self.order, terms)

    def integrate(self, name: str) -> "Series":
        """Antiderivative in a formal variable, vanishing at 0.

        Raises if a term would land beyond the truncation order, since the
        information content would silently be wrong otherwise.
        """
        i = self.vars.index(name)
        terms: dict[Exponents, object] = {}
        for e, c in self.terms.items():
            if sum(e) + 1 > self.order:
                raise ValueError("integration exceeds truncation order")
            lifted = tuple(x + 1 if j == i else x for j, x in enumerate(e))
            terms[lifted] = c * Fraction(1, e[i] + 1)
        return Series(self.vars, self.order, terms)

    def map_coeffs(self, fn: Callable) -> "Series":
        """Apply a coefficient-ring map (e.g. the q-derivation) termwise."""
        return Series(self.vars, self.order, {e: fn(c) for e, c in self.terms.items()})

    # -- structure -----------------------------------------------------------

    def coeff(self, exps: Exponents):
        return self.terms.get(tuple(exps))

    def coeff_of_var(self, name: str, k: int) -> "Series":
        """The coefficient of name^k, as a series with that exponent zeroed."""
        i = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            if e[i] == k:
                terms[tuple(0 if j == i else x for j, x in enumerate(e))] = c
        return Series(self.vars, self.order, terms)

    def times_var(self, name: str, k: int) -> "Series":
        i = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            lifted = tuple(x + k if j == i else x for j, x in enumerate(e))
            if sum(lifted) <= self.order:
                terms[lifted] = c
        return Series(self.vars, self.order, terms)

    def max_var_degree(self, name: str) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=0)

    def restrict_zero(self, names: Iterable[str]) -> "Series":
        """Set the named formal variables to 0."""
        idx = [self.vars.index(n) for n in names]
        terms = {e: c for e, c in self.terms.items() if all(e[i] == 0 for i in idx)}
        return Series(self.vars, self.order, terms)

    def promote(self, new_vars: tuple[str, ...], order: int) -> "Series":
        """Embed into a larger formal-variable tuple and/or truncation order."""
        pos = [new_vars.index(v) for v in self.vars]
        terms = {}
        for e, c in self.terms.items():
            big = [0] * len(new_vars)
            for p, x in zip(pos, e):
                big[p] = x
            terms[tuple(big)] = c
        return Series(new_vars, order, terms)

    def constant_slice(self):
        """The scalar at exponent 0, or None when absent."""
        return self.terms.get((0,) * len(self.vars))

    def sorted_terms(self) -> list[tuple[Exponents, object]]:
        return sorted(self.terms.items())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"{name}^{x}" if x > 1 else name
                            for name, x in zip(self.vars, e) if x != 0)
            cs = str(c)
            if "+" in cs or "-" in cs[1:]:
                cs = f"({cs})"
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)

    __repr__ = __str__


def _scalar_is_zero(value) -> bool:
    if isinstance(value, (int, Fraction)):
        return value == 0
    return value.is_zero()


# ---------------------------------------------------------------------------
# Ring descriptors
# ---------------------------------------------------------------------------


class SeriesRing:
    """Factory for Series elements over a fixed (vars, order, Laurent vars)."""

    __slots__ = ("vars", "order", "qvars")

    def __init__(self, variables: tuple[str, ...], order: int, qvars: tuple[str, ...]):
        self.vars = variables
        self.order = order
        self.qvars = qvars

    @property
    def zero(self) -> Series:
        return Series.zero(self.vars, self.order)

    @property
    def one(self) -> Series:
        return Series.const(self.vars, self.order, Laurent.const(self.qvars, 1))

    def const(self, value: int | Fraction) -> Series:
        return Series.const(self.vars, self.order, Laurent.const(self.qvars, value))

    def laurent(self, value: Laurent) -> Series:
        return Series.const(self.vars, self.order, value)

    def gen(self, name: str) -> Series:
        return Series.gen(self.vars, self.order, name, Laurent.const(self.qvars, 1))

    def qgen(self, name: str, power: int = 1) -> Series:
        return Series.const(self.vars, self.order, Laurent.gen(self.qvars, name, power))

    def __eq__(self, other):
        return (isinstance(other, SeriesRing) and self.vars == other.vars
                and self.order == other.order and self.qvars == other.qvars)

    def __repr__(self):
        return f"SeriesRing(vars={self.vars}, order={self.order}, qvars={self.qvars})"
