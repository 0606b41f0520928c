"""Exact arithmetic: Gaussian rationals and sparse multivariate polynomials.

Everything in here is immutable and hashable where it needs to be.  The
polynomial class is deliberately small: dense linear algebra lives in numpy,
and only the symbolic integrability system needs exact coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Integral):
        return Fraction(int(x))
    raise TypeError(f"cannot coerce {type(x).__name__} to Fraction exactly")


@dataclass(frozen=True)
class GaussianRational:
    """Element of Q(i): re + im*i with exact rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            # only exact when both parts are integral floats
            re, im = Fraction(x.real), Fraction(x.imag)
            return cls(re, im)
        return cls(_as_fraction(x))

    @staticmethod
    def _try(x):
        try:
            return GaussianRational.of(x)
        except TypeError:
            return None

    def __add__(self, other):
        other = GaussianRational._try(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        other = GaussianRational._try(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = GaussianRational._try(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = GaussianRational._try(other)
        if other is None:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.of(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussianRational(other.re / n, -other.im / n)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(self.re) + 1j * complex(self.im)

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


GR_ZERO = GaussianRational()
GR_ONE = GaussianRational(Fraction(1))
GR_I = GaussianRational(Fraction(0), Fraction(1))
GR_HALF = GaussianRational(Fraction(1, 2))


class Poly:
    """Sparse multivariate polynomial over Q(i).

    Terms map exponent tuples (length ``nvars``) to nonzero GaussianRational
    coefficients.  Instances behave as immutable values; arithmetic returns
    new polynomials.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, c in terms.items():
                c = GaussianRational.of(c)
                if c:
                    clean[tuple(exps)] = c
        self.terms = clean

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: GaussianRational.of(c)})

    @classmethod
    def variable(cls, index: int, nvars: int) -> "Poly":
        e = [0] * nvars
        e[index] = 1
        return cls(nvars, {tuple(e): GR_ONE})

    @classmethod
    def generators(cls, nvars: int) -> list["Poly"]:
        return [cls.variable(i, nvars) for i in range(nvars)]

    # ---- ring operations ----------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials over different variable sets")
            return other
        return Poly.constant(self.nvars, other)

    def _try_coerce(self, other):
        try:
            return self._coerce(other)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._try_coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, GR_ZERO) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Poly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._try_coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._try_coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._try_coerce(other)
        if other is None:
            return NotImplemented
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, GR_ZERO) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    terms.pop(e, None)
        return Poly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        return self == self._coerce(other)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # ---- queries -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def coefficient(self, exps) -> GaussianRational:
        return self.terms.get(tuple(exps), GR_ZERO)

    # ---- maps ------------------------------------------------------------

    def subs(self, mapping: dict, nvars_new: int) -> "Poly":
        """Substitute polynomials for variables.

        ``mapping`` sends a variable index to a Poly over the new variable
        set; unmapped variables must not occur.
        """
        out = Poly.zero(nvars_new)
        for exps, c in self.terms.items():
            term = Poly.constant(nvars_new, c)
            for var, power in enumerate(exps):
                if power == 0:
                    continue
                if var not in mapping:
                    raise KeyError(f"variable {var} has no substitution")
                term = term * (mapping[var] ** power)
            out = out + term
        return out

    def evaluate(self, values) -> complex:
        """Numeric evaluation at a complex point (sequence of length nvars)."""
        total = 0j
        for exps, c in self.terms.items():
            m = complex(c)
            for var, power in enumerate(exps):
                if power:
                    m *= values[var] ** power
            total += m
        return total

    def derivative(self, var: int) -> "Poly":
        terms = {}
        for exps, c in self.terms.items():
            p = exps[var]
            if p == 0:
                continue
            e = list(exps)
            e[var] -= 1
            terms[tuple(e)] = c * p
        return Poly(self.nvars, terms)

    # ---- formatting ------------------------------------------------------

    def format(self, names: list[str] | None = None) -> str:
        if not self.terms:
            return "0"
        if names is None:
            names = [f"x{i}" for i in range(self.nvars)]
        pieces = []
        order = sorted(
            self.terms.items(),
            key=lambda t: (
                sum(t[0]) == 0,
                t[1].re < 0 or (t[1].re == 0 and t[1].im < 0),
                tuple(-e for e in t[0]),
            ),
        )
        for exps, c in order:
            factors = []
            for var, power in enumerate(exps):
                if power == 1:
                    factors.append(names[var])
                elif power > 1:
                    factors.append(f"{names[var]}^{power}")
            mono = "*".join(factors)
            if not mono:
                pieces.append(str(c))
            elif c == GR_ONE:
                pieces.append(mono)
            elif c == -GR_ONE:
                pieces.append(f"-{mono}")
            elif c.im:
                pieces.append(f"({c})*{mono}")
            else:
                pieces.append(f"{c.re}*{mono}")
        out = pieces[0]
        for p in pieces[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def __repr__(self):
        return f"Poly({self.format()})"
