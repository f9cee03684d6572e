"""Finite fields, polynomials over them, and rational functions in ``t``.

Elements of ``GF(p^r) = F_p[g]/(modulus)`` are encoded as integers whose
base-``p`` digits are the coefficients of ``1, g, ..., g^(r-1)``.  With this
encoding the prime field is ``range(p)`` and a subfield ``F_q`` built with
the same modulus is ``range(q)``.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import ValidationError


def _is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n ** 0.5) + 1))


class FiniteField:
    """``GF(p^r)`` with log/antilog tables.

    ``modulus`` lists the coefficients (low to high) of a monic irreducible
    polynomial over ``F_p``; ``None`` gives the prime field.
    """

    def __init__(self, p, modulus=None, name="g"):
        if not _is_prime(p):
            raise ValidationError(f"characteristic {p} is not prime")
        if modulus is None:
            modulus = (0, 1)
        modulus = tuple(int(c) % p for c in modulus)
        while len(modulus) > 1 and modulus[-1] == 0:
            modulus = modulus[:-1]
        if len(modulus) < 2 or modulus[-1] != 1:
            raise ValidationError("field modulus must be monic of degree >= 1")
        self.p = p
        self.r = len(modulus) - 1
        self.order = p ** self.r
        self.modulus = modulus
        self.name = name
        if self.r > 1 and not _trial_division_irreducible(p, modulus):
            raise ValidationError(
                "field modulus " + format_fp_poly(modulus, name) + f" is reducible over F_{p}")
        self._build_tables()

    @property
    def q(self):
        return self.order

    def __repr__(self):
        if self.r == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.r}) mod {format_fp_poly(self.modulus, self.name)}"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    # -- encoding -----------------------------------------------------------
    def to_vec(self, a):
        p = self.p
        out = []
        for _ in range(self.r):
            out.append(a % p)
            a //= p
        return out

    def from_vec(self, v):
        a = 0
        for c in reversed(list(v)):
            a = a * self.p + int(c) % self.p
        return a

    def _raw_mul(self, a, b):
        p, r, mod = self.p, self.r, self.modulus
        av, bv = self.to_vec(a), self.to_vec(b)
        prod = [0] * (2 * r - 1)
        for i, x in enumerate(av):
            if x:
                for j, y in enumerate(bv):
                    prod[i + j] += x * y
        for k in range(2 * r - 2, r - 1, -1):
            c = prod[k] % p
            if c:
                for i in range(r):
                    prod[k - r + i] -= c * mod[i]
            prod[k] = 0
        return self.from_vec(x % p for x in prod[:r])

    def _build_tables(self):
        Q = self.order
        if Q == 2:
            self._exp = [1]
            self._log = {1: 0}
            self.primitive = 1
        else:
            for cand in range(2, Q) if self.r == 1 else range(self.p, Q):
                seq = [1]
                x = cand
                while x != 1 and len(seq) < Q:
                    seq.append(x)
                    x = self._raw_mul(x, cand)
                if len(seq) == Q - 1 and x == 1:
                    break
            else:  # pragma: no cover - every finite field has a primitive element
                raise ValidationError("no primitive element found")
            self._exp = seq
            self._log = {v: i for i, v in enumerate(seq)}
            self.primitive = cand
        # reduction matrix g^j -> basis vector, j < 2r - 1
        red = np.zeros((2 * self.r - 1, self.r), dtype=np.int64)
        x = 1
        gen = self.p if self.r > 1 else 1
        for j in range(2 * self.r - 1):
            red[j] = self.to_vec(x)
            x = self.mul(x, gen) if self.r > 1 else x
        self.red_matrix = red
        self._frob_cache = {}

    # -- arithmetic -----------------------------------------------------------
    def add(self, a, b):
        if self.r == 1:
            return (a + b) % self.p
        return self.from_vec(x + y for x, y in zip(self.to_vec(a), self.to_vec(b)))

    def neg(self, a):
        if self.r == 1:
            return (-a) % self.p
        return self.from_vec(-x for x in self.to_vec(a))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self.r == 1:
            return a * b % self.p
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in " + repr(self))
        if self.r == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def pow(self, a, e):
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def scalar(self, n):
        """Image of the integer ``n`` in the prime field."""
        return int(n) % self.p

    def gen(self):
        return self.p if self.r > 1 else 1

    def elements(self):
        return range(self.order)

    def frob_matrix(self, e):
        """F_p-matrix of ``a -> a^(p^e)`` acting on coefficient columns."""
        e %= self.r
        if e not in self._frob_cache:
            m = np.zeros((self.r, self.r), dtype=np.int64)
            power = self.p ** e
            for i in range(self.r):
                m[:, i] = self.to_vec(self.pow(self.pow(self.gen(), i), power))
            self._frob_cache[e] = m
        return self._frob_cache[e]

    def format(self, a):
        if self.r == 1:
            return str(a)
        return format_fp_poly(self.to_vec(a), self.name)


def format_fp_poly(coeffs, var):
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = int(coeffs[i])
        if not c:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            mono = var if i == 1 else f"{var}^{i}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(terms) if terms else "0"


def _trial_division_irreducible(p, coeffs):
    n = len(coeffs) - 1
    F = FiniteField(p)
    f = Poly(F, coeffs)
    for deg in range(1, n // 2 + 1):
        for tail in itertools.product(range(p), repeat=deg):
            if f % Poly(F, tail + (1,)) == 0:
                return False
    return True


class Poly:
    """Dense univariate polynomial over a :class:`FiniteField`, low degree first."""

    __slots__ = ("F", "c")

    def __init__(self, F, coeffs=()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.F = F
        self.c = tuple(c)

    @classmethod
    def const(cls, F, a):
        return cls(F, (a,))

    @classmethod
    def t(cls, F):
        return cls(F, (0, 1))

    @property
    def deg(self):
        return len(self.c) - 1

    def lead(self):
        return self.c[-1] if self.c else 0

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.F, self.F.scalar(other))
        return isinstance(other, Poly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        return Poly.const(self.F, self.F.scalar(other))

    def __add__(self, other):
        other = self._coerce(other)
        F = self.F
        n = max(len(self.c), len(other.c))
        a = self.c + (0,) * (n - len(self.c))
        b = other.c + (0,) * (n - len(other.c))
        return Poly(F, [F.add(x, y) for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.F, [self.F.neg(x) for x in self.c])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        F = self.F
        if not self.c or not other.c:
            return Poly(F)
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    if y:
                        out[i + j] = F.add(out[i + j], F.mul(x, y))
        return Poly(F, out)

    __rmul__ = __mul__

    def __pow__(self, e):
        result = Poly.const(self.F, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        F = self.F
        rem = list(self.c)
        dq = other.deg
        inv_lead = F.inv(other.lead())
        quot = [0] * max(0, len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if c:
                factor = F.mul(c, inv_lead)
                quot[k - dq] = factor
                for i, y in enumerate(other.c):
                    rem[k - dq + i] = F.sub(rem[k - dq + i], F.mul(factor, y))
        return Poly(F, quot), Poly(F, rem[:dq] if dq > 0 else [])

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def monic(self):
        if not self.c:
            return self
        inv = self.F.inv(self.lead())
        return Poly(self.F, [self.F.mul(x, inv) for x in self.c])

    def is_monic(self):
        return bool(self.c) and self.lead() == 1

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a field element or any ring object."""
        if isinstance(x, int):
            acc = 0
            for c in reversed(self.c):
                acc = self.F.add(self.F.mul(acc, x), c)
            return acc
        acc = None
        for c in reversed(self.c):
            acc = c if acc is None else acc * x + c
        return 0 if acc is None else acc

    def derivative(self):
        F = self.F
        return Poly(F, [F.mul(F.scalar(i), c) for i, c in enumerate(self.c)][1:])

    def powmod(self, e, mod):
        result = Poly.const(self.F, 1)
        base = self % mod
        while e:
            if e & 1:
                result = result * base % mod
            base = base * base % mod
            e >>= 1
        return result

    def format(self, var="t"):
        F = self.F
        if not self.c:
            return "0"
        terms = []
        for i in range(len(self.c) - 1, -1, -1):
            c = self.c[i]
            if not c:
                continue
            cs = F.format(c)
            if F.r > 1 and not cs.isdigit():
                cs = f"({cs})"
            if i == 0:
                terms.append(cs)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                terms.append(mono if c == 1 else f"{cs}*{mono}")
        return " + ".join(terms)

    def __str__(self):
        return self.format()

    __repr__ = __str__


def poly_gcd(a, b):
    while b:
        a, b = b, a % b
    return a.monic()


def is_irreducible(f):
    """Ben-Or test over ``F_q``: no factor of degree <= deg/2."""
    if f.deg < 1:
        return False
    if f.deg == 1:
        return True
    F = f.F
    t = Poly.t(F)
    h = t
    for _ in range(f.deg // 2):
        h = h.powmod(F.order, f)
        if poly_gcd(f, h - t).deg > 0:
            return False
    return True


@lru_cache(maxsize=None)
def monic_irreducibles(F, max_deg):
    """All monic irreducibles of degree 1..max_deg, ordered by degree then coefficients."""
    out = []
    for deg in range(1, max_deg + 1):
        for tail in itertools.product(range(F.order), repeat=deg):
            f = Poly(F, tail + (1,))
            if is_irreducible(f):
                out.append(f)
    return tuple(out)


class RatFunc:
    """Element of ``F_q(t)`` in lowest terms with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        F = num.F
        if den is None:
            den = Poly.const(F, 1)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        g = poly_gcd(num, den) if num else den
        num, den = num // g, den // g
        lc = den.lead()
        if lc != 1:
            inv = F.inv(lc)
            num, den = num * Poly.const(F, inv), den * Poly.const(F, inv)
        self.num, self.den = num, den

    @property
    def F(self):
        return self.num.F

    @classmethod
    def const(cls, F, a):
        return cls(Poly.const(F, a))

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        return RatFunc(Poly.const(self.F, self.F.scalar(other)))

    def __add__(self, other):
        o = self._coerce(other)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if not o.num:
            raise ZeroDivisionError("rational function division by zero")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e):
        if e < 0:
            return RatFunc(self.den, self.num) ** (-e) if self.num else 1 / self
        return RatFunc(self.num ** e, self.den ** e)

    def __eq__(self, other):
        if not isinstance(other, (RatFunc, Poly, int)):
            return NotImplemented
        o = self._coerce(other)
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def format(self):
        n = self.num.format()
        if self.den.deg == 0:
            return n
        if self.num.deg > 0 and len([c for c in self.num.c if c]) > 1:
            n = f"({n})"
        return f"{n}/({self.den.format()})"

    def __str__(self):
        return self.format()

    __repr__ = __str__
