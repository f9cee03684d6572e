"""The local field ``L_v = k((u))`` at a finite place ``v = (pi(t))`` of ``F_q(t)``.

Laurent series follow an absolute-precision model: a value is known modulo
``u^prec``.  ``prec = math.inf`` marks an exact value with finite support
(polynomials in ``u``, constants, exact zero).  Every operation propagates
precision explicitly; results never claim more digits than their inputs
justify.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FieldMismatch, ValidationError
from .gf import FiniteField, Poly, RatFunc, format_fp_poly, is_irreducible

INF = math.inf
DEFAULT_PREC = 64


def FqField(p, m=1, modulus=None):
    """The coefficient field ``F_q``, ``q = p^m``; ``modulus`` is required iff ``m > 1``."""
    if m == 1:
        if modulus is not None and len(modulus) != 2:
            raise ValidationError("a modulus for m = 1 must be linear")
        return FiniteField(p)
    if modulus is None:
        raise ValidationError(f"F_{p}^{m} needs an explicit degree-{m} modulus")
    if len(modulus) - 1 != m:
        raise ValidationError(f"modulus has degree {len(modulus) - 1}, expected {m}")
    return FiniteField(p, modulus)


def _first_irreducible_fp(p, degree):
    import itertools

    Fp = FiniteField(p)
    for tail in itertools.product(range(p), repeat=degree):
        f = Poly(Fp, tail + (1,))
        if is_irreducible(f):
            return f.c
    raise ValidationError(f"no irreducible of degree {degree} over F_{p}")  # pragma: no cover


@dataclass(frozen=True)
class Place:
    """A finite place ``(pi)`` of ``F_q(t)`` with its residue field ``k = F_q[t]/(pi)``.

    ``base_to_k[c]`` embeds ``c`` in ``F_q`` into ``k``; ``t0`` is the residue
    class of ``t``.
    """

    base: FiniteField
    pi: Poly
    residue_field: FiniteField
    base_to_k: tuple
    t0: int
    e_ram: int = 1

    @property
    def f_res(self):
        return self.pi.deg

    @classmethod
    def from_poly(cls, base, pi):
        if pi.deg < 1 or not pi.is_monic():
            raise ValidationError(f"place polynomial {pi} must be monic of positive degree")
        if not is_irreducible(pi):
            raise ValidationError(f"place polynomial {pi} is reducible over F_{base.order}")
        f = pi.deg
        p, m = base.p, base.r
        if f == 1:
            k = base
            embed = tuple(range(base.order))
            t0 = base.neg(pi.c[0])
        elif m == 1:
            k = FiniteField(p, pi.c)
            embed = tuple(range(p))
            t0 = k.gen()
        else:
            k = FiniteField(p, _first_irreducible_fp(p, m * f))
            g_img = next(a for a in k.elements() if _eval_fp(k, base.modulus, a) == 0)
            embed = tuple(_eval_fp(k, base.to_vec(c), g_img) for c in range(base.order))
            t0 = next(a for a in k.elements()
                      if _eval_in(k, [embed[c] for c in pi.c], a) == 0)
        return cls(base, pi, k, embed, t0)


def _eval_fp(k, coeffs, x):
    acc = 0
    for c in reversed(list(coeffs)):
        acc = k.add(k.mul(acc, x), k.scalar(c))
    return acc


def _eval_in(k, coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = k.add(k.mul(acc, x), c)
    return acc


class LocalField:
    """``L_v`` for a place of ``F_q(t)`` at working precision ``prec``.

    ``prec`` is the default precision of inexact results (inversion of exact
    values, embedding of ``t``) and the storage cap applied by Frobenius
    dilation.
    """

    def __init__(self, place: Place, prec=DEFAULT_PREC):
        if prec < 1:
            raise ValueError("precision must be positive")
        self.place = place
        self.prec = int(prec)
        self.k = place.residue_field
        self.p = self.k.p
        self.r = self.k.r
        self.q = place.base.order
        self._m = place.base.r
        self._T = None

    def __eq__(self, other):
        return (isinstance(other, LocalField) and self.place == other.place
                and self.prec == other.prec)

    def __hash__(self):
        return hash((self.place, self.prec))

    def __repr__(self):
        return f"LocalField(q={self.q}, pi={self.place.pi}, prec={self.prec})"

    # -- constructors -------------------------------------------------------
    def zero(self, prec=INF):
        return LaurentSeries(self, None, np.zeros((0, self.r), dtype=np.int64), prec)

    def const(self, a, prec=INF):
        """Constant from a residue-field element ``a`` (encoded int)."""
        arr = np.array([self.k.to_vec(a)], dtype=np.int64)
        return _make(self, 0, arr, prec)

    def base_const(self, c, prec=INF):
        """Constant from an element of ``F_q``."""
        return self.const(self.place.base_to_k[c], prec)

    def one(self):
        return self.const(1)

    def u(self, n=1):
        arr = np.zeros((1, self.r), dtype=np.int64)
        arr[0, 0] = 1
        return LaurentSeries(self, n, arr, INF)

    def from_digits(self, val, digits, prec=INF):
        """Series ``sum digits[i] u^(val+i)`` with digits encoded residue-field ints."""
        arr = np.array([self.k.to_vec(a) for a in digits], dtype=np.int64).reshape(-1, self.r)
        return _make(self, val, arr, prec)

    # -- embedding of F_q[t] ------------------------------------------------
    def embed_t(self, prec=None):
        """``T(u)`` with ``pi(T(u)) = u`` modulo ``u^prec`` (Newton iteration)."""
        if prec is None and self._T is not None:
            return self._T
        T = embed_t(self.place, self, prec or self.prec)
        if prec is None:
            self._T = T
        return T

    def embed_poly(self, f: Poly):
        """Image of ``f`` in ``F_q[t]`` under ``t -> T(u)``."""
        T = self.embed_t()
        acc = self.zero()
        for c in reversed(f.c):
            acc = acc * T + self.base_const(c)
        return acc

    def embed(self, x):
        """Image of a polynomial or rational function in ``t``."""
        if isinstance(x, RatFunc):
            num = self.embed_poly(x.num)
            if x.den.deg == 0:
                return num * self.base_const(x.F.inv(x.den.lead()))
            return num / self.embed_poly(x.den)
        if isinstance(x, Poly):
            return self.embed_poly(x)
        if isinstance(x, int):
            return self.base_const(self.place.base.scalar(x))
        if isinstance(x, LaurentSeries):
            return x
        raise TypeError(f"cannot embed {type(x).__name__}")

    # -- low level array helpers -----------------------------------------------
    def _mul_arrays(self, A, B, length=None):
        if length is not None:
            A, B = A[:length], B[:length]
        p = self.p
        if self.r == 1:
            out = np.convolve(A[:, 0], B[:, 0])
            if length is not None:
                out = out[:length]
            return (out % p).reshape(-1, 1)
        r = self.r
        n = A.shape[0] + B.shape[0] - 1
        acc = np.zeros((n, 2 * r - 1), dtype=np.int64)
        for i in range(r):
            if not A[:, i].any():
                continue
            for j in range(r):
                acc[:, i + j] += np.convolve(A[:, i], B[:, j])
        acc %= p
        out = (acc @ self.k.red_matrix) % p
        if length is not None:
            out = out[:length]
        return out

    def _frob_rows(self, A, n):
        if self.r == 1:
            return A
        F = self.k.frob_matrix(self._m * n)
        return (A @ F.T) % self.p


def _make(K, val, arr, prec):
    """Normalize: drop digits at or beyond ``prec``, strip zero rows at both ends."""
    if arr.shape[0] and prec != INF:
        keep = prec - val
        if keep <= 0:
            arr = arr[:0]
        elif keep < arr.shape[0]:
            arr = arr[:keep]
    if arr.shape[0]:
        nz = np.flatnonzero(arr.any(axis=1))
    else:
        nz = ()
    if len(nz) == 0:
        return LaurentSeries(K, None, np.zeros((0, K.r), dtype=np.int64), prec)
    first, last = nz[0], nz[-1]
    arr = arr[first:last + 1]
    return LaurentSeries(K, int(val + first), arr, prec)


def _cap_exact(K, val, arr):
    """Storage cap for exact products: keep at least ``K.prec`` digits."""
    limit = max(K.prec, val + K.prec)
    if val + arr.shape[0] > limit:
        return _make(K, val, arr, limit)
    return _make(K, val, arr, INF)


class LaurentSeries:
    """Immutable element of ``k((u))`` known modulo ``u^prec``.

    ``val`` is ``None`` for (approximate or exact) zero; ``coeffs[i]`` holds
    the F_p-digit vector of the coefficient of ``u^(val+i)``.
    """

    __slots__ = ("K", "val", "coeffs", "prec")

    def __init__(self, K, val, coeffs, prec):
        coeffs.flags.writeable = False
        self.K = K
        self.val = val
        self.coeffs = coeffs
        self.prec = prec

    # -- predicates -----------------------------------------------------------
    def is_zero(self):
        return self.val is None

    def is_exact(self):
        return self.prec == INF

    def valuation(self):
        """Valuation, or the known lower bound ``prec`` for a zero."""
        return self.prec if self.val is None else self.val

    def relative_precision(self):
        if self.val is None:
            return 0
        return self.prec - self.val

    def leading(self):
        """Leading coefficient as a residue-field element."""
        if self.val is None:
            raise ZeroDivisionError("leading coefficient of an approximate zero")
        return self.K.k.from_vec(self.coeffs[0])

    def coefficient(self, n):
        if self.val is None or n < self.val or n - self.val >= self.coeffs.shape[0]:
            if n >= self.prec:
                raise ValueError(f"coefficient of u^{n} unknown at precision {self.prec}")
            return 0
        return self.K.k.from_vec(self.coeffs[n - self.val])

    def digits(self, lo, hi):
        """Residue-field coefficients of ``u^lo .. u^(hi-1)``."""
        return tuple(self.coefficient(n) for n in range(lo, hi))

    def _check(self, other):
        if isinstance(other, LaurentSeries):
            if other.K is not self.K and other.K != self.K:
                raise FieldMismatch("series over different local fields")
            return other
        if isinstance(other, int):
            return self.K.base_const(self.K.place.base.scalar(other))
        return self.K.embed(other)

    # -- ring operations --------------------------------------------------------
    def __add__(self, other):
        other = self._check(other)
        K = self.K
        prec = min(self.prec, other.prec)
        if self.val is None:
            return _make(K, other.val, other.coeffs, prec) if other.val is not None else K.zero(prec)
        if other.val is None:
            return _make(K, self.val, self.coeffs, prec)
        lo = min(self.val, other.val)
        hi = max(self.val + self.coeffs.shape[0], other.val + other.coeffs.shape[0])
        if prec != INF:
            hi = min(hi, prec)
        if hi <= lo:
            return K.zero(prec)
        out = np.zeros((hi - lo, K.r), dtype=np.int64)
        for s in (self, other):
            a = s.val - lo
            n = min(s.coeffs.shape[0], hi - s.val)
            if n > 0:
                out[a:a + n] += s.coeffs[:n]
        out %= K.p
        return _make(K, lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.val is None:
            return self
        return LaurentSeries(self.K, self.val, (-self.coeffs) % self.K.p, self.prec)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        K = self.K
        a, b = self, other
        if a.val is None and a.prec == INF or b.val is None and b.prec == INF:
            return K.zero()
        if a.val is None or b.val is None:
            if a.val is None and b.val is None:
                return K.zero(a.prec + b.prec)
            z, nz = (a, b) if a.val is None else (b, a)
            return K.zero(z.prec + nz.val)
        val = a.val + b.val
        prec = min(a.prec + b.val, b.prec + a.val)
        if prec == INF:
            return _cap_exact(K, val, K._mul_arrays(a.coeffs, b.coeffs))
        length = prec - val
        return _make(K, val, K._mul_arrays(a.coeffs, b.coeffs, length), prec)

    __rmul__ = __mul__

    def shift(self, n):
        """Multiply by ``u^n`` (exact)."""
        if self.val is None:
            return self.K.zero(self.prec + n)
        return LaurentSeries(self.K, self.val + n, self.coeffs, self.prec + n)

    def scale(self, a):
        """Multiply by a residue-field element ``a``."""
        return self * self.K.const(a)

    def inverse(self):
        if self.val is None:
            raise ZeroDivisionError("inversion of an (approximate) zero series")
        K = self.K
        rel = K.prec if self.prec == INF else self.prec - self.val
        if self.prec == INF and self.coeffs.shape[0] == 1:
            lead = K.k.inv(self.leading())
            return LaurentSeries(K, -self.val, np.array([K.k.to_vec(lead)], dtype=np.int64), INF)
        w = self.coeffs[:rel]
        b = np.array([K.k.to_vec(K.k.inv(self.leading()))], dtype=np.int64)
        n = 1
        two = np.zeros((1, K.r), dtype=np.int64)
        two[0, 0] = 2 % K.p
        while n < rel:
            n = min(2 * n, rel)
            e = K._mul_arrays(w, b, n)
            e = (-e) % K.p
            if e.shape[0] < 1:
                e = np.zeros((1, K.r), dtype=np.int64)
            e[0] = (e[0] + two[0]) % K.p
            b = K._mul_arrays(b, e, n)
        return _make(K, -self.val, b, -self.val + rel)

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.K.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def frobq(self, n=1):
        """``a^(q^n)``: coefficientwise ``q^n``-power with exponent dilation."""
        K = self.K
        Q = K.q ** n
        if self.val is None:
            if self.prec == INF:
                return self
            return K.zero(min(Q * self.prec, max(K.prec, self.prec)))
        rel = K.prec if self.prec == INF else self.prec - self.val
        limit = max(K.prec, Q * self.val + rel)
        top = Q * (self.val + self.coeffs.shape[0] - 1)
        if self.prec == INF and top < limit:
            new_prec = INF
        else:
            new_prec = min(Q * self.prec, limit)
        if new_prec == INF:
            keep = self.coeffs.shape[0]
        else:
            keep = min(self.coeffs.shape[0], -(-(new_prec - Q * self.val) // Q))
        src = K._frob_rows(self.coeffs[:keep], n)
        out = np.zeros(((keep - 1) * Q + 1, K.r), dtype=np.int64)
        out[::Q] = src
        return _make(K, Q * self.val, out, new_prec)

    def truncate(self, prec):
        """Forget digits at or beyond ``u^prec``."""
        prec = min(prec, self.prec)
        if self.val is None:
            return self.K.zero(prec)
        return _make(self.K, self.val, self.coeffs, prec)

    def __eq__(self, other):
        if isinstance(other, (LaurentSeries, int, Poly, RatFunc)):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def key(self, lo, hi):
        """Hashable digits on ``[lo, hi)``; identifies a class modulo ``u^hi``."""
        return self.digits(lo, hi)

    def __str__(self):
        return format_series(self)

    def __repr__(self):
        return f"LaurentSeries({format_series(self)})"


def format_series(x: LaurentSeries, var="u"):
    K = x.K
    terms = []
    if x.val is not None:
        for i, row in enumerate(x.coeffs):
            if not row.any():
                continue
            e = x.val + i
            if K.r == 1:
                cs = str(int(row[0]))
            else:
                cs = format_fp_poly(row, K.k.name)
                if "+" in cs:
                    cs = f"({cs})"
            if e == 0:
                terms.append(cs)
            else:
                mono = var if e == 1 else f"{var}^{e}"
                terms.append(mono if cs == "1" else f"{cs}*{mono}")
    if x.prec != INF:
        terms.append(f"O({var}^{x.prec})")
    return " + ".join(terms) if terms else "0"


def embed_t(place: Place, K: LocalField, prec):
    """Solve ``pi(T) = u`` in ``k[[u]]`` with ``T(0) = t mod pi`` by Newton iteration."""
    if prec < 1:
        raise ValueError("prec must be >= 1")
    pi = place.pi
    if pi.deg == 1:
        T = K.u() + K.const(place.t0)
        return T if prec == INF else T
    coeffs = [K.const(place.base_to_k[c]) for c in pi.c]
    dcoeffs = [K.const(place.base_to_k[place.base.mul(place.base.scalar(i), c)])
               for i, c in enumerate(pi.c)][1:]

    def horner(cs, x):
        acc = K.zero()
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    T = K.const(place.t0, prec)
    u = K.u()
    for _ in range(prec.bit_length() + 2):
        step = (horner(coeffs, T) - u) / horner(dcoeffs, T)
        T_new = (T - step).truncate(prec)
        if (T_new - T).truncate(prec).is_zero() and step.valuation() >= prec:
            T = T_new
            break
        T = T_new
    return T.truncate(prec)
