"""Matrix twisted polynomials ``M_d(L_v{tau})`` and truncated twisted series.

Matrices are tuples of row tuples of :class:`LaurentSeries`; points of
``G_a^d`` are tuples of series.  Multiplication obeys ``tau c = c^q tau``:
``(A tau^i)(B tau^j) = A frobq^i(B) tau^(i+j)``.
"""
from __future__ import annotations

from .errors import NonConvergent, NonInvertibleConstantTerm, PrecisionExhausted
from .fields import INF, LocalField


# -- dense matrices over L_v ----------------------------------------------------

def mat_zero(K, d):
    z = K.zero()
    return tuple((z,) * d for _ in range(d))


def mat_identity(K, d):
    return mat_scalar(K.one(), d)


def mat_scalar(c, d):
    z = c.K.zero()
    return tuple(tuple(c if i == j else z for j in range(d)) for i in range(d))


def mat_add(A, B):
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A, B):
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_neg(A):
    return tuple(tuple(-a for a in row) for row in A)


def mat_mul(A, B):
    d, m = len(A), len(B[0])
    out = []
    for i in range(d):
        row = []
        for j in range(m):
            acc = None
            for l in range(len(B)):
                a, b = A[i][l], B[l][j]
                if (a.val is None and a.prec == INF) or (b.val is None and b.prec == INF):
                    continue
                term = a * b
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else A[0][0].K.zero())
        out.append(tuple(row))
    return tuple(out)


def mat_scale(c, A):
    return tuple(tuple(c * a for a in row) for row in A)


def mat_frob(A, n=1):
    if n == 0:
        return A
    return tuple(tuple(a.frobq(n) for a in row) for row in A)


def mat_vec(A, x):
    return tuple(sum_series([a * xi for a, xi in zip(row, x)], x[0].K) for row in A)


def sum_series(terms, K):
    acc = K.zero()
    for t in terms:
        acc = acc + t
    return acc


def mat_is_zero(A):
    return all(a.is_zero() for row in A for a in row)


def mat_is_exact_zero(A):
    return all(a.val is None and a.prec == INF for row in A for a in row)


def mat_equal(A, B):
    return mat_is_zero(mat_sub(A, B))


def mat_valuation(A):
    """Minimum entry valuation (lower bounds for zero entries)."""
    return min(a.valuation() for row in A for a in row)


def mat_pow(A, e):
    d = len(A)
    result = mat_identity(A[0][0].K, d)
    for _ in range(e):
        result = mat_mul(result, A)
    return result


def mat_inverse(A):
    """Gauss-Jordan elimination pivoting on the entry of least valuation."""
    d = len(A)
    K = A[0][0].K
    M = [list(row) + list(erow) for row, erow in zip(A, mat_identity(K, d))]
    for col in range(d):
        candidates = [r for r in range(col, d) if not M[r][col].is_zero()]
        if not candidates:
            raise ZeroDivisionError("singular matrix (to working precision)")
        piv = min(candidates, key=lambda r: M[r][col].val)
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        M[col] = [inv * x for x in M[col]]
        for r in range(d):
            if r != col and not M[r][col].is_zero():
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return tuple(tuple(row[d:]) for row in M)


def mat_format(A):
    return "[" + ", ".join("[" + ", ".join(str(a) for a in row) + "]" for row in A) + "]"


# -- twisted polynomials and series ---------------------------------------------

class SkewPoly:
    """``sum_n coeffs[n] tau^n`` with ``d x d`` matrix coefficients."""

    n_trunc = None

    def __init__(self, K: LocalField, d, coeffs):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and mat_is_exact_zero(coeffs[-1]):
            coeffs.pop()
        if not coeffs:
            coeffs = [mat_zero(K, d)]
        self.K = K
        self.d = d
        self.coeffs = tuple(coeffs)

    @classmethod
    def identity(cls, K, d):
        return cls(K, d, [mat_identity(K, d)])

    @classmethod
    def scalar(cls, c, d):
        return cls(c.K, d, [mat_scalar(c, d)])

    @classmethod
    def tau(cls, K, d, n=1):
        return cls(K, d, [mat_zero(K, d)] * n + [mat_identity(K, d)])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def coefficient(self, n):
        if n < len(self.coeffs):
            return self.coeffs[n]
        return mat_zero(self.K, self.d)

    @property
    def D(self):
        """The derivative (``tau^0`` coefficient)."""
        return self.coeffs[0]

    def _like(self, coeffs, other=None):
        return SkewPoly(self.K, self.d, coeffs)

    def _check(self, other):
        if other.d != self.d:
            raise ValueError(f"dimension mismatch: {self.d} vs {other.d}")
        return other

    def __add__(self, other):
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        out = _sum_lists(self, other, n, mat_add)
        return _combine(self, other, out)

    def __sub__(self, other):
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        out = _sum_lists(self, other, n, mat_sub)
        return _combine(self, other, out)

    def __neg__(self):
        return self._like([mat_neg(c) for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, SkewPoly):
            return self._like([mat_scale(other, c) for c in self.coeffs])
        self._check(other)
        trunc = _trunc_of(self, other)
        top = len(self.coeffs) + len(other.coeffs) - 2
        if trunc is not None:
            top = min(top, trunc)
        out = []
        for n in range(top + 1):
            acc = None
            for i in range(max(0, n - other.degree), min(n, self.degree) + 1):
                A, B = self.coeffs[i], other.coeffs[n - i]
                if mat_is_exact_zero(A) or mat_is_exact_zero(B):
                    continue
                term = mat_mul(A, mat_frob(B, i))
                acc = term if acc is None else mat_add(acc, term)
            out.append(acc if acc is not None else mat_zero(self.K, self.d))
        return _combine(self, other, out)

    def __rmul__(self, c):
        return self._like([mat_scale(c, m) for m in self.coeffs])

    def __pow__(self, e):
        result = SkewPoly.identity(self.K, self.d)
        if self.n_trunc is not None:
            result = TwistedSeries(self.K, self.d, result.coeffs, self.n_trunc)
        for _ in range(e):
            result = result * self
        return result

    def is_zero(self):
        return all(mat_is_zero(c) for c in self.coeffs)

    def equals(self, other, upto=None):
        """Coefficientwise equality to precision, for ``tau^n`` with ``n <= upto``."""
        n = max(len(self.coeffs), len(other.coeffs))
        if upto is not None:
            n = min(n, upto + 1)
        return all(mat_equal(self.coefficient(i), other.coefficient(i)) for i in range(n))

    def __call__(self, x):
        return sp_eval(self, x)

    def format(self):
        parts = []
        for n, c in enumerate(self.coeffs):
            if mat_is_exact_zero(c):
                continue
            body = str(c[0][0]) if self.d == 1 else mat_format(c)
            if self.d == 1 and "+" in body:
                body = f"({body})"
            parts.append(body if n == 0 else f"{body}*τ^{n}")
        out = " + ".join(parts) if parts else "0"
        if self.n_trunc is not None:
            out += f" + O(τ^{self.n_trunc + 1})"
        return out

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"{type(self).__name__}({self.format()})"


class TwistedSeries(SkewPoly):
    """A twisted power series known modulo ``tau^(n_trunc+1)``."""

    def __init__(self, K, d, coeffs, n_trunc):
        coeffs = list(coeffs)[: n_trunc + 1]
        super().__init__(K, d, coeffs)
        self.n_trunc = n_trunc

    def _like(self, coeffs, other=None):
        return TwistedSeries(self.K, self.d, coeffs, self.n_trunc)

    def invert(self):
        return tps_invert(self)


def _trunc_of(a, b):
    ts = [x.n_trunc for x in (a, b) if x.n_trunc is not None]
    return min(ts) if ts else None


def _combine(a, b, coeffs):
    trunc = _trunc_of(a, b)
    if trunc is None:
        return SkewPoly(a.K, a.d, coeffs)
    return TwistedSeries(a.K, a.d, coeffs, trunc)


def _sum_lists(a, b, n, op):
    return [op(a.coefficient(i), b.coefficient(i)) for i in range(n)]


def as_series(P: SkewPoly, n_trunc) -> TwistedSeries:
    return TwistedSeries(P.K, P.d, P.coeffs, n_trunc)


def sp_mul(P, Q):
    return P * Q


def sp_eval(P: SkewPoly, x):
    """``sum_n coeffs[n] frobq^n(x)`` for a twisted polynomial."""
    x = tuple(x)
    if len(x) != P.d:
        raise ValueError(f"point has {len(x)} coordinates, expected {P.d}")
    K = P.K
    acc = tuple(K.zero() for _ in range(P.d))
    for n, c in enumerate(P.coeffs):
        if mat_is_exact_zero(c):
            continue
        xn = tuple(xi.frobq(n) if n else xi for xi in x)
        acc = tuple(a + b for a, b in zip(acc, mat_vec(c, xn)))
    return acc


def point_valuation(x):
    return min(c.valuation() for c in x)


def tps_eval(S: SkewPoly, x):
    """Evaluate a truncated twisted series at ``x`` with an a-posteriori tail bound.

    Term valuations ``v(C_n frobq^n(x))`` must be strictly increasing over
    the last two computed terms; the discarded tail is then bounded below by
    linear extrapolation and the result precision is capped there.
    """
    if S.n_trunc is None:
        return sp_eval(S, x)
    x = tuple(x)
    K = S.K
    terms = []
    for n in range(S.n_trunc + 1):
        c = S.coefficient(n)
        if mat_is_exact_zero(c):
            terms.append(None)
            continue
        xn = tuple(xi.frobq(n) if n else xi for xi in x)
        terms.append(mat_vec(c, xn))
    vals = [INF if t is None else point_valuation(t) for t in terms]
    N = S.n_trunc
    if N >= 1:
        last, prev = vals[N], vals[N - 1]
        if not last > prev and not (last == INF and prev == INF):
            raise NonConvergent(
                f"term valuations not increasing at tau^{N}: {prev} -> {last}")
        tail = INF if last == INF else 2 * last - prev
    else:
        tail = INF
    acc = tuple(K.zero() for _ in range(S.d))
    for t in terms:
        if t is not None:
            acc = tuple(a + b for a, b in zip(acc, t))
    if tail != INF:
        acc = tuple(a.truncate(tail) for a in acc)
    return acc


def tps_invert(S: SkewPoly) -> TwistedSeries:
    """Two-sided inverse modulo ``tau^(n_trunc+1)``, solved degree by degree."""
    N = S.n_trunc if S.n_trunc is not None else 12
    S0 = S.coefficient(0)
    d = S.d
    K = S.K
    scal = S0[0][0]
    nil = mat_sub(S0, mat_scalar(scal, d))
    if scal.is_zero() or not mat_is_zero(mat_pow(nil, d)):
        raise NonInvertibleConstantTerm("constant term is not a unit scalar plus nilpotent")
    try:
        R0 = _unipotent_inverse(scal, nil, d)
    except ZeroDivisionError as exc:  # pragma: no cover - scal checked nonzero above
        raise NonInvertibleConstantTerm(str(exc)) from None
    R = [R0]
    for n in range(1, N + 1):
        acc = None
        for i in range(1, min(n, S.degree) + 1):
            Si = S.coefficient(i)
            if mat_is_exact_zero(Si):
                continue
            term = mat_mul(Si, mat_frob(R[n - i], i))
            acc = term if acc is None else mat_add(acc, term)
        if acc is None:
            R.append(mat_zero(K, d))
        else:
            R.append(mat_neg(mat_mul(R0, acc)))
    return TwistedSeries(K, d, R, N)


def _unipotent_inverse(s, N, d):
    """``(s 1 + N)^{-1} = s^{-1} sum_k (-N/s)^k`` for nilpotent ``N``."""
    K = s.K
    sinv = s.inverse()
    X = mat_scale(-sinv, N)
    term = mat_identity(K, d)
    total = term
    for _ in range(1, d):
        term = mat_mul(term, X)
        total = mat_add(total, term)
    return mat_scale(sinv, total)


def check_precision(x, floor):
    """Raise unless every coordinate is known beyond ``floor``."""
    for c in x:
        if c.prec <= floor:
            raise PrecisionExhausted(f"coordinate known only to O(u^{c.prec})")
