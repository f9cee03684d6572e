"""Roots of additive polynomials over ``L_v`` and the v-rational torsion module (``d = 1``)."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .anderson import AndersonModule, normalize, phi_of
from .errors import (
    DimensionUnsupported, LeadingCoefficientZero, NotAbelian, PrecisionExhausted,
    TailBoundFailure, TmodError,
)
from .fields import INF
from .formal import formal_data
from .gf import Poly, monic_irreducibles
from .julia import ESCAPES, classify_orbit, escape_constant
from .skew import SkewPoly, sp_eval

NEWTON_STEPS = 200


class AdditivePoly:
    """``P(x) = sum c_i x^(q^i)`` over ``L_v``."""

    def __init__(self, K, coeffs):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and coeffs[-1].is_zero() and coeffs[-1].is_exact():
            coeffs.pop()
        if not coeffs:
            raise LeadingCoefficientZero("additive polynomial without coefficients")
        if coeffs[-1].is_zero():
            raise LeadingCoefficientZero(
                f"leading coefficient of x^(q^{len(coeffs) - 1}) is zero to precision")
        self.K = K
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_skew(cls, P: SkewPoly):
        if P.d != 1:
            raise DimensionUnsupported("additive polynomials need d = 1")
        return cls(P.K, [c[0][0] for c in P.coeffs])

    @property
    def degree(self):
        """tau-degree ``h``."""
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = self.K.zero()
        for i, c in enumerate(self.coeffs):
            if c.is_zero() and c.is_exact():
                continue
            acc = acc + c * (x.frobq(i) if i else x)
        return acc

    def newton_polygon(self):
        return NewtonPolygon.of(self)

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero() and c.is_exact():
                continue
            mono = "x" if i == 0 else f"x^{self.K.q ** i}"
            parts.append(f"({c})*{mono}")
        return " + ".join(parts) or "0"


@dataclass
class NewtonPolygon:
    vertices: list
    segments: list  # (slope, length, i_start, i_end)

    @classmethod
    def of(cls, P: AdditivePoly):
        q = P.K.q
        pts = [(q ** i, c.valuation(), i) for i, c in enumerate(P.coeffs) if not c.is_zero()]
        hull = []
        for pt in pts:
            while len(hull) >= 2:
                (x1, y1, _), (x2, y2, _) = hull[-2], hull[-1]
                # drop the middle point unless it lies strictly below the chord
                if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                    hull.pop()
                else:
                    break
            hull.append(pt)
        segments = []
        for (x1, y1, i1), (x2, y2, i2) in zip(hull, hull[1:]):
            segments.append((Fraction(y2 - y1, x2 - x1), x2 - x1, i1, i2))
        return cls([(x, y) for x, y, _ in hull], segments)

    def root_valuations(self):
        """Valuations ``w = -slope`` of nonzero roots in an algebraic closure."""
        return [-s for s, _, _, _ in self.segments]

    def integral_slopes(self):
        return [s for s, _, _, _ in self.segments if s.denominator == 1]


def nullspace_mod_p(A, p):
    """Basis of ``{x : A x = 0}`` over ``F_p`` (rows of the returned array)."""
    A = np.array(A, dtype=np.int64) % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if len(nz) == 0:
            continue
        piv = r + nz[0]
        A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-A[i, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), cols)


def residual_kernel_sizes(P: AdditivePoly):
    """``{w: |ker R_w|}`` over ``k`` for each integral slope ``-w``.

    ``R_w(X) = sum a_i X^(q^i)`` over the vertices and interior lattice points
    of the segment; it bounds the number of roots of valuation ``w`` (plus
    zero) from above.
    """
    K = P.K
    k, p, r = K.k, K.p, K.r
    e = int(round(math.log(K.q, p)))
    poly = P.newton_polygon()
    out = {}
    for slope, _, i1, i2 in poly.segments:
        if slope.denominator != 1:
            continue
        w = -int(slope)
        vmin = P.coeffs[i1].valuation() + K.q ** i1 * w
        A = np.zeros((r, r), dtype=np.int64)
        for i in range(i1, i2 + 1):
            c = P.coeffs[i]
            if c.is_zero() or c.val + K.q ** i * w != vmin:
                continue
            a = c.leading()
            mult = np.zeros((r, r), dtype=np.int64)
            for j in range(r):
                mult[:, j] = k.to_vec(k.mul(a, p ** j))
            A = (A + mult @ k.frob_matrix(e * i)) % p
        out[w] = p ** len(nullspace_mod_p(A, p))
    return out


@dataclass
class AdditiveRoots:
    """The ``F_q``-space of ``L_v``-rational roots of an additive polynomial."""

    polynomial: AdditivePoly
    basis: list
    roots: list
    window: tuple
    polygon: NewtonPolygon
    residual_sizes: dict
    precision: object  # least absolute precision among the returned roots
    slack: int = 0  # every root has v(P(x)) >= K.prec - slack

    def __len__(self):
        return len(self.roots)

    def contains(self, x):
        return any((x - y).is_zero() for y in self.roots)


def additive_roots(P: AdditivePoly, prec=None) -> AdditiveRoots:
    """All roots of ``P`` in ``L_v``.

    A nonzero root has integral valuation in ``[lo, m)`` with
    ``lo = ceil(w_min)``, ``m = floor(w_max) + 1`` read off the Newton
    polygon.  A digit block ``y`` on ``[lo, m)`` is the truncation of a root
    iff ``v(P(y)) >= m + v(c_0)`` (the ``c_0 x`` term dominates above
    ``w_max``, so Newton's step ``y - P(y)/c_0`` converges and the lift is
    unique).  The condition is ``F_p``-linear in the digits of ``y``, so the
    root space is a kernel.
    """
    K = P.K
    c0 = P.coeffs[0]
    if c0.is_zero():
        raise ValueError("additive_roots needs c_0 != 0 (simple roots)")
    poly = P.newton_polygon()
    residual = residual_kernel_sizes(P)
    if not poly.segments:
        return AdditiveRoots(P, [], [K.zero()], (0, 0), poly, residual, INF)
    ws = poly.root_valuations()
    lo, m = math.ceil(min(ws)), math.floor(max(ws)) + 1
    if lo >= m:
        return AdditiveRoots(P, [], [K.zero()], (lo, m), poly, residual, INF)
    v0 = c0.val
    hi = m + v0
    k, p, r = K.k, K.p, K.r
    images, cols = [], []
    for j in range(lo, m):
        for b in range(r):
            e = K.const(p ** b).shift(j)
            img = P(e)
            if img.prec < hi:
                raise PrecisionExhausted(
                    f"P(u^{j}) known only to O(u^{img.prec}); need O(u^{hi})")
            images.append(img)
            cols.append((j, b))
    vlo = min([img.val for img in images if not img.is_zero()], default=hi)
    vlo = min(vlo, hi)
    A = np.zeros((r * (hi - vlo), len(images)), dtype=np.int64)
    for col, img in enumerate(images):
        for n in range(vlo, hi):
            A[r * (n - vlo): r * (n - vlo + 1), col] = k.to_vec(img.coefficient(n))
    kernel = nullspace_mod_p(A, p)
    basis = []
    precision = INF
    for vec in kernel:
        digits = [k.from_vec(vec[r * i: r * (i + 1)]) for i in range(m - lo)]
        x, err = _newton_lift(P, K.from_digits(lo, digits), prec)
        precision = min(precision, err)
        basis.append(x)
    roots = []
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        acc = K.zero()
        for a, x in zip(coeffs, basis):
            if a:
                acc = acc + x.scale(a)
        roots.append(acc)
    worst = min(P(x).valuation() for x in roots)
    slack = max(0, K.prec - worst) if worst != INF else 0
    return AdditiveRoots(P, basis, roots, (lo, m), poly, residual, precision, slack)


def _newton_lift(P, x, prec=None):
    """Refine ``x`` by ``x <- x - P(x)/c_0``; returns the root and its precision."""
    K = P.K
    c0 = P.coeffs[0]
    target = prec if prec is not None else K.prec
    last = -INF
    for _ in range(NEWTON_STEPS):
        y = P(x)
        if y.is_zero():
            break
        if y.val <= last:
            raise PrecisionExhausted("Newton lift stalled; increase the working precision")
        last = y.val
        x = x - y / c0
    else:  # pragma: no cover - quadratic convergence makes this unreachable
        raise PrecisionExhausted("Newton lift did not converge")
    good = min(x.prec, y.prec - c0.val)
    if good != INF and good < target and x.val is not None and good <= x.val:
        raise PrecisionExhausted(f"root known only to O(u^{good})")
    return x.truncate(good), good


def is_torsion(M: AndersonModule, x, f: Poly, escape=None, max_iter=50):
    """``Phi(f)(x) = 0`` to working precision and ``x`` does not escape."""
    if not f:
        raise ValueError("f must be nonzero")
    x = tuple(x)
    image = sp_eval(phi_of(M, f), x)
    if not all(c.is_zero() for c in image):
        return False
    if all(c.is_zero() for c in x):
        return True
    if escape is None:
        if not M.is_abelian:
            return True
        escape = escape_constant(M)
    verdict = classify_orbit(M, escape, x, max_iter=max_iter)
    return verdict.kind != ESCAPES


@dataclass
class PrimeTower:
    prime: Poly
    levels: list
    kernels: list = field(repr=False)
    stabilized: bool
    exponents: list

    @property
    def primary_part(self):
        return self.kernels[-1] if self.kernels else []


@dataclass
class TorsionPoint:
    coords: tuple
    annihilator: Poly


@dataclass
class TorsionReport:
    module: AndersonModule
    k: int
    k_normalized: int
    lambda_val: int
    C: Fraction
    card_bound: int
    required_degree: int
    primes_scanned: list
    towers: list
    points: list
    structure: list
    certificates: dict
    complete: bool

    def structure_string(self):
        if not self.structure:
            return "0"
        return " + ".join(f"A/({_factor(p, e)})" for p, e in self.structure)

    def to_json(self):
        F = self.module.field
        return {
            "module": self.module.name or "",
            "q": self.module.q,
            "place": self.module.place.pi.format(),
            "card_bound": self.card_bound,
            "C": str(self.C),
            "k": self.k,
            "lambda_val": self.lambda_val,
            "primes": [
                {"p": t.prime.format(), "levels": t.levels, "stabilized": t.stabilized,
                 "points": [str(x) for x in t.primary_part]}
                for t in self.towers],
            "points": [
                {"coords": [str(c) for c in pt.coords], "annihilator": pt.annihilator.format()}
                for pt in self.points],
            "structure": self.structure_string(),
            "certificates": self.certificates,
            "complete": self.complete,
            "field": {"p": F.p, "q": F.order},
        }


def _factor(p: Poly, e):
    body = p.format()
    if e == 1:
        return body
    if p.deg > 1 or len([c for c in p.c if c]) > 1:
        body = f"({body})"
    return f"{body}^{e}"


def _distinct(points):
    out = []
    for x in points:
        if not any((x - y).is_zero() for y in out):
            out.append(x)
    return out


def _tower(M, prime, card_bound):
    kernels, levels = [], []
    stabilized = False
    n = 1
    while True:
        P = AdditivePoly.from_skew(phi_of(M, prime ** n))
        roots = additive_roots(P).roots
        kernels.append(roots)
        levels.append(len(roots))
        if len(roots) > card_bound:
            raise TmodError(
                f"ker Phi({prime.format()}^{n}) has {len(roots)} points > bound {card_bound}")
        if n >= 2 and levels[-1] == levels[-2]:
            stabilized = True
            kernels.pop()
            levels.pop()
            break
        n += 1
    # elementary divisors from |K_n| = q^(deg * a_n): #factors with e >= n is a_n - a_{n-1}
    q_p = M.q ** prime.deg
    a = [0] + [round(math.log(s, q_p)) for s in levels]
    ge = [a[i] - a[i - 1] for i in range(1, len(a))]
    exponents = []
    for e in range(len(ge), 0, -1):
        count = ge[e - 1] - (ge[e] if e < len(ge) else 0)
        exponents.extend([e] * count)
    return PrimeTower(prime, levels, kernels, stabilized, exponents)


def _order_in(tower, x):
    for n, K_n in enumerate(tower.kernels, start=1):
        if any((x - y).is_zero() for y in K_n):
            return n
    return None


def _sort_key(x):
    c = x[0]
    if c.is_zero():
        return (0,)
    return (1, c.val, tuple(c.digits(c.val, min(c.val + 12, c.prec))))


def torsion_module(M: AndersonModule, primes=None, n_trunc=12, max_iter=50) -> TorsionReport:
    """Certified enumeration of the ``L_v``-rational torsion of a Drinfeld module.

    Torsion lies in ``{v >= -2C}`` and reduction mod ``u^k`` is injective on
    it, so it has at most ``card_bound = q^(f (ceil(2C) + k))`` elements; a
    prime ``p`` with ``q^deg p > card_bound`` cannot contribute.
    """
    if M.d != 1:
        raise DimensionUnsupported("torsion enumeration is implemented for d = 1; "
                                   "use is_torsion / small_torsion_excluded for d >= 2")
    if not M.is_abelian:
        raise NotAbelian("torsion enumeration needs an abelian certificate")
    q, f_res = M.q, M.place.f_res
    NM = normalize(M)
    k_norm = formal_data(NM, n_trunc).k
    k = k_norm + NM.lambda_val
    try:
        k_orig = formal_data(M, n_trunc, allow_unnormalized=True).k
        k = min(k, k_orig)
    except TailBoundFailure:
        k_orig = None
    E = escape_constant(M)
    C = E.C
    exponent = f_res * (math.ceil(2 * C) + k)
    card_bound = q ** exponent
    required = monic_irreducibles(M.field, exponent)
    required = [P for P in required if q ** P.deg <= card_bound]
    if primes is None:
        scan = list(required)
    else:
        scan = [P.monic() for P in primes]
    towers = [_tower(M, P, card_bound) for P in scan]
    missing = [P.format() for P in required if all(P != S for S in scan)]

    # all sums of primary components
    parts = [t.primary_part for t in towers if len(t.primary_part) > 1]
    total = math.prod(len(p) for p in parts)
    if total > card_bound:
        raise TmodError(f"{total} torsion points exceed the bound {card_bound}")
    points = []
    for combo in itertools.product(*parts) if parts else [()]:
        acc = M.K.zero()
        ann = Poly.const(M.field, 1)
        for tower_pts, x in zip([t for t in towers if len(t.primary_part) > 1], combo):
            acc = acc + x
            e = None if x.is_zero() else _order_in(tower_pts, x)
            if e:
                ann = ann * tower_pts.prime ** e
        points.append(TorsionPoint((acc,), ann))
    points.sort(key=lambda pt: _sort_key(pt.coords))

    certs = _certify(M, NM, E, points, towers, k, card_bound, max_iter)
    certs["k_normalized_plus_lambda"] = k_norm + NM.lambda_val
    certs["k_original"] = k_orig
    certs["required_primes"] = [P.format() for P in required]
    certs["missing_primes"] = missing
    certs["presentation_generators"] = E.presentation.labels
    complete = not missing and all(t.stabilized for t in towers) and all(
        v is True for key, v in certs.items() if key.endswith("_ok"))
    structure = sorted(((t.prime, e) for t in towers for e in t.exponents),
                       key=lambda pe: (pe[0].deg, pe[0].c, pe[1]))
    return TorsionReport(M, k, k_norm, NM.lambda_val, C, card_bound, exponent, scan, towers,
                         points, structure, certs, complete)


def _certify(M, NM, E, points, towers, k, card_bound, max_iter):
    threshold = -2 * E.C
    nonzero = [pt for pt in points if not pt.coords[0].is_zero()]
    lo = min([pt.coords[0].val for pt in nonzero], default=0)
    lo = min(lo, 0)
    keys = {tuple(c.key(lo, k) for c in pt.coords) for pt in points}
    injective = len(keys) == len(points)
    in_ball = all(c.valuation() >= threshold for pt in points for c in pt.coords)
    verdicts = {}
    julia_ok = True
    for pt in points:
        v = classify_orbit(M, E, pt.coords, max_iter=max_iter)
        verdicts[str(pt.coords[0])] = v.describe()
        julia_ok &= v.kind != ESCAPES
    annihilated = all(is_torsion(M, pt.coords, pt.annihilator, E, max_iter) for pt in points)
    conj_ok = all(
        all(c.is_zero() for c in sp_eval(phi_of(NM.module, pt.annihilator),
                                          NM.from_base_point(pt.coords)))
        for pt in points)
    tower_ok = True
    for t in towers:
        for n in range(1, len(t.kernels)):
            lower, upper = t.kernels[n - 1], t.kernels[n]
            tower_ok &= all(any((x - y).is_zero() for y in upper) for x in lower)
            phi_p = phi_of(M, t.prime)
            for x in upper:
                y = sp_eval(phi_p, (x,))[0]
                tower_ok &= any((y - z).is_zero() for z in lower)
    return {
        "count_ok": len(points) <= card_bound,
        "injective_mod_u_k_ok": injective,
        "ball_ok": in_ball,
        "julia_ok": julia_ok,
        "annihilators_ok": annihilated,
        "conjugation_ok": conj_ok,
        "kernel_tower_ok": tower_ok,
        "stabilization_levels": {t.prime.format(): t.levels for t in towers},
        "verdicts": verdicts,
    }


__all__ = [
    "AdditivePoly", "AdditiveRoots", "NewtonPolygon", "PrimeTower", "TorsionPoint",
    "TorsionReport", "additive_roots", "is_torsion", "nullspace_mod_p",
    "residual_kernel_sizes", "torsion_module",
]
