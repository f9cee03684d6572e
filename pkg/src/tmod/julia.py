"""Motive presentations, the escape constant, and filled-Julia orbit verdicts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .anderson import DECLARED, INVERTIBLE_TOP, AndersonModule, phi_of
from .errors import NotAbelian, PrecisionExhausted, PresentationBoundFailure, ValidationError
from .fields import INF
from .gf import Poly
from .skew import SkewPoly, mat_inverse, mat_mul, mat_valuation, sp_eval

DEFAULT_CHECK = 8
DEFAULT_MAX_ITER = 200


def _entry(P: SkewPoly, i, j):
    return SkewPoly(P.K, 1, [((c[i][j],),) for c in P.coeffs])


def _scalar_poly(c):
    return SkewPoly(c.K, 1, [((c,),)])


@dataclass
class MotivePresentation:
    """Generators ``alpha_j`` of the motive and the rewriting rule for ``tau alpha_j``.

    Each term ``(l, f, c)`` stands for ``(f (x) c) alpha_l``: the row vector
    ``c * alpha_l * Phi(f)``.
    """

    generators: list
    coords: list
    rewrite: list
    delta: int
    kind: str
    labels: list = field(default_factory=list)

    def expand(self, M, terms):
        """Row vector of ``sum (f (x) c) alpha_l`` as scalar twisted polynomials."""
        K, d = M.K, M.d
        out = [SkewPoly(K, 1, []) for _ in range(d)]
        for l, f, c in terms:
            phi_f = phi_of(M, f)
            alpha = self.generators[l]
            cpoly = _scalar_poly(c)
            for m in range(d):
                acc = SkewPoly(K, 1, [])
                for i in range(d):
                    acc = acc + alpha[i] * _entry(phi_f, i, m)
                out[m] = out[m] + cpoly * acc
        return out


def _rewrite_coefficients(rewrite):
    return [c for terms in rewrite for (_, _, c) in terms if not c.is_zero()]


def motive_presentation(M: AndersonModule) -> MotivePresentation:
    """Build (InvertibleTopCoeff) or load (Declared) the presentation and verify it."""
    K, d, s = M.K, M.d, M.s
    one_poly = Poly.const(M.field, 1)
    t_poly = Poly.t(M.field)
    if M.abelian_cert == INVERTIBLE_TOP:
        Binv = mat_inverse(M.B[s])
        gens, labels = [], []
        for k in range(s):
            for l in range(d):
                row = [SkewPoly(K, 1, []) for _ in range(d)]
                row[l] = SkewPoly.tau(K, 1, k)
                gens.append(row)
                labels.append(f"tau^{k} m_{l + 1}")
        coords = [[(i, one_poly, K.one())] for i in range(d)]
        rewrite = []
        for k in range(s):
            for i in range(d):
                if k + 1 < s:
                    rewrite.append([((k + 1) * d + i, one_poly, K.one())])
                    continue
                terms = [(l, t_poly, Binv[i][l]) for l in range(d) if not Binv[i][l].is_zero()]
                for j in range(s):
                    BB = mat_mul(Binv, M.B[j])
                    for l in range(d):
                        if not BB[i][l].is_zero():
                            terms.append((j * d + l, one_poly, -BB[i][l]))
                rewrite.append(terms)
        kind = INVERTIBLE_TOP
    elif M.abelian_cert == DECLARED and M.motive is not None:
        decl = M.motive
        gens = [[SkewPoly(K, 1, [((K.embed(c),),) for c in entry]) for entry in g]
                for g in decl.generators]
        if any(len(g) != d for g in gens):
            raise ValidationError("declared motive generators must be row vectors of length d")
        labels = [f"alpha_{j + 1}" for j in range(len(gens))]
        coords = [[(l, f, K.embed(c)) for l, f, c in terms] for terms in decl.coords]
        rewrite = [[(l, f, K.embed(c)) for l, f, c in terms] for terms in decl.relations]
        if len(coords) != d or len(rewrite) != len(gens):
            raise ValidationError("declared motive needs one coordinate expression per m_i "
                                  "and one relation per generator")
        kind = DECLARED
    else:
        raise NotAbelian("module carries no abelian certificate (cf. the trivial t-module)")
    vals = [c.valuation() for c in _rewrite_coefficients(rewrite)]
    delta = max([0] + [-v for v in vals if v != INF])
    pres = MotivePresentation(gens, coords, rewrite, int(delta), kind, labels)
    _verify_relations(M, pres)
    return pres


def _verify_relations(M, pres):
    K, d = M.K, M.d
    tau = SkewPoly.tau(K, 1)
    for j, terms in enumerate(pres.rewrite):
        lhs = [tau * e for e in pres.generators[j]]
        rhs = pres.expand(M, terms)
        if not all(a.equals(b) for a, b in zip(lhs, rhs)):
            raise ValidationError(f"rewrite relation for generator {j + 1} does not reproduce tau*alpha")
    for i, terms in enumerate(pres.coords):
        target = [SkewPoly.identity(K, 1) if m == i else SkewPoly(K, 1, []) for m in range(d)]
        if not all(a.equals(b) for a, b in zip(target, pres.expand(M, terms))):
            raise ValidationError(f"coordinate expression for m_{i + 1} is wrong")


def apply_tau(M, pres, expr):
    """``tau * sum c t^a alpha_j`` rewritten in the generators."""
    K = M.K
    out = {}
    for j, poly in expr.items():
        for a, c in enumerate(poly):
            if c is None or (c.is_zero() and c.is_exact()):
                continue
            cq = c.frobq()
            for l, f, c2 in pres.rewrite[j]:
                base = cq * c2
                for b, fb in enumerate(f.c):
                    if not fb:
                        continue
                    coeff = base * K.base_const(fb)
                    slot = out.setdefault(l, [])
                    while len(slot) <= a + b:
                        slot.append(None)
                    slot[a + b] = coeff if slot[a + b] is None else slot[a + b] + coeff
    return out


def initial_expression(M, pres, i):
    expr = {}
    for l, f, c in pres.coords[i]:
        for b, fb in enumerate(f.c):
            if fb:
                slot = expr.setdefault(l, [])
                while len(slot) <= b:
                    slot.append(None)
                coeff = c * M.K.base_const(fb)
                slot[b] = coeff if slot[b] is None else slot[b] + coeff
    return expr


def expression_min_valuation(expr):
    vals = [c.valuation() for poly in expr.values() for c in poly if c is not None]
    return min(vals) if vals else INF


@dataclass
class EscapeData:
    C: Fraction
    theta_esc: int
    theta_inv: object
    presentation: MotivePresentation
    delta: int
    q: int
    bound_checks: list

    @property
    def threshold(self):
        """Escape threshold ``-2C``."""
        return -2 * self.C


def escape_constant(M: AndersonModule, n_check=DEFAULT_CHECK) -> EscapeData:
    """Escape constant ``C`` from one rewriting step, checked on ``tau^n m_i`` for ``n <= n_check``."""
    if not M.is_abelian:
        raise NotAbelian("escape constant needs an abelian certificate; "
                         "the filled Julia set of a non-abelian module may be unbounded")
    pres = motive_presentation(M)
    q = M.q
    delta = pres.delta
    exprs = [initial_expression(M, pres, i) for i in range(M.d)]
    first = [apply_tau(M, pres, e) for e in exprs]
    b1 = min(expression_min_valuation(e) for e in first)
    y = Fraction(0) if b1 == INF else Fraction(-b1, q)
    c_lead = max(Fraction(delta * q, q - 1), y)
    c_sound = max(Fraction(0), y + Fraction(delta, q * (q - 1)))
    C = max(c_lead, c_sound)
    checks = []
    current = first
    for n in range(1, n_check + 1):
        if n > 1:
            current = [apply_tau(M, pres, e) for e in current]
        worst = min(expression_min_valuation(e) for e in current)
        bound = -C * q ** n
        checks.append((n, worst, bound))
        if worst < bound:
            raise PresentationBoundFailure(
                f"v(c) = {worst} < -C q^{n} = {bound} in the presentation of tau^{n} m_i")
    theta_inv = invariant_ball_radius(M)
    return EscapeData(C, math.ceil(2 * C), theta_inv, pres, delta, q, checks)


def invariant_ball_radius(M: AndersonModule):
    """Least ``theta >= 0`` with ``Phi_t`` mapping ``{v >= theta}^d`` into itself, or ``None``."""
    if any(b.valuation() < 0 for row in M.B[0] for b in row):
        return None
    theta = 0
    q = M.q
    for j in range(1, M.s + 1):
        v = mat_valuation(M.B[j])
        if v == INF or v >= 0:
            continue
        theta = max(theta, math.ceil(-v / (q ** j - 1)))
    return theta


ESCAPES = "Escapes"
BOUNDED = "Bounded"
UNDETERMINED = "Undetermined"
ENTERED_BALL = "EnteredInvariantBall"
ABOVE_THRESHOLD = "AllIteratesAboveThreshold"


@dataclass
class OrbitVerdict:
    kind: str
    step: int
    trace: list
    certificate: object = None

    @property
    def certified(self):
        return self.kind == ESCAPES or self.certificate == ENTERED_BALL

    def describe(self):
        if self.kind == ESCAPES:
            return f"Escapes({self.step})"
        if self.kind == BOUNDED:
            return f"Bounded({self.certificate}({self.step}))"
        return f"Undetermined({self.step})"


def classify_orbit(M: AndersonModule, E: EscapeData, x, max_iter=DEFAULT_MAX_ITER) -> OrbitVerdict:
    """Iterate ``y <- Phi_t(y)`` until escape below ``-2C`` or entry into the invariant ball.

    Escape is tested on the iterates ``Phi_t^n(x)``, ``n >= 1`` (sound since
    the filled Julia set is an A-submodule); ball entry from ``n = 0``.
    """
    y = tuple(x)
    if len(y) != M.d:
        raise ValueError(f"point has {len(y)} coordinates, expected {M.d}")
    threshold = E.threshold
    trace = []
    above = True
    for n in range(max_iter + 1):
        vals = [c.valuation() for c in y]
        trace.append(min(vals))
        if n >= 1 and any(not c.is_zero() and c.val < threshold for c in y):
            return OrbitVerdict(ESCAPES, n, trace)
        if E.theta_inv is not None and all(v >= E.theta_inv for v in vals):
            return OrbitVerdict(BOUNDED, n, trace, ENTERED_BALL)
        for c in y:
            if c.is_zero() and c.prec < threshold:
                raise PrecisionExhausted(
                    f"iterate {n} has a coordinate known only to O(u^{c.prec})")
        if min(vals) < threshold:
            above = False
        if n == max_iter:
            break
        y = sp_eval(M.phi_t, y)
    if above:
        return OrbitVerdict(BOUNDED, max_iter, trace, ABOVE_THRESHOLD)
    return OrbitVerdict(UNDETERMINED, max_iter, trace)


__all__ = [
    "EscapeData", "MotivePresentation", "OrbitVerdict", "apply_tau", "classify_orbit",
    "escape_constant", "initial_expression", "invariant_ball_radius", "motive_presentation",
]
