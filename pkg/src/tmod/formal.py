"""The formal module at ``v``: logarithm, exponential and their isometry radii."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .anderson import AndersonModule, NormalizedModule, is_normalized, phi_of
from .errors import NotNormalized, PrecisionExhausted, TailBoundFailure
from .fields import INF
from .gf import Poly
from .skew import (
    TwistedSeries, mat_add, mat_frob, mat_identity, mat_is_exact_zero, mat_is_zero, mat_mul,
    mat_scalar, mat_scale, mat_sub, mat_valuation, mat_vec, point_valuation,
    sp_eval, tps_eval, tps_invert,
)

DEFAULT_TAU_ORDER = 12


def _module(M):
    return M.module if isinstance(M, NormalizedModule) else M


def pi_data(M: AndersonModule):
    """``(pi_R, Phi(pi), N_pi)``; ``pi_R = u`` since ``pi(T(u)) = u``."""
    pi_poly = M.place.pi
    phi_pi = phi_of(M, pi_poly)
    u = M.K.u()
    n_pi = mat_sub(phi_pi.D, mat_scalar(u, M.d))
    return u, phi_pi, n_pi


def solve_sylvester(a_inv, N, N_twist, rhs, d):
    """Solve ``(pi + N) X - X (pi^{q^n} + N') = rhs`` given ``a_inv = (pi - pi^{q^n})^{-1}``.

    Iterates ``X <- a_inv (rhs - N X + X N')``; the correction map is
    nilpotent, so ``2d`` rounds are exact.
    """
    X = mat_scale(a_inv, rhs)
    if mat_is_exact_zero(N) and mat_is_exact_zero(N_twist):
        return X
    for _ in range(2 * d):
        X = mat_scale(a_inv, mat_add(mat_sub(rhs, mat_mul(N, X)), mat_mul(X, N_twist)))
    return X


def formal_log(M, n_trunc=DEFAULT_TAU_ORDER, allow_unnormalized=False) -> TwistedSeries:
    """Coefficients ``C_n`` of ``l`` with ``l Phi(pi) = (pi + N_pi) l``, ``C_0 = 1_d``."""
    M = _module(M)
    if not allow_unnormalized and not is_normalized(M):
        raise NotNormalized("formal_log needs a module satisfying (uni); call normalize() first")
    K, d = M.K, M.d
    pi, phi_pi, N = pi_data(M)
    B = phi_pi.coeffs
    C = [mat_identity(K, d)]
    for n in range(1, n_trunc + 1):
        rhs = None
        for i in range(1, min(n, len(B) - 1) + 1):
            if mat_is_exact_zero(B[i]):
                continue
            term = mat_mul(C[n - i], mat_frob(B[i], n - i))
            rhs = term if rhs is None else mat_add(rhs, term)
        if rhs is None:
            C.append(tuple(tuple(K.zero() for _ in range(d)) for _ in range(d)))
            continue
        a_inv = (pi - pi.frobq(n)).inverse()
        C.append(solve_sylvester(a_inv, N, mat_frob(N, n), rhs, d))
    return TwistedSeries(K, d, C, n_trunc)


def formal_exp(log: TwistedSeries) -> TwistedSeries:
    """``e = l^{-1}``."""
    if not (mat_is_zero(mat_sub(log.coefficient(0), mat_identity(log.K, log.d)))):
        raise ValueError("logarithm must have constant term 1_d")
    return tps_invert(log)


@dataclass
class Radii:
    k1: int
    k2: int
    k: int
    loss_per_step: int
    exp_rho: Fraction
    b_min: int


@dataclass
class FormalData:
    module: AndersonModule
    log: TwistedSeries
    exp: TwistedSeries
    k1: int
    k2: int
    k: int
    pi_R: object
    n_pi: tuple
    radii: Radii

    @property
    def n_trunc(self):
        return self.log.n_trunc


def _scan_radius(coeffs, q, start):
    """Least ``w >= start`` with ``v(c) + (q^n - 1) w >= 1`` for every entry of every ``C_n``."""
    w = start
    for n, C in enumerate(coeffs):
        if n == 0:
            continue
        v = mat_valuation(C)
        if v == INF:
            continue
        need = math.ceil((1 - v) / (q ** n - 1))
        w = max(w, need)
    return w


def compute_radii(M, log, exp, e_ram=1) -> Radii:
    """Isometry radii ``k1`` (log) and ``k2`` (exp) with verified tail bounds.

    Per-step valuation loss of the log recursion is at most
    ``L = max(0, 2d - 1 - b_min)`` where ``b_min`` bounds the valuations of
    the ``tau^{>=1}`` coefficients of ``Phi(pi)``; the exponential then
    satisfies ``v(E_n) >= -rho (q^n - 1)`` with ``rho = L/(q-1)``.
    """
    M = _module(M)
    q, d = M.q, M.d
    _, phi_pi, N = pi_data(M)
    b_vals = [mat_valuation(B) for B in phi_pi.coeffs[1:]]
    b_min = min(b_vals) if b_vals else INF
    if b_min != INF and b_min < 0:
        raise TailBoundFailure(f"Phi(pi) has tau-coefficients of valuation {b_min} < 0")
    if not mat_is_exact_zero(N) and mat_valuation(N) < 0:
        raise TailBoundFailure("nilpotent part N_pi is not integral")
    b_eff = min(b_min, 2 * d - 1) if b_min != INF else 2 * d - 1
    L = max(0, 2 * d - 1 - b_eff)
    N_trunc = log.n_trunc
    for n, C in enumerate(log.coeffs):
        v = mat_valuation(C)
        if v != INF and v < -L * n:
            raise TailBoundFailure(f"v(C_{n}) = {v} violates the linear bound -{L}*{n}")
    k1 = _scan_radius(log.coeffs, q, 1)
    n1 = N_trunc + 1
    while (q ** n1 - 1) * k1 - L * n1 < 1 or q ** n1 * (q - 1) * k1 < L:
        k1 += 1
    rho = Fraction(L, q - 1)
    for n, E in enumerate(exp.coeffs):
        v = mat_valuation(E)
        if v != INF and v < -rho * (q ** n - 1):
            raise TailBoundFailure(f"v(E_{n}) = {v} violates the bound -{rho}(q^{n} - 1)")
    k2 = _scan_radius(exp.coeffs, q, 1)
    k2 = max(k2, e_ram // (q - 1) + 1, math.floor(rho) + 1)
    while (q ** n1 - 1) * (k2 - rho) < 1:
        k2 += 1
    return Radii(k1, k2, max(k1, k2), L, rho, b_min)


def formal_data(M, n_trunc=DEFAULT_TAU_ORDER, allow_unnormalized=False) -> FormalData:
    M = _module(M)
    log = formal_log(M, n_trunc, allow_unnormalized=allow_unnormalized)
    exp = formal_exp(log)
    radii = compute_radii(M, log, exp, M.place.e_ram)
    pi, _, n_pi = pi_data(M)
    return FormalData(M, log, exp, radii.k1, radii.k2, radii.k, pi, n_pi, radii)


def log_functional_equation_holds(F: FormalData):
    """``l Phi(pi) = (pi 1 + N_pi) l`` modulo ``tau^{n_trunc+1}``."""
    M, N = F.module, F.n_trunc
    _, phi_pi, _ = pi_data(M)
    D = TwistedSeries(M.K, M.d, [phi_pi.D], N)
    lhs = F.log * TwistedSeries(M.K, M.d, phi_pi.coeffs, N)
    rhs = D * F.log
    return lhs.equals(rhs, N)


def exp_functional_equation_holds(F: FormalData, f=None):
    """``e (f 1 + N_f) = Phi(f) e`` modulo ``tau^{n_trunc+1}`` (default ``f = pi``)."""
    M, N = F.module, F.n_trunc
    f = f if f is not None else M.place.pi
    phi_f = phi_of(M, f)
    D = TwistedSeries(M.K, M.d, [phi_f.D], N)
    lhs = F.exp * D
    rhs = TwistedSeries(M.K, M.d, phi_f.coeffs, N) * F.exp
    return lhs.equals(rhs, N)


def inverse_pair_holds(F: FormalData):
    one = TwistedSeries(F.module.K, F.module.d, [mat_identity(F.module.K, F.module.d)], F.n_trunc)
    return (F.log * F.exp).equals(one) and (F.exp * F.log).equals(one)


@dataclass
class SmallTorsionWitness:
    excluded: bool
    x_valuations: tuple
    log_valuations: tuple
    image_valuations: tuple
    consistent: bool
    compared_to: object


def small_torsion_excluded(F: FormalData, x, f: Poly) -> SmallTorsionWitness:
    """Run the chain ``x -> l(x) -> D Phi(f) l(x) -> e(...)`` and compare with ``Phi(f)(x)``.

    ``excluded`` is true when ``x = 0`` or ``Phi(f)(x) != 0`` at working
    precision; ``consistent`` records agreement of the composite with the
    direct evaluation.
    """
    if not f:
        raise ValueError("f must be nonzero")
    M = F.module
    x = tuple(x)
    vals = tuple(c.valuation() for c in x)
    if all(c.is_zero() and c.is_exact() for c in x):
        return SmallTorsionWitness(True, vals, vals, vals, True, INF)
    if all(c.is_zero() for c in x):
        raise PrecisionExhausted(
            f"x vanishes only to O(u^{min(c.prec for c in x)}); cannot decide whether x = 0")
    if min(vals) < F.k:
        raise ValueError(f"point is not in m_v^{F.k}")
    direct = sp_eval(phi_of(M, f), x)
    lx = tps_eval(F.log, x)
    Df = phi_of(M, f).D
    y = mat_vec(Df, lx)
    ex = tps_eval(F.exp, y)
    diff = tuple(a - b for a, b in zip(ex, direct))
    consistent = all(c.is_zero() for c in diff)
    compared = min(c.prec for c in diff)
    if compared <= point_valuation(x):
        raise PrecisionExhausted(
            f"composite known only to O(u^{compared}), below v(x) = {point_valuation(x)}")
    nonzero_image = any(not c.is_zero() for c in direct)
    return SmallTorsionWitness(
        excluded=nonzero_image,
        x_valuations=vals,
        log_valuations=tuple(c.valuation() for c in lx),
        image_valuations=tuple(c.valuation() for c in direct),
        consistent=consistent,
        compared_to=compared,
    )


__all__ = [
    "FormalData", "Radii", "SmallTorsionWitness", "compute_radii", "exp_functional_equation_holds",
    "formal_data", "formal_exp", "formal_log", "inverse_pair_holds",
    "log_functional_equation_holds", "pi_data", "small_torsion_excluded", "solve_sylvester",
]
