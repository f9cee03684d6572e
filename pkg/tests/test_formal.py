import pytest

from oracles import digits_of
from tmod import (FiniteField, LocalField, NotNormalized, Place, Poly, PrecisionExhausted,
                  TailBoundFailure, TwistedSeries, formal_data, formal_exp, formal_log,
                  normalize, phi_of, small_torsion_excluded, sp_eval, tps_eval, validate_module)
from tmod.formal import (compute_radii, exp_functional_equation_holds, inverse_pair_holds,
                         log_functional_equation_holds, pi_data)
from tmod.parsing import parse_rational
from tmod.skew import mat_add, mat_identity, mat_mul, mat_scalar, mat_sub, mat_is_zero

from conftest import ABELIAN, random_point

F3 = FiniteField(3)


def carlitz3(place_poly=(0, 1), prec=64, b1="1"):
    place = Place.from_poly(F3, Poly(F3, place_poly))
    return validate_module(F3, place, 1, [((parse_rational("t", F3),),),
                                          ((parse_rational(b1, F3),),)],
                           K=LocalField(place, prec), name="carlitz")


def test_unnormalized_carlitz_closed_form():
    M = carlitz3()
    log = formal_log(M, 5, allow_unnormalized=True)
    K, T = M.K, M.K.embed_t()
    prod = K.one()
    for n in range(1, 6):
        prod = prod * (T - T.frobq(n))
        c = log.coefficient(n)[0][0]
        err = c * prod - K.one()
        assert err.valuation() >= 30
    assert log.coefficient(1)[0][0] == (T - T.frobq()).inverse()
    F = formal_data(M, 5, allow_unnormalized=True)
    assert log_functional_equation_holds(F)


def test_not_normalized_rejected():
    with pytest.raises(NotNormalized):
        formal_log(carlitz3(), 4)


def test_normalized_carlitz_first_coefficient(formal):
    F = formal["carlitz_q3"]
    c1 = F.log.coefficient(1)[0][0]
    assert c1.val == 1
    # u / (1 - u^2) = u + u^3 + u^5 + ...
    assert digits_of(c1, 1, 41).tolist() == [1 if i % 2 == 0 else 0 for i in range(40)]


def test_dim2_first_coefficient_is_two_sided(formal):
    F = formal["dim2_q3"]
    M = F.module
    K = M.K
    pi, phi_pi, N = pi_data(M)
    a = pi - pi.frobq()
    C1 = F.log.coefficient(1)
    B1 = phi_pi.coefficient(1)
    lhs = mat_sub(mat_mul(mat_add(mat_scalar(pi, 2), N), C1),
                  mat_mul(C1, mat_add(mat_scalar(pi.frobq(), 2), N)))
    assert mat_is_zero(mat_sub(lhs, B1))
    # B_1 is scalar and commutes with N, so the solution is scalar
    assert C1[0][1].is_zero() and C1[0][0] == C1[1][1] == a.inverse() * B1[0][0]
    # the one-sided closed form a^{-1}(1 - a^{-1} N) B_1 is a different matrix
    ainv = a.inverse()
    one_sided = [[ainv * (mat_identity(K, 2)[i][j] - ainv * N[i][j]) * B1[0][0]
                  for j in range(2)] for i in range(2)]
    assert not one_sided[0][1].is_zero()
    alt = TwistedSeries(K, 2, [mat_identity(K, 2), tuple(map(tuple, one_sided))], 1)
    D = TwistedSeries(K, 2, [phi_pi.D], 1)
    assert not (alt * TwistedSeries(K, 2, phi_pi.coeffs, 1)).equals(D * alt, 1)


def test_exp_of_identity(corpus):
    K = corpus["dim2_q3"].K
    one = TwistedSeries(K, 2, [mat_identity(K, 2)], 8)
    assert formal_exp(one).equals(one)
    with pytest.raises(ValueError):
        formal_exp(TwistedSeries(K, 1, [((K.u(),),)], 4))


def test_carlitz_exp_first_coefficient():
    M = carlitz3()
    F = formal_data(M, 6, allow_unnormalized=True)
    assert F.exp.coefficient(1)[0][0] == -F.log.coefficient(1)[0][0]


@pytest.mark.parametrize("name", ABELIAN)
def test_functional_equations(formal, name):
    F = formal[name]
    assert F.log.coefficient(0) == mat_identity(F.module.K, F.module.d)
    assert F.exp.coefficient(0) == mat_identity(F.module.K, F.module.d)
    assert inverse_pair_holds(F)
    assert log_functional_equation_holds(F)
    assert exp_functional_equation_holds(F)
    assert exp_functional_equation_holds(F, Poly.t(F.module.field))


def test_functional_equations_away_from_t():
    # place (t - 1): pi and t differ
    NM = normalize(carlitz3(place_poly=(2, 1), prec=48))
    assert NM.lambda_val == 1
    F = formal_data(NM)
    assert log_functional_equation_holds(F)
    assert exp_functional_equation_holds(F)
    assert exp_functional_equation_holds(F, Poly.t(F3))
    assert F.k == 1


def test_radii_examples(formal):
    assert (formal["carlitz_q3"].k1, formal["carlitz_q3"].k2, formal["carlitz_q3"].k) == (1, 1, 1)
    assert formal["carlitz_q2"].k2 >= 2 and formal["carlitz_q2"].k == 2
    F = formal_data(carlitz3(b1="t^3", prec=48))
    assert F.k == 1


@pytest.mark.parametrize("name", ABELIAN)
def test_tail_bound_is_certified(formal, name):
    F = formal[name]
    R, q, n1 = F.radii, F.module.q, F.n_trunc + 1
    assert (q ** n1 - 1) * R.k1 - R.loss_per_step * n1 >= 1
    assert (q ** n1 - 1) * (R.k2 - R.exp_rho) >= 1
    assert R.k2 >= F.module.place.e_ram // (q - 1) + 1


def test_tail_bound_failure(formal):
    F = formal["carlitz_q3"]
    K = F.module.K
    bad = TwistedSeries(K, 1, [mat_identity(K, 1), ((K.u(-5),),)], 4)
    with pytest.raises(TailBoundFailure):
        compute_radii(F.module, bad, F.exp)


def test_small_torsion_examples(formal):
    F = formal["carlitz_q3"]
    K = F.module.K
    t = Poly.t(F3)
    w = small_torsion_excluded(F, (K.zero(),), t)
    assert w.excluded and w.consistent
    w = small_torsion_excluded(F, (K.u(),), t)
    assert w.excluded and w.consistent
    assert w.log_valuations == (1,) == w.x_valuations
    with pytest.raises(ValueError):
        small_torsion_excluded(F, (K.u(),), Poly(F3, ()))


def test_small_torsion_precision_exhausted(formal):
    F = formal["carlitz_q3"]
    K = F.module.K
    with pytest.raises(PrecisionExhausted, match="cannot decide"):
        small_torsion_excluded(F, (K.zero(3),), Poly.t(F3))


@pytest.mark.parametrize("name", ["carlitz_q3", "carlitz_q2"])
def test_small_torsion_sweep(formal, name, rng):
    F = formal[name]
    M, K = F.module, F.module.K
    fs = [Poly.t(M.field), Poly(M.field, (0, M.field.order - 1, 1))]  # t, t^2 - t
    for _ in range(50):
        x = random_point(K, 1, rng, F.k, F.k + 4, 5)
        for f in fs:
            w = small_torsion_excluded(F, x, f)
            assert w.excluded and w.consistent
            assert not sp_eval(phi_of(M, f), x)[0].is_zero()


@pytest.mark.parametrize("name", ABELIAN)
def test_isometry(formal, name, rng):
    F = formal[name]
    K, d = F.module.K, F.module.d
    for _ in range(50 // len(ABELIAN) + 1):
        x = random_point(K, d, rng, F.k1, F.k1 + 5, 5)
        assert [c.valuation() for c in tps_eval(F.log, x)] == [c.valuation() for c in x]
        x = random_point(K, d, rng, F.k2, F.k2 + 5, 5)
        assert [c.valuation() for c in tps_eval(F.exp, x)] == [c.valuation() for c in x]


@pytest.mark.parametrize("name,vmin", [("carlitz_q3", 1), ("carlitz_q2", 2), ("dim2_q3", 1)])
def test_exp_converges_past_threshold(formal, name, vmin, rng):
    F = formal[name]
    x = random_point(F.module.K, F.module.d, rng, vmin, vmin, 5)
    y = tps_eval(F.exp, x)
    assert all(c.prec > vmin for c in y)
