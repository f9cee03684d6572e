from fractions import Fraction

import pytest

from tmod import NotAbelian, PrecisionExhausted, ValidationError, classify_orbit, escape_constant
from tmod import parse_module_text, sp_eval
from tmod.julia import (ABOVE_THRESHOLD, BOUNDED, ENTERED_BALL, ESCAPES, UNDETERMINED,
                        apply_tau, initial_expression, motive_presentation)
from tmod.modfile import corpus_dir

from conftest import ABELIAN, TENSOR2_TEXT, random_point, random_series, tensor_square


def t_plus_t_tau():
    """Phi_t = t + t tau over F_3 at (t); rewriting tau = t^{-1}(Phi_t - t) costs one."""
    text = (corpus_dir() / "carlitz_q3.tmod").read_text().replace('M1 = [["1"]]', 'M1 = [["t"]]')
    return parse_module_text(text, source="t_plus_t_tau")


@pytest.mark.parametrize("name", ["carlitz_q2", "carlitz_q3", "rank2_q2"])
def test_escape_constant_examples(corpus, name):
    E = escape_constant(corpus[name])
    assert (E.delta, E.C, E.theta_esc, E.theta_inv) == (0, 0, 0, 0)


def test_carlitz_rewrite_coefficients(corpus):
    M = corpus["carlitz_q3"]
    pres = motive_presentation(M)
    tau_e = apply_tau(M, pres, initial_expression(M, pres, 0))
    # tau * 1 = (t (x) 1) - (1 (x) t)
    vals = sorted(c.valuation() for poly in tau_e.values() for c in poly if c is not None
                  and not c.is_zero())
    assert vals == [0, 1]


def test_rank_two_rewrite(corpus):
    M = corpus["rank2_q2"]
    pres = motive_presentation(M)
    assert len(pres.generators) == 2 and pres.delta == 0


def test_trivial_module_not_abelian(corpus):
    with pytest.raises(NotAbelian):
        escape_constant(corpus["trivial"])


def test_delta_one_module():
    M = t_plus_t_tau()
    E = escape_constant(M)
    assert E.delta == 1
    assert E.C == Fraction(3, 2) and E.theta_esc == 3 and E.threshold == -3


def test_declared_motive_escape_data():
    E = escape_constant(tensor_square(prec=32))
    assert E.presentation.kind == "Declared"
    assert E.delta == 0 and E.C == 0


def test_declared_motive_bad_coords():
    text = TENSOR2_TEXT.replace('[[1, "t", "1"], [1, "1", "-t"]]', '[[1, "t", "1"]]')
    with pytest.raises(ValidationError, match="coordinate expression"):
        parse_module_text(text, source="bad")


@pytest.mark.parametrize("name", ABELIAN)
def test_presentation_bound(corpus, name):
    E = escape_constant(corpus[name])
    assert len(E.bound_checks) == 8
    assert all(worst >= bound for _, worst, bound in E.bound_checks)


def test_presentation_bound_declared_and_delta():
    for M in (tensor_square(prec=32), t_plus_t_tau()):
        E = escape_constant(M)
        assert all(worst >= bound for _, worst, bound in E.bound_checks)


def test_classify_examples(corpus):
    M = corpus["carlitz_q3"]
    E = escape_constant(M)
    K = M.K
    v = classify_orbit(M, E, (K.u(-1),), 10)
    assert v.kind == ESCAPES and v.step == 1 and v.trace == [-1, -3]
    assert v.describe() == "Escapes(1)" and v.certified
    v = classify_orbit(M, E, (K.one(),), 10)
    assert (v.kind, v.certificate, v.step) == (BOUNDED, ENTERED_BALL, 0)
    assert v.describe() == "Bounded(EnteredInvariantBall(0))"
    assert classify_orbit(M, E, (K.zero(),), 10).kind == BOUNDED


def test_horizon_limited_verdicts():
    M = t_plus_t_tau()
    E = escape_constant(M)
    K = M.K
    v = classify_orbit(M, E, (K.u(-1),), 1)
    assert (v.kind, v.certificate) == (BOUNDED, ABOVE_THRESHOLD) and not v.certified
    v = classify_orbit(M, E, (K.u(-4),), 0)
    assert v.kind == UNDETERMINED and v.describe() == "Undetermined(0)"
    assert classify_orbit(M, E, (K.u(-1),), 5).kind == ESCAPES


def test_precision_exhausted(corpus):
    M = corpus["carlitz_q3"]
    E = escape_constant(M)
    with pytest.raises(PrecisionExhausted):
        classify_orbit(M, E, (M.K.zero(-3),), 5)
    with pytest.raises(ValueError):
        classify_orbit(M, E, (M.K.one(), M.K.one()), 5)


@pytest.mark.parametrize("name", ABELIAN)
def test_escape_soundness(corpus, name, rng):
    M = corpus[name]
    E = escape_constant(M)
    growth = M.q ** M.s
    for _ in range(50 // len(ABELIAN) + 1):
        x = random_point(M.K, M.d, rng, 0, 3, 4)
        x = (random_series(M.K, rng, -3, -1, 4),) + x[1:]
        v = classify_orbit(M, E, x, 6)
        assert v.kind == ESCAPES
        m = min(c.valuation() for c in x)
        y = x
        for n in range(1, 4):
            y = sp_eval(M.phi_t, y)
            assert min(c.valuation() for c in y) == growth ** n * m


@pytest.mark.parametrize("name", ABELIAN)
def test_invariant_ball_soundness(corpus, name, rng):
    M = corpus[name]
    E = escape_constant(M)
    for _ in range(50 // len(ABELIAN) + 1):
        x = random_point(M.K, M.d, rng, E.theta_inv, E.theta_inv + 4, 4)
        y = sp_eval(M.phi_t, x)
        assert all(c.valuation() >= E.theta_inv for c in y)
