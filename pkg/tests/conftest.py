import time

import numpy as np
import pytest
from hypothesis import strategies as st

from tmod import Poly, normalize
from tmod.formal import formal_data
from tmod.modfile import corpus_files, load_corpus

CORPUS = ["carlitz_q2", "carlitz_q3", "rank2_q2", "dim2_q3", "trivial"]
ABELIAN = ["carlitz_q2", "carlitz_q3", "rank2_q2", "dim2_q3"]

ACCEPTANCE_LINES = []
SESSION_START = time.perf_counter()


BUDGET_SECONDS = 60


def pytest_sessionfinish(session, exitstatus):
    wall = time.perf_counter() - SESSION_START
    if ACCEPTANCE_LINES:
        ok = wall < BUDGET_SECONDS
        ACCEPTANCE_LINES.append(f"criterion 10: {'PASS' if ok else 'FAIL'}  "
                                f"full session {wall:.1f} s (budget {BUDGET_SECONDS} s)")
        if not ok:
            session.exitstatus = pytest.ExitCode.TESTS_FAILED


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
    terminalreporter.write_line(
        f"suite wall time: {time.perf_counter() - SESSION_START:.1f} s")


@pytest.fixture(scope="session")
def corpus():
    assert sorted(p.stem for p in corpus_files()) == sorted(CORPUS)
    return {name: load_corpus(name) for name in CORPUS}


_FORMAL = {}


def formal_for(M):
    """Formal data of the normalized module, cached per corpus module."""
    key = (M.name, M.K.prec)
    if key not in _FORMAL:
        _FORMAL[key] = formal_data(normalize(M))
    return _FORMAL[key]


@pytest.fixture(scope="session")
def formal(corpus):
    return {name: formal_for(M) for name, M in corpus.items()}


def random_series(K, rng, vmin, vmax, ndigits=6):
    """Exact random series with valuation in ``[vmin, vmax]`` and ``ndigits`` digits."""
    val = int(rng.integers(vmin, vmax + 1))
    order = K.k.order
    digits = [int(rng.integers(1, order))] + [int(rng.integers(0, order)) for _ in range(ndigits - 1)]
    return K.from_digits(val, digits)


def random_point(K, d, rng, vmin, vmax, ndigits=6):
    return tuple(random_series(K, rng, vmin, vmax, ndigits) for _ in range(d))


def random_poly(F, rng, max_deg=3):
    deg = int(rng.integers(0, max_deg + 1))
    return Poly(F, [int(rng.integers(0, F.order)) for _ in range(deg + 1)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def series_strategy(K, vmin=-3, vmax=4, max_digits=5, allow_zero=False):
    """Hypothesis strategy for exact series over ``K``."""
    order = K.k.order

    @st.composite
    def build(draw):
        if allow_zero and draw(st.booleans()):
            return K.zero()
        val = draw(st.integers(vmin, vmax))
        lead = draw(st.integers(1, order - 1))
        rest = draw(st.lists(st.integers(0, order - 1), max_size=max_digits - 1))
        return K.from_digits(val, [lead] + rest)

    return build()


# Tensor square of the Carlitz module over F_3 at (t), with its motive declared
# through the single generator alpha_1 = x_1 (tau^0 coefficients only).
TENSOR2_TEXT = """
[field]
p = 3
m = 1

[place]
pi = "t"

[module]
dim = 2
M0 = [["t", "1"], ["0", "t"]]
M1 = [["0", "0"], ["1", "0"]]

[motive]
generators = [[["1"], ["0"]]]
coords = [[[1, "1", "1"]], [[1, "t", "1"], [1, "1", "-t"]]]
relations = [[[1, "t^2", "1"], [1, "t", "-2*t"], [1, "1", "t^2"]]]
"""


def tensor_square(prec=64, relations=None):
    from tmod import parse_module_text

    text = TENSOR2_TEXT
    if relations is not None:
        text = text.replace('relations = [[[1, "t^2", "1"], [1, "t", "-2*t"], [1, "1", "t^2"]]]',
                            f"relations = {relations}")
    return parse_module_text(text, source="tensor2", prec=prec)
