from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from phasequant.coeff import Coeff
from phasequant.fock import FockState
from phasequant.operators import LadderExpr
from phasequant.symbols import PhaseSymbol

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

small_fraction = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 9))


@st.composite
def coeffs(draw, powers=(0, 2, 4)):
    c = Coeff.rational(draw(small_fraction), draw(small_fraction), draw(st.sampled_from(powers)))
    if draw(st.booleans()):
        c = c + Coeff.rational(draw(small_fraction), 0, 0)
    return c


@st.composite
def monomial_keys(draw, max_degree, mode_count=1):
    key, budget = [], max_degree
    for _ in range(mode_count):
        j = draw(st.integers(0, budget))
        k = draw(st.integers(0, budget - j))
        budget -= j + k
        key.append((j, k))
    return tuple(key)


@st.composite
def symbols(draw, max_degree=4, mode_count=1, max_terms=4):
    f = PhaseSymbol.zero(mode_count)
    for _ in range(draw(st.integers(1, max_terms))):
        f = f + PhaseSymbol.monomial(draw(monomial_keys(max_degree, mode_count)), draw(coeffs()))
    return f


@st.composite
def real_symbols(draw, max_degree=4, mode_count=1):
    f = draw(symbols(max_degree, mode_count))
    return f + f.conjugate()


@st.composite
def ladders(draw, max_degree=4, mode_count=1, max_terms=4):
    out = LadderExpr.zero(mode_count)
    for _ in range(draw(st.integers(1, max_terms))):
        out = out + LadderExpr(mode_count, {draw(monomial_keys(max_degree, mode_count)): draw(coeffs())})
    return out


@st.composite
def states(draw, max_levels=6, hbar=1.0, pad=0):
    levels = draw(st.integers(1, max_levels))
    re = draw(st.lists(small_fraction, min_size=levels, max_size=levels))
    im = draw(st.lists(small_fraction, min_size=levels, max_size=levels))
    vec = np.array([complex(a, b) for a, b in zip(re, im)])
    if not np.any(vec):
        vec[0] = 1.0
    return FockState(vec, (levels,), hbar).normalized().with_cutoffs(levels + pad)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary: one PASS/FAIL line per criterion ------------------------------------

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    _criteria[number] = (title, "PASS" if call.excinfo is None else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, verdict = _criteria[number]
        terminalreporter.write_line(f"{verdict}  criterion {number:2d}: {title}")
