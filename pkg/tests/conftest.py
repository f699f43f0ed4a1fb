import json
import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from scdim.concepts import ConceptClass, Domain

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def golden(name):
    with open(os.path.join(GOLDEN, name)) as fh:
        return json.load(fh)


@st.composite
def classes(draw, min_n=1, max_n=5):
    n = draw(st.integers(min_n, max_n))
    cs = draw(st.sets(st.integers(0, (1 << n) - 1), min_size=1, max_size=min(1 << n, 12)))
    return ConceptClass(Domain.standard(n), tuple(sorted(cs)))


@st.composite
def delta_points(draw, C):
    """A point of Delta_C: signs of a concept on a weighted support."""
    c = draw(st.sampled_from(C.concepts))
    w = draw(st.lists(st.integers(0, 50), min_size=C.n, max_size=C.n).filter(any))
    s = sum(w)
    return tuple(Fraction(a, s) * (1 if (c >> i) & 1 else -1) for i, a in enumerate(w))


@pytest.fixture
def f5():
    from scdim.concepts import F5
    return F5()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}")
