from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from relk import lca
from relk.core_algebra import RatMatrix, free, make_triple

settings.register_profile(
    "relk", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("relk")

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def rationals(bound: int = 100):
    return st.builds(Fraction, st.integers(-bound, bound), st.integers(1, bound))


@st.composite
def matrices(draw, rows: int, cols: int, bound: int = 100):
    return RatMatrix.of([[draw(rationals(bound)) for _ in range(cols)] for _ in range(rows)], cols=cols)


@st.composite
def invertible_matrices(draw, n: int, bound: int = 100):
    m = draw(matrices(n, n, bound).filter(lambda m: m.det() != 0))
    return m


@st.composite
def triples(draw, max_rank: int = 3, same_module: bool = False):
    n = draw(st.integers(0, max_rank))
    P = free(n, "P")
    Q = P if same_module else free(n, "Q")
    return make_triple(P, draw(invertible_matrices(n)), Q)


def pytest_collection_modifyitems(session, config, items):
    """Run the acceptance suite last so its engine check covers every other test."""
    last = [i for i in items if i.module.__name__.endswith("test_acceptance")]
    first = [i for i in items if i not in last]
    items[:] = first + last


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    terminalreporter.write_line(f"normal form vs evaluation disagreements: {lca.disagreement_events}")


@pytest.fixture
def record():
    def _record(n: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS[n] = (ok, detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")

    return _record
