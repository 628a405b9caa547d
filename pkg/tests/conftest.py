import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from morreylab.grid import GridFunction

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def grid_functions(draw, n=1, max_extent=2, max_gen=3, min_gen=0):
    """Sparse nonnegative 1D (or 2D) grid functions on small lattices."""
    extent = draw(st.integers(0, max_extent))
    gen = draw(st.integers(min_gen, max_gen))
    cells = 2 ** (extent + 1 + gen)
    size = cells**n
    vals = draw(
        st.lists(
            st.one_of(st.just(0.0), st.floats(0.01, 10.0)),
            min_size=size,
            max_size=size,
        )
    )
    return GridFunction(n, extent, gen, np.array(vals))


@st.composite
def grid_pairs(draw, max_extent=2, max_gen=3, min_gen=0, nonzero=False):
    f = draw(grid_functions(max_extent=max_extent, max_gen=max_gen, min_gen=min_gen))
    size = f.cells
    elems = st.floats(0.01, 10.0) if nonzero else st.one_of(st.just(0.0), st.floats(0.01, 10.0))
    vals = draw(st.lists(elems, min_size=size, max_size=size))
    if nonzero:
        vals0 = np.maximum(f.values, 0.01)
        f = f.with_values(vals0)
    return f, f.with_values(np.array(vals))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
    missing = [k for k in range(1, 12) if k not in RESULTS]
    for k in missing:
        terminalreporter.write_line(f"criterion {k:2d} NOT RUN")
