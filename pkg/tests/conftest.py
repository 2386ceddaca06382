import numpy as np
import pytest
from hypothesis import settings

from dppsp.core import run
from dppsp.graph import laplacian, mixing_from_laplacian, path_graph

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def identity_bound(N, inner_tol):
    return 10 * N * inner_tol


def assert_identity(trace, N):
    """alpha * sum_n cached_op equals sum_n (z^t - z^{t+1}) at every recorded round."""
    tol = identity_bound(N, trace.config["inner_tol"])
    worst = max(r.identity_residual for r in trace.records)
    assert worst <= tol, f"identity residual {worst:.3e} > {tol:.3e}"


@pytest.fixture
def checked_run():
    """``run`` that also asserts the summed-resolvent identity on every round."""

    def _run(problems, W, sets, cfg, z0=None):
        trace = run(problems, W, sets, cfg, z0=z0)
        assert not trace.partial, trace.error
        assert_identity(trace, W.n)
        return trace

    return _run


@pytest.fixture
def path3():
    g = path_graph(3)
    # L has eigenvalues 0, 1, 3; tau = 4 gives lambda_min(W) = 1/4
    return mixing_from_laplacian(laplacian(g), tau=4.0, graph=g)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail):
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
