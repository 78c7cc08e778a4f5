import pytest
from hypothesis import HealthCheck, settings

from slepian_max.montecarlo import McSpec, simulate_running_max

settings.register_profile(
    "repo", deadline=None, max_examples=60, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

# lines reported by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_paths():
    """50k paths on [0, 1], grid and continuous maxima, a few probe values."""
    spec = McSpec(paths=50_000, grid_step=1e-4, master_seed=7)
    return simulate_running_max(
        spec, [0.0, 0.25, 0.5, 1.0], 1.0, continuous=True, probe_times=[0.0, 0.2, 0.5, 0.7, 1.0]
    )
