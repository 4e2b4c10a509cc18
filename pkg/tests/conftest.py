import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from eulerext.generators import random_small_ee

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"
SWEEP_SEED = 2024
SWEEP_SIZE = 500

# filled by the acceptance tests, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def sweep():
    """The seeded EE sweep shared by the acceptance criteria."""
    rng = random.Random(SWEEP_SEED)
    return [random_small_ee(rng) for _ in range(SWEEP_SIZE)]


@pytest.fixture(scope="session")
def sweep_solutions(sweep):
    from eulerext.ee_solver import solve_ee

    return [solve_ee(inst) for inst in sweep]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
