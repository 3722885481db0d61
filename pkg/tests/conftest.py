import numpy as np
import pytest

from evmfem.harness.cases import CASES
from evmfem.harness.study import run_pipeline
from evmfem.mesh import DomainSpec, build_mesh


def side_by_side_spec(coarse_n=2, ratio=2):
    """Two blocks split by the vertical line x = 1/2, left coarse, right fine."""
    return DomainSpec.checkerboard(coarse_n, ratio, blocks=(2, 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture(scope="session")
def ex1_coarse():
    """Example 1 on the coarsest level (H = 1/48, fine 1/96)."""
    return run_pipeline(CASES["example1"], DomainSpec.checkerboard(24, 2, (2, 2)))


@pytest.fixture(scope="session")
def ex3_coarse():
    return run_pipeline(CASES["example3"], DomainSpec.checkerboard(4, 2, (3, 3)))


@pytest.fixture(scope="session")
def patch_exact():
    """Linear pressure on a non-matching mesh whose interface is normal to grad p."""
    return run_pipeline(CASES["patch"], side_by_side_spec(2))


@pytest.fixture
def small_mesh():
    return build_mesh(DomainSpec.checkerboard(2, 2, (2, 2)))


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance
    if test_acceptance.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(test_acceptance.VERDICTS):
            terminalreporter.write_line(test_acceptance.VERDICTS[key])
