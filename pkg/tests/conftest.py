"""Shared instances and helpers."""
import numpy as np
import pytest

from robust_lotsize import Continuous, Discrete, FeasibleSet, Instance, ProductionPlan, kernels


def fractional_vertex_instance(u=None):
    """Three periods whose worst continuous deviation is fractional."""
    feasible = FeasibleSet.box(3, u=u) if u is not None else None
    inst = Instance.build([3, 4, 5], [3, 2, 1], Continuous(4.0), c_i=1.0, c_b=2.0, feasible=feasible)
    return inst, ProductionPlan([0.0, 0.0, 5.0])


def three_period_overlap(gamma=2, u=None):
    """Overlapping demand bands 3+-2, 6+-3, 6+-1."""
    feasible = FeasibleSet.box(3, u=u) if u is not None else None
    return Instance.build([3, 6, 6], [2, 3, 1], Discrete(gamma), c_i=1.0, c_b=1.0, feasible=feasible)


def single_period(budget, u=10.0):
    return Instance.build([5], [2], budget, c_i=1.0, c_b=1.0, feasible=FeasibleSet.box(1, u=[u]))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.BACKEND
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)



ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
