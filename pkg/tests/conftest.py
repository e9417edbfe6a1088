import sys

import numpy as np
import pytest

from darkhole.model import ModelKind, SystemParams, scenario_preset, validate_params

KINDS = tuple(ModelKind)


def random_params(rng, kind, chi=0.0):
    """Autonomous parameter draw used by the property suites."""
    return validate_params(SystemParams(
        model_kind=kind,
        rabi_alpha=rng.uniform(0.05, 1) * np.exp(2j * np.pi * rng.uniform()),
        rabi_beta=rng.uniform(0.05, 1) * np.exp(2j * np.pi * rng.uniform()),
        detuning_alpha=rng.uniform(-1, 1),
        detuning_beta=rng.uniform(-1, 1),
        gamma_ac=rng.uniform(0.5, 2),
        gamma_bc=rng.uniform(0.5, 2),
        shift_A=rng.uniform(-0.5, 0.5),
        shift_B=rng.uniform(-0.5, 0.5),
        shift_C=rng.uniform(-0.5, 0.5),
        chi=chi,
    ))


def random_hermitian(rng):
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return 0.5 * (g + g.conj().T)


@pytest.fixture
def fig4():
    return scenario_preset("fig4").params


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if not module or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
