import numpy as np
import pytest

from conftest import KINDS, random_params
from darkhole.dynamics import IntegrationPolicy, integrate
from darkhole.errors import DarkholeError
from darkhole.liouvillian import build_liouvillian, vec
from darkhole.model import C, ModelKind, SystemParams, mixed_state
from darkhole.steadystate import steady_state_nullspace


def test_fields_off_manifold_is_four_dimensional():
    L = build_liouvillian(SystemParams(gamma_ac=1, gamma_bc=1))
    res = steady_state_nullspace(L)
    assert res.degenerate and res.status == "DEGENERATE"
    assert res.null_dim == 4
    assert res.rho is None
    for m in res.basis:
        assert abs(m[C, C]) < 1e-12
        assert np.max(np.abs(L.static_part @ vec(m))) < 1e-12


def test_fig4_resonant_is_dark_state(fig4):
    res = steady_state_nullspace(build_liouvillian(fig4))
    assert res.null_dim == 1
    D = np.array([[0.5, -0.5, 0], [-0.5, 0.5, 0], [0, 0, 0]])
    assert np.max(np.abs(res.rho - D)) <= 1e-10
    assert res.residual < 1e-14


def test_v_system_stays_mostly_in_ground(fig4):
    res = steady_state_nullspace(build_liouvillian(fig4.replace(model_kind=ModelKind.V_ONE_ELECTRON)))
    assert not res.degenerate
    assert res.rho[2, 2].real > 0.9
    assert res.rho[0, 0].real > 1e-4 and res.rho[1, 1].real > 1e-4


def test_time_dependent_generator_rejected(fig4):
    with pytest.raises(DarkholeError) as err:
        steady_state_nullspace(build_liouvillian(fig4.replace(detuning_alpha=0.1)))
    assert err.value.code == "TIME_DEPENDENT_GENERATOR"


def test_agrees_with_long_integration(rng):
    for i in range(20):
        p = random_params(rng, KINDS[i % 3])
        L = build_liouvillian(p)
        ss = steady_state_nullspace(L)
        traj = integrate(mixed_state(), L, IntegrationPolicy(max_time=2000, record_stride=10**6))
        assert np.max(np.abs(traj.final_state - ss.rho)) <= 1e-6
        assert np.allclose(ss.rho, ss.rho.conj().T, atol=1e-12)
        assert np.trace(ss.rho) == pytest.approx(1, abs=1e-12)
