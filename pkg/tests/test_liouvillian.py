import numpy as np
import pytest

from conftest import KINDS, random_hermitian, random_params
from darkhole.liouvillian import (
    build_hamiltonian_rwa,
    build_liouvillian,
    build_relaxation,
    dump_liouvillian_csv,
    rhs,
    unvec,
    vec,
    vec_index,
)
from darkhole.model import A, B, C, ModelKind, SystemParams, projector, pure_state


def lindblad_rhs(rho, H, jumps):
    """Reference master equation written out directly."""
    out = -1j * (H @ rho - rho @ H)
    for Lk in jumps:
        LdL = Lk.conj().T @ Lk
        out += Lk @ rho @ Lk.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def oracle_hamiltonian(p, t):
    a, b = p.rabi_alpha, p.rabi_beta
    da, db = p.detuning_alpha, p.detuning_beta
    if p.model_kind is ModelKind.V_ONE_ELECTRON:
        return np.array([[-da, 0, a], [0, -db, b], [np.conj(a), np.conj(b), 0]])
    sA = sB = sC = 0.0
    chi = 0j
    if p.model_kind is ModelKind.LAMBDA_TWO_ELECTRON_EE:
        sA, sB, sC, chi = p.shift_A, p.shift_B, p.shift_C, p.chi
    chit = chi * np.exp(-1j * (da - db) * t)
    return np.array([
        [0, chit, np.conj(a)],
        [np.conj(chit), db - da + sB - sA, np.conj(b)],
        [a, b, -da + sC - sA],
    ])


def oracle_jumps(p):
    def op(target, source, rate):
        m = np.zeros((3, 3))
        m[target, source] = np.sqrt(rate)
        return m
    if p.model_kind is ModelKind.V_ONE_ELECTRON:
        return [op(2, 0, p.gamma_ac), op(2, 1, p.gamma_bc)]
    return [op(A, C, p.gamma_ac), op(B, C, p.gamma_bc)]


@pytest.mark.parametrize("kind", KINDS)
def test_generator_matches_lindblad_oracle(kind, rng):
    for _ in range(20):
        p = random_params(rng, kind, chi=complex(*rng.normal(size=2)) * 0.5)
        L = build_liouvillian(p)
        for _ in range(3):
            rho = random_hermitian(rng)
            t = rng.uniform(0, 30)
            expected = lindblad_rhs(rho, oracle_hamiltonian(p, t), oracle_jumps(p))
            assert np.max(np.abs(rhs(rho, t, L) - expected)) < 1e-13


def test_static_hamiltonian_without_exchange():
    p = SystemParams(rabi_alpha=0.1, rabi_beta=0.1, gamma_ac=1, gamma_bc=1)
    h = build_hamiltonian_rwa(p)
    assert h.periodic_parts == ()
    assert np.all(np.diag(h.static_part) == 0)
    assert h.static_part[C, A] == h.static_part[C, B] == 0.1
    assert h.static_part[A, B] == 0


def test_fields_off_hamiltonian_is_diagonal(rng):
    for kind in KINDS:
        p = random_params(rng, kind).replace(rabi_alpha=0, rabi_beta=0)
        H = build_hamiltonian_rwa(p).static_part
        assert np.all(H == np.diag(np.diag(H)))


def test_exchange_sits_in_first_harmonics():
    p = SystemParams(model_kind=ModelKind.LAMBDA_TWO_ELECTRON_EE, chi=0.3,
                     detuning_alpha=0.2, gamma_ac=1, gamma_bc=1)
    h = build_hamiltonian_rwa(p)
    assert h.modulation_delta == pytest.approx(0.2)
    assert sorted(k for _, k in h.periodic_parts) == [-1, 1]
    parts = dict((k, m) for m, k in h.periodic_parts)
    assert parts[-1][A, B] == 0.3 and parts[1][B, A] == 0.3
    assert h.static_part[A, B] == 0
    L = build_liouvillian(p)
    assert not L.autonomous
    t = 1.7
    H = h.at(t)
    assert H[A, B] == pytest.approx(0.3 * np.exp(-0.2j * t))


def test_raman_resonance_makes_exchange_static(fig4):
    h = build_hamiltonian_rwa(fig4)
    assert h.periodic_parts == ()
    assert h.static_part[A, B] == 0.3


@pytest.mark.parametrize("gac, gbc, channels, rate", [
    (1.0, 1.0, {(C, A), (C, B)}, 1.0),
    (0.0, 0.0, set(), 0.0),
    (2.0, 0.0, {(C, A)}, 1.0),
])
def test_relaxation_rates(gac, gbc, channels, rate):
    r = build_relaxation(SystemParams(gamma_ac=gac, gamma_bc=gbc))
    assert {(s, t) for s, t, _ in r.transfers} == channels
    assert r.decay_rate(A, C) == r.decay_rate(B, C) == rate
    assert r.decay_rate(A, B) == 0


def test_v_relaxation_rates():
    r = build_relaxation(SystemParams(model_kind=ModelKind.V_ONE_ELECTRON, gamma_ac=2, gamma_bc=1))
    assert r.decay_rate(0, 1) == 1.5
    assert r.decay_rate(0, 2) == 1.0
    assert r.decay_rate(1, 2) == 0.5


def test_bare_decay_block():
    L = build_liouvillian(SystemParams(gamma_ac=1, gamma_bc=1)).static_part
    cc = vec_index(C, C)
    assert L[vec_index(A, A), cc] == 1
    assert L[vec_index(B, B), cc] == 1
    assert L[cc, cc] == -2


def test_excited_state_rhs():
    d = rhs(projector(C), 0.0, build_liouvillian(SystemParams(gamma_ac=1, gamma_bc=1)))
    assert np.allclose(np.diag(d).real, [1, 1, -2], atol=0)
    assert np.all(d[~np.eye(3, dtype=bool)] == 0)


def test_dark_state_is_stationary():
    p = SystemParams(model_kind=ModelKind.LAMBDA_TWO_ELECTRON_EE, rabi_alpha=0.1, rabi_beta=0.1,
                     gamma_ac=1, gamma_bc=1, detuning_alpha=0.4, detuning_beta=0.4)
    D = pure_state(np.array([1, -1, 0]) / np.sqrt(2))
    assert np.max(np.abs(rhs(D, 3.0, build_liouvillian(p)))) <= 1e-14


@pytest.mark.parametrize("kind", KINDS)
def test_trace_and_hermiticity_preserved(kind, rng):
    p = random_params(rng, kind, chi=0.4 - 0.2j)
    L = build_liouvillian(p)
    for _ in range(100):
        rho = random_hermitian(rng)
        d = rhs(rho, rng.uniform(0, 50), L)
        assert abs(np.trace(d)) <= 1e-13
        assert np.max(np.abs(d - d.conj().T)) <= 1e-12


def test_zero_exchange_equals_plain_lambda(rng):
    p = random_params(rng, ModelKind.LAMBDA_TWO_ELECTRON_EE).replace(shift_A=0, shift_B=0, shift_C=0)
    plain = build_liouvillian(p.replace(model_kind=ModelKind.LAMBDA_TWO_ELECTRON))
    ee = build_liouvillian(p)
    assert ee.autonomous
    assert np.max(np.abs(ee.static_part - plain.static_part)) <= 1e-15


def test_vec_convention():
    rho = np.arange(9).reshape(3, 3)
    v = vec(rho)
    for i in range(3):
        for j in range(3):
            assert v[vec_index(i, j)] == rho[i, j]
    assert np.array_equal(unvec(v), rho)


def test_csv_dump(tmp_path):
    p = SystemParams(model_kind=ModelKind.LAMBDA_TWO_ELECTRON_EE, chi=0.3,
                     detuning_alpha=0.2, gamma_ac=1, gamma_bc=1)
    path = tmp_path / "L.csv"
    dump_liouvillian_csv(build_liouvillian(p), path)
    lines = path.read_text().splitlines()
    assert len(lines) == 3 * 10
    assert all(len(line.split(",")) == 18 for line in lines if not line.startswith("#"))
