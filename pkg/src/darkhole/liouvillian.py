"""Rotating-frame Hamiltonian, relaxation model and the 9x9 generator.

Frame conventions
-----------------
Both field frequencies are absorbed into the slow variables.  For the two
electron kinds the energy origin is the (exchange corrected) level |A>, so

    H = [[0,      chi(t),                           conj(alpha)],
         [chi*(t), dB - dA + shift_B - shift_A,     conj(beta) ],
         [alpha,   beta,                 -dA + shift_C - shift_A]]

with ``<C|H|A> = alpha`` and ``<C|H|B> = beta`` (dA, dB the field detunings).
The exchange coupling keeps a residual time dependence
``chi(t) = chi * exp(-1j * delta * t)`` with ``delta = dA - dB``; it is stored as
harmonic k = -1 (and its conjugate as k = +1) of ``exp(1j * k * delta * t)``.

For the one-electron V kind the origin is the shared lower level |c>:
``H = [[-dA, 0, alpha], [0, -dB, beta], [conj(alpha), conj(beta), 0]]``.

Superoperators act on the column-stacked density matrix,
``vec(rho) = rho.flatten(order="F")``, so entry (i, j) sits at ``i + 3*j``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .model import A, B, C, ModelKind, ensure_valid, write_text_atomic

DIM = 3
_EYE = np.eye(DIM)


def vec(rho):
    return np.asarray(rho, dtype=complex).flatten(order="F")


def unvec(v):
    return np.asarray(v).reshape(DIM, DIM, order="F")


def vec_index(i, j):
    return i + DIM * j


def trace_row():
    """Row vector whose product with vec(rho) is Tr(rho)."""
    return vec(_EYE).real.astype(complex)


@dataclass(frozen=True)
class HamiltonianRWA:
    static_part: np.ndarray
    periodic_parts: tuple = ()
    modulation_delta: float = 0.0

    def at(self, t):
        H = self.static_part.astype(complex)
        for part, k in self.periodic_parts:
            H = H + part * np.exp(1j * k * self.modulation_delta * t)
        return H


@dataclass(frozen=True)
class RelaxationSpec:
    """Single-channel radiative relaxation.

    ``transfers`` holds ``(source, target, rate)`` population channels and
    ``coherence_decay[i, j]`` the damping rate of rho_ij (zero on the diagonal).
    """

    transfers: tuple
    coherence_decay: np.ndarray

    def decay_rate(self, i, j):
        return float(self.coherence_decay[i, j])


@dataclass(frozen=True)
class Liouvillian:
    static_part: np.ndarray
    periodic_parts: tuple = ()
    modulation_delta: float = 0.0

    @property
    def autonomous(self):
        return not self.periodic_parts

    def at(self, t):
        L = self.static_part
        for part, k in self.periodic_parts:
            L = L + part * np.exp(1j * k * self.modulation_delta * t)
        return L

    def parts(self):
        yield self.static_part, 0
        yield from self.periodic_parts


def build_hamiltonian_rwa(params):
    p = ensure_valid(params)
    alpha, beta = p.rabi_alpha, p.rabi_beta
    da, db = p.detuning_alpha, p.detuning_beta
    H = np.zeros((DIM, DIM), dtype=complex)
    if p.model_kind is ModelKind.V_ONE_ELECTRON:
        H[0, 0] = -da
        H[1, 1] = -db
        H[0, 2], H[2, 0] = alpha, np.conj(alpha)
        H[1, 2], H[2, 1] = beta, np.conj(beta)
        return HamiltonianRWA(H)

    H[B, B] = db - da
    H[C, C] = -da
    H[C, A], H[A, C] = alpha, np.conj(alpha)
    H[C, B], H[B, C] = beta, np.conj(beta)
    if not p.has_ee:
        return HamiltonianRWA(H)

    H[B, B] += p.shift_B - p.shift_A
    H[C, C] += p.shift_C - p.shift_A
    delta = p.modulation_delta
    if p.chi == 0:
        return HamiltonianRWA(H)
    if delta == 0:
        H[A, B] += p.chi
        H[B, A] += np.conj(p.chi)
        return HamiltonianRWA(H)
    lower = np.zeros((DIM, DIM), dtype=complex)
    lower[A, B] = p.chi
    return HamiltonianRWA(H, ((lower, -1), (lower.conj().T, 1)), delta)


def build_relaxation(params):
    p = ensure_valid(params)
    if p.model_kind is ModelKind.V_ONE_ELECTRON:
        # |a> -> |c> at gamma_ac, |b> -> |c> at gamma_bc
        transfers = ((0, 2, p.gamma_ac), (1, 2, p.gamma_bc))
    else:
        # hole moves from c to a (C -> A) or from c to b (C -> B)
        transfers = ((C, A, p.gamma_ac), (C, B, p.gamma_bc))
    out = np.zeros(DIM)
    for source, _, rate in transfers:
        out[source] += rate
    decay = 0.5 * (out[:, None] + out[None, :])
    np.fill_diagonal(decay, 0.0)
    transfers = tuple(t for t in transfers if t[2] != 0)
    return RelaxationSpec(transfers, decay)


def commutator_superop(H):
    """Superoperator of rho -> -i [H, rho] in the column-stacked convention."""
    H = np.asarray(H, dtype=complex)
    return -1j * (np.kron(_EYE, H) - np.kron(H.T, _EYE))


def relaxation_superop(r):
    R = np.zeros((DIM * DIM, DIM * DIM), dtype=complex)
    for source, target, rate in r.transfers:
        R[vec_index(target, target), vec_index(source, source)] += rate
        R[vec_index(source, source), vec_index(source, source)] -= rate
    for i in range(DIM):
        for j in range(DIM):
            if i != j:
                R[vec_index(i, j), vec_index(i, j)] -= r.coherence_decay[i, j]
    return R


def assemble_liouvillian(h, r):
    static = commutator_superop(h.static_part) + relaxation_superop(r)
    periodic = tuple((commutator_superop(part), k) for part, k in h.periodic_parts)
    return Liouvillian(static, periodic, h.modulation_delta)


def build_liouvillian(params):
    p = ensure_valid(params)
    return assemble_liouvillian(build_hamiltonian_rwa(p), build_relaxation(p))


def rhs(rho, t, L):
    """d(rho)/dt at time ``t``."""
    return unvec(L.at(t) @ vec(rho))


def liouvillian_csv(L):
    """Row-major ``re,im`` dump of every part, one block per harmonic."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for part, k in L.parts():
        writer.writerow([f"# harmonic {k}", f"delta={L.modulation_delta!r}"])
        for row in part:
            cells = []
            for z in row:
                cells.extend((repr(float(z.real)), repr(float(z.imag))))
            writer.writerow(cells)
    return buf.getvalue()


def dump_liouvillian_csv(L, path):
    write_text_atomic(path, liouvillian_csv(L))
