"""Dark and bright states, hole observables, dressed levels and the
one-electron V versus two-electron Lambda trapping comparison."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DarkholeError
from .liouvillian import build_hamiltonian_rwa, build_liouvillian
from .model import A, B, C, ModelKind, ensure_valid, pure_state
from .steadystate import steady_state_nullspace

DARK = "DARK"
BRIGHT = "BRIGHT"


@dataclass(frozen=True)
class SuperpositionState:
    """Normalised superposition of the two levels coupled to the shared one."""

    c_first: complex
    c_second: complex
    label: str

    @property
    def coefficients(self):
        return np.array([self.c_first, self.c_second])

    def vector(self):
        return np.array([self.c_first, self.c_second, 0.0], dtype=complex)

    def density_matrix(self):
        return pure_state(self.vector())


def dark_bright_basis(alpha, beta, one_electron=False):
    """Dark and bright combinations for Rabi frequencies ``alpha``, ``beta``.

    Two-electron system (``<C|H|A> = alpha``):
    ``DARK = (beta|A> - alpha|B>)/N`` so that ``<C|H|DARK> = 0``.  For the
    one-electron V system (``<a|H|c> = alpha``) the upper-level combination
    uncoupled from |c> is ``(conj(beta)|a> - conj(alpha)|b>)/N``.  Equal real
    Rabi frequencies give ``(|1> - |2>)/sqrt(2)`` in both cases.
    """
    alpha, beta = complex(alpha), complex(beta)
    norm = np.hypot(abs(alpha), abs(beta))
    if norm == 0:
        raise DarkholeError("BOTH_FIELDS_ZERO", "dark state undefined without fields")
    if one_electron:
        alpha, beta = alpha.conjugate(), beta.conjugate()
    dark = SuperpositionState(beta / norm, -alpha / norm, DARK)
    bright = SuperpositionState(alpha.conjugate() / norm, beta.conjugate() / norm, BRIGHT)
    return dark, bright


@dataclass(frozen=True)
class HoleDistribution:
    p_hole_a: float
    p_hole_b: float
    p_hole_c: float
    n_a: float
    n_b: float
    n_c: float

    @property
    def total_hole(self):
        return self.p_hole_a + self.p_hole_b + self.p_hole_c

    @property
    def total_electrons(self):
        return self.n_a + self.n_b + self.n_c


def hole_population(rho, model_kind=ModelKind.LAMBDA_TWO_ELECTRON):
    """Where the empty single-electron level sits.

    |A> has electrons in c and b, so its hole is in a; |B> leaves b empty and
    |C> leaves c empty.
    """
    if not ModelKind(model_kind).two_electron:
        raise DarkholeError("WRONG_MODEL_KIND", "hole picture needs two electrons")
    rho = np.asarray(rho)
    pa, pb, pc = (float(rho[i, i].real) for i in (A, B, C))
    return HoleDistribution(pa, pb, pc, pb + pc, pa + pc, pa + pb)


def dressed_energies(params):
    """Sorted eigenvalues of the static rotating-frame Hamiltonian.

    Only meaningful when the exchange coupling is static, i.e. on Raman
    resonance or with ``chi = 0``.
    """
    p = ensure_valid(params)
    h = build_hamiltonian_rwa(p)
    if h.periodic_parts:
        raise DarkholeError("TIME_DEPENDENT_GENERATOR",
                            "exchange coupling oscillates; evaluate at detuning_alpha = detuning_beta")
    return np.linalg.eigvalsh(h.static_part)


def exchange_splitting(params):
    """Splitting of the |A>, |B> pair by the exchange coupling alone."""
    p = ensure_valid(params)
    if not p.has_ee:
        return 0.0
    s = p.shift_B - p.shift_A
    return float(np.sqrt(s * s + 4 * abs(p.chi) ** 2))


def predicted_satellites(params):
    """Detunings where the satellite dark resonances are expected.

    The exchange coupling oscillates at ``detuning_alpha - detuning_beta`` and
    splits the lower pair; a two-photon resonance between the two split
    levels needs that oscillation frequency to match the splitting.  Weak
    fields are assumed (light shifts ignored).
    """
    p = ensure_valid(params)
    split = exchange_splitting(p)
    if split == 0:
        return ()
    centre = p.detuning_beta + (p.shift_B - p.shift_A if p.has_ee else 0.0)
    return (centre - split, centre + split)


@dataclass(frozen=True)
class TrappingReport:
    fluorescence_v: float
    fluorescence_lambda: float
    rho_v: np.ndarray
    rho_lambda: np.ndarray | None
    hole: HoleDistribution | None
    lambda_degenerate: bool

    @property
    def trapping_ratio(self):
        if self.lambda_degenerate:
            return float("nan")
        f = abs(self.fluorescence_lambda)
        return float("inf") if f == 0 else self.fluorescence_v / f

    CSV_HEADER = ("F_V", "F_Lambda", "ratio", "lambda_degenerate",
                  "p_hole_a", "p_hole_b", "p_hole_c")

    def csv_row(self):
        hole = self.hole
        holes = (hole.p_hole_a, hole.p_hole_b, hole.p_hole_c) if hole else (float("nan"),) * 3
        values = (self.fluorescence_v, self.fluorescence_lambda, self.trapping_ratio)
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerow(
            [f"{v:.17g}" for v in values] + [str(self.lambda_degenerate)] + [f"{v:.17g}" for v in holes])
        return buf.getvalue()

    def render(self):
        rows = [
            ("V fluorescence F_V", f"{self.fluorescence_v:.6e}"),
            ("Lambda fluorescence F_L", f"{self.fluorescence_lambda:.6e}"),
            ("trapping ratio F_V/F_L", f"{self.trapping_ratio:.6e}"),
        ]
        if self.lambda_degenerate:
            rows.append(("Lambda steady state", "DEGENERATE"))
        if self.hole is not None:
            rows += [
                ("hole in a", f"{round(self.hole.p_hole_a, 6) + 0.0:.6f}"),
                ("hole in b", f"{round(self.hole.p_hole_b, 6) + 0.0:.6f}"),
                ("hole in c", f"{round(self.hole.p_hole_c, 6) + 0.0:.6f}"),
            ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v:>14}" for k, v in rows)


def compare_v_lambda(params):
    """Steady fluorescence of the one-electron V and the two-electron Lambda
    system driven by the same fields and decays on Raman resonance."""
    p = ensure_valid(params)
    if p.detuning_alpha != p.detuning_beta:
        raise DarkholeError("NOT_RAMAN_RESONANT", "comparison needs detuning_alpha == detuning_beta")
    if p.has_ee and p.chi != 0:
        raise DarkholeError("CHI_NONZERO", "comparison needs chi = 0")
    v = steady_state_nullspace(build_liouvillian(p.replace(model_kind=ModelKind.V_ONE_ELECTRON)))
    if v.degenerate:
        raise DarkholeError("DEGENERATE", "V steady state is not unique (decay rates zero?)")
    lam = steady_state_nullspace(build_liouvillian(p.replace(model_kind=ModelKind.LAMBDA_TWO_ELECTRON)))
    f_v = p.gamma_ac * v.rho[0, 0].real + p.gamma_bc * v.rho[1, 1].real
    if lam.degenerate:
        # every state of the steady manifold has rho_CC = 0
        return TrappingReport(float(f_v), 0.0, v.rho, None, None, True)
    # rho_CC can come out at -1e-19 on exact trapping
    f_l = (p.gamma_ac + p.gamma_bc) * max(lam.rho[C, C].real, 0.0)
    return TrappingReport(float(f_v), float(f_l), v.rho, lam.rho,
                          hole_population(lam.rho), False)
