"""Literal evaluation of the published two-electron equations of motion.

The simulation never uses these equations.  They are evaluated term by term as
printed and compared with the generator built in :mod:`darkhole.liouvillian`,
so that every place where the two disagree is visible and attributable.

The printed exchange terms carry the factors ``exp(+-1j*(w_a - w_b)*t)`` and
``exp(+-1j*(w_alpha - w_beta)*t)``.  In the field-rotating frame both are
evaluated as the residual phase ``exp(+-1j*delta*t)`` with
``delta = detuning_alpha - detuning_beta``; with that single substitution every
printed exchange term matches the derived one exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DarkholeError
from .liouvillian import build_liouvillian, rhs
from .model import A, B, C, ModelKind, ensure_valid

EQUATIONS = ("rho_AA", "rho_BB", "rho_CC", "rho_AB", "rho_AC", "rho_BC")
_ENTRY = {"rho_AA": (A, A), "rho_BB": (B, B), "rho_CC": (C, C),
          "rho_AB": (A, B), "rho_AC": (A, C), "rho_BC": (B, C)}

DEFAULT_TOL = 1e-13


@dataclass(frozen=True)
class SuspectTerm:
    key: str
    equation: str
    label: str
    printed: str
    derived: str
    contribution: float


@dataclass(frozen=True)
class EquationDiff:
    equation: str
    label: str
    printed: complex
    derived: complex

    @property
    def difference(self):
        return abs(self.printed - self.derived)


@dataclass(frozen=True)
class DiscrepancyReport:
    model_kind: ModelKind
    t: float
    equations: tuple
    suspect_terms: tuple
    tol: float = DEFAULT_TOL

    @property
    def max_discrepancy(self):
        return max((e.difference for e in self.equations), default=0.0)

    @property
    def localized(self):
        """Equations whose printed and derived right-hand sides differ."""
        return tuple(e.equation for e in self.equations if e.difference > self.tol)

    @property
    def active_suspects(self):
        return tuple(s for s in self.suspect_terms if s.contribution > self.tol)


def printed_rhs(params, rho, t):
    """Right-hand sides exactly as published, in the order of ``EQUATIONS``.

    Without exchange the first group of equations is used; for
    ``LAMBDA_TWO_ELECTRON_EE`` the extended group, including the terms that
    disagree with the Hamiltonian derivation.
    """
    p = ensure_valid(params)
    if not p.model_kind.two_electron:
        raise DarkholeError("WRONG_MODEL_KIND", "published equations exist only for the two-electron system")
    r = np.asarray(rho, dtype=complex)
    cj = np.conj
    a, b = p.rabi_alpha, p.rabi_beta
    da, db = p.detuning_alpha, p.detuning_beta
    g_ca, g_cb = p.gamma_ac, p.gamma_bc
    G_ab, G_ac, G_bc = 0.0, 0.5 * (g_ca + g_cb), 0.5 * (g_ca + g_cb)
    AA, BB, CC = r[A, A], r[B, B], r[C, C]
    AB, AC, BC = r[A, B], r[A, C], r[B, C]

    dAA = 1j * (AC * a - cj(AC) * cj(a)) + g_ca * CC
    dBB = 1j * (BC * b - cj(BC) * cj(b)) + g_cb * CC
    dCC = 1j * (-AC * a + cj(AC) * cj(a) - BC * b + cj(BC) * cj(b)) - (g_ca + g_cb) * CC
    dAB = 1j * (-AC * (da - db) + AC * b - cj(BC) * cj(a)) - G_ab * AB
    dAC = 1j * (-AC * da + cj(a) * (AA - CC) + AB * cj(b)) - G_ac * AC
    dBC = 1j * (-BC * db + cj(b) * (BB - CC) + cj(AB) * cj(a)) - G_bc * BC

    if p.has_ee:
        chi = p.chi
        sA, sB, sC = p.shift_A, p.shift_B, p.shift_C
        # exp(i(w_a - w_b)t) and exp(i(w_alpha - w_beta)t), see module docstring
        f_ab = np.exp(1j * p.modulation_delta * t)
        f_fields = f_ab
        dAA += 1j * (AB * cj(chi) * f_ab - cj(AB) * chi * cj(f_ab))
        dBB += 1j * (cj(AB) * chi * cj(f_ab) - AB * cj(chi) * f_ab)
        dAB += 1j * ((AA - BB) * chi * cj(f_ab) + AB * (sA - sB))
        dAC += 1j * (AC * (sC - sA) - BC * chi * cj(f_fields))
        dBC += 1j * (BC * (sC - sA) - AC * cj(chi) * f_fields)
    return (dAA, dBB, dCC, dAB, dAC, dBC)


def _suspects(p, rho):
    r = np.asarray(rho, dtype=complex)
    terms = [SuspectTerm(
        "detuning-coherence", "rho_AB", "Raman detuning term of drho_AB/dt",
        "-rho_AC (detuning_alpha - detuning_beta)",
        "-rho_AB (detuning_alpha - detuning_beta)",
        float(abs(p.modulation_delta * (r[A, B] - r[A, C]))),
    )]
    if p.has_ee:
        terms.append(SuspectTerm(
            "shift-sign", "rho_AB", "level shift term of drho_AB/dt",
            "+rho_AB (shift_A - shift_B)",
            "-rho_AB (shift_A - shift_B)",
            float(abs(2 * (p.shift_A - p.shift_B) * r[A, B])),
        ))
        terms.append(SuspectTerm(
            "shift-origin", "rho_BC", "level shift term of drho_BC/dt",
            "+rho_BC (shift_C - shift_A)",
            "+rho_BC (shift_C - shift_B)",
            float(abs((p.shift_B - p.shift_A) * r[B, C])),
        ))
    return tuple(terms)


def crosscheck_published_equations(params, rho, t=0.0, tol=DEFAULT_TOL):
    """Compare the published and the derived right-hand sides on one state."""
    p = ensure_valid(params)
    printed = printed_rhs(p, rho, t)
    derived = rhs(rho, t, build_liouvillian(p))
    group = "with exchange" if p.has_ee else "without exchange"
    equations = tuple(
        EquationDiff(name, f"d{name}/dt {group}", complex(value), complex(derived[_ENTRY[name]]))
        for name, value in zip(EQUATIONS, printed)
    )
    return DiscrepancyReport(p.model_kind, float(t), equations, _suspects(p, rho), tol)


def random_density_matrix(rng, dim=3):
    """Random full-rank state from a complex Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


@dataclass(frozen=True)
class CrosscheckSummary:
    samples: int
    max_per_equation: dict
    suspect_terms: tuple
    localized: tuple


def crosscheck_samples(params, samples, seed=0, t_max=10.0, tol=DEFAULT_TOL):
    """Run the cross-check on ``samples`` random states and times."""
    p = ensure_valid(params)
    rng = np.random.default_rng(seed)
    worst = {name: 0.0 for name in EQUATIONS}
    contrib = {}
    catalogue = _suspects(p, np.zeros((3, 3)))
    for _ in range(samples):
        rho = random_density_matrix(rng)
        t = float(rng.uniform(0.0, t_max))
        report = crosscheck_published_equations(p, rho, t, tol)
        for e in report.equations:
            worst[e.equation] = max(worst[e.equation], e.difference)
        for s in report.suspect_terms:
            contrib[s.key] = max(contrib.get(s.key, 0.0), s.contribution)
    suspects = tuple(
        SuspectTerm(s.key, s.equation, s.label, s.printed, s.derived, contrib.get(s.key, 0.0))
        for s in catalogue
    )
    if samples == 0:
        return CrosscheckSummary(0, {}, (), ())
    localized = tuple(name for name in EQUATIONS if worst[name] > tol)
    return CrosscheckSummary(samples, worst, suspects, localized)
