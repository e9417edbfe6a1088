"""Time integration of the master equation and windowed averaging.

Two integrators are available: a fixed-step classical Runge-Kutta scheme
(written out here so that its step map can be reused by the periodic engine
below) and scipy's adaptive Dormand-Prince ``RK45`` driven step by step.  After
every step the state is re-symmetrised, ``rho <- (rho + rho^dagger)/2``, and the
size of that correction is tracked on the trajectory.

When the exchange coupling oscillates (``delta != 0``) the quasi-steady
observables are the time averages over whole modulation periods.
:func:`periodic_average` does exactly the RK4 integration plus trapezoidal
averaging, organised around the one-period step map so long burn-ins and
windows cost a handful of matrix products.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import RK45

from .errors import DarkholeError, NotConvergedError
from .liouvillian import DIM, unvec, vec
from .model import check_density_matrix, write_text_atomic

log = logging.getLogger(__name__)

RK4_FIXED = "RK4_FIXED"
RK45_ADAPTIVE = "RK45_ADAPTIVE"

MIN_STEP = 1e-12
HERMITIZE_WARN = 1e-10
DRIFT_TOL = 1e-4

OBSERVABLES = ("rho_AA", "rho_BB", "rho_CC", "re_rho_AB", "im_rho_AB",
               "re_rho_AC", "im_rho_AC", "re_rho_BC", "im_rho_BC")

_D = DIM * DIM
# vec index of (i, j) -> vec index of (j, i)
_HERM_PERM = np.array([k // DIM + DIM * (k % DIM) for k in range(_D)])


def observables_of(states):
    """Observable table (n, 9) in the order of ``OBSERVABLES``."""
    s = np.asarray(states)
    return np.stack([
        s[:, 0, 0].real, s[:, 1, 1].real, s[:, 2, 2].real,
        s[:, 0, 1].real, s[:, 0, 1].imag,
        s[:, 0, 2].real, s[:, 0, 2].imag,
        s[:, 1, 2].real, s[:, 1, 2].imag,
    ], axis=1)


@dataclass(frozen=True)
class IntegrationPolicy:
    """How to integrate.

    For ``RK4_FIXED`` the step should stay below about 0.1 over the largest
    rate or frequency in the generator; ``tolerance`` is used by
    ``RK45_ADAPTIVE`` for both ``rtol`` and ``atol``.
    """

    method: str = RK4_FIXED
    step: float = 0.05
    tolerance: float = 1e-10
    max_time: float = 100.0
    record_stride: int = 1

    def __post_init__(self):
        if self.method not in (RK4_FIXED, RK45_ADAPTIVE):
            raise DarkholeError("INVALID_POLICY", f"unknown method {self.method!r}")
        if not self.step > 0:
            raise DarkholeError("INVALID_POLICY", "step must be positive")
        if not 1e-14 < self.tolerance < 1e-3:
            raise DarkholeError("INVALID_POLICY", "tolerance must lie in (1e-14, 1e-3)")
        if not self.max_time > 0:
            raise DarkholeError("INVALID_POLICY", "max_time must be positive")
        if int(self.record_stride) < 1:
            raise DarkholeError("INVALID_POLICY", "record_stride must be a positive integer")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    modulation_delta: float = 0.0
    max_hermitize_correction: float = 0.0
    steps: int = 0

    @property
    def observables(self):
        return observables_of(self.states)

    def observable(self, name):
        return self.observables[:, OBSERVABLES.index(name)]

    @property
    def final_state(self):
        return self.states[-1]

    def trace_drift(self):
        return float(np.max(np.abs(np.trace(self.states, axis1=1, axis2=2) - 1)))

    def min_eigenvalue(self):
        herm = 0.5 * (self.states + np.conj(np.swapaxes(self.states, 1, 2)))
        return float(np.min(np.linalg.eigvalsh(herm)))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("t",) + OBSERVABLES)
        for t, row in zip(self.times, self.observables):
            writer.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in row])
        return buf.getvalue()

    def export_csv(self, path):
        write_text_atomic(path, self.to_csv())


def _hermitize_vec(x):
    sym = 0.5 * (x + np.conj(x[_HERM_PERM]))
    return sym, float(np.max(np.abs(sym - x)))


def rk4_step_matrix(L1, L2, L3, h):
    """One classical RK4 step of ``dx/dt = L(t) x`` as a matrix.

    ``L1, L2, L3`` are the generator at ``t``, ``t + h/2`` and ``t + h``.
    Batched inputs of shape (..., 9, 9) are accepted.
    """
    eye = np.eye(L1.shape[-1])
    K1 = L1
    K2 = L2 @ (eye + 0.5 * h * K1)
    K3 = L2 @ (eye + 0.5 * h * K2)
    K4 = L3 @ (eye + h * K3)
    return eye + (h / 6.0) * (K1 + 2 * K2 + 2 * K3 + K4)


def _validate_initial(rho0):
    return check_density_matrix(rho0, code="INVALID_INITIAL_STATE")


def integrate(rho0, L, policy, t0=0.0):
    """Integrate from ``t0`` to ``t0 + policy.max_time``."""
    rho0 = _validate_initial(rho0)
    if policy.method == RK4_FIXED:
        return _integrate_rk4(rho0, L, policy, t0)
    return _integrate_rk45(rho0, L, policy, t0)


def _integrate_rk4(rho0, L, policy, t0):
    n_steps = max(1, math.ceil(policy.max_time / policy.step - 1e-9))
    h = policy.max_time / n_steps
    stride = int(policy.record_stride)
    x = vec(rho0)
    times, states = [t0], [rho0.copy()]
    worst = 0.0
    fixed = rk4_step_matrix(L.static_part, L.static_part, L.static_part, h) if L.autonomous else None
    for n in range(n_steps):
        t = t0 + n * h
        S = fixed if fixed is not None else rk4_step_matrix(L.at(t), L.at(t + 0.5 * h), L.at(t + h), h)
        x, corr = _hermitize_vec(S @ x)
        worst = max(worst, corr)
        if (n + 1) % stride == 0 or n + 1 == n_steps:
            times.append(t0 + (n + 1) * h)
            states.append(unvec(x).copy())
    if worst > HERMITIZE_WARN:
        log.warning("hermiticity correction reached %.3g", worst)
    return Trajectory(np.array(times), np.array(states), L.modulation_delta, worst, n_steps)


def _integrate_rk45(rho0, L, policy, t0):
    def f(t, x):
        return L.at(t) @ x

    tol = policy.tolerance
    solver = RK45(f, t0, vec(rho0), t0 + policy.max_time, rtol=tol, atol=tol,
                  first_step=min(policy.step, policy.max_time))
    stride = int(policy.record_stride)
    times, states = [t0], [rho0.copy()]
    worst = 0.0
    n = 0
    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            raise DarkholeError("STEP_UNDERFLOW", f"adaptive integrator failed at t = {solver.t}: {message}")
        if solver.status == "running" and solver.step_size < MIN_STEP:
            raise DarkholeError("STEP_UNDERFLOW", f"step size {solver.step_size:.3g} at t = {solver.t}")
        solver.y, corr = _hermitize_vec(solver.y)
        worst = max(worst, corr)
        n += 1
        if n % stride == 0 or solver.status == "finished":
            times.append(solver.t)
            states.append(unvec(solver.y).copy())
    if worst > HERMITIZE_WARN:
        log.warning("hermiticity correction reached %.3g", worst)
    return Trajectory(np.array(times), np.array(states), L.modulation_delta, worst, n)


# --- windowed averages -----------------------------------------------------

@dataclass(frozen=True)
class AveragedObservables:
    values: dict
    peak_to_peak: dict
    drift: float
    window: tuple
    converged: bool = True

    def __getitem__(self, name):
        return self.values[name]

    @property
    def state(self):
        v = self.values
        ab = v["re_rho_AB"] + 1j * v["im_rho_AB"]
        ac = v["re_rho_AC"] + 1j * v["im_rho_AC"]
        bc = v["re_rho_BC"] + 1j * v["im_rho_BC"]
        return np.array([[v["rho_AA"], ab, ac],
                         [np.conj(ab), v["rho_BB"], bc],
                         [np.conj(ac), np.conj(bc), v["rho_CC"]]])


def _mean_scale(means):
    return float(np.max(np.abs(means))) or 1.0


def _finish_average(means, half_a, half_b, ptp, window):
    drift = float(np.max(np.abs(half_a - half_b)))
    converged = drift <= DRIFT_TOL * _mean_scale(means)
    result = AveragedObservables(
        dict(zip(OBSERVABLES, map(float, means))),
        dict(zip(OBSERVABLES, map(float, ptp))),
        drift, window, converged,
    )
    if not converged:
        raise NotConvergedError(f"windowed mean drifts by {drift:.3g} between halves", result)
    return result


def _slice_window(t, y, lo, hi):
    """Samples of ``y`` on [lo, hi] with linearly interpolated end points."""
    inside = (t > lo) & (t < hi)
    ts = np.concatenate(([lo], t[inside], [hi]))
    ends = np.array([[np.interp(edge, t, col) for col in y.T] for edge in (lo, hi)])
    ys = np.concatenate((ends[:1], y[inside], ends[1:]))
    return ts, ys


def quasi_steady_average(traj, window, gamma_min=None, delta=None):
    """Trapezoidal time average of every observable over ``window``.

    With a nonzero modulation frequency the window is trimmed (from the left)
    to an even number of whole periods so that both halves used for the drift
    test contain whole periods.  Raises ``WINDOW_TOO_SHORT`` when the window
    is shorter than ``5/gamma_min`` or five modulation periods, and
    :class:`NotConvergedError` when the two half-window means differ by more
    than 1e-4 of the mean scale.
    """
    lo, hi = map(float, window)
    t = np.asarray(traj.times)
    if not (t[0] - 1e-9 <= lo < hi <= t[-1] + 1e-9):
        raise DarkholeError("WINDOW_TOO_SHORT", f"window {window} not inside [{t[0]}, {t[-1]}]")
    delta = traj.modulation_delta if delta is None else delta
    required = 0.0
    if gamma_min:
        required = 5.0 / gamma_min
    if delta:
        period = 2 * math.pi / abs(delta)
        required = max(required, 5 * period)
    if hi - lo < required - 1e-9:
        raise DarkholeError("WINDOW_TOO_SHORT", f"window length {hi - lo:.6g} < {required:.6g}")
    if delta:
        n_periods = int(math.floor((hi - lo) / period + 1e-9)) // 2 * 2
        lo = hi - n_periods * period
    y = traj.observables
    ts, ys = _slice_window(t, y, lo, hi)
    mid = 0.5 * (lo + hi)
    t1, y1 = _slice_window(t, y, lo, mid)
    t2, y2 = _slice_window(t, y, mid, hi)
    means = np.trapezoid(ys, ts, axis=0) / (hi - lo)
    half_a = np.trapezoid(y1, t1, axis=0) / (mid - lo)
    half_b = np.trapezoid(y2, t2, axis=0) / (hi - mid)
    ptp = ys.max(axis=0) - ys.min(axis=0)
    return _finish_average(means, half_a, half_b, ptp, (lo, hi))


# --- periodic engine -------------------------------------------------------

def pumping_rate(params):
    """Rough optical pumping rate into the dark state."""
    gamma = 0.5 * (params.gamma_ac + params.gamma_bc)
    omega2 = abs(params.rabi_alpha) ** 2 + abs(params.rabi_beta) ** 2
    detuning2 = max(params.detuning_alpha ** 2, params.detuning_beta ** 2)
    if gamma == 0:
        return 0.0
    return omega2 * gamma / (gamma ** 2 + detuning2)


def default_burn_in(params):
    """Transient time discarded before averaging: 20 over the slowest of the
    decay and pumping rates."""
    rates = [r for r in (params.gamma_ac + params.gamma_bc, pumping_rate(params)) if r > 0]
    if not rates:
        return 0.0
    return 20.0 / min(rates)


@dataclass
class PeriodicAverage:
    averages: AveragedObservables
    final_state: np.ndarray
    step: float
    periods: int
    burn_in: float = field(default=0.0)


def periodic_average(L, rho0, burn_in, step=0.05, gamma_min=None, min_periods=6):
    """Burn in for at least ``burn_in`` and average over an even number of
    whole modulation periods (at least ``min_periods`` and at least
    ``5/gamma_min`` long) using RK4 steps of at most ``step``."""
    rho0 = _validate_initial(rho0)
    delta = L.modulation_delta
    if L.autonomous or delta == 0:
        raise DarkholeError("AUTONOMOUS_GENERATOR", "periodic_average needs a time-periodic generator")
    period = 2 * math.pi / abs(delta)
    m = max(4, math.ceil(period / step))
    h = period / m
    tj = h * np.arange(m)
    phases = np.exp(1j * delta * np.concatenate((tj, tj + 0.5 * h, tj + h)))
    Lt = np.broadcast_to(L.static_part, (3 * m, _D, _D)).copy()
    for part, k in L.periodic_parts:
        Lt += part[None, :, :] * (phases ** k)[:, None, None]
    S = rk4_step_matrix(Lt[:m], Lt[m:2 * m], Lt[2 * m:], h)

    eye = np.eye(_D, dtype=complex)
    prod = eye.copy()
    acc = 0.5 * eye
    for j in range(m):
        prod = S[j] @ prod
        acc += prod if j < m - 1 else 0.5 * prod
    U = prod
    avg_op = acc / m

    n_burn = math.ceil(burn_in / period) if burn_in > 0 else 0
    n_window = max(min_periods, math.ceil((5.0 / gamma_min) / period) if gamma_min else 0)
    n_window += n_window % 2

    x = np.linalg.matrix_power(U, n_burn) @ vec(rho0) if n_burn else vec(rho0)
    x, _ = _hermitize_vec(x)
    per_period = []
    for _ in range(n_window):
        per_period.append(avg_op @ x)
        x, _ = _hermitize_vec(U @ x)
    per_period = np.array(per_period)
    obs = observables_of(per_period.reshape(-1, DIM, DIM, order="C").transpose(0, 2, 1))
    half = n_window // 2
    means = obs.mean(axis=0)

    # peak-to-peak over the last period, stepping through it
    samples = [x]
    y = x
    for j in range(m):
        y = S[j] @ y
        samples.append(y)
    samples = np.array(samples).reshape(-1, DIM, DIM).transpose(0, 2, 1)
    last = observables_of(samples)
    ptp = last.max(axis=0) - last.min(axis=0)

    t_end = (n_burn + n_window) * period
    try:
        averages = _finish_average(means, obs[:half].mean(axis=0), obs[half:].mean(axis=0),
                                   ptp, (n_burn * period, t_end))
    except NotConvergedError as exc:
        exc.result = PeriodicAverage(exc.result, unvec(x), h, n_window, n_burn * period)
        raise
    return PeriodicAverage(averages, unvec(x), h, n_window, n_burn * period)
