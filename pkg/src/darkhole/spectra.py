"""Detuning scans, dip detection and CSV export.

The absorption observable is ``Im rho_AC`` (``Im rho_ac`` for the V kind).
With the coupling convention ``<C|H|A> = alpha`` the rate at which field
alpha lifts population into |C> is ``2 Im(alpha * rho_AC)``, so for real
positive alpha positive values mean absorption.  Dark resonances are minima
of ``|Im rho_AC|``.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .dynamics import (
    RK4_FIXED,
    IntegrationPolicy,
    NotConvergedError,
    default_burn_in,
    integrate,
    periodic_average,
    quasi_steady_average,
)
from .errors import DarkholeError
from .liouvillian import build_liouvillian
from .model import ensure_valid, mixed_state, write_text_atomic
from .steadystate import steady_state_nullspace

SPECTRUM_HEADER = ("delta_alpha", "im_rho_AC", "im_rho_BC", "rho_CC", "rho_AA",
                   "rho_BB", "residual", "method")
DIPS_HEADER = ("position", "depth", "half_width", "classification")

NULLSPACE = "nullspace"
TIME_AVERAGE = "time-average"

CENTRAL = "CENTRAL"
SATELLITE_PLUS = "SATELLITE_PLUS"
SATELLITE_MINUS = "SATELLITE_MINUS"
UNCLASSIFIED = "UNCLASSIFIED"


@dataclass(frozen=True)
class ScanPoint:
    delta_alpha: float
    rho: np.ndarray
    residual: float
    method: str
    flags: tuple = ()

    @property
    def im_rho_AC(self):
        return float(self.rho[0, 2].imag)

    @property
    def im_rho_BC(self):
        return float(self.rho[1, 2].imag)

    @property
    def populations(self):
        return tuple(float(self.rho[i, i].real) for i in range(3))

    @property
    def method_label(self):
        return ":".join((self.method,) + self.flags)


@dataclass(frozen=True)
class DipFeature:
    position: float
    depth: float
    half_width: float
    classification: str = UNCLASSIFIED


@dataclass
class SpectrumScan:
    grid: np.ndarray
    fixed: object
    points: list
    dips: list

    def observable(self, name="abs_im_rho_AC"):
        if name == "abs_im_rho_AC":
            return np.abs([p.im_rho_AC for p in self.points])
        if name in ("im_rho_AC", "im_rho_BC"):
            return np.array([getattr(p, name) for p in self.points])
        index = {"rho_AA": 0, "rho_BB": 1, "rho_CC": 2}[name]
        return np.array([p.populations[index] for p in self.points])

    @property
    def flagged(self):
        return [p for p in self.points if p.flags]

    @property
    def not_converged(self):
        return [p for p in self.points if "NOT_CONVERGED" in p.flags]


def default_threads():
    env = os.environ.get("DARKHOLE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def solve_point(params, policy=None, rho0=None):
    """Quasi-steady state at one parameter point.

    Autonomous generators go through the null-space solver; a time-periodic
    one (exchange coupling off Raman resonance) is integrated with RK4 and
    averaged over whole modulation periods after a burn-in.
    """
    p = ensure_valid(params)
    policy = policy or IntegrationPolicy()
    L = build_liouvillian(p)
    rho0 = mixed_state() if rho0 is None else rho0
    if L.autonomous:
        ss = steady_state_nullspace(L)
        if not ss.degenerate:
            return ScanPoint(p.detuning_alpha, ss.rho, ss.residual, NULLSPACE)
        # steady manifold is not unique; report the long-time average from rho0
        flags = ("DEGENERATE",)
        span = max(policy.max_time, default_burn_in(p) * 2, 20.0)
        traj = integrate(rho0, L, IntegrationPolicy(RK4_FIXED, policy.step, policy.tolerance, span, 10))
        avg = quasi_steady_average(traj, (0.5 * span, span))
        return ScanPoint(p.detuning_alpha, avg.state, avg.drift, TIME_AVERAGE, flags)
    gamma_min = min(g for g in (p.gamma_ac, p.gamma_bc) if g > 0) if (p.gamma_ac or p.gamma_bc) else None
    try:
        result = periodic_average(L, rho0, default_burn_in(p), step=policy.step, gamma_min=gamma_min)
        flags = ()
    except NotConvergedError as exc:
        result = exc.result
        flags = ("NOT_CONVERGED",)
    return ScanPoint(p.detuning_alpha, result.averages.state, result.averages.drift, TIME_AVERAGE, flags)


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DarkholeError("GRID_EMPTY", "detuning grid has no points")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise DarkholeError("GRID_NOT_INCREASING", "detuning grid must be strictly increasing")
    return grid


def parse_grid(text):
    """``"min:max:points"`` to an evenly spaced grid."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise DarkholeError("GRID_SYNTAX", f"expected min:max:points, got {text!r}") from None
    if n <= 0:
        raise DarkholeError("GRID_EMPTY", f"grid {text!r} has no points")
    if n > 1 and not hi > lo:
        raise DarkholeError("GRID_NOT_INCREASING", f"grid {text!r} must have max > min")
    return np.linspace(lo, hi, n)


def scan_detuning(params, grid, policy=None, threads=None, prominence=None):
    """Solve every grid point of ``detuning_alpha`` and detect dips.

    Points are independent; they run on a thread pool and come back in grid
    order.  A point whose average does not converge is flagged, never fatal.
    """
    p = ensure_valid(params)
    grid = _check_grid(grid)
    threads = threads or default_threads()

    def work(x):
        return solve_point(p.replace(detuning_alpha=float(x)), policy)

    if threads == 1 or grid.size == 1:
        points = [work(x) for x in grid]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(work, grid))
    scan = SpectrumScan(grid, p, points, [])
    scan.dips = find_dips(scan, prominence)
    return scan


def central_position(params):
    """Raman condition including the exchange shifts."""
    p = params
    if p.has_ee:
        return p.detuning_beta + p.shift_B - p.shift_A
    return p.detuning_beta


# below this nothing is a dip, only solver round-off
PROMINENCE_FLOOR = 1e-12


def default_prominence(values):
    """2% of the largest absorption, but never below round-off."""
    if not len(values):
        return 0.0
    return max(0.02 * float(np.max(np.abs(values))), PROMINENCE_FLOOR)


def find_dips(scan, prominence=None, observable="abs_im_rho_AC"):
    """Local minima of the absorption observable with at least ``prominence``.

    Positions are refined by a parabola through the minimum and its two
    neighbours.  The dip nearest the (shifted) Raman condition is CENTRAL; the
    others are satellites on either side of it.  An empty list means no dips.
    """
    y = scan.observable(observable)
    x = np.asarray(scan.grid, dtype=float)
    if prominence is None:
        prominence = default_prominence(y)
    if not prominence > 0 or y.size < 3:
        return []
    idx, props = find_peaks(-y, prominence=prominence)
    if idx.size == 0:
        return []
    widths = peak_widths(-y, idx, rel_height=0.5, prominence_data=(
        props["prominences"], props["left_bases"], props["right_bases"]))[0]
    step = np.mean(np.diff(x))
    dips = []
    for i, prom, width in zip(idx, props["prominences"], widths):
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        denom = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom > 0 else 0.0
        shift = min(max(shift, -1.0), 1.0)
        pos = x[i] + shift * (x[i + 1] - x[i] if shift > 0 else x[i] - x[i - 1])
        dips.append(DipFeature(float(pos), float(prom), float(0.5 * width * step)))
    return classify_dips(dips, central_position(scan.fixed))


def classify_dips(dips, centre):
    if not dips:
        return []
    central = min(range(len(dips)), key=lambda k: abs(dips[k].position - centre))
    ref = dips[central].position
    out = []
    for k, d in enumerate(dips):
        if k == central:
            label = CENTRAL
        else:
            label = SATELLITE_PLUS if d.position > ref else SATELLITE_MINUS
        out.append(DipFeature(d.position, d.depth, d.half_width, label))
    return out


def _g(v):
    return f"{v:.17g}"


def spectrum_csv(scan):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SPECTRUM_HEADER)
    for p in scan.points:
        aa, bb, cc = p.populations
        writer.writerow([_g(p.delta_alpha), _g(p.im_rho_AC), _g(p.im_rho_BC), _g(cc),
                         _g(aa), _g(bb), _g(p.residual), p.method_label])
    return buf.getvalue()


def dips_csv(dips):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DIPS_HEADER)
    for d in dips:
        writer.writerow([_g(d.position), _g(d.depth), _g(d.half_width), d.classification])
    return buf.getvalue()


def dips_path(path):
    root, ext = os.path.splitext(os.fspath(path))
    return f"{root}.dips{ext or '.csv'}"


def export_csv(scan, path):
    """Write the spectrum and its companion ``.dips.csv``; return both paths."""
    write_text_atomic(path, spectrum_csv(scan))
    companion = dips_path(path)
    write_text_atomic(companion, dips_csv(scan.dips))
    return os.fspath(path), companion


def read_spectrum_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def gnuplot_script(csv_path, dips=(), title="Dark resonance spectrum"):
    """Text of a gnuplot script plotting |Im rho_AC| against detuning."""
    lines = [
        "set datafile separator ','",
        f"set title '{title}'",
        "set xlabel 'detuning_alpha / reference rate'",
        "set ylabel '|Im rho_AC|'",
        "set key off",
    ]
    for d in dips:
        lines.append(f"set arrow from {d.position:.6g}, graph 0 to {d.position:.6g}, graph 1 nohead dt 2")
    lines.append(f"plot '{os.path.basename(os.fspath(csv_path))}' every ::1 using 1:(abs($2)) with lines")
    return "\n".join(lines) + "\n"


def write_gnuplot_script(path, csv_path, dips=()):
    write_text_atomic(path, gnuplot_script(csv_path, dips))


def grid_step(grid):
    grid = np.asarray(grid)
    return float(np.mean(np.diff(grid))) if grid.size > 1 else math.inf
