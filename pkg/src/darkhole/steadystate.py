"""Steady states of autonomous generators from the Liouvillian null space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DarkholeError
from .liouvillian import C, trace_row, unvec, vec, vec_index

# singular values below this fraction of the largest count as null directions
NULL_RTOL = 1e-10
# the d(rho_CC)/dt row is replaced by the trace condition
TRACE_ROW_INDEX = vec_index(C, C)


@dataclass(frozen=True)
class SteadyStateResult:
    rho: np.ndarray | None
    null_dim: int
    residual: float
    basis: tuple = ()

    @property
    def degenerate(self):
        return self.null_dim > 1

    @property
    def status(self):
        return "DEGENERATE" if self.degenerate else "UNIQUE"


def null_space_dimension(L0, rtol=NULL_RTOL):
    s = np.linalg.svd(L0, compute_uv=False)
    return int(np.sum(s <= rtol * s[0])) if s[0] > 0 else L0.shape[0]


def steady_state_nullspace(L, rtol=NULL_RTOL):
    """Solve ``L0 vec(rho) = 0`` with ``Tr rho = 1``.

    A time-periodic generator raises ``TIME_DEPENDENT_GENERATOR``.  When the
    null space has more than one dimension the result is marked degenerate,
    ``rho`` is ``None`` and ``basis`` holds one 3x3 matrix per null direction.
    """
    if not L.autonomous:
        raise DarkholeError("TIME_DEPENDENT_GENERATOR",
                            "generator has periodic parts; use time averaging instead")
    L0 = np.asarray(L.static_part)
    _, s, vh = np.linalg.svd(L0)
    if s[0] == 0:
        dim = L0.shape[0]
    else:
        dim = int(np.sum(s <= rtol * s[0]))
    if dim > 1:
        basis = tuple(unvec(v.conj()) for v in vh[-dim:])
        return SteadyStateResult(None, dim, 0.0, basis)

    M = L0.copy()
    M[TRACE_ROW_INDEX, :] = trace_row()
    rhs = np.zeros(M.shape[0], dtype=complex)
    rhs[TRACE_ROW_INDEX] = 1.0
    rho = unvec(np.linalg.solve(M, rhs))
    rho = 0.5 * (rho + rho.conj().T)
    residual = float(np.max(np.abs(L0 @ vec(rho))))
    return SteadyStateResult(rho, dim, residual)
