"""Jost functions of the Fokas-Lenells spectral problem.

The spatial half of the Lax pair, written for the first column
psi = (psi1, psi2) of the commutator-frame matrix, is

    psi1' = k u_x psi2,
    psi2' = 2 i k^2 psi2 - k conj(u_x) psi1,

with psi -> e1 as x -> -infinity (and the mirrored system for the second
column / the +infinity side).  The stiff factor e^{2ik^2(x-y)} is handled by
an exact per-step integrating factor wrapped around classical RK4 (Lawson
form), so the scheme stays stable for Im k^2 of either sign as long as the
requested column decays toward its boundary side.

Conventions

* ``side`` is the end where the column equals a unit vector: ``MINUS`` for
  the pair (varphi_-, phi_-), ``PLUS`` for (varphi_+, phi_+).
* ``column FIRST`` tends to e1, ``column SECOND`` to e2.
* Analyticity: (MINUS, FIRST) and (PLUS, SECOND) need Im k^2 >= 0;
  the other two need Im k^2 <= 0; the continuous spectrum R u iR is always
  allowed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    InputError,
    SpectralOriginError,
    UnstableDirectionError,
)
from .grid import Grid, GridFunction, derivative, midpoint_values, refine_nodes

AXIS_RTOL = 1e-12

__all__ = [
    "Classification",
    "Side",
    "Column",
    "SpectralPoint",
    "JostVector",
    "solve_jost",
    "jost_matrix",
    "jost_columns_batch",
    "eigen_seed",
    "EigenSeed",
    "auto_substeps",
    "write_jost_vector",
]


class Classification(enum.Enum):
    REAL_AXIS = "real-axis"
    IMAG_AXIS = "imag-axis"
    QUADRANT_I = "quadrant-I"
    QUADRANT_II = "quadrant-II"
    QUADRANT_III = "quadrant-III"
    QUADRANT_IV = "quadrant-IV"


class Side(enum.Enum):
    MINUS = "minus-infinity"
    PLUS = "plus-infinity"


class Column(enum.Enum):
    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True)
class SpectralPoint:
    """Spectral parameter k with its domain classification and eta = k - 1/(2k)."""

    k: complex
    classification: Classification
    eta: complex

    @classmethod
    def from_k(cls, k: complex) -> "SpectralPoint":
        k = complex(k)
        if k == 0:
            raise SpectralOriginError("spectral parameter at origin")
        if k.imag == 0:
            cl = Classification.REAL_AXIS
        elif k.real == 0:
            cl = Classification.IMAG_AXIS
        elif k.real > 0:
            cl = Classification.QUADRANT_I if k.imag > 0 else Classification.QUADRANT_IV
        else:
            cl = Classification.QUADRANT_II if k.imag > 0 else Classification.QUADRANT_III
        return cls(k=k, classification=cl, eta=k - 1.0 / (2.0 * k))

    @property
    def on_continuous_spectrum(self) -> bool:
        return self.classification in (Classification.REAL_AXIS, Classification.IMAG_AXIS)


def _as_point(k) -> SpectralPoint:
    return k if isinstance(k, SpectralPoint) else SpectralPoint.from_k(k)


@dataclass
class JostVector:
    """One Jost column at fixed k: 2 components sampled over the grid."""

    k: SpectralPoint
    side: Side
    column: Column
    components: tuple[GridFunction, GridFunction]

    @property
    def psi1(self) -> np.ndarray:
        return self.components[0].values

    @property
    def psi2(self) -> np.ndarray:
        return self.components[1].values


def auto_substeps(k: complex, h: float, target: float = 0.3) -> int:
    """Power-of-two substep count keeping |2 k^2| h_eff below ``target``."""
    need = abs(2.0 * complex(k) ** 2) * h / target
    sub = 1
    while sub < need:
        sub *= 2
    return sub


def _lawson_rk4(c12n, c12m, c21n, c21m, lam, step, keep=1):
    """Integrate y1' = c12 y2, y2' = lam y2 + c21 y1 from y = (1, 0).

    Node/midpoint coefficient arrays along axis -1; ``lam`` broadcasts against
    the leading axes.  Returns trajectories at every ``keep``-th node.
    """
    m = c12n.shape[-1]
    lead = np.broadcast_shapes(np.shape(lam), c12n.shape[:-1])
    E2 = np.exp(lam * (step / 2.0))
    E1 = np.exp(lam * step)
    n_out = (m - 1) // keep + 1
    t1 = np.empty(lead + (n_out,), dtype=complex)
    t2 = np.empty(lead + (n_out,), dtype=complex)
    y1 = np.ones(lead, dtype=complex)
    y2 = np.zeros(lead, dtype=complex)
    t1[..., 0] = y1
    t2[..., 0] = y2
    sixth = step / 6.0
    half = 0.5 * step
    for n in range(m - 1):
        a0 = c12n[..., n]
        am = c12m[..., n]
        a1 = c12n[..., n + 1]
        b0 = c21n[..., n]
        bm = c21m[..., n]
        b1 = c21n[..., n + 1]
        k1a = a0 * y2
        k1b = b0 * y1
        k2a = am * E2 * (y2 + half * k1b)
        k2b = bm / E2 * (y1 + half * k1a)
        k3a = am * E2 * (y2 + half * k2b)
        k3b = bm / E2 * (y1 + half * k2a)
        k4a = a1 * E1 * (y2 + step * k3b)
        k4b = b1 / E1 * (y1 + step * k3a)
        y1 = y1 + sixth * (k1a + 2.0 * (k2a + k3a) + k4a)
        y2 = E1 * (y2 + sixth * (k1b + 2.0 * (k2b + k3b) + k4b))
        if (n + 1) % keep == 0:
            j = (n + 1) // keep
            t1[..., j] = y1
            t2[..., j] = y2
    return t1, t2


def _integrate(q, k, h, side: Side, column: Column, substeps: int = 1):
    """Batched commutator-frame Jost solve; q: (..., N), k broadcastable.

    Returns (psi1, psi2) on the original nodes, in natural component order.
    """
    q = np.asarray(q, dtype=complex)
    karr = np.asarray(k, dtype=complex)
    if substeps > 1:
        qf = refine_nodes(q, substeps)
        hf = h / substeps
    else:
        qf, hf = q, h
    if side is Side.PLUS:
        qf = qf[..., ::-1]
        step = -hf
    else:
        step = hf
    qm = midpoint_values(qf)
    kq = karr[..., None] * qf if karr.ndim else karr * qf
    kqm = karr[..., None] * qm if karr.ndim else karr * qm
    kqc = -(karr[..., None] * np.conj(qf) if karr.ndim else karr * np.conj(qf))
    kqmc = -(karr[..., None] * np.conj(qm) if karr.ndim else karr * np.conj(qm))
    lam = 2j * karr * karr
    if column is Column.FIRST:
        y1, y2 = _lawson_rk4(kq, kqm, kqc, kqmc, lam, step, keep=substeps)
        p1, p2 = y1, y2
    else:
        # swapped variables (psi2, psi1) satisfy the mirrored system
        y1, y2 = _lawson_rk4(kqc, kqmc, kq, kqm, -lam, step, keep=substeps)
        p1, p2 = y2, y1
    if side is Side.PLUS:
        p1 = p1[..., ::-1]
        p2 = p2[..., ::-1]
    return p1, p2


def _check_direction(k: SpectralPoint, side: Side, column: Column) -> None:
    imk2 = (k.k * k.k).imag
    tol = AXIS_RTOL * abs(k.k) ** 2
    needs_plus = (side, column) in ((Side.MINUS, Column.FIRST), (Side.PLUS, Column.SECOND))
    if needs_plus and imk2 < -tol:
        raise UnstableDirectionError(
            f"unstable direction: side {side.value}, column {column.value} "
            f"needs Im k^2 >= 0, got {imk2:.3e}"
        )
    if not needs_plus and imk2 > tol:
        raise UnstableDirectionError(
            f"unstable direction: side {side.value}, column {column.value} "
            f"needs Im k^2 <= 0, got {imk2:.3e}"
        )


def solve_jost(
    u: GridFunction,
    k,
    side: Side,
    column: Column,
    ux: GridFunction | None = None,
    substeps: int = 1,
) -> JostVector:
    """Solve one Jost column of the spectral problem for the potential ``u``.

    ``ux`` may carry an exact derivative (Darboux outputs propagate one);
    otherwise the 4th-order grid derivative is used.  ``substeps`` refines
    the integration lattice by a power of two; the potential is interpolated
    with O(h^6) accuracy, which keeps the overall scheme at RK4 order.
    """
    kp = _as_point(k)
    _check_direction(kp, side, column)
    q = (ux or derivative(u, 1)).values
    p1, p2 = _integrate(q, kp.k, u.grid.h, side, column, substeps)
    return JostVector(
        k=kp,
        side=side,
        column=column,
        components=(GridFunction(u.grid, p1), GridFunction(u.grid, p2)),
    )


def jost_matrix(
    u: GridFunction, k, side: Side, ux: GridFunction | None = None, substeps: int = 1
) -> tuple[JostVector, JostVector]:
    """Both Jost columns at the same k and side."""
    return (
        solve_jost(u, k, side, Column.FIRST, ux=ux, substeps=substeps),
        solve_jost(u, k, side, Column.SECOND, ux=ux, substeps=substeps),
    )


def jost_columns_batch(q: np.ndarray, ks: np.ndarray, h: float, substeps: int = 1):
    """varphi_- and phi_+ for a batch of spectral points (no validity checks).

    Returns (p1, p2, f1, f2), each shaped like broadcast(ks, q[..., 0]) + (N,).
    Intended for scattering sweeps where every k satisfies Im k^2 >= 0.
    """
    p1, p2 = _integrate(q, ks, h, Side.MINUS, Column.FIRST, substeps)
    f1, f2 = _integrate(q, ks, h, Side.PLUS, Column.SECOND, substeps)
    return p1, p2, f1, f2


# -- eigenfunction seed -------------------------------------------------------

@dataclass
class EigenSeed:
    """Two-sided Jost eigenfunction direction field at a discrete eigenvalue.

    ``eta1, eta2`` hold a pointwise-normalized direction field of the
    decaying solution (gauge-free: every Darboux quantity built from it is
    invariant under pointwise scalar rescaling).  ``gamma`` is the norming
    constant from varphi_- e^{-i k1^2 x} = gamma phi_+ e^{i k1^2 x}, and
    ``residual`` the relative least-squares proportionality error near the
    matching window.  ``is_eigen`` is False when |a(k1)| stayed above
    tolerance; the seed then degenerates to the left solution alone.
    """

    k1: SpectralPoint
    eta1: np.ndarray
    eta2: np.ndarray
    gamma: complex | None
    residual: float
    a_value: complex
    glue_index: int | None
    is_eigen: bool


def _normalize_direction(v1: np.ndarray, v2: np.ndarray):
    scale = np.maximum(np.abs(v1), np.abs(v2))
    scale[scale == 0] = 1.0
    return v1 / scale, v2 / scale


def eigen_seed(
    u: GridFunction,
    k1,
    ux: GridFunction | None = None,
    substeps: int = 1,
    eigen_tol: float = 1e-6,
) -> EigenSeed:
    """Build the eigenfunction direction of varphi_-(x; k1) e^{-i k1^2 x}.

    At an eigenvalue the forward solve is polluted past the transition point
    by the exponentially growing companion solution, so the field is glued
    from varphi_- on the left and the proportional phi_+ on the right of the
    first component-balance crossing.  Gluing leaves Darboux coefficients
    untouched because they only see the pointwise direction.
    """
    kp = _as_point(k1)
    q = (ux or derivative(u, 1)).values
    n = u.grid.N
    x = u.grid.x
    p1, p2, f1, f2 = jost_columns_batch(q, kp.k, u.grid.h, substeps)
    window = slice(n // 2 - n // 10, n // 2 + n // 10 + 1)
    avals = p1[window] * f2[window] - p2[window] * f1[window]
    a_val = complex(avals.mean())

    phase = np.exp(2j * kp.k ** 2 * x)
    r1 = f1 * phase
    r2 = f2 * phase

    crossings = np.nonzero(np.abs(p2) >= np.abs(p1))[0]
    is_eigen = abs(a_val) < eigen_tol and crossings.size > 0
    if not is_eigen:
        e1, e2 = _normalize_direction(p1.copy(), p2.copy())
        return EigenSeed(kp, e1, e2, None, np.inf, a_val, None, False)

    i_glue = int(crossings[0])
    wrad = max(10, n // 200)
    wsl = slice(max(0, i_glue - wrad), min(n, i_glue + wrad))
    den = float(np.sum(np.abs(r1[wsl]) ** 2 + np.abs(r2[wsl]) ** 2))
    num = complex(np.sum(p1[wsl] * np.conj(r1[wsl]) + p2[wsl] * np.conj(r2[wsl])))
    gamma = num / den
    resid = np.sqrt(
        np.sum(np.abs(p1[wsl] - gamma * r1[wsl]) ** 2 + np.abs(p2[wsl] - gamma * r2[wsl]) ** 2)
        / np.sum(np.abs(p1[wsl]) ** 2 + np.abs(p2[wsl]) ** 2)
    )
    idx = np.arange(n)
    e1 = np.where(idx <= i_glue, p1, r1)
    e2 = np.where(idx <= i_glue, p2, r2)
    e1, e2 = _normalize_direction(e1, e2)
    return EigenSeed(kp, e1, e2, gamma, float(resid), a_val, i_glue, True)


def write_jost_vector(path, jv: JostVector) -> None:
    """Debug CSV dump ``x,re1,im1,re2,im2``."""
    g = jv.components[0].grid
    data = np.column_stack(
        [g.x, jv.psi1.real, jv.psi1.imag, jv.psi2.real, jv.psi2.imag]
    )
    np.savetxt(path, data, delimiter=",", header="x,re1,im1,re2,im2",
               comments="", fmt="%.17g")
