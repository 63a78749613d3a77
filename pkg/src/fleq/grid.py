"""Uniform spatial grids, finite differences, quadrature and Sobolev norms.

Everything downstream (Jost solves, Darboux maps, soliton generation) lives on
the truncated domain [-L, L] sampled at N equispaced nodes.  Potentials are
expected to decay below ``DECAY_TOL`` at the ends; violations raise a
:class:`~fleq.errors.DecayToleranceWarning`, never an exception, because the
maps remain well defined on non-decaying data.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DecayToleranceWarning, InputError, InsufficientGridError

DECAY_TOL = 1e-8
UNIFORMITY_RTOL = 1e-9

__all__ = [
    "Grid",
    "GridFunction",
    "SobolevReport",
    "derivative",
    "quadrature",
    "c_constant",
    "sobolev_report",
    "smallness_functional",
    "check_decay",
    "midpoint_values",
    "refine_nodes",
    "write_grid_function",
    "read_grid_function",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid x_i = -L + i*h on [-L, L] with h = 2L/(N-1).

    Parameters
    ----------
    L : float
        Half-width of the truncated domain.
    N : int
        Number of nodes, at least 9.
    """

    L: float
    N: int

    def __post_init__(self):
        if self.N < 9:
            raise InsufficientGridError("insufficient grid: need N >= 9")
        if self.L <= 0:
            raise InputError("grid half-width must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.L / (self.N - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.N)

    def refined(self, factor: int) -> "Grid":
        """Grid with the same domain and (N-1)*factor + 1 nodes."""
        return Grid(self.L, (self.N - 1) * factor + 1)


@dataclass
class GridFunction:
    """Complex-valued samples of a function on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.N,):
            raise InputError("values length does not match grid")
        if not np.all(np.isfinite(self.values)):
            raise InputError("non-finite values in grid function")

    @classmethod
    def from_callable(cls, grid: Grid, f) -> "GridFunction":
        return cls(grid, np.asarray(f(grid.x), dtype=complex))

    @classmethod
    def zero(cls, grid: Grid) -> "GridFunction":
        return cls(grid, np.zeros(grid.N, dtype=complex))

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy())


@lru_cache(maxsize=64)
def _fd_weights(offsets: tuple, order: int, h: float) -> np.ndarray:
    """Finite-difference weights w with sum_j w_j f(x + o_j h) ~ f^(order)(x).

    Solved from the Vandermonde moment conditions; exact for polynomials of
    degree < len(offsets).
    """
    o = np.asarray(offsets, dtype=float)
    n = len(o)
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    V = np.vander(o, n, increasing=True).T
    return np.linalg.solve(V, rhs) / h ** order


def derivative(f: GridFunction, order: int) -> GridFunction:
    """4th-order accurate derivative of ``f`` of the given order (1, 2 or 3).

    Centered stencils in the interior, one-sided stencils of the same order
    of accuracy at the edges.  Exact for polynomials up to degree 4.
    """
    if order not in (1, 2, 3):
        raise InputError("derivative order must be 1, 2 or 3")
    n = f.grid.N
    if n < 2 * order + 5:
        raise InsufficientGridError("insufficient grid")
    h = f.grid.h
    half = (order + 3) // 2 if order != 3 else 3
    centered = tuple(range(-half, half + 1))
    width = order + 4
    w_c = _fd_weights(centered, order, h)
    out = np.empty(n, dtype=complex)
    # interior by correlation with the centered stencil
    out[half:n - half] = np.convolve(f.values, w_c[::-1], mode="valid")
    # one-sided rows near the edges
    for i in range(half):
        offs = tuple(range(-i, width - i))
        w = _fd_weights(offs, order, h)
        out[i] = w @ f.values[0:width]
        offs_r = tuple(range(-(width - 1 - i), i + 1))
        w_r = _fd_weights(offs_r, order, h)
        out[n - 1 - i] = w_r @ f.values[n - width:n]
    return GridFunction(f.grid, out)


def quadrature(f: GridFunction) -> complex:
    """Composite trapezoid value of the integral of f over [-L, L]."""
    return complex(np.trapezoid(f.values, dx=f.grid.h))


def check_decay(u: GridFunction, tol: float = DECAY_TOL) -> bool:
    """True when |u| is below ``tol`` at both domain ends; warns otherwise."""
    edge = max(abs(u.values[0]), abs(u.values[-1]))
    if edge >= tol:
        warnings.warn(
            f"potential does not decay at the boundary (|u(+-L)| = {edge:.3e})",
            DecayToleranceWarning,
            stacklevel=3,
        )
        return False
    return True


def c_constant(u: GridFunction, ux: GridFunction | None = None) -> float:
    """The phase constant c = 0.5 * integral of |u_x|^2.

    The large-k limit of a(k) is e^{-ic}.  ``ux`` may be supplied when the
    derivative is known in closed form; otherwise it is computed by
    :func:`derivative`.
    """
    check_decay(u)
    if ux is None:
        ux = derivative(u, 1)
    val = 0.5 * np.trapezoid(np.abs(ux.values) ** 2, dx=u.grid.h)
    return float(val)


@dataclass(frozen=True)
class SobolevReport:
    """Discrete H^3 and weighted H^{2,1} norms plus the smallness functional."""

    H3: float
    H21: float
    smallness: float


def _l2(vals: np.ndarray, h: float) -> float:
    return float(np.sqrt(np.trapezoid(np.abs(vals) ** 2, dx=h)))


def sobolev_report(u: GridFunction) -> SobolevReport:
    """Discrete H^3 norm, <x>-weighted H^{2,1} norm and the smallness functional.

    The smallness functional is
    2*||u_x||_{L2}^2 + ||u_x||_{L3}^3 + 2*||u_xx||_{L1} + ||u_x||_{L1};
    a value below 1 certifies that a(k) has no eigenvalues or resonances.
    """
    h = u.grid.h
    x = u.grid.x
    d1 = derivative(u, 1).values
    d2 = derivative(u, 2).values
    d3 = derivative(u, 3).values
    wt = np.sqrt(1.0 + x ** 2)
    h3 = np.sqrt(
        _l2(u.values, h) ** 2 + _l2(d1, h) ** 2 + _l2(d2, h) ** 2 + _l2(d3, h) ** 2
    )
    h21 = np.sqrt(
        _l2(wt * u.values, h) ** 2 + _l2(wt * d1, h) ** 2 + _l2(wt * d2, h) ** 2
    )
    small = smallness_functional(u, d1=d1, d2=d2)
    return SobolevReport(H3=float(h3), H21=float(h21), smallness=small)


def smallness_functional(
    u: GridFunction, d1: np.ndarray | None = None, d2: np.ndarray | None = None
) -> float:
    """2||u_x||^2_{L2} + ||u_x||^3_{L3} + 2||u_xx||_{L1} + ||u_x||_{L1}."""
    h = u.grid.h
    if d1 is None:
        d1 = derivative(u, 1).values
    if d2 is None:
        d2 = derivative(u, 2).values
    l2sq = np.trapezoid(np.abs(d1) ** 2, dx=h)
    l3cb = np.trapezoid(np.abs(d1) ** 3, dx=h)
    l1_d2 = np.trapezoid(np.abs(d2), dx=h)
    l1_d1 = np.trapezoid(np.abs(d1), dx=h)
    return float(2.0 * l2sq + l3cb + 2.0 * l1_d2 + l1_d1)


# -- midpoint interpolation (used by the Jost integrator) --------------------

_MID8 = np.array([-5.0, 49.0, -245.0, 1225.0, 1225.0, -245.0, 49.0, -5.0]) / 2048.0


@lru_cache(maxsize=8)
def _edge_mid_weights(t: float) -> np.ndarray:
    """Lagrange weights interpolating nodes 0..7 at the off-node point t."""
    powers = np.arange(8.0)
    V = np.vander(powers, 8, increasing=True).T
    return np.linalg.solve(V, t ** powers)


def midpoint_values(values: np.ndarray) -> np.ndarray:
    """O(h^8) interpolation of node samples to interval midpoints (axis -1)."""
    f = np.asarray(values)
    if f.shape[-1] < 8:
        raise InsufficientGridError("insufficient grid")
    mid = np.empty(f.shape[:-1] + (f.shape[-1] - 1,), dtype=complex)
    mid[..., 3:-3] = sum(
        w * f[..., j:j + f.shape[-1] - 7] for j, w in enumerate(_MID8)
    )
    for i in range(3):
        mid[..., i] = f[..., :8] @ _edge_mid_weights(i + 0.5)
        mid[..., -1 - i] = f[..., :-9:-1] @ _edge_mid_weights(i + 0.5)
    return mid


def refine_nodes(values: np.ndarray, factor: int) -> np.ndarray:
    """Node samples on a grid refined by ``factor`` (a power of two)."""
    if factor & (factor - 1):
        raise InputError("refinement factor must be a power of two")
    out = np.asarray(values, dtype=complex)
    while factor > 1:
        mids = midpoint_values(out)
        merged = np.empty(out.shape[:-1] + (2 * out.shape[-1] - 1,), dtype=complex)
        merged[..., ::2] = out
        merged[..., 1::2] = mids
        out = merged
        factor //= 2
    return out


# -- file format --------------------------------------------------------------

def write_grid_function(path, f: GridFunction) -> None:
    """CSV dump with header ``x,re,im``, one row per node."""
    data = np.column_stack([f.grid.x, f.values.real, f.values.imag])
    np.savetxt(path, data, delimiter=",", header="x,re,im", comments="",
               fmt="%.17g")


def read_grid_function(path) -> GridFunction:
    """Parse the ``x,re,im`` CSV format; rejects non-uniform node spacing."""
    try:
        raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except Exception as exc:
        raise InputError(f"cannot parse grid function file: {exc}") from exc
    if raw.shape[1] != 3:
        raise InputError("expected three columns x,re,im")
    x = raw[:, 0]
    if x.shape[0] < 9:
        raise InsufficientGridError("insufficient grid")
    dx = np.diff(x)
    if np.any(dx <= 0):
        raise InputError("nodes must be strictly ascending")
    h = dx.mean()
    if np.max(np.abs(dx - h)) > UNIFORMITY_RTOL * max(abs(x[0]), abs(x[-1]), h):
        raise InputError("non-uniform node spacing")
    if abs(x[0] + x[-1]) > UNIFORMITY_RTOL * max(1.0, abs(x[-1])):
        raise InputError("nodes must be symmetric about 0")
    grid = Grid(L=float(x[-1]), N=x.shape[0])
    return GridFunction(grid, raw[:, 1] + 1j * raw[:, 2])
