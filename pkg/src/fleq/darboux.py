"""Two-fold Darboux transformation: soliton addition, removal, and inversion.

For an anchor k1 in the open first quadrant and a nonvanishing seed
eta = (eta1, eta2) solving the spectral problem at k1, define

    m_k(eta, xi) = k eta1 conj(xi1) + conj(k) eta2 conj(xi2),
    A = m_{conj(k1)}(eta, eta) / m_{k1}(eta, eta)        (|A| = 1),
    C = (k1^2 - conj(k1)^2) eta1 conj(eta2) / m_{k1}(eta, eta).

The dressing matrix with kernels at {+-k1, +-conj(k1)} is

    T(eta, k, k1) = [[A k^2 - |k1|^2,  -C k],
                     [conj(C) k,  conj(A) k^2 - |k1|^2]]

(up to a k-dependent scalar fixed per column by the unit-vector boundary
conditions), and the transformed potential and its derivative are

    u1   = u + C / |k1|^2,
    u1_x = A^2 u_x - 2i A C.

Both A and C are invariant under pointwise scalar rescaling of the seed, so
only the seed's direction field matters.  Removing an eigenvalue uses the
decaying eigenfunction direction; adding one at (k1, gamma) uses the
combination varphi_- e^{-ik1^2 x} - gamma phi_+ e^{ik1^2 x}, which makes the
norming constant of the output equal gamma.  The induced scattering maps are

    add:    a1(k) = (conj(k1)^2/k1^2) (k^2-k1^2)/(k^2-conj(k1)^2) a(k),
    remove: the reciprocal multiplier,       b1(k) = b(k) either way,

so det S and |r| are preserved while ||u_x||_{L2}^2 shifts by the soliton
quantum 4 arg(k1^2).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DarbouxPoleError,
    DegenerateSeedError,
    FleqError,
    InputError,
    NoZeroWarning,
    OffsetRequiredError,
    TrivialTransformWarning,
)
from .grid import GridFunction, derivative
from .spectral import (
    Classification,
    Column,
    EigenSeed,
    JostVector,
    Side,
    SpectralPoint,
    _as_point,
    _integrate,
    eigen_seed,
    jost_columns_batch,
)

ARG_MARGIN = 1e-3        # exclusion margin around arg(k1) = pi/4
M_FLOOR = 1e-12          # relative floor for |m_{k1}(eta, eta)|
POLE_MARGIN = 1e-8       # |k^2 - k1^2| floor for darboux_matrix
SINGULARITY_OFFSET = 1e-4 * (1 + 1j) / np.sqrt(2)

__all__ = [
    "DarbouxSeed",
    "DarbouxCoefficients",
    "bilinear_m",
    "coefficients_AC",
    "darboux_matrix",
    "a_multiplier",
    "reflection_multiplier",
    "add_soliton",
    "remove_soliton",
    "inverse_seed",
    "transformed_jost",
    "four_representation_potentials",
    "SINGULARITY_OFFSET",
]


@dataclass
class DarbouxSeed:
    """Anchor eigenvalue k1 (open quadrant I) plus a nonvanishing 2-vector field."""

    k1: SpectralPoint
    eta: tuple[GridFunction, GridFunction]
    arg_margin: float = ARG_MARGIN

    def __post_init__(self):
        if not isinstance(self.k1, SpectralPoint):
            self.k1 = SpectralPoint.from_k(self.k1)
        if self.k1.classification is not Classification.QUADRANT_I:
            raise InputError("Darboux anchor must lie in the open first quadrant")
        _check_arg_margin(self.k1.k, self.arg_margin)
        e1, e2 = self.eta
        if np.min(np.abs(e1.values) ** 2 + np.abs(e2.values) ** 2) <= 0.0:
            raise DegenerateSeedError("degenerate seed: eta vanishes on the grid")


@dataclass
class DarbouxCoefficients:
    """Pointwise A (unimodular), C, and the bilinear form m_{k1}(eta, eta)."""

    A: GridFunction
    C: GridFunction
    m: GridFunction


def _check_arg_margin(k1: complex, margin: float = ARG_MARGIN) -> None:
    if abs(np.angle(k1) - np.pi / 4) < margin:
        raise InputError(
            "arg(k1) too close to pi/4; the inverse construction is "
            f"ill-conditioned there (margin {margin:g})"
        )


def bilinear_m(k: complex, eta, xi) -> complex | np.ndarray:
    """m_k(eta, xi) = k eta1 conj(xi1) + conj(k) eta2 conj(xi2) (pointwise)."""
    e1, e2 = eta
    x1, x2 = xi
    return k * np.asarray(e1) * np.conj(x1) + np.conj(k) * np.asarray(e2) * np.conj(x2)


def _ac_fields(k1: complex, e1: np.ndarray, e2: np.ndarray):
    """A, C, m for a raw direction field; raises on a degenerate seed."""
    p = np.abs(e1) ** 2
    q = np.abs(e2) ** 2
    m = k1 * p + np.conj(k1) * q
    if np.min(np.abs(m)) < M_FLOOR * max(abs(k1) * float(np.max(p + q)), 1e-300):
        raise DegenerateSeedError("degenerate seed")
    A = np.conj(m) / m
    C = (k1 ** 2 - np.conj(k1) ** 2) * e1 * np.conj(e2) / m
    return A, C, m


def coefficients_AC(seed: DarbouxSeed) -> DarbouxCoefficients:
    """Pointwise Darboux coefficient fields of a seed."""
    g = seed.eta[0].grid
    A, C, m = _ac_fields(seed.k1.k, seed.eta[0].values, seed.eta[1].values)
    return DarbouxCoefficients(
        A=GridFunction(g, A), C=GridFunction(g, C), m=GridFunction(g, m)
    )


def darboux_matrix(seed: DarbouxSeed, k: complex) -> np.ndarray:
    """Dressing matrix field T(eta, k, k1), shape (N, 2, 2).

    Normalized by k1/(conj(k1)(k^2-k1^2)) so that T(e1,k,k1) e1 = e1 and
    T(e2,k,k1) e2 = e2; det T = k1^2 (k^2-conj(k1)^2) / (conj(k1)^2 (k^2-k1^2)).
    """
    k = complex(k)
    k1 = seed.k1.k
    if abs(k ** 2 - k1 ** 2) < POLE_MARGIN:
        raise DarbouxPoleError("pole of Darboux matrix")
    A, C, _ = _ac_fields(k1, seed.eta[0].values, seed.eta[1].values)
    pref = k1 / (np.conj(k1) * (k ** 2 - k1 ** 2))
    n = A.shape[0]
    T = np.empty((n, 2, 2), dtype=complex)
    T[:, 0, 0] = pref * (A * k ** 2 - abs(k1) ** 2)
    T[:, 0, 1] = pref * (-C * k)
    T[:, 1, 0] = pref * (np.conj(C) * k)
    T[:, 1, 1] = pref * (np.conj(A) * k ** 2 - abs(k1) ** 2)
    return T


def a_multiplier(k, k1: complex, direction: str = "add") -> complex | np.ndarray:
    """Exact factor a1(k)/a(k) induced by adding or removing a k1-soliton."""
    k = np.asarray(k, dtype=complex) if np.ndim(k) else complex(k)
    k1 = complex(k1)
    add = (np.conj(k1) ** 2 / k1 ** 2) * (k ** 2 - k1 ** 2) / (k ** 2 - np.conj(k1) ** 2)
    if direction == "add":
        return add
    if direction == "remove":
        return 1.0 / add
    raise InputError("direction must be 'add' or 'remove'")


def reflection_multiplier(k, k1: complex, direction: str = "add"):
    """Factor r1(k)/r(k); b is invariant, so this is 1/a_multiplier."""
    return 1.0 / a_multiplier(k, k1, direction)


def _potential_map(u_vals, q_vals, e1, e2, anchor: complex):
    """u1 = u + C/|k1|^2 and u1_x = A^2 u_x - 2i A C for a seed direction."""
    A, C, _ = _ac_fields(anchor, e1, e2)
    u1 = u_vals + C / abs(anchor) ** 2
    q1 = A * A * q_vals - 2j * A * C
    return u1, q1


def _trivial_if_on_spectrum(u: GridFunction, kp: SpectralPoint):
    if kp.on_continuous_spectrum:
        warnings.warn(
            "transformation trivializes: anchor on the continuous spectrum",
            TrivialTransformWarning,
            stacklevel=3,
        )
        return True
    return False


def remove_soliton(
    u: GridFunction,
    k1,
    ux: GridFunction | None = None,
    substeps: int = 1,
    return_derivative: bool = False,
):
    """Strip the eigenvalue at k1 using the decaying eigenfunction seed.

    If a(k1) does not vanish the map is still applied (it then perturbs the
    potential without removing a zero) and a :class:`NoZeroWarning` is
    emitted.  With ``return_derivative=True`` the exact derivative of the
    output is returned alongside, which downstream solves should prefer over
    re-differencing.
    """
    kp = _as_point(k1)
    if _trivial_if_on_spectrum(u, kp):
        out = u.copy()
        return (out, (ux or derivative(u, 1)).copy()) if return_derivative else out
    if kp.classification is not Classification.QUADRANT_I:
        raise InputError("remove_soliton expects k1 in the open first quadrant")
    q = ux if ux is not None else derivative(u, 1)
    seed = eigen_seed(u, kp, ux=q, substeps=substeps)
    if not seed.is_eigen:
        warnings.warn(
            f"a(k1) = {seed.a_value:.3e} does not vanish; no zero removed",
            NoZeroWarning,
            stacklevel=2,
        )
    u1, q1 = _potential_map(u.values, q.values, seed.eta1, seed.eta2, kp.k)
    out = GridFunction(u.grid, u1)
    if return_derivative:
        return out, GridFunction(u.grid, q1)
    return out


def add_soliton(
    u: GridFunction,
    k1,
    gamma: complex,
    ux: GridFunction | None = None,
    substeps: int = 1,
    return_derivative: bool = False,
):
    """Insert an eigenvalue at k1 with norming constant gamma.

    The seed is varphi_- e^{-ik1^2 x} - gamma phi_+ e^{ik1^2 x} built from the
    Jost solutions of ``u``; adding on the vacuum therefore reproduces the
    closed-form one-soliton exactly.  Preconditions: gamma nonzero, k1 in the
    open first quadrant away from arg = pi/4, and a(k1) != 0.
    """
    kp = _as_point(k1)
    if gamma == 0:
        raise InputError("gamma must be nonzero")
    if _trivial_if_on_spectrum(u, kp):
        out = u.copy()
        return (out, (ux or derivative(u, 1)).copy()) if return_derivative else out
    if kp.classification is not Classification.QUADRANT_I:
        raise InputError("add_soliton expects k1 in the open first quadrant")
    _check_arg_margin(kp.k)
    q = ux if ux is not None else derivative(u, 1)
    p1, p2, f1, f2 = jost_columns_batch(q.values, kp.k, u.grid.h, substeps)
    n = u.grid.N
    w = slice(n // 2 - n // 10, n // 2 + n // 10 + 1)
    a_val = complex((p1[w] * f2[w] - p2[w] * f1[w]).mean())
    if abs(a_val) < 1e-6:
        raise FleqError(
            f"a(k1) = {a_val:.3e} already vanishes at k1={kp.k}; "
            "cannot add a second zero there"
        )
    phase = np.exp(2j * kp.k ** 2 * u.grid.x)
    s1 = p1 - gamma * phase * f1
    s2 = p2 - gamma * phase * f2
    scale = np.maximum(np.abs(s1), np.abs(s2))
    if np.min(scale) <= 0.0:
        raise DegenerateSeedError("degenerate seed")
    s1, s2 = s1 / scale, s2 / scale
    u1, q1 = _potential_map(u.values, q.values, s1, s2, kp.k)
    out = GridFunction(u.grid, u1)
    if return_derivative:
        return out, GridFunction(u.grid, q1)
    return out


def inverse_seed(eta, k1) -> tuple[np.ndarray, np.ndarray]:
    """Seed of the left-inverse transformation.

    For eta solving the problem at k1, the image direction of T(eta, k1, k1)
    is (conj(eta2) conj(m), -conj(eta1) m)/|m| with m = m_{k1}(eta, eta); it
    satisfies C(inverse) = -C(eta) and A(inverse) = conj(A(eta)) pointwise,
    which makes D(inverse_seed(eta), k1) undo D(eta, k1) exactly.  Applying
    the map twice returns -eta.
    """
    kp = _as_point(k1)
    e1 = np.asarray(eta[0].values if isinstance(eta[0], GridFunction) else eta[0])
    e2 = np.asarray(eta[1].values if isinstance(eta[1], GridFunction) else eta[1])
    m = kp.k * np.abs(e1) ** 2 + np.conj(kp.k) * np.abs(e2) ** 2
    am = np.abs(m)
    if np.min(am) == 0.0:
        raise DegenerateSeedError("degenerate seed")
    return np.conj(e2) * np.conj(m) / am, -np.conj(e1) * m / am


def transformed_jost(seed: DarbouxSeed, jost: JostVector, k) -> JostVector:
    """Dress one Jost column with T(seed, k, k1) and renormalize its boundary.

    k must keep a margin from the removable singularities at +-k1 and
    +-conj(k1); evaluate at an offset point (``SINGULARITY_OFFSET``) when a
    value "at" one of them is needed.
    """
    kp = _as_point(k)
    k1 = seed.k1.k
    if min(abs(kp.k ** 2 - k1 ** 2), abs(kp.k ** 2 - np.conj(k1) ** 2)) < POLE_MARGIN:
        raise OffsetRequiredError("evaluate at offset")
    A, C, _ = _ac_fields(k1, seed.eta[0].values, seed.eta[1].values)
    k2 = kp.k ** 2
    t11 = A * k2 - abs(k1) ** 2
    t12 = -C * kp.k
    t21 = np.conj(C) * kp.k
    t22 = np.conj(A) * k2 - abs(k1) ** 2
    v1 = t11 * jost.psi1 + t12 * jost.psi2
    v2 = t21 * jost.psi1 + t22 * jost.psi2
    edge = 0 if jost.side is Side.MINUS else -1
    target = v1[edge] if jost.column is Column.FIRST else v2[edge]
    if abs(target) == 0.0:
        raise DegenerateSeedError("degenerate seed")
    v1, v2 = v1 / target, v2 / target
    g = jost.components[0].grid
    return JostVector(
        k=kp,
        side=jost.side,
        column=jost.column,
        components=(GridFunction(g, v1), GridFunction(g, v2)),
    )


def _conjugate_eigen_seed(u: GridFunction, kp: SpectralPoint, q, substeps: int):
    """Glued direction of varphi_+(x; conj(k1)) e^{-i conj(k1)^2 x}.

    Mirror of :func:`fleq.spectral.eigen_seed` for the conjugate anchor:
    varphi_+(conj(k1)) is reliable right of the transition, the proportional
    phi_-(conj(k1)) e^{2i conj(k1)^2 x} left of it.
    """
    kc = np.conj(kp.k)
    g1, g2 = _integrate(q, kc, u.grid.h, Side.PLUS, Column.FIRST, substeps)
    b1, b2 = _integrate(q, kc, u.grid.h, Side.MINUS, Column.SECOND, substeps)
    phase = np.exp(2j * kc ** 2 * u.grid.x)
    l1 = b1 * phase
    l2 = b2 * phase
    # seed direction swings e2 -> e1 left to right; find the crossing on the
    # left-reliable phi_- solve (the varphi_+ solve is polluted left of it)
    crossings = np.nonzero(np.abs(b1) >= np.abs(b2))[0]
    i_glue = int(crossings[0]) if crossings.size else u.grid.N // 2
    idx = np.arange(u.grid.N)
    e1 = np.where(idx <= i_glue, l1, g1)
    e2 = np.where(idx <= i_glue, l2, g2)
    scale = np.maximum(np.abs(e1), np.abs(e2))
    scale[scale == 0] = 1.0
    return e1 / scale, e2 / scale


def four_representation_potentials(
    u: GridFunction, k1, ux: GridFunction | None = None, substeps: int = 1
):
    """The removed potential computed from the four equivalent seed choices.

    At an eigenvalue the four fundamental seeds (varphi_-/phi_+ anchored at
    k1, varphi_+/phi_- anchored at conj(k1)) define the same map; this
    evaluates all four and returns the list of potentials for comparison.
    """
    kp = _as_point(k1)
    q = ux if ux is not None else derivative(u, 1)
    out = []

    seed = eigen_seed(u, kp, ux=q, substeps=substeps)
    u1, _ = _potential_map(u.values, q.values, seed.eta1, seed.eta2, kp.k)
    out.append(GridFunction(u.grid, u1))

    # phi_+-primary orientation of the same gluing
    p1, p2, f1, f2 = jost_columns_batch(q.values, kp.k, u.grid.h, substeps)
    phase = np.exp(2j * kp.k ** 2 * u.grid.x)
    gam = seed.gamma if seed.gamma not in (None, 0) else 1.0
    idx = np.arange(u.grid.N)
    i_glue = seed.glue_index if seed.glue_index is not None else u.grid.N // 2
    e1 = np.where(idx <= i_glue, p1 / gam, phase * f1)
    e2 = np.where(idx <= i_glue, p2 / gam, phase * f2)
    scale = np.maximum(np.abs(e1), np.abs(e2))
    scale[scale == 0] = 1.0
    u2, _ = _potential_map(u.values, q.values, e1 / scale, e2 / scale, kp.k)
    out.append(GridFunction(u.grid, u2))

    # conjugate-anchor representations
    c1, c2 = _conjugate_eigen_seed(u, kp, q.values, substeps)
    kc = np.conj(kp.k)
    u3, _ = _potential_map(u.values, q.values, c1, c2, kc)
    out.append(GridFunction(u.grid, u3))

    u4, _ = _potential_map(
        u.values, q.values, np.conj(seed.eta2), -np.conj(seed.eta1), kc
    )
    out.append(GridFunction(u.grid, u4))
    return out
