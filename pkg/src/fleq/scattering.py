"""Scattering coefficients, eigenvalue location and norming constants.

The coefficients are Wronskian determinants of Jost columns,

    a(k) = det(varphi_-(x;k) e^{-ik^2 x}, phi_+(x;k) e^{ik^2 x}),
    b(k) = det(varphi_+(x;k) e^{-ik^2 x}, varphi_-(x;k) e^{-ik^2 x}),

both x-independent for the exact solutions; they are evaluated over a central
window of nodes and averaged, with the x-spread reported as a conditioning
diagnostic.  a is analytic on {Im k^2 > 0} and its quadrant-I zeros are the
discrete eigenvalues; they are certified by the argument principle and
refined by a complex Newton iteration.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ClusteredZerosError,
    IllConditionedWarning,
    InputError,
    NewtonRefinementError,
    NotAnEigenvalueError,
    ResonanceError,
    VanishingCoefficientError,
    WindingRefinementError,
    ZeroOnContourError,
)
from .grid import GridFunction, derivative
from .spectral import (
    Column,
    Side,
    SpectralPoint,
    _as_point,
    _integrate,
    eigen_seed,
    jost_columns_batch,
)

ZERO_TOL = 1e-8              # |a| below this declares an eigenvalue
EIGEN_DECISION_TOL = 1e-6    # solver-floor tolerance for eigen-ness decisions
SPREAD_TOL = 1e-6            # Wronskian x-spread conditioning threshold
NEWTON_STEP = 1e-5           # finite-difference step for a'(k)
NEWTON_TARGET = 1e-10
SIMPLE_ZERO_FLOOR = 1e-6     # |a'(k_j)| floor certifying a simple zero

__all__ = [
    "ScatteringSample",
    "DiscreteSpectrum",
    "ScatteringData",
    "coefficients",
    "a_samples",
    "reflection",
    "det_scattering",
    "winding",
    "locate_zeros",
    "norming_constant",
    "write_scattering_data",
    "read_scattering_data",
]


@dataclass(frozen=True)
class ScatteringSample:
    """(k, a, b, r) at one spectral point; b, r only on the continuous spectrum."""

    k: SpectralPoint
    a: complex
    b: complex | None = None
    r: complex | None = None
    a_spread: float = 0.0


@dataclass
class DiscreteSpectrum:
    """Quadrant-I zeros of a(k) with optional norming constants."""

    eigenvalues: list[tuple[SpectralPoint, complex | None]] = field(default_factory=list)

    def __iter__(self):
        return iter(self.eigenvalues)

    def __len__(self):
        return len(self.eigenvalues)


@dataclass
class ScatteringData:
    """Continuous-spectrum samples plus the discrete spectrum."""

    samples: list[ScatteringSample]
    spectrum: DiscreteSpectrum


def _window(n: int) -> slice:
    # central 20% of the grid: both Jost solves well resolved there
    return slice(n // 2 - n // 10, n // 2 + n // 10 + 1)


def _q_values(u: GridFunction, ux: GridFunction | None) -> np.ndarray:
    return (ux if ux is not None else derivative(u, 1)).values


def a_samples(
    u: GridFunction, ks, ux: GridFunction | None = None, substeps: int = 1
):
    """Batched a(k) over an array of spectral points with Im k^2 >= 0.

    Returns (values, spreads) shaped like ``ks``.
    """
    q = _q_values(u, ux)
    ks = np.asarray(ks, dtype=complex)
    p1, p2, f1, f2 = jost_columns_batch(q, ks, u.grid.h, substeps)
    w = _window(u.grid.N)
    avals = p1[..., w] * f2[..., w] - p2[..., w] * f1[..., w]
    mean = avals.mean(axis=-1)
    spread = np.abs(avals - mean[..., None]).max(axis=-1)
    return mean, spread


def coefficients(
    u: GridFunction, k, ux: GridFunction | None = None, substeps: int = 1
) -> ScatteringSample:
    """Scattering sample at one k: a always, b and r on R u iR only."""
    kp = _as_point(k)
    imk2 = (kp.k ** 2).imag
    if imk2 < -1e-12 * abs(kp.k) ** 2:
        raise InputError("coefficients need Im k^2 >= 0 for the a-Wronskian")
    q = _q_values(u, ux)
    n = u.grid.N
    h = u.grid.h
    w = _window(n)
    p1, p2, f1, f2 = jost_columns_batch(q, kp.k, h, substeps)
    avals = p1[w] * f2[w] - p2[w] * f1[w]
    a = complex(avals.mean())
    spread = float(np.abs(avals - a).max())
    if spread > SPREAD_TOL * max(1.0, abs(a)):
        warnings.warn(
            f"ill-conditioned Wronskian: x-spread {spread:.3e} at k={kp.k}",
            IllConditionedWarning,
            stacklevel=2,
        )
    b = r = None
    if kp.on_continuous_spectrum:
        g1, g2 = _integrate(q, kp.k, h, Side.PLUS, Column.FIRST, substeps)
        phase = np.exp(-2j * kp.k ** 2 * u.grid.x[w])
        bvals = phase * (g1[w] * p2[w] - g2[w] * p1[w])
        b = complex(bvals.mean())
        if abs(a) < 1e-12:
            raise ResonanceError(f"resonance encountered at k={kp.k}")
        r = b / a
    return ScatteringSample(k=kp, a=a, b=b, r=r, a_spread=spread)


def reflection(
    u: GridFunction, k, ux: GridFunction | None = None, substeps: int = 1
) -> complex:
    """r(k) = b(k)/a(k) on the continuous spectrum."""
    kp = _as_point(k)
    if not kp.on_continuous_spectrum:
        raise InputError("reflection coefficient lives on R u iR")
    sample = coefficients(u, kp, ux=ux, substeps=substeps)
    if abs(sample.a) < 1e-12:
        raise VanishingCoefficientError("division by vanishing a")
    return sample.b / sample.a


def det_scattering(
    u: GridFunction, k, ux: GridFunction | None = None, substeps: int = 1
) -> complex:
    """det S(k) = a(k) conj(a(kbar)) + b(k) conj(b(kbar)); equals 1 exactly."""
    kp = _as_point(k)
    if not kp.on_continuous_spectrum:
        raise InputError("det S is sampled on the continuous spectrum")
    s = coefficients(u, kp, ux=ux, substeps=substeps)
    sc = coefficients(u, np.conj(kp.k), ux=ux, substeps=substeps)
    return s.a * np.conj(sc.a) + s.b * np.conj(sc.b)


# -- argument principle -------------------------------------------------------

def _rect_path(rect, ts: np.ndarray) -> np.ndarray:
    """Map parameters in [0, 1) to points on the rectangle boundary (ccw)."""
    re0, re1, im0, im1 = rect
    w = re1 - re0
    h = im1 - im0
    per = 2 * (w + h)
    s = np.asarray(ts) * per
    pts = np.empty(s.shape, dtype=complex)
    m0 = s < w
    m1 = (s >= w) & (s < w + h)
    m2 = (s >= w + h) & (s < 2 * w + h)
    m3 = s >= 2 * w + h
    pts[m0] = re0 + s[m0] + 1j * im0
    pts[m1] = re1 + 1j * (im0 + (s[m1] - w))
    pts[m2] = re1 - (s[m2] - w - h) + 1j * im1
    pts[m3] = re0 + 1j * (im1 - (s[m3] - 2 * w - h))
    return pts


def winding(
    u: GridFunction,
    rect=(0.05, 3.0, 0.05, 3.0),
    ux: GridFunction | None = None,
    substeps: int = 1,
    samples: int = 256,
    max_rounds: int = 8,
    a_floor: float = ZERO_TOL,
) -> int:
    """Zero count of a(k) inside a quadrant-I rectangle by phase accumulation.

    The positively oriented boundary is sampled adaptively until every
    segment carries a phase increment below pi/2.
    """
    re0, re1, im0, im1 = rect
    if re0 < 0.05 or im0 < 0.05:
        raise InputError("rectangle must keep a margin of 0.05 from the axes")
    if re1 <= re0 or im1 <= im0:
        raise InputError("empty rectangle")
    q = _q_values(u, ux)
    h = u.grid.h
    n = u.grid.N
    w = _window(n)

    cache: dict[float, complex] = {}

    def evaluate(ts):
        new = [t for t in ts if t not in cache]
        if new:
            pts = _rect_path(rect, np.array(new))
            p1, p2, f1, f2 = jost_columns_batch(q, pts, h, substeps)
            vals = (p1[..., w] * f2[..., w] - p2[..., w] * f1[..., w]).mean(axis=-1)
            for t, v in zip(new, vals):
                cache[t] = complex(v)
        return np.array([cache[t] for t in ts])

    ts = list(np.linspace(0.0, 1.0, samples, endpoint=False))
    for _ in range(max_rounds):
        vals = evaluate(ts)
        if np.abs(vals).min() <= a_floor:
            raise ZeroOnContourError("zero on contour")
        ratios = np.roll(vals, -1) / vals
        dphi = np.angle(ratios)
        if np.all(np.abs(dphi) < np.pi / 2):
            total = dphi.sum() / (2 * np.pi)
            if abs(total - round(total)) > 0.1:
                raise WindingRefinementError("refinement failure")
            return int(round(total))
        refined = []
        for i, t in enumerate(ts):
            refined.append(t)
            if np.abs(dphi[i]) >= np.pi / 2:
                t_next = ts[(i + 1) % len(ts)]
                if i + 1 == len(ts):
                    t_next += 1.0
                refined.append(((t + t_next) / 2.0) % 1.0)
        ts = sorted(set(refined))
    raise WindingRefinementError("refinement failure")


def _newton_zero(u, k0: complex, q, substeps: int) -> tuple[complex, complex]:
    """Newton refinement of a zero of a(k), derivative by central differences."""
    h = u.grid.h
    n = u.grid.N
    w = _window(n)

    def a_of(kv):
        kv = np.asarray(kv, dtype=complex)
        p1, p2, f1, f2 = jost_columns_batch(q, kv, h, substeps)
        return (p1[..., w] * f2[..., w] - p2[..., w] * f1[..., w]).mean(axis=-1)

    k = complex(k0)
    for _ in range(60):
        vals = a_of(np.array([k, k + NEWTON_STEP, k - NEWTON_STEP,
                              k + 1j * NEWTON_STEP, k - 1j * NEWTON_STEP]))
        a0 = vals[0]
        d_re = (vals[1] - vals[2]) / (2 * NEWTON_STEP)
        d_im = (vals[3] - vals[4]) / (2j * NEWTON_STEP)
        aprime = 0.5 * (d_re + d_im)
        if abs(a0) < NEWTON_TARGET:
            return k, complex(aprime)
        if abs(aprime) < 1e-14:
            break
        k = k - a0 / aprime
    if abs(a_of(np.array([k]))[0]) < NEWTON_TARGET:
        return k, complex(aprime)
    raise NewtonRefinementError("refinement failed")


def locate_zeros(
    u: GridFunction,
    region=(0.05, 3.0, 0.05, 3.0),
    ux: GridFunction | None = None,
    substeps: int = 1,
    with_norming: bool = False,
    min_size: float = 1e-3,
) -> DiscreteSpectrum:
    """Quadrant-I zeros of a(k): winding count, quad-tree isolation, Newton polish."""
    q = _q_values(u, ux)

    def count(rect):
        for shrink in (0.0, 0.011, 0.023):
            r = (rect[0] + shrink, rect[1] - shrink, rect[2] + shrink, rect[3] - shrink)
            if r[1] <= r[0] or r[3] <= r[2]:
                continue
            try:
                return winding(u, r, ux=ux, substeps=substeps), r
            except ZeroOnContourError:
                continue
        raise ZeroOnContourError("zero on contour")

    total, region = count(region)
    found: list[tuple[SpectralPoint, complex | None]] = []
    stack = [(region, total)]
    while stack:
        rect, wnd = stack.pop()
        if wnd == 0:
            continue
        re0, re1, im0, im1 = rect
        if wnd == 1 and max(re1 - re0, im1 - im0) <= 0.6:
            center = 0.5 * (re0 + re1) + 0.5j * (im0 + im1)
            kz, aprime = _newton_zero(u, center, q, substeps)
            if kz.real < 0 or kz.imag < 0:
                kz = -kz  # a(k) is even; keep the quadrant-I representative
            if not (re0 - 0.05 <= kz.real <= re1 + 0.05
                    and im0 - 0.05 <= kz.imag <= im1 + 0.05):
                raise NewtonRefinementError("refinement failed")
            if abs(aprime) <= SIMPLE_ZERO_FLOOR:
                raise ClusteredZerosError("clustered or multiple zeros")
            found.append((SpectralPoint.from_k(kz), None))
            continue
        if min(re1 - re0, im1 - im0) < min_size:
            raise ClusteredZerosError("clustered or multiple zeros")
        rm = 0.5 * (re0 + re1)
        im = 0.5 * (im0 + im1)
        subs = [
            (re0, rm, im0, im),
            (rm, re1, im0, im),
            (re0, rm, im, im1),
            (rm, re1, im, im1),
        ]
        counted = [count(s) for s in subs]
        if sum(c for c, _ in counted) != wnd:
            raise ClusteredZerosError("clustered or multiple zeros")
        stack.extend((r, c) for c, r in counted)

    found.sort(key=lambda e: (abs(e[0].k), e[0].k.real))
    for i in range(len(found) - 1):
        if abs(found[i][0].k - found[i + 1][0].k) < 1e-9:
            raise ClusteredZerosError("clustered or multiple zeros")
    if with_norming:
        found = [
            (kp, norming_constant(u, kp, ux=ux, substeps=substeps)) for kp, _ in found
        ]
    return DiscreteSpectrum(eigenvalues=found)


def norming_constant(
    u: GridFunction,
    k1,
    ux: GridFunction | None = None,
    substeps: int = 1,
    residual_tol: float = 1e-6,
) -> complex:
    """gamma with varphi_-(x;k1) e^{-ik1^2 x} = gamma phi_+(x;k1) e^{ik1^2 x}.

    Least-squares ratio over the component-balance window of the two solves;
    the relative proportionality residual above ``residual_tol`` raises
    "not an eigenvalue".
    """
    seed = eigen_seed(u, k1, ux=ux, substeps=substeps)
    if not seed.is_eigen or seed.gamma is None:
        raise NotAnEigenvalueError(
            f"not an eigenvalue: |a(k1)| = {abs(seed.a_value):.3e}"
        )
    if seed.residual > residual_tol:
        raise NotAnEigenvalueError(
            f"not an eigenvalue: proportionality residual {seed.residual:.3e}"
        )
    return seed.gamma


# -- persistence ---------------------------------------------------------------

def _c2l(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def write_scattering_data(path, data: ScatteringData) -> None:
    doc = {
        "samples": [
            {
                "k": _c2l(s.k.k),
                "a": _c2l(s.a),
                "b": _c2l(s.b) if s.b is not None else None,
            }
            for s in data.samples
        ],
        "eigenvalues": [
            {
                "k": _c2l(kp.k),
                "gamma": _c2l(gamma) if gamma is not None else None,
            }
            for kp, gamma in data.spectrum
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_scattering_data(path) -> ScatteringData:
    with open(path) as fh:
        doc = json.load(fh)
    samples = []
    for row in doc["samples"]:
        k = SpectralPoint.from_k(complex(*row["k"]))
        b = complex(*row["b"]) if row.get("b") is not None else None
        a = complex(*row["a"])
        samples.append(
            ScatteringSample(k=k, a=a, b=b, r=(b / a if b is not None else None))
        )
    eigen = []
    for row in doc["eigenvalues"]:
        kp = SpectralPoint.from_k(complex(*row["k"]))
        gamma = complex(*row["gamma"]) if row.get("gamma") is not None else None
        eigen.append((kp, gamma))
    return ScatteringData(samples=samples, spectrum=DiscreteSpectrum(eigen))
