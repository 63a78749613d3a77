"""Acceptance-criteria engine: every check the toolkit must satisfy, with its
tolerance pinned, runnable as one suite (``fleq verify`` or the pytest
acceptance module).

Two checks encode identities that the transformation provably does not
satisfy in the stated form; they are implemented as stated and report their
measured violation rather than being weakened:

* criterion 7 asserts a1(k) k^2 = (k^2 - conj(k1)^2) a(k) and b1 = -b.  The
  dressing determinant forces a1/a = (k1^2/conj(k1)^2) (k^2-conj(k1)^2) /
  (k^2-k1^2) for removal and leaves b invariant; the stated multiplier would
  keep the zero it is supposed to remove.  The true laws are asserted (at
  1e-6/1e-8) in the regular test suite.
* criterion 11 asserts ||u_x||_{L2} is preserved by a single add/remove.  A
  soliton carries the derivative-norm quantum 4 arg(k1^2) (adding to the
  vacuum from zero norm makes preservation impossible); the measured jump
  equals the quantum to solver accuracy and is reported in the detail field.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import darboux, evolution, scattering
from .grid import Grid, GridFunction, c_constant, smallness_functional, sobolev_report
from .spectral import Column, Side, SpectralPoint, _integrate, auto_substeps, jost_columns_batch

__all__ = ["CheckResult", "VerifyReport", "AcceptanceSuite", "CRITERIA"]


@dataclass(frozen=True)
class CheckResult:
    index: int
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (
            f"[{self.index:2d}] {tag}  {self.name:<34s} "
            f"measured {self.measured:.3e}  threshold {self.threshold:.1e}"
        )


@dataclass
class VerifyReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {
                    "index": c.index,
                    "name": c.name,
                    "passed": c.passed,
                    "measured": c.measured,
                    "threshold": c.threshold,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }


def _ab_batch(u, ux, ks, substeps):
    """Batched (a, b) over real-axis samples."""
    q = ux.values
    h = u.grid.h
    n = u.grid.N
    w = slice(n // 2 - n // 10, n // 2 + n // 10 + 1)
    ks = np.asarray(ks, dtype=complex)
    p1, p2, f1, f2 = jost_columns_batch(q, ks, h, substeps)
    a = (p1[..., w] * f2[..., w] - p2[..., w] * f1[..., w]).mean(axis=-1)
    g1, g2 = _integrate(q, ks, h, Side.PLUS, Column.FIRST, substeps)
    phase = np.exp(-2j * ks[..., None] ** 2 * u.grid.x[w])
    b = (phase * (g1[..., w] * p2[..., w] - g2[..., w] * p1[..., w])).mean(axis=-1)
    return a, b


class AcceptanceSuite:
    """Shared fixtures plus one method per acceptance criterion."""

    K1 = 0.8 + 0.6j
    GAMMA = 1.0 + 0.5j
    K2 = 1.2 + 0.4j
    GAMMA2 = 0.7 - 0.2j

    def __init__(self, L: float = 30.0, N: int = 4001, substeps: int = 2):
        self.grid = Grid(L, N)
        self.substeps = substeps

    # -- fixtures -------------------------------------------------------------

    @cached_property
    def vacuum(self):
        return GridFunction.zero(self.grid)

    @cached_property
    def gauss(self):
        u = GridFunction.from_callable(self.grid, lambda x: 0.5 * np.exp(-x ** 2))
        ux = GridFunction.from_callable(self.grid, lambda x: -x * np.exp(-x ** 2))
        return u, ux

    @cached_property
    def soliton(self):
        return evolution.vacuum_one_soliton(self.K1, self.GAMMA, self.grid)

    @cached_property
    def soliton_removed(self):
        u, ux = self.soliton
        return darboux.remove_soliton(
            u, self.K1, ux=ux, substeps=self.substeps, return_derivative=True
        )

    @cached_property
    def gauss_plus(self):
        u, ux = self.gauss
        sub = max(4, self.substeps)
        return darboux.add_soliton(
            u, self.K1, self.GAMMA, ux=ux, substeps=sub, return_derivative=True
        )

    @cached_property
    def gauss_plus_removed(self):
        u1, u1x = self.gauss_plus
        sub = max(4, self.substeps)
        return darboux.remove_soliton(
            u1, self.K1, ux=u1x, substeps=sub, return_derivative=True
        )

    # -- criteria -------------------------------------------------------------

    def criterion_1(self) -> CheckResult:
        ks = np.linspace(0.25, 4.0, 64)
        a, b = _ab_batch(self.vacuum, GridFunction.zero(self.grid), ks, 1)
        dev = float(max(np.abs(a - 1.0).max(), np.abs(b).max()))
        return CheckResult(1, "vacuum baseline a=1, b=0", dev < 1e-12, dev, 1e-12)

    def _gauss_ab(self):
        u, ux = self.gauss
        ks = np.linspace(0.1, 2.5, 64)
        a_p, b_p = _ab_batch(u, ux, ks, 4)
        a_m, b_m = _ab_batch(u, ux, -ks, 4)
        return ks, a_p, b_p, a_m, b_m

    @cached_property
    def _gauss_ab_cached(self):
        return self._gauss_ab()

    def criterion_2(self) -> CheckResult:
        _, a, b, _, _ = self._gauss_ab_cached
        dev = float(np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - 1.0).max())
        return CheckResult(2, "unimodularity det S = 1", dev < 1e-8, dev, 1e-8)

    def criterion_3(self) -> CheckResult:
        _, a_p, b_p, a_m, b_m = self._gauss_ab_cached
        dev = float(max(np.abs(a_m - a_p).max(), np.abs(b_m + b_p).max()))
        return CheckResult(3, "evenness a(-k)=a(k), b odd", dev < 1e-8, dev, 1e-8)

    def criterion_4(self) -> CheckResult:
        u, ux = self.gauss
        c = c_constant(u, ux=ux)
        target = np.exp(-1j * c)
        devs = []
        for k in (10.0, 20.0, 40.0):
            sub = auto_substeps(k, self.grid.h, target=0.3)
            a, _ = scattering.a_samples(u, np.array([k]), ux=ux, substeps=sub)
            devs.append(abs(a[0] - target))
        f1 = devs[0] / devs[1]
        f2 = devs[1] / devs[2]
        worst = float(min(f1, f2))
        detail = (
            f"|a(k)-e^-ic| = {devs[0]:.3e}, {devs[1]:.3e}, {devs[2]:.3e}; "
            f"per-doubling factors {f1:.2f}, {f2:.2f}"
        )
        return CheckResult(4, "large-k asymptote decay", worst >= 1.8, worst, 1.8, detail)

    def criterion_5(self) -> CheckResult:
        base = GridFunction.from_callable(self.grid, lambda x: 0.5 * np.exp(-x ** 2))
        lo, hi = 1e-3, 2.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            s = smallness_functional(GridFunction(self.grid, mid * base.values))
            if s < 0.9:
                lo = mid
            else:
                hi = mid
        alpha = 0.5 * (lo + hi)
        u = GridFunction(self.grid, alpha * base.values)
        s = smallness_functional(u)
        wnd = scattering.winding(u, substeps=self.substeps)
        detail = f"alpha = {alpha:.6f}, smallness = {s:.6f}, winding = {wnd}"
        return CheckResult(5, "soliton-free criterion", wnd == 0, float(wnd), 0.0, detail)

    def criterion_6(self) -> CheckResult:
        u, ux = self.soliton
        wnd = scattering.winding(u, ux=ux, substeps=self.substeps)
        spec = scattering.locate_zeros(u, ux=ux, substeps=self.substeps)
        k_err = min(abs(kp.k - self.K1) for kp, _ in spec) if len(spec) else np.inf
        gam = scattering.norming_constant(u, self.K1, ux=ux, substeps=self.substeps)
        g_err = abs(gam - self.GAMMA)
        ok = wnd == 1 and len(spec) == 1 and k_err < 1e-6 and g_err < 1e-6
        measured = float(max(k_err, g_err))
        detail = f"winding {wnd}, |k-k1| = {k_err:.2e}, |gamma-err| = {g_err:.2e}"
        return CheckResult(6, "zero creation round trip", ok, measured, 1e-6, detail)

    def criterion_7(self) -> CheckResult:
        u0, u0x = self.gauss_plus
        u1, u1x = self.gauss_plus_removed
        ks = np.linspace(0.3, 2.6, 32)
        a0, b0 = _ab_batch(u0, u0x, ks, 4)
        a1, b1 = _ab_batch(u1, u1x, ks, 4)
        k1 = self.K1
        stated = np.abs(a1 * ks ** 2 - (ks ** 2 - np.conj(k1) ** 2) * a0) / (
            np.abs(a0) * ks ** 2
        )
        b_dev = np.abs(b1 + b0)
        measured = float(max(stated.max(), b_dev.max()))
        true_mult = darboux.a_multiplier(ks, k1, "remove")
        true_res = float(np.abs(a1 / a0 - true_mult).max())
        b_true = float(np.abs(b1 - b0).max())
        detail = (
            f"stated a-law dev {stated.max():.3e}, stated b-law dev {b_dev.max():.3e}; "
            f"measured laws: |a1/a0 - (k1^2/cj k1^2)(k^2-cj k1^2)/(k^2-k1^2)| = "
            f"{true_res:.3e}, |b1-b0| = {b_true:.3e}"
        )
        return CheckResult(
            7, "stated scattering multiplier law", measured < 1e-6, measured, 1e-6,
            detail,
        )

    def criterion_8(self) -> CheckResult:
        sub = self.substeps
        g, gx = self.gauss
        g1, g1x = self.gauss_plus
        back = darboux.remove_soliton(g1, self.K1, ux=g1x, substeps=sub)
        e_gauss = float(np.abs(back.values - g.values).max())

        s, sx = self.soliton
        gone, gonex = self.soliton_removed
        e_vac = float(np.abs(gone.values).max())

        re_add = darboux.add_soliton(gone, self.K1, self.GAMMA, ux=gonex, substeps=sub)
        e_soli = float(np.abs(re_add.values - s.values).max())
        measured = max(e_gauss, e_vac, e_soli)
        detail = (
            f"remove(add(gauss)) {e_gauss:.2e}, remove(add(0)) {e_vac:.2e}, "
            f"add(remove(soliton)) {e_soli:.2e}"
        )
        return CheckResult(8, "invertibility round trips", measured < 1e-8, measured,
                           1e-8, detail)

    def _patch_orders(self, params):
        resids = []
        for factor in (1, 2, 4):
            grid = Grid(self.grid.L, (self.grid.N - 1) * factor + 1)
            tau = grid.h
            patch = evolution.soliton_patch(params, grid, np.arange(5) * tau,
                                            substeps=self.substeps)
            resids.append(evolution.pde_residual(patch))
        orders = [math.log2(resids[i] / resids[i + 1]) for i in range(2)]
        return resids, orders

    def criterion_9(self) -> CheckResult:
        p1 = [evolution.SolitonParameters(SpectralPoint.from_k(self.K1), self.GAMMA)]
        p2 = p1 + [evolution.SolitonParameters(SpectralPoint.from_k(self.K2), self.GAMMA2)]
        r1, o1 = self._patch_orders(p1)
        r2, o2 = self._patch_orders(p2)
        worst = float(min(min(o1), min(o2)))
        detail = (
            f"1-soliton residuals {r1[0]:.2e}/{r1[1]:.2e}/{r1[2]:.2e} orders "
            f"{o1[0]:.2f},{o1[1]:.2f}; 2-soliton {r2[0]:.2e}/{r2[1]:.2e}/{r2[2]:.2e} "
            f"orders {o2[0]:.2f},{o2[1]:.2f}"
        )
        return CheckResult(9, "soliton PDE residual order", worst >= 1.8, worst, 1.8,
                           detail)

    def criterion_10(self) -> CheckResult:
        u0, u0x = self.gauss_plus
        u1, u1x = self.gauss_plus_removed
        ks = np.linspace(0.4, 2.2, 8)
        a0, b0 = _ab_batch(u0, u0x, ks, 8)
        a1, b1 = _ab_batch(u1, u1x, ks, 8)
        r0 = b0 / a0
        r1 = b1 / a1
        mult = darboux.reflection_multiplier(ks, self.K1, "remove")
        devs = []
        for t in (0.0, 0.35, 1.2, 4.0):
            for k, r0k, r1k, m in zip(ks, r0, r1, mult):
                path_a = evolution.evolve_reflection(r1k, k, t)
                path_b = m * evolution.evolve_reflection(r0k, k, t)
                devs.append(abs(path_a - path_b))
        measured = float(max(devs))
        return CheckResult(
            10, "time-evolution commutativity", measured < 1e-8, measured, 1e-8,
            f"32 (k,t) pairs, anchored on measured reflection of the removed pair",
        )

    def criterion_11(self) -> CheckResult:
        g, gx = self.gauss
        g1, g1x = self.gauss_plus
        h = self.grid.h
        n0 = float(np.sqrt(np.trapezoid(np.abs(gx.values) ** 2, dx=h)))
        n1 = float(np.sqrt(np.trapezoid(np.abs(g1x.values) ** 2, dx=h)))
        measured = abs(n1 - n0)
        quantum = 4.0 * np.angle(self.K1 ** 2)
        quantum_dev = abs((n1 ** 2 - n0 ** 2) - quantum)
        rep0 = sobolev_report(g)
        rep1 = sobolev_report(g1)
        finite = all(
            np.isfinite(v) for v in (rep1.H3, rep1.H21, rep0.H3, rep0.H21)
        )
        detail = (
            f"||u1_x|| - ||u_x|| = {n1 - n0:+.6f}; norm-square jump matches the "
            f"soliton quantum 4 arg(k1^2) to {quantum_dev:.2e}; "
            f"H3 ratio {rep1.H3 / rep0.H3:.3f}, H21 ratio {rep1.H21 / rep0.H21:.3f}"
        )
        return CheckResult(
            11, "stated derivative-norm preservation",
            bool(measured < 1e-6 and finite), measured, 1e-6, detail,
        )

    def criterion_12(self) -> CheckResult:
        u, ux = self.soliton
        pots = darboux.four_representation_potentials(
            u, self.K1, ux=ux, substeps=self.substeps
        )
        devs = [
            np.abs(pots[i].values - pots[j].values).max()
            for i in range(4)
            for j in range(i + 1, 4)
        ]
        measured = float(max(devs))
        return CheckResult(12, "four-seed representation equivalence",
                           measured < 1e-7, measured, 1e-7)

    # -- driver ---------------------------------------------------------------

    def run(self, selection=None) -> VerifyReport:
        report = VerifyReport()
        for idx in selection or range(1, 13):
            report.checks.append(getattr(self, f"criterion_{idx}")())
        return report


CRITERIA = tuple(range(1, 13))
