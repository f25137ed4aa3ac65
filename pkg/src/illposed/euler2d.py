"""2D incompressible Euler: pseudo-spectral vorticity solver and cascade.

The velocity form  u_t + P(u . grad u) = 0  is advanced in vorticity form
w_t + u . grad w = 0 with u recovered through the stream-function
multiplier (exact divergence-free enforcement, one scalar unknown).
Quadratic terms are dealiased with the per-axis 2/3 rule; time stepping is
the classical 4-stage Runge-Kutta scheme.

The frozen-coefficient approximants mirror the 1D cascade, with the
rotational pressure-like source Q(u0 . grad u0) feeding ap1:

    ap1:  w_t + u0 . grad w = Q(u0 . grad u0),  w(0) = u0
    ap2:  w_t + u0 . grad w = 0,                w(0) = u0
    ap3:  w_t + u0 . grad w = 0,                w(0) = block_n u0
    ap4:  (block_n u0)(x - t u0(x))             (closed form)

Frozen transport is solved along the autonomous backward flow of u0
(RK4 on dZ/ds = -u0(Z)) with Simpson accumulation of the source.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import CFLViolation, IllposedError, NonDivergenceFree, ShockTooClose
from .euler_types import LerayProjector, VectorField
from .grid import FFT_WORKERS, Field, UniformPeriodicGrid
from .sampling import PeriodicInterpolant2D
from .spectral import (BesovIndex, besov_norm, derivative, dyadic_block,
                       lp_norm, max_resolved_shell, multiply_dealiased)

DIVERGENCE_TOL = 1e-8
RK4_IMAG_STABILITY = 2.6
DEFAULT_MIN_STEPS = 12


class _Workspace:
    """Grid-bound spectral tables for the vorticity solver."""

    def __init__(self, grid: UniformPeriodicGrid):
        if grid.dim != 2:
            raise IllposedError("the vorticity solver runs on 2D grids")
        self.grid = grid
        k0, k1 = grid.freq_meshes()
        self.k0 = k0
        self.k1 = k1
        k2 = k0**2 + k1**2
        with np.errstate(divide="ignore", invalid="ignore"):
            self.inv_lap = np.where(k2 > 0.0, 1.0 / k2, 0.0)
        self.mask = grid.dealias_mask()

    def velocity_spectra(self, w_hat):
        psi = w_hat * self.inv_lap
        return 1j * self.k1 * psi, -1j * self.k0 * psi

    def velocity(self, w_hat):
        s0, s1 = self.velocity_spectra(w_hat)
        shape = self.grid.shape
        return (sfft.irfftn(s0, s=shape, workers=FFT_WORKERS),
                sfft.irfftn(s1, s=shape, workers=FFT_WORKERS))

    def rhs(self, w_hat):
        shape = self.grid.shape
        u0s, u1s = self.velocity(w_hat * self.mask)
        wx = sfft.irfftn(1j * self.k0 * w_hat * self.mask, s=shape, workers=FFT_WORKERS)
        wy = sfft.irfftn(1j * self.k1 * w_hat * self.mask, s=shape, workers=FFT_WORKERS)
        adv = sfft.rfftn(u0s * wx + u1s * wy, workers=FFT_WORKERS)
        return -adv * self.mask


def curl(f: VectorField) -> Field:
    """Scalar vorticity d1 u2 - d2 u1 (spectral)."""
    g = f.grid
    k0, k1 = g.freq_meshes()
    w_hat = 1j * k0 * f.component(1).spectrum - 1j * k1 * f.component(0).spectrum
    return Field.from_spectrum(g, w_hat)


def velocity_from_vorticity(w: Field) -> VectorField:
    ws = _Workspace(w.grid)
    u0s, u1s = ws.velocity(w.spectrum)
    return VectorField.make(w.grid, u0s, u1s, divergence_free=True)


@dataclass
class EulerState:
    """Vorticity snapshot with its derived velocity."""

    time: float
    vorticity: Field

    @property
    def velocity(self) -> VectorField:
        return velocity_from_vorticity(self.vorticity)


def kinetic_energy(w: Field) -> float:
    """Box integral of |u|^2 / 2 from the vorticity spectrum."""
    ws = _Workspace(w.grid)
    s0, s1 = ws.velocity_spectra(w.spectrum)
    g = w.grid
    # rfft layout counts interior columns of the half-spectrum twice
    ncols = g.spectral_shape()[-1]
    weights = np.full(ncols, 2.0)
    weights[0] = 1.0
    if g.shape[-1] % 2 == 0:
        weights[-1] = 1.0
    e = (np.abs(s0) ** 2 + np.abs(s1) ** 2) * weights[None, :]
    return 0.5 * float(np.sum(e)) * g.cell_volume / g.size


def enstrophy(w: Field) -> float:
    return 0.5 * float(np.sum(w.samples**2)) * w.grid.cell_volume


def solve_euler(u0: VectorField, t: float, dt: float | None = None,
                steps: int | None = None, return_state: bool = False):
    """Advance the flow from the divergence-free datum ``u0`` to time ``t``."""
    g = u0.grid
    div = u0.spectral_divergence_max()
    scale = max(np.abs(u0.samples(0)).max(), np.abs(u0.samples(1)).max(), 1e-30)
    if div > DIVERGENCE_TOL * max(scale, 1.0):
        raise NonDivergenceFree(f"input divergence {div:.2e} exceeds tolerance")
    w = curl(u0)
    if t == 0.0:
        out = velocity_from_vorticity(w)
        return (out, EulerState(0.0, w)) if return_state else out
    ws = _Workspace(g)
    umax = max(float(np.hypot(u0.samples(0), u0.samples(1)).max()), 1e-30)
    kmax = (2.0 / 3.0) * max(g.nyquist(0), g.nyquist(1))
    dt_stable = RK4_IMAG_STABILITY / (kmax * umax)
    if steps is None:
        if dt is None:
            dt = min(0.25 * min(g.spacing) / umax, t / DEFAULT_MIN_STEPS)
        steps = max(1, int(np.ceil(t / dt)))
    h = t / steps
    if h > dt_stable:
        raise CFLViolation(
            f"dt={h:.3e} exceeds the explicit stability limit {dt_stable:.3e}")
    w_hat = w.spectrum.copy()
    for _ in range(steps):
        k1 = ws.rhs(w_hat)
        k2 = ws.rhs(w_hat + 0.5 * h * k1)
        k3 = ws.rhs(w_hat + 0.5 * h * k2)
        k4 = ws.rhs(w_hat + h * k3)
        w_hat = w_hat + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    w_final = Field.from_spectrum(g, w_hat)
    out = velocity_from_vorticity(w_final)
    return (out, EulerState(t, w_final)) if return_state else out


def advection_term(u: VectorField, v: VectorField) -> VectorField:
    """Dealiased u . grad v."""
    comps = []
    for i in range(2):
        acc = Field.zeros(u.grid)
        for axis in range(2):
            acc = acc + multiply_dealiased(u.component(axis),
                                           derivative(v.component(i), axis))
        comps.append(acc)
    return VectorField((comps[0], comps[1]))


def rotational_source(u0: VectorField, projector: LerayProjector | None = None) -> VectorField:
    """Q(u0 . grad u0): the gradient part of the frozen advection."""
    if projector is None:
        projector = LerayProjector(u0.grid)
    return projector.apply_q(advection_term(u0, u0))


def velocity_residual(u0: VectorField, t: float, delta: float | None = None,
                      steps: int | None = None) -> float:
    """Relative L^2 residual of u_t + P(u . grad u) at time t.

    The time derivative uses a centred 4th-order five-point stencil of
    independent solves; measures consistency of the vorticity formulation
    with the velocity form.
    """
    if delta is None:
        delta = t / 8.0
    proj = LerayProjector(u0.grid)
    sols = {}
    for m in (-2, -1, 0, 1, 2):
        sols[m] = solve_euler(u0, t + m * delta, steps=steps)
    dudt = []
    for i in range(2):
        d = (sols[-2].samples(i) - 8 * sols[-1].samples(i)
             + 8 * sols[1].samples(i) - sols[2].samples(i)) / (12.0 * delta)
        dudt.append(d)
    padv = proj.apply(advection_term(sols[0], sols[0]))
    res0 = dudt[0] + padv.samples(0)
    res1 = dudt[1] + padv.samples(1)
    num = np.sqrt(np.sum(res0**2 + res1**2))
    den = np.sqrt(np.sum(padv.samples(0)**2 + padv.samples(1)**2))
    return float(num / max(den, 1e-30))


class FrozenFlow2D:
    """Backward characteristics of the autonomous frozen velocity.

    ``evaluator`` maps coordinate arrays (y0, y1) to the two velocity
    components; closed-form shell evaluators keep this exact off the grid.
    """

    def __init__(self, evaluator, grid: UniformPeriodicGrid, t: float, steps: int = 12):
        if steps % 2:
            steps += 1
        self.grid = grid
        self.t = t
        x0 = grid.axis(0)[:, None] + np.zeros((1, grid.shape[1]))
        x1 = grid.axis(1)[None, :] + np.zeros((grid.shape[0], 1))
        z0, z1 = x0.copy(), x1.copy()
        h = t / steps
        self.checkpoints = [(z0.copy(), z1.copy())]
        for _ in range(steps):
            a0, a1 = evaluator(z0, z1)
            b0, b1 = evaluator(z0 - 0.5 * h * a0, z1 - 0.5 * h * a1)
            c0, c1 = evaluator(z0 - 0.5 * h * b0, z1 - 0.5 * h * b1)
            d0, d1 = evaluator(z0 - h * c0, z1 - h * c1)
            z0 = z0 - (h / 6.0) * (a0 + 2 * b0 + 2 * c0 + d0)
            z1 = z1 - (h / 6.0) * (a1 + 2 * b1 + 2 * c1 + d1)
            self.checkpoints.append((z0.copy(), z1.copy()))
        self.steps = steps

    def endpoint(self):
        return self.checkpoints[-1]

    def pull_back(self, field_eval) -> np.ndarray:
        z0, z1 = self.endpoint()
        return field_eval(z0, z1)

    def duhamel(self, source_eval) -> np.ndarray:
        """Simpson integral of source(position(s)) along the trajectory."""
        h = self.t / self.steps
        acc = None
        for k, (z0, z1) in enumerate(self.checkpoints):
            w = 1.0 if k in (0, self.steps) else (4.0 if k % 2 else 2.0)
            term = source_eval(z0, z1)
            acc = term * w if acc is None else acc + w * term
        return (h / 3.0) * acc


def interp_vector(f: VectorField):
    """Tensor-stencil scattered evaluator of a grid vector field."""
    i0 = PeriodicInterpolant2D.from_field(f.component(0))
    i1 = PeriodicInterpolant2D.from_field(f.component(1))
    return lambda y0, y1: (i0(y0, y1), i1(y0, y1))


def ap4_pair(u0: VectorField, u0n: VectorField, n: int, t: float):
    """Closed-form pair (block_n u0)(x - t u0(x)), (block_n u0n)(x - t u0n(x))."""
    out = []
    for f in (u0, u0n):
        g = f.grid
        x0 = g.axis(0)[:, None] - t * f.samples(0)
        x1 = g.axis(1)[None, :] - t * f.samples(1)
        comps = []
        for i in range(2):
            block = dyadic_block(f.component(i), n)
            comps.append(Field(g, PeriodicInterpolant2D.from_field(block)(x0, x1)))
        out.append(VectorField((comps[0], comps[1])))
    return out[0], out[1]


@dataclass
class EulerCascadeRow:
    t: float
    err_ap1: float
    err_ap2: float
    err_ap3_block: float
    err_ap4_block: float


@dataclass
class EulerCascadeTable:
    n: int
    idx: BesovIndex
    rows: list[EulerCascadeRow]
    orders: dict[str, float]

    def column(self, name):
        return [getattr(r, name) for r in self.rows]

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("t,err_ap1,err_ap2,err_ap3_block,err_ap4_block\n")
            for r in self.rows:
                fh.write(f"{r.t!r},{r.err_ap1!r},{r.err_ap2!r},"
                         f"{r.err_ap3_block!r},{r.err_ap4_block!r}\n")
            for k, v in self.orders.items():
                fh.write(f"# fitted_order,{k},{v!r}\n")


def _vector_besov(f: VectorField, idx: BesovIndex, j_max: int) -> float:
    return f.besov_norm(idx, j_max)


def _vector_block_lp(f: VectorField, n: int, p: float) -> float:
    return max(lp_norm(dyadic_block(c, n), p) for c in f.components)


def euler_cascade(u0: VectorField, n: int, times: list[float], idx: BesovIndex,
                  evaluator=None, j_max: int | None = None,
                  flow_steps: int = 12, solver_steps: int | None = None) -> EulerCascadeTable:
    """Frozen-coefficient cascade errors against the full solver.

    ``evaluator`` is an off-grid velocity evaluator for u0 (defaults to the
    tensor-stencil interpolant of the grid samples).
    """
    from .experiments import fit_order

    g = u0.grid
    if evaluator is None:
        evaluator = interp_vector(u0)
    if j_max is None:
        j_max = min(max(n + 1, 4), max_resolved_shell(g))
    lower = BesovIndex(idx.s - 1.0, idx.p)
    proj = LerayProjector(g)
    source = rotational_source(u0, proj)
    source_eval = interp_vector(source)
    blocks = VectorField((dyadic_block(u0.component(0), n),
                          dyadic_block(u0.component(1), n)))
    block_eval = interp_vector(blocks)
    rows = []
    for t in times:
        u_true = solve_euler(u0, t, steps=solver_steps)
        flow = FrozenFlow2D(evaluator, g, t, steps=flow_steps)
        z0, z1 = flow.endpoint()
        ap2 = VectorField.make(g, *evaluator(z0, z1))
        duh0 = flow.duhamel(lambda a, b: source_eval(a, b)[0])
        duh1 = flow.duhamel(lambda a, b: source_eval(a, b)[1])
        ap1 = VectorField.make(g, ap2.samples(0) + duh0, ap2.samples(1) + duh1)
        ap3 = VectorField.make(g, *block_eval(z0, z1))
        ap4_1, _ = ap4_pair(u0, u0, n, t)
        w = 2.0 ** (n * idx.s)
        block_of_ap2 = VectorField((dyadic_block(ap2.component(0), n),
                                    dyadic_block(ap2.component(1), n)))
        rows.append(EulerCascadeRow(
            t=t,
            err_ap1=_vector_besov(u_true - ap1, lower, j_max),
            err_ap2=_vector_besov(ap1 - ap2, idx, j_max),
            err_ap3_block=w * max(
                lp_norm(block_of_ap2.component(i) - ap3.component(i), idx.p)
                for i in range(2)),
            err_ap4_block=w * max(
                lp_norm(ap4_1.component(i) - ap3.component(i), idx.p)
                for i in range(2)),
        ))
    table = EulerCascadeTable(n=n, idx=idx, rows=rows, orders={})
    ts = [r.t for r in rows]
    for key in ("err_ap1", "err_ap2", "err_ap3_block", "err_ap4_block"):
        errs = [getattr(r, key) for r in rows]
        if all(e > 0.0 for e in errs) and len(errs) >= 3:
            table.orders[key] = fit_order(ts, errs)
    return table
