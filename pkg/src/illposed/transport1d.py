"""1D Burgers / transport-type solvers and the approximation cascade.

Pre-shock Burgers is solved exactly by characteristics: the solution at
(t, x) equals u0 at the foot point z solving z + t*u0(z) = x, found by a
safeguarded Newton iteration with a bisection fallback (the map is strictly
increasing as long as 1 + t*min(u0') stays positive).

The frozen-coefficient linear equation  w_t + u0(x) w_x = g  is solved by
integrating the autonomous characteristic ODE dZ/ds = -u0(Z) backwards with
RK4 and accumulating the source along the trajectory with a Simpson rule.
Note the frozen flow is curved: the straight-line map x + t*u0(x) belongs
to the Burgers characteristics and agrees with the frozen flow only to
O(t^2).  Using the true flow keeps the PDE residuals of the transported
fields at the interpolation level, which the residual checks in the test
suite rely on.

The cascade approximants:

    ap1:  w_t + u0 w_x = F(u0),   w(0) = u0
    ap2:  w_t + u0 w_x = 0,       w(0) = u0
    ap3:  w_t + u0 w_x = 0,       w(0) = block_n u0
    ap4:  (block_n u0)(x - t*u0(x))   (closed form)

with errors  ||u - ap1|| = O(t^2) below the working regularity,
||ap1 - ap2|| = O(t),  2^{ns}||block_n ap2 - ap3|| = O(t)  and
2^{ns}||ap4 - ap3|| = O(t^2 2^n).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .data1d import OSCILLATION_RATE, time_sequence
from .errors import IllposedError, NewtonDivergence, ShockTooClose
from .grid import Field, UniformPeriodicGrid
from .sampling import PeriodicInterpolant, lattice_lp_norm
from .spectral import (BesovIndex, besov_norm, dealias, derivative,
                       dyadic_block, lp_norm, max_resolved_shell,
                       multiply_dealiased)

SHOCK_MARGIN = 0.1
NEWTON_TOL = 1e-13
NEWTON_MAX_ITER = 50


@dataclass(frozen=True)
class RHSHook:
    """A forcing term F(u) for the transport-type equation.

    Shipped instances satisfy the norm-boundedness and difference-Lipschitz
    conditions trivially; the constants are carried for the fitted-constant
    checks in the tests.
    """

    name: str
    evaluate: Callable[[Field], Field]
    besov_bound_const: float
    lipschitz_const: float


def zero_hook() -> RHSHook:
    return RHSHook("zero", lambda u: Field.zeros(u.grid), 0.0, 0.0)


def identity_hook() -> RHSHook:
    return RHSHook("identity", lambda u: u, 1.0, 1.0)


def shock_margin(u0: Field, t: float) -> float:
    """1 + t * min(u0'); positive iff the straight-line map is increasing."""
    du = derivative(u0, 0).samples
    return float(1.0 + t * du.min())


def _interp(f: Field, oversample: int = 2) -> PeriodicInterpolant:
    # x2 refinement keeps the 8-point stencil at or below 1e-10 relative
    # error for content up to ~1/3 of the Nyquist frequency
    return PeriodicInterpolant.from_field(f, oversample=oversample)


def invert_straight_flow(targets: np.ndarray, t: float,
                         value: Callable[[np.ndarray], np.ndarray],
                         slope: Callable[[np.ndarray], np.ndarray],
                         sup_value: float,
                         tol: float = NEWTON_TOL) -> np.ndarray:
    """Solve z + t*value(z) = x for each target x.

    Newton from z = x - t*value(x); points that have not met ``tol`` after
    the iteration cap are finished by bisection on the monotone residual
    over [x - t*sup, x + t*sup].
    """
    z = targets - t * value(targets)
    res = z + t * value(z) - targets
    for _ in range(NEWTON_MAX_ITER):
        bad = np.abs(res) > tol
        if not bad.any():
            return z
        zb = z[bad]
        step = res[bad] / (1.0 + t * slope(zb))
        z[bad] = zb - step
        res[bad] = z[bad] + t * value(z[bad]) - targets[bad]
    # bisection fallback on the stragglers
    bad = np.abs(res) > tol
    lo = targets[bad] - t * sup_value
    hi = targets[bad] + t * sup_value
    flo = lo + t * value(lo) - targets[bad]
    fhi = hi + t * value(hi) - targets[bad]
    if np.any(flo > 0.0) or np.any(fhi < 0.0):
        raise NewtonDivergence("bisection bracket does not contain the foot point")
    zb = 0.5 * (lo + hi)
    for _ in range(200):
        fb = zb + t * value(zb) - targets[bad]
        if np.max(np.abs(fb)) <= tol:
            break
        go_right = fb < 0.0
        lo = np.where(go_right, zb, lo)
        hi = np.where(go_right, hi, zb)
        zb = 0.5 * (lo + hi)
    else:
        raise NewtonDivergence("bisection failed to reach tolerance")
    z[bad] = zb
    return z


class BurgersEvaluator:
    """Scattered-point evaluators of one datum, shared across solves."""

    def __init__(self, u0: Field, oversample: int = 2):
        self.field = u0
        self.value = _interp(u0, oversample)
        self.slope = _interp(derivative(u0, 0), oversample)
        self.sup = float(np.abs(u0.samples).max())
        self.min_slope = float(derivative(u0, 0).samples.min())

    def margin(self, t: float) -> float:
        return 1.0 + t * self.min_slope


@dataclass
class FlowMap1D:
    """Straight-line characteristic map x -> x + t*u0(x) and its inverse."""

    t: float
    velocity: Field
    forward: Field
    inverse: Field

    @classmethod
    def build(cls, u0: Field, t: float, check_margin: bool = True,
              evaluator: BurgersEvaluator | None = None) -> "FlowMap1D":
        g = u0.grid
        if g.dim != 1:
            raise IllposedError("FlowMap1D expects a 1D field")
        ev = evaluator if evaluator is not None else BurgersEvaluator(u0)
        margin = ev.margin(t)
        if check_margin and margin < SHOCK_MARGIN:
            raise ShockTooClose(
                f"monotonicity margin {margin:.4f} < {SHOCK_MARGIN} at t={t:.5f}")
        x = g.axis(0)
        inv = invert_straight_flow(x, t, ev.value, ev.slope, ev.sup)
        return cls(t=t, velocity=u0,
                   forward=Field(g, x + t * u0.samples),
                   inverse=Field(g, inv))


def solve_burgers(u0: Field, t: float, F: RHSHook | None = None,
                  dt: float | None = None, steps: int | None = None,
                  evaluator: BurgersEvaluator | None = None) -> Field:
    """Advance  u_t + u u_x = F(u)  from u0 to time t.

    With F None the solution is the exact characteristic composition.  With
    a forcing hook, a 4-stage explicit Runge-Kutta step on the dealiased
    spectral form is used.
    """
    if t == 0.0:
        return Field(u0.grid, u0.samples.copy())
    if F is None:
        ev = evaluator if evaluator is not None else BurgersEvaluator(u0)
        fm = FlowMap1D.build(u0, t, evaluator=ev)
        return Field(u0.grid, ev.value(fm.inverse.samples))
    if F.name == "identity":
        return _solve_exponential_forcing(u0, t)
    return _solve_rk4(u0, t, F, dt=dt, steps=steps)


def _solve_exponential_forcing(u0: Field, t: float) -> Field:
    """Exact solution for F(u) = u: foot points carry u0 * e^t along
    straight lines traversed with the inflated time e^t - 1."""
    teff = np.expm1(t)
    margin = shock_margin(u0, teff)
    if margin < SHOCK_MARGIN:
        raise ShockTooClose(f"monotonicity margin {margin:.4f} at effective time {teff:.5f}")
    g = u0.grid
    val = _interp(u0)
    slo = _interp(derivative(u0, 0))
    sup = float(np.abs(u0.samples).max())
    z = invert_straight_flow(g.axis(0), teff, val, slo, sup)
    return Field(g, np.exp(t) * val(z))


def _burgers_rhs(u: Field, F: RHSHook) -> Field:
    adv = multiply_dealiased(u, derivative(u, 0))
    forced = F.evaluate(u)
    return Field(u.grid, forced.samples - adv.samples)


def _solve_rk4(u0: Field, t: float, F: RHSHook,
               dt: float | None, steps: int | None) -> Field:
    g = u0.grid
    if steps is None:
        if dt is None:
            umax = max(float(np.abs(u0.samples).max()), 1e-12)
            dt = 0.25 * g.spacing[0] / umax
        steps = max(1, int(np.ceil(t / dt)))
    u = Field(g, u0.samples.copy())
    h = t / steps
    for _ in range(steps):
        k1 = _burgers_rhs(u, F)
        k2 = _burgers_rhs(Field(g, u.samples + 0.5 * h * k1.samples), F)
        k3 = _burgers_rhs(Field(g, u.samples + 0.5 * h * k2.samples), F)
        k4 = _burgers_rhs(Field(g, u.samples + h * k3.samples), F)
        u = Field(g, u.samples + (h / 6.0) * (k1.samples + 2 * k2.samples
                                              + 2 * k3.samples + k4.samples))
        u = dealias(u)
    return u


def backward_frozen_flow(u0: Field, t: float, steps: int = 16):
    """Positions Z_k of the frozen-velocity characteristics at s = k*t/steps.

    Z solves dZ/ds = -u0(Z) from the grid points; returns the list of
    position arrays including both endpoints.
    """
    if steps % 2:
        steps += 1
    g = u0.grid
    val = _interp(u0)
    z = g.axis(0).copy()
    out = [z.copy()]
    h = t / steps
    for _ in range(steps):
        k1 = -val(z)
        k2 = -val(z + 0.5 * h * k1)
        k3 = -val(z + 0.5 * h * k2)
        k4 = -val(z + h * k3)
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(z.copy())
    return out


def solve_frozen_transport(u0: Field, init: Field,
                           rhs: Field | Callable[[float], Field] | None,
                           t: float, steps: int = 16) -> Field:
    """Solve  w_t + u0(x) w_x = rhs  with w(0) = init along the frozen flow.

    ``rhs`` may be None, a constant-in-time Field, or a Field-valued
    function of time; the source integral uses a composite Simpson rule on
    the characteristic checkpoints (4th order in t).
    """
    g = u0.grid
    if t == 0.0:
        return Field(g, init.samples.copy())
    if shock_margin(u0, t) < SHOCK_MARGIN:
        raise ShockTooClose(f"frozen flow too steep at t={t:.5f}")
    positions = backward_frozen_flow(u0, t, steps)
    nsteps = len(positions) - 1
    out = _interp(init)(positions[-1])
    if rhs is not None:
        h = t / nsteps
        if isinstance(rhs, Field):
            const = _interp(rhs)
            source = lambda tau: const  # noqa: E731 - constant source
        else:
            cache: dict[float, PeriodicInterpolant] = {}

            def source(tau: float) -> PeriodicInterpolant:
                if tau not in cache:
                    cache[tau] = _interp(rhs(tau))
                return cache[tau]

        acc = np.zeros_like(out)
        for k, z in enumerate(positions):
            w = 1.0 if k in (0, nsteps) else (4.0 if k % 2 else 2.0)
            acc += w * source(t - k * h)(z)
        out = out + (h / 3.0) * acc
    return Field(g, out)


def ap4_closed_form(u0: Field, n: int, t: float) -> Field:
    """(block_n u0)(x - t*u0(x)) by band-limited composition."""
    g = u0.grid
    block = dyadic_block(u0, n)
    targets = g.axis(0) - t * u0.samples
    return Field(g, _interp(block)(targets))


@dataclass
class CascadeRow:
    t: float
    err_ap1: float        # ||u - ap1|| at regularity s-1
    err_ap2: float        # ||ap1 - ap2|| at regularity s
    err_ap3_block: float  # 2^{ns} ||block_n ap2 - ap3||_{L^p}
    err_ap4_block: float  # 2^{ns} ||ap4 - ap3||_{L^p}


@dataclass
class CascadeTable:
    n: int
    idx: BesovIndex
    rows: list[CascadeRow]
    orders: dict[str, float] = field(default_factory=dict)

    def column(self, name: str) -> list[float]:
        return [getattr(r, name) for r in self.rows]

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,err_ap1,err_ap2,err_ap3_block,err_ap4_block\n")
            for r in self.rows:
                fh.write(f"{r.t!r},{r.err_ap1!r},{r.err_ap2!r},"
                         f"{r.err_ap3_block!r},{r.err_ap4_block!r}\n")
            for key, val in self.orders.items():
                fh.write(f"# fitted_order,{key},{val!r}\n")


def cascade_errors(u0: Field, n: int, times: list[float], idx: BesovIndex,
                   F: RHSHook | None = None, j_max: int | None = None,
                   flow_steps: int = 16, rk_steps: int | None = None) -> CascadeTable:
    """Measure the four cascade errors at each time and fit their orders.

    ``F`` defaults to the identity forcing so that the ap1 - ap2 distance is
    non-degenerate; pass ``zero_hook()`` for the pure Burgers chain (its
    ap1 row is then identically zero and excluded from the order fits).
    """
    from .experiments import fit_order

    g = u0.grid
    if F is None:
        F = identity_hook()
    if j_max is None:
        j_max = min(max(n + 1, 4), max_resolved_shell(g))
    lower = BesovIndex(idx.s - 1.0, idx.p)
    block_u0 = dyadic_block(u0, n)
    f_of_u0 = F.evaluate(u0) if F.name != "zero" else None
    rows = []
    for t in times:
        if F.name == "zero":
            u_true = solve_burgers(u0, t, None)
        else:
            u_true = solve_burgers(u0, t, F, steps=rk_steps)
        ap2 = solve_frozen_transport(u0, u0, None, t, steps=flow_steps)
        ap1 = ap2 if f_of_u0 is None else solve_frozen_transport(
            u0, u0, f_of_u0, t, steps=flow_steps)
        ap3 = solve_frozen_transport(u0, block_u0, None, t, steps=flow_steps)
        ap4 = ap4_closed_form(u0, n, t)
        w = 2.0 ** (n * idx.s)
        rows.append(CascadeRow(
            t=t,
            err_ap1=besov_norm(u_true - ap1, lower, j_max),
            err_ap2=besov_norm(ap1 - ap2, idx, j_max),
            err_ap3_block=w * lp_norm(dyadic_block(ap2, n) - ap3, idx.p),
            err_ap4_block=w * lp_norm(ap4 - ap3, idx.p),
        ))
    table = CascadeTable(n=n, idx=idx, rows=rows)
    ts = [r.t for r in rows]
    for key in ("err_ap1", "err_ap2", "err_ap3_block", "err_ap4_block"):
        errs = table.column(key)
        if all(e > 0.0 for e in errs) and len(errs) >= 3:
            table.orders[key] = fit_order(ts, errs)
    return table


def verify_cosine_lower_bound(u0, n: int, p: float,
                              lattice_points: int = 1 << 19) -> float:
    """L^p norm over [0, 2*pi] of cos(lambda_n (x - t_n u0(x))).

    ``u0`` may be a Field (evaluated by band-limited interpolation) or a
    plain callable.  The caller asserts the returned value against the 1/4
    floor; the undeformed case gives the exact cosine norm.
    """
    seq = time_sequence(n)
    if isinstance(u0, Field):
        ev = _interp(u0)
    else:
        ev = u0
    x = 2.0 * np.pi * (np.arange(lattice_points) + 0.5) / lattice_points
    vals = np.cos(seq.lambda_n * (x - seq.t_n * ev(x)))
    return lattice_lp_norm(vals, 2.0 * np.pi / lattice_points, p)


def cosine_lower_bound_2d(component1, n: int, p: float, window_exponent: int,
                          lattice: tuple[int, int] = (1 << 12, 1 << 6)) -> float:
    """L^p norm of cos(lambda_n (x1 - t_n f(x))) over the square
    [0, 2*pi*2^-N]^2 with N = window_exponent.

    ``component1`` maps coordinate arrays (y0, y1) to the deforming field.
    """
    seq = time_sequence(n)
    width = 2.0 * np.pi * 2.0 ** (-window_exponent)
    a0 = width * (np.arange(lattice[0]) + 0.5) / lattice[0]
    a1 = width * (np.arange(lattice[1]) + 0.5) / lattice[1]
    y0, y1 = np.meshgrid(a0, a1, indexing="ij")
    f = component1(y0, y1)
    vals = np.cos(seq.lambda_n * (y0 - seq.t_n * f))
    cell = (width / lattice[0]) * (width / lattice[1])
    return lattice_lp_norm(vals, cell, p)
