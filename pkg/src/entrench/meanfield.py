"""Mean-field ODE for L = 2 and its two planar sub-models.

State vectors are ordered ``(L2, L1, R1, R2)``: frequencies of attitudes
-2, -1, +1, +2. The planar sub-models use ``(x, y)`` = (inner, outer)
frequencies, either per side under left/right symmetry (centering) or for
the surviving side once the other is extinct (consensus).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

SIMPLEX_TOL = 1e-9


class IntegrationError(RuntimeError):
    def __init__(self, t: float, message: str):
        super().__init__(f"integration failed at t={t:.6g}: {message}")
        self.t = t


def as_state(state: Sequence[float], tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate an ``(L2, L1, R1, R2)`` frequency vector."""
    s = np.asarray(state, dtype=float)
    if s.shape != (4,):
        raise ValueError(f"state must have 4 components, got shape {s.shape}")
    if np.any(s < -tol) or abs(s.sum() - 1.0) > tol:
        raise ValueError(f"state {s.tolist()} is not on the probability simplex")
    return s


def mirror(state: Sequence[float]) -> np.ndarray:
    """Swap left and right: ``(L2, L1, R1, R2) -> (R2, R1, L1, L2)``."""
    return np.asarray(state, dtype=float)[::-1].copy()


def ode_rhs(state: Sequence[float], p_a: float) -> np.ndarray:
    L2, L1, R1, R2 = state
    return np.array([
        L1 * (L2 + p_a * L1) - L2 * (1 - L2 - p_a * L1),
        L2 * (1 - L2 - p_a * L1) + R1 * (L2 + L1) - L1 * (1 - (1 - p_a) * L1),
        L1 * (R1 + R2) + R2 * (1 - R2 - p_a * R1) - R1 * (1 - (1 - p_a) * R1),
        R1 * (R2 + p_a * R1) - R2 * (1 - R2 - p_a * R1),
    ])


def _conservative_rhs(t: float, state: np.ndarray, p_a: float) -> np.ndarray:
    # ode_rhs with the constant 1 replaced by the total mass S. Identical on the
    # simplex, but d(S)/dt = 0 exactly, whereas ode_rhs gives d(S)/dt = (L1+R1)(S-1)
    # and amplifies round-off off the simplex exponentially.
    L2, L1, R1, R2 = state
    S = L2 + L1 + R1 + R2
    return np.array([
        L1 * (L2 + p_a * L1) - L2 * (S - L2 - p_a * L1),
        L2 * (S - L2 - p_a * L1) + R1 * (L2 + L1) - L1 * (S - (1 - p_a) * L1),
        L1 * (R1 + R2) + R2 * (S - R2 - p_a * R1) - R1 * (S - (1 - p_a) * R1),
        R1 * (R2 + p_a * R1) - R2 * (S - R2 - p_a * R1),
    ])


def opinion_margin(state: Sequence[float]) -> float:
    """Mass of the smaller opinion, ``min(L1 + L2, R1 + R2)``."""
    return min(state[0] + state[1], state[2] + state[3])


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray  # shape (4, len(t))
    p_a: float
    event_times: list[float] = field(default_factory=list)
    sol: Callable | None = field(default=None, repr=False)

    def at(self, t: float | np.ndarray) -> np.ndarray:
        if self.sol is None:
            raise ValueError("trajectory was integrated without dense output")
        return self.sol(t)

    def peak_inner(self, samples: int = 20001) -> float:
        """Largest inner-opinion frequency ``max(L1, R1)`` over the trajectory."""
        grid = np.linspace(self.t[0], self.t[-1], samples)
        ys = self.at(grid) if self.sol is not None else self.y
        return float(max(ys[1].max(), ys[2].max(), self.y[1].max(), self.y[2].max()))

    def write_csv(self, path: str | os.PathLike, times: np.ndarray | None = None) -> None:
        ts = self.t if times is None else np.asarray(times)
        ys = self.y if times is None else self.at(ts)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "L2", "L1", "R1", "R2"])
            for i, t in enumerate(ts):
                w.writerow([repr(float(t))] + [repr(float(v)) for v in ys[:, i]])


def integrate(state0: Sequence[float], p_a: float, t_end: float, rtol: float = 1e-8,
              atol: float = 1e-10, events=None, max_step: float = np.inf) -> Trajectory:
    """Integrate the mean-field system with an adaptive Dormand-Prince 4(5) pair."""
    y0 = as_state(state0)
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    if t_end == 0:
        return Trajectory(np.array([0.0]), y0[:, None], p_a, sol=lambda t: np.multiply.outer(
            y0, np.ones_like(np.asarray(t, dtype=float))))
    res = solve_ivp(_conservative_rhs, (0.0, t_end), y0, method="RK45", args=(p_a,),
                    rtol=rtol, atol=atol, dense_output=True, events=events, max_step=max_step)
    if res.status < 0:
        raise IntegrationError(float(res.t[-1]), res.message)
    ev = [float(t) for t in res.t_events[0]] if events is not None else []
    return Trajectory(res.t, res.y, p_a, ev, res.sol)


@dataclass(frozen=True)
class OdeConsensus:
    time: float  # t_end when censored
    censored: bool
    winner: str | None  # "left", "right" or None when censored


def consensus_time_ode(state0: Sequence[float], p_a: float, eps: float = 1e-4,
                       t_end: float = 1e6, rtol: float = 1e-8,
                       atol: float = 1e-10) -> tuple[OdeConsensus, Trajectory]:
    """First time the smaller opinion's mass drops to ``eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    y0 = as_state(state0)

    def winner(s):
        return "right" if s[2] + s[3] > s[0] + s[1] else "left"

    if opinion_margin(y0) <= eps:
        return OdeConsensus(0.0, False, winner(y0)), integrate(y0, p_a, 0.0)

    def crossing(t, s, p_a):
        return opinion_margin(s) - eps

    crossing.terminal = True
    crossing.direction = -1
    traj = integrate(y0, p_a, t_end, rtol=rtol, atol=atol, events=crossing)
    if traj.event_times:
        t = traj.event_times[0]
        return OdeConsensus(t, False, winner(traj.y[:, -1])), traj
    return OdeConsensus(float(t_end), True, None), traj


# --------------------------------------------------------------------------
# planar sub-models


def centering_rhs(state: Sequence[float], p_a: float) -> np.ndarray:
    """Symmetric reduction ``L1 = R1 = x``, ``L2 = R2 = y``."""
    x, y = state
    return np.array([
        -y * y - ((p_a - 1) * x - 1) * y + ((2 - p_a) * x - 1) * x,
        y * y + ((p_a + 1) * x - 1) * y + p_a * x * x,
    ])


def centering_jacobian(state: Sequence[float], p_a: float) -> np.ndarray:
    x, y = state
    return np.array([
        [-(p_a - 1) * y + 2 * (2 - p_a) * x - 1, -2 * y - (p_a - 1) * x + 1],
        [(p_a + 1) * y + 2 * p_a * x, 2 * y + (p_a + 1) * x - 1],
    ])


def consensus_rhs(state: Sequence[float], p_a: float) -> np.ndarray:
    """One-sided reduction with the other opinion extinct (inner ``x``, outer ``y``)."""
    x, y = state
    return np.array([
        y * (1 - y - p_a * x) - x * (1 - (1 - p_a) * x),
        x * (y + p_a * x) - y * (1 - y - p_a * x),
    ])


def consensus_jacobian(state: Sequence[float], p_a: float) -> np.ndarray:
    x, y = state
    return np.array([
        [-p_a * y - 1 + 2 * (1 - p_a) * x, 1 - 2 * y - p_a * x],
        [y + 2 * p_a * x + p_a * y, x - 1 + 2 * y + p_a * x],
    ])


def lyapunov_drift(x: float, y: float) -> float:
    """Rate of change of ``1/2 - x - y`` along the ``p_a = 0`` centering flow."""
    return -2 * x * y - 2 * x * x + x


def family_residuals(p_a: float, alpha: float) -> dict[str, float]:
    """Max-norm of ``ode_rhs`` at the three listed steady-state families."""
    fam = {
        "i": (0.0, alpha, 1 - alpha, 0.0),
        "ii": (0.0, 0.0, 1 - alpha, alpha),
        "iii": (alpha, 1 - alpha, 0.0, 0.0),
    }
    return {k: float(np.abs(ode_rhs(s, p_a)).max()) for k, s in fam.items()}


MODELS = {
    "centering": (centering_rhs, centering_jacobian),
    "consensus": (consensus_rhs, consensus_jacobian),
}


@dataclass(frozen=True)
class SteadyState:
    point: tuple[float, float]
    eigenvalues: tuple[complex, complex]
    kind: str
    residual: float


@dataclass
class SteadyStateReport:
    model: str
    p_a: float
    states: list[SteadyState]
    failures: list[tuple[tuple[float, float], str]]

    def nearest(self, point: Sequence[float]) -> SteadyState:
        return min(self.states, key=lambda s: math.dist(s.point, point))

    def rows(self) -> list[list]:
        out = []
        for s in self.states:
            e1, e2 = s.eigenvalues
            out.append([self.model, self.p_a, s.point[0], s.point[1],
                        _fmt_eig(e1), _fmt_eig(e2), s.kind])
        return out


def _fmt_eig(e: complex) -> str:
    if e.imag == 0:
        return repr(float(e.real))
    sign = "+" if e.imag >= 0 else "-"
    return f"{float(e.real)!r}{sign}{abs(float(e.imag))!r}j"


def classify_eigenvalues(eigs: Sequence[complex], tol: float = 1e-7) -> str:
    # tol reflects that degenerate roots are only located to ~sqrt(machine eps)
    a, b = eigs
    if abs(a.imag) > tol:
        if abs(a.real) <= tol:
            return "center"
        return "stable focus" if a.real < 0 else "unstable focus"
    ra, rb = sorted((a.real, b.real))
    if abs(ra) <= tol or abs(rb) <= tol:
        return "non-hyperbolic"
    if ra < 0 < rb:
        return "saddle"
    return "stable node" if rb < 0 else "unstable node"


def _newton(f, jac, z0, p_a, max_iter=200, damping=0.5):
    # Runs until no further descent, so degenerate (singular-Jacobian) roots,
    # where convergence is only linear, are still resolved to round-off.
    z = np.asarray(z0, dtype=float)
    fz = f(z, p_a)
    nf = np.linalg.norm(fz)
    for _ in range(max_iter):
        if nf == 0.0:
            break
        try:
            dz = np.linalg.solve(jac(z, p_a), -fz)
        except np.linalg.LinAlgError:
            return z, nf, "singular Jacobian"
        if not np.all(np.isfinite(dz)):
            return z, nf, "singular Jacobian"
        lam = 1.0
        while True:
            zn = z + lam * dz
            fn = f(zn, p_a)
            nn = np.linalg.norm(fn)
            if nn < nf or lam < 1e-8:
                break
            lam *= damping
        if nn >= nf:
            break
        z, fz, nf = zn, fn, nn
        if np.abs(z).max() > 1e6:
            return z, nf, "diverged"
        if np.linalg.norm(lam * dz) <= 1e-16 * (1.0 + np.linalg.norm(z)):
            break
    return z, nf, None if nf <= 1e-12 else "no convergence"


def find_steady_states(model: str | tuple[Callable, Callable], p_a: float,
                       box: tuple[float, float] = (-0.1, 1.1), seeds: int = 21,
                       tol: float = 1e-6, residual_tol: float = 1e-12) -> SteadyStateReport:
    """Roots of a planar vector field by damped Newton from a grid of seeds.

    Roots within ``tol`` of each other are merged and each is classified from
    its Jacobian eigenvalues. Roots outside ``box`` are discarded.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(model, str):
        name = model
        f, jac = MODELS[model]
    else:
        name = "custom"
        f, jac = model
    lo, hi = box
    grid = np.linspace(lo, hi, seeds)
    found: list[np.ndarray] = []
    failures = []
    for sx in grid:
        for sy in grid:
            z, res, err = _newton(f, jac, (sx, sy), p_a)
            if err is not None:
                failures.append(((float(sx), float(sy)), err))
                continue
            if res > residual_tol or np.any(z < lo - tol) or np.any(z > hi + tol):
                continue
            if not any(np.linalg.norm(z - q) <= tol for q in found):
                found.append(z)
    states = []
    for z in sorted(found, key=lambda q: (round(q[0], 9), round(q[1], 9))):
        eigs = np.linalg.eigvals(jac(z, p_a)).astype(complex)
        eigs = tuple(sorted(eigs, key=lambda e: (e.real, e.imag)))
        states.append(SteadyState((float(z[0]), float(z[1])), eigs,
                                  classify_eigenvalues(eigs),
                                  float(np.abs(f(z, p_a)).max())))
    return SteadyStateReport(name, p_a, states, failures)


def write_steady_states(path: str | os.PathLike, reports: Sequence[SteadyStateReport]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model", "p_a", "x", "y", "eig1", "eig2", "class"])
        for r in reports:
            w.writerows(r.rows())


def physical_roots(report: SteadyStateReport, total: float = 1.0,
                   tol: float = 1e-6) -> list[SteadyState]:
    """Roots with ``x, y >= 0`` and ``x + y <= total``."""
    return [st for st in report.states
            if st.point[0] >= -tol and st.point[1] >= -tol and sum(st.point) <= total + tol]


def consensus_root_trend(p_values: Sequence[float]) -> list[tuple[float, float, float]]:
    """``(p_a, x, y)`` of the physical consensus-model root closest to ``x + y = 1``.

    For ``p_a > 0`` the vector field sums to ``x (x + y - 1)`` and moves along
    ``x + y = 1`` at rate ``p_a x``, so the roots are ``(0, 0)`` and ``(0, 1)``
    only; the scan reports that numerically rather than assuming it.
    """
    out = []
    for p in p_values:
        roots = physical_roots(find_steady_states("consensus", p))
        x, y = max((st.point for st in roots), key=lambda q: (round(q[0] + q[1], 6), q[0]),
                   default=(math.nan, math.nan))
        out.append((float(p), x, y))
    return out


# --------------------------------------------------------------------------
# stable-manifold diagnostics


def integrate_planar(rhs: Callable, state0: Sequence[float], p_a: float, t_end: float,
                     rtol: float = 1e-10, atol: float = 1e-12, events=None):
    res = solve_ivp(lambda t, z: rhs(z, p_a), (0.0, t_end), np.asarray(state0, float),
                    method="RK45", rtol=rtol, atol=atol, dense_output=True, events=events)
    if res.status < 0:
        raise IntegrationError(float(res.t[-1]), res.message)
    return res


@dataclass(frozen=True)
class ProbeResult:
    offset: float
    start: tuple[float, float]
    dwell: float
    final: tuple[float, float]
    escaped: bool


def _line_coordinates_rhs(t, z, p_a):
    # (s, y) with s = x + y - 1/2; ds/dt = 2 x s for every p_a, so s = 0 is kept exactly
    s_, y = z
    x = 0.5 + s_ - y
    return np.array([2.0 * x * s_, centering_rhs((x, y), p_a)[1]])


def stable_manifold_probe(p_a: float, offsets: Sequence[float], base: float = 0.25,
                          radius: float = 0.05, t_end: float = 400.0,
                          samples: int = 40001) -> list[ProbeResult]:
    """Dwell time near the coexistence saddle for starts off the line ``x + y = 1/2``.

    Each start is ``(base, 1/2 - base)`` shifted along the line's normal so
    its signed distance from the line equals the offset. Dwell time is the
    total time spent within ``radius`` of the coexistence steady state.
    Integration runs in ``(x + y - 1/2, y)`` coordinates, in which the line
    is exactly invariant, and stops once a trajectory leaves the unit box.
    """
    rep = find_steady_states("centering", p_a)
    saddle = np.array(rep.nearest((0.5, 0.0)).point)

    def leave(t, z, p_a):
        x = 0.5 + z[0] - z[1]
        return 1.5 - max(abs(x), abs(z[1]), abs(x + z[1]))

    leave.terminal = True
    results = []
    for d in offsets:
        shift = d / math.sqrt(2.0)
        z0 = (base + shift, 0.5 - base + shift)
        res = solve_ivp(_line_coordinates_rhs, (0.0, t_end), [d * math.sqrt(2.0), z0[1]],
                        method="RK45", args=(p_a,), rtol=1e-10, atol=1e-12,
                        dense_output=True, events=leave)
        if res.status < 0:
            raise IntegrationError(float(res.t[-1]), res.message)
        ts = np.linspace(0.0, res.t[-1], samples)
        sy = res.sol(ts)
        xs = 0.5 + sy[0] - sy[1]
        inside = np.hypot(xs - saddle[0], sy[1] - saddle[1]) <= radius
        dwell = float(inside.sum() * (ts[1] - ts[0]))
        xf = 0.5 + res.y[0, -1] - res.y[1, -1]
        results.append(ProbeResult(float(d), (float(z0[0]), float(z0[1])), dwell,
                                   (float(xf), float(res.y[1, -1])), bool(len(res.t_events[0]))))
    return results
