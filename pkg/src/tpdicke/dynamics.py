"""Mean-field equations of motion in real variables and their time integration.

The state vector is ``(x, v, n, jx, jy, jz)`` where ``x = <a^2 + a^+2>``,
``<a^2 - a^+2> = i v``, ``n = <a^+ a>`` and ``j_u = (1/N) sum_j <sigma_u^j>``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.integrate import RK45

from .model import DickeError, ModelParams, gamma_prime

STATE_FIELDS = ("x", "v", "n", "jx", "jy", "jz")
DIVERGENCE_BOUND = 1e6


class IntegrationError(DickeError):
    def __init__(self, message: str, t: float, state: np.ndarray):
        super().__init__(f"{message} (t={t:.6g}, state={np.array2string(state, precision=6)})")
        self.t = t
        self.state = state


class MeanFieldState(NamedTuple):
    x: float
    v: float
    n: float
    jx: float
    jy: float
    jz: float

    @classmethod
    def from_array(cls, arr) -> "MeanFieldState":
        return cls(*(float(a) for a in np.asarray(arr, dtype=float).ravel()))

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)

    def flipped(self) -> "MeanFieldState":
        """Image under the residual Z2 symmetry (x, v, jx, jy) -> -(x, v, jx, jy)."""
        return MeanFieldState(-self.x, -self.v, self.n, -self.jx, -self.jy, self.jz)


NORMAL_STATE = MeanFieldState(0.0, 0.0, 0.0, 0.0, 0.0, -1.0)


def rhs(state, params: ModelParams) -> np.ndarray:
    x, v, n, jx, jy, jz = state
    wc, w0, k, gd = params.omega_c, params.omega_0, params.kappa, params.gamma_down
    gp = gamma_prime(params)
    a = params.g * params.sqrt_n
    b = 2.0 * params.g / params.sqrt_n
    return np.array([
        -k * x + 2 * wc * v,
        -k * v - 2 * wc * x - 4 * a * jx * (1 + 2 * n),
        -2 * a * jx * v - k * n,
        -2 * w0 * jy - gp * jx,
        2 * w0 * jx - gp * jy - b * jz * x,
        b * jy * x - gd * jz - gd,
    ])


def jacobian(state, params: ModelParams) -> np.ndarray:
    """Analytic derivative of :func:`rhs` with respect to the state."""
    x, v, n, jx, jy, jz = state
    wc, w0, k, gd = params.omega_c, params.omega_0, params.kappa, params.gamma_down
    gp = gamma_prime(params)
    a = params.g * params.sqrt_n
    b = 2.0 * params.g / params.sqrt_n
    return np.array([
        [-k, 2 * wc, 0.0, 0.0, 0.0, 0.0],
        [-2 * wc, -k, -8 * a * jx, -4 * a * (1 + 2 * n), 0.0, 0.0],
        [0.0, -2 * a * jx, -k, -2 * a * v, 0.0, 0.0],
        [0.0, 0.0, 0.0, -gp, -2 * w0, 0.0],
        [-b * jz, 0.0, 0.0, 2 * w0, -gp, -b * x],
        [b * jy, 0.0, 0.0, 0.0, b * x, -gd],
    ])


class Outcome(str, Enum):
    CONVERGED = "converged"
    MAX_TIME = "max-time-reached"
    DIVERGED = "diverged"


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    outcome: Outcome
    escape_time: float | None = None
    residual: float = field(default=math.nan)

    @property
    def final(self) -> MeanFieldState:
        return MeanFieldState.from_array(self.states[-1])

    def write_csv(self, path: str | Path) -> None:
        write_trajectory_csv(self, path)


def integrate(
    state0,
    params: ModelParams,
    t_max: float,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-10,
    max_steps: int = 2_000_000,
) -> Trajectory:
    """Integrate the mean-field flow with an embedded Runge-Kutta 4(5) pair.

    A step counts as settled when ``max|rhs| < 10 * abs_tol``, or when the
    Newton distance ``max|J^-1 rhs|`` to the nearby fixed point is below
    ``10 * (abs_tol + rel_tol * max|y|)``. The second rule is needed for
    large-amplitude states, where an explicit method leaves ``rhs`` at a noise
    floor set by the fast modes. Integration stops once both ends of an
    accepted step are settled, or when any component leaves ``[-1e6, 1e6]``.
    """
    if not (0 < rel_tol < 1 and 0 < abs_tol < 1):
        raise ValueError("tolerances must lie in (0, 1)")
    if not t_max > 0:
        raise ValueError("t_max must be > 0")
    params.check()
    y0 = np.asarray(state0, dtype=float).copy()
    if y0.shape != (6,) or not np.all(np.isfinite(y0)):
        raise ValueError("initial state must be six finite numbers")

    def settled(y: np.ndarray) -> tuple[bool, float]:
        f = rhs(y, params)
        res = float(np.max(np.abs(f)))
        if res < 10.0 * abs_tol:
            return True, res
        if res > 1e-3 * (1.0 + np.max(np.abs(y))):
            return False, res
        try:
            dist = np.max(np.abs(np.linalg.solve(jacobian(y, params), f)))
        except np.linalg.LinAlgError:
            return False, res
        return bool(dist < 10.0 * (abs_tol + rel_tol * np.max(np.abs(y)))), res

    solver = RK45(lambda t, y: rhs(y, params), 0.0, y0, t_max, rtol=rel_tol, atol=abs_tol)
    times = [0.0]
    states = [y0]
    prev_ok, res = settled(y0)
    outcome = Outcome.MAX_TIME
    escape = None
    for _ in range(max_steps):
        if solver.status != "running":
            break
        message = solver.step()
        if solver.status == "failed":
            raise IntegrationError(f"step size underflow: {message}", times[-1], states[-1])
        y = solver.y.copy()
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > DIVERGENCE_BOUND:
            outcome, escape = Outcome.DIVERGED, solver.t
            if np.all(np.isfinite(y)):
                times.append(solver.t)
                states.append(y)
            break
        times.append(solver.t)
        states.append(y)
        ok, res = settled(y)
        if ok and prev_ok:
            outcome = Outcome.CONVERGED
            break
        prev_ok = ok
    else:
        raise IntegrationError("step budget exhausted", times[-1], states[-1])
    return Trajectory(np.array(times), np.array(states), outcome, escape, res)


def settle(state0, params: ModelParams, t_max: float, tol: float = 1e-10) -> tuple[MeanFieldState, Outcome]:
    traj = integrate(state0, params, t_max, rel_tol=min(1e-8, 100 * tol), abs_tol=tol)
    return traj.final, traj.outcome


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("t",) + STATE_FIELDS)
            for t, row in zip(traj.times, traj.states):
                writer.writerow([f"{t:.17g}"] + [f"{val:.17g}" for val in row])
    except OSError as exc:
        raise DickeError(f"cannot write {path}: {exc}") from exc
