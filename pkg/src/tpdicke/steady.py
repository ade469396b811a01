"""Steady-state branches of the mean-field equations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dynamics import NORMAL_STATE, STATE_FIELDS, MeanFieldState, jacobian, rhs
from .model import DickeError, ModelParams, beta, gamma_prime, threshold_coupling

PHYSICAL_TOL = 1e-9


class ConvergenceError(DickeError):
    pass


class BranchLabel(str, Enum):
    NORMAL = "Normal"
    PLUS = "SuperradiantPlus"
    MINUS = "SuperradiantMinus"


@dataclass(frozen=True)
class SteadyStateBranch:
    label: BranchLabel | None  # None marks the diagnostic lower jz root
    state: MeanFieldState
    physical: bool
    defects: tuple[str, ...] = ()

    def residual(self, params: ModelParams) -> float:
        return float(np.max(np.abs(rhs(self.state, params))))

    def to_record(self, params: ModelParams) -> dict:
        rec = {"label": self.label.value if self.label else "lower-root"}
        rec.update(zip(STATE_FIELDS, self.state))
        rec["physical"] = self.physical
        rec["residual"] = self.residual(params)
        return rec


@dataclass(frozen=True)
class SuperradiantSolution:
    """Zero or two superradiant branches, with the reason when there are none."""

    branches: tuple[SteadyStateBranch, ...] = ()
    reason: str | None = None
    lower_root: tuple[SteadyStateBranch, ...] = field(default=(), compare=False)

    def __len__(self):
        return len(self.branches)

    def __iter__(self):
        return iter(self.branches)

    def __getitem__(self, i):
        return self.branches[i]

    @property
    def plus(self) -> SteadyStateBranch | None:
        return self.branches[0] if self.branches else None

    @property
    def physical(self) -> bool:
        return bool(self.branches) and self.branches[0].physical


def is_physical(state, tol: float = PHYSICAL_TOL) -> tuple[bool, tuple[str, ...]]:
    x, v, n, jx, jy, jz = (float(s) for s in state)
    defects = []
    if not all(math.isfinite(s) for s in (x, v, n, jx, jy, jz)):
        return False, ("non-finite entry",)
    if n < -tol:
        defects.append("negative photon number")
    if max(abs(jx), abs(jy), abs(jz)) > 1 + tol:
        defects.append("Bloch component out of range")
    return not defects, tuple(defects)


def normal_branch(params: ModelParams) -> SteadyStateBranch:
    return SteadyStateBranch(BranchLabel.NORMAL, NORMAL_STATE, True)


def _branch_pair(params: ModelParams, jz: float, labelled: bool) -> tuple[SteadyStateBranch, ...] | str:
    wc, w0, k = params.omega_c, params.omega_0, params.kappa
    g, nq, sn = params.g, params.n_qubits, params.sqrt_n
    gp = gamma_prime(params)
    boson = k**2 + 4 * wc**2
    jx2 = boson / (16 * g**2 * nq) + 2 * w0 * wc * jz / (nq * (4 * w0**2 + gp**2))
    if jx2 < 0:
        return "complex-valued"
    jx = math.sqrt(jx2)
    denom = -boson + 16 * g**2 * nq * jx2
    if denom == 0:
        return "singular"
    x = 8 * g * wc * sn * jx / denom
    v = k * x / (2 * wc)
    n = -g * sn * jx * x / wc
    jy = -gp * jx / (2 * w0)
    plus = MeanFieldState(x, v, n, jx, jy, jz)
    out = []
    for label, state in ((BranchLabel.PLUS, plus), (BranchLabel.MINUS, plus.flipped())):
        ok, defects = is_physical(state)
        out.append(SteadyStateBranch(label if labelled else None, state, ok, defects))
    return tuple(out)


def superradiant_branches(params: ModelParams, lower_root: bool = False) -> SuperradiantSolution:
    """Closed-form symmetry-broken fixed points.

    ``jz`` solves ``jz^2 + (1 + beta) jz + beta g_t^2 / g^2 = 0``; the upper
    root gives the Plus/Minus pair. With ``lower_root`` the other root is also
    evaluated and attached unlabelled for diagnostics.
    """
    params.check(steady_state=True)
    if params.g == 0:
        return SuperradiantSolution(reason="zero coupling")
    b = beta(params)
    gt = threshold_coupling(params)
    half = (1 + b) / 2
    disc = half**2 - b * gt**2 / params.g**2
    if disc < 0:
        return SuperradiantSolution(reason="complex-valued")
    root = math.sqrt(disc)
    pair = _branch_pair(params, -half + root, labelled=True)
    extra: tuple = ()
    if lower_root:
        low = _branch_pair(params, -half - root, labelled=False)
        extra = low if isinstance(low, tuple) else ()
    if isinstance(pair, str):
        return SuperradiantSolution(reason=pair, lower_root=extra)
    return SuperradiantSolution(branches=pair, lower_root=extra)


def refine_fixed_point(guess, params: ModelParams, tol: float = 1e-12, max_iter: int = 100) -> MeanFieldState:
    """Damped Newton iteration on ``rhs = 0``."""
    y = np.asarray(guess, dtype=float).copy()
    with np.errstate(invalid="ignore", over="ignore"):
        f = rhs(y, params)
    if not np.all(np.isfinite(f)):
        raise ConvergenceError("rhs not finite at the initial guess")
    norm = float(np.max(np.abs(f)))
    for _ in range(max_iter):
        if norm < tol:
            return MeanFieldState.from_array(y)
        jac = jacobian(y, params)
        try:
            if np.linalg.cond(jac) > 1e14:
                raise np.linalg.LinAlgError
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            raise ConvergenceError(f"singular Jacobian at iterate {y}") from None
        lam = 1.0
        while lam > 1e-10:
            trial = y + lam * step
            f_trial = rhs(trial, params)
            n_trial = float(np.max(np.abs(f_trial)))
            if np.isfinite(n_trial) and n_trial < norm:
                break
            lam *= 0.5
        else:
            raise ConvergenceError(f"line search failed at residual {norm:.3e}")
        y, f, norm = trial, f_trial, n_trial
    if norm < tol:
        return MeanFieldState.from_array(y)
    raise ConvergenceError(f"no convergence after {max_iter} iterations (residual {norm:.3e})")
