"""Linear stability of the mean-field fixed points and the N/S/B/I phase classifier."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import NORMAL_STATE, jacobian
from .model import DickeError, ModelParams
from .steady import SteadyStateBranch, SuperradiantSolution, superradiant_branches

DEFAULT_MARGIN = 1e-9
# Y = i v: real variables r relate to (X, Y, n, Jx, Jy, Jz) through diag(1, i, 1, 1, 1, 1).
_TO_COMPLEX = np.diag([1, 1j, 1, 1, 1, 1])


class EigenSolverError(DickeError):
    pass


class PhaseLabel(str, Enum):
    N = "N"
    S = "S"
    B = "B"
    I = "I"  # noqa: E741


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    spectral_abscissa: float
    stable: bool
    margin: float = DEFAULT_MARGIN
    marginal: bool = False

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, margin: float = DEFAULT_MARGIN) -> "StabilityReport":
        eig = eigenvalues(matrix)
        absc = float(np.max(eig.real))
        return cls(eig, absc, absc < -margin, margin, abs(absc) <= margin)

    @property
    def leading(self) -> complex:
        return complex(self.eigenvalues[np.argmax(self.eigenvalues.real)])

    def to_record(self) -> dict:
        return {
            "eigenvalues": [(float(z.real), float(z.imag)) for z in self.eigenvalues],
            "spectral_abscissa": self.spectral_abscissa,
            "stable": self.stable,
            "margin": self.margin,
            "marginal": self.marginal,
        }


def eigenvalues(matrix) -> np.ndarray:
    """Full spectrum of a small dense real matrix, sorted by (real, imag).

    LAPACK's Hessenberg/shifted-QR path does the work; every eigenpair is
    checked for backward error ``|Mq - lq| <= 1e-10 |M|``.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("square matrix required")
    if not np.all(np.isfinite(m)):
        raise EigenSolverError("matrix has non-finite entries")
    try:
        vals, vecs = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue iteration did not converge: {exc}") from exc
    scale = max(np.linalg.norm(m, 2), np.finfo(float).tiny)
    back = np.linalg.norm(m @ vecs - vecs * vals, axis=0)
    if np.any(back > 1e-10 * scale):
        raise EigenSolverError(f"backward error {back.max():.3e} exceeds tolerance")
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


def jacobian_normal(params: ModelParams) -> np.ndarray:
    params.check()
    return jacobian(NORMAL_STATE, params)


def jacobian_superradiant(params: ModelParams, branch: SteadyStateBranch) -> np.ndarray:
    if not branch.physical:
        raise DickeError("superradiant Jacobian requested for a non-physical branch: " + ", ".join(branch.defects))
    return jacobian(branch.state, params)


def complex_jacobian(params: ModelParams, state) -> np.ndarray:
    """Jacobian in the complex variables (X, Y, n, Jx, Jy, Jz), with Y = i v."""
    x, v, n, jx, jy, jz = state
    y = 1j * v
    gp = 2 * params.gamma_phi + 0.5 * params.gamma_down
    wc, w0, k, gd = params.omega_c, params.omega_0, params.kappa, params.gamma_down
    a = params.g * params.sqrt_n
    b = 2 * params.g / params.sqrt_n
    return np.array([
        [-k, -2j * wc, 0, 0, 0, 0],
        [-2j * wc, -k, -8j * a * jx, -4j * a * (1 + 2 * n), 0, 0],
        [0, 2j * a * jx, -k, 2j * a * y, 0, 0],
        [0, 0, 0, -gp, -2 * w0, 0],
        [-b * jz, 0, 0, 2 * w0, -gp, -b * x],
        [b * jy, 0, 0, 0, b * x, -gd],
    ], dtype=complex)


def to_real_form(matrix: np.ndarray) -> np.ndarray:
    return np.linalg.solve(_TO_COMPLEX, matrix @ _TO_COMPLEX)


def normal_report(params: ModelParams, margin: float = DEFAULT_MARGIN) -> StabilityReport:
    return StabilityReport.from_matrix(jacobian_normal(params), margin)


@dataclass(frozen=True)
class Classification:
    label: PhaseLabel
    normal: StabilityReport
    superradiant: StabilityReport | None
    branches: SuperradiantSolution

    @property
    def n_ss(self) -> float:
        return self.branches.plus.state.n if self.branches.physical else float("nan")

    @property
    def normal_stable(self) -> bool:
        return self.normal.stable

    @property
    def super_stable(self) -> bool:
        return self.superradiant is not None and self.superradiant.stable


def classify(params: ModelParams, margin: float = DEFAULT_MARGIN, branch_sign: int = 1) -> Classification:
    """Phase label from the stability of the normal and superradiant fixed points.

    A missing or non-physical superradiant branch counts as not stable.
    ``branch_sign`` picks which member of the Z2 pair is analysed.
    """
    params.check(steady_state=True)
    normal = normal_report(params, margin)
    sol = superradiant_branches(params)
    sup = None
    if sol.physical:
        branch = sol.branches[0 if branch_sign > 0 else 1]
        sup = StabilityReport.from_matrix(jacobian_superradiant(params, branch), margin)
    ns, ss = normal.stable, sup is not None and sup.stable
    label = PhaseLabel.B if ns and ss else PhaseLabel.N if ns else PhaseLabel.S if ss else PhaseLabel.I
    return Classification(label, normal, sup, sol)
