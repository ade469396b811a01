"""Parameters, derived rates and config ingestion for the dissipative two-photon Dicke model.

All seven physical parameters live on :class:`ModelParams`. Frequencies are in
rad/time and rates in 1/time; ingestion from files or the command line rescales
everything so that ``omega_c == 1``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

PARAM_NAMES = ("omega_c", "omega_0", "g", "n_qubits", "kappa", "gamma_down", "gamma_phi")
FREQUENCY_NAMES = ("omega_c", "omega_0", "g", "kappa", "gamma_down", "gamma_phi")
# "gamma" addresses the locked pair gamma_down == gamma_phi.
SCAN_NAMES = PARAM_NAMES + ("gamma",)


class DickeError(Exception):
    """Base class for domain errors raised by this package."""


class ParameterError(DickeError, ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    omega_c: float
    omega_0: float
    g: float
    n_qubits: int
    kappa: float
    gamma_down: float
    gamma_phi: float

    def violations(self, steady_state: bool = False) -> list[str]:
        return validate_params(self, steady_state=steady_state)

    def check(self, steady_state: bool = False) -> "ModelParams":
        problems = validate_params(self, steady_state=steady_state)
        if problems:
            raise ParameterError("; ".join(problems))
        return self

    def replace(self, **changes) -> "ModelParams":
        if "gamma" in changes:
            gamma = changes.pop("gamma")
            changes.setdefault("gamma_down", gamma)
            changes.setdefault("gamma_phi", gamma)
        if "n_qubits" in changes:
            changes["n_qubits"] = int(changes["n_qubits"])
        return dataclasses.replace(self, **changes)

    def scaled(self, factor: float) -> "ModelParams":
        """Multiply every frequency and rate by ``factor``."""
        return self.replace(**{k: getattr(self, k) * factor for k in FREQUENCY_NAMES})

    def in_cavity_units(self) -> "ModelParams":
        if not self.omega_c > 0:
            raise ParameterError("omega_c must be > 0")
        return self.scaled(1.0 / self.omega_c)

    @property
    def sqrt_n(self) -> float:
        return math.sqrt(self.n_qubits)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class DerivedRates:
    gamma_prime: float
    beta: float
    g_t: float


@dataclass(frozen=True)
class QuadraturePotential:
    """Coefficients of x^2 and p^2 in the effective boson Hamiltonian at sigma_x = -1/2."""

    coeff_x: float
    coeff_p: float

    @property
    def inverted(self) -> bool:
        return self.coeff_x < 0


def validate_params(params: ModelParams, steady_state: bool = False) -> list[str]:
    """Return every violated invariant as a message; an empty list means ok."""
    problems = []
    for name in PARAM_NAMES:
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            problems.append(f"{name} must be a finite number")
    if problems:
        return problems
    if not params.omega_c > 0:
        problems.append("omega_c must be > 0")
    if not params.omega_0 > 0:
        problems.append("omega_0 must be > 0")
    if params.n_qubits != int(params.n_qubits) or params.n_qubits < 1:
        problems.append("n_qubits must be a positive integer")
    for name in ("g", "kappa", "gamma_down", "gamma_phi"):
        if getattr(params, name) < 0:
            problems.append(f"{name} must be >= 0")
    if steady_state:
        if not params.kappa > 0:
            problems.append("kappa must be > 0 for steady-state formulas")
        if not params.gamma_down > 0:
            problems.append("gamma_down must be > 0 for steady-state formulas")
    return problems


def gamma_prime(params: ModelParams) -> float:
    """Transverse spin damping 2*gamma_phi + gamma_down/2."""
    return 2.0 * params.gamma_phi + 0.5 * params.gamma_down


def threshold_coupling(params: ModelParams) -> float:
    """Coupling g_t at which the normal fixed point loses stability."""
    gp = gamma_prime(params)
    wc, w0 = params.omega_c, params.omega_0
    return math.sqrt((2 * wc + params.kappa**2 / (2 * wc)) * (2 * w0 + gp**2 / (2 * w0)) / 8.0)


def beta(params: ModelParams) -> float:
    if not params.gamma_down > 0:
        raise ParameterError("beta undefined: gamma_down must be > 0")
    return params.omega_c * gamma_prime(params) / (2 * params.omega_0 * params.n_qubits * params.gamma_down)


def derived_rates(params: ModelParams) -> DerivedRates:
    params.check()
    return DerivedRates(gamma_prime=gamma_prime(params), beta=beta(params), g_t=threshold_coupling(params))


def collapse_coupling(params: ModelParams) -> float:
    """Coupling where the x-quadrature stiffness vanishes, omega_c / sqrt(N)."""
    params.check()
    return params.omega_c / params.sqrt_n


def quadrature_potential(params: ModelParams, g: float | None = None) -> QuadraturePotential:
    g = params.g if g is None else g
    gn = g * params.sqrt_n
    return QuadraturePotential(coeff_x=(params.omega_c - gn) / 4.0, coeff_p=(params.omega_c + gn) / 4.0)


# -- ingestion -----------------------------------------------------------------------


def parse_config(text: str) -> dict[str, float]:
    """Parse ``key = value`` lines. Blank lines and ``#`` comments are ignored."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in PARAM_NAMES:
            raise ParameterError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = int(value) if key == "n_qubits" else float(value)
        except ValueError:
            raise ParameterError(f"line {lineno}: bad value for {key}: {value!r}") from None
    return values


def load_config(path: str | Path) -> dict[str, float]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def params_from_mapping(values: Mapping[str, float], rescale: bool = True) -> ModelParams:
    missing = [k for k in PARAM_NAMES if k not in values]
    if missing:
        raise ParameterError("missing parameter(s): " + ", ".join(missing))
    params = ModelParams(**{k: values[k] for k in PARAM_NAMES})
    params = dataclasses.replace(params, n_qubits=int(params.n_qubits))
    params.check()
    return params.in_cavity_units() if rescale else params


def missing_names(values: Mapping[str, object], optional: Iterable[str] = ()) -> list[str]:
    skip = set(optional)
    return [k for k in PARAM_NAMES if k not in skip and values.get(k) is None]
