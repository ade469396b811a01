"""Exact Lindblad dynamics on a truncated qubits-plus-boson space.

Small-N, dense-matrix reference used to check the moment equations behind the
mean-field flow, the Z4 symmetry of the generator and its trace preservation.
Basis ordering is qubit_1 x ... x qubit_N x Fock, qubit basis (up, down) with
sigma_z = diag(1, -1); the qubit ground state is "down".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp

from .model import DickeError, ModelParams, gamma_prime

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SMINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |down><up| = (sx - i sy) / 2

OBSERVABLES = ("X", "Y", "n", "Jx", "Jy", "Jz")


class OracleError(DickeError):
    pass


@dataclass(frozen=True)
class HilbertSpec:
    n_qubits: int
    fock_cutoff: int
    cap: int = 256
    superop_cap: int = 64

    def __post_init__(self):
        if not 1 <= self.n_qubits <= 3:
            raise OracleError("oracle supports 1 to 3 qubits")
        if self.fock_cutoff < 4:
            raise OracleError("fock_cutoff must be >= 4")
        if self.dimension > self.cap:
            raise OracleError(f"dimension {self.dimension} exceeds cap {self.cap}")

    @property
    def n_fock(self) -> int:
        return self.fock_cutoff + 1

    @property
    def dimension(self) -> int:
        return 2**self.n_qubits * self.n_fock

    @property
    def materializable(self) -> bool:
        return self.dimension <= self.superop_cap


class Operators:
    """Truncated boson and collective spin operators on the full space."""

    def __init__(self, spec: HilbertSpec):
        self.spec = spec
        nq, nf = spec.n_qubits, spec.n_fock
        q_id = np.eye(2**nq)
        a = np.diag(np.sqrt(np.arange(1, nf)), 1).astype(complex)
        self.a = np.kron(q_id, a)
        self.adag = self.a.conj().T
        self.n = self.adag @ self.a
        self.X = self.a @ self.a + self.adag @ self.adag
        self.Y = self.a @ self.a - self.adag @ self.adag
        self.sx = [self._site(SX, j) for j in range(nq)]
        self.sy = [self._site(SY, j) for j in range(nq)]
        self.sz = [self._site(SZ, j) for j in range(nq)]
        self.sminus = [self._site(SMINUS, j) for j in range(nq)]
        self.Jx = sum(self.sx) / nq
        self.Jy = sum(self.sy) / nq
        self.Jz = sum(self.sz) / nq
        self.identity = np.eye(spec.dimension, dtype=complex)

    def _site(self, op, j):
        nq = self.spec.n_qubits
        out = np.eye(1)
        for k in range(nq):
            out = np.kron(out, op if k == j else np.eye(2))
        return np.kron(out, np.eye(self.spec.n_fock)).astype(complex)

    def by_name(self, name: str) -> np.ndarray:
        return getattr(self, name)


def hamiltonian(params: ModelParams, ops: Operators, one_photon_coupling: float = 0.0) -> np.ndarray:
    nq = ops.spec.n_qubits
    sum_sx = sum(ops.sx)
    h = params.omega_c * ops.n + params.omega_0 * sum(ops.sz) + params.g / math.sqrt(nq) * sum_sx @ ops.X
    if one_photon_coupling:
        h = h + one_photon_coupling / math.sqrt(nq) * sum_sx @ (ops.a + ops.adag)
    return h


class Liouvillian:
    """Action rho -> -i[H, rho] + sum_k rate_k D[A_k] rho."""

    def __init__(self, h: np.ndarray, jumps: list[tuple[float, np.ndarray]], spec: HilbertSpec):
        self.h = h
        self.jumps = [(r, op) for r, op in jumps if r != 0]
        self.spec = spec
        self._ada = [(r, op, op.conj().T, op.conj().T @ op) for r, op in self.jumps]

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        out = -1j * (self.h @ rho - rho @ self.h)
        for r, op, opd, opdop in self._ada:
            out += r * (op @ rho @ opd - 0.5 * (rho @ opdop + opdop @ rho))
        return out

    def adjoint(self, obs: np.ndarray) -> np.ndarray:
        """Heisenberg-picture generator, so tr(A L(rho)) = tr(L^+(A) rho)."""
        out = 1j * (self.h @ obs - obs @ self.h)
        for r, op, opd, opdop in self._ada:
            out += r * (opd @ obs @ op - 0.5 * (obs @ opdop + opdop @ obs))
        return out

    @cached_property
    def superoperator(self) -> np.ndarray:
        """Matrix acting on row-major vec(rho)."""
        if not self.spec.materializable:
            raise OracleError(f"dimension {self.spec.dimension} too large to materialize the superoperator")
        d = self.spec.dimension
        eye = np.eye(d)
        sup = -1j * (np.kron(self.h, eye) - np.kron(eye, self.h.T))
        for r, op, opd, opdop in self._ada:
            sup += r * (np.kron(op, op.conj()) - 0.5 * np.kron(opdop, eye) - 0.5 * np.kron(eye, opdop.T))
        return sup


def build_liouvillian(params: ModelParams, spec: HilbertSpec, one_photon_coupling: float = 0.0,
                      ops: Operators | None = None) -> Liouvillian:
    """Generator of the dissipative two-photon Dicke model on ``spec``.

    ``one_photon_coupling`` adds a symmetry-breaking ``sigma_x (a + a^+)`` term,
    used only as a negative control.
    """
    if spec.n_qubits != params.n_qubits:
        raise OracleError(f"spec has {spec.n_qubits} qubits but params have {params.n_qubits}")
    params.check()
    ops = ops or Operators(spec)
    jumps = [(params.kappa, ops.a)]
    jumps += [(params.gamma_down, s) for s in ops.sminus]
    jumps += [(params.gamma_phi, s) for s in ops.sz]
    return Liouvillian(hamiltonian(params, ops, one_photon_coupling), jumps, spec)


# -- density matrices --------------------------------------------------------------------------


def photon_populations(rho: np.ndarray, spec: HilbertSpec) -> np.ndarray:
    return np.real(np.diag(rho)).reshape(2**spec.n_qubits, spec.n_fock).sum(axis=0)


def random_density(spec: HilbertSpec, rng: np.random.Generator, max_level: int | None = None) -> np.ndarray:
    """Random full-rank state on Fock levels ``0..max_level`` (default ``cutoff - 4``)."""
    max_level = spec.fock_cutoff - 4 if max_level is None else max_level
    keep = np.tile(np.arange(spec.n_fock) <= max_level, 2**spec.n_qubits)
    k = int(keep.sum())
    gin = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    sub = gin @ gin.conj().T
    rho = np.zeros((spec.dimension, spec.dimension), dtype=complex)
    rho[np.ix_(keep, keep)] = sub / np.trace(sub).real
    return rho


def product_state(spec: HilbertSpec, qubits_up: int = 0, photons: int = 0) -> np.ndarray:
    """|photons> with the first ``qubits_up`` qubits excited and the rest in the ground state."""
    psi = np.zeros(1)
    psi[0] = 1
    for j in range(spec.n_qubits):
        psi = np.kron(psi, [1.0, 0.0] if j < qubits_up else [0.0, 1.0])
    fock = np.zeros(spec.n_fock)
    fock[photons] = 1
    psi = np.kron(psi, fock).astype(complex)
    return np.outer(psi, psi.conj())


def density_defects(rho: np.ndarray, herm_tol: float = 1e-12, trace_tol: float = 1e-12,
                    psd_tol: float = 1e-10) -> list[str]:
    defects = []
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        defects.append(f"not Hermitian ({herm:.2e})")
    tr = abs(np.trace(rho) - 1)
    if tr > trace_tol:
        defects.append(f"trace off by {tr:.2e}")
    low = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if low < -psd_tol:
        defects.append(f"negative eigenvalue {low:.2e}")
    return defects


# -- checks ----------------------------------------------------------------------------------------


def expectation(op: np.ndarray, rho: np.ndarray) -> complex:
    return complex(np.trace(op @ rho))


def moment_rhs(rho: np.ndarray, params: ModelParams, ops: Operators) -> dict[str, complex]:
    """Right-hand sides of the exact (unclosed) moment equations, correlators taken from ``rho``."""
    e = lambda op: expectation(op, rho)  # noqa: E731
    wc, w0, k, gd = params.omega_c, params.omega_0, params.kappa, params.gamma_down
    gp = gamma_prime(params)
    sn = math.sqrt(ops.spec.n_qubits)
    g = params.g
    X, Y, n, Jx, Jy, Jz = (e(ops.by_name(o)) for o in OBSERVABLES)
    return {
        "X": -k * X - 2j * wc * Y,
        "Y": -k * Y - 2j * wc * X - 4j * g * sn * Jx - 8j * g * sn * e(ops.Jx @ ops.n),
        "n": 2j * g * sn * e(ops.Jx @ ops.Y) - k * n,
        "Jx": -2 * w0 * Jy - gp * Jx,
        "Jy": 2 * w0 * Jx - gp * Jy - 2 * g / sn * e(ops.Jz @ ops.X),
        "Jz": 2 * g / sn * e(ops.Jy @ ops.X) - gd * Jz - gd,
    }


def ehrenfest_residual(rho: np.ndarray, params: ModelParams, spec: HilbertSpec,
                       liouvillian: Liouvillian | None = None, ops: Operators | None = None) -> dict[str, float]:
    """|tr(A L(rho)) - moment_rhs_A| for each tracked observable A.

    ``rho`` must have population below 1e-10 on Fock levels above ``cutoff - 4``;
    the hard cutoff corrupts the two-photon matrix elements at the top of the ladder.
    """
    leak = photon_populations(rho, spec)[spec.fock_cutoff - 3:].sum()
    if leak > 1e-10:
        raise OracleError(f"state has population {leak:.2e} within 4 levels of the Fock cutoff")
    ops = ops or Operators(spec)
    lind = liouvillian or build_liouvillian(params, spec, ops=ops)
    drho = lind(rho)
    expected = moment_rhs(rho, params, ops)
    return {o: abs(expectation(ops.by_name(o), drho) - expected[o]) for o in OBSERVABLES}


def symmetry_operator(spec: HilbertSpec) -> np.ndarray:
    """exp(-i pi/2 a^+a) times sigma_z on every qubit (diagonal, entries in {1, -1, i, -i})."""
    phase = np.exp(-0.5j * np.pi * np.arange(spec.n_fock))
    phase = np.round(phase.real) + 1j * np.round(phase.imag)
    zdiag = np.ones(1)
    for _ in range(spec.n_qubits):
        zdiag = np.kron(zdiag, np.array([1.0, -1.0]))
    return np.diag(np.kron(zdiag, phase))


def symmetry_check(params: ModelParams, spec: HilbertSpec, n_samples: int = 10,
                   rng: np.random.Generator | None = None, one_photon_coupling: float = 0.0) -> float:
    """Max Frobenius norm of L(U rho U^+) - U L(rho) U^+ over random states."""
    rng = rng or np.random.default_rng(0)
    lind = build_liouvillian(params, spec, one_photon_coupling)
    u = symmetry_operator(spec)
    ud = u.conj().T
    worst = 0.0
    for _ in range(n_samples):
        rho = random_density(spec, rng, max_level=spec.fock_cutoff)
        defect = lind(u @ rho @ ud) - u @ lind(rho) @ ud
        worst = max(worst, float(np.linalg.norm(defect)))
    return worst


def trace_defect(params: ModelParams, spec: HilbertSpec, n_samples: int = 100,
                 rng: np.random.Generator | None = None) -> float:
    rng = rng or np.random.default_rng(0)
    lind = build_liouvillian(params, spec)
    worst = 0.0
    for _ in range(n_samples):
        rho = random_density(spec, rng, max_level=spec.fock_cutoff)
        worst = max(worst, abs(np.trace(lind(rho))))
    return worst


def evolve(rho0: np.ndarray, params: ModelParams, spec: HilbertSpec, t: float, tol: float = 1e-10,
           leak_tol: float = 1e-6) -> np.ndarray:
    """Integrate d rho/dt = L(rho) up to time ``t`` and re-validate the result."""
    bad = density_defects(rho0, herm_tol=1e-10, trace_tol=1e-10)
    if bad:
        raise OracleError("invalid initial state: " + "; ".join(bad))
    lind = build_liouvillian(params, spec)
    d = spec.dimension
    sol = solve_ivp(lambda _, y: lind(y.reshape(d, d)).ravel(), (0.0, t), rho0.astype(complex).ravel(),
                    method="DOP853", rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        raise OracleError(f"integration failed: {sol.message}")
    rho = sol.y[:, -1].reshape(d, d)
    bad = density_defects(rho, herm_tol=1e-10, trace_tol=1e-10, psd_tol=max(1e-10, 10 * tol))
    top = photon_populations(rho, spec)[-2:].sum()
    if top > leak_tol:
        bad.append(f"population {top:.2e} at the Fock cutoff")
    if bad:
        raise OracleError("evolved state violates density-matrix invariants (truncation too small?): " + "; ".join(bad))
    return rho


def steady_state_small(params: ModelParams, spec: HilbertSpec, degeneracy_tol: float = 1e-9) -> np.ndarray:
    """Null vector of the superoperator, normalised to unit trace."""
    lind = build_liouvillian(params, spec)
    sup = lind.superoperator
    _, s, vh = np.linalg.svd(sup)
    if s[-2] <= degeneracy_tol * s[0]:
        raise OracleError(f"steady state not unique: second-smallest singular value {s[-2]:.2e}")
    d = spec.dimension
    rho = vh[-1].conj().reshape(d, d)
    rho = rho / np.trace(rho)
    rho = 0.5 * (rho + rho.conj().T)
    res = np.max(np.abs(lind(rho)))
    if res > 1e-9:
        raise OracleError(f"steady-state residual {res:.2e} too large")
    return rho


# -- report --------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleCheck:
    name: str
    value: float
    tolerance: float
    lower_bound: bool = False  # True when the check requires value > tolerance

    @property
    def passed(self) -> bool:
        return self.value > self.tolerance if self.lower_bound else self.value < self.tolerance

    def line(self) -> str:
        op = ">" if self.lower_bound else "<"
        return f"{self.name} {self.value:.3e} {op} {self.tolerance:.0e} {'PASS' if self.passed else 'FAIL'}"


def run_suite(params: ModelParams, fock_cutoff: int, n_samples: int = 5, seed: int = 0) -> list[OracleCheck]:
    spec = HilbertSpec(params.n_qubits, fock_cutoff)
    rng = np.random.default_rng(seed)
    ops = Operators(spec)
    lind = build_liouvillian(params, spec, ops=ops)
    worst = dict.fromkeys(OBSERVABLES, 0.0)
    for _ in range(n_samples):
        res = ehrenfest_residual(random_density(spec, rng), params, spec, lind, ops)
        worst = {k: max(worst[k], res[k]) for k in worst}
    checks = [OracleCheck(f"ehrenfest_{k}", v, 1e-10) for k, v in worst.items()]
    checks.append(OracleCheck("trace_preservation", trace_defect(params, spec, 20 * n_samples, rng), 1e-12))
    checks.append(OracleCheck("z4_symmetry", symmetry_check(params, spec, n_samples, rng), 1e-12))
    control = symmetry_check(params, spec, n_samples, rng, one_photon_coupling=max(params.g, 0.5))
    checks.append(OracleCheck("z4_negative_control", control, 1e-3, lower_bound=True))
    return checks
