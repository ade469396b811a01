"""Parameter sweeps: phase-diagram grids, photon-number curves and threshold bisection."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .model import SCAN_NAMES, DickeError, ModelParams
from .stability import Classification, PhaseLabel, classify

PHASE_HEADER = ("axis1", "axis2", "label", "abscissa_normal", "abscissa_super", "n_ss")
CURVE_HEADER = ("g", "n_ss", "physical", "stable")
ERROR_LABEL = "error"


def _fmt(value: float) -> str:
    return "nan" if math.isnan(value) else f"{value:.17g}"


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int
    log: bool = False

    def __post_init__(self):
        if self.name not in SCAN_NAMES:
            raise ValueError(f"unknown axis parameter {self.name!r}")
        if self.count < 2:
            raise ValueError("axis point count must be >= 2")
        if self.log and not (self.lo > 0 and self.hi > 0):
            raise ValueError("log axis needs a positive range")

    @classmethod
    def parse(cls, text: str, log: bool = False) -> "Axis":
        """Parse ``name:min:max:count``."""
        try:
            name, lo, hi, count = text.split(":")
            return cls(name, float(lo), float(hi), int(count), log)
        except ValueError as exc:
            raise ValueError(f"bad axis {text!r}: expected name:min:max:count ({exc})") from None

    @property
    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepConfig:
    base: ModelParams
    axis1: Axis
    axis2: Axis
    margin: float = 1e-9

    def __post_init__(self):
        names = {self.axis1.name, self.axis2.name}
        if len(names) < 2 or ("gamma" in names and names & {"gamma_down", "gamma_phi"}):
            raise ValueError("sweep axes must name distinct parameters")


@dataclass
class PhaseDiagram:
    axis1: Axis
    axis2: Axis
    labels: np.ndarray  # object array of "N"/"S"/"B"/"I"/"error", shape (count1, count2)
    abscissa_normal: np.ndarray
    abscissa_super: np.ndarray
    n_ss: np.ndarray
    errors: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def fraction(self, labels: str = "SB") -> float:
        return float(np.isin(self.labels, list(labels)).mean())

    def count(self, labels: str = "SB") -> int:
        return int(np.isin(self.labels, list(labels)).sum())


def _evaluate(task):
    base, name1, v1, name2, v2, margin = task
    try:
        c = classify(base.replace(**{name1: v1}).replace(**{name2: v2}), margin)
    except DickeError as exc:
        return ERROR_LABEL, math.nan, math.nan, math.nan, str(exc)
    sup = c.superradiant.spectral_abscissa if c.superradiant else math.nan
    return c.label.value, c.normal.spectral_abscissa, sup, c.n_ss, None


def grid_sweep(config: SweepConfig, workers: int | None = 1) -> PhaseDiagram:
    """Classify every grid point. Per-point failures are stored in-cell as ``error``."""
    a1, a2 = config.axis1.values, config.axis2.values
    tasks = [(config.base, config.axis1.name, float(u), config.axis2.name, float(w), config.margin)
             for u in a1 for w in a2]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_evaluate(t) for t in tasks]
    shape = (len(a1), len(a2))
    labels = np.array([r[0] for r in results], dtype=object).reshape(shape)
    cols = [np.array([r[i] for r in results], dtype=float).reshape(shape) for i in (1, 2, 3)]
    errors = {divmod(i, shape[1]): r[4] for i, r in enumerate(results) if r[4]}
    return PhaseDiagram(config.axis1, config.axis2, labels, *cols, errors=errors)


@dataclass(frozen=True)
class CurvePoint:
    g: float
    n_ss: float
    physical: bool
    stable: bool


def photon_curve(params: ModelParams, g_range: tuple[float, float], n_points: int, log: bool = False) -> list[CurvePoint]:
    lo, hi = g_range
    if not (lo > 0 and hi > 0):
        raise ValueError("g range must be positive")
    gs = np.geomspace(lo, hi, n_points) if log else np.linspace(lo, hi, n_points)
    out = []
    for g in gs:
        c = classify(params.replace(g=float(g)))
        out.append(CurvePoint(float(g), c.n_ss, c.branches.physical, c.super_stable))
    return out


# -- threshold bisection ---------------------------------------------------------------

PREDICATES: dict[str, Callable[[Classification], bool]] = {
    "normal-stable": lambda c: c.normal_stable,
    "normal-unstable": lambda c: not c.normal_stable,
    "super-stable": lambda c: c.super_stable,
    "super-unstable": lambda c: not c.super_stable,
    "bistable": lambda c: c.label is PhaseLabel.B,
}


@dataclass(frozen=True)
class ThresholdResult:
    value: float
    lo: float
    hi: float
    crossing: str  # "real", "complex-pair" or "existence"
    brackets: tuple[tuple[float, float], ...]


def _crossing_type(predicate: str, left: Classification, right: Classification) -> str:
    reports = (left.normal, right.normal)
    if not predicate.startswith("normal"):
        exists = (left.superradiant is not None, right.superradiant is not None)
        if exists[0] != exists[1] or (predicate != "custom" and not all(exists)):
            return "existence"
        if predicate != "custom":
            reports = (left.superradiant, right.superradiant)
    unstable = max(reports, key=lambda r: r.spectral_abscissa)
    return "real" if abs(unstable.leading.imag) < 1e-9 else "complex-pair"


def threshold_scan(
    base: ModelParams,
    scan_param: str,
    bracket: tuple[float, float],
    predicate: str | Callable[[Classification], bool],
    tol: float = 1e-4,
) -> ThresholdResult:
    """Bisect ``scan_param`` until the predicate flip is located to ``tol``."""
    if scan_param not in SCAN_NAMES:
        raise ValueError(f"unknown scan parameter {scan_param!r}")
    name = predicate if isinstance(predicate, str) else "custom"
    pred = PREDICATES[predicate] if isinstance(predicate, str) else predicate

    def at(value: float) -> Classification:
        return classify(base.replace(**{scan_param: value}))

    lo, hi = float(bracket[0]), float(bracket[1])
    c_lo, c_hi = at(lo), at(hi)
    p_lo = pred(c_lo)
    if p_lo == pred(c_hi):
        raise DickeError(f"predicate {name!r} is {p_lo} at both ends of [{lo}, {hi}]")
    brackets = [(lo, hi)]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        c_mid = at(mid)
        if pred(c_mid) == p_lo:
            lo, c_lo = mid, c_mid
        else:
            hi, c_hi = mid, c_mid
        brackets.append((lo, hi))
    return ThresholdResult(0.5 * (lo + hi), lo, hi, _crossing_type(name, c_lo, c_hi), tuple(brackets))


# -- CSV -----------------------------------------------------------------------------------


def _open_for_write(path: str | Path):
    path = Path(path)
    try:
        return path.open("w", newline="")
    except OSError as exc:
        raise DickeError(f"cannot write {path}: {exc}") from exc


def write_csv(data: PhaseDiagram | Sequence[CurvePoint], path: str | Path) -> None:
    with _open_for_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if isinstance(data, PhaseDiagram):
            writer.writerow(PHASE_HEADER)
            for i, u in enumerate(data.axis1.values):
                for j, w in enumerate(data.axis2.values):
                    writer.writerow([_fmt(u), _fmt(w), data.labels[i, j], _fmt(data.abscissa_normal[i, j]),
                                     _fmt(data.abscissa_super[i, j]), _fmt(data.n_ss[i, j])])
        else:
            writer.writerow(CURVE_HEADER)
            for p in data:
                writer.writerow([_fmt(p.g), _fmt(p.n_ss), str(p.physical).lower(), str(p.stable).lower()])


def read_phase_csv(path: str | Path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != PHASE_HEADER:
            raise DickeError(f"{path}: unexpected header {reader.fieldnames}")
        rows = []
        for row in reader:
            rec = {k: float(row[k]) for k in PHASE_HEADER if k != "label"}
            rec["label"] = row["label"]
            rows.append(rec)
        return rows
