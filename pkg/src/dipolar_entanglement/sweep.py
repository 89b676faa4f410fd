"""
Parameter sweeps, boundary tracing, the concurrence-magnetization fit and
the datasets behind each figure.

Grid points are independent; :func:`run_sweep` may farm them out to worker
processes but always returns rows in grid order.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import itertools
import math
import os

import numpy as np

from . import __version__
from . import analytic
from .entanglement import concurrence
from .errors import DipolarError, DomainError, InsufficientEntangledPoints, UnknownFigure
from .spin_model import pair_hamiltonian
from .thermal import gibbs, magnetization

METHODS = ("numeric", "analytic", "both")
BASE_COLUMNS = ("beta", "d", "theta", "phi", "concurrence", "magnetization", "method", "error")
BOTH_COLUMNS = BASE_COLUMNS + ("concurrence_analytic", "magnetization_analytic", "concurrence_abs_diff")
BOUNDARY_COLUMNS = ("d", "beta_c", "residual", "error")

WORKERS_ENV = "DIPOLAR_WORKERS"
PARALLEL_THRESHOLD = 2000


def _axis(values, name):
    arr = tuple(float(v) for v in values)
    if not arr:
        raise DomainError(f"{name} axis is empty")
    if any(not math.isfinite(v) for v in arr):
        raise DomainError(f"{name} axis has non-finite values")
    if any(b <= a for a, b in zip(arr, arr[1:])):
        raise DomainError(f"{name} axis must be strictly increasing")
    return arr


@dataclass(frozen=True)
class SweepGrid:
    beta_axis: tuple
    d_axis: tuple
    theta_axis: tuple = (math.pi / 2,)
    phi_axis: tuple = (0.0,)
    method: str = "numeric"

    def __post_init__(self):
        for name in ("beta_axis", "d_axis", "theta_axis", "phi_axis"):
            object.__setattr__(self, name, _axis(getattr(self, name), name))
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}")
        if self.method in ("analytic", "both") and (
            self.theta_axis != (math.pi / 2,) or self.phi_axis != (0.0,)
        ):
            raise DomainError("analytic sweeps require theta = pi/2 and phi = 0 only")

    def points(self):
        return list(itertools.product(self.beta_axis, self.d_axis, self.theta_axis, self.phi_axis))

    def __len__(self):
        return len(self.beta_axis) * len(self.d_axis) * len(self.theta_axis) * len(self.phi_axis)

    def as_dict(self) -> dict:
        return {
            "beta_axis": list(self.beta_axis),
            "d_axis": list(self.d_axis),
            "theta_axis": list(self.theta_axis),
            "phi_axis": list(self.phi_axis),
            "method": self.method,
        }


@dataclass
class SweepTable:
    """Ordered rows plus metadata; each row is a dict keyed by ``columns``."""

    columns: tuple
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name) -> np.ndarray:
        return np.array([np.nan if r.get(name) is None else r[name] for r in self.rows], dtype=float)

    def entangled_fraction(self) -> float:
        if "concurrence" not in self.columns or not self.rows:
            return 0.0
        c = self.column("concurrence")
        return float(np.sum(c > 0) / len(self.rows))


@dataclass(frozen=True)
class LinearFit:
    """Least-squares fit ``C = a * (M + b)``."""

    a: float
    b: float
    residual_rms: float
    beta_min: float
    beta_max: float
    n_points: int

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "residual_rms": self.residual_rms,
            "beta_min": self.beta_min,
            "beta_max": self.beta_max,
            "n_points": self.n_points,
        }


def base_metadata(**extra) -> dict:
    meta = {"code_version": __version__}
    meta.update(analytic.variant_metadata())
    meta.update(extra)
    return meta


def evaluate_point(beta, d, theta, phi, method) -> dict:
    """One sweep row; domain errors are recorded in the ``error`` field."""
    row = {
        "beta": beta, "d": d, "theta": theta, "phi": phi,
        "concurrence": None, "magnetization": None, "method": method, "error": None,
    }
    if method == "both":
        row.update(concurrence_analytic=None, magnetization_analytic=None, concurrence_abs_diff=None)
    try:
        if method in ("numeric", "both"):
            st = gibbs(pair_hamiltonian(beta, d, theta, phi))
            row["concurrence"] = concurrence(st.rho).concurrence
            row["magnetization"] = magnetization(st.rho, 2)
        if method == "analytic":
            row["concurrence"] = analytic.concurrence_closed(beta, d)
            row["magnetization"] = analytic.magnetization_closed(beta, d)
        if method == "both":
            c_an = analytic.concurrence_closed(beta, d)
            row["concurrence_analytic"] = c_an
            row["concurrence_abs_diff"] = abs(c_an - row["concurrence"])
            row["magnetization_analytic"] = analytic.magnetization_closed(beta, d)
    except DipolarError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _evaluate_chunk(chunk):
    return [evaluate_point(*args) for args in chunk]


def worker_count(workers=None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(grid: SweepGrid, workers=None, parallel_threshold: int = PARALLEL_THRESHOLD) -> SweepTable:
    """
    Evaluate every grid point.

    Parameters
    ----------
    grid : SweepGrid
    workers : int, optional
        Process count; defaults to ``$DIPOLAR_WORKERS`` or the CPU count.
    parallel_threshold : int
        Grids smaller than this are always evaluated serially; process
        start-up would dominate otherwise.

    Returns
    -------
    SweepTable
        Rows in lexicographic (beta, d, theta, phi) order.
    """
    tasks = [(b, d, t, p, grid.method) for b, d, t, p in grid.points()]
    n_workers = worker_count(workers)
    if n_workers > 1 and len(tasks) >= parallel_threshold:
        size = math.ceil(len(tasks) / (4 * n_workers))
        chunks = [tasks[i:i + size] for i in range(0, len(tasks), size)]
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            # map preserves submission order
            rows = [r for part in pool.map(_evaluate_chunk, chunks) for r in part]
    else:
        rows = _evaluate_chunk(tasks)

    columns = BOTH_COLUMNS if grid.method == "both" else BASE_COLUMNS
    meta = base_metadata(grid=grid.as_dict())
    if grid.method == "both":
        diffs = [r["concurrence_abs_diff"] for r in rows if r.get("concurrence_abs_diff") is not None]
        worst = max(diffs) if diffs else 0.0
        meta["max_concurrence_abs_diff"] = worst
        meta["validation_tolerance"] = analytic.VALIDATION_TOL
        meta["validation_flag"] = int(worst > analytic.VALIDATION_TOL)
    return SweepTable(columns=columns, rows=rows, metadata=meta)


def trace_boundary(d_axis, method: str = "analytic") -> list:
    """
    Critical beta for each d, in input order.

    Failed solves are returned as points with ``beta_c = nan`` and the error
    message attached rather than raised.
    """
    if method not in ("numeric", "analytic"):
        raise DomainError("boundary method must be 'numeric' or 'analytic'")
    solve = analytic.boundary_beta_numeric if method == "numeric" else analytic.boundary_beta_analytic
    out = []
    for d in d_axis:
        try:
            out.append(solve(float(d)))
        except DipolarError as exc:
            out.append(analytic.PhasePoint(float(d), math.nan, math.nan, f"{type(exc).__name__}: {exc}"))
    return out


def boundary_table(points, method: str) -> SweepTable:
    rows = [{"d": p.d, "beta_c": p.beta_c, "residual": p.residual, "error": p.error} for p in points]
    return SweepTable(BOUNDARY_COLUMNS, rows, base_metadata(boundary_method=method))


def fit_concurrence_vs_magnetization(d: float, beta_max: float, n_points: int = 200) -> LinearFit:
    """
    Fit ``C = a (M + b)`` over the entangled part of a beta sweep.

    Beta is sampled uniformly on ``[0, beta_max]`` at theta = pi/2, phi = 0;
    only points with ``C > 0`` enter the least-squares fit. ``n_points`` in
    the result counts the points actually fitted.
    """
    if not d > 0 or not beta_max > 0:
        raise DomainError("need d > 0 and beta_max > 0")
    if n_points < 10:
        raise DomainError("n_points must be >= 10")
    betas = np.linspace(0.0, beta_max, n_points)
    c = np.empty(n_points)
    m = np.empty(n_points)
    for i, b in enumerate(betas):
        st = gibbs(pair_hamiltonian(b, d))
        c[i] = concurrence(st.rho).concurrence
        m[i] = magnetization(st.rho, 2)
    keep = c > 0
    if keep.sum() < 3:
        raise InsufficientEntangledPoints(
            f"only {int(keep.sum())} entangled points for d={d}, beta_max={beta_max}"
        )
    slope, intercept = np.polyfit(m[keep], c[keep], 1)
    resid = c[keep] - (slope * m[keep] + intercept)
    return LinearFit(
        a=float(slope),
        b=float(intercept / slope),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        beta_min=float(betas[keep].min()),
        beta_max=float(betas[keep].max()),
        n_points=int(keep.sum()),
    )


# Figure parameter choices. Axes start at zero where the captions imply the
# full range from infinite temperature / zero field.
FIG1_BETA = tuple(np.linspace(0.0, 10.0, 51))
FIG1_THETA = tuple(np.linspace(0.0, math.pi, 41))
FIG2_D = tuple(np.round(np.linspace(0.25, 10.0, 40), 12))
FIG3_AXIS = tuple(np.linspace(0.0, 10.0, 41))
FIG4A_D = (0.5, 2.0, 10.0)
FIG4A_BETA = tuple(np.linspace(0.0, 20.0, 201))
FIG4B_RATIOS = (3.0, 5.0, 10.0)
FIG4B_INV_T = tuple(np.linspace(0.0, 10.0, 201))
FIG5_D = 3.0
FIG5_BETA = tuple(np.linspace(0.0, 6.0, 121))
FIG5_FIT_BETA_MAX = 3.32

FIGURES = ("1", "2", "3", "4", "4a", "4b", "5")


def _fig4a():
    rows = []
    for d in FIG4A_D:
        rows += run_sweep(SweepGrid(FIG4A_BETA, (d,))).rows
    return rows


def _fig4b():
    # inverse temperature in units r^3 k_B / gamma^2 equals d; beta = d / ratio
    rows = []
    for ratio in FIG4B_RATIOS:
        for inv_t in FIG4B_INV_T:
            rows.append(evaluate_point(float(inv_t) / ratio, float(inv_t), math.pi / 2, 0.0, "numeric"))
    return rows


def figure_data(figure_id) -> SweepTable:
    """
    Dataset behind one figure.

    ``figure_id`` is 1-5, or ``"4a"`` / ``"4b"`` for the two panels of
    figure 4 (plain 4 returns both, panel a first).
    """
    fid = str(figure_id).lower()
    if fid not in FIGURES:
        raise UnknownFigure(f"unknown figure {figure_id!r}; expected one of {FIGURES}")
    if fid == "1":
        table = run_sweep(SweepGrid(FIG1_BETA, (3.0,), FIG1_THETA, (0.0,)))
        table.metadata["figure"] = "1"
        return table
    if fid == "2":
        table = boundary_table(trace_boundary(FIG2_D, "analytic"), "analytic")
        table.metadata["figure"] = "2"
        return table
    if fid == "3":
        table = run_sweep(SweepGrid(FIG3_AXIS, FIG3_AXIS))
        table.metadata["figure"] = "3"
        return table
    if fid in ("4", "4a", "4b"):
        rows_a = _fig4a() if fid in ("4", "4a") else []
        rows_b = _fig4b() if fid in ("4", "4b") else []
        meta = base_metadata(figure=fid)
        if rows_a:
            meta["panel_4a"] = {"d_values": list(FIG4A_D), "rows": [0, len(rows_a)]}
        if rows_b:
            start = len(rows_a)
            meta["panel_4b"] = {"d_over_beta": list(FIG4B_RATIOS), "rows": [start, start + len(rows_b)]}
        return SweepTable(BASE_COLUMNS, rows_a + rows_b, meta)
    # figure 5
    table = run_sweep(SweepGrid(FIG5_BETA, (FIG5_D,)))
    for r in table.rows:
        r["abs_magnetization"] = None if r["magnetization"] is None else abs(r["magnetization"])
    table.columns = BASE_COLUMNS + ("abs_magnetization",)
    fit = fit_concurrence_vs_magnetization(FIG5_D, FIG5_FIT_BETA_MAX)
    table.metadata["figure"] = "5"
    table.metadata["fit"] = fit.as_dict()
    return table
