"""Quantitative trajectory diagnostics.

Axis-aligned ellipse fitting, period and orientation detection, drift of
conserved quantities, and a geometric congruence metric between two
trajectories (normalized symmetric Hausdorff distance between their point
sets).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import directed_hausdorff

from .errors import DegenerateFitError, InputDomainError
from .fields import ClassicalSystem, classical_potential
from .integrate import Trajectory

ABS_POSITION = "abs_position"
COMPLEX_ENERGY = "complex_energy"


class Orientation(str, Enum):
    CLOCKWISE = "clockwise"
    ANTICLOCKWISE = "anticlockwise"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class EllipseFit:
    """Axis-aligned ellipse through trajectory samples.

    A is the real-axis semi-axis (positive).  B is the imaginary-axis
    semi-axis *signed by traversal direction*: positive for anticlockwise
    motion, negative for clockwise, matching the parametrization
    x = center + A cos(phi) + i B sin(phi) with phi increasing along the
    curve.  residual is the RMS of |u^2/A^2 + v^2/B^2 - 1| over the
    center-shifted samples (u, v).
    """

    A: float
    B: float
    center: complex
    phase: float
    residual: float


@dataclass(frozen=True)
class PeriodEstimate:
    period: float
    recurrence_error: float
    orientation: Orientation
    periodic: bool = True


def _positions_of(traj) -> np.ndarray:
    if isinstance(traj, Trajectory):
        return traj.positions
    return np.asarray(traj, dtype=complex)


def _signed_area(x: np.ndarray) -> float:
    xr, xi = x.real, x.imag
    return 0.5 * float(np.sum(xr[:-1] * np.diff(xi) - xi[:-1] * np.diff(xr)))


def _orientation_of(x: np.ndarray, diam: float) -> Orientation:
    area = _signed_area(x)
    if abs(area) < 1e-9 * diam * diam:
        return Orientation.UNDETERMINED
    return Orientation.ANTICLOCKWISE if area > 0.0 else Orientation.CLOCKWISE


def curve_diameter(x) -> float:
    """Largest pairwise distance between sampled points."""
    x = _positions_of(x)
    pts = np.column_stack([x.real, x.imag])
    if len(pts) < 2:
        return 0.0
    try:
        hull = ConvexHull(pts)
        v = pts[hull.vertices]
    except QhullError:
        # collinear samples: spread along the principal direction
        d = pts - pts.mean(axis=0)
        _, _, vt = np.linalg.svd(d, full_matrices=False)
        proj = d @ vt[0]
        return float(proj.max() - proj.min())
    diff = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())


# -- ellipse fitting -----------------------------------------------------------

def fit_ellipse(traj) -> EllipseFit:
    """Least-squares axis-aligned ellipse fit.

    The sample centroid is subtracted first, then a u^2, v^2, u, v conic
    fit both recenters exactly and yields the semi-axes, so uneven sampling
    along the curve does not bias the center.  Collinear input raises
    DegenerateFitError carrying the fitted line.
    """
    x = _positions_of(traj)
    if len(x) < 16:
        raise InputDomainError("fit_ellipse: need at least 16 samples")
    cx0, cy0 = float(x.real.mean()), float(x.imag.mean())
    u = x.real - cx0
    v = x.imag - cy0

    spread = np.linalg.svd(np.column_stack([u, v]), compute_uv=False)
    if spread[-1] < 1e-12 * max(spread[0], 1e-300):
        d = np.column_stack([u, v])
        _, _, vt = np.linalg.svd(d, full_matrices=False)
        direction = complex(vt[0, 0], vt[0, 1])
        raise DegenerateFitError(point=complex(cx0, cy0), direction=direction)

    design = np.column_stack([u * u, v * v, u, v])
    rhs = np.ones(len(x))
    beta, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    pu, pv, qu, qv = beta
    if pu <= 0.0 or pv <= 0.0:
        raise DegenerateFitError(
            point=complex(cx0, cy0),
            direction=0j,
            message="conic fit is not an ellipse",
        )
    du = -qu / (2.0 * pu)
    dv = -qv / (2.0 * pv)
    radius = 1.0 + pu * du * du + pv * dv * dv
    if radius <= 0.0:
        raise DegenerateFitError(
            point=complex(cx0, cy0), direction=0j, message="degenerate conic radius"
        )
    A = math.sqrt(radius / pu)
    B = math.sqrt(radius / pv)
    center = complex(cx0 + du, cy0 + dv)

    uu = (u - du) / A
    vv = (v - dv) / B
    residual = float(np.sqrt(np.mean((uu * uu + vv * vv - 1.0) ** 2)))

    diam = 2.0 * max(A, B)
    if _orientation_of(x, diam) is Orientation.CLOCKWISE:
        B = -B
    phase = math.atan2((x[0].imag - center.imag) / B, (x[0].real - center.real) / A)
    return EllipseFit(A=A, B=B, center=center, phase=phase, residual=residual)


# -- period detection ----------------------------------------------------------

_PERIOD_GRID = 2000
_PERIOD_T_MIN = 0.05
_RECURRENCE_GATE = 0.10   # fraction of diameter: established periodicity
_LAP_GATE = 0.25          # looser gate for revolution-compatible candidates
_LAP_MATCH = 0.08         # relative mismatch tolerated between T and lap time


def detect_period(traj: Trajectory, window) -> PeriodEstimate:
    """Fundamental period of the windowed motion.

    Scans candidate periods on a grid for local minima of the recurrence
    error max_t |x(t+T) - x(t)| and golden-section refines the chosen one.
    A candidate is accepted when its recurrence error is below 10% of the
    window diameter, or, among revolving trajectories, when it matches the
    mean lap time around the centroid and stays below a looser gate; the
    smallest accepted candidate wins, so harmonics of the fundamental do
    not.  If nothing recurs, the estimate is flagged UNDETERMINED.
    """
    t_lo, t_hi = float(window[0]), float(window[1])
    if not (t_lo >= traj.times[0] - 1e-12 and t_hi <= traj.times[-1] + 1e-12 and t_hi > t_lo):
        raise InputDomainError("detect_period: window outside trajectory span")
    mask = (traj.times >= t_lo) & (traj.times <= t_hi)
    ts = traj.times[mask]
    xs = traj.positions[mask]
    if len(ts) < 200:
        raise InputDomainError("detect_period: need at least 200 samples in window")

    span = ts[-1] - ts[0]
    t_max = span / 3.0
    if t_max <= _PERIOD_T_MIN:
        raise InputDomainError("detect_period: window too short for the candidate grid")
    diam = curve_diameter(xs)
    if diam == 0.0:
        return PeriodEstimate(
            period=span, recurrence_error=0.0, orientation=Orientation.UNDETERMINED,
            periodic=False,
        )

    dt = ts[1] - ts[0]

    def recurrence(T: float) -> float:
        shift = T / dt
        base = int(math.floor(shift))
        frac = shift - base
        n = len(xs)
        if base >= n - 1:
            return math.inf
        ahead = xs[base:n - 1] + frac * (xs[base + 1:n] - xs[base:n - 1])
        m = len(ahead)
        return float(np.abs(ahead - xs[:m]).max())

    grid = np.linspace(_PERIOD_T_MIN, t_max, _PERIOD_GRID)
    errs = np.array([recurrence(T) for T in grid])

    minima = [
        i
        for i in range(len(grid))
        if (i == 0 or errs[i] <= errs[i - 1]) and (i == len(grid) - 1 or errs[i] <= errs[i + 1])
        and math.isfinite(errs[i])
    ]
    strong = [i for i in minima if errs[i] < _RECURRENCE_GATE * diam]

    orientation = _orientation_of(xs, diam)
    if not strong:
        i_best = int(np.argmin(errs))
        T = _golden_refine(recurrence, grid, i_best)
        return PeriodEstimate(
            period=T, recurrence_error=recurrence(T),
            orientation=Orientation.UNDETERMINED, periodic=False,
        )

    lap = _mean_lap_time(ts, xs)
    accepted = set(strong)
    if lap is not None:
        for i in minima:
            if errs[i] < _LAP_GATE * diam and abs(grid[i] - lap) <= _LAP_MATCH * lap:
                accepted.add(i)
    i_star = min(accepted, key=lambda i: grid[i])
    T = _golden_refine(recurrence, grid, i_star)
    return PeriodEstimate(
        period=T, recurrence_error=recurrence(T), orientation=orientation, periodic=True,
    )


def _mean_lap_time(ts, xs):
    """Mean time per revolution of arg(x - centroid); None if < 2 laps."""
    rel = xs - xs.mean()
    r = np.abs(rel)
    if r.min() < 1e-12 * max(r.max(), 1e-300):
        return None
    theta = np.unwrap(np.angle(rel))
    laps = abs(theta[-1] - theta[0]) / (2.0 * math.pi)
    if laps < 2.0:
        return None
    return float((ts[-1] - ts[0]) / laps)


def _golden_refine(fn, grid, i, iters=60):
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    if hi <= lo:
        return float(grid[i])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
        if b - a < 1e-12 * max(1.0, b):
            break
    return float((a + b) / 2.0)


# -- conserved-quantity drift ----------------------------------------------------

def conserved_drift(
    traj: Trajectory,
    quantity: str,
    system: ClassicalSystem | None = None,
    floor: float = 1e-12,
) -> float:
    """Max relative excursion of a conserved quantity along the run.

    quantity is ABS_POSITION (|x|, for circular orbits) or COMPLEX_ENERGY
    (p^2/2m + V(x), requires momenta and the classical system).
    """
    if quantity == ABS_POSITION:
        q = np.abs(traj.positions).astype(complex)
    elif quantity == COMPLEX_ENERGY:
        if traj.momenta is None:
            raise InputDomainError("conserved_drift: trajectory has no momenta")
        if system is None:
            raise InputDomainError("conserved_drift: COMPLEX_ENERGY needs the system")
        m = system.params.mass
        q = traj.momenta ** 2 / (2.0 * m) + np.array(
            [classical_potential(system, x) for x in traj.positions]
        )
    else:
        raise InputDomainError(f"conserved_drift: unknown quantity {quantity!r}")
    q0 = q[0]
    return float(np.abs(q - q0).max() / max(abs(q0), floor))


# -- congruence -------------------------------------------------------------------

def congruence_metric(traj_q, traj_c) -> float:
    """Symmetric discrete Hausdorff distance between two sampled curves,
    normalized by the larger curve diameter.  Zero iff the point sets
    coincide up to sampling."""
    a = _positions_of(traj_q)
    b = _positions_of(traj_c)
    if len(a) == 0 or len(b) == 0:
        raise InputDomainError("congruence_metric: empty trajectory")
    pa = np.column_stack([a.real, a.imag])
    pb = np.column_stack([b.real, b.imag])
    d_ab = directed_hausdorff(pa, pb)[0]
    d_ba = directed_hausdorff(pb, pa)[0]
    scale = max(curve_diameter(a), curve_diameter(b))
    if scale == 0.0:
        return 0.0 if max(d_ab, d_ba) == 0.0 else math.inf
    return max(d_ab, d_ba) / scale


# -- spiral diagnostics -----------------------------------------------------------

def cycle_extrema(
    traj: Trajectory, period: float, n_cycles: int, t_start: float | None = None,
    center: complex | None = None,
) -> np.ndarray:
    """Per-cycle maximum of |x - center| over consecutive windows of length
    `period`.  Quantifies inward spiraling: a strictly decreasing sequence
    means the maximum displacement shrinks every cycle."""
    if period <= 0.0 or n_cycles <= 0:
        raise InputDomainError("cycle_extrema: need period > 0 and n_cycles > 0")
    t0 = traj.times[0] if t_start is None else t_start
    t_end = t0 + n_cycles * period
    if t_end > traj.times[-1] + 1e-9:
        raise InputDomainError("cycle_extrema: trajectory shorter than requested cycles")
    mask_all = (traj.times >= t0) & (traj.times <= t_end)
    if center is None:
        center = complex(traj.positions[mask_all].mean())
    out = []
    for k in range(n_cycles):
        mask = (traj.times >= t0 + k * period) & (traj.times < t0 + (k + 1) * period)
        if not mask.any():
            raise InputDomainError("cycle_extrema: empty cycle window; sample more densely")
        out.append(float(np.abs(traj.positions[mask] - center).max()))
    return np.array(out)
