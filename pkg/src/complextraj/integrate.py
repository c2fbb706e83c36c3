"""Adaptive integration of complex velocity fields and Hamiltonian systems.

The workhorse is a Dormand-Prince 5(4) embedded pair with its standard
quartic dense-output interpolant, run directly on complex state (a scalar
for velocity fields, an (x, p) array for Hamiltonian systems).  Runtime
trouble never raises: pole proximity, domain escape, step underflow and
step-budget exhaustion all end the run with a structured StopReason while
everything sampled so far is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    InputDomainError,
    PoleProximityError,
    PotentialSingularityError,
)
from .fields import ClassicalSystem, classical_force, classical_potential

DEFAULT_SAMPLES = 2000


class Method(str, Enum):
    RK4_FIXED = "rk4_fixed"
    RK45_ADAPTIVE = "rk45_adaptive"


@dataclass(frozen=True)
class IntegratorConfig:
    method: Method = Method.RK45_ADAPTIVE
    dt_init: float = 1e-3
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    dt_min: float = 1e-12
    max_steps: int = 10_000_000
    pole_psi_floor: float = 1e-12
    domain_margin: float = 1e-9

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0 and 0.0 < self.abs_tol < 1.0):
            raise InputDomainError("IntegratorConfig: tolerances must lie in (0, 1)")
        if not 0.0 < self.dt_min < self.dt_init:
            raise InputDomainError("IntegratorConfig: need 0 < dt_min < dt_init")
        if self.max_steps <= 0:
            raise InputDomainError("IntegratorConfig: max_steps must be positive")
        if self.domain_margin < 0.0:
            raise InputDomainError("IntegratorConfig: domain_margin must be >= 0")


class StopKind(str, Enum):
    COMPLETED = "completed"
    POLE_PROXIMITY = "pole_proximity"
    DOMAIN_ESCAPE = "domain_escape"
    STEP_UNDERFLOW = "step_underflow"
    MAX_STEPS = "max_steps"


@dataclass(frozen=True)
class StopReason:
    kind: StopKind
    detail: dict = field(default_factory=dict)


@dataclass
class Trajectory:
    """Sampled run: strictly increasing times, finite complex positions,
    optional momenta, a StopReason, and free-form metadata."""

    times: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray | None
    stop: StopReason
    meta: dict = field(default_factory=dict)

    @property
    def completed(self) -> bool:
        return self.stop.kind is StopKind.COMPLETED

    def __len__(self) -> int:
        return len(self.times)


# Dormand-Prince 5(4) tableau.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# Error weights: 5th-order propagating solution minus embedded 4th order.
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# Dense-output weights for the quartic interpolant.
_D = (
    -12715105075 / 11282082432,
    0.0,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)

_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_SAFETY = 0.9


def _combine(y, h, ks, weights):
    acc = None
    for w, k in zip(weights, ks):
        if w == 0.0:
            continue
        acc = w * k if acc is None else acc + w * k
    if acc is None:
        return y
    return y + h * acc


def _error_norm(err, y_old, y_new, cfg) -> float:
    if isinstance(err, complex):
        scale = cfg.abs_tol + cfg.rel_tol * max(abs(y_old), abs(y_new))
        return abs(err) / scale
    scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def _is_finite(y) -> bool:
    if isinstance(y, complex):
        return math.isfinite(y.real) and math.isfinite(y.imag)
    return bool(np.isfinite(y).all())


def _dense_r5(h, ks):
    acc = None
    for w, k in zip(_D, ks):
        if w == 0.0:
            continue
        acc = w * k if acc is None else acc + w * k
    return h * acc


class _DenseSegment:
    """Quartic interpolant over one accepted step [t, t+h]."""

    __slots__ = ("t", "h", "r1", "r2", "r3", "r4", "r5")

    def __init__(self, t, h, y_old, y_new, ks):
        dy = y_new - y_old
        bspl = h * ks[0] - dy
        self.t = t
        self.h = h
        self.r1 = y_old
        self.r2 = dy
        self.r3 = bspl
        self.r4 = dy - h * ks[6] - bspl
        self.r5 = _dense_r5(h, ks)

    def __call__(self, ts: float):
        theta = (ts - self.t) / self.h
        omt = 1.0 - theta
        return self.r1 + theta * (self.r2 + omt * (self.r3 + theta * (self.r4 + omt * self.r5)))


class _HermiteSegment:
    """Cubic Hermite interpolant for the fixed-step method (O(h^4) accurate)."""

    __slots__ = ("t", "h", "y0", "y1", "f0", "f1")

    def __init__(self, t, h, y0, y1, f0, f1):
        self.t, self.h, self.y0, self.y1, self.f0, self.f1 = t, h, y0, y1, f0, f1

    def __call__(self, ts: float):
        s = (ts - self.t) / self.h
        s2, s3 = s * s, s * s * s
        return (
            (2 * s3 - 3 * s2 + 1) * self.y0
            + (s3 - 2 * s2 + s) * self.h * self.f0
            + (-2 * s3 + 3 * s2) * self.y1
            + (s3 - s2) * self.h * self.f1
        )


class _Engine:
    """Shared stepping loop; subclass hooks extract the position component."""

    def __init__(self, f, y0, t0, t1, cfg: IntegratorConfig, sample_times, domain):
        self.f = f
        self.cfg = cfg
        self.t0, self.t1 = t0, t1
        self.y = y0
        self.t = t0
        self.domain = domain
        self.sample_times = sample_times
        self.sample_vals = [y0]
        self._next_sample = 1  # sample_times[0] == t0 recorded above
        self.n_accepted = 0
        self.n_attempted = 0

    def position_of(self, y):
        return y

    # -- main loop ------------------------------------------------------------

    def run(self) -> StopReason:
        cfg = self.cfg
        span = self.t1 - self.t0
        try:
            k1 = self.f(self.t, self.y)
        except (PoleProximityError, PotentialSingularityError) as exc:
            return self._stop_pole(exc)
        if cfg.method is Method.RK4_FIXED:
            return self._run_rk4(k1)

        h = min(cfg.dt_init, span)
        pole_pending = None
        while self.t < self.t1 - 1e-14 * abs(span):
            if self.n_attempted >= cfg.max_steps:
                return StopReason(
                    StopKind.MAX_STEPS,
                    {"time": self.t, "location": self.position_of(self.y)},
                )
            h = min(h, self.t1 - self.t)
            if h < cfg.dt_min:
                if pole_pending is not None:
                    return self._stop_pole(pole_pending)
                return StopReason(
                    StopKind.STEP_UNDERFLOW,
                    {"time": self.t, "step": h, "location": self.position_of(self.y)},
                )
            self.n_attempted += 1
            try:
                ks, y_new = self._stages(k1, h)
            except (PoleProximityError, PotentialSingularityError) as exc:
                pole_pending = exc
                h *= 0.5
                continue
            k_new = ks[6]
            err = _combine(self.y * 0.0, h, ks, _E)
            norm = _error_norm(err, self.y, y_new, cfg)
            if not _is_finite(y_new) or not math.isfinite(norm):
                h *= 0.5
                continue
            if norm > 1.0:
                h *= max(_MIN_FACTOR, _SAFETY * norm ** -0.2)
                continue
            # accepted
            pole_pending = None
            segment = _DenseSegment(self.t, h, self.y, y_new, ks)
            escaped = self._escaped(y_new)
            if escaped is None:
                self._emit_samples(segment, self.t + h)
            else:
                return StopReason(
                    StopKind.DOMAIN_ESCAPE,
                    {"time": self.t + h, "location": escaped},
                )
            self.t += h
            self.y = y_new
            k1 = k_new
            self.n_accepted += 1
            factor = _MAX_FACTOR if norm == 0.0 else min(
                _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * norm ** -0.2)
            )
            h *= factor
        return StopReason(StopKind.COMPLETED, {"time": self.t})

    def _stages(self, k1, h):
        f, t, y = self.f, self.t, self.y
        ks = [k1]
        for i in range(1, 6):
            ks.append(f(t + _C[i] * h, _combine(y, h, ks, _A[i])))
        # the b-weight row is also the last A row, so the stage-7 input is
        # the 5th-order solution itself and its k is reused as the next k1
        y_new = _combine(y, h, ks, _A[6])
        ks.append(f(t + h, y_new))
        return ks, y_new

    def _run_rk4(self, k1) -> StopReason:
        cfg = self.cfg
        h = cfg.dt_init
        while self.t < self.t1 - 1e-14 * abs(self.t1 - self.t0):
            if self.n_attempted >= cfg.max_steps:
                return StopReason(
                    StopKind.MAX_STEPS,
                    {"time": self.t, "location": self.position_of(self.y)},
                )
            step = min(h, self.t1 - self.t)
            self.n_attempted += 1
            f, t, y = self.f, self.t, self.y
            try:
                k2 = f(t + 0.5 * step, y + 0.5 * step * k1)
                k3 = f(t + 0.5 * step, y + 0.5 * step * k2)
                k4 = f(t + step, y + step * k3)
                y_new = y + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
                k_new = f(t + step, y_new)
            except (PoleProximityError, PotentialSingularityError) as exc:
                return self._stop_pole(exc)
            if not _is_finite(y_new):
                return StopReason(
                    StopKind.STEP_UNDERFLOW,
                    {"time": self.t, "step": step, "location": self.position_of(self.y)},
                )
            segment = _HermiteSegment(t, step, y, y_new, k1, k_new)
            escaped = self._escaped(y_new)
            if escaped is None:
                self._emit_samples(segment, t + step)
            else:
                return StopReason(
                    StopKind.DOMAIN_ESCAPE, {"time": t + step, "location": escaped}
                )
            self.t += step
            self.y = y_new
            k1 = k_new
            self.n_accepted += 1
        return StopReason(StopKind.COMPLETED, {"time": self.t})

    # -- helpers ----------------------------------------------------------------

    def _stop_pole(self, exc) -> StopReason:
        detail = {"time": self.t, "location": getattr(exc, "x", None)}
        if isinstance(exc, PoleProximityError):
            detail["psi_abs"] = exc.psi_abs
            detail["reason"] = "wavefunction node"
        else:
            detail["reason"] = "potential singularity"
        return StopReason(StopKind.POLE_PROXIMITY, detail)

    def _escaped(self, y_new):
        if self.domain is None:
            return None
        lo, hi = self.domain
        m = self.cfg.domain_margin
        pos = self.position_of(y_new)
        if pos.real <= lo - m or pos.real >= hi + m:
            return pos
        return None

    def _emit_samples(self, segment, t_end):
        ts = self.sample_times
        i = self._next_sample
        while i < len(ts) and ts[i] <= t_end + 1e-14 * max(1.0, abs(t_end)):
            self.sample_vals.append(segment(min(ts[i], t_end)))
            i += 1
        self._next_sample = i


class _VectorEngine(_Engine):
    def position_of(self, y):
        return complex(y[0])


def _validate_span_and_start(x0: complex, t_span, domain):
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (math.isfinite(t0) and math.isfinite(t1)) or t1 <= t0:
        raise InputDomainError(f"integrate: invalid t_span {t_span}")
    if not (math.isfinite(x0.real) and math.isfinite(x0.imag)):
        raise InputDomainError("integrate: x0 must be finite")
    if domain is not None and not domain[0] < x0.real < domain[1]:
        raise InputDomainError(
            f"integrate: x0={x0} outside field domain ({domain[0]:g}, {domain[1]:g})"
        )
    return t0, t1


def integrate_field(
    field,
    x0: complex,
    t_span,
    cfg: IntegratorConfig = IntegratorConfig(),
    samples: int = DEFAULT_SAMPLES,
    meta: dict | None = None,
) -> Trajectory:
    """Integrate dx/dt = field(x, t) from x0 over t_span.

    Output is sampled at `samples` uniform times via the step interpolant,
    independent of the internal step sequence.  The field may expose a
    `.domain` attribute (open Re(x) interval) to enable escape detection,
    and may raise PoleProximityError to request smaller steps.
    """
    x0 = complex(x0)
    domain = getattr(field, "domain", None)
    t0, t1 = _validate_span_and_start(x0, t_span, domain)
    if samples < 2:
        raise InputDomainError("integrate_field: need at least 2 samples")
    sample_times = np.linspace(t0, t1, samples)

    def rhs(t, y):
        return field(y, t)

    engine = _Engine(rhs, x0, t0, t1, cfg, sample_times, domain)
    stop = engine.run()
    n = len(engine.sample_vals)
    traj = Trajectory(
        times=sample_times[:n].copy(),
        positions=np.array(engine.sample_vals, dtype=complex),
        momenta=None,
        stop=stop,
        meta=dict(meta or {}),
    )
    traj.meta.setdefault("x0", x0)
    traj.meta["n_steps"] = engine.n_accepted
    traj.meta["n_attempted"] = engine.n_attempted
    return traj


def integrate_hamiltonian(
    system: ClassicalSystem,
    x0: complex,
    p0: complex,
    t_span,
    cfg: IntegratorConfig = IntegratorConfig(),
    samples: int = DEFAULT_SAMPLES,
    meta: dict | None = None,
) -> Trajectory:
    """Integrate the complex Hamiltonian flow dx/dt = p/m, dp/dt = force(x).

    The sampled complex energy H(t) = p^2/2m + V(x) is stored in
    meta["energy"] for drift analysis.
    """
    x0 = complex(x0)
    p0 = complex(p0)
    t0, t1 = _validate_span_and_start(x0, t_span, None)
    if samples < 2:
        raise InputDomainError("integrate_hamiltonian: need at least 2 samples")
    if not (math.isfinite(p0.real) and math.isfinite(p0.imag)):
        raise InputDomainError("integrate_hamiltonian: p0 must be finite")
    sample_times = np.linspace(t0, t1, samples)
    m = system.params.mass

    def rhs(t, y):
        return np.array([y[1] / m, classical_force(system, y[0])])

    y0 = np.array([x0, p0], dtype=complex)
    engine = _VectorEngine(rhs, y0, t0, t1, cfg, sample_times, None)
    stop = engine.run()
    vals = np.array(engine.sample_vals)
    n = len(vals)
    positions = vals[:, 0]
    momenta = vals[:, 1]
    energy = momenta * momenta / (2.0 * m) + np.array(
        [classical_potential(system, x) for x in positions]
    )
    traj = Trajectory(
        times=sample_times[:n].copy(),
        positions=positions,
        momenta=momenta,
        stop=stop,
        meta=dict(meta or {}),
    )
    traj.meta.setdefault("x0", x0)
    traj.meta["p0"] = p0
    traj.meta["energy"] = energy
    traj.meta["n_steps"] = engine.n_accepted
    traj.meta["n_attempted"] = engine.n_attempted
    return traj
