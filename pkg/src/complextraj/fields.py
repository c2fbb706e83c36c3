"""Velocity and force fields on the complex position plane.

The quantum velocity is the log-derivative field

    v(x, t) = -i (hbar/m) (dpsi/dx) / psi,

evaluated directly from psi'/psi so no branch of log(psi) is ever chosen.
Classical complex dynamics supplies the comparison trajectories: Hamilton's
equations with complex position and momentum at real energy, plus the
closed-form solutions that exist for the oscillator and the free particle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .errors import InputDomainError, PoleProximityError, PotentialSingularityError
from .states import (
    AmplitudePair,
    ModelParams,
    StateSpec,
    eval_state,
    ho_coherent_closed,
    physical_domain,
)

_SQRT2 = math.sqrt(2.0)

PT_SINGULARITY_FLOOR = 1e-9  # |sin 2x| below this counts as on a singular line


class SystemKind(str, Enum):
    HARMONIC = "harmonic"
    FREE = "free"
    POSCHL_TELLER = "poschl_teller"


@dataclass(frozen=True)
class ClassicalSystem:
    """Potential family for complex classical runs.

    HARMONIC uses spring constant k = mass * omega^2 from params;
    POSCHL_TELLER uses V(x) = l(l-1)/sin^2(2x).
    """

    kind: SystemKind
    params: ModelParams = ModelParams()
    l: float = 1.5

    def __post_init__(self):
        if self.kind is SystemKind.POSCHL_TELLER and not self.l > 0.5:
            raise InputDomainError("ClassicalSystem: Poschl-Teller requires l > 1/2")

    @property
    def spring_k(self) -> float:
        return self.params.mass * self.params.omega ** 2


@dataclass(frozen=True)
class EnergySpec:
    """Real energy of a classical run."""

    E: float

    def __post_init__(self):
        if self.E < 0.0:
            raise InputDomainError("EnergySpec: E must be >= 0")


def classical_potential(system: ClassicalSystem, x: complex) -> complex:
    x = complex(x)
    if system.kind is SystemKind.HARMONIC:
        return 0.5 * system.spring_k * x * x
    if system.kind is SystemKind.FREE:
        return 0.0 + 0.0j
    s = cmath.sin(2.0 * x)
    return system.l * (system.l - 1.0) / (s * s)


def classical_force(system: ClassicalSystem, x: complex) -> complex:
    """Force -dV/dx at complex x."""
    x = complex(x)
    if system.kind is SystemKind.HARMONIC:
        return -system.spring_k * x
    if system.kind is SystemKind.FREE:
        return 0.0 + 0.0j
    s = cmath.sin(2.0 * x)
    if abs(s) < PT_SINGULARITY_FLOOR:
        raise PotentialSingularityError(x)
    return 4.0 * system.l * (system.l - 1.0) * cmath.cos(2.0 * x) / (s * s * s)


def initial_momentum(system: ClassicalSystem, x0: complex, energy: EnergySpec) -> complex:
    """Principal-branch momentum sqrt(2m(E - V(x0))); callers may negate."""
    return cmath.sqrt(2.0 * system.params.mass * (energy.E - classical_potential(system, x0)))


def classical_ho_solution(
    A: float, energy: EnergySpec, params: ModelParams, t: float
) -> complex:
    """Complex oscillator ellipse A cos(wt) + i B sin(wt), B = sqrt(A^2 - 2E/(m w^2)).

    Requires 0 < E <= (1/2) m w^2 A^2 so B is real; B -> A as E -> 0 (circles)
    and B -> 0 at the upper limit (real oscillation).
    """
    m, w = params.mass, params.omega
    if not 0.0 < energy.E <= 0.5 * m * w * w * A * A:
        raise InputDomainError(
            f"classical_ho_solution: need 0 < E <= m w^2 A^2 / 2, got E={energy.E}"
        )
    B = math.sqrt(A * A - 2.0 * energy.E / (m * w * w))
    return complex(A * math.cos(w * t), B * math.sin(w * t))


def free_particle_solution(
    energy: EnergySpec, c_r: float, c_i: float, sign: int, params: ModelParams, t: float
) -> complex:
    """Free-particle straight line parallel to the real axis."""
    if not energy.E > 0.0:
        raise InputDomainError("free_particle_solution: requires E > 0")
    speed = math.sqrt(2.0 * energy.E / params.mass)
    return complex(sign * speed * t + c_r, c_i)


# -- quantum velocity ----------------------------------------------------------

def quantum_velocity(
    params: ModelParams,
    spec: StateSpec,
    x: complex,
    t: float,
    psi_floor: float = 0.0,
    check_domain: bool = True,
) -> complex:
    """Log-derivative velocity -i (hbar/m) psi'/psi of any supported state."""
    pair = eval_state(params, spec, x, t, check_domain=check_domain)
    return _velocity_from_pair(params, pair, x, psi_floor)


def _velocity_from_pair(
    params: ModelParams, pair: AmplitudePair, x: complex, psi_floor: float
) -> complex:
    mag = abs(pair.psi)
    if mag <= psi_floor or mag == 0.0:
        raise PoleProximityError(x, mag, threshold=psi_floor)
    return -1j * (params.hbar / params.mass) * pair.dpsi_dx / pair.psi


def ho_coherent_velocity(
    params: ModelParams, lam: float, kappa: float, X: complex, t: float
) -> complex:
    """Closed-form coherent-state field dX/dt = i w (X - 2 eta) in the
    dimensionless coordinate X = alpha x, eta = (lam/sqrt 2) e^{-i(wt-kappa)}.

    Componentwise this is
        dXr/dt = -w [Xi + sqrt(2) lam sin(wt - kappa)]
        dXi/dt = +w [Xr - sqrt(2) lam cos(wt - kappa)].
    """
    w = params.omega
    eta = (lam / _SQRT2) * cmath.exp(-1j * (w * t - kappa))
    return 1j * w * (complex(X) - 2.0 * eta)


def dbb_velocity(lam: float, kappa: float, omega: float, t: float) -> float:
    """Real-axis pilot-wave velocity -w sqrt(2) lam sin(wt - kappa);
    position-independent, identically zero at lam = 0."""
    return -omega * _SQRT2 * lam * math.sin(omega * t - kappa)


class QuantumVelocityField:
    """Stateful velocity field for one trajectory integration.

    Tracks the running maximum of |psi| along the trajectory and raises
    PoleProximityError once |psi| falls below pole_psi_floor times that
    scale.  Wavefunction nodes have codimension 2 in the complex plane, so
    generic trajectories pass near rather than through them; the integrator
    reacts by shrinking its step and, failing that, stopping with a
    structured reason.  Exposes .domain for the integrator's escape check.
    Not safe to share between concurrently running integrations.
    """

    def __init__(
        self,
        params: ModelParams,
        spec: StateSpec,
        pole_psi_floor: float = 1e-12,
    ):
        self.params = params
        self.spec = spec
        self.pole_psi_floor = pole_psi_floor
        self.domain = physical_domain(params, spec)
        self._psi_scale = 0.0

    def amplitude(self, x: complex, t: float) -> AmplitudePair:
        return eval_state(self.params, self.spec, x, t, check_domain=False)

    def __call__(self, x: complex, t: float) -> complex:
        pair = self.amplitude(x, t)
        mag = abs(pair.psi)
        threshold = self.pole_psi_floor * self._psi_scale
        if mag <= threshold or mag == 0.0 or not math.isfinite(mag):
            raise PoleProximityError(x, mag, threshold=threshold)
        if mag > self._psi_scale:
            self._psi_scale = mag
        return -1j * (self.params.hbar / self.params.mass) * pair.dpsi_dx / pair.psi


class DBBField:
    """Position-independent pilot-wave field, for contrast runs."""

    domain = None

    def __init__(self, lam: float, kappa: float, omega: float):
        self.lam = lam
        self.kappa = kappa
        self.omega = omega

    def __call__(self, x: complex, t: float) -> complex:
        return complex(dbb_velocity(self.lam, self.kappa, self.omega, t))


class HOCoherentClosedField:
    """Closed-form coherent oscillator field in physical coordinates.

    dx/dt = (1/alpha) dX/dt with X = alpha x; at alpha = 1 the two agree.
    """

    domain = None

    def __init__(self, params: ModelParams, lam: float, kappa: float):
        self.params = params
        self.lam = lam
        self.kappa = kappa

    def __call__(self, x: complex, t: float) -> complex:
        a = self.params.alpha
        return ho_coherent_velocity(self.params, self.lam, self.kappa, a * complex(x), t) / a
