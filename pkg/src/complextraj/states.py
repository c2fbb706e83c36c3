"""Wavefunctions psi(x, t) and their x-derivatives at complex x.

Three model families are supported, each with eigenstates and coherent
states:

* harmonic oscillator (Hermite-Gaussian eigenfunctions, phase (n+1/2) w),
* infinite square well of width pi*a (sine eigenfunctions, phase n(n+2) w),
* symmetric Poschl-Teller well on (0, pi/2) (cos^l sin^l times a
  terminating 2F1, phase n(n+2l) w).

All spatial factors are evaluated by their entire-function continuation;
the fractional powers cos^l, sin^l use the principal branch, which is
analytic throughout the open strip 0 < Re(x) < pi/2 because cos(x) and
sin(x) avoid the negative real axis there.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .errors import InputDomainError, OutsidePhysicalDomainError
from .specfun import gauss_2f1_terminating, hermite_phys, pt_norm_constant

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of a model.  Defaults give the unit conventions
    used throughout: hbar = mass = omega = a = 1."""

    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    a: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "omega", "a"):
            if not getattr(self, name) > 0.0:
                raise InputDomainError(f"ModelParams.{name} must be > 0")

    @property
    def alpha(self) -> float:
        """Oscillator length scale sqrt(mass * omega / hbar), derived."""
        return math.sqrt(self.mass * self.omega / self.hbar)


class Family(str, Enum):
    HO_EIGEN = "ho_eigen"
    HO_COHERENT_CLOSED = "ho_coherent_closed"
    HO_COHERENT_SERIES = "ho_coherent_series"
    WELL_EIGEN = "well_eigen"
    WELL_COHERENT = "well_coherent"
    PT_EIGEN = "pt_eigen"
    PT_COHERENT = "pt_coherent"


_COHERENT_FAMILIES = (
    Family.HO_COHERENT_CLOSED,
    Family.HO_COHERENT_SERIES,
    Family.WELL_COHERENT,
    Family.PT_COHERENT,
)


@dataclass(frozen=True)
class StateSpec:
    """Tagged description of a quantum state.

    Only the fields relevant to the family are meaningful: n for
    eigenstates, (lam, kappa) for oscillator coherent states where the
    coherent parameter is z = lam * exp(i*kappa), J for well and
    Poschl-Teller coherent states, l for Poschl-Teller, n_max for the
    truncation order of a coherent series.
    """

    family: Family
    n: int = 0
    lam: float = 0.0
    kappa: float = 0.0
    J: float = 0.0
    l: float = 1.5
    n_max: int = 0

    def __post_init__(self):
        if self.n < 0 or self.n_max < 0:
            raise InputDomainError("StateSpec: n and n_max must be nonnegative")
        if self.lam < 0.0 or self.J < 0.0:
            raise InputDomainError("StateSpec: lam and J must be nonnegative")
        if self.family in (Family.PT_EIGEN, Family.PT_COHERENT) and not self.l > 0.5:
            raise InputDomainError("StateSpec: Poschl-Teller requires l > 1/2")

    @property
    def is_coherent(self) -> bool:
        return self.family in _COHERENT_FAMILIES


def ho_eigen(n: int) -> StateSpec:
    return StateSpec(family=Family.HO_EIGEN, n=n)


def ho_coherent_closed_state(lam: float, kappa: float = 0.0) -> StateSpec:
    return StateSpec(family=Family.HO_COHERENT_CLOSED, lam=lam, kappa=kappa)


def ho_coherent_series_state(lam: float, kappa: float = 0.0, n_max: int = 4) -> StateSpec:
    return StateSpec(family=Family.HO_COHERENT_SERIES, lam=lam, kappa=kappa, n_max=n_max)


def well_eigen(n: int) -> StateSpec:
    return StateSpec(family=Family.WELL_EIGEN, n=n)


def well_coherent(J: float, n_max: int = 7) -> StateSpec:
    return StateSpec(family=Family.WELL_COHERENT, J=J, n_max=n_max)


def pt_eigen(n: int, l: float = 1.5) -> StateSpec:
    return StateSpec(family=Family.PT_EIGEN, n=n, l=l)


def pt_coherent(J: float, l: float = 1.5, n_max: int = 4) -> StateSpec:
    return StateSpec(family=Family.PT_COHERENT, J=J, l=l, n_max=n_max)


@dataclass(frozen=True)
class AmplitudePair:
    """Wavefunction value and spatial derivative at one complex point."""

    psi: complex
    dpsi_dx: complex


@dataclass(frozen=True)
class CoefficientSet:
    """Expansion weights of a truncated coherent state.

    energies holds the phase frequency of each retained eigenstate, so the
    time factor of term n is exp(-1j * energies[n] * t).  norm is the
    divisor that was applied to the raw weights (1.0 when none was).
    """

    coeffs: tuple
    norm: float
    energies: tuple


def physical_domain(params: ModelParams, spec: StateSpec):
    """Open Re(x) interval on which the state is defined, or None."""
    if spec.family in (Family.WELL_EIGEN, Family.WELL_COHERENT):
        return (0.0, math.pi * params.a)
    if spec.family in (Family.PT_EIGEN, Family.PT_COHERENT):
        return (0.0, math.pi / 2.0)
    return None


def _check_domain(params: ModelParams, spec: StateSpec, x: complex):
    dom = physical_domain(params, spec)
    if dom is not None and not dom[0] < x.real < dom[1]:
        raise OutsidePhysicalDomainError(x, dom)


# -- phase frequencies --------------------------------------------------------

def eigen_phase_frequency(spec: StateSpec, n: int, omega: float) -> float:
    """Phase frequency E_n / hbar of eigenstate n for the spec's family."""
    fam = spec.family
    if fam in (Family.HO_EIGEN, Family.HO_COHERENT_CLOSED, Family.HO_COHERENT_SERIES):
        return (n + 0.5) * omega
    if fam in (Family.WELL_EIGEN, Family.WELL_COHERENT):
        return n * (n + 2) * omega
    # Poschl-Teller: n (n + 2 l), which is n (n + 3) at l = 3/2
    return n * (n + 2.0 * spec.l) * omega


# -- coherent expansion coefficients ------------------------------------------

def coherent_coefficients(
    spec: StateSpec, omega: float = 1.0, renormalize: bool | None = None
) -> CoefficientSet:
    """Expansion weights c_0..c_{n_max} of a truncated coherent state.

    Oscillator: c_n = exp(-lam^2/2) z^n / sqrt(n!) with z = lam e^{i kappa};
    left unrenormalized unless renormalize=True, since any overall constant
    cancels in the log-derivative velocity.  Well and Poschl-Teller weights
    J^{n/2} / sqrt(n! (n+2)!/2) and J^{n/2} / sqrt(n! (n+3)!) are always
    divided by N(J), the root of the truncated sum of squares.
    """
    if not spec.is_coherent:
        raise InputDomainError("coherent_coefficients: spec is not a coherent state")
    n_max = spec.n_max
    fam = spec.family

    if fam in (Family.HO_COHERENT_CLOSED, Family.HO_COHERENT_SERIES):
        lam, kappa = spec.lam, spec.kappa
        raw = []
        for n in range(n_max + 1):
            if lam == 0.0:
                mag = 1.0 if n == 0 else 0.0
            else:
                mag = math.exp(-0.5 * lam * lam + n * math.log(lam) - 0.5 * math.lgamma(n + 1))
            raw.append(mag * cmath.exp(1j * n * kappa))
        do_norm = bool(renormalize)
    else:
        J = spec.J
        if fam is Family.WELL_COHERENT:
            def log_den(n):  # n! (n+2)! / 2
                return math.lgamma(n + 1) + math.lgamma(n + 3) - math.log(2.0)
        else:
            def log_den(n):  # n! (n+3)!
                return math.lgamma(n + 1) + math.lgamma(n + 4)
        raw = []
        for n in range(n_max + 1):
            if J == 0.0:
                mag = 1.0 if n == 0 else 0.0
            else:
                mag = math.exp(0.5 * n * math.log(J) - 0.5 * log_den(n))
            raw.append(mag + 0.0j)
        do_norm = True if renormalize is None else bool(renormalize)

    norm = math.sqrt(sum(abs(c) ** 2 for c in raw))
    if do_norm and norm > 0.0:
        coeffs = tuple(c / norm for c in raw)
        applied = norm
    else:
        coeffs = tuple(raw)
        applied = 1.0
    energies = tuple(eigen_phase_frequency(spec, n, omega) for n in range(n_max + 1))
    return CoefficientSet(coeffs=coeffs, norm=applied, energies=energies)


@lru_cache(maxsize=256)
def _cached_coefficients(spec: StateSpec, omega: float) -> CoefficientSet:
    return coherent_coefficients(spec, omega=omega)


# -- eigenstates ---------------------------------------------------------------

def eval_eigenstate(
    params: ModelParams, spec: StateSpec, x: complex, t: float, check_domain: bool = True
) -> AmplitudePair:
    """psi_n(x) e^{-i E_n t / hbar} and its x-derivative for an eigenstate."""
    x = complex(x)
    if check_domain:
        _check_domain(params, spec, x)
    fam = spec.family
    if fam is Family.HO_EIGEN:
        return _ho_eigen_pair(params, spec.n, x, t)
    if fam is Family.WELL_EIGEN:
        return _well_eigen_pair(params, spec.n, x, t)
    if fam is Family.PT_EIGEN:
        return _pt_eigen_pair(params, spec.n, spec.l, x, t)
    raise InputDomainError(f"eval_eigenstate: {fam} is not an eigenstate family")


def _ho_eigen_pair(params: ModelParams, n: int, x: complex, t: float) -> AmplitudePair:
    alpha = params.alpha
    X = alpha * x
    herm = hermite_phys(n, X)
    log_norm = 0.25 * math.log(alpha * alpha / math.pi) - 0.5 * (
        n * math.log(2.0) + math.lgamma(n + 1)
    )
    envelope = cmath.exp(log_norm - 0.5 * X * X - 1j * (n + 0.5) * params.omega * t)
    psi = envelope * herm.value
    dpsi = alpha * envelope * (herm.derivative - X * herm.value)
    return AmplitudePair(psi=psi, dpsi_dx=dpsi)


def _well_eigen_pair(params: ModelParams, n: int, x: complex, t: float) -> AmplitudePair:
    a = params.a
    k = (n + 1) / a
    norm = math.sqrt(2.0 / (math.pi * a))
    phase = cmath.exp(-1j * n * (n + 2) * params.omega * t)
    return AmplitudePair(
        psi=norm * phase * cmath.sin(k * x),
        dpsi_dx=norm * phase * k * cmath.cos(k * x),
    )


def _pt_eigen_pair(params: ModelParams, n: int, l: float, x: complex, t: float) -> AmplitudePair:
    s = cmath.sin(x)
    c = cmath.cos(x)
    hyp = gauss_2f1_terminating(n, n + 2.0 * l, l + 0.5, s * s)
    norm = pt_norm_constant(n, l) ** -0.5
    phase = cmath.exp(-1j * n * (n + 2.0 * l) * params.omega * t)
    # d/dx [cos^l sin^l F(sin^2 x)]
    #   = cos^{l-1} sin^{l-1} [ l (cos^2 - sin^2) F + 2 sin^2 cos^2 F' ]
    edge = c ** (l - 1.0) * s ** (l - 1.0)
    psi = norm * phase * edge * (c * s) * hyp.value
    dpsi = norm * phase * edge * (
        l * (c * c - s * s) * hyp.value + 2.0 * (s * s) * (c * c) * hyp.derivative
    )
    return AmplitudePair(psi=psi, dpsi_dx=dpsi)


# -- oscillator coherent state, closed form ------------------------------------

def ho_coherent_closed(
    params: ModelParams, lam: float, kappa: float, x: complex, t: float
) -> AmplitudePair:
    """Closed-form oscillator coherent state.

    With X = alpha x and eta = (lam/sqrt(2)) e^{-i(w t - kappa)}:

        psi = (alpha/sqrt(pi))^{1/2} exp[(X^2 - lam^2 - i w t)/2] exp[-(X-eta)^2]

    and the derivative follows from the chain rule,
    dpsi/dx = alpha psi (2 eta - X).
    """
    alpha = params.alpha
    omega = params.omega
    X = alpha * complex(x)
    eta = (lam / _SQRT2) * cmath.exp(-1j * (omega * t - kappa))
    pref = math.sqrt(alpha / math.sqrt(math.pi))
    psi = pref * cmath.exp(0.5 * (X * X - lam * lam - 1j * omega * t) - (X - eta) ** 2)
    return AmplitudePair(psi=psi, dpsi_dx=alpha * psi * (2.0 * eta - X))


# -- truncated coherent series --------------------------------------------------

def eval_coherent_series(
    params: ModelParams,
    spec: StateSpec,
    x: complex,
    t: float,
    coeffs: CoefficientSet | None = None,
    check_domain: bool = True,
) -> AmplitudePair:
    """Truncated coherent state sum_{n<=n_max} c_n e^{-i E_n t} psi_n(x).

    Exactly n_max + 1 terms are used.  The oscillator series is evaluated
    through an exact rearrangement of the truncated Hermite sum (see
    _ho_series_pair) that stays accurate where massive cancellation makes
    direct summation lose all relative precision.
    """
    x = complex(x)
    if check_domain:
        _check_domain(params, spec, x)
    if not spec.is_coherent:
        raise InputDomainError("eval_coherent_series: spec is not a coherent state")
    if coeffs is None and spec.family in (
        Family.HO_COHERENT_CLOSED,
        Family.HO_COHERENT_SERIES,
    ):
        return _ho_series_pair(params, spec.lam, spec.kappa, spec.n_max, x, t)
    if coeffs is None:
        coeffs = _cached_coefficients(spec, params.omega)
    eig_fam = _eigen_family_of(spec.family)
    if eig_fam is Family.WELL_EIGEN:
        term = _well_eigen_pair
        extra = ()
    elif eig_fam is Family.PT_EIGEN:
        term = _pt_eigen_pair
        extra = (spec.l,)
    else:
        term = _ho_eigen_pair
        extra = ()
    psi = 0.0 + 0.0j
    dpsi = 0.0 + 0.0j
    for n, (cn, en) in enumerate(zip(coeffs.coeffs, coeffs.energies)):
        if cn == 0.0:
            continue
        pair = term(params, n, *extra, x, 0.0)
        w = cn * cmath.exp(-1j * en * t)
        psi += w * pair.psi
        dpsi += w * pair.dpsi_dx
    return AmplitudePair(psi=psi, dpsi_dx=dpsi)


def _eigen_family_of(fam: Family) -> Family:
    if fam in (Family.HO_COHERENT_CLOSED, Family.HO_COHERENT_SERIES):
        return Family.HO_EIGEN
    if fam is Family.WELL_COHERENT:
        return Family.WELL_EIGEN
    return Family.PT_EIGEN


def _ho_series_pair(
    params: ModelParams, lam: float, kappa: float, n_max: int, x: complex, t: float
) -> AmplitudePair:
    """Truncated oscillator coherent series via its generating function.

    The truncated sum of coefficient-weighted Hermite-Gaussians collapses to

        psi_N = pref * e^{-X^2/2} * G_N(X, eta),
        G_N = sum_{n=0}^{N} eta^n H_n(X) / n!,
        pref = (alpha/sqrt(pi))^{1/2} e^{-lam^2/2 - i w t / 2},

    and expanding H_n in powers of 2X rearranges G_N exactly into

        G_N = sum_{m=0}^{floor(N/2)} (-eta^2)^m/m! * E_{N-2m}(2 X eta)

    with E_K the degree-K Taylor partial sum of exp.  Each E_K is computed
    as e^w minus its tail, which has no cancellation, so psi_N keeps full
    relative accuracy even where the direct Hermite sum cancels to ~1e-8
    of its largest term.  The derivative uses G_N' = 2 eta G_{N-1}.
    """
    alpha = params.alpha
    omega = params.omega
    X = alpha * x
    eta = (lam / _SQRT2) * cmath.exp(-1j * (omega * t - kappa))
    pref = math.sqrt(alpha / math.sqrt(math.pi)) * cmath.exp(
        -0.5 * lam * lam - 0.5j * omega * t - 0.5 * X * X
    )
    g_n, g_nm1 = _genfunc_partial_pair(eta, X, n_max)
    psi = pref * g_n
    dpsi = alpha * pref * (2.0 * eta * g_nm1 - X * g_n)
    return AmplitudePair(psi=psi, dpsi_dx=dpsi)


def _genfunc_partial_pair(eta: complex, X: complex, N: int) -> tuple:
    """(G_N, G_{N-1}) of the partial Hermite generating function."""
    if eta == 0.0:
        return (1.0 + 0.0j, 1.0 + 0.0j if N >= 1 else 0.0j)
    w = 2.0 * X * eta
    # Taylor terms w^j/j! out to where the tail is negligible.
    j_max = N + 20
    terms = [1.0 + 0.0j]
    j = 1
    while j <= j_max or abs(terms[-1]) > 1e-22:
        terms.append(terms[-1] * w / j)
        j += 1
        if j > N + 400:  # |w| bounded in practice; hard stop for safety
            break
    # Suffix sums: tail_K = sum_{j>K} w^j/j!; entries decay, no cancellation.
    suffix = [0.0 + 0.0j] * (len(terms) + 1)
    for i in range(len(terms) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + terms[i]
    e_w = cmath.exp(w)

    def partial(K: int) -> complex:
        if K < 0:
            return 0.0 + 0.0j
        if K + 1 < len(suffix):
            return e_w - suffix[K + 1]
        return e_w

    minus_eta2 = -eta * eta
    a = 1.0 + 0.0j  # (-eta^2)^m / m!
    g_n = 0.0 + 0.0j
    g_nm1 = 0.0 + 0.0j
    for m in range(N // 2 + 1):
        g_n += a * partial(N - 2 * m)
        g_nm1 += a * partial(N - 1 - 2 * m)
        a *= minus_eta2 / (m + 1)
    return g_n, g_nm1


def eval_state(
    params: ModelParams, spec: StateSpec, x: complex, t: float, check_domain: bool = True
) -> AmplitudePair:
    """Dispatch to the right evaluator for any state family."""
    fam = spec.family
    if fam is Family.HO_COHERENT_CLOSED:
        return ho_coherent_closed(params, spec.lam, spec.kappa, x, t)
    if spec.is_coherent:
        return eval_coherent_series(params, spec, x, t, check_domain=check_domain)
    return eval_eigenstate(params, spec, x, t, check_domain=check_domain)
