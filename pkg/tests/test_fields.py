import cmath
import math

import numpy as np
import pytest

from complextraj.errors import (
    InputDomainError,
    PoleProximityError,
    PotentialSingularityError,
)
from complextraj.fields import (
    ClassicalSystem,
    EnergySpec,
    HOCoherentClosedField,
    QuantumVelocityField,
    SystemKind,
    classical_force,
    classical_ho_solution,
    classical_potential,
    dbb_velocity,
    free_particle_solution,
    ho_coherent_velocity,
    initial_momentum,
    quantum_velocity,
)
from complextraj.states import (
    ModelParams,
    coherent_coefficients,
    eval_coherent_series,
    ho_coherent_series_state,
    ho_eigen,
    well_coherent,
    well_eigen,
)

P = ModelParams()
SQRT2 = math.sqrt(2.0)


class TestQuantumVelocity:
    def test_ho_ground_state_field(self):
        # log-derivative of the Gaussian gives v = i w x
        assert quantum_velocity(P, ho_eigen(0), 1.0, 0.0) == pytest.approx(1j)
        rng = np.random.RandomState(2)
        for _ in range(10):
            x = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            assert quantum_velocity(P, ho_eigen(0), x, 1.3) == pytest.approx(1j * x)

    def test_well_cotangent_field(self):
        for n in (0, 1, 3):
            for x in (0.7 + 0.2j, math.pi / 2, 2.1 - 0.1j):
                want = -1j * (n + 1) / cmath.tan((n + 1) * x)
                got = quantum_velocity(P, well_eigen(n), x, 0.4)
                assert got == pytest.approx(want, rel=1e-12)
        assert quantum_velocity(P, well_eigen(0), math.pi / 2, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_closed_coherent_matches_dimensionless_field(self):
        rng = np.random.RandomState(44)
        spec = ho_coherent_series_state(2.1, 0.0, 0)  # lam/kappa carrier
        worst = 0.0
        for _ in range(1000):
            x = complex(rng.uniform(-3, 3), rng.uniform(-1.5, 1.5))
            t = rng.uniform(0.0, 2 * math.pi)
            from complextraj.states import ho_coherent_closed_state

            v1 = quantum_velocity(P, ho_coherent_closed_state(2.1, 0.0), x, t)
            v2 = ho_coherent_velocity(P, 2.1, 0.0, x, t)
            worst = max(worst, abs(v1 - v2))
        assert worst < 1e-10

    def test_invariant_under_coefficient_scaling(self):
        spec = well_coherent(0.16, 7)
        cs = coherent_coefficients(spec, omega=P.omega)
        from complextraj.states import CoefficientSet

        scaled = CoefficientSet(
            coeffs=tuple(c * (2.0 - 1.5j) for c in cs.coeffs),
            norm=cs.norm,
            energies=cs.energies,
        )
        rng = np.random.RandomState(5)
        for _ in range(20):
            x = complex(rng.uniform(0.3, math.pi - 0.3), rng.uniform(-0.3, 0.3))
            t = rng.uniform(0.0, 5.0)
            a = eval_coherent_series(P, spec, x, t, coeffs=cs)
            b = eval_coherent_series(P, spec, x, t, coeffs=scaled)
            va = -1j * a.dpsi_dx / a.psi
            vb = -1j * b.dpsi_dx / b.psi
            assert va == pytest.approx(vb, rel=1e-12)

    def test_pole_error_carries_context(self):
        # the n=1 oscillator eigenstate has a node at the origin
        with pytest.raises(PoleProximityError) as err:
            quantum_velocity(P, ho_eigen(1), 0.0, 0.0)
        assert err.value.psi_abs == 0.0
        assert err.value.x == 0.0

    def test_hbar_mass_prefactor(self):
        p = ModelParams(hbar=2.0, mass=4.0, omega=1.0)
        x = 1.0 + 0.3j
        v = quantum_velocity(p, ho_eigen(0), x, 0.0)
        # v = -i (hbar/m) psi'/psi = i (hbar/m) alpha^2 x = i omega x
        assert v == pytest.approx(1j * x, rel=1e-12)


class TestHOCoherentVelocity:
    def test_ground_state_limit(self):
        assert ho_coherent_velocity(P, 0.0, 0.0, 1.0, 0.5) == pytest.approx(1j)

    def test_stagnation_point(self):
        v = ho_coherent_velocity(P, 2.1, 0.0, 2.1 * SQRT2, 0.0)
        assert abs(v) < 1e-14

    def test_component_decomposition(self):
        rng = np.random.RandomState(99)
        for _ in range(1000):
            X = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
            t = rng.uniform(0, 10)
            lam, kappa = 2.1, 0.6
            v = ho_coherent_velocity(P, lam, kappa, X, t)
            vr = -(X.imag + SQRT2 * lam * math.sin(t - kappa))
            vi = X.real - SQRT2 * lam * math.cos(t - kappa)
            assert v.real == pytest.approx(vr, abs=1e-12)
            assert v.imag == pytest.approx(vi, abs=1e-12)

    def test_solution_curve_is_tangent(self):
        # X = A cos(wt-k) + i B sin(wt-k) with A - B = sqrt(2) lam solves the field
        lam, kappa = 2.1, 0.2
        A = 3.4
        B = A - SQRT2 * lam
        for t in np.linspace(0, 7, 29):
            X = complex(A * math.cos(t - kappa), B * math.sin(t - kappa))
            tangent = complex(-A * math.sin(t - kappa), B * math.cos(t - kappa))
            v = ho_coherent_velocity(P, lam, kappa, X, t)
            assert abs(v - tangent) < 1e-12


class TestDBB:
    def test_zero_amplitude_is_stationary(self):
        for t in np.linspace(0, 10, 21):
            assert dbb_velocity(0.0, 0.0, 1.0, t) == 0.0

    def test_value(self):
        assert dbb_velocity(1.0, 0.0, 1.0, math.pi / 2) == pytest.approx(-SQRT2)

    def test_closed_form_amplitude(self):
        # X(t) = X0 + sqrt(2) lam (cos(wt-k) - cos k): half peak-to-peak is sqrt(2) lam
        lam = 1.7
        ts = np.linspace(0, 2 * math.pi, 100001)
        xs = SQRT2 * lam * (np.cos(ts) - 1.0)
        assert (xs.max() - xs.min()) / 2 == pytest.approx(SQRT2 * lam, rel=1e-8)


class TestClassicalForces:
    def test_harmonic_linearity(self):
        sysm = ClassicalSystem(SystemKind.HARMONIC, P)
        assert classical_force(sysm, 1.0 + 2.0j) == pytest.approx(-1.0 - 2.0j)
        assert sysm.spring_k == 1.0

    def test_free_is_zero(self):
        sysm = ClassicalSystem(SystemKind.FREE, P)
        assert classical_force(sysm, 3.0 + 1.0j) == 0.0
        assert classical_potential(sysm, 3.0 + 1.0j) == 0.0

    def test_pt_force_values(self):
        sysm = ClassicalSystem(SystemKind.POSCHL_TELLER, P, l=1.5)
        assert classical_force(sysm, math.pi / 4) == pytest.approx(0.0, abs=1e-14)
        assert classical_force(sysm, math.pi / 8) == pytest.approx(6.0, rel=1e-12)

    def test_pt_force_is_minus_grad_v(self):
        sysm = ClassicalSystem(SystemKind.POSCHL_TELLER, P, l=1.5)
        rng = np.random.RandomState(21)
        h = 1e-6
        for _ in range(20):
            x = complex(rng.uniform(0.3, 1.2), rng.uniform(-0.3, 0.3))
            dv = (classical_potential(sysm, x + h) - classical_potential(sysm, x - h)) / (2 * h)
            assert classical_force(sysm, x) == pytest.approx(-dv, rel=1e-7)

    def test_pt_singularity_guard(self):
        sysm = ClassicalSystem(SystemKind.POSCHL_TELLER, P, l=1.5)
        with pytest.raises(PotentialSingularityError):
            classical_force(sysm, 1e-12)


class TestClassicalSolutions:
    def test_degenerate_real_oscillation(self):
        E = EnergySpec(0.5 * 3.2 ** 2)
        for t in np.linspace(0, 6, 13):
            x = classical_ho_solution(3.2, E, P, t)
            assert x.imag == 0.0

    def test_circle_limit_at_small_energy(self):
        A = 2.0
        E = EnergySpec(1e-12)
        for t in np.linspace(0, 6, 13):
            x = classical_ho_solution(A, E, P, t)
            assert abs(x) == pytest.approx(A, rel=1e-9)

    def test_semi_axis_value(self):
        x = classical_ho_solution(3.2, EnergySpec(4.5), P, math.pi / 2)
        assert x.imag == pytest.approx(math.sqrt(3.2 ** 2 - 9.0), rel=1e-12)
        assert x.imag == pytest.approx(1.11355, abs=5e-6)

    def test_energy_out_of_range(self):
        with pytest.raises(InputDomainError):
            classical_ho_solution(3.2, EnergySpec(6.0), P, 0.0)
        with pytest.raises(InputDomainError):
            classical_ho_solution(3.2, EnergySpec(0.0), P, 0.0)

    def test_hamilton_equations_residual(self):
        # finite-difference velocity and force residuals on the closed form
        A, E = 3.2, EnergySpec(4.5)
        h = 1e-5
        B = math.sqrt(A * A - 2 * E.E)
        for t in np.linspace(0.1, 6.0, 25):
            xdot = (classical_ho_solution(A, E, P, t + h) - classical_ho_solution(A, E, P, t - h)) / (2 * h)
            p = complex(-A * math.sin(t), B * math.cos(t))  # m = 1
            assert abs(xdot - p) < 1e-6
            pdot_fd = complex(-A * math.cos(t), -B * math.sin(t))
            x = classical_ho_solution(A, E, P, t)
            assert abs(pdot_fd - (-x)) < 1e-12

    def test_ellipse_identity(self):
        A, E = 3.2, EnergySpec(4.5)
        B = math.sqrt(A * A - 2 * E.E)
        for t in np.linspace(0, 2 * math.pi, 101):
            x = classical_ho_solution(A, E, P, t)
            assert x.real ** 2 / A ** 2 + x.imag ** 2 / B ** 2 == pytest.approx(1.0, abs=1e-10)

    def test_free_particle(self):
        E = EnergySpec(2.0)
        assert free_particle_solution(E, 0.0, 0.5, +1, P, 0.0) == 0.5j
        assert free_particle_solution(E, 0.0, 0.5, +1, P, 3.0) == pytest.approx(6.0 + 0.5j)
        for t in np.linspace(0, 10, 11):
            assert free_particle_solution(E, 1.0, -0.3, -1, P, t).imag == -0.3
        with pytest.raises(InputDomainError):
            free_particle_solution(EnergySpec(0.0), 0, 0, 1, P, 0.0)


class TestInitialMomentum:
    def test_allowed_region_is_real(self):
        sysm = ClassicalSystem(SystemKind.HARMONIC, P)
        p0 = initial_momentum(sysm, 1.0, EnergySpec(4.5))
        assert p0.imag == 0.0
        assert p0.real > 0.0

    def test_forbidden_region_is_imaginary(self):
        sysm = ClassicalSystem(SystemKind.HARMONIC, P)
        p0 = initial_momentum(sysm, 3.2, EnergySpec(4.5))
        assert p0.real == 0.0
        assert p0.imag == pytest.approx(math.sqrt(2 * (0.5 * 3.2 ** 2 - 4.5)), rel=1e-12)

    def test_free(self):
        sysm = ClassicalSystem(SystemKind.FREE, P)
        assert initial_momentum(sysm, 0.3 + 1j, EnergySpec(2.0)) == pytest.approx(2.0)


class TestFieldObjects:
    def test_quantum_field_relative_pole_guard(self):
        fld = QuantumVelocityField(P, well_eigen(1), pole_psi_floor=1e-3)
        fld(1.0, 0.0)  # establishes the |psi| scale
        with pytest.raises(PoleProximityError):
            fld(math.pi / 2 + 1e-9, 0.0)  # node of sin(2x) at pi/2

    def test_quantum_field_domain(self):
        fld = QuantumVelocityField(P, well_eigen(0))
        assert fld.domain == (0.0, math.pi)
        assert QuantumVelocityField(P, ho_eigen(0)).domain is None

    def test_closed_field_matches_quantum_velocity(self):
        fld = HOCoherentClosedField(P, 2.1, 0.0)
        from complextraj.states import ho_coherent_closed_state

        spec = ho_coherent_closed_state(2.1, 0.0)
        for x, t in ((1.0 + 0.2j, 0.3), (2.5, 1.0), (-1.0 - 0.4j, 4.2)):
            assert fld(x, t) == pytest.approx(quantum_velocity(P, spec, x, t), rel=1e-12)
