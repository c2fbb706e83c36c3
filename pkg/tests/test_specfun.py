import math

import numpy as np
import pytest
from scipy.integrate import quad

from complextraj.errors import InputDomainError
from complextraj.specfun import (
    gauss_2f1_terminating,
    hermite_phys,
    pt_norm_constant,
)


def central_diff(fn, z, h=1e-6):
    """Complex-displacement central difference along each axis."""
    d_re = (fn(z + h) - fn(z - h)) / (2 * h)
    d_im = (fn(z + 1j * h) - fn(z - 1j * h)) / (2j * h)
    return d_re, d_im


class TestHermite:
    def test_h0_constant(self):
        out = hermite_phys(0, 1.5 + 0j)
        assert out.value == 1.0
        assert out.derivative == 0.0

    def test_h1_linear(self):
        out = hermite_phys(1, 0.5 + 0.5j)
        assert out.value == 1.0 + 1.0j
        assert out.derivative == 2.0

    def test_h2_from_recurrence_oracle(self):
        # H_2(z) = 4 z^2 - 2, H_2'(z) = 8 z
        out = hermite_phys(2, 1.0 + 0j)
        assert out.value == pytest.approx(2.0)
        assert out.derivative == pytest.approx(8.0)

    def test_recurrence_residual(self):
        rng = np.random.RandomState(7)
        for _ in range(40):
            z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            if abs(z) > 5:
                continue
            for n in (1, 5, 17, 50):
                hm = hermite_phys(n - 1, z).value
                h = hermite_phys(n, z).value
                hp = hermite_phys(n + 1, z).value
                resid = hp - 2 * z * h + 2 * n * hm
                scale = max(abs(hp), abs(h), 1.0)
                assert abs(resid) <= 1e-12 * scale

    def test_derivative_matches_finite_difference(self):
        rng = np.random.RandomState(11)
        for _ in range(25):
            z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            n = rng.randint(1, 20)
            out = hermite_phys(n, z)
            d_re, d_im = central_diff(lambda w: hermite_phys(n, w).value, z)
            for d in (d_re, d_im):
                assert abs(d - out.derivative) <= 1e-6 * max(abs(out.derivative), 1.0)

    def test_cap(self):
        with pytest.raises(InputDomainError):
            hermite_phys(201, 0.0 + 0j)
        with pytest.raises(InputDomainError):
            hermite_phys(-1, 0.0 + 0j)


class TestGauss2F1:
    def test_n0_is_one_everywhere(self):
        rng = np.random.RandomState(3)
        for _ in range(20):
            z = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
            out = gauss_2f1_terminating(0, 3.0, 2.0, z)
            assert out.value == 1.0
            assert out.derivative == 0.0

    def test_linear_case(self):
        # 1 - (4/2) z at z = 0.25
        out = gauss_2f1_terminating(1, 4.0, 2.0, 0.25)
        assert out.value == pytest.approx(0.5)
        assert out.derivative == pytest.approx(-2.0)

    def test_against_pochhammer_sum(self):
        # independent term-by-term oracle with explicit Pochhammer products
        def poch(a, k):
            out = 1.0
            for i in range(k):
                out *= a + i
            return out

        def oracle(n, b, c, z):
            return sum(
                poch(-n, k) * poch(b, k) / (poch(c, k) * math.factorial(k)) * z ** k
                for k in range(n + 1)
            )

        rng = np.random.RandomState(5)
        for _ in range(30):
            n = rng.randint(0, 9)
            b = rng.uniform(0.5, 12.0)
            c = rng.uniform(0.6, 8.0)
            z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            got = gauss_2f1_terminating(n, b, c, z).value
            want = oracle(n, b, c, z)
            assert abs(got - want) <= 1e-14 * max(abs(want), 1.0)
        got = gauss_2f1_terminating(2, 5.0, 2.5, 0.1).value
        assert abs(got - oracle(2, 5.0, 2.5, 0.1)) < 1e-14 * abs(got)

    def test_derivative_matches_finite_difference(self):
        rng = np.random.RandomState(13)
        for _ in range(20):
            n = rng.randint(1, 8)
            b = n + 3.0
            c = 2.0
            z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
            out = gauss_2f1_terminating(n, b, c, z)
            d_re, d_im = central_diff(lambda w: gauss_2f1_terminating(n, b, c, w).value, z)
            for d in (d_re, d_im):
                assert abs(d - out.derivative) <= 1e-6 * max(abs(out.derivative), 1.0)

    def test_nonpositive_integer_c_rejected(self):
        with pytest.raises(InputDomainError):
            gauss_2f1_terminating(2, 3.0, 0.0, 0.5)
        with pytest.raises(InputDomainError):
            gauss_2f1_terminating(2, 3.0, -2.0, 0.5)


class TestPTNorm:
    def test_c0_analytic(self):
        # integral of cos^3 sin^3 over [0, pi/2] is 1/12
        assert pt_norm_constant(0, 1.5) == pytest.approx(1.0 / 12.0, rel=1e-12)

    def test_positive(self):
        for n in range(11):
            assert pt_norm_constant(n, 1.5) > 0.0

    def test_orthonormality(self):
        # eigenfunctions of the Sturm-Liouville problem are orthogonal; with
        # the returned constants the overlap matrix is the identity
        l = 1.5

        def psi(n, x):
            from complextraj.specfun import _terminating_series

            norm = pt_norm_constant(n, l) ** -0.5
            return (
                norm
                * (math.cos(x) * math.sin(x)) ** l
                * _terminating_series(n, n + 2 * l, l + 0.5, math.sin(x) ** 2).real
            )

        for m in range(5):
            for n in range(m, 5):
                val, _ = quad(lambda x: psi(m, x) * psi(n, x), 0.0, math.pi / 2, limit=200)
                expect = 1.0 if m == n else 0.0
                assert abs(val - expect) < 1e-10

    def test_agrees_with_adaptive_quad_oracle(self):
        from complextraj.specfun import _terminating_series

        l = 1.5
        for n in (1, 3, 6):
            def integrand(x):
                f = (math.cos(x) * math.sin(x)) ** l * _terminating_series(
                    n, n + 2 * l, l + 0.5, math.sin(x) ** 2
                ).real
                return f * f

            want, _ = quad(integrand, 0.0, math.pi / 2, limit=200)
            assert pt_norm_constant(n, l) == pytest.approx(want, rel=1e-10)

    def test_cache_is_concurrency_safe(self):
        import threading

        from complextraj import specfun

        specfun._pt_norm_cache.pop((8, 1.5), None)
        results = []

        def worker():
            results.append(pt_norm_constant(8, 1.5))

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(set(results)) == 1

    def test_rejects_bad_arguments(self):
        with pytest.raises(InputDomainError):
            pt_norm_constant(-1, 1.5)
        with pytest.raises(InputDomainError):
            pt_norm_constant(0, 0.5)
