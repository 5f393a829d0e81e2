import math

import numpy as np
import pytest

from fdbf.numerics import (RngState, inner, matvec_adj, norm_sq, pinv_vec,
                           project_complement, sample_complex_gaussian,
                           TOL_EQ, TOL_ORTHO)


class TestInner:
    def test_worked_example(self):
        a = np.array([1 + 1j, 2 + 0j])
        b = np.array([1 + 0j, 1 - 1j])
        assert inner(a, b) == pytest.approx(3 - 3j, abs=TOL_EQ)

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        b = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        assert inner(a, b) == pytest.approx(np.conj(inner(b, a)), abs=1e-12)

    def test_linearity_in_second_argument(self):
        rng = np.random.default_rng(2)
        a, b, c = (rng.standard_normal(4) + 1j * rng.standard_normal(4)
                   for _ in range(3))
        lam = 0.7 - 1.3j
        lhs = inner(a, b + lam * c)
        rhs = inner(a, b) + lam * inner(a, c)
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_self_inner_is_norm_sq(self):
        a = np.array([3 + 4j, 1j])
        assert inner(a, a) == pytest.approx(26.0)
        assert norm_sq(a) == pytest.approx(26.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            inner(np.ones(2, complex), np.ones(3, complex))


class TestMatvecAdj:
    def test_worked_example(self):
        H = np.array([[1j, 1 + 0j]])
        v = np.array([1.0 + 0j])
        out = matvec_adj(H, v)
        assert np.allclose(out, [-1j, 1.0], atol=TOL_EQ)

    def test_adjoint_identity(self):
        rng = np.random.default_rng(3)
        H = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        x = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        # <H^H v, x> == <v, H x>
        assert inner(matvec_adj(H, v), x) == pytest.approx(inner(v, H @ x), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            matvec_adj(np.ones((2, 3), complex), np.ones(3, complex))


class TestPinvVec:
    def test_worked_example(self):
        out = pinv_vec(np.array([1.0 + 0j, 1j]))
        assert np.allclose(out, [0.5, -0.5j], atol=TOL_EQ)

    def test_row_functional_hits_one(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        assert np.dot(pinv_vec(a), a) == pytest.approx(1.0, abs=1e-12)

    def test_zero_vector(self):
        out = pinv_vec(np.zeros(3, complex))
        assert np.all(out == 0)


class TestProjectComplement:
    def test_worked_example(self):
        a = np.array([1.0 + 0j, 1.0 + 0j]) / math.sqrt(2)
        x = np.array([1.0 + 0j, 0.0 + 0j])
        out = project_complement(a, x)
        assert np.allclose(out, [0.5, -0.5], atol=TOL_EQ)

    def test_result_orthogonal_and_idempotent(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        x = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        q = project_complement(a, x)
        assert abs(inner(a, q)) <= TOL_ORTHO * math.sqrt(norm_sq(a) * norm_sq(x))
        assert np.allclose(project_complement(a, q), q, atol=1e-12)

    def test_zero_direction_is_identity(self):
        x = np.array([1 + 2j, 3 - 1j])
        assert np.array_equal(project_complement(np.zeros(2, complex), x), x)

    def test_parallel_input_vanishes(self):
        a = np.array([1 + 1j, 2 - 1j, 0.5j])
        out = project_complement(a, 3.2j * a)
        assert math.sqrt(norm_sq(out)) <= 1e-12 * math.sqrt(norm_sq(3.2j * a))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            project_complement(np.ones(2, complex), np.ones(3, complex))


class TestRngState:
    def test_value_semantics(self):
        st = RngState(42, 3)
        x = sample_complex_gaussian(st, 8)
        y = sample_complex_gaussian(st, 8)
        assert np.array_equal(x, y)

    def test_generator_semantics_advance(self):
        gen = RngState(42, 3).generator()
        x = sample_complex_gaussian(gen, 8)
        y = sample_complex_gaussian(gen, 8)
        assert not np.array_equal(x, y)

    def test_streams_do_not_collide(self):
        x = sample_complex_gaussian(RngState(42, 0), 8)
        y = sample_complex_gaussian(RngState(42, 1), 8)
        assert not np.array_equal(x, y)

    def test_stream_accessor(self):
        assert RngState(7).stream(5) == RngState(7, 5)

    def test_fixed_draw_count_per_call(self):
        # n complex draws consume exactly 2n uniforms, no rejection loop
        split = RngState(9, 2).generator()
        sample_complex_gaussian(split, 5)
        tail_after_5 = split.random(4)
        straight = RngState(9, 2).generator()
        straight.random(10)
        assert np.array_equal(tail_after_5, straight.random(4))


class TestComplexGaussian:
    def test_variance_split_and_mean(self):
        z = sample_complex_gaussian(RngState(1, 0), 200_000, mean=2.0, std=3.0)
        centered = z - 2.0
        second_moment = np.mean(np.abs(centered) ** 2)
        assert second_moment == pytest.approx(9.0, rel=0.02)
        assert np.var(centered.real) == pytest.approx(4.5, rel=0.03)
        assert np.var(centered.imag) == pytest.approx(4.5, rel=0.03)
        assert np.mean(z) == pytest.approx(2.0, abs=0.02)

    def test_zero_std_returns_mean_exactly(self):
        z = sample_complex_gaussian(RngState(1, 0), 10, mean=1.5 - 0.5j, std=0.0)
        assert np.all(z == 1.5 - 0.5j)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            sample_complex_gaussian(RngState(0), 0)
        with pytest.raises(ValueError):
            sample_complex_gaussian(RngState(0), 4, std=-1.0)

    def test_isotropy_of_phase(self):
        z = sample_complex_gaussian(RngState(3, 1), 100_000)
        # rotating by i leaves the distribution invariant; compare moments
        assert np.mean(z) == pytest.approx(0.0, abs=0.02)
        assert np.mean(z ** 2) == pytest.approx(0.0, abs=0.02)
