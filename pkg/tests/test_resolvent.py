import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dppsp.errors import NoConvergence, SingularSystem, StepSizeViolation
from dppsp.operators import Ball, Box, LocalSaddle, ProductSet
from dppsp.problems import InstanceSpec, bilinear_node, make_instance, mvi_scalar_node, quadratic_node
from dppsp.resolvent import (
    LocalResolvent,
    ResolventConfig,
    affine_node,
    fixed_point_residual,
    resolve,
    resolve_affine_exact,
)

BIG = Box.cube(2, 100.0)


def zero_node(d):
    return LocalSaddle(d, 0, lambda x, y: np.zeros(d), lambda x, y: np.zeros(0))


class TestExamples:
    def test_bilinear_interior(self):
        z = resolve(bilinear_node([[1.0]]), BIG, np.array([1.0, 1.0]), ResolventConfig(1.0))
        assert np.allclose(z, [0.0, 1.0], atol=1e-12)

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 2.5])
    def test_bilinear_formula(self, alpha, rng):
        r = rng.standard_normal(2)
        z = resolve(bilinear_node([[1.0]]), BIG, r, ResolventConfig(alpha), method="iterative")
        want = [(r[0] - alpha * r[1]) / (1 + alpha**2), (r[1] + alpha * r[0]) / (1 + alpha**2)]
        assert np.allclose(z, want, atol=1e-9)

    def test_zero_operator_is_projection(self, rng):
        box = Box.cube(3)
        for alpha in (0.1, 10.0):
            v = 3 * rng.standard_normal(3)
            assert np.allclose(resolve(zero_node(3), box, v, ResolventConfig(alpha)), box.project(v), atol=1e-10)

    def test_scalar_saddle_halves(self):
        node = quadratic_node([[1.0]], [[0.0]], [[1.0]])
        z = resolve(node, BIG, np.array([1.0, 1.0]), ResolventConfig(1.0))
        assert np.allclose(z, [0.5, 0.5])

    def test_affine_exact_examples(self):
        skew = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert np.allclose(resolve_affine_exact(skew, np.zeros(2), BIG, np.ones(2), 1.0), [0, 1])
        box = Box.cube(2)
        v = np.array([3.0, -0.2])
        assert np.allclose(resolve_affine_exact(np.zeros((2, 2)), np.zeros(2), box, v, 1.0), box.project(v))
        assert np.allclose(resolve_affine_exact(np.eye(2), np.zeros(2), BIG, np.array([3.0, 0.0]), 0.5), [2, 0])

    def test_affine_exact_constrained_fallback(self):
        skew = np.array([[0.0, 1.0], [-1.0, 0.0]])
        box = Box.cube(2, 0.5)
        rhs = np.array([2.0, 2.0])
        z = resolve_affine_exact(skew, np.zeros(2), box, rhs, 1.0)
        node = affine_node(skew, np.zeros(2), 1, 1)
        assert fixed_point_residual(node, box, z, rhs, 1.0) <= 1e-10

    def test_singular_system(self):
        with pytest.raises(SingularSystem):
            resolve_affine_exact(-np.eye(2), np.zeros(2), BIG, np.ones(2), 1.0)


class TestContract:
    @pytest.mark.parametrize(
        "spec",
        [
            InstanceSpec("bilinear", N=2, p=2, q=2, seed=1),
            InstanceSpec("weakly-quadratic", N=2, p=2, q=2, rho=0.5, seed=2),
            InstanceSpec("sc-sc-quadratic", N=2, p=2, q=1, seed=3, set_kind="ball"),
            InstanceSpec("mvi-scalar", N=2, seed=4),
        ],
    )
    @pytest.mark.parametrize("method", ["auto", "iterative"])
    def test_residual_on_bundled_families(self, spec, method, rng):
        inst = make_instance(spec)
        node, fset = inst.problems[0], inst.sets[0]
        alpha = 0.9 / node.rho if node.rho > 0 else 2.0
        cfg = ResolventConfig(alpha)
        solver = LocalResolvent(node, fset, cfg, method=method)
        for _ in range(40):
            rhs = 3 * rng.standard_normal(node.dim)
            z, _ = solver(rhs)
            assert fset.contains(z, tol=1e-12)
            assert fixed_point_residual(node, fset, z, rhs, alpha) <= cfg.inner_tol

    def test_exact_and_iterative_agree_interior(self, rng):
        G = rng.standard_normal((3, 3))
        node = quadratic_node(G @ G.T, rng.standard_normal((3, 2)), np.eye(2), rng.standard_normal(3), rng.standard_normal(2))
        fset = Box.cube(5, 1e3)
        cfg = ResolventConfig(0.7)
        for _ in range(10):
            rhs = rng.standard_normal(5)
            a = resolve(node, fset, rhs, cfg, method="affine")
            b = resolve(node, fset, rhs, cfg, method="iterative")
            assert np.allclose(a, b, atol=1e-9)

    @given(st.integers(0, 10**6), st.floats(0.05, 5.0))
    def test_firmly_nonexpansive_monotone(self, seed, alpha):
        rng = np.random.default_rng(seed)
        inst = make_instance(InstanceSpec("bilinear", N=1, p=2, q=2, seed=seed % 97))
        node, fset = inst.problems[0], inst.sets[0]
        solver = LocalResolvent(node, fset, ResolventConfig(alpha))
        r1, r2 = 2 * rng.standard_normal((2, 4))
        z1, _ = solver(r1)
        z2, _ = solver(r2)
        dz, dr = z1 - z2, r1 - r2
        assert dz @ dz <= dz @ dr + 1e-8
        assert np.linalg.norm(dz) <= np.linalg.norm(dr) + 1e-8

    @pytest.mark.parametrize("rho", [0.25, 1.0, 4.0])
    def test_stepsize_boundary(self, rho):
        node = mvi_scalar_node(1.0, 1.0, rho)
        fset = ProductSet((Box([0.5], [2.0]), Box([0.0], [0.0])))
        LocalResolvent(node, fset, ResolventConfig(np.nextafter(1.0 / rho, 0.0)))
        with pytest.raises(StepSizeViolation):
            LocalResolvent(node, fset, ResolventConfig(1.0 / rho))
        with pytest.raises(StepSizeViolation):
            resolve(node, fset, np.zeros(2), ResolventConfig(2.0 / rho))

    def test_no_convergence(self):
        node = mvi_scalar_node(1.0, 1.0, 0.0)
        fset = ProductSet((Box([-3.0], [3.0]), Box([0.0], [0.0])))
        cfg = ResolventConfig(1.0, inner_tol=1e-14, max_inner_iters=2)
        with pytest.raises(NoConvergence) as info:
            resolve(node, fset, np.array([2.5, 0.0]), cfg)
        assert info.value.residual > 0

    def test_ball_constrained(self, rng):
        node = bilinear_node(rng.standard_normal((2, 2)))
        fset = ProductSet((Ball(np.zeros(2), 0.5), Ball(np.zeros(2), 0.5)))
        cfg = ResolventConfig(1.5)
        for _ in range(20):
            rhs = 3 * rng.standard_normal(4)
            z = resolve(node, fset, rhs, cfg)
            assert fixed_point_residual(node, fset, z, rhs, 1.5) <= 1e-10

    def test_warm_start_same_answer(self, rng):
        node = mvi_scalar_node(1.3, 1.0, 1.3 / 3)
        fset = ProductSet((Box([-0.5], [2.0]), Box([0.0], [0.0])))
        cfg = ResolventConfig(1.0)
        rhs = np.array([0.8, 0.3])
        a = resolve(node, fset, rhs, cfg)
        b = resolve(node, fset, rhs, cfg, z_init=np.array([1.9, 0.0]))
        assert np.allclose(a, b, atol=1e-9)

    def test_config_validation(self):
        for kwargs in ({"alpha": 0.0}, {"alpha": 1.0, "inner_tol": 0.0}, {"alpha": 1.0, "inner_step": 1.5}):
            with pytest.raises(ValueError):
                ResolventConfig(**kwargs)
