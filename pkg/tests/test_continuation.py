"""Analytic continuation, Gaussian smearing, strip bound, core rescaling."""

import math

import numpy as np
import pytest

from cstarflow import (
    AlgebraElement,
    BlockShape,
    FlowGenerator,
    HermitianElement,
    NodesTooFewError,
    NotSeparatingError,
    SmearingPlan,
    Strip,
    continue_exact,
    core_rescale,
    evaluate,
    identity,
    min_nodes,
    smear_oracle,
    smear_quadrature,
    three_lines_check,
    weak_continuation_check,
    zeros,
)
from cstarflow.sampling import random_element, random_flow, rng

from conftest import diag_flow, e12


class TestStrip:
    def test_contains_orientation(self):
        up = Strip(1.5)
        assert up.contains(0.3 + 0.0j) and up.contains(1.0 + 1.5j)
        assert not up.contains(-0.1j) and not up.contains(2.0j)
        down = Strip(-2.0)
        assert down.contains(-1.0j) and not down.contains(0.5j)


class TestContinueExact:
    def test_zero_is_identity(self):
        r = rng(0)
        g = random_flow(r, BlockShape([2, 3]), 2.0)
        x = random_element(r, BlockShape([2, 3]))
        assert (continue_exact(g, 0.0, x) - x).norm() <= 1e-14

    def test_matrix_unit_decay_oracle(self):
        g = diag_flow(1.0, 0.0)
        out = continue_exact(g, 1j, e12())
        # oracle: entrywise exp(i z (lam_j - mu_k)) = exp(-1) on the moved entry
        np.testing.assert_allclose(
            out.blocks[0], np.array([[0.0, np.exp(-1.0)], [0.0, 0.0]]), atol=1e-14
        )

    def test_real_z_equals_evaluate_exactly(self):
        r = rng(1)
        g = random_flow(r, BlockShape([3]), 2.0)
        x = random_element(r, BlockShape([3]))
        for t in (-1.73, 0.4, 2.0):
            a = continue_exact(g, complex(t, 0.0), x)
            b = evaluate(g, t, x)
            for ba, bb in zip(a.blocks, b.blocks):
                np.testing.assert_array_equal(ba, bb)

    def test_sequential_limit_consistency(self):
        # closedness has no finite-dimensional content beyond this
        r = rng(2)
        g = random_flow(r, BlockShape([2, 2]), 2.0)
        x = random_element(r, BlockShape([2, 2]))
        z = 0.4 + 0.6j
        target = continue_exact(g, z, x)
        for j in (1, 4, 16, 64):
            xj = x + (1.0 / j) * random_element(r, BlockShape([2, 2]))
            drift = (continue_exact(g, z, xj) - target).norm()
            assert drift <= (1.0 / j) * math.exp(abs(z.imag) * g.generator_norm()) * 2.0


class TestSmearQuadrature:
    def test_trivial_flow_reproduces_element(self):
        shape = BlockShape([2])
        g = FlowGenerator.trivial(shape)
        x = random_element(rng(3), shape)
        for r in (0.5, 1.0, 7.0):
            q = smear_quadrature(g, x, SmearingPlan.for_flow(g, r, 0.0))
            assert (q - x).norm() <= 1e-13 * x.norm()

    def test_worked_gaussian_fourier_value(self):
        # oracle: (r/sqrt(pi)) integral exp(-r^2 t^2) exp(i nu t) dt = exp(-nu^2/(4r^2))
        g = diag_flow(1.0, 0.0)
        x = e12()
        plan = SmearingPlan.for_flow(g, 1.0, 0.0)
        q = smear_quadrature(g, x, plan)
        expected = math.exp(-0.25)
        assert abs(q.blocks[0][0, 1] - expected) <= 1e-10
        assert (q - expected * x).norm() <= 1e-10

    def test_norm_bound(self):
        r = rng(4)
        shape = BlockShape([3, 2])
        for _ in range(5):
            g = random_flow(r, shape, 3.0)
            x = random_element(r, shape)
            for rr, im in ((0.5, 1.0), (1.0, -0.5), (2.0, 0.8)):
                z = complex(float(r.uniform(-1, 1)), im)
                q = smear_quadrature(g, x, SmearingPlan.for_flow(g, rr, z))
                assert q.norm() <= x.norm() * math.exp(rr * rr * im * im) * (1 + 1e-8)

    def test_rejects_inadmissible_plans(self):
        g = diag_flow(2.0, -2.0)
        x = e12()
        needed = min_nodes(g, 0.5, 1j)
        with pytest.raises(NodesTooFewError):
            smear_quadrature(g, x, SmearingPlan(0.5, 1j, needed - 1))

    def test_degenerate_width_shortcut(self):
        g = diag_flow(1.0, 0.0)
        x = e12()
        out = smear_quadrature(g, x, SmearingPlan(1e13, 0.0, 16))
        assert (out - x).norm() == 0.0

    def test_large_node_counts_stay_accurate(self):
        # r |Im z| large pushes the admissible rule past 400 nodes, where
        # the node tables must stay finite and the relative error small
        r = rng(20)
        g = random_flow(r, BlockShape([2]), 2.0)
        x = random_element(r, BlockShape([2]))
        z = 0.1 + 0.6j
        plan = SmearingPlan.for_flow(g, 16.0, z)
        assert plan.nodes > 350
        q = smear_quadrature(g, x, plan)
        envelope = x.norm() * math.exp((16.0 * z.imag) ** 2)
        assert np.all([np.all(np.isfinite(b)) for b in q.blocks])
        assert (q - smear_oracle(g, x, 16.0, z)).norm() <= 1e-8 * envelope


class TestSmearOracle:
    def test_second_moment_decay(self):
        r = rng(5)
        shape = BlockShape([2, 3])
        g = random_flow(r, shape, 2.0)
        x = random_element(r, shape)
        # oracle: err(r) ~ norm(f''(0)) / (4 r^2) with f'' = -(Hl^2 x - 2 Hl x Hr + x Hr^2)
        hl, hr = g.h_left.value, g.h_right.value
        second = (hl @ hl @ x) - 2.0 * (hl @ (x @ hr)) + (x @ hr @ hr)
        for rr in (20.0, 40.0, 80.0):
            err = (smear_oracle(g, x, rr, 0.0) - x).norm()
            assert err <= second.norm() / (4 * rr * rr) * 1.05

    def test_matches_quadrature_worked_value(self):
        g = diag_flow(1.0, 0.0)
        out = smear_oracle(g, e12(), 1.0, 0.0)
        assert abs(out.blocks[0][0, 1] - math.exp(-0.25)) <= 1e-14

    def test_continuation_shifts_the_center(self):
        r = rng(6)
        shape = BlockShape([2, 2])
        g = random_flow(r, shape, 2.0)
        x = random_element(r, shape)
        for y, z in ((0.5j, 0.2), (0.3 - 0.4j, 0.1 + 0.2j)):
            lhs = continue_exact(g, y, smear_oracle(g, x, 1.5, z))
            rhs = smear_oracle(g, x, 1.5, z + y)
            assert (lhs - rhs).norm() <= 1e-10 * max(1.0, rhs.norm())


class TestThreeLines:
    def test_real_z_degenerates_to_isometry(self):
        r = rng(7)
        g = random_flow(r, BlockShape([2, 2]), 2.0)
        x = random_element(r, BlockShape([2, 2]))
        assert three_lines_check(g, x, 1.3 + 0.0j, 25) <= 1e-12

    def test_random_instances(self):
        r = rng(8)
        shape = BlockShape([3, 2])
        for _ in range(10):
            g = random_flow(r, shape, 2.0)
            x = random_element(r, shape)
            z = complex(float(r.uniform(-1, 1)), float(r.uniform(-1, 1)))
            scale = max(x.norm(), continue_exact(g, z, x).norm())
            assert three_lines_check(g, x, z, 25) <= 1e-9 * scale

    def test_worked_diagonal_instance(self):
        g = diag_flow(1.0, 0.0)
        x = e12()
        half = continue_exact(g, 0.5j, x)
        assert abs(half.norm() - math.exp(-0.5)) <= 1e-12
        assert max(x.norm(), continue_exact(g, 1j, x).norm()) == pytest.approx(1.0)
        assert three_lines_check(g, x, 1j, 25) <= 1e-12


class TestCoreRescale:
    def test_exact_approximants_untouched(self):
        r = rng(9)
        g = random_flow(r, BlockShape([2]), 1.0)
        x = random_element(r, BlockShape([2]))
        z = 0.5j
        ax = continue_exact(g, z, x)
        out = core_rescale(x, ax, [(x, ax)] * 3)
        for y in out:
            assert (y - x).norm() <= 1e-14

    def test_zero_element_passthrough(self):
        shape = BlockShape([2])
        x = zeros(shape)
        ys = [random_element(rng(10), shape) for _ in range(3)]
        out = core_rescale(x, zeros(shape), [(y, y) for y in ys])
        assert [id(a) for a in out] == [id(y) for y in ys]

    def test_double_scaling_restores(self):
        r = rng(11)
        g = random_flow(r, BlockShape([2]), 1.0)
        x = random_element(r, BlockShape([2]))
        ax = continue_exact(g, 0.4j, x)
        out = core_rescale(x, ax, [(2.0 * x, 2.0 * ax)])
        assert (out[0] - x).norm() <= 1e-13

    def test_caps_hold_on_smeared_approximants(self):
        r = rng(12)
        shape = BlockShape([2, 2])
        g = random_flow(r, shape, 2.0)
        x = random_element(r, shape)
        z = 0.3 + 0.5j
        ax = continue_exact(g, z, x)
        pairs = []
        rr = 1.0
        for _ in range(14):
            y = smear_oracle(g, x, rr, 0.0)
            pairs.append((y, continue_exact(g, z, y)))
            rr *= 2.0
        out = core_rescale(x, ax, pairs)
        for y in out:
            assert y.norm() <= x.norm() * (1 + 1e-12)
            assert continue_exact(g, z, y).norm() <= ax.norm() * (1 + 1e-12)
        assert (out[-1] - x).norm() <= 1e-6


class TestWeakContinuation:
    @staticmethod
    def full_entry_duals(shape: BlockShape):
        duals = []
        for b, n in enumerate(shape.block_dims):
            for p in range(n):
                for q in range(n):
                    blocks = [np.zeros((m, m), dtype=complex) for m in shape.block_dims]
                    blocks[b][p, q] = 1.0
                    duals.append(AlgebraElement(shape, blocks))
        return duals

    def test_consistent_pair_passes(self):
        r = rng(13)
        shape = BlockShape([2])
        g = random_flow(r, shape, 1.5)
        v = random_element(r, shape)
        z = 0.2 + 0.7j
        w = continue_exact(g, z, v)
        assert weak_continuation_check(g, v, w, z, self.full_entry_duals(shape))

    def test_perturbation_detected(self):
        r = rng(14)
        shape = BlockShape([2])
        g = random_flow(r, shape, 1.5)
        v = random_element(r, shape)
        z = 0.2 + 0.7j
        w = continue_exact(g, z, v) + identity(shape)
        assert not weak_continuation_check(g, v, w, z, self.full_entry_duals(shape))

    def test_single_entry_dual_detects_phase_scaling(self):
        # one-dimensional algebra: a single entry dual is separating
        shape = BlockShape([1])
        h = HermitianElement.from_blocks([np.array([[1.0]])])
        g = FlowGenerator(h, HermitianElement(zeros(shape)))
        v = AlgebraElement.from_blocks([np.array([[1.0]])])
        dual = [AlgebraElement.from_blocks([np.array([[1.0]])])]
        z = 0.3 + 0.4j
        good = np.exp(1j * z) * v
        bad = np.exp(1j * (z + 0.1)) * v
        assert weak_continuation_check(g, v, good, z, dual)
        assert not weak_continuation_check(g, v, bad, z, dual)

    def test_non_separating_family_rejected(self):
        shape = BlockShape([2])
        g = diag_flow(1.0, 0.0)
        v = e12()
        with pytest.raises(NotSeparatingError):
            weak_continuation_check(g, v, v, 0.5j, self.full_entry_duals(shape)[:3])


class TestContinuationInvariants:
    def test_quadrature_vs_oracle_grid(self):
        r = rng(15)
        shape = BlockShape([3, 2])
        for seed_flow in range(3):
            g = random_flow(r, shape, 4.0)
            x = random_element(r, shape)
            for rr in (0.5, 1.0, 2.0, 4.0):
                z = complex(float(r.uniform(-1, 1)), float(r.uniform(-1, 1)))
                q = smear_quadrature(g, x, SmearingPlan.for_flow(g, rr, z))
                o = smear_oracle(g, x, rr, z)
                envelope = x.norm() * math.exp(rr * rr * z.imag * z.imag)
                assert (q - o).norm() <= 1e-8 * envelope

    def test_smearing_commutes_with_continuation(self):
        r = rng(16)
        shape = BlockShape([2, 2])
        g = random_flow(r, shape, 2.0)
        x = random_element(r, shape)
        y, rr, z = 0.4 - 0.3j, 1.5, 0.2 + 0.1j
        lhs = continue_exact(g, y, smear_oracle(g, x, rr, z))
        rhs = smear_oracle(g, continue_exact(g, y, x), rr, z)
        assert (lhs - rhs).norm() <= 1e-9 * max(1.0, rhs.norm())

    def test_same_side_composition(self):
        r = rng(17)
        shape = BlockShape([3])
        g = random_flow(r, shape, 2.0)
        x = random_element(r, shape)
        for y, z in ((0.2 + 0.3j, -0.5 + 0.1j), (-0.1 - 0.4j, 0.3 - 0.2j)):
            comp = continue_exact(g, y, continue_exact(g, z, x))
            direct = continue_exact(g, y + z, x)
            scale = max(direct.norm(), x.norm())
            assert (comp - direct).norm() <= 1e-9 * scale

    def test_inverse(self):
        r = rng(18)
        shape = BlockShape([2, 3])
        g = random_flow(r, shape, 2.0)
        x = random_element(r, shape)
        for z in (0.7j, 1.0 - 0.5j, -0.3 + 0.9j):
            back = continue_exact(g, -z, continue_exact(g, z, x))
            assert (back - x).norm() <= 1e-9 * x.norm()

    def test_continuations_are_semi_multiplicative(self):
        # the companion identity survives continuation to complex z
        r = rng(21)
        shape = BlockShape([2, 2])
        g = random_flow(r, shape, 2.0)
        a, b = random_element(r, shape), random_element(r, shape)
        from cstarflow import left_companion, right_companion

        for z in (0.4 + 0.3j, -0.2 - 0.6j):
            lhs = continue_exact(left_companion(g), z, b) @ continue_exact(g, z, a)
            rhs = continue_exact(g, z, b @ a)
            assert (lhs - rhs).norm() <= 1e-9 * max(1.0, rhs.norm())
            lhs = continue_exact(g, z, a) @ continue_exact(right_companion(g), z, b)
            rhs = continue_exact(g, z, a @ b)
            assert (lhs - rhs).norm() <= 1e-9 * max(1.0, rhs.norm())

    def test_bounded_analytic_units_for_automorphism_flows(self):
        # damped unit smears stay in the unit ball on both boundary
        # lines and converge to the unit as the damping relaxes
        r = rng(22)
        shape = BlockShape([2, 2])
        g = random_flow(r, shape, 2.0, automorphism=True)
        one = identity(shape)
        z = 0.4 + 0.8j
        prev_gap = math.inf
        for rr in (2.0, 1.0, 0.5, 0.25):
            u = math.exp(-rr * rr * z.imag * z.imag) * smear_oracle(g, one, rr, 0.0)
            assert u.norm() <= 1.0 + 1e-12
            assert continue_exact(g, z, u).norm() <= 1.0 + 1e-10
            gap = (u - one).norm()
            assert gap <= prev_gap + 1e-12
            prev_gap = gap
        assert prev_gap <= 0.05

    def test_convergence_ratio_window(self):
        r = rng(19)
        shape = BlockShape([2, 2])
        g = random_flow(r, shape, 2.0)
        x = random_element(r, shape)
        rr = 1.0
        while (smear_oracle(g, x, rr, 0.0) - x).norm() > 1e-2 * x.norm():
            rr *= 2.0
        for _ in range(3):
            e1 = (smear_oracle(g, x, rr, 0.0) - x).norm()
            e2 = (smear_oracle(g, x, 2 * rr, 0.0) - x).norm()
            assert 0.2 <= e2 / e1 <= 0.3
            rr *= 2.0
