"""Flow evaluation, companions, group laws."""

import numpy as np
import scipy.linalg

from cstarflow import (
    BlockShape,
    FlowGenerator,
    HermitianElement,
    check_group_law,
    evaluate,
    identity,
    left_companion,
    right_companion,
    zeros,
)
from cstarflow.sampling import random_element, random_flow, random_hermitian, rng

from conftest import diag_flow, e12


def phase_oracle(g: FlowGenerator, t: complex, x):
    """Independent route: entrywise phases of diagonal generators."""
    out = []
    for hl, hr, xb in zip(g.h_left.value.blocks, g.h_right.value.blocks, x.blocks):
        lam = np.diagonal(hl).real
        mu = np.diagonal(hr).real
        out.append(np.exp(1j * t * (lam[:, None] - mu[None, :])) * xb)
    return out


class TestEvaluate:
    def test_time_zero_is_identity(self):
        r = rng(0)
        g = random_flow(r, BlockShape([2, 3]), 2.0)
        x = random_element(r, BlockShape([2, 3]))
        assert (evaluate(g, 0.0, x) - x).norm() <= 1e-14 * x.norm()

    def test_matrix_unit_picks_up_phase(self):
        g = diag_flow(1.0, 0.0)
        x = e12()
        for t in (-2.0, 0.3, 1.7):
            expected = phase_oracle(g, t, x)
            got = evaluate(g, t, x)
            np.testing.assert_allclose(got.blocks[0], expected[0], atol=1e-13)

    def test_unit_is_fixed_by_automorphisms(self):
        r = rng(1)
        h = random_hermitian(r, BlockShape([3]), 2.0)
        g = FlowGenerator(h, h)
        one = identity(BlockShape([3]))
        for t in (-5.0, 0.7, 11.0):
            assert (evaluate(g, t, one) - one).norm() <= 1e-12


class TestCompanions:
    def test_automorphism_case_collapses(self):
        h = random_hermitian(rng(2), BlockShape([2, 2]), 1.0)
        g = FlowGenerator(h, h)
        x = random_element(rng(3), BlockShape([2, 2]))
        for companion in (left_companion(g), right_companion(g)):
            for t in (0.4, -1.1):
                assert (evaluate(companion, t, x) - evaluate(g, t, x)).norm() == 0.0

    def test_zero_right_generator_gives_trivial_companion(self):
        shape = BlockShape([3])
        g = FlowGenerator(
            random_hermitian(rng(4), shape, 1.0), HermitianElement(zeros(shape))
        )
        x = random_element(rng(5), shape)
        trivial = right_companion(g)
        for t in (0.9, -2.3, 7.0):
            assert (evaluate(trivial, t, x) - x).norm() <= 1e-13

    def test_semi_multiplicativity_expm_oracle(self):
        # independent oracle: explicit scaling-and-squaring exponential products
        r = rng(6)
        shape = BlockShape([3, 2])
        g = random_flow(r, shape, 1.5)
        a, b = random_element(r, shape), random_element(r, shape)
        t = 0.8
        lhs = evaluate(left_companion(g), t, b) @ evaluate(g, t, a)
        oracle = []
        for hl, hr, ab in zip(
            g.h_left.value.blocks, g.h_right.value.blocks, (b @ a).blocks
        ):
            el = scipy.linalg.expm(1j * t * hl)
            er = scipy.linalg.expm(-1j * t * hr)
            oracle.append(el @ ab @ er)
        for got, want in zip(lhs.blocks, oracle):
            np.testing.assert_allclose(got, want, atol=1e-10)


class TestGroupLaw:
    def test_zero_times(self):
        r = rng(7)
        g = random_flow(r, BlockShape([2, 2]), 2.0)
        xs = [random_element(r, BlockShape([2, 2])) for _ in range(3)]
        assert check_group_law(g, 0.0, 0.0, xs) <= 1e-14

    def test_additivity(self):
        r = rng(8)
        g = random_flow(r, BlockShape([3]), 2.0)
        xs = [random_element(r, BlockShape([3])) for _ in range(5)]
        assert check_group_law(g, 0.6, -1.4, xs) <= 1e-11

    def test_inverse_at_unit_time(self):
        r = rng(9)
        g = random_flow(r, BlockShape([2, 3]), 2.0)
        x = random_element(r, BlockShape([2, 3]))
        resid = (evaluate(g, 1.0, evaluate(g, -1.0, x)) - x).norm()
        assert resid <= 1e-11


class TestInvariants:
    def test_isometry_large_times(self):
        r = rng(10)
        g = random_flow(r, BlockShape([3, 2]), 2.0)
        x = random_element(r, BlockShape([3, 2]))
        for t in (-100.0, -7.3, 0.1, 55.0, 100.0):
            assert abs(evaluate(g, t, x).norm() - x.norm()) <= 1e-10 * x.norm()

    def test_semi_multiplicativity_both_sides(self):
        r = rng(11)
        shape = BlockShape([2, 3])
        for _ in range(10):
            g = random_flow(r, shape, 2.0)
            a, b = random_element(r, shape), random_element(r, shape)
            t = float(r.uniform(-3, 3))
            prod = a.norm() * b.norm()
            left = evaluate(left_companion(g), t, b) @ evaluate(g, t, a)
            assert (left - evaluate(g, t, b @ a)).norm() <= 1e-10 * prod
            right = evaluate(g, t, a) @ evaluate(right_companion(g), t, b)
            assert (right - evaluate(g, t, a @ b)).norm() <= 1e-10 * prod

    def test_companions_multiplicative(self):
        r = rng(12)
        shape = BlockShape([3])
        g = random_flow(r, shape, 2.0)
        x, y = random_element(r, shape), random_element(r, shape)
        for companion in (left_companion(g), right_companion(g)):
            for t in (0.3, -1.8):
                lhs = evaluate(companion, t, x @ y)
                rhs = evaluate(companion, t, x) @ evaluate(companion, t, y)
                assert (lhs - rhs).norm() <= 1e-10 * x.norm() * y.norm()

    def test_lipschitz_continuity_bound(self):
        r = rng(13)
        shape = BlockShape([2, 3])
        g = random_flow(r, shape, 2.0)
        x = random_element(r, shape)
        budget = g.h_left.norm() + g.h_right.norm()
        for t in (1e-3, 0.05, 0.4, 1.0):
            drift = (evaluate(g, t, x) - x).norm()
            assert drift <= t * budget * x.norm() * (1 + 1e-8)
