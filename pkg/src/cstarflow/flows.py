"""One-parameter flows ``alpha_t(x) = exp(itH_l) x exp(-itH_r)``.

A flow is represented by its generator pair ``(H_l, H_r)`` of Hermitian
elements, never by sampled maps; evaluation goes through the cached
eigendecompositions of the generators, which makes every flow entire in
the parameter for free.  Two-sided unitary conjugation is isometric, so
the contractivity axiom is automatic and the constructor does not admit
non-isometric flows.

With ``H_l = H_r`` the flow is an automorphism group.  The companion
flows ``(H_l, H_l)`` and ``(H_r, H_r)`` make every flow in this family
semi-multiplicative:

    alpha^l_t(b) alpha_t(a) = alpha_t(b a)
    alpha_t(a) alpha^r_t(b) = alpha_t(a b)
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import (
    AlgebraElement,
    BlockShape,
    HermitianElement,
    SpectralDecomposition,
    spectral,
    zeros,
)
from .errors import ShapeMismatchError


@dataclass(frozen=True, eq=False)
class FlowGenerator:
    """Generator pair of a one-parameter flow on the block algebra."""

    h_left: HermitianElement
    h_right: HermitianElement

    def __post_init__(self):
        if self.h_left.shape != self.h_right.shape:
            raise ShapeMismatchError("generator pair must share one block shape")

    @property
    def shape(self) -> BlockShape:
        return self.h_left.shape

    @property
    def is_automorphism(self) -> bool:
        """True when the two generators are bit-identical."""
        return all(
            np.array_equal(a, b)
            for a, b in zip(self.h_left.value.blocks, self.h_right.value.blocks)
        )

    @cached_property
    def spectral_left(self) -> SpectralDecomposition:
        return spectral(self.h_left)

    @cached_property
    def spectral_right(self) -> SpectralDecomposition:
        return spectral(self.h_right)

    def generator_norm(self) -> float:
        """``norm(H_l) + norm(H_r)``, the frequency budget of the flow."""
        return self.h_left.norm() + self.h_right.norm()

    @staticmethod
    def automorphism(h: HermitianElement) -> "FlowGenerator":
        return FlowGenerator(h, h)

    @staticmethod
    def trivial(shape: BlockShape) -> "FlowGenerator":
        z = HermitianElement(zeros(shape))
        return FlowGenerator(z, z)


def conjugate(g: FlowGenerator, z: complex, x: AlgebraElement) -> AlgebraElement:
    """``exp(izH_l) x exp(-izH_r)`` for any complex ``z``.

    This single code path serves both real-time evaluation and analytic
    continuation; at finite dimension the map is entire in ``z``.
    """
    if x.shape != g.shape:
        raise ShapeMismatchError("element and flow live over different shapes")
    out = []
    for lam, ul, mu, ur, xb in zip(
        g.spectral_left.eigenvalues,
        g.spectral_left.eigenvectors,
        g.spectral_right.eigenvalues,
        g.spectral_right.eigenvectors,
        x.blocks,
    ):
        el = (ul * np.exp(1j * z * lam)) @ ul.conj().T
        er = (ur * np.exp(-1j * z * mu)) @ ur.conj().T
        out.append(el @ xb @ er)
    return AlgebraElement(x.shape, out)


def evaluate(g: FlowGenerator, t: float, x: AlgebraElement) -> AlgebraElement:
    """Flow at real time ``t``; isometric, with ``alpha_0 = id``."""
    return conjugate(g, float(t), x)


def left_companion(g: FlowGenerator) -> FlowGenerator:
    """The automorphism group generated by ``H_l`` on both sides."""
    return FlowGenerator(g.h_left, g.h_left)


def right_companion(g: FlowGenerator) -> FlowGenerator:
    """The automorphism group generated by ``H_r`` on both sides."""
    return FlowGenerator(g.h_right, g.h_right)


def check_group_law(
    g: FlowGenerator, s: float, t: float, sample: list[AlgebraElement]
) -> float:
    """Max over the sample of ``norm(alpha_s(alpha_t(x)) - alpha_{s+t}(x))``."""
    worst = 0.0
    for x in sample:
        resid = (evaluate(g, s, evaluate(g, t, x)) - evaluate(g, s + t, x)).norm()
        worst = max(worst, resid)
    return worst
