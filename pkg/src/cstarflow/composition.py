"""Commuting pairs of flows, their product flow, and tensor products.

For commuting flows ``alpha`` and ``beta`` the product flow
``gamma_t = alpha_t beta_t`` has generators ``(H^a_l + H^b_l, H^a_r + H^b_r)``
and its continuation factors as ``gamma_z = alpha_z beta_z = beta_z alpha_z``.
The two-variable smear

    x(n, z) = (n^2/pi) * iint exp(-n^2((s-z)^2 + (t-z)^2)) alpha_s(beta_t(x)) ds dt

is evaluated with a tensorized Gauss-Hermite rule, one substitution per
axis, and by Fubini agrees with the composition of one-variable smears.

Tensor products are realized on the Kronecker algebra: the minimal
C*-tensor norm is the unique one on matrix algebras, so
``norm(x (x) y) = norm(x) norm(y)`` and blockwise Kronecker products
model the whole construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, BlockShape, HermitianElement
from .continuation import _hermgauss, continue_exact, min_nodes
from .errors import NodesTooFewError, NotCommutingError, ShapeMismatchError
from .flows import FlowGenerator

COMM_TOL = 1e-10


def _commutator_excess(a: HermitianElement, b: HermitianElement) -> float:
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        return 0.0
    comm = a.value @ b.value - b.value @ a.value
    return comm.norm() - COMM_TOL * na * nb


@dataclass(frozen=True, eq=False)
class CommutingPair:
    """Two flows over one shape whose generator pairs commute sidewise.

    Commutation of ``H^a_l`` with ``H^b_l`` and of ``H^a_r`` with
    ``H^b_r`` is the structural condition that makes
    ``alpha_s beta_t = beta_t alpha_s`` exact; construction raises
    ``NotCommutingError`` when it fails at tolerance ``COMM_TOL``
    (absolute on normalized generators).
    """

    alpha: FlowGenerator
    beta: FlowGenerator

    def __post_init__(self):
        if self.alpha.shape != self.beta.shape:
            raise ShapeMismatchError("commuting pair must share one block shape")
        if _commutator_excess(self.alpha.h_left, self.beta.h_left) > 0:
            raise NotCommutingError("left generators do not commute")
        if _commutator_excess(self.alpha.h_right, self.beta.h_right) > 0:
            raise NotCommutingError("right generators do not commute")

    @property
    def shape(self) -> BlockShape:
        return self.alpha.shape


def product_flow(p: CommutingPair) -> FlowGenerator:
    """Generator of ``gamma_t = alpha_t beta_t``: the sidewise sums."""
    return FlowGenerator(
        HermitianElement(p.alpha.h_left.value + p.beta.h_left.value),
        HermitianElement(p.alpha.h_right.value + p.beta.h_right.value),
    )


def gamma_continuation_check(p: CommutingPair, z: complex, x: AlgebraElement) -> float:
    """Residual of ``gamma_z = alpha_z beta_z = beta_z alpha_z`` on ``x``."""
    g = product_flow(p)
    gz = continue_exact(g, z, x)
    ab = continue_exact(p.alpha, z, continue_exact(p.beta, z, x))
    ba = continue_exact(p.beta, z, continue_exact(p.alpha, z, x))
    return max((gz - ab).norm(), (gz - ba).norm())


def _propagators(g: FlowGenerator, points: np.ndarray):
    """Left and right conjugation factors of ``g`` at an array of times."""
    left, right = [], []
    for lam, ul, mu, ur in zip(
        g.spectral_left.eigenvalues,
        g.spectral_left.eigenvectors,
        g.spectral_right.eigenvalues,
        g.spectral_right.eigenvectors,
    ):
        phases_l = np.exp(1j * np.outer(points, lam))
        phases_r = np.exp(-1j * np.outer(points, mu))
        left.append(np.einsum("jk,ik,lk->ijl", ul, phases_l, ul.conj()))
        right.append(np.einsum("jk,ik,lk->ijl", ur, phases_r, ur.conj()))
    return left, right


def double_smear(
    p: CommutingPair,
    x: AlgebraElement,
    n: float,
    z: complex = 0.0,
    nodes: tuple[int, int] | None = None,
) -> AlgebraElement:
    """Two-variable Gaussian smear of ``x`` along the commuting pair.

    Uses a tensorized Gauss-Hermite rule over the (s, t) grid; node
    counts default to the one-axis admissibility rule per flow and may
    only be raised (``NodesTooFewError`` otherwise).
    """
    if n <= 0:
        raise ValueError("smearing index n must be positive")
    z = complex(z)
    need_s, need_t = min_nodes(p.alpha, n, z), min_nodes(p.beta, n, z)
    if nodes is None:
        nodes = (need_s, need_t)
    if nodes[0] < need_s or nodes[1] < need_t:
        raise NodesTooFewError(f"axis node counts {nodes} below ({need_s}, {need_t})")
    s_pts, s_w = _hermgauss(nodes[0])
    t_pts, t_w = _hermgauss(nodes[1])
    growth = math.exp(2.0 * n * n * z.imag * z.imag) / math.pi
    cs = s_w * np.exp(2j * n * z.imag * s_pts)
    ct = t_w * np.exp(2j * n * z.imag * t_pts)
    la, ra = _propagators(p.alpha, z.real + s_pts / n)
    lb, rb = _propagators(p.beta, z.real + t_pts / n)
    out = []
    for b, xb in enumerate(x.blocks):
        inner = np.einsum("jab,bc,jcd->jad", lb[b], xb, rb[b])
        acc = np.zeros_like(xb)
        for i in range(nodes[0]):
            for j in range(nodes[1]):
                acc += (cs[i] * ct[j]) * (la[b][i] @ inner[j] @ ra[b][i])
        out.append(growth * acc)
    return AlgebraElement(x.shape, out)


def tensor_element(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Kronecker product ``x (x) y`` on the tensor-product algebra."""
    blocks = [np.kron(xb, yb) for xb in x.blocks for yb in y.blocks]
    dims = [na * nb for na in x.shape for nb in y.shape]
    return AlgebraElement(BlockShape(dims), blocks)


@dataclass(frozen=True, eq=False)
class TensorFlow:
    """Tensor product of two flows with its Kronecker-algebra generator."""

    alpha: FlowGenerator
    beta: FlowGenerator
    product: FlowGenerator


def tensor_flow(alpha: FlowGenerator, beta: FlowGenerator) -> TensorFlow:
    """Flow ``(alpha (x) beta)_t`` with generators ``H (x) 1 + 1 (x) H'``."""

    def combine(ha: AlgebraElement, hb: AlgebraElement) -> HermitianElement:
        blocks = [
            np.kron(a, np.eye(b.shape[0])) + np.kron(np.eye(a.shape[0]), b)
            for a in ha.blocks
            for b in hb.blocks
        ]
        dims = [a * b for a in ha.shape for b in hb.shape]
        return HermitianElement(AlgebraElement(BlockShape(dims), blocks))

    product = FlowGenerator(
        combine(alpha.h_left.value, beta.h_left.value),
        combine(alpha.h_right.value, beta.h_right.value),
    )
    return TensorFlow(alpha, beta, product)


def tensor_continuation_check(
    tf: TensorFlow, z: complex, x: AlgebraElement, y: AlgebraElement
) -> float:
    """Residual of ``(alpha (x) beta)_z (x (x) y) = alpha_z(x) (x) beta_z(y)``."""
    lhs = continue_exact(tf.product, z, tensor_element(x, y))
    rhs = tensor_element(
        continue_exact(tf.alpha, z, x), continue_exact(tf.beta, z, y)
    )
    return (lhs - rhs).norm()
