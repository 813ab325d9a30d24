"""Finite-dimensional C*-algebra core.

The ambient algebra is a direct sum of full complex matrix blocks,
``A = M_{n_1} + ... + M_{n_m}``.  Elements are stored as dense complex
blocks; the norm is the largest singular value over the blocks, which is
the C*-norm of the direct sum.  Hermitian functional calculus and complex
powers of strictly positive elements are built on blockwise
eigendecompositions.

Tolerances follow double-precision headroom at desk scale (block
dimensions up to 64): ``HERM_TOL`` and ``POS_TOL_FACTOR`` are relative
1e-10, ``EIG_TOL`` relative 1e-9.  Functional calculus always symmetrizes
its input as ``(H + H*)/2`` first, so it is total on near-Hermitian
input.  Eigenvalues are returned in ascending order; the ordering never
affects any result, only the reproducibility of intermediate dumps.

All values are immutable after construction and every operation is a
pure function, so everything here is safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import EigFailureError, NotStrictlyPositiveError, ShapeMismatchError

HERM_TOL = 1e-10
EIG_TOL = 1e-9
POS_TOL_FACTOR = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class BlockShape:
    """Ordered block dimensions ``n_1, ..., n_m`` of the algebra."""

    block_dims: tuple[int, ...]

    def __init__(self, block_dims: Iterable[int]):
        dims = tuple(int(n) for n in block_dims)
        if len(dims) < 1:
            raise ValueError("block shape needs at least one block")
        if any(n < 1 for n in dims):
            raise ValueError("every block dimension must be >= 1")
        object.__setattr__(self, "block_dims", dims)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def dim(self) -> int:
        """Complex dimension of the algebra, sum of ``n_k**2``."""
        return sum(n * n for n in self.block_dims)

    def __iter__(self):
        return iter(self.block_dims)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Element of the block algebra: one dense complex matrix per block."""

    shape: BlockShape
    blocks: tuple[np.ndarray, ...]

    def __init__(self, shape: BlockShape, blocks: Sequence[np.ndarray]):
        mats = tuple(_frozen(b) for b in blocks)
        if len(mats) != shape.num_blocks:
            raise ShapeMismatchError("number of blocks does not match shape")
        for n, b in zip(shape.block_dims, mats):
            if b.shape != (n, n):
                raise ShapeMismatchError(f"block of shape {b.shape}, expected ({n}, {n})")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", mats)

    @staticmethod
    def from_blocks(blocks: Sequence[np.ndarray]) -> "AlgebraElement":
        mats = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks]
        return AlgebraElement(BlockShape(m.shape[0] for m in mats), mats)

    def star(self) -> "AlgebraElement":
        """Adjoint: blockwise conjugate transpose."""
        return AlgebraElement(self.shape, [b.conj().T for b in self.blocks])

    def norm(self) -> float:
        """C*-norm: largest singular value over the blocks."""
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks)

    def hs_dot(self, other: "AlgebraElement") -> complex:
        """Hilbert-Schmidt pairing ``sum_k tr(self_k* other_k)``."""
        _same_shape(self, other)
        return complex(sum(np.vdot(a, b) for a, b in zip(self.blocks, other.blocks)))

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks))

    def is_hermitian(self, tol: float = HERM_TOL) -> bool:
        scale = max(self.norm(), 1e-300)
        return (self - self.star()).norm() <= tol * scale

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same_shape(self, other)
        return AlgebraElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same_shape(self, other)
        return AlgebraElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.shape, [-b for b in self.blocks])

    def __mul__(self, c: complex) -> "AlgebraElement":
        return AlgebraElement(self.shape, [c * b for b in self.blocks])

    __rmul__ = __mul__

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return mul(self, other)

    def __repr__(self) -> str:
        return f"AlgebraElement(dims={self.shape.block_dims}, norm={self.norm():.6g})"


def _same_shape(x: AlgebraElement, y: AlgebraElement) -> None:
    if x.shape != y.shape:
        raise ShapeMismatchError(f"shapes differ: {x.shape} vs {y.shape}")


def zeros(shape: BlockShape) -> AlgebraElement:
    return AlgebraElement(shape, [np.zeros((n, n), dtype=complex) for n in shape])


def identity(shape: BlockShape) -> AlgebraElement:
    return AlgebraElement(shape, [np.eye(n, dtype=complex) for n in shape])


def star(x: AlgebraElement) -> AlgebraElement:
    return x.star()


def mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Blockwise matrix product; submultiplicative for the C*-norm."""
    _same_shape(x, y)
    return AlgebraElement(x.shape, [a @ b for a, b in zip(x.blocks, y.blocks)])


def op_norm(x: AlgebraElement) -> float:
    return x.norm()


@dataclass(frozen=True, eq=False)
class HermitianElement:
    """Algebra element that is Hermitian within ``HERM_TOL`` (relative)."""

    value: AlgebraElement

    def __post_init__(self):
        if not self.value.is_hermitian():
            raise ValueError("element is not Hermitian within tolerance")

    @property
    def shape(self) -> BlockShape:
        return self.value.shape

    def norm(self) -> float:
        return self.value.norm()

    @staticmethod
    def from_blocks(blocks: Sequence[np.ndarray]) -> "HermitianElement":
        return HermitianElement(AlgebraElement.from_blocks(blocks))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Blockwise eigendata ``H_k = U_k diag(lam_k) U_k*`` with unitary U_k.

    Eigenvalues are real and ascending within each block.
    """

    shape: BlockShape
    eigenvalues: tuple[np.ndarray, ...]
    eigenvectors: tuple[np.ndarray, ...]

    def apply(self, f: Callable[[np.ndarray], np.ndarray]) -> AlgebraElement:
        """``f`` applied to the eigenvalues in the eigenbasis."""
        out = []
        for lam, u in zip(self.eigenvalues, self.eigenvectors):
            fl = _apply_scalar_function(f, lam)
            out.append((u * fl) @ u.conj().T)
        return AlgebraElement(self.shape, out)

    def reconstruct(self) -> AlgebraElement:
        return self.apply(lambda lam: lam)


def _apply_scalar_function(f, lam: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(f(lam), dtype=complex)
        if out.shape == lam.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([complex(f(v)) for v in lam])


def _symmetrized_blocks(h: AlgebraElement) -> list[np.ndarray]:
    return [(b + b.conj().T) / 2.0 for b in h.blocks]


def spectral(h: HermitianElement | AlgebraElement) -> SpectralDecomposition:
    """Eigendecompose ``(H + H*)/2`` blockwise."""
    x = h.value if isinstance(h, HermitianElement) else h
    vals, vecs = [], []
    for b in _symmetrized_blocks(x):
        try:
            lam, u = np.linalg.eigh(b)
        except np.linalg.LinAlgError as exc:
            raise EigFailureError(str(exc)) from exc
        lam = np.asarray(lam, dtype=float)
        lam.flags.writeable = False
        vals.append(lam)
        vecs.append(_frozen(u))
    return SpectralDecomposition(x.shape, tuple(vals), tuple(vecs))


def herm_calculus(h: HermitianElement | AlgebraElement, f) -> AlgebraElement:
    """Apply a scalar function to a Hermitian element through its spectrum."""
    return spectral(h).apply(f)


def eigenvalues(h: HermitianElement | AlgebraElement) -> np.ndarray:
    """All eigenvalues of the symmetrized element, ascending per block."""
    return np.concatenate([lam for lam in spectral(h).eigenvalues])


def is_strictly_positive(t: AlgebraElement, pos_tol_factor: float = POS_TOL_FACTOR) -> bool:
    """True iff Hermitian within tolerance with spectrum > ``1e-10 * norm``."""
    if not t.is_hermitian():
        return False
    lam = eigenvalues(t)
    return bool(np.min(lam) > pos_tol_factor * t.norm())


def power(t: AlgebraElement, z: complex) -> AlgebraElement:
    """Complex power ``T**z`` of a strictly positive element.

    Computed as ``exp(z * log lam)`` on the spectrum, so ``T**0 = 1``,
    ``T**1 = T`` and the group law ``T**y T**z = T**(y+z)`` hold up to
    rounding.  Raises ``NotStrictlyPositiveError`` when the spectrum is
    not bounded below by ``POS_TOL_FACTOR * norm(T)``.
    """
    if not t.is_hermitian():
        raise NotStrictlyPositiveError("element is not Hermitian")
    sd = spectral(t)
    lo = min(float(np.min(lam)) for lam in sd.eigenvalues)
    if lo <= POS_TOL_FACTOR * t.norm():
        raise NotStrictlyPositiveError(f"minimum eigenvalue {lo:.3e} too small")
    return sd.apply(lambda lam: np.exp(z * np.log(lam)))
