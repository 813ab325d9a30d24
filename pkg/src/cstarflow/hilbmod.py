"""Hilbert modules ``E = A^k`` over the block algebra and their operators.

Module vectors are k-tuples of algebra elements with the A-valued inner
product ``<v, w> = sum_i w_i* v_i`` (linear in the first variable, right
A-linear).  Adjointable operators on E form ``M_k(A)``, stored as a k x k
grid of algebra elements; flattening the grid blockwise identifies the
operator algebra with a direct sum of full matrix blocks of size
``k * n_b``, which is how norms, positivity and complex powers are
computed.  At finite dimension every module map with an adjoint is
bounded, so no unbounded-operator bookkeeping appears anywhere.

Sub-C*-algebras of the operator algebra are handled through an
orthonormal Hilbert-Schmidt basis of the span generated by a finite set
of operators; membership tests are orthogonal projections onto that
span, which keeps them basis-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    POS_TOL_FACTOR,
    AlgebraElement,
    BlockShape,
    identity,
    zeros,
)
from .errors import EigFailureError, NotStrictlyPositiveError, ShapeMismatchError

SPAN_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ModuleVector:
    """Element of ``E = A^k``: a tuple of algebra elements."""

    entries: tuple[AlgebraElement, ...]

    def __init__(self, entries: Sequence[AlgebraElement]):
        entries = tuple(entries)
        if not entries:
            raise ValueError("module vector needs at least one entry")
        shape = entries[0].shape
        if any(e.shape != shape for e in entries):
            raise ShapeMismatchError("module vector entries over different shapes")
        object.__setattr__(self, "entries", entries)

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> BlockShape:
        return self.entries[0].shape

    def times(self, a: AlgebraElement) -> "ModuleVector":
        """Right module action ``v . a``."""
        return ModuleVector([e @ a for e in self.entries])

    def norm(self) -> float:
        """Module norm ``norm(<v, v>)**0.5``."""
        return float(np.sqrt(inner(self, self).norm()))

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        _same_module(self, other)
        return ModuleVector([a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        _same_module(self, other)
        return ModuleVector([a - b for a, b in zip(self.entries, other.entries)])

    def __mul__(self, c: complex) -> "ModuleVector":
        return ModuleVector([c * e for e in self.entries])

    __rmul__ = __mul__


def _same_module(v, w) -> None:
    if v.k != w.k or v.shape != w.shape:
        raise ShapeMismatchError("module ranks or shapes differ")


def inner(v: ModuleVector, w: ModuleVector) -> AlgebraElement:
    """A-valued inner product ``sum_i w_i* v_i``, linear in ``v``."""
    _same_module(v, w)
    out = zeros(v.shape)
    for a, b in zip(v.entries, w.entries):
        out = out + (b.star() @ a)
    return out


@dataclass(frozen=True, eq=False)
class ModuleOperator:
    """Adjointable operator on ``E = A^k``: a k x k grid of algebra elements."""

    entries: tuple[tuple[AlgebraElement, ...], ...]

    def __init__(self, entries: Sequence[Sequence[AlgebraElement]]):
        grid = tuple(tuple(row) for row in entries)
        k = len(grid)
        if k < 1 or any(len(row) != k for row in grid):
            raise ShapeMismatchError("operator grid must be square")
        shape = grid[0][0].shape
        if any(e.shape != shape for row in grid for e in row):
            raise ShapeMismatchError("operator entries over different shapes")
        object.__setattr__(self, "entries", grid)

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> BlockShape:
        return self.entries[0][0].shape

    def star(self) -> "ModuleOperator":
        """Adjoint: ``(S*)_{ij} = (S_{ji})*``."""
        k = self.k
        return ModuleOperator(
            [[self.entries[j][i].star() for j in range(k)] for i in range(k)]
        )

    def flatten(self) -> list[np.ndarray]:
        """One dense ``(k n_b) x (k n_b)`` matrix per algebra block."""
        out = []
        for b in range(self.shape.num_blocks):
            out.append(
                np.block(
                    [[e.blocks[b] for e in row] for row in self.entries]
                )
            )
        return out

    def norm(self) -> float:
        """Operator norm on E: largest singular value over flattened blocks."""
        return max(float(np.linalg.norm(f, 2)) for f in self.flatten())

    def __add__(self, other: "ModuleOperator") -> "ModuleOperator":
        _same_module(self, other)
        return ModuleOperator(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other: "ModuleOperator") -> "ModuleOperator":
        _same_module(self, other)
        return ModuleOperator(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __mul__(self, c: complex) -> "ModuleOperator":
        return ModuleOperator([[c * e for e in row] for row in self.entries])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, ModuleVector):
            _same_module(self, other)
            return ModuleVector(
                [
                    _sum_elements([e @ v for e, v in zip(row, other.entries)])
                    for row in self.entries
                ]
            )
        _same_module(self, other)
        k = self.k
        return ModuleOperator(
            [
                [
                    _sum_elements(
                        [self.entries[i][m] @ other.entries[m][j] for m in range(k)]
                    )
                    for j in range(k)
                ]
                for i in range(k)
            ]
        )

    def __repr__(self) -> str:
        return f"ModuleOperator(k={self.k}, dims={self.shape.block_dims})"


def _sum_elements(elems: list[AlgebraElement]) -> AlgebraElement:
    out = elems[0]
    for e in elems[1:]:
        out = out + e
    return out


def operator_from_flat(shape: BlockShape, k: int, flats: Sequence[np.ndarray]) -> ModuleOperator:
    """Inverse of ``ModuleOperator.flatten``."""
    grid = []
    for i in range(k):
        row = []
        for j in range(k):
            blocks = []
            for n, f in zip(shape.block_dims, flats):
                blocks.append(f[i * n : (i + 1) * n, j * n : (j + 1) * n])
            row.append(AlgebraElement(shape, blocks))
        grid.append(row)
    return ModuleOperator(grid)


def identity_operator(shape: BlockShape, k: int) -> ModuleOperator:
    one, zero = identity(shape), zeros(shape)
    return ModuleOperator([[one if i == j else zero for j in range(k)] for i in range(k)])


def zero_operator(shape: BlockShape, k: int) -> ModuleOperator:
    zero = zeros(shape)
    return ModuleOperator([[zero for _ in range(k)] for _ in range(k)])


def zero_vector(shape: BlockShape, k: int) -> ModuleVector:
    return ModuleVector([zeros(shape) for _ in range(k)])


def op_adjoint(s: ModuleOperator) -> ModuleOperator:
    return s.star()


def is_unitary(s: ModuleOperator, tol: float = 1e-10) -> bool:
    one = identity_operator(s.shape, s.k)
    return (s.star() @ s - one).norm() <= tol and (s @ s.star() - one).norm() <= tol


def _flat_eigh(s: ModuleOperator):
    vals, vecs = [], []
    for f in s.flatten():
        try:
            lam, u = np.linalg.eigh((f + f.conj().T) / 2.0)
        except np.linalg.LinAlgError as exc:
            raise EigFailureError(str(exc)) from exc
        vals.append(lam)
        vecs.append(u)
    return vals, vecs


def strictly_positive(s: ModuleOperator, pos_tol_factor: float = POS_TOL_FACTOR) -> bool:
    """Hermitian with spectrum above ``1e-10 * norm`` on every block."""
    if (s - s.star()).norm() > 1e-10 * max(s.norm(), 1e-300):
        return False
    vals, _ = _flat_eigh(s)
    lo = min(float(np.min(v)) for v in vals)
    return lo > pos_tol_factor * s.norm()


def op_power(t: ModuleOperator, z: complex) -> ModuleOperator:
    """Complex power ``T**z`` of a strictly positive module operator."""
    if not strictly_positive(t):
        raise NotStrictlyPositiveError("module operator is not strictly positive")
    vals, vecs = _flat_eigh(t)
    flats = [
        (u * np.exp(z * np.log(lam.astype(complex)))) @ u.conj().T
        for lam, u in zip(vals, vecs)
    ]
    return operator_from_flat(t.shape, t.k, flats)


def op_log(t: ModuleOperator) -> ModuleOperator:
    """Hermitian logarithm of a strictly positive module operator."""
    if not strictly_positive(t):
        raise NotStrictlyPositiveError("module operator is not strictly positive")
    vals, vecs = _flat_eigh(t)
    flats = [(u * np.log(lam)) @ u.conj().T for lam, u in zip(vals, vecs)]
    return operator_from_flat(t.shape, t.k, flats)


def op_exp(h: ModuleOperator) -> ModuleOperator:
    """Exponential of a Hermitian module operator; strictly positive."""
    vals, vecs = _flat_eigh(h)
    flats = [(u * np.exp(lam)) @ u.conj().T for lam, u in zip(vals, vecs)]
    return operator_from_flat(h.shape, h.k, flats)


def condition_number(t: ModuleOperator) -> float:
    vals, _ = _flat_eigh(t)
    hi = max(float(np.max(v)) for v in vals)
    lo = min(float(np.min(v)) for v in vals)
    if lo <= 0:
        return float("inf")
    return hi / lo


def operator_vec(s: ModuleOperator) -> np.ndarray:
    """Hilbert-Schmidt coordinates of an operator (flattened blocks)."""
    return np.concatenate([f.ravel() for f in s.flatten()])


def vector_coordinates(v: ModuleVector) -> np.ndarray:
    """Complex coordinates of a module vector, slot-major then blockwise."""
    return np.concatenate([b.ravel() for e in v.entries for b in e.blocks])


def vector_from_coordinates(shape: BlockShape, k: int, coords: np.ndarray) -> ModuleVector:
    entries, pos = [], 0
    for _ in range(k):
        blocks = []
        for n in shape.block_dims:
            blocks.append(coords[pos : pos + n * n].reshape(n, n))
            pos += n * n
        entries.append(AlgebraElement(shape, blocks))
    return ModuleVector(entries)


def operator_matrix(s: ModuleOperator) -> np.ndarray:
    """Matrix of ``v -> S v`` in the ``vector_coordinates`` basis."""
    dims = s.shape.block_dims
    cell = sum(n * n for n in dims)
    d = s.k * cell
    out = np.zeros((d, d), dtype=complex)
    for i in range(s.k):
        for j in range(s.k):
            pos = 0
            for b, n in enumerate(dims):
                blk = np.kron(s.entries[i][j].blocks[b], np.eye(n))
                r = i * cell + pos
                c = j * cell + pos
                out[r : r + n * n, c : c + n * n] = blk
                pos += n * n
    return out


class SubalgebraBasis:
    """Orthonormal Hilbert-Schmidt basis of a generated *-subalgebra.

    The span of the generators is closed under adjoints and products,
    orthonormalized, and required to act nondegenerately: the unit of
    the span (its Hilbert-Schmidt projection of the identity) must be
    the identity operator.
    """

    def __init__(self, generators: Sequence[ModuleOperator], span_tol: float = SPAN_TOL):
        generators = list(generators)
        if not generators:
            raise ValueError("need at least one generator")
        self.generators = tuple(generators)
        self.span_tol = float(span_tol)
        self._shape = generators[0].shape
        self._k = generators[0].k
        self._build()
        self._check_nondegenerate()

    @property
    def shape(self) -> BlockShape:
        return self._shape

    @property
    def k(self) -> int:
        return self._k

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _build(self) -> None:
        scale = max(max(g.norm() for g in self.generators), 1.0)
        tol = self.span_tol * scale
        rows: list[np.ndarray] = []
        ops: list[ModuleOperator] = []
        pending = list(self.generators) + [g.star() for g in self.generators]
        while pending:
            cand = pending.pop(0)
            vec = operator_vec(cand)
            for _ in range(2):  # twice-is-enough reorthogonalization
                for row in rows:
                    vec = vec - np.vdot(row, vec) * row
            nrm = float(np.linalg.norm(vec))
            if nrm <= tol:
                continue
            vec = vec / nrm
            new_flats = _unvec_flats(self._shape, self._k, vec)
            new_op = operator_from_flat(self._shape, self._k, new_flats)
            rows.append(vec)
            ops.append(new_op)
            pending.append(new_op.star())
            for other in ops:
                pending.append(new_op @ other)
                pending.append(other @ new_op)
        self.basis = tuple(ops)
        self._q = np.stack(rows)

    def _check_nondegenerate(self) -> None:
        one = identity_operator(self._shape, self._k)
        defect = (self.unit() - one).norm()
        if defect > 1e-8:
            raise ValueError(
                f"subalgebra acts degenerately: unit differs from identity by {defect:.3e}"
            )

    def unit(self) -> ModuleOperator:
        """Unit of the span: HS projection of the identity operator."""
        proj, _ = self.project(identity_operator(self._shape, self._k))
        return proj

    def project(self, s: ModuleOperator) -> tuple[ModuleOperator, float]:
        """Orthogonal HS projection onto the span and the residual norm."""
        vec = operator_vec(s)
        coeffs = self._q.conj() @ vec
        proj_vec = self._q.T @ coeffs
        resid = float(np.linalg.norm(vec - proj_vec))
        proj = operator_from_flat(
            self._shape, self._k, _unvec_flats(self._shape, self._k, proj_vec)
        )
        return proj, resid

    def residual(self, s: ModuleOperator) -> float:
        return self.project(s)[1]

    def contains(self, s: ModuleOperator, tol: float | None = None) -> bool:
        tol = self.span_tol if tol is None else tol
        return self.residual(s) <= tol * max(1.0, s.norm())


def _unvec_flats(shape: BlockShape, k: int, vec: np.ndarray) -> list[np.ndarray]:
    flats, pos = [], 0
    for n in shape.block_dims:
        size = (k * n) * (k * n)
        flats.append(vec[pos : pos + size].reshape(k * n, k * n))
        pos += size
    return flats


def matrix_unit_operators(shape: BlockShape, k: int) -> list[ModuleOperator]:
    """Flattened matrix units: a linear basis of the full operator algebra."""
    out = []
    for b, n in enumerate(shape.block_dims):
        m = k * n
        for r in range(m):
            for c in range(m):
                flats = [np.zeros((k * nn, k * nn), dtype=complex) for nn in shape.block_dims]
                flats[b][r, c] = 1.0
                out.append(operator_from_flat(shape, k, flats))
    return out


def affiliation_test(
    alpha: ModuleOperator,
    basis: SubalgebraBasis,
    t_samples: Sequence[float],
    tol: float = 1e-8,
) -> bool:
    """Does the unitary group of ``alpha`` act inside the subalgebra?

    True iff ``alpha**(it) b`` stays in the span for every sampled ``t``
    and every basis element ``b`` (Hilbert-Schmidt projection residual
    below ``tol * norm(b)``), together with a Lipschitz probe at two
    nearby times standing in for norm continuity.  ``alpha`` must be
    strictly positive.
    """
    if not strictly_positive(alpha):
        raise NotStrictlyPositiveError("affiliation test needs a strictly positive operator")
    log_norm = op_log(alpha).norm()
    for t in t_samples:
        u = op_power(alpha, 1j * float(t))
        for b in basis.basis:
            if basis.residual(u @ b) > tol * max(b.norm(), 1e-300):
                return False
    delta = 1e-3 / max(1.0, log_norm)
    u_delta = op_power(alpha, 1j * delta)
    for b in basis.basis:
        drift = (u_delta @ b - b).norm()
        if drift > delta * log_norm * b.norm() * (1.0 + 1e-8) + 1e-12:
            return False
    return True
