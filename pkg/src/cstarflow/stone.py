"""Generator recovery for unitary one-parameter groups on Hilbert modules.

Every norm-continuous unitary one-parameter group on a finite
Hilbert module is ``u_t = T**(it)`` for a unique strictly positive
module operator ``T``; this module recovers ``T`` from a sampled group.
Recovery takes the principal matrix logarithm of ``u(t0)`` and guards
the branch with a halving consistency check: the step is accepted only
once ``log u(t0) = 2 log u(t0/2)`` within tolerance, halving ``t0``
otherwise (finite differences are kept as an independent test oracle
only; the logarithm route has spectral accuracy).

The localization machinery turns a positive functional ``omega`` on the
algebra (a block density element ``rho`` with ``omega(a) = sum_k
tr(rho_k a_k)``) into a concrete Hilbert space: the Gram form
``omega(<v, w>)`` on a standard basis of E is eigendecomposed, its
numerically nonzero part (relative cutoff ``GNS_TOL``) is kept, and

    <L(v), L(w)> = omega(<v, w>)

holds for the resulting map ``L`` onto C^d.  Module operators induce
d x d matrices through ``S_w L(v) = L(S v)``; the induction is a
*-homomorphism, compatible with complex powers of strictly positive
operators, and a faithful family of states separates operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .algebra import AlgebraElement, BlockShape, identity, is_strictly_positive
from .errors import (
    BranchAmbiguityError,
    FamilyNotFaithfulError,
    IllDefinedError,
    NotAGroupError,
    ZeroFunctionalError,
)
from .hilbmod import (
    ModuleOperator,
    ModuleVector,
    op_exp,
    operator_from_flat,
    operator_matrix,
    strictly_positive,
    vector_coordinates,
)

GNS_TOL = 1e-10
PROBE_MULTIPLES = (1, 2, 10)


@dataclass(frozen=True, eq=False)
class PositiveFunctional:
    """Positive functional on the algebra, given by a density element."""

    rho: AlgebraElement

    def __post_init__(self):
        r = self.rho
        scale = max(r.norm(), 1e-300)
        if (r - r.star()).norm() > 1e-12 * scale:
            raise ValueError("density element is not Hermitian")
        lo = min(float(np.min(np.linalg.eigvalsh((b + b.conj().T) / 2))) for b in r.blocks)
        if lo < -1e-12 * scale:
            raise ValueError(f"density element has negative eigenvalue {lo:.3e}")

    @property
    def shape(self) -> BlockShape:
        return self.rho.shape

    def value(self, a: AlgebraElement) -> complex:
        """``sum_k tr(rho_k a_k)``."""
        return complex(sum(np.trace(r @ b) for r, b in zip(self.rho.blocks, a.blocks)))

    def total_mass(self) -> float:
        return self.value(identity(self.shape)).real

    def as_state(self) -> "PositiveFunctional":
        """Normalize so the total trace of the density is one."""
        mass = self.total_mass()
        if mass <= 0:
            raise ZeroFunctionalError("cannot normalize a vanishing functional")
        return PositiveFunctional((1.0 / mass) * self.rho)


@dataclass(frozen=True, eq=False)
class SampledUnitaryGroup:
    """A one-parameter unitary group given only through an evaluator.

    The evaluator must be safe to invoke concurrently; results are never
    cached across operations.
    """

    evaluator: Callable[[float], ModuleOperator]

    def __call__(self, t: float) -> ModuleOperator:
        return self.evaluator(float(t))

    def probe(self, t0: float) -> None:
        """Cheap group-invariant checks; raises ``NotAGroupError``."""
        u0 = self(0.0)
        one = self._identity_like(u0)
        if (u0 - one).norm() > 1e-10:
            raise NotAGroupError("u(0) differs from the identity")
        for m in PROBE_MULTIPLES:
            t = m * t0
            ut, umt = self(t), self(-t)
            if (ut.star() @ ut - one).norm() > 1e-9:
                raise NotAGroupError(f"u({t}) is not unitary")
            if (ut @ umt - one).norm() > 1e-9:
                raise NotAGroupError(f"u({t}) u({-t}) differs from the identity")
        ut0 = self(t0)
        if (self(2 * t0) - ut0 @ ut0).norm() > 1e-9:
            raise NotAGroupError("u(2 t0) differs from u(t0)^2")

    @staticmethod
    def _identity_like(u: ModuleOperator) -> ModuleOperator:
        from .hilbmod import identity_operator

        return identity_operator(u.shape, u.k)

    @staticmethod
    def from_positive(t_op: ModuleOperator) -> "SampledUnitaryGroup":
        """The group ``t -> T**(it)`` of a strictly positive operator."""
        from .hilbmod import op_power

        return SampledUnitaryGroup(lambda t: op_power(t_op, 1j * t))


def _principal_log_phases(u: ModuleOperator) -> ModuleOperator:
    """Hermitian phase matrix of a unitary: ``-i log u`` on (-pi, pi]."""
    flats = []
    for f in u.flatten():
        t, z = scipy.linalg.schur(f, output="complex")
        phases = np.angle(np.diagonal(t))
        k = (z * phases) @ z.conj().T
        flats.append((k + k.conj().T) / 2.0)
    return operator_from_flat(u.shape, u.k, flats)


def recover_generator(
    u: SampledUnitaryGroup, t0: float, max_halvings: int = 8, tol: float = 1e-8
) -> ModuleOperator:
    """Hermitian ``K`` with ``u_t = exp(itK)``, branch-checked by halving."""
    k_op, _, _ = _recover_with_trace(u, t0, max_halvings, tol)
    return k_op


def _recover_with_trace(
    u: SampledUnitaryGroup, t0: float, max_halvings: int, tol: float
) -> tuple[ModuleOperator, float, int]:
    if t0 <= 0:
        raise ValueError("t0 must be positive")
    u.probe(t0)
    t = float(t0)
    log_t = _principal_log_phases(u(t))
    for halvings in range(max_halvings + 1):
        log_half = _principal_log_phases(u(t / 2.0))
        scale = max(1.0, log_t.norm())
        if (log_t - 2.0 * log_half).norm() <= tol * scale:
            k_op = (1.0 / t) * log_t
            resid = (u(t) - _unitary_of(k_op, t)).norm()
            if resid > 1e-9:
                raise NotAGroupError(
                    f"u(t0) differs from exp(i t0 K) by {resid:.3e}"
                )
            return k_op, t, halvings
        t /= 2.0
        log_t = log_half
    raise BranchAmbiguityError(
        f"halving did not stabilize after {max_halvings} steps from t0={t0}"
    )


def _unitary_of(k_op: ModuleOperator, t: float) -> ModuleOperator:
    """``exp(itK)`` for Hermitian ``K``."""
    from .hilbmod import _flat_eigh

    vals, vecs = _flat_eigh(k_op)
    flats = [(u * np.exp(1j * t * lam)) @ u.conj().T for lam, u in zip(vals, vecs)]
    return operator_from_flat(k_op.shape, k_op.k, flats)


def stone(u: SampledUnitaryGroup, t0: float = 1.0) -> ModuleOperator:
    """The unique strictly positive ``T`` with ``u_t = T**(it)``.

    Verifies the recovered operator against the evaluator on a probe
    grid ``|t| <= 10`` at tolerance 1e-8 and raises ``NotAGroupError``
    when the evaluator is inconsistent with any positive generator.
    """
    t_op, _, _ = _stone_with_trace(u, t0)
    return t_op


def _stone_with_trace(u: SampledUnitaryGroup, t0: float) -> tuple[ModuleOperator, float, int]:
    from .hilbmod import op_power

    k_op, t_used, halvings = _recover_with_trace(u, t0, 8, 1e-8)
    t_op = op_exp(k_op)
    if not strictly_positive(t_op):
        raise NotAGroupError("recovered operator is not strictly positive")
    for t, err in _residual_grid(u, t_op):
        if err > 1e-8:
            raise NotAGroupError(f"evaluator differs from T^(it) at t={t}: {err:.3e}")
    return t_op, t_used, halvings


def _residual_grid(u: SampledUnitaryGroup, t_op: ModuleOperator) -> list[tuple[float, float]]:
    from .hilbmod import op_power

    out = []
    for t in (0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0):
        err = (u(t) - op_power(t_op, 1j * t)).norm()
        out.append((t, float(err)))
    return out


def recovery_report(u: SampledUnitaryGroup, t0: float = 1.0) -> dict:
    """Structured recovery record: t0 used, halvings, residuals, spectrum."""
    t_op, t_used, halvings = _stone_with_trace(u, t0)
    spectrum = np.sort(
        np.concatenate([np.linalg.eigvalsh(f) for f in t_op.flatten()])
    )
    return {
        "t0_used": t_used,
        "halvings": halvings,
        "residual_grid": [[t, err] for t, err in _residual_grid(u, t_op)],
        "T_spectrum": [float(v) for v in spectrum],
    }


@dataclass(frozen=True, eq=False)
class Localization:
    """GNS data of a positive functional on the module ``E = A^k``.

    ``lam`` maps module-vector coordinates onto C^d with
    ``<lam v, lam w> = omega(<v, w>)``; its range is all of C^d by
    construction.
    """

    omega: PositiveFunctional
    shape: BlockShape
    k: int
    lam: np.ndarray
    lam_pinv: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.lam.shape[0]

    def apply(self, v: ModuleVector) -> np.ndarray:
        """The map ``Lambda_omega`` on a module vector."""
        return self.lam @ vector_coordinates(v)


def localize(omega: PositiveFunctional, shape: BlockShape, k: int, gns_tol: float = GNS_TOL) -> Localization:
    """Build the localization of ``E = A^k`` at a positive functional.

    The Gram form of ``omega`` on the standard basis of E is
    block-diagonal with one copy of ``rho_b`` transposed per module slot
    and matrix row; eigenvalues below ``gns_tol`` times the largest are
    treated as genuine kernel (``ZeroFunctionalError`` if nothing
    remains).
    """
    cells = []
    for _ in range(k):
        for n, rb in zip(shape.block_dims, omega.rho.blocks):
            cells.append(np.kron(np.eye(n), rb.T))
    gram = scipy.linalg.block_diag(*cells)
    w, v = np.linalg.eigh((gram + gram.conj().T) / 2.0)
    top = float(np.max(w))
    if top <= 0.0:
        raise ZeroFunctionalError("positive functional vanishes on the module")
    keep = w > gns_tol * top
    if not np.any(keep):
        raise ZeroFunctionalError("no Gram eigenvalue above the rank cutoff")
    w_kept = w[keep]
    v_kept = v[:, keep]
    lam = (np.sqrt(w_kept)[:, None]) * v_kept.conj().T
    lam_pinv = v_kept / np.sqrt(w_kept)[None, :]
    return Localization(omega, shape, int(k), lam, lam_pinv)


def induce(loc: Localization, s: ModuleOperator) -> np.ndarray:
    """The induced matrix ``S_omega`` with ``S_omega L(v) = L(S v)``.

    Raises ``IllDefinedError`` when the defining relation has no exact
    solution (a non-adjointable input or a broken localization); the
    map is a *-homomorphism and satisfies ``(S*)_omega = (S_omega)*``.
    """
    if s.shape != loc.shape or s.k != loc.k:
        raise ValueError("operator and localization live over different modules")
    m = operator_matrix(s)
    s_omega = loc.lam @ m @ loc.lam_pinv
    resid = float(np.linalg.norm(s_omega @ loc.lam - loc.lam @ m, 2))
    scale = max(1.0, s.norm()) * max(1.0, float(np.linalg.norm(loc.lam, 2)))
    if resid > 1e-9 * scale:
        raise IllDefinedError(
            f"induced operator ill-defined: defining-relation residual {resid:.3e}"
        )
    return s_omega


def separating_check(
    r: ModuleOperator,
    s: ModuleOperator,
    states: Sequence[PositiveFunctional],
    tol: float = 1e-9,
) -> bool:
    """Do all induced operators of a faithful family agree?

    The family must contain a faithful combination (the summed density
    positive definite), else ``FamilyNotFaithfulError``.  When every
    ``R_omega = S_omega`` within tolerance the operators agree globally
    within 1e-8, which is verified as a consistency guard.
    """
    if r.shape != s.shape or r.k != s.k:
        raise ValueError("operators live over different modules")
    if not states:
        raise FamilyNotFaithfulError("empty state family")
    total = states[0].rho
    for st in states[1:]:
        total = total + st.rho
    if not is_strictly_positive(total):
        raise FamilyNotFaithfulError("summed density is not positive definite")
    for st in states:
        loc = localize(st, r.shape, r.k)
        r_om, s_om = induce(loc, r), induce(loc, s)
        if np.linalg.norm(r_om - s_om, 2) > tol * max(
            1.0, np.linalg.norm(r_om, 2), np.linalg.norm(s_om, 2)
        ):
            return False
    gap = (r - s).norm()
    if gap > 1e-8 * max(1.0, r.norm(), s.norm()):
        raise FamilyNotFaithfulError(
            f"induced operators agree but the originals differ by {gap:.3e}"
        )
    return True


def hermitian_matrix_power(m: np.ndarray, z: complex, pos_tol: float = 1e-12) -> np.ndarray:
    """Complex power of a positive-definite dense matrix (for induced operators)."""
    lam, u = np.linalg.eigh((m + m.conj().T) / 2.0)
    if np.min(lam) <= pos_tol * max(float(np.max(np.abs(lam))), 1e-300):
        raise ValueError("matrix power needs a positive definite input")
    return (u * np.exp(z * np.log(lam.astype(complex)))) @ u.conj().T


def vector_smear(t_op: ModuleOperator, v: ModuleVector, r: float, z: complex = 0.0) -> ModuleVector:
    """Gaussian smear of a module vector along ``t -> T**(it) v``.

    Closed form in the eigenbasis of the flattened operator: the
    coordinate at log-eigenvalue ``kappa`` picks up
    ``exp(i kappa z - kappa^2 / (4 r^2))``.
    """
    if r <= 0:
        raise ValueError("smearing width r must be positive")
    from .hilbmod import _flat_eigh

    vals, vecs = _flat_eigh(t_op)
    z = complex(z)
    k, dims = t_op.k, t_op.shape.block_dims
    stacked = _stack_blocks(v, k, dims)
    out_blocks = []
    for lam, u, vb in zip(vals, vecs, stacked):
        if np.any(lam <= 0):
            raise ValueError("vector smear needs a strictly positive operator")
        kappa = np.log(lam)
        factor = np.exp(1j * kappa * z - kappa * kappa / (4.0 * r * r))
        out_blocks.append((u * factor) @ (u.conj().T @ vb))
    return _unstack_blocks(v.shape, k, out_blocks)


def _stack_blocks(v: ModuleVector, k: int, dims: tuple[int, ...]) -> list[np.ndarray]:
    return [
        np.vstack([v.entries[i].blocks[b] for i in range(k)])
        for b in range(len(dims))
    ]


def _unstack_blocks(shape: BlockShape, k: int, stacked: list[np.ndarray]) -> ModuleVector:
    entries = []
    for i in range(k):
        blocks = []
        for n, sb in zip(shape.block_dims, stacked):
            blocks.append(sb[i * n : (i + 1) * n, :])
        entries.append(AlgebraElement(shape, blocks))
    return ModuleVector(entries)
