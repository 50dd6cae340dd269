"""Ensemble and POVM value types, and the two-qudit Bell-mixture family.

The family, for ``d >= 2`` and ``0 < lam <= 1``, has ``2d(d-1)`` equiprobable
states ``lam |Psi^(k)_ij><Psi^(k)_ij| + (1 - lam) sigma`` indexed by pairs
``i < j`` and ``k in {1, 2, 3, 4}``, where the four vectors are the Bell-type
combinations of ``|ii>, |jj>`` (k = 1, 2) and ``|ij>, |ji>`` (k = 3, 4).
Labels are always ordered lexicographically in ``(i, j)`` and then by ``k``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonPositivePriorError,
    NonPSDStateError,
    PovmError,
    PriorSumError,
    TraceError,
    ValidationError,
)
from .linalg import HermitianOperator, min_eigenvalue, pt_matrix

PRIOR_SUM_TOL = 1e-12
STATE_PSD_TOL = 1e-10
STATE_TRACE_TOL = 1e-10
POVM_TOL = 1e-9


def _as_operator(x, d1, d2):
    if isinstance(x, HermitianOperator):
        if x.dims != (d1, d2):
            raise DimensionMismatchError(f"operator dims {x.dims} != ({d1}, {d2})")
        return x
    return HermitianOperator(x, d1, d2)


@dataclass(frozen=True, eq=False)
class HermitianEnsemble:
    """Priors paired with Hermitian operators (not necessarily states)."""

    d1: int
    d2: int
    priors: tuple
    states: tuple
    separable_asserted: bool = False

    def __post_init__(self):
        priors = tuple(float(p) for p in self.priors)
        states = tuple(_as_operator(s, self.d1, self.d2) for s in self.states)
        if len(priors) != len(states):
            raise DimensionMismatchError(
                f"{len(priors)} priors given for {len(states)} operators"
            )
        if not priors:
            raise ValidationError("ensemble is empty")
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "states", states)
        self._validate_priors()

    def _validate_priors(self):
        arr = np.asarray(self.priors)
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr > 1.0):
            raise NonPositivePriorError("every prior must lie in (0, 1]")
        total = float(np.sum(arr))
        if abs(total - 1.0) > PRIOR_SUM_TOL:
            raise PriorSumError(f"priors sum to {total!r}, not 1")

    @property
    def n(self):
        return len(self.priors)

    @property
    def dim(self):
        return self.d1 * self.d2

    @property
    def items(self):
        return list(zip(self.priors, self.states))

    def weighted(self):
        """Stack of eta_i * C_i as a complex array of shape (n, D, D)."""
        return np.stack([p * s.matrix for p, s in zip(self.priors, self.states)])


@dataclass(frozen=True, eq=False)
class StateEnsemble(HermitianEnsemble):
    """Priors paired with density operators on C^d1 (x) C^d2."""

    def __post_init__(self):
        super().__post_init__()
        for idx, s in enumerate(self.states):
            tr = float(np.trace(s.matrix).real)
            if abs(tr - 1.0) > STATE_TRACE_TOL:
                raise TraceError(f"state {idx} has trace {tr!r}")
            lmin = min_eigenvalue(s)
            if lmin < -STATE_PSD_TOL:
                raise NonPSDStateError(f"state {idx} has minimum eigenvalue {lmin:.3e}")


def validate_ensemble(priors, states, d1, d2, separable=False):
    """Build a :class:`StateEnsemble` from raw priors and matrices.

    Raises a distinct :class:`ValidationError` subclass per violated
    invariant (prior sum, PSD, trace, dimensions).
    """
    return StateEnsemble(d1, d2, tuple(priors), tuple(states), bool(separable))


def pt_ensemble(e):
    """Same priors, every operator replaced by its partial transpose."""
    return HermitianEnsemble(
        e.d1,
        e.d2,
        e.priors,
        tuple(pt_matrix(s.matrix, e.d1, e.d2) for s in e.states),
        e.separable_asserted,
    )


@dataclass(frozen=True, eq=False)
class Povm:
    """Finite list of PSD operators summing to the identity (within 1e-9)."""

    d1: int
    d2: int
    elements: tuple
    labels: tuple = field(default=None)
    tol: float = POVM_TOL

    def __post_init__(self):
        elements = tuple(_as_operator(m, self.d1, self.d2) for m in self.elements)
        if not elements:
            raise PovmError("POVM has no elements")
        if self.labels is not None and len(self.labels) != len(elements):
            raise PovmError("label count does not match element count")
        object.__setattr__(self, "elements", elements)
        for idx, m in enumerate(elements):
            lmin = min_eigenvalue(m)
            if lmin < -self.tol:
                raise PovmError(f"element {idx} has minimum eigenvalue {lmin:.3e}")
        resid = self.completeness_residual()
        if resid > self.tol:
            raise PovmError(f"elements sum to identity only within {resid:.3e}")

    def __len__(self):
        return len(self.elements)

    @property
    def dim(self):
        return self.d1 * self.d2

    def completeness_residual(self):
        total = sum(m.matrix for m in self.elements)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def stacked(self):
        return np.stack([m.matrix for m in self.elements])


@dataclass(frozen=True, order=True)
class ExampleLabel:
    i: int
    j: int
    k: int

    def __post_init__(self):
        if not (0 <= self.i < self.j) or self.k not in (1, 2, 3, 4):
            raise ValidationError(f"invalid label {(self.i, self.j, self.k)}")


def example_labels(d):
    if d < 2:
        raise ValidationError("d >= 2 required")
    return [ExampleLabel(i, j, k) for i in range(d) for j in range(i + 1, d) for k in (1, 2, 3, 4)]


def _basis(d, a, b):
    v = np.zeros(d * d, dtype=np.complex128)
    v[a * d + b] = 1.0
    return v


def psi_state(label, d):
    """Unit vector Psi^(k)_ij in C^d (x) C^d."""
    i, j, k = label.i, label.j, label.k
    if j >= d:
        raise ValidationError(f"label {label} out of range for d={d}")
    r = 1.0 / np.sqrt(2.0)
    if k == 1:
        return r * (_basis(d, i, i) + _basis(d, j, j))
    if k == 2:
        return r * (_basis(d, i, i) - _basis(d, j, j))
    if k == 3:
        return r * (_basis(d, i, j) + _basis(d, j, i))
    return r * (_basis(d, i, j) - _basis(d, j, i))


def _projector(v):
    return np.outer(v, v.conj())


def maximally_mixed(d):
    return np.eye(d * d, dtype=np.complex128) / (d * d)


def example_ensemble(d, lam, sigma=None):
    """The 2d(d-1)-state Bell-mixture ensemble with uniform priors.

    ``sigma`` defaults to the maximally mixed state I/d^2.
    """
    d = int(d)
    if d < 2:
        raise ValidationError("d >= 2 required")
    lam = float(lam)
    if not (0.0 < lam <= 1.0):
        raise ValidationError(f"lambda must lie in (0, 1], got {lam!r}")
    if sigma is None:
        sigma = maximally_mixed(d)
    sig = validate_ensemble([1.0], [sigma], d, d).states[0].matrix
    labels = example_labels(d)
    n = len(labels)
    states = [lam * _projector(psi_state(lb, d)) + (1.0 - lam) * sig for lb in labels]
    return StateEnsemble(d, d, (1.0 / n,) * n, tuple(states), False)


def example_global_povm(d):
    """Weighted Bell-type projectors; optimal for the guessing probability."""
    labels = example_labels(d)
    w = 1.0 / (d - 1)
    elems = [(w if lb.k in (1, 2) else 1.0) * _projector(psi_state(lb, d)) for lb in labels]
    return Povm(d, d, tuple(elems), tuple(labels))


def example_local_povm(d):
    """Weighted computational-basis product projectors, one per label."""
    labels = example_labels(d)
    w = 1.0 / (d - 1)
    elems = []
    for lb in labels:
        i, j = lb.i, lb.j
        if lb.k == 1:
            elems.append(w * _projector(_basis(d, i, i)))
        elif lb.k == 2:
            elems.append(w * _projector(_basis(d, j, j)))
        elif lb.k == 3:
            elems.append(_projector(_basis(d, i, j)))
        else:
            elems.append(_projector(_basis(d, j, i)))
    return Povm(d, d, tuple(elems), tuple(labels))


@dataclass(frozen=True)
class ClosedForms:
    p_G: float
    q_G: float
    gap: float


def example_closed_forms(d, lam):
    """Closed-form p_G, q_G and their difference for the example family."""
    d = int(d)
    if d < 2:
        raise ValidationError("d >= 2 required")
    lam = float(lam)
    p_g = (1.0 + lam * (d * d - 1)) / (2.0 * d * (d - 1))
    q_g = (2.0 + lam * (d * d - 2)) / (4.0 * d * (d - 1))
    gap = lam * d / (4.0 * (d - 1))
    if abs(p_g - gap - q_g) > 1e-14:
        raise ArithmeticError("closed-form identity q_G = p_G - gap violated")
    return ClosedForms(p_g, q_g, gap)
