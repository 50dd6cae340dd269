"""Optimality certificates for a given ensemble and POVM.

Two checks share one computation. With weighted operators A_i = eta_i C_i,
the Lagrangian residual for element i is

    L_i = sym(sum_j A_j M_j) - A_i,

where sym(X) = (X + X^H) / 2; the POVM is optimal iff every L_i >= 0. The
pairwise slackness products M_i (A_i - A_j) M_j vanish at any optimum, but
that is only a necessary condition. C_i = rho_i gives the guessing
probability; C_i = rho_i^PT gives the partial-transpose bound.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .ensembles import HermitianEnsemble, Povm, pt_ensemble
from .errors import DimensionMismatchError, PovmError, ValidationError
from .linalg import min_eigenvalue, pt_matrix

DEFAULT_TOL = 1e-6


class CertificateKind(enum.Enum):
    GLOBAL_OPT = "global_opt"
    QG_OPT = "qg_opt"


@dataclass(frozen=True)
class CertificateReport:
    """Residuals of one optimality check.

    ``lagrangian_residuals[i]`` is the minimum eigenvalue of L_i.
    ``slackness_residuals`` maps each pair (i, j), i < j, to the max-entry
    norm of M_i (A_i - A_j) M_j; the (j, i) product is minus its adjoint.
    ``hermiticity_residual`` is the max-entry asymmetry of sum_j A_j M_j. It
    is reported but not part of ``passed``: it vanishes whenever all the
    slackness products do.
    """

    kind: CertificateKind
    lagrangian_residuals: tuple
    slackness_residuals: dict
    hermiticity_residual: float
    passed: bool
    tolerance: float

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "lagrangian_residuals": list(self.lagrangian_residuals),
            "slackness_residuals": [
                {"i": i, "j": j, "value": v} for (i, j), v in sorted(self.slackness_residuals.items())
            ],
            "hermiticity_residual": self.hermiticity_residual,
            "passed": self.passed,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class LocalRealizationReport:
    is_product_projective: bool
    pl_established: bool
    achieved_value: float


class PptCheck(NamedTuple):
    is_ppt: bool
    pt_min_eigenvalues: tuple


def _check_pair(e, m):
    if not isinstance(e, HermitianEnsemble):
        raise ValidationError("expected an ensemble")
    if not isinstance(m, Povm):
        raise ValidationError("expected a Povm")
    if (e.d1, e.d2) != (m.d1, m.d2):
        raise DimensionMismatchError(f"ensemble dims {(e.d1, e.d2)} != POVM dims {(m.d1, m.d2)}")
    if e.n != len(m):
        raise PovmError(f"POVM has {len(m)} elements for {e.n} states")


def lagrangian_operators(e, m):
    """Per-element operators L_i and the raw asymmetry of sum_j A_j M_j.

    ``e`` supplies the C_i directly; pass ``pt_ensemble(e)`` for the
    partial-transpose problem.
    """
    _check_pair(e, m)
    a = e.weighted()
    ms = m.stacked()
    gamma = np.einsum("ijk,ikl->jl", a, ms)
    asym = float(np.max(np.abs(gamma - gamma.conj().T)))
    sym = 0.5 * (gamma + gamma.conj().T)
    return [sym - ai for ai in a], asym


def _certify(e, m, tol, kind):
    if tol < 0 or not np.isfinite(tol):
        raise ValidationError("tolerance must be a finite non-negative number")
    ops, asym = lagrangian_operators(e, m)
    lag = tuple(min_eigenvalue(op) for op in ops)
    a = e.weighted()
    ms = m.stacked()
    slack = {}
    for i in range(e.n):
        for j in range(i + 1, e.n):
            prod = ms[i] @ (a[i] - a[j]) @ ms[j]
            slack[(i, j)] = float(np.max(np.abs(prod)))
    passed = all(v >= -tol for v in lag) and all(v <= tol for v in slack.values())
    return CertificateReport(kind, lag, slack, asym, bool(passed), float(tol))


def check_global_optimality(e, m, tol=DEFAULT_TOL):
    """Does ``m`` attain the guessing probability of ``e``?"""
    return _certify(e, m, tol, CertificateKind.GLOBAL_OPT)


def check_qg_optimality(e, m, tol=DEFAULT_TOL):
    """Does ``m`` attain the partial-transpose bound q_G of ``e``?

    Positivity of every L_i (with C_i = rho_i^PT) is necessary and
    sufficient; the slackness products are the weaker necessary condition.
    """
    _check_pair(e, m)
    return _certify(pt_ensemble(e), m, tol, CertificateKind.QG_OPT)


def check_povm_ppt(m, tol=DEFAULT_TOL):
    """Whether every element has a PSD partial transpose, with the PT minima."""
    if not isinstance(m, Povm):
        raise ValidationError("expected a Povm")
    mins = tuple(min_eigenvalue(pt_matrix(el.matrix, m.d1, m.d2)) for el in m.elements)
    return PptCheck(all(v >= -tol for v in mins), mins)


def _is_local_basis_element(x, tol):
    # a non-negative combination of |a><a| (x) |b><b|, i.e. diagonal in the
    # product computational basis with non-negative weights
    diag = np.real(np.diag(x))
    off = x - np.diag(np.diag(x))
    return bool(np.max(np.abs(off), initial=0.0) <= tol and np.min(diag) >= -tol)


def check_local_realization(e, m, tol=DEFAULT_TOL):
    """Try to establish p_L = q_G through a product computational-basis measurement.

    The partial-transposed POVM is recognised as local when every element is
    diagonal in the product basis |a>|b> with non-negative weights. Measuring
    both sides in the computational basis and post-processing the outcome pair
    realises it. Anything else is reported as not recognised, which is not a
    proof that the POVM is non-local.
    """
    _check_pair(e, m)
    pt_elems = [pt_matrix(el.matrix, m.d1, m.d2) for el in m.elements]
    product = all(_is_local_basis_element(x, tol) for x in pt_elems)
    achieved = float(
        sum(p * np.sum(pt_matrix(s.matrix, e.d1, e.d2) * el.matrix.T).real for p, s, el in zip(e.priors, e.states, m.elements))
    )
    established = product and check_qg_optimality(e, m, tol).passed
    return LocalRealizationReport(product, bool(established), achieved)
