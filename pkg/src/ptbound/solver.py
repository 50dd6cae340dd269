"""Barrier interior-point solvers for the three discrimination optima.

``solve_hermitian_guessing`` maximises sum_i eta_i Tr(C_i M_i) over POVMs
through its dual, min Tr(K) s.t. K >= eta_i C_i, following the central path
of Tr(K) - mu * sum_i log det(K - eta_i C_i). At a central point the operators
mu (K - eta_i C_i)^{-1} form a POVM and the duality gap is exactly mu * n * D.

``solve_ppt`` adds M_i^PT >= 0 and works on the primal. Its Newton steps
keep sum_i dM_i = 0, the same steps as eliminating M_n = I - sum_{i<n} M_i,
but computed with an explicit completeness multiplier, which doubles as the
dual certificate: K - eta_i rho_i = X_i + Y_i^PT with X_i, Y_i >= 0.

Newton systems are formed in the real orthonormal coordinates of Hermitian
matrices (D^2 reals per operator) and factored densely.
"""

import enum
import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.optimize

from .ensembles import HermitianEnsemble, Povm, StateEnsemble, pt_ensemble
from .errors import SolverFailure, ValidationError
from .linalg import (
    HermitianOperator,
    eig_hermitian,
    eigvals_hermitian,
    min_eigenvalue,
    psd_sqrt_inv,
    pt_matrix,
    pt_permutation,
    trace_inner,
    trace_norm,
)

log = logging.getLogger(__name__)


class ProblemKind(enum.Enum):
    PG = "pg"
    QG = "qg"
    PPT = "ppt"


@dataclass(frozen=True)
class SolverConfig:
    target_gap: float = 1e-8
    mu_initial: float = 1.0
    mu_shrink: float = 0.2
    newton_tol: float = 1e-10
    max_newton_iters: int = 50
    max_outer_iters: int = 200

    def __post_init__(self):
        for name in ("target_gap", "mu_initial", "mu_shrink", "newton_tol"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if not self.mu_shrink < 1:
            raise ValidationError("mu_shrink must be < 1")
        if self.max_newton_iters < 1 or self.max_outer_iters < 1:
            raise ValidationError("iteration caps must be positive")


@dataclass(frozen=True)
class CentralPoint:
    """One logged central-path point.

    ``primal_value`` uses the unprojected recovery mu (K - eta_i C_i)^{-1}
    (or the current PPT iterate), ``dual_value`` is Tr(K).
    """

    mu: float
    primal_value: float
    dual_value: float
    completeness_residual: float = 0.0


@dataclass(frozen=True, eq=False)
class SolveResult:
    value: float
    povm: Povm
    dual_K: HermitianOperator
    certified_gap: float
    problem_kind: ProblemKind
    iterations: int
    trace_log: list = field(default_factory=list)
    dual_residual: float = 0.0


# ---------------------------------------------------------------------------
# real coordinates of Hermitian matrices


@lru_cache(maxsize=32)
def _herm_coords(dim):
    """Column description of the orthonormal Hermitian basis.

    Basis element b equals c1[b] * E[k1[b]] + c2[b] * E[k2[b]] with E[r] the
    matrix unit at row-major position r.
    """
    diag = np.arange(dim) * (dim + 1)
    ju, ku = np.triu_indices(dim, 1)
    up = ju * dim + ku
    lo = ku * dim + ju
    r = 1.0 / np.sqrt(2.0)
    npair = up.size
    k1 = np.concatenate([diag, up, up])
    k2 = np.concatenate([diag, lo, lo])
    c1 = np.concatenate([np.ones(dim), np.full(npair, r), np.full(npair, 1j * r)])
    c2 = np.concatenate([np.zeros(dim), np.full(npair, r), np.full(npair, -1j * r)])
    out = (k1, k2, c1.astype(np.complex128), c2.astype(np.complex128), ju, ku)
    for a in out:
        a.setflags(write=False)
    return out


def to_real(x):
    dim = x.shape[0]
    ju, ku = np.triu_indices(dim, 1)
    s2 = np.sqrt(2.0)
    return np.concatenate([np.diag(x).real, s2 * x[ju, ku].real, s2 * x[ju, ku].imag])


def from_real(v, dim):
    ju, ku = np.triu_indices(dim, 1)
    npair = ju.size
    r = 1.0 / np.sqrt(2.0)
    x = np.zeros((dim, dim), dtype=np.complex128)
    x[np.arange(dim), np.arange(dim)] = v[:dim]
    off = r * (v[dim : dim + npair] + 1j * v[dim + npair :])
    x[ju, ku] = off
    x[ku, ju] = off.conj()
    return x


def _realify_general(op, dim):
    """Like :func:`realify` but without symmetrising (op need not be self-adjoint)."""
    k1, k2, c1, c2 = _herm_coords(dim)[:4]
    ob = op[:, k1] * c1 + op[:, k2] * c2
    # .real is a strided view; BLAS wants contiguous operands
    return np.ascontiguousarray((np.conj(c1)[:, None] * ob[k1, :] + np.conj(c2)[:, None] * ob[k2, :]).real)


def realify(op, dim):
    """Real symmetric matrix of a Hermitian-preserving operator on vec space."""
    k1, k2, c1, c2, _, _ = _herm_coords(dim)
    ob = op[:, k1] * c1 + op[:, k2] * c2
    h = np.conj(c1)[:, None] * ob[k1, :] + np.conj(c2)[:, None] * ob[k2, :]
    h = np.ascontiguousarray(h.real)
    return 0.5 * (h + h.T)


def _logdet_hessian(s):
    """vec-space matrix of Z -> S Z S (row-major vec)."""
    return np.kron(s, s.T)


def _inv_spd(a):
    """Inverse of a real symmetric positive definite matrix, equilibrated."""
    d = np.sqrt(np.abs(np.diag(a)))
    d[d == 0] = 1.0
    c = scipy.linalg.cho_factor(a / d[:, None] / d[None, :], lower=True, check_finite=False)
    inv = scipy.linalg.cho_solve(c, np.diag(1.0 / d), check_finite=False) / d[:, None]
    return 0.5 * (inv + inv.T)


def _solve_spd(h, g):
    """Solve h x = g for symmetric positive definite h with diagonal equilibration."""
    d = np.sqrt(np.abs(np.diag(h)))
    d[d == 0] = 1.0
    hs = h / d[:, None] / d[None, :]
    try:
        c = scipy.linalg.cho_factor(hs, lower=True, check_finite=False)
        return scipy.linalg.cho_solve(c, g / d, check_finite=False) / d
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(hs, g / d, rcond=None)[0] / d


def _project_povm(ms):
    """Rescale M_i -> T^{-1/2} M_i T^{-1/2} with T = sum M_i."""
    t = np.sum(ms, axis=0)
    t = 0.5 * (t + t.conj().T)
    w = psd_sqrt_inv(t)
    out = np.einsum("ab,ibc,cd->iad", w, ms, w)
    return 0.5 * (out + np.conj(np.swapaxes(out, 1, 2)))


def _objective(costs, ms):
    return float(sum(trace_inner(c, m) for c, m in zip(costs, ms)))


# ---------------------------------------------------------------------------
# extended-precision iterates
#
# Near the end of the central path the slacks (dual) and POVM elements
# (primal) have eigenvalues of order mu ~ 1e-11 next to entries of order one.
# A dense double array resolves such an eigenvalue only to eps * ||Z|| / mu,
# which would cap the completeness of the recovered POVM near 1e-7. Iterates
# are therefore stored in long double and inverted there; Newton systems stay
# in double.

EXT = np.clongdouble


def batched_inv_ext(zs):
    """Inverses of a stack of Hermitian matrices, or None if any is not PD.

    Gauss-Jordan without pivoting; for Hermitian input all pivots are
    positive exactly when the matrix is positive definite.
    """
    zs = np.asarray(zs, dtype=EXT)
    n = zs.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=EXT), zs.shape)
    aug = np.concatenate([zs, eye], axis=-1)
    for p in range(n):
        piv = aug[:, p, p].real
        if not np.all(piv > 0):
            return None
        row = aug[:, p, :] / piv[:, None]
        aug -= aug[:, :, p, None] * row[:, None, :]
        aug[:, p, :] = row
    inv = aug[:, :, n:]
    return 0.5 * (inv + np.conj(np.swapaxes(inv, 1, 2)))


def _herm(x):
    return 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))


# ---------------------------------------------------------------------------
# PG / QG: dual barrier


def _dual_step(k, zs, dk, t, shrink=0.5, tries=60):
    """Largest t * shrink^j keeping every slack positive definite.

    Returns (K, slacks, slack inverses, t).
    """
    dk = np.asarray(dk, dtype=EXT)
    for _ in range(tries):
        cand = _herm(zs + t * dk)
        inv = batched_inv_ext(cand)
        if inv is not None:
            return k + t * dk, cand, inv, t
        t *= shrink
    raise SolverFailure("lost strict dual feasibility in Newton step")


def _dual_newton(k, zs, sx, mu, cfg, dim):
    """Centre K for the barrier Tr(K)/mu - sum log det(K - C_i).

    The slacks ``zs[i] = K - C_i`` are carried as separate iterates, updated
    by the same steps as K. ``sx`` holds their inverses. Returns
    (K, slacks, inverses, iters, realified Hessian of the last linearisation).
    """
    eye = np.eye(dim, dtype=EXT)
    iters = 0
    for _ in range(cfg.max_newton_iters):
        grad = (eye - mu * np.sum(sx, axis=0)) / mu
        s = sx.astype(np.complex128)
        hess = sum(_logdet_hessian(si) for si in s)
        g = to_real(grad.astype(np.complex128))
        h = realify(hess, dim)
        dx = _solve_spd(h, -g)
        dec2 = float(-g @ dx)
        iters += 1
        converged = dec2 <= cfg.newton_tol
        dec = np.sqrt(max(dec2, 0.0))
        t = 1.0 if dec < 0.25 else 1.0 / (1.0 + dec)
        k, zs, sx, _ = _dual_step(k, zs, from_real(dx, dim), t)
        if converged:
            # the step that certified convergence is taken as a final polish
            break
    else:
        raise SolverFailure(
            f"Newton did not converge in {cfg.max_newton_iters} iterations at mu={mu:.3e}",
            residual=dec2,
        )
    return k, zs, sx, iters, h


def _scalar_start(costs, mu, dim):
    """Best multiple of the identity for the first barrier subproblem.

    Solves D / mu = sum_i Tr((c I - C_i)^{-1}) for c above every cost
    eigenvalue; the right side decreases in c. Any c > max eigenvalue is
    strictly feasible, e.g. 1 + max_i ||C_i||.
    """
    eigs = np.concatenate([eig_hermitian(c).eigenvalues for c in costs])
    top = float(np.max(eigs))

    def excess(c):
        return float(np.sum(1.0 / (c - eigs))) - dim / mu

    lo = top + 1e-12 * max(1.0, abs(top))
    hi = top + 1.0
    while excess(hi) > 0:
        hi = top + 2.0 * (hi - top)
    if excess(lo) <= 0:
        return hi
    return scipy.optimize.brentq(excess, lo, hi, xtol=1e-14, rtol=1e-12)


def solve_hermitian_guessing(e, cfg=None, kind=ProblemKind.PG):
    """Maximise sum_i eta_i Tr(C_i M_i) over POVMs for Hermitian C_i.

    Parameters
    ----------
    e : HermitianEnsemble
        Priors eta_i and cost operators C_i (need not be PSD).
    cfg : SolverConfig, optional
    kind : ProblemKind
        Label stored on the result.

    Returns
    -------
    SolveResult
        ``value`` is the objective of an exactly complete POVM,
        ``dual_K`` is strictly dual feasible, and ``certified_gap`` is
        Tr(dual_K) - value.
    """
    cfg = cfg or SolverConfig()
    if not isinstance(e, HermitianEnsemble):
        raise ValidationError("expected a HermitianEnsemble")
    dim = e.dim
    n = e.n
    costs = e.weighted()
    eye = np.eye(dim, dtype=np.complex128)
    mu = cfg.mu_initial
    k = (_scalar_start(costs, mu, dim) * eye).astype(EXT)
    zs = k[None] - costs.astype(EXT)
    sx = batched_inv_ext(zs)
    if sx is None:
        raise SolverFailure("initial dual point is not strictly feasible")
    trace_log = []
    total_iters = 0
    prev_mu = mu
    h = None
    for outer in range(cfg.max_outer_iters):
        try:
            if h is not None:
                # tangent predictor: differentiating sum_i (K - C_i)^{-1} = I / mu
                # gives H K' = I / mu^2 with H the barrier Hessian
                tangent = from_real(_solve_spd(h, to_real(eye)), dim) / prev_mu**2
                k, zs, sx, _ = _dual_step(k, zs, (mu - prev_mu) * tangent, 1.0)
            k, zs, sx, it, h = _dual_newton(k, zs, sx, mu, cfg, dim)
        except SolverFailure as exc:
            raise SolverFailure(str(exc), exc.residual, trace_log) from None
        total_iters += it
        msx = mu * sx
        dual = float(np.trace(k).real)
        primal = float(np.sum(np.einsum("ijk,ikj->i", costs.astype(EXT), msx)).real)
        resid = float(np.max(np.abs(np.sum(msx, axis=0) - np.eye(dim, dtype=EXT))))
        trace_log.append(CentralPoint(mu, primal, dual, resid))
        log.debug("mu=%.3e primal=%.12f dual=%.12f resid=%.2e", mu, primal, dual, resid)
        if mu * n * dim <= cfg.target_gap:
            proj = _project_povm(_herm(msx).astype(np.complex128))
            value = _objective(costs, proj)
            gap = dual - value
            if gap <= cfg.target_gap:
                # a negative gap can only be rounding in the two traces
                return SolveResult(
                    value=value,
                    povm=Povm(e.d1, e.d2, tuple(proj)),
                    dual_K=HermitianOperator(k.astype(np.complex128), e.d1, e.d2),
                    certified_gap=max(gap, 0.0),
                    problem_kind=kind,
                    iterations=total_iters,
                    trace_log=trace_log,
                )
        prev_mu = mu
        mu *= cfg.mu_shrink
    raise SolverFailure(
        f"duality gap not certified within {cfg.max_outer_iters} outer iterations",
        trace_log=trace_log,
    )


def solve_pg(e, cfg=None):
    """Guessing probability: maximise sum eta_i Tr(rho_i M_i) over all POVMs."""
    return solve_hermitian_guessing(e, cfg, ProblemKind.PG)


def solve_qg(e, cfg=None):
    """Partially transposed guessing probability: costs rho_i^PT."""
    return solve_hermitian_guessing(pt_ensemble(e), cfg, ProblemKind.QG)


# ---------------------------------------------------------------------------
# PPT: primal barrier with eliminated completeness


def _ppt_inverses(ms, d1, d2):
    """(M_i^{-1}, (M_i^PT)^{-1}) stacks in extended precision, or None."""
    n = ms.shape[0]
    both = np.concatenate([ms, np.stack([pt_matrix(m, d1, d2) for m in ms])])
    inv = batched_inv_ext(both)
    if inv is None:
        return None
    return inv[:n], inv[n:]


def _psd_power(m, power, floor=1e-300):
    """m**power for a Hermitian PSD array, via the Jacobi eigensolver."""
    spec = eig_hermitian(m)
    w = np.maximum(spec.eigenvalues, floor)
    v = spec.eigenvectors
    return (v * w**power) @ v.conj().T


def _ppt_scaling(m, d1, d2, perm):
    """Scaled Hessian factors for -log det M - log det M^PT at ``m``.

    The Hessian is A = X + P Y P, with X: Z -> S Z S, Y: Z -> T Z T,
    S = M^{-1}, T = (M^PT)^{-1} and P the partial transpose. With
    F = M^{1/2} (x) M^{1/2} we get F A F = I + G G^T, where
    G = F P (T^{1/2} (x) T^{1/2}). Returns (F, G, R, M^{1/2}) with R upper
    triangular and R^T R = I + G G^T. R comes from a QR factorisation of [I; G^T], so
    G G^T is never formed, and neither is A, whose spectrum spans ~1/mu^2.
    """
    dim = d1 * d2
    root = _psd_power(m, 0.5)
    f = realify(_logdet_hessian(root), dim)
    y = _logdet_hessian(_psd_power(pt_matrix(m, d1, d2), -0.5))[perm, :]
    g = f @ _realify_general(y, dim)
    r = scipy.linalg.qr(np.vstack([np.eye(dim * dim), g.T]), mode="r", check_finite=False)[0]
    return f, g, r[: dim * dim], root


def _trsolve(r, b, trans="N"):
    return scipy.linalg.solve_triangular(r, b, trans=trans, check_finite=False)


def _barrier_line_search(lams, dec2):
    """Minimiser in (0, 1] of the barrier restricted to the Newton line.

    Along M + t dM the barrier derivative is a - sum lam / (1 + t lam), where
    lam are the eigenvalues of the relative steps; its value at t = 0 is
    -dec2, which fixes a without forming the O(1/mu) linear term.
    """
    a = float(np.sum(lams)) - dec2

    def slope(t):
        return a - float(np.sum(lams / (1.0 + t * lams)))

    neg = lams[lams < 0]
    t_max = float(np.min(-1.0 / neg)) if neg.size else np.inf
    hi = min(1.0, t_max * (1.0 - 1e-9))
    if dec2 <= 0.0 or slope(hi) <= 0.0:
        return hi
    return scipy.optimize.brentq(slope, 0.0, hi, xtol=1e-6 * hi)


def _ppt_candidates(rhos, invs, mu, d1, d2):
    """K_i = eta_i rho_i + mu M_i^{-1} + (mu (M_i^PT)^{-1})^PT, extended precision."""
    sinv, tinv = invs
    return rhos.astype(EXT) + mu * sinv + np.stack([pt_matrix(mu * t, d1, d2) for t in tinv])


def _scaled_residual(root, khat, rho, y, mu, d1, d2):
    """M^{1/2} (khat - rho - Y^PT) M^{1/2} / mu - I, extended precision.

    This is the stationarity residual seen from M's own scale. With
    Y = mu (M^PT)^{-1} the bracket equals mu M^{-1} at a central point, and in
    general khat - rho - Y^PT = mu M^{-1/2} (I + b) M^{-1/2}.
    """
    root = root.astype(EXT)
    inner = khat - rho - pt_matrix(y, d1, d2)
    return _herm(root @ inner @ root / mu - np.eye(root.shape[0], dtype=EXT))


def _ppt_newton(rhos, ms, invs, khat, mu, cfg, d1, d2):
    """Centre the POVM iterate for the PPT barrier at ``mu``.

    The Newton system with completeness multiplier L reads
    A_i dM_i + dL = -r_i, sum_i dM_i = 0, where r_i = (khat - K_i) / mu and
    khat = mu L. Eliminating M_n instead gives the same step. Each block is
    solved in scaled coordinates dM_i = F_i e_i:
    (I + G_i G_i^T) e_i = -(b_i + F_i dL), with b_i = F_i r_i, and dL comes
    from the Schur complement sum_i F_i Mid_i F_i, where Mid_i = (I + G_i G_i^T)^{-1}.

    The scaled residual b_i = M^{1/2} (khat - eta rho - Y^PT) M^{1/2} / mu - I
    is O(1) and is formed in extended precision. Computing it in doubles would
    cancel O(1) terms down to O(mu). khat is carried across iterations.
    """
    dim = d1 * d2
    perm = pt_permutation(d1, d2)
    n = ms.shape[0]
    iters = 0
    dec2 = np.inf
    for _ in range(cfg.max_newton_iters):
        bs, facs = [], []
        for i in range(n):
            f, g, r, root = _ppt_scaling(ms[i].astype(np.complex128), d1, d2, perm)
            b = _scaled_residual(root, khat, rhos[i], mu * invs[1][i], mu, d1, d2)
            bs.append(to_real(b.astype(np.complex128)))
            facs.append((f, g, r, _trsolve(r, f, trans="T")))
        # The Schur complement sum_i F_i Mid_i F_i is B^T B with B the stack of
        # R_i^-T F_i, and its right-hand side is -B^T c. Solving the least
        # squares problem min ||B dL + c|| by QR squares-roots the conditioning,
        # which reaches 1/mu^2 when the POVM elements have disjoint supports.
        big_b = np.vstack([rf for (_, _, _, rf) in facs])
        cs = np.concatenate([_trsolve(r, b, trans="T") for (_, _, r, _), b in zip(facs, bs)])
        colscale = np.linalg.norm(big_b, axis=0)
        colscale[colscale == 0.0] = 1.0
        q, rb = scipy.linalg.qr(big_b / colscale, mode="economic", check_finite=False)
        dl = -_trsolve(rb, q.T @ cs) / colscale
        scaled = (cs + big_b @ dl).reshape(n, dim * dim)
        steps = np.empty((n, dim * dim))
        dec2 = float(scaled.ravel() @ scaled.ravel())
        rel = []
        for i, ((f, g, r, _), c) in enumerate(zip(facs, scaled)):
            e = -_trsolve(r, c)
            steps[i] = f @ e
            # relative steps seen by each cone: M^{-1/2} dM M^{-1/2} = e, and
            # T^{1/2} dM^PT T^{1/2} = G^T e
            rel.append(eigvals_hermitian(from_real(e, dim)))
            rel.append(eigvals_hermitian(from_real(g.T @ e, dim)))
        own = np.stack([from_real(x, dim) for x in steps]).astype(EXT)
        steps[-1] = -np.sum(steps[:-1], axis=0)
        iters += 1
        log.debug("ppt newton mu=%.2e dec2=%.2e", mu, dec2)
        converged = dec2 <= cfg.newton_tol
        khat = _herm(khat + (mu * from_real(dl, dim)).astype(EXT))
        cert = (ms, invs, khat, own, rel)
        dms = np.stack([from_real(x, dim) for x in steps]).astype(EXT)
        t = _barrier_line_search(np.concatenate(rel), dec2)
        for _ in range(60):
            cand = _herm(ms + t * dms)
            cinv = _ppt_inverses(cand, d1, d2)
            if cinv is not None:
                break
            t *= 0.5
        else:
            raise SolverFailure("step-size backtracking failed to keep PPT strict feasibility")
        ms, invs = cand, cinv
        if converged:
            break
    else:
        raise SolverFailure(
            f"Newton did not converge in {cfg.max_newton_iters} iterations at mu={mu:.3e}",
            residual=dec2,
        )
    return ms, invs, khat, iters, cert


def _ppt_dual_point(rhos, cert, mu, d1, d2):
    """Dual-feasible K from the last Newton iteration.

    ``cert`` holds the iterate the final step started from, the updated
    multiplier K and each element's own undamped step dM_i. Linearising
    X = mu M^{-1} and Y = mu (M^PT)^{-1} along that step gives
    X~_i = X_i - mu S dM_i S and Y~_i = Y_i - mu T dM_i^PT T, and the Newton
    equations say X~_i + Y~_i^PT = K - eta_i rho_i. In scaled form
    X~_i >= 0 iff I - e_i >= 0 and Y~_i >= 0 iff I - G^T e_i >= 0, and both
    spectra are already known. The remaining solve error is absorbed into X~_i,
    checked as I + b_i >= 0. Where a check fails, the plain candidate split
    is used and the identity shift that makes it feasible is added to K.
    Returns (K, max_i ||K - K_i||_max), with K_i the plain candidates.
    """
    ms, invs, k, dms, rel = cert
    dim = d1 * d2
    cands = _ppt_candidates(rhos, invs, mu, d1, d2)
    residual = float(np.max(np.abs(k[None] - cands)))
    shift = 0.0
    for i in range(len(ms)):
        tinv = invs[1][i]
        ytil = _herm(mu * (tinv - tinv @ pt_matrix(dms[i], d1, d2) @ tinv))
        if np.max(rel[2 * i + 1]) <= 1.0:
            root = _psd_power(ms[i].astype(np.complex128), 0.5)
            b = _scaled_residual(root, k, rhos[i], ytil, mu, d1, d2)
            if min_eigenvalue(b.astype(np.complex128)) >= -1.0:
                continue
        slack = _herm(k - rhos[i] - pt_matrix(mu * tinv, d1, d2))
        shift = max(shift, -min_eigenvalue(slack.astype(np.complex128)))
    if shift > 0.0:
        log.debug("ppt dual point needed an identity shift of %.3e", shift)
        k = k + shift * np.eye(dim, dtype=EXT)
    return k, residual


def solve_ppt(e, cfg=None):
    """Maximise sum eta_i Tr(rho_i M_i) over POVMs with every M_i^PT >= 0.

    The reported ``value`` is the objective of the final PPT iterate and
    ``certified_gap`` is Tr(dual_K) - value for the repaired dual point;
    ``dual_residual`` records how far the raw gradient candidates disagreed.
    """
    cfg = cfg or SolverConfig()
    if not isinstance(e, HermitianEnsemble):
        raise ValidationError("expected an ensemble")
    d1, d2 = e.d1, e.d2
    dim = e.dim
    n = e.n
    rhos = e.weighted()
    eye = np.eye(dim, dtype=np.complex128)
    if n == 1:
        value = float(np.trace(rhos[0]).real)
        return SolveResult(
            value=value,
            povm=Povm(d1, d2, (eye,)),
            dual_K=HermitianOperator(rhos[0], d1, d2),
            certified_gap=0.0,
            problem_kind=ProblemKind.PPT,
            iterations=0,
            trace_log=[CentralPoint(0.0, value, value, 0.0)],
        )
    ms = np.stack([eye / n] * n).astype(EXT)
    invs = _ppt_inverses(ms, d1, d2)
    mu = cfg.mu_initial
    khat = np.mean(_ppt_candidates(rhos, invs, mu, d1, d2), axis=0)
    trace_log = []
    total_iters = 0
    for outer in range(cfg.max_outer_iters):
        try:
            ms, invs, khat, it, cert = _ppt_newton(rhos, ms, invs, khat, mu, cfg, d1, d2)
        except SolverFailure as exc:
            raise SolverFailure(str(exc), exc.residual, trace_log) from None
        total_iters += it
        primal = float(np.sum(np.einsum("ijk,ikj->i", rhos.astype(EXT), ms)).real)
        k, resid = _ppt_dual_point(rhos, cert, mu, d1, d2)
        dual = float(np.trace(k).real)
        trace_log.append(CentralPoint(mu, primal, dual, resid))
        log.debug("ppt mu=%.3e primal=%.12f dual=%.12f resid=%.2e", mu, primal, dual, resid)
        if 2 * mu * n * dim <= cfg.target_gap and dual - primal <= cfg.target_gap:
            final = ms.astype(np.complex128)
            final[-1] = eye - np.sum(final[:-1], axis=0)
            value = _objective(rhos, final)
            return SolveResult(
                value=value,
                povm=Povm(d1, d2, tuple(final)),
                dual_K=HermitianOperator(k.astype(np.complex128), d1, d2),
                certified_gap=max(dual - value, 0.0),
                problem_kind=ProblemKind.PPT,
                iterations=total_iters,
                trace_log=trace_log,
                dual_residual=resid,
            )
        mu *= cfg.mu_shrink
    raise SolverFailure(
        f"duality gap not certified within {cfg.max_outer_iters} outer iterations",
        trace_log=trace_log,
    )


def helstrom_two_state(eta1, rho1, eta2, rho2):
    """Optimal two-state success probability (1 + ||eta1 rho1 - eta2 rho2||_1) / 2."""
    a = np.asarray(getattr(rho1, "matrix", rho1), dtype=np.complex128)
    b = np.asarray(getattr(rho2, "matrix", rho2), dtype=np.complex128)
    return 0.5 * (1.0 + trace_norm(eta1 * a - eta2 * b))


@dataclass(frozen=True)
class BoundsReport:
    p_G: float
    q_G: float
    p_PPT: float
    ordering_ok: bool
    nlwe_flag: bool


def bounds_report(e, cfg=None):
    """Run all three solvers and compare them.

    ``ordering_ok`` checks p_PPT <= min(p_G, q_G) + 2 target_gap.
    ``nlwe_flag`` is only raised for ensembles the caller asserted separable,
    when q_G < p_G - 2 target_gap.
    """
    cfg = cfg or SolverConfig()
    pg = solve_pg(e, cfg).value
    qg = solve_qg(e, cfg).value
    pppt = solve_ppt(e, cfg).value
    slack = 2 * cfg.target_gap
    ordering_ok = pppt <= min(pg, qg) + slack
    nlwe = bool(e.separable_asserted and qg < pg - slack)
    return BoundsReport(pg, qg, pppt, bool(ordering_ok), nlwe)
