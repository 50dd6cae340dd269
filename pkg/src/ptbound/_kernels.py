"""Cyclic complex Jacobi eigensolver kernels.

Two implementations of the same sweep are provided: a numba ``@njit`` kernel
with scalar inner loops, and a pure-numpy kernel that updates whole rows and
columns per rotation. The numba path is used when numba imports cleanly and
``PTBOUND_DISABLE_NUMBA`` is unset (or ``0``); ``set_backend`` switches at
runtime, mostly for benchmarking.
"""

import os

import numpy as np

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def _rotation(app, aqq, apq):
    """Return (c, s, phase) of the unitary that zeroes ``apq``.

    The 2x2 column transform is ``[[c, s], [-s*conj(phase), c*conj(phase)]]``
    where ``phase = apq / |apq|``.
    """
    g = abs(apq)
    phase = apq / g
    tau = (aqq - app) / (2.0 * g)
    if tau >= 0.0:
        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c, phase


def _offdiag_norm_numpy(a):
    off = a - np.diag(np.diag(a))
    return np.sqrt(np.sum(off.real**2 + off.imag**2))


def jacobi_numpy(a, tol, max_sweeps):
    """Pure-numpy cyclic Jacobi. Returns (eigenvalues, eigenvectors, sweeps, off)."""
    a = np.array(a, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    off = _offdiag_norm_numpy(a)
    sweeps = 0
    while off > tol and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                c, s, ph = _rotation(a[p, p].real, a[q, q].real, apq)
                phc = np.conj(ph)
                jqp = -s * phc
                jqq = c * phc
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp + jqp * colq
                a[:, q] = s * colp + jqq * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp + np.conj(jqp) * rowq
                a[q, :] = s * rowp + np.conj(jqq) * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp + jqp * vq
                v[:, q] = s * vp + jqq * vq
        sweeps += 1
        off = _offdiag_norm_numpy(a)
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps, off


if HAS_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _offdiag_norm_nb(a):
        n = a.shape[0]
        acc = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    acc += a[i, j].real ** 2 + a[i, j].imag ** 2
        return np.sqrt(acc)

    @numba.njit(cache=True, nogil=True)
    def _jacobi_nb(a_in, tol, max_sweeps):
        a = a_in.copy()
        n = a.shape[0]
        v = np.eye(n, dtype=np.complex128)
        off = _offdiag_norm_nb(a)
        sweeps = 0
        while off > tol and sweeps < max_sweeps:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    g = abs(apq)
                    if g < 1e-300:
                        continue
                    ph = apq / g
                    tau = (a[q, q].real - a[p, p].real) / (2.0 * g)
                    if tau >= 0.0:
                        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = t * c
                    phc = np.conj(ph)
                    jqp = -s * phc
                    jqq = c * phc
                    for k in range(n):
                        xp = a[k, p]
                        xq = a[k, q]
                        a[k, p] = c * xp + jqp * xq
                        a[k, q] = s * xp + jqq * xq
                    for k in range(n):
                        xp = a[p, k]
                        xq = a[q, k]
                        a[p, k] = c * xp + np.conj(jqp) * xq
                        a[q, k] = s * xp + np.conj(jqq) * xq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    a[p, p] = a[p, p].real
                    a[q, q] = a[q, q].real
                    for k in range(n):
                        xp = v[k, p]
                        xq = v[k, q]
                        v[k, p] = c * xp + jqp * xq
                        v[k, q] = s * xp + jqq * xq
            sweeps += 1
            off = _offdiag_norm_nb(a)
        w = np.empty(n)
        for i in range(n):
            w[i] = a[i, i].real
        order = np.argsort(w, kind="mergesort")
        return w[order], v[:, order], sweeps, off

    def jacobi_numba(a, tol, max_sweeps):
        """numba cyclic Jacobi. Returns (eigenvalues, eigenvectors, sweeps, off)."""
        return _jacobi_nb(np.ascontiguousarray(a, dtype=np.complex128), float(tol), int(max_sweeps))

else:  # pragma: no cover
    jacobi_numba = None


def _env_wants_numba():
    flag = os.environ.get("PTBOUND_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


_backend = "numba" if (HAS_NUMBA and _env_wants_numba()) else "numpy"


def get_backend():
    return _backend


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"`` for subsequent eigensolves."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not importable")
    _backend = name


def jacobi(a, tol, max_sweeps):
    if _backend == "numba":
        return jacobi_numba(a, tol, max_sweeps)
    return jacobi_numpy(a, tol, max_sweeps)
