"""Dense complex linear algebra used throughout the package.

The eigensolver is a cyclic Jacobi method.  Rotations are applied in
round-robin ordering, so every round rotates ``n // 2`` disjoint index
pairs at once and can be vectorised with numpy.
"""

import numpy as np

__all__ = [
    "ValidationError",
    "SingularityError",
    "as_matrix",
    "is_hermitian",
    "hermitian_eigen",
    "operator_norm",
    "top_singular_pair",
    "spectral_power_trace",
]

HERMITIAN_TOL = 1e-12
JACOBI_OFF_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class ValidationError(ValueError):
    """Input matrix has the wrong shape or symmetry."""


class SingularityError(ValueError):
    """A spectral quantity needs an invertible matrix but got a singular one."""

    def __init__(self, message, eigenvalue):
        super().__init__(message)
        self.eigenvalue = eigenvalue


def as_matrix(m):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ValidationError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    return m


def is_hermitian(m, tol=HERMITIAN_TOL):
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = 1.0 + np.max(np.abs(m))
    return bool(np.max(np.abs(m - m.conj().T)) <= tol * scale)


def _require_hermitian(m):
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValidationError(f"matrix is not square: shape {m.shape}")
    if not is_hermitian(m):
        dev = np.max(np.abs(m - m.conj().T))
        raise ValidationError(f"matrix is not Hermitian (max |m - m^H| = {dev:.3e})")
    return m


def _round_robin(n):
    """Pairings of range(n) so that each round is a perfect matching.

    Odd ``n`` is padded with a dummy index that is dropped from the rounds.
    """
    m = n + (n % 2)
    order = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p, q = [], []
        for i in range(m // 2):
            a, b = order[i], order[m - 1 - i]
            if a < n and b < n:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=int), np.array(q, dtype=int)))
        order = [order[0], order[-1]] + order[1:-1]
    return rounds


def _jacobi(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    fro = np.linalg.norm(a)
    if n == 1 or fro == 0.0:
        return np.real(np.diag(a)).copy(), v, 0
    rounds = _round_robin(n)
    offmask = ~np.eye(n, dtype=bool)
    for sweep in range(1, max_sweeps + 1):
        for p, q in rounds:
            apq = a[p, q]
            r = np.abs(apq)
            active = r > 1e-300
            if not np.any(active):
                continue
            phase = np.where(active, apq / np.where(active, r, 1.0), 1.0)
            rr = np.where(active, r, 1.0)
            zeta = (np.real(a[q, q]) - np.real(a[p, p])) / (2.0 * rr)
            sgn = np.where(zeta >= 0.0, 1.0, -1.0)
            t = sgn / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            eph = np.conj(phase)
            g_pp, g_pq = c, s
            g_qp, g_qq = -s * eph, c * eph

            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = ap * g_pp + aq * g_qp
            a[:, q] = ap * g_pq + aq * g_qq
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = np.conj(g_pp)[:, None] * rp + np.conj(g_qp)[:, None] * rq
            a[q, :] = np.conj(g_pq)[:, None] * rp + np.conj(g_qq)[:, None] * rq
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * g_pp + vq * g_qp
            v[:, q] = vp * g_pq + vq * g_qq
        off = np.sqrt(np.sum(np.abs(a[offmask]) ** 2))
        if off <= tol * fro:
            return np.real(np.diag(a)).copy(), v, sweep
    raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def hermitian_eigen(m, method="jacobi"):
    """Eigen-decomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array_like
        Hermitian matrix.
    method : {"jacobi", "lapack"}
        ``"jacobi"`` runs the cyclic Jacobi solver of this module;
        ``"lapack"`` defers to :func:`numpy.linalg.eigh` and is used where
        speed matters more than self-containment.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in ascending order.
    eigenvectors : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    m = _require_hermitian(m)
    h = 0.5 * (m + m.conj().T)
    if method == "lapack":
        w, v = np.linalg.eigh(h)
        return w, v
    if method != "jacobi":
        raise ValueError(f"unknown method {method!r}")
    w, v, _ = _jacobi(np.array(h, dtype=complex), JACOBI_OFF_TOL, JACOBI_MAX_SWEEPS)
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def operator_norm(m, method="lapack"):
    """Largest singular value, computed as sqrt of the top eigenvalue of m^H m."""
    m = as_matrix(m)
    gram = m.conj().T @ m
    if method == "jacobi":
        w, _ = hermitian_eigen(gram, method="jacobi")
    else:
        w = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
    return float(np.sqrt(max(w[-1], 0.0)))


def top_singular_pair(m):
    """Return ``(sigma, u, v)`` with ``m v = sigma u`` for the largest sigma."""
    m = as_matrix(m)
    gram = m.conj().T @ m
    w, vecs = np.linalg.eigh(0.5 * (gram + gram.conj().T))
    sigma = float(np.sqrt(max(w[-1], 0.0)))
    v = vecs[:, -1]
    if sigma == 0.0:
        u = np.zeros(m.shape[0], dtype=complex)
        u[0] = 1.0
        return 0.0, u, v
    return sigma, (m @ v) / sigma, v


def spectral_power_trace(m, s):
    """Sum of ``|lambda|**(-s)`` over the eigenvalues of a Hermitian matrix."""
    if not s > 0:
        raise ValueError(f"exponent must be positive, got {s}")
    w, _ = hermitian_eigen(m)
    mags = np.abs(w)
    big = np.max(mags)
    worst = int(np.argmin(mags))
    if big == 0.0 or mags[worst] < 1e-12 * big:
        raise SingularityError(
            f"matrix is numerically singular: eigenvalue {w[worst]:.3e} "
            f"(largest magnitude {big:.3e})",
            float(w[worst]),
        )
    return float(np.sum(mags ** (-s)))
