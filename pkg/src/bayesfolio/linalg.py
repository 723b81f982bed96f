"""Deterministic linear-algebra and sampling primitives shared by all models.

Conventions
-----------
* ``vec`` stacks matrix *columns* (Fortran order); ``unvec`` is its inverse.
* SPD matrices are factorised with Cholesky throughout; a failed factorisation
  is how degeneracy is detected and reported.
* Samplers take either an integer seed or a ``numpy.random.Generator`` so that
  chains can thread a single generator through repeated draws.

All functions are pure given an explicit seed and safe to call concurrently.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg as sla

from .validation import as_rng, check_matrix, check_spd, check_vector

#: diagonal jitter added to kernel Gram matrices to keep Cholesky happy
KERNEL_JITTER = 1e-8


def kron(a, b):
    """Kronecker product; block (i, j) of the result equals ``a[i, j] * b``."""
    a = check_matrix(a, "a")
    b = check_matrix(b, "b")
    return np.kron(a, b)


def vec(a):
    """Column-stack a matrix into a vector: vec([[1,2],[3,4]]) -> (1,3,2,4)."""
    a = check_matrix(a, "a")
    return a.reshape(-1, order="F").copy()


def unvec(v, rows, cols):
    """Inverse of :func:`vec`; requires ``len(v) == rows * cols``."""
    v = check_vector(v, "v")
    if v.size != rows * cols:
        raise ValueError(f"cannot reshape length-{v.size} vector to ({rows}, {cols})")
    return v.reshape((rows, cols), order="F").copy()


def symmetrize(a):
    """Average a matrix with its transpose (removes round-off asymmetry)."""
    return 0.5 * (a + a.T)


def project_simplex(v):
    """Euclidean projection onto the probability simplex.

    Sorting-based algorithm, O(d log d); exact in finite arithmetic up to the
    final thresholding.  Output is nonnegative and sums to one within 1e-12.
    """
    v = check_vector(v, "v")
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, v.size + 1)
    cond = u + (1.0 - css) / ks > 0
    rho = int(np.nonzero(cond)[0][-1])
    tau = (1.0 - css[rho]) / (rho + 1.0)
    return np.maximum(v + tau, 0.0)


def spd_cholesky(a, name="matrix"):
    """Lower Cholesky factor of an SPD matrix, raising ``ValueError`` on failure."""
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"{name} is not positive definite") from exc


def spd_solve(a, b, name="matrix"):
    """Solve ``a @ x = b`` for SPD ``a`` via Cholesky."""
    c = spd_cholesky(a, name)
    return sla.cho_solve((c, True), b)


def spd_inverse(a, name="matrix"):
    """Inverse of an SPD matrix via Cholesky, symmetrized against round-off."""
    inv = spd_solve(a, np.eye(a.shape[0]), name)
    return symmetrize(inv)


def spd_logdet(a, name="matrix"):
    """log-determinant of an SPD matrix via Cholesky."""
    c = spd_cholesky(a, name)
    return 2.0 * float(np.sum(np.log(np.diag(c))))


def sample_wishart(nu, psi, seed):
    """Draw from a Wishart distribution with ``nu`` degrees of freedom and scale ``psi``.

    Uses the Bartlett decomposition: with ``psi = L L^T`` and ``A`` lower
    triangular with chi distributed diagonal and standard normal
    subdiagonal, ``(L A)(L A)^T`` is Wishart with mean ``nu * psi``.
    Requires ``nu > d - 1``.
    """
    psi = check_matrix(psi, "psi")
    d = psi.shape[0]
    if not nu > d - 1:
        raise ValueError(f"degrees of freedom must exceed d - 1 = {d - 1}, got {nu}")
    rng = as_rng(seed)
    chol = spd_cholesky(psi, "psi")
    a = np.zeros((d, d))
    tril = np.tril_indices(d, k=-1)
    a[tril] = rng.standard_normal(len(tril[0]))
    a[np.diag_indices(d)] = np.sqrt(rng.chisquare(nu - np.arange(d)))
    la = chol @ a
    return la @ la.T


def sample_matrix_normal(mean, row_cov, col_cov, seed):
    """Draw a matrix whose vec is Gaussian with covariance ``col_cov (x) row_cov``.

    ``X = M + A Z B^T`` with ``A A^T = row_cov``, ``B B^T = col_cov`` and
    ``Z`` i.i.d. standard normal.
    """
    mean = check_matrix(mean, "mean")
    row_cov = check_matrix(row_cov, "row_cov")
    col_cov = check_matrix(col_cov, "col_cov")
    if mean.shape != (row_cov.shape[0], col_cov.shape[0]):
        raise ValueError(
            f"mean shape {mean.shape} inconsistent with row/column covariances "
            f"({row_cov.shape[0]}, {col_cov.shape[0]})"
        )
    rng = as_rng(seed)
    a = spd_cholesky(row_cov, "row_cov")
    b = spd_cholesky(col_cov, "col_cov")
    z = rng.standard_normal(mean.shape)
    return mean + a @ z @ b.T


def rbf_gram(times, gamma):
    """Squared-exponential kernel Gram matrix over scalar inputs.

    Entry (i, j) is ``exp(-(t_i - t_j)^2 / (2 gamma^2))``; a small diagonal
    jitter keeps the matrix positive definite for repeated or dense inputs.
    """
    times = check_vector(times, "times")
    if not np.isscalar(gamma) or not np.isfinite(gamma) or gamma <= 0:
        raise ValueError(f"gamma must be a positive number, got {gamma!r}")
    diff = times[:, None] - times[None, :]
    gram = np.exp(-(diff**2) / (2.0 * gamma**2))
    return gram + KERNEL_JITTER * np.eye(times.size)


def minimize_quadratic(a, b, decision_set="simplex", tol=1e-13, max_iter=200_000):
    """Minimize ``0.5 x^T a x - b^T x`` over the simplex or all of R^d.

    The unconstrained solution is a single SPD solve; the simplex case runs a
    projected gradient iteration with the exact Lipschitz step ``1/L``.
    """
    a = check_spd(a, "a")
    b = check_vector(b, "b", min_size=a.shape[0])
    if decision_set == "rd":
        return spd_solve(a, b, "a")
    if decision_set != "simplex":
        raise ValueError(f"unknown decision set {decision_set!r}")
    d = b.size
    lip = float(np.linalg.eigvalsh(a)[-1])
    x = np.full(d, 1.0 / d)
    for _ in range(max_iter):
        x_new = project_simplex(x - (a @ x - b) / lip)
        if float(np.abs(x_new - x).max()) < tol:
            return x_new
        x = x_new
    return x
