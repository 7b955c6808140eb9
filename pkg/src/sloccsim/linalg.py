"""Dense complex linear algebra on small dimensions (<= 4).

Vectors are 1-d complex ndarrays, matrices 2-d complex ndarrays. The
eigensolver is a cyclic Jacobi iteration specialised for Hermitian
matrices; at these dimensions it converges in a handful of sweeps and
needs no external solver.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

HERMITICITY_TOL = 1e-12
JACOBI_OFF_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100

# Entries below this magnitude (post normalization) do not anchor the
# global-phase convention.
PHASE_ANCHOR_TOL = 1e-12


class ConvergenceError(RuntimeError):
    """Jacobi iteration failed to reach the off-diagonal tolerance."""


class EigenPair(NamedTuple):
    value: float
    vector: np.ndarray


def _as_vector(u) -> np.ndarray:
    arr = np.asarray(u, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector contains non-finite entries")
    return arr


def _as_square_matrix(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains non-finite entries")
    return arr


def inner(u, v) -> complex:
    """<u|v>, conjugate-linear in the first argument."""
    u = _as_vector(u)
    v = _as_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return complex(np.vdot(u, v))


def outer(u, v) -> np.ndarray:
    """|u><v| as a matrix: result[i, j] = u[i] * conj(v[j])."""
    u = _as_vector(u)
    v = _as_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return np.multiply.outer(u, v.conj())


def hermiticity_defect(a) -> float:
    a = np.asarray(a, dtype=np.complex128)
    return float(np.max(np.abs(a - a.conj().T)))


def canonical_phase(v: np.ndarray, anchor_tol: float = PHASE_ANCHOR_TOL) -> np.ndarray:
    """Rotate a global phase so the first non-negligible entry is real >= 0."""
    for entry in v:
        mag = abs(entry)
        if mag > anchor_tol:
            return v * (entry.conjugate() / mag)
    return v


def _jacobi_rotate(a: list, v: list, n: int, p: int, q: int) -> None:
    """Apply in place the plane rotation G that zeroes a[p][q]: a <- G† a G, v <- v G.

    G is the identity outside the (p, q) plane, where it reads
    [[c, s], [-s*conj(w), c*conj(w)]] with w the phase of a[p][q] and
    (c, s) the classic symmetric-Schur pair for the phase-stripped block.
    Operates on nested lists of Python complex; at these dimensions that
    is several times faster than ndarray slicing.
    """
    apq = a[p][q]
    m = abs(apq)
    w = apq / m
    tau = (a[q][q].real - a[p][p].real) / (2.0 * m)
    if tau >= 0.0:
        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    wc = w.conjugate()

    # columns: a <- a G
    for i in range(n):
        row = a[i]
        aip = row[p]
        aiq = row[q] * wc
        row[p] = c * aip - s * aiq
        row[q] = s * aip + c * aiq
    # rows: a <- G† a
    row_p = a[p]
    row_q = a[q]
    for j in range(n):
        apj = row_p[j]
        aqj = row_q[j] * w
        row_p[j] = c * apj - s * aqj
        row_q[j] = s * apj + c * aqj
    row_p[q] = 0.0
    row_q[p] = 0.0

    for i in range(n):
        row = v[i]
        vip = row[p]
        viq = row[q] * wc
        row[p] = c * vip - s * viq
        row[q] = s * vip + c * viq


def _off_norm_sq(a: list, n: int) -> float:
    total = 0.0
    for i in range(n):
        row = a[i]
        for j in range(n):
            if i != j:
                x = row[j]
                total += x.real * x.real + x.imag * x.imag
    return total


def eigh(a, *, tol: float = JACOBI_OFF_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS,
         hermiticity_tol: float = HERMITICITY_TOL) -> list[EigenPair]:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Args:
        a: square Hermitian matrix (defect up to `hermiticity_tol` is
           symmetrized away; larger defects raise ValueError).
        tol: off-diagonal Frobenius tolerance, relative to the matrix norm.
        max_sweeps: sweep budget; exceeding it raises ConvergenceError.

    Returns:
        EigenPair list sorted by descending eigenvalue. Eigenvectors are
        orthonormal; each has its first non-negligible entry real >= 0.
        Directions inside a degenerate cluster are not specified beyond
        orthonormality.
    """
    arr = _as_square_matrix(a)
    defect = hermiticity_defect(arr)
    if defect > hermiticity_tol:
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3e}")
    arr = 0.5 * (arr + arr.conj().T)

    n = arr.shape[0]
    threshold = tol * max(1.0, float(np.linalg.norm(arr)))
    pivot_floor = threshold / (n * n)
    threshold_sq = threshold * threshold

    work = arr.tolist()
    v = [[1.0 + 0.0j if i == j else 0.0j for j in range(n)] for i in range(n)]

    converged = _off_norm_sq(work, n) <= threshold_sq
    for _ in range(max_sweeps):
        if converged:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(work[p][q]) <= pivot_floor:
                    continue
                _jacobi_rotate(work, v, n, p, q)
        converged = _off_norm_sq(work, n) <= threshold_sq
    if not converged:
        raise ConvergenceError(
            f"Jacobi sweeps exhausted (off-diagonal norm "
            f"{math.sqrt(_off_norm_sq(work, n)):.3e} > {threshold:.3e} "
            f"after {max_sweeps} sweeps)")

    values = [work[i][i].real for i in range(n)]
    vmat = np.asarray(v, dtype=np.complex128)
    order = sorted(range(n), key=lambda i: -values[i])
    pairs = []
    for idx in order:
        vec = canonical_phase(vmat[:, idx].copy())
        vec.flags.writeable = False
        pairs.append(EigenPair(float(values[idx]), vec))
    return pairs
