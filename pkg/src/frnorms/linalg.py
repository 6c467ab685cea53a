"""Dense complex-matrix kernel.

Matrices are plain ``numpy.ndarray`` values of dtype complex128.  All
spectral computations in the package go through the cyclic Jacobi
eigensolver implemented here; it is unconditionally convergent on
Hermitian input and needs nothing beyond numpy array arithmetic.  A
batched variant runs the same rotation schedule on a stack of matrices
simultaneously, which keeps large sampling loops cheap.
"""
from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, DimensionError, HermitianError

# Relative tolerance for the Hermitian-input gate.
HERMITIAN_RTOL = 1e-12
# Slack allowed below zero when classifying eigenvalues as nonnegative.
PSD_SLACK = 1e-10
# Jacobi sweep convergence: off-diagonal Frobenius mass below this
# multiple of the diagonal mass.
JACOBI_OFF_RTOL = 1e-14
JACOBI_MAX_SWEEPS = 100

_TINY = 1e-300


def as_matrix(values) -> np.ndarray:
    """Coerce to a finite complex 2-d array."""
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got ndim={arr.ndim}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def adjoint(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def ensure_square(m: np.ndarray) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def ensure_hermitian(m: np.ndarray) -> np.ndarray:
    """Validate Hermitian symmetry within HERMITIAN_RTOL (relative)."""
    m = ensure_square(m)
    dev = np.abs(m - adjoint(m)).max(initial=0.0)
    scale = np.abs(m).max(initial=0.0)
    if dev > HERMITIAN_RTOL * scale:
        raise HermitianError(
            f"matrix is not Hermitian: max deviation {dev:.3e} vs scale {scale:.3e}"
        )
    return m


def _rotation_params(a, d, b):
    """Jacobi angle for the 2x2 Hermitian block [[a, b], [conj(b), d]].

    Returns (c, sigma, delta) with G = [[c, sigma], [-conj(sigma), c]],
    c real, such that (G^H H G)[0, 1] = 0; delta = t|b| is the exact
    shift of the two diagonal entries (a - delta, d + delta), applied
    directly because routing it through the column arithmetic loses a
    few ulps to the rounding of c^2.
    """
    absb = abs(b)
    if absb <= _TINY:
        return 1.0, 0.0j, 0.0
    tau = (d - a) / (2.0 * absb)
    tau = min(max(tau, -1e150), 1e150)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    sigma = (t * c) * (b / absb)
    return c, sigma, t * absb


def _off_diag_mass(h: np.ndarray) -> tuple[float, float]:
    # Summing the off-diagonal entries directly avoids the catastrophic
    # cancellation of a total-minus-diagonal formulation near convergence.
    abs2 = np.abs(h) ** 2
    diag2 = float(np.trace(abs2))
    np.fill_diagonal(abs2, 0.0)
    off2 = float(abs2.sum())
    return np.sqrt(off2), np.sqrt(diag2)


def jacobi_eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns (w, v) with eigenvalues w ascending and unitary v such that
    m ~= v @ diag(w) @ v^H.  Convergence: off-diagonal Frobenius mass
    below JACOBI_OFF_RTOL times the diagonal mass, hard cap
    JACOBI_MAX_SWEEPS sweeps.
    """
    m = ensure_hermitian(m)
    n = m.shape[0]
    h = 0.5 * (m + adjoint(m))
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        return h.real.reshape(1).copy(), v
    for _ in range(JACOBI_MAX_SWEEPS):
        off, diag = _off_diag_mass(h)
        if off <= JACOBI_OFF_RTOL * diag:
            break
        # Entries already below this level cannot push the off-diagonal
        # mass over the convergence criterion; rotating on them would only
        # re-inject roundoff, so they are skipped this sweep.
        skip = JACOBI_OFF_RTOL * diag / (2.0 * n)
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(h[p, q]) <= skip:
                    continue
                app = h[p, p].real
                aqq = h[q, q].real
                c, sigma, delta = _rotation_params(app, aqq, h[p, q])
                if sigma == 0.0:
                    continue
                sigma_c = np.conj(sigma)
                colp = h[:, p].copy()
                h[:, p] = c * colp - sigma_c * h[:, q]
                h[:, q] = sigma * colp + c * h[:, q]
                rowp = h[p, :].copy()
                h[p, :] = c * rowp - sigma * h[q, :]
                h[q, :] = sigma_c * rowp + c * h[q, :]
                h[p, q] = 0.0
                h[q, p] = 0.0
                h[p, p] = app - delta
                h[q, q] = aqq + delta
                vcolp = v[:, p].copy()
                v[:, p] = c * vcolp - sigma_c * v[:, q]
                v[:, q] = sigma * vcolp + c * v[:, q]
    else:
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )
    w = np.diagonal(h).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    w, _ = jacobi_eigh(m)
    return w


def jacobi_eigvals_batch(h: np.ndarray) -> np.ndarray:
    """Eigenvalues (ascending) for a stack of Hermitian matrices.

    ``h`` has shape (batch, n, n); the cyclic rotation schedule is applied
    across the whole stack until every member satisfies the convergence
    criterion of :func:`jacobi_eigh`.
    """
    h = np.array(h, dtype=np.complex128)
    if h.ndim != 3 or h.shape[1] != h.shape[2]:
        raise DimensionError(f"expected a (batch, n, n) stack, got shape {h.shape}")
    nb, n, _ = h.shape
    if nb == 0 or n == 1:
        return np.ascontiguousarray(h[:, 0, 0].real).reshape(nb, n)
    h = 0.5 * (h + np.conj(np.swapaxes(h, 1, 2)))
    diag_idx = np.arange(n)
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(JACOBI_MAX_SWEEPS):
        abs2 = np.abs(h) ** 2
        diag2 = abs2[:, diag_idx, diag_idx].sum(axis=1)
        off = np.sqrt(np.sum(abs2[:, off_mask], axis=1))
        if np.all(off <= JACOBI_OFF_RTOL * np.sqrt(diag2)):
            break
        skip = JACOBI_OFF_RTOL * np.sqrt(diag2) / (2.0 * n)
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = h[:, p, q]
                absb = np.abs(b)
                rotate = absb > np.maximum(skip, _TINY)
                if not np.any(rotate):
                    continue
                a = h[:, p, p].real.copy()
                d = h[:, q, q].real.copy()
                denom = np.maximum(absb, _TINY)
                tau = np.clip((d - a) / (2.0 * denom), -1e150, 1e150)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(rotate, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                sigma = (t * c) * (b / denom)
                sigma_c = np.conj(sigma)
                colp = h[:, :, p].copy()
                colq = h[:, :, q]
                h[:, :, p] = c[:, None] * colp - sigma_c[:, None] * colq
                h[:, :, q] = sigma[:, None] * colp + c[:, None] * colq
                rowp = h[:, p, :].copy()
                rowq = h[:, q, :]
                h[:, p, :] = c[:, None] * rowp - sigma[:, None] * rowq
                h[:, q, :] = sigma_c[:, None] * rowp + c[:, None] * rowq
                h[:, p, q] = np.where(rotate, 0.0, h[:, p, q])
                h[:, q, p] = np.where(rotate, 0.0, h[:, q, p])
                delta = t * absb
                h[:, p, p] = a - delta
                h[:, q, q] = d + delta
    else:
        raise ConvergenceError(
            f"batched Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )
    w = h[:, diag_idx, diag_idx].real
    return np.sort(w, axis=1)


def hermitian_opnorm(m: np.ndarray) -> float:
    """Operator norm of a Hermitian matrix (largest eigenvalue magnitude)."""
    w = hermitian_eigenvalues(m)
    return float(np.max(np.abs(w), initial=0.0))


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value, via the Hermitian eigenproblem for m^H m.

    Exactly Hermitian inputs skip the squaring and use the eigenvalue
    magnitudes directly, which avoids the precision loss of the m^H m
    detour (a spectral value of 3 comes back as 3.0, not 2.9999...96).
    """
    m = ensure_square(m)
    if not m.any():
        return 0.0
    if np.array_equal(m, adjoint(m)):
        return hermitian_opnorm(m)
    gram = adjoint(m) @ m
    w, _ = jacobi_eigh(gram)
    return float(np.sqrt(max(w[-1], 0.0)))


def opnorm_batch(m: np.ndarray) -> np.ndarray:
    """Operator norms for a stack of (not necessarily Hermitian) matrices."""
    gram = np.conj(np.swapaxes(m, 1, 2)) @ m
    w = jacobi_eigvals_batch(gram)
    return np.sqrt(np.maximum(w[:, -1], 0.0))


def hermitian_opnorm_batch(h: np.ndarray) -> np.ndarray:
    w = jacobi_eigvals_batch(h)
    return np.max(np.abs(w), axis=1)


def is_positive_semidefinite(m: np.ndarray) -> bool:
    """True iff m is Hermitian within tolerance and its spectrum is
    nonnegative up to PSD_SLACK * max(1, ||m||_op)."""
    m = ensure_square(m)
    try:
        w = hermitian_eigenvalues(m)
    except HermitianError:
        return False
    opn = float(np.max(np.abs(w), initial=0.0))
    return bool(w.size == 0 or w[0] >= -PSD_SLACK * max(1.0, opn))


def matrix_to_json(m: np.ndarray) -> dict:
    """Encode as {"rows": n, "cols": m, "data": [[re, im], ...]} row-major."""
    m = as_matrix(m)
    data = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": data}


def matrix_from_json(obj) -> np.ndarray:
    """Decode the matrix encoding produced by :func:`matrix_to_json`."""
    if not isinstance(obj, dict):
        raise DimensionError("matrix object must be a JSON mapping")
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionError(f"malformed matrix object: {exc}") from exc
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise DimensionError(
            f"matrix data length {len(data)} does not match {rows}x{cols}"
        )
    out = np.empty(rows * cols, dtype=np.complex128)
    for idx, pair in enumerate(data):
        if len(pair) != 2:
            raise DimensionError("matrix entries must be [re, im] pairs")
        out[idx] = complex(float(pair[0]), float(pair[1]))
    out = out.reshape(rows, cols)
    if out.size and not np.all(np.isfinite(out)):
        raise ValueError("matrix entries must be finite")
    return out
