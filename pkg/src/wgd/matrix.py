"""Symmetric and positive-definite matrix primitives.

The central type is :class:`SpdMatrix`, an immutable wrapper around a
symmetric positive-definite array that caches its eigendecomposition,
Cholesky factor and log-determinant.  Multivariate gamma and beta
functions are evaluated in log space.
"""

from __future__ import annotations

import csv
import json
import math
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import linalg
from scipy.special import gammaln

from .errors import DomainError, NotPositiveDefinite, NotSymmetric

__all__ = [
    "SpdMatrix",
    "as_symmetric",
    "as_spd",
    "spd_from_entries",
    "sqrt_spd",
    "mv_gamma_ln",
    "mv_beta_ln",
    "sym_eigvals",
    "product_eigvals",
    "load_matrix",
    "matrix_to_json",
]

SYM_RTOL = 1e-10
PD_RTOL = 1e-12


def as_symmetric(entries, tol: float | None = None) -> np.ndarray:
    """Validate a square real array as symmetric and return a symmetric copy.

    Parameters
    ----------
    entries : array_like
        Square matrix.
    tol : float, optional
        Maximum allowed ``|A[i, j] - A[j, i]|``.  Defaults to
        ``1e-10 * max|A|``.

    Raises
    ------
    NotSymmetric
        If the array is not square or the asymmetry exceeds ``tol``.
    """
    a = np.array(entries, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotSymmetric("matrix has non-finite entries")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if tol is None:
        tol = SYM_RTOL * max(scale, 1e-300)
    diff = np.abs(a - a.T)
    worst = float(diff.max()) if diff.size else 0.0
    if worst > tol:
        i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
        raise NotSymmetric(
            f"entries ({i}, {j}) and ({j}, {i}) differ by {worst:.3g} > tol {tol:.3g}"
        )
    return 0.5 * (a + a.T)


class SpdMatrix:
    """Immutable symmetric positive-definite matrix with cached factorizations.

    Construct through :func:`spd_from_entries` (or :func:`as_spd`), which
    performs validation.  Eigenvalues are stored in descending order.
    """

    def __init__(self, array: np.ndarray, eigenvalues: np.ndarray, eigenvectors: np.ndarray):
        array = np.array(array, dtype=float)
        array.setflags(write=False)
        eigenvalues = np.array(eigenvalues, dtype=float)
        eigenvalues.setflags(write=False)
        eigenvectors = np.array(eigenvectors, dtype=float)
        eigenvectors.setflags(write=False)
        self._a = array
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._a

    @property
    def m(self) -> int:
        return self._a.shape[0]

    @cached_property
    def cholesky(self) -> np.ndarray:
        """Lower-triangular Cholesky factor ``L`` with ``L @ L.T == A``."""
        try:
            c = linalg.cholesky(self._a, lower=True)
        except linalg.LinAlgError as exc:  # pragma: no cover - guarded by eigen check
            raise NotPositiveDefinite(str(exc)) from exc
        c.setflags(write=False)
        return c

    @cached_property
    def logdet(self) -> float:
        return float(np.sum(np.log(self.eigenvalues)))

    @cached_property
    def inverse(self) -> np.ndarray:
        v, w = self.eigenvectors, self.eigenvalues
        inv = (v / w) @ v.T
        inv = 0.5 * (inv + inv.T)
        inv.setflags(write=False)
        return inv

    def inv(self) -> "SpdMatrix":
        """Inverse as an :class:`SpdMatrix` (shares the eigenvectors)."""
        return SpdMatrix(self.inverse, (1.0 / self.eigenvalues)[::-1], self.eigenvectors[:, ::-1])

    def trace_solve(self, x: np.ndarray) -> float:
        """Return ``tr(A^{-1} x)`` using the Cholesky factor."""
        sol = linalg.cho_solve((self.cholesky, True), np.asarray(x, dtype=float))
        return float(np.trace(sol))

    def power(self, r: float) -> np.ndarray:
        """Spectral power ``A^r``."""
        v = self.eigenvectors
        out = (v * self.eigenvalues**r) @ v.T
        return 0.5 * (out + out.T)

    def scaled(self, c: float) -> "SpdMatrix":
        if not c > 0:
            raise DomainError("scale factor must be positive")
        return SpdMatrix(c * self._a, c * self.eigenvalues, self.eigenvectors)

    def __array__(self, dtype=None, copy=None):
        return np.array(self._a, dtype=dtype)

    def __repr__(self) -> str:
        return f"SpdMatrix(m={self.m}, eigenvalues={np.array2string(self.eigenvalues, precision=4)})"


def spd_from_entries(entries, tol: float | None = None) -> SpdMatrix:
    """Validate ``entries`` as symmetric positive definite.

    Parameters
    ----------
    entries : array_like
        Square real matrix.
    tol : float, optional
        Symmetry tolerance (absolute).  The positive-definiteness threshold
        is ``1e-12`` times the largest eigenvalue, or ``tol`` if that is larger.

    Returns
    -------
    SpdMatrix

    Raises
    ------
    NotSymmetric, NotPositiveDefinite

    Examples
    --------
    >>> spd_from_entries([[2.0, 1.0], [1.0, 2.0]]).eigenvalues
    array([3., 1.])
    """
    a = as_symmetric(entries, tol)
    w, v = np.linalg.eigh(a)
    w, v = w[::-1], v[:, ::-1]
    top = float(w[0]) if w.size else 0.0
    threshold = PD_RTOL * max(abs(top), 0.0)
    if tol is not None:
        threshold = max(threshold, tol)
    if top <= 0 or w[-1] <= threshold:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {w[-1]:.6g} is not above the threshold {threshold:.3g}"
        )
    return SpdMatrix(a, w, v)


def as_spd(x) -> SpdMatrix:
    """Return ``x`` unchanged if it is an :class:`SpdMatrix`, else validate it."""
    if isinstance(x, SpdMatrix):
        return x
    return spd_from_entries(x)


def sqrt_spd(a) -> SpdMatrix:
    """Unique symmetric positive-definite square root."""
    a = as_spd(a)
    root = np.sqrt(a.eigenvalues)
    s = (a.eigenvectors * root) @ a.eigenvectors.T
    s = 0.5 * (s + s.T)
    return SpdMatrix(s, root, a.eigenvectors)


def sym_eigvals(a) -> np.ndarray:
    """Eigenvalues (descending) of a symmetric matrix."""
    a = as_symmetric(a)
    return np.linalg.eigvalsh(a)[::-1]


def product_eigvals(a, b) -> np.ndarray:
    """Eigenvalues of the product ``a @ b``.

    Zonal polynomials of a product depend only on its spectrum.  When ``a``
    is symmetric and ``b`` positive definite the product is similar to
    ``b^{1/2} a b^{1/2}`` and real eigenvalues come from that symmetric
    form.  Otherwise the general solver is used; the result is real when the
    imaginary parts are negligible and complex (in conjugate pairs)
    otherwise.  Symmetric functions of a complex spectrum of a real matrix
    are real, so callers take the real part of zonal values.
    """
    a_arr = np.asarray(a, dtype=float)
    if isinstance(b, SpdMatrix) and np.allclose(a_arr, a_arr.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a_arr).max())):
        s = sqrt_spd(b).array
        c = s @ a_arr @ s
        return np.linalg.eigvalsh(0.5 * (c + c.T))[::-1]
    b_arr = np.asarray(b, dtype=float)
    w = np.linalg.eigvals(a_arr @ b_arr)
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    if np.all(np.abs(w.imag) <= 1e-12 * scale):
        return np.sort(w.real)[::-1]
    return w


def mv_gamma_ln(a: float, m: int) -> float:
    r"""Log of the multivariate gamma function.

    .. math:: \Gamma_m(a) = \pi^{m(m-1)/4} \prod_{i=1}^m \Gamma(a - (i-1)/2)

    Raises
    ------
    DomainError
        If ``a <= (m - 1) / 2``.
    """
    if m < 1:
        raise DomainError("dimension must be positive")
    if not a > (m - 1) / 2:
        raise DomainError(f"multivariate gamma needs a > {(m - 1) / 2}, got {a}")
    i = np.arange(m)
    return float(0.25 * m * (m - 1) * math.log(math.pi) + np.sum(gammaln(a - 0.5 * i)))


def mv_beta_ln(a: float, b: float, m: int) -> float:
    """Log of the multivariate beta function ``Γ_m(a)Γ_m(b)/Γ_m(a+b)``."""
    return mv_gamma_ln(a, m) + mv_gamma_ln(b, m) - mv_gamma_ln(a + b, m)


def load_matrix(path: str | Path) -> np.ndarray:
    """Read a matrix from a JSON ``{"m": int, "rows": [...]}`` or CSV file."""
    path = Path(path)
    text = path.read_text()
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        obj = json.loads(text)
        rows = obj["rows"] if isinstance(obj, dict) else obj
        a = np.array(rows, dtype=float)
        if isinstance(obj, dict) and "m" in obj and a.shape != (obj["m"], obj["m"]):
            raise ValueError(f"{path}: declared m={obj['m']} but rows have shape {a.shape}")
    else:
        rows = [[float(v) for v in row] for row in csv.reader(text.splitlines()) if row]
        a = np.array(rows, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{path}: expected a square matrix, got shape {a.shape}")
    return a


def matrix_to_json(a) -> dict:
    """Matrix in the JSON file layout."""
    a = np.asarray(a, dtype=float)
    return {"m": int(a.shape[0]), "rows": a.tolist()}
