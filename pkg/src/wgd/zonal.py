"""Partitions, zonal polynomials and hypergeometric functions of matrix argument.

Zonal polynomials use the C-normalization, in which the polynomials of
weight ``k`` sum to ``(tr Y)^k``.  Coefficients in the monomial symmetric
basis come from James' recurrence, in exact rational arithmetic for low
weights and in floating point above that.  Each weight is then rescaled so
that the sum identity holds.  Tables are built once per
``(weight, max_parts)`` pair and shared.

Partitions are plain tuples of positive integers in non-increasing order;
the empty tuple is the unique partition of zero.
"""

from __future__ import annotations

import hashlib
import inspect
import itertools
import json
import math
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, TruncationExceeded
from .matrix import as_symmetric, sym_eigvals
from .series import SeriesValue, Truncation, sum_layers

__all__ = [
    "Partition",
    "partitions_of",
    "gen_pochhammer",
    "gen_pochhammer_ln",
    "zonal",
    "zonal_layer",
    "zonal_matrix",
    "zonal_identity",
    "gamma_m_partition_ln",
    "hypergeom_matrix",
    "hypergeom_eigen",
    "ZonalTable",
    "default_table",
]

Partition = tuple[int, ...]


# ---------------------------------------------------------------------------
# partitions and Pochhammer symbols
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _partitions(k: int, max_parts: int, max_part: int) -> tuple[Partition, ...]:
    if k == 0:
        return ((),)
    if max_parts == 0:
        return ()
    out = []
    for first in range(min(k, max_part), 0, -1):
        for rest in _partitions(k - first, max_parts - 1, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions_of(k: int, max_parts: int) -> list[Partition]:
    """All partitions of ``k`` with at most ``max_parts`` parts.

    The list is in reverse-lexicographic order, so ``(k,)`` comes first.

    >>> partitions_of(4, 4)
    [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    """
    if k < 0:
        raise DomainError("weight must be non-negative")
    if max_parts < 1:
        raise DomainError("max_parts must be at least 1")
    return list(_partitions(int(k), int(max_parts), int(k)))


def gen_pochhammer(b: float, kappa: Sequence[int]) -> float:
    r"""Generalized Pochhammer symbol :math:`(b)_\kappa = \prod_i (b - (i-1)/2)_{k_i}`."""
    out = 1.0
    for i, ki in enumerate(kappa):
        c = b - 0.5 * i
        for j in range(ki):
            out *= c + j
    return out


def gen_pochhammer_ln(b: float, kappa: Sequence[int]) -> tuple[float, int]:
    """Log-magnitude and sign of :func:`gen_pochhammer`.

    Returns ``(-inf, 0)`` when the symbol vanishes.
    """
    logmag = 0.0
    sign = 1
    for i, ki in enumerate(kappa):
        if ki == 0:
            continue
        c = b - 0.5 * i
        if c > 0:
            logmag += float(gammaln(c + ki) - gammaln(c))
            continue
        for j in range(ki):
            v = c + j
            if v == 0:
                return -math.inf, 0
            if v < 0:
                sign = -sign
            logmag += math.log(abs(v))
    return logmag, sign


def gamma_m_partition_ln(a: float, kappa: Sequence[int], m: int) -> float:
    r"""Log of :math:`\Gamma_m(a,\kappa) = \pi^{m(m-1)/4}\prod_i \Gamma(a + k_i - (i-1)/2)`.

    Raises
    ------
    DomainError
        If any gamma argument is non-positive.
    """
    if len(kappa) > m:
        raise DomainError(f"partition {tuple(kappa)} has more than m={m} parts")
    parts = list(kappa) + [0] * (m - len(kappa))
    args = [a + parts[i] - 0.5 * i for i in range(m)]
    if min(args) <= 0:
        raise DomainError(f"gamma argument {min(args)} is not positive")
    return float(0.25 * m * (m - 1) * math.log(math.pi) + np.sum(gammaln(args)))


def _multinomial(lam: Partition) -> int:
    k = sum(lam)
    out = math.factorial(k)
    for part in lam:
        out //= math.factorial(part)
    return out


def _dominates(kappa: Partition, lam: Partition) -> bool:
    a = b = 0
    for i in range(max(len(kappa), len(lam))):
        a += kappa[i] if i < len(kappa) else 0
        b += lam[i] if i < len(lam) else 0
        if b > a:
            return False
    return True


def _rho(kappa: Partition) -> int:
    return sum(ki * (ki - i) for i, ki in enumerate(kappa, start=1))


# ---------------------------------------------------------------------------
# coefficient tables
# ---------------------------------------------------------------------------


def _weight_coefficients(k: int, max_parts: int, exact: bool = True):
    """Coefficients of each ``C_kappa`` of weight ``k`` in the monomial basis.

    Returns the partition list and a square matrix ``c`` (list of rows) with
    ``C_kappa = sum_lambda c[kappa][lambda] M_lambda``.  The matrix is upper
    triangular in reverse-lexicographic order.  With ``exact`` the entries
    are :class:`~fractions.Fraction`; otherwise floats.  Every term of the
    recurrence is positive, so the float version loses no accuracy to
    cancellation.
    """
    num = Fraction if exact else float
    parts = partitions_of(k, max_parts)
    index = {p: i for i, p in enumerate(parts)}
    size = len(parts)
    rho = [_rho(p) for p in parts]
    zero = num(0)
    unnorm = []
    for ik, kappa in enumerate(parts):
        row = [zero] * size
        row[ik] = num(1)
        for il in range(ik + 1, size):
            lam = parts[il]
            if not _dominates(kappa, lam):
                continue
            acc = zero
            nl = len(lam)
            for j in range(1, nl):
                lj = lam[j]
                for i in range(j):
                    li = lam[i]
                    for t in range(1, lj + 1):
                        mu = list(lam)
                        mu[i] = li + t
                        mu[j] = lj - t
                        im = index.get(tuple(sorted((x for x in mu if x), reverse=True)))
                        if im is None or not row[im]:
                            continue
                        acc += (li - lj + 2 * t) * row[im]
            if acc:
                row[il] = acc / (rho[ik] - rho[il])
        unnorm.append(row)
    # normalization from (tr Y)^k = sum_kappa C_kappa
    scale = [zero] * size
    for il, lam in enumerate(parts):
        target = num(_multinomial(lam))
        for ik in range(il):
            if unnorm[ik][il]:
                target -= scale[ik] * unnorm[ik][il]
        scale[il] = target
    coeffs = [[scale[ik] * c for c in unnorm[ik]] for ik in range(size)]
    return parts, coeffs


def _code_fingerprint() -> str:
    src = inspect.getsource(_weight_coefficients) + inspect.getsource(_partitions)
    return hashlib.sha256(src.encode()).hexdigest()[:16]


EXACT_MAX_WEIGHT = 14


@dataclass(frozen=True)
class _Weight:
    parts: tuple[Partition, ...]
    coeffs: np.ndarray  # float64 matrix, rows = kappa, columns = lambda
    exact: tuple[tuple[Fraction, ...], ...] | None


class ZonalTable:
    """Lazily built table of zonal coefficients keyed by ``(weight, max_parts)``.

    Parameters
    ----------
    max_weight : int
        Largest weight that may be requested.
    extend : bool
        When false, requests above ``max_weight`` raise
        :class:`TruncationExceeded`; when true the limit is ignored.
    cache_dir : path, optional
        Directory for a JSON cache of coefficients.  Files carry a
        fingerprint of the generating code and are ignored when it changes.
    exact_max_weight : int
        Weights up to this value are computed in exact rational arithmetic;
        larger weights use the same recurrence in floating point.
    """

    def __init__(
        self,
        max_weight: int = 200,
        extend: bool = True,
        cache_dir: str | Path | None = None,
        exact_max_weight: int = EXACT_MAX_WEIGHT,
    ):
        self.max_weight = max_weight
        self.extend = extend
        self.exact_max_weight = exact_max_weight
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        self._weights: dict[tuple[int, int], _Weight] = {}
        self._lock = threading.Lock()

    def weight(self, k: int, max_parts: int) -> _Weight:
        max_parts = max(1, min(max_parts, k)) if k > 0 else 1
        key = (k, max_parts)
        got = self._weights.get(key)
        if got is not None:
            return got
        if k > self.max_weight and not self.extend:
            raise TruncationExceeded(f"weight {k} exceeds table limit {self.max_weight}")
        with self._lock:
            got = self._weights.get(key)
            if got is None:
                got = self._build(k, max_parts)
                self._weights[key] = got
        return got

    def _cache_path(self, k: int, p: int) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"zonal_k{k}_p{p}.json"

    def _build(self, k: int, p: int) -> _Weight:
        path = self._cache_path(k, p)
        fp = _code_fingerprint()
        if path is not None and path.exists():
            try:
                obj = json.loads(path.read_text())
                if obj.get("fingerprint") == fp and obj.get("exact") == (k <= self.exact_max_weight):
                    parts = [tuple(x) for x in obj["parts"]]
                    conv = Fraction if obj["exact"] else float
                    coeffs = [[conv(s) for s in row] for row in obj["coeffs"]]
                    return self._pack(parts, coeffs)
            except (ValueError, KeyError):
                pass
        exact = k <= self.exact_max_weight
        parts, coeffs = _weight_coefficients(k, p, exact)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            obj = {
                "fingerprint": fp,
                "weight": k,
                "max_parts": p,
                "exact": exact,
                "parts": [list(x) for x in parts],
                "coeffs": [[str(c) if exact else repr(c) for c in row] for row in coeffs],
            }
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(obj))
            os.replace(tmp, path)
        return self._pack(parts, coeffs)

    @staticmethod
    def _pack(parts, coeffs) -> _Weight:
        arr = np.array([[float(c) for c in row] for row in coeffs], dtype=float)
        arr.setflags(write=False)
        exact = None
        if coeffs and isinstance(coeffs[0][0], Fraction):
            exact = tuple(tuple(r) for r in coeffs)
        return _Weight(tuple(parts), arr, exact)

    def exact_coefficients(self, k: int, max_parts: int) -> dict[Partition, dict[Partition, Fraction]]:
        """Exact monomial-basis coefficients (weights up to ``exact_max_weight``)."""
        w = self.weight(k, max_parts)
        if w.exact is None:
            raise DomainError(f"weight {k} is tabulated in floating point only")
        return {
            kap: {lam: c for lam, c in zip(w.parts, row) if c}
            for kap, row in zip(w.parts, w.exact)
        }


_cache_env = os.environ.get("WGD_ZONAL_CACHE")
default_table = ZonalTable(cache_dir=_cache_env or None)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _exponent_patterns(lam: Partition, m: int) -> np.ndarray:
    padded = tuple(lam) + (0,) * (m - len(lam))
    perms = sorted(set(itertools.permutations(padded)))
    return np.array(perms, dtype=np.int64)


def _monomials(parts: Sequence[Partition], y: np.ndarray) -> np.ndarray:
    m = y.shape[0]
    out = np.empty(len(parts), dtype=y.dtype)
    for i, lam in enumerate(parts):
        if len(lam) > m:
            out[i] = 0.0
            continue
        ex = _exponent_patterns(lam, m)
        out[i] = np.sum(np.prod(y[None, :] ** ex, axis=1))
    return out


def zonal_layer(k: int, eigenvalues, table: ZonalTable | None = None) -> tuple[tuple[Partition, ...], np.ndarray]:
    """All zonal polynomials of weight ``k`` at the given eigenvalues.

    Returns
    -------
    parts : tuple of Partition
        Partitions of ``k`` with at most ``len(eigenvalues)`` parts.
    values : ndarray
        ``C_kappa(Y)`` for each partition.  Partitions with more parts than
        eigenvalues are omitted because those polynomials vanish.  Complex
        eigenvalues give a complex result.
    """
    table = table or default_table
    y = np.asarray(eigenvalues).ravel()
    y = y.astype(complex if np.iscomplexobj(y) else float)
    m = y.shape[0]
    if k == 0:
        return ((),), np.ones(1, dtype=y.dtype)
    w = table.weight(k, m)
    mono = _monomials(w.parts, y)
    return w.parts, w.coeffs @ mono


def zonal(kappa: Sequence[int], eigenvalues, table: ZonalTable | None = None) -> float:
    """Zonal polynomial ``C_kappa`` evaluated at a list of eigenvalues.

    >>> round(zonal((2,), [1.0, 1.0]), 12)
    2.666666666667
    """
    kappa = tuple(int(x) for x in kappa if x)
    y = np.asarray(eigenvalues).ravel()
    if len(kappa) > y.shape[0]:
        return 0.0
    k = sum(kappa)
    if k == 0:
        return 1.0
    parts, vals = zonal_layer(k, y, table)
    val = vals[parts.index(kappa)]
    return complex(val) if np.iscomplexobj(vals) else float(val)


def zonal_matrix(kappa: Sequence[int], a, scale: complex | float = 1.0, table: ZonalTable | None = None):
    """``C_kappa(scale * A)`` for a real symmetric ``A``.

    Complex scalars enter through homogeneity, ``C_kappa(cA) = c^k C_kappa(A)``.
    """
    y = sym_eigvals(a)
    k = sum(kappa)
    val = zonal(kappa, y, table)
    if scale == 1.0:
        return val
    return (scale**k) * val


@lru_cache(maxsize=None)
def zonal_identity(kappa: Partition, m: int) -> float:
    """``C_kappa(I_m)`` from the closed-form product formula.

    Independent of the coefficient tables, so it doubles as a test oracle.
    """
    kappa = tuple(x for x in kappa if x)
    if len(kappa) > m:
        return 0.0
    k = sum(kappa)
    p = len(kappa)
    num = Fraction(2 ** (2 * k) * math.factorial(k))
    for i in range(p):
        for j in range(i + 1, p):
            num *= 2 * kappa[i] - 2 * kappa[j] - (i + 1) + (j + 1)
    den = 1
    for i in range(p):
        den *= math.factorial(2 * kappa[i] + p - (i + 1))
    return float(num / den) * gen_pochhammer(m / 2, kappa)


# ---------------------------------------------------------------------------
# hypergeometric functions of matrix argument
# ---------------------------------------------------------------------------


def hypergeom_eigen(a_list: Iterable[float], b_list: Iterable[float], eigenvalues, trunc=None) -> SeriesValue:
    """Truncated ``pFq(a; b; Y)`` from the eigenvalues of ``Y``.

    Returns a :class:`SeriesValue`; for a complex spectrum (conjugate
    pairs) the real part is reported.
    """
    a_list = tuple(float(a) for a in a_list)
    b_list = tuple(float(b) for b in b_list)
    trunc = trunc or Truncation()
    y = np.asarray(eigenvalues).ravel()
    m = y.shape[0]
    for j, b in enumerate(b_list):
        for i in range(m):
            if (b - 0.5 * i) <= 0 and float(b - 0.5 * i).is_integer():
                raise DomainError(f"denominator parameter b_{j + 1}={b} makes a Pochhammer symbol vanish")
    if len(a_list) == len(b_list) + 1 and np.max(np.abs(y), initial=0.0) >= 1:
        raise DomainError("pFq with p = q + 1 needs spectral radius below 1")
    if len(a_list) > len(b_list) + 1 and np.any(y != 0):
        raise DomainError("pFq with p > q + 1 diverges for nonzero argument")

    def layer(k: int) -> float:
        if k == 0:
            return 1.0
        parts, vals = zonal_layer(k, y)
        total = 0.0
        lfact = math.lgamma(k + 1)
        for kap, cv in zip(parts, vals):
            if cv == 0:
                continue
            logc, sign = 0.0, 1
            for a in a_list:
                la, sa = gen_pochhammer_ln(a, kap)
                logc += la
                sign *= sa
            for b in b_list:
                lb, sb = gen_pochhammer_ln(b, kap)
                logc -= lb
                sign *= sb
            if sign == 0:
                continue
            total += sign * math.exp(logc - lfact) * cv
        return total

    res = sum_layers(layer, trunc)
    if np.iscomplexobj(y):
        res = res.with_value(float(np.real(res.value)))
    return res


def hypergeom_matrix(a_list, b_list, x, trunc=None) -> SeriesValue:
    """Truncated hypergeometric function ``pFq(a; b; X)`` of a symmetric matrix.

    Parameters
    ----------
    a_list, b_list : sequence of float
        Numerator and denominator parameters.
    x : array_like
        Real symmetric matrix argument.
    trunc : Truncation, optional
        Series truncation policy.

    Returns
    -------
    SeriesValue
        Value together with the number of weights summed, the magnitude of
        the last layer and a convergence flag.
    """
    y = sym_eigvals(as_symmetric(x))
    return hypergeom_eigen(a_list, b_list, y, trunc)
