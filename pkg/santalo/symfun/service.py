"""Elementary symmetric polynomials and the coordinate-summed forms S_j / E_j.

Everything here works on plain arrays. A point tuple is a ``(k, n)`` array
whose row ``i`` is ``x_i``; batched helpers accept any leading shape.
"""

from itertools import combinations
from math import comb, prod

import numpy as np

from santalo.errors import DomainError
from santalo.logger import logger
from santalo.schemas import Diagnostic, PolarityParams, PolarityVerdict, Verdict
from santalo.settings import settings
from santalo.utils.parallel import chunk_bounds, ordered_map

TUPLE_CHUNK = 200_000


def elem_sym_upto(R: np.ndarray, j: int) -> np.ndarray:
    """Coefficients e_0..e_j of prod_i (1 + r_i t), taken over the last axis.

    Returns an array of shape ``(j + 1, *R.shape[:-1])``. Negating every
    entry multiplies e_t by (-1)^t exactly, so parity identities hold bitwise.
    """
    R = np.asarray(R, dtype=float)
    e = np.zeros((j + 1, *R.shape[:-1]))
    e[0] = 1.0
    for i in range(R.shape[-1]):
        x = R[..., i]
        for t in range(min(i + 1, j), 0, -1):
            e[t] = e[t] + x * e[t - 1]
    return e


def elem_sym_vec(R: np.ndarray, j: int) -> np.ndarray:
    return elem_sym_upto(R, j)[j]


def complete_homogeneous(r, j: int) -> np.ndarray | float:
    """Complete homogeneous symmetric polynomial h_j over the last axis."""
    R = np.asarray(r, dtype=float)
    if j < 0:
        raise DomainError(f"degree must be nonnegative, got {j}")
    h = np.zeros((j + 1, *R.shape[:-1]))
    h[0] = 1.0
    for i in range(R.shape[-1]):
        x = R[..., i]
        for t in range(1, j + 1):
            h[t] = h[t] + x * h[t - 1]
    out = h[j]
    return float(out) if out.ndim == 0 else out


def elem_sym(r, j: int) -> float:
    r = np.asarray(r, dtype=float).ravel()
    k = r.size
    if not 1 <= j <= k:
        raise DomainError(f"j={j} must satisfy 1 <= j <= k={k}", {"j": j, "k": k})
    return float(elem_sym_vec(r, j))


def elem_sym_bruteforce(r, j: int) -> float:
    """Sum over all j-subsets; reference implementation for small k."""
    r = [float(x) for x in r]
    if not 1 <= j <= len(r):
        raise DomainError(f"j={j} must satisfy 1 <= j <= k={len(r)}")
    return float(sum(prod(c) for c in combinations(r, j)))


def _as_tuple(points, k: int | None = None) -> np.ndarray:
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DomainError("a point tuple must be a (k, n) array")
    if k is not None and X.shape[0] != k:
        raise DomainError(f"expected {k} points, got {X.shape[0]}")
    return X


def _check_form(params: PolarityParams, absolute: bool) -> None:
    if params.p != 1.0 and not absolute:
        raise DomainError(
            "the signed form has no exponent; pass absolute=True to use p",
            {"p": params.p},
        )


def big_S_batch(
    X: np.ndarray, j: int, *, absolute: bool = False, p: float = 1.0
) -> np.ndarray:
    """S_j (or S_{j,p}) for a stack of tuples of shape ``(..., k, n)``."""
    X = np.asarray(X, dtype=float)
    if absolute:
        X = np.abs(X) ** p
    cols = np.swapaxes(X, -1, -2)
    return elem_sym_vec(cols, j).sum(axis=-1)


def big_S(points, params: PolarityParams, *, absolute: bool = False) -> float:
    """sum_l s_j(x_1(l), ..., x_k(l)); with ``absolute`` the weighted S_{j,p}."""
    _check_form(params, absolute)
    X = _as_tuple(points, params.k)
    return float(big_S_batch(X, params.j, absolute=absolute, p=params.p))


def big_E(points, params: PolarityParams, *, absolute: bool = False) -> float:
    """S_j / C(k, j) whatever the threshold; polarity checks divide by ``params.bound``."""
    return big_S(points, params, absolute=absolute) / params.binom


def amgm_bound(points, j: int) -> float:
    """(C(k,j)/k) * sum_i ||x_i||_j^j, a majorant of S_j and S_{j,1}."""
    X = _as_tuple(points)
    k = X.shape[0]
    if not 1 <= j <= k:
        raise DomainError(f"j={j} must satisfy 1 <= j <= k={k}")
    return comb(k, j) / k * float((np.abs(X) ** j).sum())


def maclaurin_gap(r, j1: int, j2: int) -> float:
    """E_{j1}(r)^{1/j1} - E_{j2}(r)^{1/j2}; nonnegative for r >= 0."""
    r = np.asarray(r, dtype=float).ravel()
    k = r.size
    if np.any(r < 0):
        raise DomainError("Maclaurin's inequality needs nonnegative entries")
    if not 1 <= j1 <= j2 <= k:
        raise DomainError(f"need 1 <= j1={j1} <= j2={j2} <= k={k}")
    e = elem_sym_upto(r, j2)
    m1 = max(e[j1] / comb(k, j1), 0.0) ** (1.0 / j1)
    m2 = max(e[j2] / comb(k, j2), 0.0) ** (1.0 / j2)
    return float(m1 - m2)


def check_polarity_on_points(
    vertex_sets,
    params: PolarityParams,
    tol: float | None = None,
    *,
    absolute: bool = False,
    workers: int | None = None,
) -> PolarityVerdict:
    """S_j / params.bound <= 1 + tol over the full Cartesian product of the point sets.

    With the default threshold C(k, j) this is E_j <= 1.

    A PASS certifies the condition for the convex hulls, since S_j is affine
    in each slot. The argmax is the lexicographically first maximizer.
    """
    tol = settings.POLARITY_TOL if tol is None else tol
    _check_form(params, absolute)
    sets = [np.asarray(s, dtype=float) for s in vertex_sets]
    if len(sets) != params.k:
        raise DomainError(f"expected {params.k} point sets, got {len(sets)}")
    sets = [s[:, None] if s.ndim == 1 else s for s in sets]
    if any(s.ndim != 2 or s.shape[0] == 0 for s in sets):
        raise DomainError("every point set must be nonempty")
    n = sets[0].shape[1]
    if any(s.shape[1] != n for s in sets):
        raise DomainError("point sets have different dimensions")

    shape = tuple(len(s) for s in sets)
    total = prod(shape)
    logger.debug(f"polarity check over {total} tuples (k={params.k}, j={params.j})")

    def scan(bounds: tuple[int, int]) -> tuple[float, int]:
        lo, hi = bounds
        idx = np.unravel_index(np.arange(lo, hi), shape)
        X = np.stack([s[i] for s, i in zip(sets, idx, strict=True)], axis=1)
        vals = big_S_batch(X, params.j, absolute=absolute, p=params.p) / params.bound
        best = int(np.argmax(vals))
        return float(vals[best]), lo + best

    results = ordered_map(scan, chunk_bounds(total, TUPLE_CHUNK), workers)
    best_val, best_flat = results[0]
    for val, flat in results[1:]:
        if val > best_val:
            best_val, best_flat = val, flat

    argmax = [int(i) for i in np.unravel_index(best_flat, shape)]
    witness = [sets[i][a].tolist() for i, a in enumerate(argmax)]
    verdict = Verdict.PASS if best_val <= 1.0 + tol else Verdict.FAIL
    diagnostics = []
    if verdict is Verdict.FAIL:
        diagnostics.append(
            Diagnostic(
                code="polarity_violated",
                message=f"S_{params.j} / {params.bound:g} reaches {best_val:.12g} > 1",
                data={"excess": best_val - 1.0},
            )
        )
    return PolarityVerdict(
        verdict=verdict,
        max_value=best_val,
        argmax=argmax,
        witness=witness,
        tol=tol,
        method="exact",
        diagnostics=diagnostics,
    )
