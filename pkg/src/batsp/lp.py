"""Dense-tableau primal simplex for feasibility (phase-1) problems.

Solves ``min 1'a  s.t.  A y + a = b, y >= 0, a >= 0`` starting from the
all-artificial basis.  Pivoting uses Dantzig's rule and falls back to
Bland's rule after a run of degenerate pivots, so the method terminates.
The returned point is a basic solution, hence a vertex of
``{y >= 0 : A y = b}`` whenever the residual is zero.

With ``exact=True`` the tableau holds :class:`fractions.Fraction` entries
and every comparison is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import IterationLimit

DEGENERATE_STREAK = 50


@dataclass
class Phase1Result:
    y: np.ndarray
    residual: float
    basis: list[int]
    duals: np.ndarray | None
    pivots: int


def _as_exact(a) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    flat_in, flat_out = a.reshape(-1), out.reshape(-1)
    for i, v in enumerate(flat_in):
        flat_out[i] = v if isinstance(v, Fraction) else Fraction(v)
    return out


def phase1(A, b, *, exact: bool = False, tol: float = 1e-10, max_pivots: int | None = None) -> Phase1Result:
    """Find a basic feasible solution of ``A y = b, y >= 0`` if one exists."""
    if exact:
        A, b = _as_exact(A), _as_exact(b)
        zero, one, tol = Fraction(0), Fraction(1), Fraction(0)
    else:
        A, b = np.asarray(A, dtype=np.float64), np.asarray(b, dtype=np.float64)
        zero, one = 0.0, 1.0
    m, nv = A.shape
    # Rows with negative right-hand side are negated so artificials start >= 0.
    sign = np.where(np.array([bi < 0 for bi in b], dtype=bool), -1, 1)
    A = A * sign[:, None]
    b = b * sign

    width = nv + m + 1
    T = np.empty((m + 1, width), dtype=object if exact else np.float64)
    T[:m, :nv] = A
    T[:m, nv:nv + m] = zero
    for i in range(m):
        T[i, nv + i] = one
    T[:m, -1] = b
    T[m, :] = zero
    T[m, :nv] = -A.sum(axis=0) if m else zero
    T[m, -1] = -b.sum() if m else zero
    basis = list(range(nv, nv + m))

    limit = max_pivots if max_pivots is not None else 50 * (m + nv) + 1000
    pivots = 0
    streak = 0
    bland = False
    while True:
        obj = T[m, : nv + m]
        if bland:
            cand = [j for j in range(nv + m) if obj[j] < -tol]
            if not cand:
                break
            col = cand[0]
        else:
            if exact:
                col = min(range(nv + m), key=lambda j: (obj[j], j))
                if not obj[col] < 0:
                    break
            else:
                col = int(np.argmin(obj))
                if not obj[col] < -tol:
                    break
        column = T[:m, col]
        best_row = None
        best_key = None
        for i in range(m):
            if column[i] > tol:
                ratio = T[i, -1] / column[i]
                key = (ratio, basis[i])
                if best_key is None or key < best_key:
                    best_key, best_row = key, i
        if best_row is None:
            # Unbounded direction cannot occur: the phase-1 objective is bounded below.
            raise IterationLimit("phase-1 simplex found an unbounded ray")
        if best_key[0] == 0 or (not exact and best_key[0] <= tol):
            streak += 1
            if streak > DEGENERATE_STREAK:
                bland = True
        else:
            streak = 0
        _pivot(T, best_row, col)
        basis[best_row] = col
        pivots += 1
        if pivots > limit:
            raise IterationLimit(f"simplex exceeded {limit} pivots")

    full = np.concatenate([A, _identity(m, exact)], axis=1) if m else A
    if exact:
        values = np.array([zero] * (nv + m), dtype=object)
        for i, j in enumerate(basis):
            values[j] = T[i, -1]
        duals = None
    else:
        values = np.zeros(nv + m)
        B = full[:, basis]
        try:
            xb = np.linalg.solve(B, b)
        except np.linalg.LinAlgError:
            xb = T[:m, -1].astype(np.float64)
        values[basis] = xb
        values[np.abs(values) < 1e-12] = 0.0
        cb = np.array([1.0 if j >= nv else 0.0 for j in basis])
        try:
            duals = np.linalg.solve(B.T, cb) * sign
        except np.linalg.LinAlgError:
            duals = None
    residual = sum(values[nv:], zero) if m else zero
    y = values[:nv]
    if not exact:
        y = np.maximum(y, 0.0)
    return Phase1Result(y=y, residual=residual, basis=basis, duals=duals, pivots=pivots)


def _identity(m: int, exact: bool) -> np.ndarray:
    if not exact:
        return np.eye(m)
    eye = np.empty((m, m), dtype=object)
    eye[:, :] = Fraction(0)
    for i in range(m):
        eye[i, i] = Fraction(1)
    return eye


def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] = T[r] / T[r, c]
    col = T[:, c].copy()
    col[r] = 0
    nz = np.flatnonzero(col != 0)
    if nz.size:
        T[nz] -= np.outer(col[nz], T[r])


def rational_rank(rows, ncols: int, target: int | None = None) -> int:
    """Exact rank of a row collection via incremental Gaussian elimination.

    Rows may be any iterable of length-``ncols`` sequences of ints or
    Fractions.  Stops early once ``target`` independent rows are found.
    """
    pivots: dict[int, list[Fraction]] = {}
    order: list[int] = []
    for row in rows:
        r = [Fraction(v) for v in row]
        for p in order:
            if r[p] != 0:
                f = r[p]
                prow = pivots[p]
                r = [a - f * b for a, b in zip(r, prow)]
        lead = next((j for j in range(ncols) if r[j] != 0), None)
        if lead is None:
            continue
        inv = 1 / r[lead]
        r = [a * inv for a in r]
        # Keep the basis fully reduced so later rows need one pass.
        for p in order:
            prow = pivots[p]
            if prow[lead] != 0:
                f = prow[lead]
                pivots[p] = [a - f * b for a, b in zip(prow, r)]
        pivots[lead] = r
        order.append(lead)
        if target is not None and len(order) >= target:
            break
    return len(order)
