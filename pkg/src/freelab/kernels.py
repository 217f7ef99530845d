"""
Hot numerical kernels.

Each kernel exists twice: a scalar-loop version compiled with numba and a
vectorized numpy version. Both run the same rotation schedule, so they agree
to rounding. Set ``FREELAB_DISABLE_NUMBA=1`` (or run without numba installed)
to select the numpy path.
"""

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

USE_NUMBA = numba is not None and os.environ.get("FREELAB_DISABLE_NUMBA", "").lower() not in ("1", "true", "yes")

BACKEND = "numba" if USE_NUMBA else "numpy"


def round_robin_schedule(n):
    """Pair schedule covering every index pair once per sweep.

    Returns an int array of shape ``(rounds, n_pad // 2, 2)`` where each round
    is a set of disjoint pairs ``p < q``. For odd ``n`` one slot per round holds
    the sentinel ``-1`` and is skipped.
    """
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p >= n or q >= n:
                pairs.append((-1, -1))
            else:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    if not rounds:
        return np.zeros((0, 0, 2), dtype=np.int64)
    return np.asarray(rounds, dtype=np.int64)


def _jacobi_loops(a, vt, schedule, tol, max_sweeps):
    """Round-robin cyclic complex Jacobi on ``a`` in place.

    ``vt`` accumulates eigenvectors as rows. Returns the number of sweeps used,
    or -1 if ``max_sweeps`` was exhausted before the off-diagonal Frobenius
    mass fell to ``tol``.
    """
    n = a.shape[0]
    half = schedule.shape[1] if schedule.shape[0] > 0 else 0
    cs = np.empty(half)
    sn = np.empty(half)
    ph = np.empty(half, dtype=np.complex128)
    dp = np.empty(half)
    dq = np.empty(half)
    sec = np.empty(half, dtype=np.complex128)
    cec = np.empty(half, dtype=np.complex128)
    act = np.zeros(half, dtype=np.bool_)
    for sweep in range(max_sweeps + 1):
        # off-diagonal mass, read from the upper triangle row by row
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                z = a[p, q]
                off += z.real * z.real + z.imag * z.imag
        if math.sqrt(2.0 * off) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for r in range(schedule.shape[0]):
            any_active = False
            for i in range(half):
                p = schedule[r, i, 0]
                q = schedule[r, i, 1]
                act[i] = False
                if p < 0:
                    continue
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                cs[i] = c
                sn[i] = t * c
                ph[i] = apq / mag
                dp[i] = app - t * mag
                dq[i] = aqq + t * mag
                sec[i] = sn[i] * ph[i].conjugate()
                cec[i] = c * ph[i].conjugate()
                act[i] = True
                any_active = True
            if not any_active:
                continue
            # rows: A <- G^* A
            for i in range(half):
                if not act[i]:
                    continue
                p = schedule[r, i, 0]
                q = schedule[r, i, 1]
                c = cs[i]
                s = sn[i]
                se = s * ph[i]
                ce = c * ph[i]
                for k in range(n):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = c * xp - se * xq
                    a[q, k] = s * xp + ce * xq
                se = se.conjugate()
                ce = ce.conjugate()
                for k in range(n):
                    vp = vt[p, k]
                    vq = vt[q, k]
                    vt[p, k] = c * vp - se * vq
                    vt[q, k] = s * vp + ce * vq
            # columns: A <- A G, traversed row by row
            for k in range(n):
                for i in range(half):
                    if not act[i]:
                        continue
                    p = schedule[r, i, 0]
                    q = schedule[r, i, 1]
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = cs[i] * xp - sec[i] * xq
                    a[k, q] = sn[i] * xp + cec[i] * xq
            for i in range(half):
                if not act[i]:
                    continue
                p = schedule[r, i, 0]
                q = schedule[r, i, 1]
                a[p, p] = dp[i]
                a[q, q] = dq[i]
                a[p, q] = 0.0
                a[q, p] = 0.0
    return -1


def _jacobi_vectorized(a, vt, schedule, tol, max_sweeps):
    """Numpy twin of :func:`_jacobi_loops`: each round's disjoint rotations applied at once."""
    n = a.shape[0]
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(np.abs(a[iu]) ** 2)))
        if off <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for pairs in schedule:
            pairs = pairs[pairs[:, 0] >= 0]
            P, Q = pairs[:, 0], pairs[:, 1]
            apq = a[P, Q]
            mag = np.abs(apq)
            keep = mag >= 1e-300
            if not keep.any():
                continue
            P, Q, apq, mag = P[keep], Q[keep], apq[keep], mag[keep]
            app = a[P, P].real
            aqq = a[Q, Q].real
            theta = (aqq - app) / (2.0 * mag)
            t = 1.0 / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(theta < 0.0, -t, t)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            e = apq / mag
            rp, rq = a[P].copy(), a[Q].copy()
            a[P] = c[:, None] * rp - (s * e)[:, None] * rq
            a[Q] = s[:, None] * rp + (c * e)[:, None] * rq
            vp, vq = vt[P].copy(), vt[Q].copy()
            vt[P] = c[:, None] * vp - (s * e.conj())[:, None] * vq
            vt[Q] = s[:, None] * vp + (c * e.conj())[:, None] * vq
            cp, cq = a[:, P].copy(), a[:, Q].copy()
            a[:, P] = cp * c - cq * (s * e.conj())
            a[:, Q] = cp * s + cq * (c * e.conj())
            a[P, P] = app - t * mag
            a[Q, Q] = aqq + t * mag
            a[P, Q] = 0.0
            a[Q, P] = 0.0
    return -1


_jacobi_numba = numba.njit(cache=True)(_jacobi_loops) if numba is not None else None


def jacobi_sweeps(a, vt, tol, max_sweeps, backend=None):
    """Run Jacobi sweeps on the complex Hermitian ``a`` in place.

    Parameters
    ----------
    a : (N, N) complex128 array, C-contiguous; diagonalized in place.
    vt : (N, N) complex128 array; rows receive the eigenvectors.
    tol : stop once the off-diagonal Frobenius mass is at most this.
    max_sweeps : sweep budget.
    backend : ``"numba"`` or ``"numpy"``; defaults to :data:`BACKEND`.

    Returns the sweep count, or -1 on non-convergence.
    """
    backend = backend or BACKEND
    schedule = round_robin_schedule(a.shape[0])
    if backend == "numba":
        if _jacobi_numba is None:
            raise RuntimeError("numba backend unavailable")
        if schedule.shape[0] == 0:
            schedule = np.zeros((0, 1, 2), dtype=np.int64)
        return _jacobi_numba(a, vt, schedule, float(tol), int(max_sweeps))
    return _jacobi_vectorized(a, vt, schedule, tol, max_sweeps)
