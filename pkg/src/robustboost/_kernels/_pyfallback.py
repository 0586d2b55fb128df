"""Pure-Python/numpy implementation of the kernel contract.

Semantics must stay in lockstep with ``_core.pyx``.  In particular the
split scans accumulate prefix statistics in the same sequential order as
the C loops so that both backends pick bit-identical splits.
"""

import heapq

import numpy as np

_INF = float("inf")

# family codes (mirrored in _core.pyx)
_TUKEY = 0
_HUBER = 1
_SQUARE = 2
_ABSOLUTE = 3


def _rho_values(u, family, c):
    if family == _TUKEY:
        z = np.minimum(np.abs(u) / c, 1.0)
        z2 = z * z
        w = 1.0 - z2
        return 1.0 - w * w * w
    if family == _HUBER:
        a = np.abs(u)
        return np.where(a <= c, 0.5 * u * u, c * a - 0.5 * c * c)
    if family == _SQUARE:
        return u * u
    if family == _ABSOLUTE:
        return np.abs(u)
    raise ValueError(f"unknown loss family code {family}")


def sum_rho(r, sigma, family, c):
    """Total loss of the scaled residuals: sum_i rho(r_i / sigma)."""
    u = np.asarray(r, dtype=np.float64) / sigma
    return float(np.sum(_rho_values(u, family, c)))


def sum_rho_shifted(r, h, alpha, sigma, family, c):
    """sum_i rho((r_i - alpha * h_i) / sigma), the line-search objective."""
    u = (np.asarray(r, dtype=np.float64) - alpha * np.asarray(h, dtype=np.float64)) / sigma
    return float(np.sum(_rho_values(u, family, c)))


def ls_scan(x, y, min_node):
    """Best least-squares split of y along ascending x.

    Returns (impurity, threshold, n_left) where impurity is the summed
    SSE of the two children about their means, or (inf, nan, 0) if no
    admissible split exists.  Candidate thresholds are midpoints between
    consecutive distinct x values; ties resolve to the lowest threshold.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if n < 2:
        return _INF, float("nan"), 0
    cy1 = np.cumsum(y)
    cy2 = np.cumsum(y * y)
    tot1 = cy1[n - 1]
    tot2 = cy2[n - 1]
    bound = np.nonzero(x[1:] > x[:-1])[0]
    if bound.size == 0:
        return _INF, float("nan"), 0
    k = bound + 1
    ok = (k >= min_node) & ((n - k) >= min_node)
    if not ok.any():
        return _INF, float("nan"), 0
    bound = bound[ok]
    k = k[ok]
    s1 = cy1[bound]
    s2 = cy2[bound]
    imp = (s2 - s1 * s1 / k) + ((tot2 - s2) - (tot1 - s1) * (tot1 - s1) / (n - k))
    j = int(np.argmin(imp))
    i = int(bound[j])
    lo = x[i]
    hi = x[i + 1]
    thr = lo + (hi - lo) / 2.0
    if thr >= hi:  # midpoint rounded up to the right value; keep routing exact
        thr = lo
    return float(imp[j]), float(thr), int(k[j])


def _prefix_sads(y):
    """sad[k] = sum_i<k |y_i - median(y[:k])| for every prefix of y.

    Incremental two-heap median; sad derives from the identity
    sad = sum(upper half) - sum(lower half) (+ median once for odd k).
    """
    n = len(y)
    low = []  # max-heap of the lower half (values negated)
    high = []  # min-heap of the upper half
    sum_low = 0.0
    sum_high = 0.0
    out = np.empty(n + 1)
    out[0] = 0.0
    for k in range(n):
        v = y[k]
        if low and v > -low[0]:
            heapq.heappush(high, v)
            sum_high += v
        else:
            heapq.heappush(low, -v)
            sum_low += v
        if len(low) > len(high) + 1:
            t = -heapq.heappop(low)
            sum_low -= t
            heapq.heappush(high, t)
            sum_high += t
        elif len(high) > len(low):
            t = heapq.heappop(high)
            sum_high -= t
            heapq.heappush(low, -t)
            sum_low += t
        sad = sum_high - sum_low
        if len(low) > len(high):
            sad += -low[0]
        out[k + 1] = sad
    return out


def lad_scan(x, y, min_node):
    """Best least-absolute-deviation split of y along ascending x.

    Same contract as ls_scan with impurity = summed absolute deviation
    of the two children about their medians.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if n < 2:
        return _INF, float("nan"), 0
    bound = np.nonzero(x[1:] > x[:-1])[0]
    if bound.size == 0:
        return _INF, float("nan"), 0
    k = bound + 1
    ok = (k >= min_node) & ((n - k) >= min_node)
    if not ok.any():
        return _INF, float("nan"), 0
    bound = bound[ok]
    k = k[ok]
    sad_pre = _prefix_sads(y)
    sad_suf = _prefix_sads(y[::-1])
    imp = sad_pre[k] + sad_suf[n - k]
    j = int(np.argmin(imp))
    i = int(bound[j])
    lo = x[i]
    hi = x[i + 1]
    thr = lo + (hi - lo) / 2.0
    if thr >= hi:
        thr = lo
    return float(imp[j]), float(thr), int(k[j])
