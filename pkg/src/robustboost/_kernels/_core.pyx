# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for split scans and loss sums.

Arithmetic must mirror _pyfallback.py operation-for-operation where the
result feeds a comparison (the split scans), so that tree construction
is identical regardless of backend.
"""

from libc.math cimport INFINITY, NAN, fabs
from libc.stdlib cimport free, malloc


cdef inline double _rho(double u, int family, double c) noexcept nogil:
    cdef double a, w
    if family == 0:  # Tukey bisquare, clamped to 1 beyond c
        a = fabs(u) / c
        if a > 1.0:
            a = 1.0
        w = 1.0 - a * a
        return 1.0 - w * w * w
    elif family == 1:  # Huber
        a = fabs(u)
        if a <= c:
            return 0.5 * u * u
        return c * a - 0.5 * c * c
    elif family == 2:  # square
        return u * u
    else:  # absolute
        return fabs(u)


def sum_rho(double[::1] r, double sigma, int family, double c):
    """Total loss of the scaled residuals: sum_i rho(r_i / sigma)."""
    cdef Py_ssize_t i, n = r.shape[0]
    cdef double total = 0.0
    with nogil:
        for i in range(n):
            total += _rho(r[i] / sigma, family, c)
    return total


def sum_rho_shifted(double[::1] r, double[::1] h, double alpha, double sigma,
                    int family, double c):
    """sum_i rho((r_i - alpha * h_i) / sigma), the line-search objective."""
    cdef Py_ssize_t i, n = r.shape[0]
    cdef double total = 0.0
    with nogil:
        for i in range(n):
            total += _rho((r[i] - alpha * h[i]) / sigma, family, c)
    return total


def ls_scan(double[::1] x, double[::1] y, Py_ssize_t min_node):
    """Best least-squares split of y along ascending x.

    Returns (impurity, threshold, n_left); impurity is +inf when no
    admissible split exists.  Thresholds are midpoints of consecutive
    distinct x values; the first (lowest-threshold) minimum wins.
    """
    cdef Py_ssize_t i, k, n = y.shape[0]
    cdef Py_ssize_t best_i = -1, best_k = 0
    cdef double tot1 = 0.0, tot2 = 0.0
    cdef double s1 = 0.0, s2 = 0.0
    cdef double best = INFINITY, imp, d1, lo, hi, thr
    if n < 2:
        return INFINITY, NAN, 0
    with nogil:
        for i in range(n):
            tot1 += y[i]
            tot2 += y[i] * y[i]
        for i in range(n - 1):
            s1 += y[i]
            s2 += y[i] * y[i]
            if x[i + 1] > x[i]:
                k = i + 1
                if k >= min_node and (n - k) >= min_node:
                    d1 = tot1 - s1
                    imp = (s2 - s1 * s1 / (<double> k)) + \
                          ((tot2 - s2) - d1 * d1 / (<double> (n - k)))
                    if imp < best:
                        best = imp
                        best_i = i
                        best_k = k
    if best_i < 0:
        return INFINITY, NAN, 0
    lo = x[best_i]
    hi = x[best_i + 1]
    thr = lo + (hi - lo) / 2.0
    if thr >= hi:
        thr = lo
    return best, thr, best_k


cdef inline void _push_min(double* h, Py_ssize_t* size, double v) noexcept nogil:
    cdef Py_ssize_t i = size[0], parent
    cdef double tmp
    h[i] = v
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if h[parent] <= h[i]:
            break
        tmp = h[parent]
        h[parent] = h[i]
        h[i] = tmp
        i = parent


cdef inline double _pop_min(double* h, Py_ssize_t* size) noexcept nogil:
    cdef double top = h[0]
    cdef Py_ssize_t i = 0, child, n
    cdef double tmp
    size[0] -= 1
    n = size[0]
    h[0] = h[n]
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and h[child + 1] < h[child]:
            child += 1
        if h[i] <= h[child]:
            break
        tmp = h[i]
        h[i] = h[child]
        h[child] = tmp
        i = child
    return top


cdef void _prefix_sads(const double* y, Py_ssize_t n, double* out,
                       double* low, double* high) noexcept nogil:
    # low is a max-heap of the lower half (values negated), high a
    # min-heap of the upper half; sad = sum(high) - sum(low) (+ median
    # once when the prefix length is odd).
    cdef Py_ssize_t k, nl = 0, nh = 0
    cdef double sum_low = 0.0, sum_high = 0.0
    cdef double v, t, sad
    out[0] = 0.0
    for k in range(n):
        v = y[k]
        if nl > 0 and v > -low[0]:
            _push_min(high, &nh, v)
            sum_high += v
        else:
            _push_min(low, &nl, -v)
            sum_low += v
        if nl > nh + 1:
            t = -_pop_min(low, &nl)
            sum_low -= t
            _push_min(high, &nh, t)
            sum_high += t
        elif nh > nl:
            t = _pop_min(high, &nh)
            sum_high -= t
            _push_min(low, &nl, -t)
            sum_low += t
        sad = sum_high - sum_low
        if nl > nh:
            sad += -low[0]
        out[k + 1] = sad


def lad_scan(double[::1] x, double[::1] y, Py_ssize_t min_node):
    """Best least-absolute-deviation split of y along ascending x.

    Same contract as ls_scan with impurity = summed absolute deviation
    of the two children about their medians.
    """
    cdef Py_ssize_t i, k, n = y.shape[0]
    cdef Py_ssize_t best_i = -1, best_k = 0
    cdef double best = INFINITY, imp, lo, hi, thr
    cdef double *buf
    cdef double *sad_pre
    cdef double *sad_suf
    cdef double *heap_a
    cdef double *heap_b
    cdef double *yrev
    if n < 2:
        return INFINITY, NAN, 0
    buf = <double*> malloc((5 * n + 2) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    sad_pre = buf
    sad_suf = buf + (n + 1)
    heap_a = buf + (2 * n + 2)
    heap_b = buf + (3 * n + 2)
    yrev = buf + (4 * n + 2)
    try:
        with nogil:
            _prefix_sads(&y[0], n, sad_pre, heap_a, heap_b)
            for i in range(n):
                yrev[i] = y[n - 1 - i]
            _prefix_sads(yrev, n, sad_suf, heap_a, heap_b)
            for i in range(n - 1):
                if x[i + 1] > x[i]:
                    k = i + 1
                    if k >= min_node and (n - k) >= min_node:
                        imp = sad_pre[k] + sad_suf[n - k]
                        if imp < best:
                            best = imp
                            best_i = i
                            best_k = k
    finally:
        free(buf)
    if best_i < 0:
        return INFINITY, NAN, 0
    lo = x[best_i]
    hi = x[best_i + 1]
    thr = lo + (hi - lo) / 2.0
    if thr >= hi:
        thr = lo
    return best, thr, best_k
