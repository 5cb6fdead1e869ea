# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fraction-free elimination kernel.

Same contract as ``fatlocus._kernel_py``. Elimination starts on a C array of
64-bit integers with checked arithmetic; the first overflow hands the current
state, which is a consistent Bareiss state row by row, to the Python-int path
that finishes the job.
"""
from libc.stdlib cimport malloc, free

cdef extern from *:
    """
    #include <limits.h>
    static inline int fl_combine(long long p, long long x, long long a,
                                 long long y, long long d, long long *out) {
        long long t1, t2, t3;
        if (__builtin_mul_overflow(p, x, &t1)) return 1;
        if (__builtin_mul_overflow(a, y, &t2)) return 1;
        if (__builtin_sub_overflow(t1, t2, &t3)) return 1;
        if (d == -1 && t3 == LLONG_MIN) return 1;
        *out = t3 / d;
        return 0;
    }
    """
    int fl_combine(long long p, long long x, long long a, long long y,
                   long long d, long long *out) nogil


cdef void _obj_row(list row, list prow, object p, object a, object prev,
                   Py_ssize_t lo, Py_ssize_t c, Py_ssize_t ncols):
    cdef Py_ssize_t j
    for j in range(lo, ncols):
        if j != c:
            row[j] = (p * row[j] - a * prow[j]) // prev
    row[c] = 0


cdef tuple _obj_finish(list m, Py_ssize_t nrows, Py_ssize_t ncols, bint reduced,
                       Py_ssize_t c0, Py_ssize_t r, object prev, list pivots,
                       Py_ssize_t done):
    """Run the object path starting inside step ``c0`` after ``done`` row updates."""
    cdef Py_ssize_t c, i, k, best
    cdef list prow
    cdef object p, v, av, best_abs
    cdef list order
    c = c0
    while c < ncols and r < nrows:
        if done < 0:
            best = -1
            best_abs = 0
            for i in range(r, nrows):
                v = m[i][c]
                if v:
                    av = abs(v)
                    if av > best_abs:
                        best = i
                        best_abs = av
            if best < 0:
                c += 1
                continue
            if best != r:
                m[r], m[best] = m[best], m[r]
            done = 0
        prow = m[r]
        p = prow[c]
        order = list(range(r + 1, nrows))
        if reduced:
            order.extend(range(r))
        for k in range(done, len(order)):
            i = order[k]
            _obj_row(m[i], prow, p, m[i][c], prev, 0 if i < r else c + 1, c, ncols)
        prev = p
        pivots.append(c)
        r += 1
        c += 1
        done = -1
    return r, pivots, m[:r]


cdef tuple _eliminate(list rows, Py_ssize_t ncols, bint reduced):
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t i, j, k, c, r, best, lo, nord
    cdef long long p, a, prev, v, av, best_abs
    cdef long long *m
    cdef long long *tmp
    cdef long long *prow
    cdef long long *row
    cdef list pivots = []
    cdef list order
    cdef bint overflow = False
    if nrows == 0 or ncols == 0:
        return 0, [], []
    m = <long long *> malloc(nrows * ncols * sizeof(long long))
    tmp = <long long *> malloc(ncols * sizeof(long long))
    if m == NULL or tmp == NULL:
        free(m)
        free(tmp)
        raise MemoryError()
    try:
        try:
            for i in range(nrows):
                for j in range(ncols):
                    m[i * ncols + j] = rows[i][j]
        except OverflowError:
            return _obj_finish([list(x) for x in rows], nrows, ncols, reduced,
                               0, 0, 1, pivots, -1)
        prev = 1
        r = 0
        c = 0
        while c < ncols and r < nrows:
            best = -1
            best_abs = 0
            for i in range(r, nrows):
                v = m[i * ncols + c]
                if v:
                    av = v if v > 0 else -v
                    if av > best_abs or best < 0:
                        best = i
                        best_abs = av
            if best < 0:
                c += 1
                continue
            if best != r:
                for j in range(ncols):
                    v = m[r * ncols + j]
                    m[r * ncols + j] = m[best * ncols + j]
                    m[best * ncols + j] = v
            prow = m + r * ncols
            p = prow[c]
            order = list(range(r + 1, nrows))
            if reduced:
                order.extend(range(r))
            nord = len(order)
            for k in range(nord):
                i = order[k]
                row = m + i * ncols
                a = row[c]
                lo = 0 if i < r else c + 1
                for j in range(lo, ncols):
                    if j == c:
                        continue
                    if fl_combine(p, row[j], a, prow[j], prev, &tmp[j]):
                        overflow = True
                        break
                if overflow:
                    # rows order[:k] are committed for this step
                    py = [[m[i2 * ncols + j2] for j2 in range(ncols)]
                          for i2 in range(nrows)]
                    return _obj_finish(py, nrows, ncols, reduced, c, r, prev,
                                       pivots, k)
                for j in range(lo, ncols):
                    if j != c:
                        row[j] = tmp[j]
                row[c] = 0
            prev = p
            pivots.append(c)
            r += 1
            c += 1
        return r, pivots, [[m[i * ncols + j] for j in range(ncols)]
                           for i in range(r)]
    finally:
        free(m)
        free(tmp)


def echelon(rows, ncols):
    """Row echelon form; the pivot of row k is the leading (k+1)-minor."""
    return _eliminate([list(x) for x in rows], ncols, False)


def rref(rows, ncols):
    """Fraction-free reduced echelon form: every pivot equals the last one."""
    return _eliminate([list(x) for x in rows], ncols, True)
