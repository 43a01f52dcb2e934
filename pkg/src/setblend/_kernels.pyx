# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: exact squared EDT and connected-component labelling.

Contracts match ``_kernels_py`` exactly; the two are interchangeable and
the test suite checks them cell for cell.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

INF_SQ = np.int64(1) << 40

cdef cnp.int64_t _INF = (<cnp.int64_t> 1) << 40


def edt_sq(bits):
    """Exact squared Euclidean distance, in cells, to the nearest true cell."""
    cdef cnp.uint8_t[:, ::1] b = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef Py_ssize_t h = b.shape[0]
    cdef Py_ssize_t w = b.shape[1]
    f_arr = np.empty((h, w), dtype=np.int64)
    out_arr = np.empty((h, w), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] f = f_arr
    cdef cnp.int64_t[:, ::1] out = out_arr
    v_arr = np.empty(w + 1, dtype=np.int64)
    z_arr = np.empty(w + 2, dtype=np.float64)
    cdef cnp.int64_t[::1] v = v_arr
    cdef double[::1] z = z_arr
    cdef Py_ssize_t i, j, q
    cdef Py_ssize_t k
    cdef cnp.int64_t run, d, fq, fv
    cdef double s

    # Vertical pass: per-column distance runs, then squared (INF preserved).
    for j in range(w):
        run = _INF
        for i in range(h):
            if b[i, j]:
                run = 0
            elif run < _INF:
                run += 1
            f[i, j] = run
        run = _INF
        for i in range(h - 1, -1, -1):
            if b[i, j]:
                run = 0
            elif run < _INF:
                run += 1
            if run < f[i, j]:
                f[i, j] = run
        for i in range(h):
            d = f[i, j]
            if d < _INF:
                f[i, j] = d * d
            else:
                f[i, j] = _INF

    # Horizontal pass: lower envelope of parabolas per row.
    for i in range(h):
        k = 0
        v[0] = 0
        z[0] = -1e300
        z[1] = 1e300
        for q in range(1, w):
            fq = f[i, q] + <cnp.int64_t> (q * q)
            while True:
                fv = f[i, v[k]] + v[k] * v[k]
                s = (fq - fv) / (2.0 * (q - v[k]))
                if s <= z[k] and k > 0:
                    k -= 1
                else:
                    break
            if s <= z[k]:
                # Can only happen at k == 0: new parabola dominates everywhere.
                v[0] = q
                z[0] = -1e300
                z[1] = 1e300
            else:
                k += 1
                v[k] = q
                z[k] = s
                z[k + 1] = 1e300
        k = 0
        for q in range(w):
            while z[k + 1] < q:
                k += 1
            d = <cnp.int64_t> (q - v[k])
            run = d * d + f[i, v[k]]
            if run > _INF:
                run = _INF
            out[i, q] = run
    return out_arr


def label_components(bits, eight):
    """Label connected components; numbering follows row-major first cells."""
    cdef cnp.uint8_t[:, ::1] b = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef Py_ssize_t h = b.shape[0]
    cdef Py_ssize_t w = b.shape[1]
    labels_arr = np.full((h, w), -1, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] labels = labels_arr
    stack_arr = np.empty(h * w, dtype=np.int64)
    cdef cnp.int64_t[::1] stack = stack_arr
    cdef int use_diag = 1 if eight else 0
    cdef Py_ssize_t top, y, x, cy, cx, ny, nx, start
    cdef cnp.int32_t count = 0
    cdef int dy, dx

    for start in range(h * w):
        y = start // w
        x = start - y * w
        if not b[y, x] or labels[y, x] >= 0:
            continue
        labels[y, x] = count
        top = 0
        stack[top] = start
        top += 1
        while top > 0:
            top -= 1
            cy = stack[top] // w
            cx = stack[top] - cy * w
            for dy in range(-1, 2):
                for dx in range(-1, 2):
                    if dy == 0 and dx == 0:
                        continue
                    if not use_diag and dy != 0 and dx != 0:
                        continue
                    ny = cy + dy
                    nx = cx + dx
                    if 0 <= ny < h and 0 <= nx < w and b[ny, nx] and labels[ny, nx] < 0:
                        labels[ny, nx] = count
                        stack[top] = ny * w + nx
                        top += 1
        count += 1
    return labels_arr, int(count)
