# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sliding-window feature kernel.

Mirrors ``_window_py.window_features`` operation for operation so both
backends return bit-identical arrays.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from libc.stdlib cimport malloc, free, abs as iabs

from ._window_py import homogeneity_weights

cnp.import_array()


def window_features(quantized, raw, int size, int stride, int levels, offsets):
    cdef const long long[:, ::1] q = np.ascontiguousarray(quantized, dtype=np.int64)
    cdef const double[:, ::1] r = np.ascontiguousarray(raw, dtype=np.float64)
    cdef Py_ssize_t height = q.shape[0], width = q.shape[1]
    cdef Py_ssize_t nrows = 0, ncols = 0
    if height >= size and width >= size:
        nrows = (height - size) // stride + 1
        ncols = (width - size) // stride + 1
    cdef Py_ssize_t nwin = nrows * ncols
    out_arr = np.empty((7, nwin), dtype=np.float64)
    if nwin == 0:
        return out_arr
    cdef double[:, ::1] out = out_arr

    offs = np.ascontiguousarray(np.asarray(offsets, dtype=np.int64).reshape(-1, 2))
    cdef const long long[:, ::1] off = offs
    cdef Py_ssize_t noff = off.shape[0]
    w_arr, scale_py = homogeneity_weights(levels)
    cdef const double[::1] hw = np.ascontiguousarray(w_arr, dtype=np.float64)
    cdef double scale = scale_py

    cdef long long *counts = <long long *> malloc(levels * levels * sizeof(long long))
    cdef long long *rows = <long long *> malloc(levels * sizeof(long long))
    cdef long long *cols = <long long *> malloc(levels * sizeof(long long))
    cdef long long *bydiff = <long long *> malloc(levels * sizeof(long long))
    if counts == NULL or rows == NULL or cols == NULL or bydiff == NULL:
        free(counts); free(rows); free(cols); free(bydiff)
        raise MemoryError()

    cdef Py_ssize_t wr, wc, w, oy, ox, y, x, k, i, j, ylo, yhi, xlo, xhi
    cdef long long dy, dx, a, b, c, total, con, en, s1, s2, t1, t2, cross, var_i, var_j
    cdef double totf, hom, num, denom, corr, vi, vj
    cdef double acc, mean, d, d2, m2, m3, m4, var, sigma, npx, lo, hi, v

    npx = <double>(size * size)
    try:
        for wr in range(nrows):
            for wc in range(ncols):
                w = wr * ncols + wc
                oy = wr * stride
                ox = wc * stride
                for k in range(levels * levels):
                    counts[k] = 0
                for k in range(noff):
                    dy = off[k, 0]
                    dx = off[k, 1]
                    ylo = 0 if dy >= 0 else -dy
                    yhi = size - dy if dy >= 0 else size
                    xlo = 0 if dx >= 0 else -dx
                    xhi = size - dx if dx >= 0 else size
                    for y in range(ylo, yhi):
                        for x in range(xlo, xhi):
                            a = q[oy + y, ox + x]
                            b = q[oy + y + dy, ox + x + dx]
                            counts[a * levels + b] += 1
                            counts[b * levels + a] += 1

                total = 0
                con = 0
                en = 0
                cross = 0
                for i in range(levels):
                    rows[i] = 0
                    cols[i] = 0
                    bydiff[i] = 0
                for i in range(levels):
                    for j in range(levels):
                        c = counts[i * levels + j]
                        total += c
                        con += c * (i - j) * (i - j)
                        en += c * c
                        cross += c * i * j
                        rows[i] += c
                        cols[j] += c
                        bydiff[iabs(<int>(i - j))] += c
                if total == 0:
                    return None
                totf = <double>total
                out[0, w] = (<double>con) / totf
                hom = 0.0
                for i in range(levels):
                    hom = hom + (<double>bydiff[i]) * hw[i]
                out[1, w] = hom / (scale * totf)
                out[2, w] = (<double>en) / (totf * totf)
                s1 = 0
                s2 = 0
                t1 = 0
                t2 = 0
                for i in range(levels):
                    s1 += rows[i] * i
                    s2 += rows[i] * i * i
                    t1 += cols[i] * i
                    t2 += cols[i] * i * i
                var_i = total * s2 - s1 * s1
                var_j = total * t2 - t1 * t1
                if var_i == 0 or var_j == 0:
                    corr = 0.0
                else:
                    num = <double>(total * cross - s1 * t1)
                    vi = <double>var_i
                    vj = <double>var_j
                    if var_i == var_j:
                        denom = vi
                    else:
                        denom = sqrt(vi) * sqrt(vj)
                    corr = num / denom
                    if corr > 1.0:
                        corr = 1.0
                    elif corr < -1.0:
                        corr = -1.0
                out[3, w] = corr

                acc = 0.0
                lo = r[oy, ox]
                hi = lo
                for y in range(size):
                    for x in range(size):
                        v = r[oy + y, ox + x]
                        acc = acc + v
                        if v < lo:
                            lo = v
                        if v > hi:
                            hi = v
                if lo == hi:
                    out[4, w] = 0.0
                    out[5, w] = 0.0
                    out[6, w] = 0.0
                    continue
                mean = acc / npx
                m2 = 0.0
                m3 = 0.0
                m4 = 0.0
                for y in range(size):
                    for x in range(size):
                        d = r[oy + y, ox + x] - mean
                        d2 = d * d
                        m2 = m2 + d2
                        m3 = m3 + d2 * d
                        m4 = m4 + d2 * d2
                var = m2 / npx
                if var * var == 0.0:
                    # spread too small to represent: treat as flat
                    out[4, w] = 0.0
                    out[5, w] = 0.0
                    out[6, w] = 0.0
                    continue
                sigma = sqrt(var)
                out[4, w] = sigma
                out[5, w] = (m3 / npx) / (var * sigma)
                out[6, w] = (m4 / npx) / (var * var) - 3.0
    finally:
        free(counts)
        free(rows)
        free(cols)
        free(bydiff)
    return out_arr
