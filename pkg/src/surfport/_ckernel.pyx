# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled spin-elimination kernel (same contract as ``_pykernel``)."""

import numpy as np
from libc.math cimport exp, log

DEF OP_ADD = 0
DEF OP_BOND = 1
DEF OP_FIELD = 2
DEF OP_SUM = 3
DEF OP_CONST = 4


cdef inline void _rescale(double* st, Py_ssize_t size, double* acc) noexcept nogil:
    cdef double m = 0.0
    cdef Py_ssize_t i
    for i in range(size):
        if st[i] > m:
            m = st[i]
    if m > 0.0:
        for i in range(size):
            st[i] /= m
        acc[0] += log(m)


def contract_batch(const int[:, ::1] ops, const signed char[:, ::1] eta, double K, int width):
    cdef Py_ssize_t B = eta.shape[0]
    cdef Py_ssize_t nops = ops.shape[0]
    cdef Py_ssize_t size = (<Py_ssize_t>1) << width
    out = np.empty(B, dtype=np.float64)
    buf = np.zeros(size, dtype=np.float64)
    cdef double[::1] res = out
    cdef double[::1] stv = buf
    cdef double* st = &stv[0]
    cdef double ep = exp(K)
    cdef double em = exp(-K)
    cdef double acc, f_same, f_diff
    cdef Py_ssize_t s, k, i, ma, mb
    cdef int op, pending
    cdef signed char e
    with nogil:
        for s in range(B):
            for i in range(size):
                st[i] = 0.0
            st[0] = 1.0
            acc = 0.0
            pending = 0
            for k in range(nops):
                op = ops[k, 0]
                if op == OP_ADD:
                    ma = (<Py_ssize_t>1) << ops[k, 1]
                    for i in range(size):
                        if not (i & ma):
                            st[i | ma] = st[i]
                elif op == OP_BOND:
                    ma = (<Py_ssize_t>1) << ops[k, 1]
                    mb = (<Py_ssize_t>1) << ops[k, 2]
                    e = eta[s, ops[k, 3]]
                    if e > 0:
                        f_same = ep
                        f_diff = em
                    else:
                        f_same = em
                        f_diff = ep
                    for i in range(size):
                        if ((i & ma) != 0) == ((i & mb) != 0):
                            st[i] *= f_same
                        else:
                            st[i] *= f_diff
                    pending += 1
                elif op == OP_FIELD:
                    ma = (<Py_ssize_t>1) << ops[k, 1]
                    e = eta[s, ops[k, 3]]
                    if e > 0:
                        f_same = ep
                        f_diff = em
                    else:
                        f_same = em
                        f_diff = ep
                    for i in range(size):
                        if i & ma:
                            st[i] *= f_diff
                        else:
                            st[i] *= f_same
                    pending += 1
                elif op == OP_SUM:
                    ma = (<Py_ssize_t>1) << ops[k, 1]
                    for i in range(size):
                        if not (i & ma):
                            st[i] += st[i | ma]
                            st[i | ma] = 0.0
                    _rescale(st, size, &acc)
                    pending = 0
                else:
                    acc += K * eta[s, ops[k, 3]]
                if pending >= 8:
                    _rescale(st, size, &acc)
                    pending = 0
            res[s] = acc + log(st[0])
    return out
