# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled two-row DP kernel for LCS length over int-encoded token sequences."""

import array


def lcs_len_ids(int[::1] a, int[::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0 or m == 0:
        return 0

    prev_buf = array.array("i", bytes(4 * (m + 1)))
    cur_buf = array.array("i", bytes(4 * (m + 1)))
    cdef int[::1] prev = prev_buf
    cdef int[::1] cur = cur_buf
    cdef int[::1] tmp
    cdef Py_ssize_t i, j
    cdef int ai, left, diag

    for i in range(n):
        ai = a[i]
        for j in range(m):
            if ai == b[j]:
                cur[j + 1] = prev[j] + 1
            else:
                left = cur[j]
                diag = prev[j + 1]
                cur[j + 1] = left if left >= diag else diag
        tmp = prev
        prev = cur
        cur = tmp

    return prev[m]
