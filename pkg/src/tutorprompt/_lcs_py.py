"""Pure-Python LCS kernel, used when the compiled extension is unavailable.

Same contract as ``_lcskernel.lcs_len_ids``: two int-encoded sequences in,
LCS length out.  Two-row DP, O(n*m) time, O(m) space.
"""
from __future__ import annotations

from typing import Sequence


def lcs_len_ids(a: Sequence[int], b: Sequence[int]) -> int:
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    prev = [0] * (m + 1)
    cur = [0] * (m + 1)
    for i in range(n):
        ai = a[i]
        for j in range(m):
            if ai == b[j]:
                cur[j + 1] = prev[j] + 1
            else:
                left = cur[j]
                diag = prev[j + 1]
                cur[j + 1] = left if left >= diag else diag
        prev, cur = cur, prev
    return prev[m]
