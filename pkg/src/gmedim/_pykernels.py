"""Numpy implementation of the criterion kernels (fallback for ``_ckernels``)."""
import numpy as np


def plan_sums(off_vals, diag_vals, p_u, p_v, d_pos, neg_tol):
    """Partial sums of a criterion term plan.

    Returns ``(sum |off|, sum sqrt(diag[u] diag[v]), sum diag[d_pos], bad)``
    where ``bad`` is the position in ``diag_vals`` of a diagonal below
    ``-neg_tol`` that sits under a square root, or -1. Diagonals in
    ``[-neg_tol, 0)`` are clamped to zero inside square roots.
    """
    o_sum = float(np.abs(off_vals).sum())
    if p_u.size:
        used = np.concatenate([p_u, p_v])
        vals = diag_vals[used]
        neg = np.flatnonzero(vals < -neg_tol)
        if neg.size:
            return o_sum, 0.0, 0.0, int(used[neg[0]])
        clamped = np.maximum(diag_vals, 0.0)
        p_sum = float(np.sqrt(clamped[p_u] * clamped[p_v]).sum())
    else:
        p_sum = 0.0
    d_sum = float(diag_vals[d_pos].sum())
    return o_sum, p_sum, d_sum, -1
