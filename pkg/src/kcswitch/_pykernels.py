"""Pure-Python/numpy versions of the compiled kernels in ``_ckernels.pyx``."""

from itertools import combinations

import numpy as np


def _is_hangul(cp):
    return 0xAC00 <= cp <= 0xD7A3 or 0x1100 <= cp <= 0x11FF or 0x3130 <= cp <= 0x318F


def _is_latin(cp):
    if 0x41 <= cp <= 0x5A or 0x61 <= cp <= 0x7A:
        return True
    if 0xC0 <= cp <= 0x24F:
        return cp != 0xD7 and cp != 0xF7
    return 0x1E00 <= cp <= 0x1EFF


def script_code(text):
    """Bit 1 set if ``text`` has a Hangul character, bit 2 if a Latin letter."""
    code = 0
    for ch in text:
        cp = ord(ch)
        if _is_hangul(cp):
            code |= 1
        elif _is_latin(cp):
            code |= 2
        if code == 3:
            break
    return code


def rank_sum_tail_counts(ranks, n_a, observed):
    n_a = int(n_a)
    if n_a < 0 or n_a > len(ranks):
        raise ValueError("subset size out of range")
    ranks = [int(r) for r in ranks]
    n_le = n_ge = n_total = 0
    for subset in combinations(ranks, n_a):
        total = sum(subset)
        n_total += 1
        if total <= observed:
            n_le += 1
        if total >= observed:
            n_ge += 1
    return n_le, n_ge, n_total


def jacobi_eigh(a_in, tol=1e-14, max_sweeps=100):
    a = np.array(a_in, dtype=np.float64, copy=True)
    m = a.shape[0]
    if a.ndim != 2 or a.shape[1] != m:
        raise ValueError("matrix must be square")
    v = np.eye(m)
    scale = np.sqrt(np.sum(a * a))
    sweep = 0
    upper = np.triu_indices(m, 1)
    while sweep < max_sweeps:
        off = np.sum(a[upper] ** 2)
        if np.sqrt(2.0 * off) <= tol * scale or off == 0.0:
            break
        sweep += 1
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v, sweep
