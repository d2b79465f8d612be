"""Planar polyline helpers (complex numbers as points)."""
from __future__ import annotations

import numpy as np


def cross(a, b):
    """z-component of the planar cross product of complex vectors."""
    return (np.conj(a) * b).imag


def polyline_intersections(p, q, chunk: int = 2048) -> list[tuple[int, int, float, float]]:
    """Proper crossings between the polylines ``p`` and ``q``.

    Returns ``(i, j, s, t)`` with crossing point ``p[i] + s (p[i+1]-p[i])``
    ``= q[j] + t (q[j+1]-q[j])``, sorted by position along ``p``.
    """
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    if len(p) < 2 or len(q) < 2:
        return []
    qa, qd = q[:-1], np.diff(q)
    qlo_x = np.minimum(qa.real, q[1:].real)
    qhi_x = np.maximum(qa.real, q[1:].real)
    qlo_y = np.minimum(qa.imag, q[1:].imag)
    qhi_y = np.maximum(qa.imag, q[1:].imag)
    out = []
    for start in range(0, len(p) - 1, chunk):
        pa = p[start:start + chunk + 1]
        a, d = pa[:-1, None], np.diff(pa)[:, None]
        b = pa[1:, None]
        box = ((np.minimum(a.real, b.real) <= qhi_x) & (np.maximum(a.real, b.real) >= qlo_x)
               & (np.minimum(a.imag, b.imag) <= qhi_y) & (np.maximum(a.imag, b.imag) >= qlo_y))
        ii, jj = np.nonzero(box)
        if len(ii) == 0:
            continue
        a1, d1 = a[ii, 0], d[ii, 0]
        a2, d2 = qa[jj], qd[jj]
        den = cross(d1, d2)
        ok = den != 0
        r = a2 - a1
        with np.errstate(divide="ignore", invalid="ignore"):
            s = cross(r, d2) / den
            t = cross(r, d1) / den
        hit = ok & (s >= 0) & (s < 1) & (t >= 0) & (t < 1)
        for i, j, si, ti in zip(ii[hit], jj[hit], s[hit], t[hit]):
            out.append((int(i) + start, int(j), float(si), float(ti)))
    out.sort(key=lambda x: (x[0], x[2]))
    return out
