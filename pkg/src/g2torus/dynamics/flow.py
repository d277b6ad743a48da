"""Compiled RK4 kernels for ``dx/dt = dF(x) @ V`` with ``V = direction * rate * G^-1``.

All kernels work on lifted plane coordinates; nothing is reduced mod 1, so
deck displacements can be read off trajectory endpoints.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

TWO_PI = 2.0 * math.pi

TRACE_RUNNING, TRACE_NODE, TRACE_SADDLE, TRACE_TIMEOUT = 0, 1, 2, 3


@nb.njit(cache=True, fastmath=False)
def velocity(x0, x1, freqs, coefs, centers, heights, widths, V, G):
    g0 = 0.0
    g1 = 0.0
    for k in range(coefs.shape[0]):
        s = -TWO_PI * coefs[k] * math.sin(TWO_PI * (freqs[k, 0] * x0 + freqs[k, 1] * x1))
        g0 += s * freqs[k, 0]
        g1 += s * freqs[k, 1]
    for b in range(heights.shape[0]):
        w2 = widths[b] * widths[b]
        # nearest lattice image of the center; the support is narrower than half a period
        d0 = x0 - centers[b, 0]
        d1 = x1 - centers[b, 1]
        d0 -= math.floor(d0 + 0.5)
        d1 -= math.floor(d1 + 0.5)
        q0 = d0 * G[0, 0] + d1 * G[1, 0]
        q1 = d0 * G[0, 1] + d1 * G[1, 1]
        u = (d0 * q0 + d1 * q1) / w2
        if u >= 1.0:
            continue
        om = 1.0 - u
        dphi = -math.exp(1.0 - 1.0 / om) / (om * om)
        f = heights[b] * dphi * 2.0 / w2
        g0 += f * q0
        g1 += f * q1
    return g0 * V[0, 0] + g1 * V[1, 0], g0 * V[0, 1] + g1 * V[1, 1]


@nb.njit(cache=True)
def rk4_step(x0, x1, h, freqs, coefs, centers, heights, widths, V, G):
    a0, a1 = velocity(x0, x1, freqs, coefs, centers, heights, widths, V, G)
    b0, b1 = velocity(x0 + 0.5 * h * a0, x1 + 0.5 * h * a1, freqs, coefs, centers, heights, widths, V, G)
    c0, c1 = velocity(x0 + 0.5 * h * b0, x1 + 0.5 * h * b1, freqs, coefs, centers, heights, widths, V, G)
    d0, d1 = velocity(x0 + h * c0, x1 + h * c1, freqs, coefs, centers, heights, widths, V, G)
    return (x0 + h / 6.0 * (a0 + 2.0 * b0 + 2.0 * c0 + d0),
            x1 + h / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + d1))


@nb.njit(cache=True)
def flow_batch(X, T, h, freqs, coefs, centers, heights, widths, V, G):
    """Flow every row of ``X`` for time ``T`` (``round(T/h)`` equal steps)."""
    n = max(1, int(round(abs(T) / h)))
    hh = T / n
    out = np.empty_like(X)
    for p in range(X.shape[0]):
        x0 = X[p, 0]
        x1 = X[p, 1]
        for _ in range(n):
            x0, x1 = rk4_step(x0, x1, hh, freqs, coefs, centers, heights, widths, V, G)
        out[p, 0] = x0
        out[p, 1] = x1
    return out


@nb.njit(cache=True)
def map_iterates(X, k, h, M, freqs, coefs, centers, heights, widths, V, G):
    """Lifted ``x -> flow_1(x) @ M`` applied ``1..k`` times; shape (k, n, 2)."""
    out = np.empty((k, X.shape[0], 2))
    Y = X.copy()
    for it in range(k):
        Y = flow_batch(Y, 1.0, h, freqs, coefs, centers, heights, widths, V, G)
        Z = np.empty_like(Y)
        for p in range(Y.shape[0]):
            Z[p, 0] = Y[p, 0] * M[0, 0] + Y[p, 1] * M[1, 0]
            Z[p, 1] = Y[p, 0] * M[0, 1] + Y[p, 1] * M[1, 1]
        Y = Z
        out[it] = Y
    return out


@nb.njit(cache=True)
def _torus_dist(x0, x1, y0, y1):
    d0 = x0 - y0
    d1 = x1 - y1
    d0 -= math.floor(d0 + 0.5)
    d1 -= math.floor(d1 + 0.5)
    return math.sqrt(d0 * d0 + d1 * d1)


@nb.njit(cache=True)
def trace_kernel(p0, sign, h, max_steps, nodes, node_tol, saddles, saddle_tol, own,
                 escape, freqs, coefs, centers, heights, widths, V, G):
    """Integrate from ``p0`` (time direction ``sign``) until a node is reached.

    Returns the full lifted path, a status code, the index of the node or
    saddle hit, and the number of steps.  Saddle ``own`` is ignored until the
    path has left the ``escape`` ball around it.
    """
    path = np.empty((max_steps + 1, 2))
    x0 = p0[0]
    x1 = p0[1]
    path[0, 0] = x0
    path[0, 1] = x1
    hs = sign * h
    escaped = own < 0
    for n in range(1, max_steps + 1):
        x0, x1 = rk4_step(x0, x1, hs, freqs, coefs, centers, heights, widths, V, G)
        path[n, 0] = x0
        path[n, 1] = x1
        for k in range(nodes.shape[0]):
            if _torus_dist(x0, x1, nodes[k, 0], nodes[k, 1]) < node_tol:
                return path[: n + 1], TRACE_NODE, k, n
        if not escaped:
            if _torus_dist(x0, x1, saddles[own, 0], saddles[own, 1]) > escape:
                escaped = True
        for k in range(saddles.shape[0]):
            if k == own and not escaped:
                continue
            if _torus_dist(x0, x1, saddles[k, 0], saddles[k, 1]) < saddle_tol:
                return path[: n + 1], TRACE_SADDLE, k, n
    return path, TRACE_TIMEOUT, -1, max_steps
