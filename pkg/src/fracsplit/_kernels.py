"""Fused loops for the stencil and the CG vector updates.

Loops are serial; reductions may be reassociated for vectorization but the
compiled order is fixed, so results are reproducible run to run.
"""

import numba

_jit = numba.njit(cache=True, fastmath={"reassoc", "contract"})


@_jit
def _row(u, out, j, c1, c2, c, shift, scalar_shift, has_below, has_above):
    nx = u.shape[1]
    d = 2.0 * (c1 + c2)
    acc = 0.0
    for i in range(nx):
        s = d * u[j, i]
        if i > 0:
            s -= c1 * u[j, i - 1]
        if i < nx - 1:
            s -= c1 * u[j, i + 1]
        if has_below:
            s -= c2 * u[j - 1, i]
        if has_above:
            s -= c2 * u[j + 1, i]
        sh = scalar_shift if shift is None else shift[j, i]
        v = c * s + sh * u[j, i]
        out[j, i] = v
        acc += u[j, i] * v
    return acc


@_jit
def _apply(u, out, c1, c2, c, shift, scalar_shift):
    ny, nx = u.shape
    d = 2.0 * (c1 + c2)
    acc = _row(u, out, 0, c1, c2, c, shift, scalar_shift, False, ny > 1)
    if ny > 1:
        acc += _row(u, out, ny - 1, c1, c2, c, shift, scalar_shift, True, False)
    for j in range(1, ny - 1):
        # edge columns, then a branch-free interior sweep
        acc += _cell(u, out, j, 0, c1, c2, c, shift, scalar_shift)
        if nx > 1:
            acc += _cell(u, out, j, nx - 1, c1, c2, c, shift, scalar_shift)
        for i in range(1, nx - 1):
            s = (d * u[j, i] - c1 * (u[j, i - 1] + u[j, i + 1])
                 - c2 * (u[j - 1, i] + u[j + 1, i]))
            sh = scalar_shift if shift is None else shift[j, i]
            v = c * s + sh * u[j, i]
            out[j, i] = v
            acc += u[j, i] * v
    return acc


@_jit
def _cell(u, out, j, i, c1, c2, c, shift, scalar_shift):
    nx = u.shape[1]
    s = 2.0 * (c1 + c2) * u[j, i] - c2 * (u[j - 1, i] + u[j + 1, i])
    if i > 0:
        s -= c1 * u[j, i - 1]
    if i < nx - 1:
        s -= c1 * u[j, i + 1]
    sh = scalar_shift if shift is None else shift[j, i]
    v = c * s + sh * u[j, i]
    out[j, i] = v
    return u[j, i] * v


def apply_op(u, out, c1, c2, c, shift):
    """``out = c * A u + shift * u`` for an array ``shift``; returns ``(u, out)``."""
    return _apply(u, out, c1, c2, c, shift, 0.0)


def apply_op_scalar(u, out, c1, c2, c, shift):
    """As :func:`apply_op` with a scalar shift."""
    return _apply(u, out, c1, c2, c, None, shift)


@_jit
def step_xr(x, r, p, ap, alpha):
    """``x += alpha p``, ``r -= alpha ap``; returns ``(r, r)``."""
    ny, nx = x.shape
    acc = 0.0
    for j in range(ny):
        for i in range(nx):
            x[j, i] += alpha * p[j, i]
            v = r[j, i] - alpha * ap[j, i]
            r[j, i] = v
            acc += v * v
    return acc


@_jit
def step_p(p, r, beta):
    """``p = r + beta p``."""
    ny, nx = p.shape
    for j in range(ny):
        for i in range(nx):
            p[j, i] = r[j, i] + beta * p[j, i]


@_jit
def residual(rhs, ap, out):
    """``out = rhs - ap``; returns ``(out, out)``."""
    ny, nx = rhs.shape
    acc = 0.0
    for j in range(ny):
        for i in range(nx):
            v = rhs[j, i] - ap[j, i]
            out[j, i] = v
            acc += v * v
    return acc
