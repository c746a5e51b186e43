"""numba versions of the hot kernels.

The postfix interpreter runs per point inside compiled loops, so one
compilation serves every expression.  Signatures mirror ``_numpy``.
"""

import math

import numba
import numpy as np
from numba import njit, prange

from ..expr import (
    FUNC_OPCODES,
    OP_ADD,
    OP_CONST,
    OP_DIV,
    OP_MUL,
    OP_NEG,
    OP_POW,
    OP_POWI,
    OP_SUB,
    OP_VAR,
)
from ._numpy import MAX_ITER, ROOT_NAN, ROOT_NO_CONVERGENCE, ROOT_NO_SIGN, ROOT_OK

# tbb is tried first by default and warns when the system copy is too old
if numba.config.THREADING_LAYER == "default":
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

F_SIN = FUNC_OPCODES["sin"]
F_COS = FUNC_OPCODES["cos"]
F_TAN = FUNC_OPCODES["tan"]
F_EXP = FUNC_OPCODES["exp"]
F_LOG = FUNC_OPCODES["log"]
F_SQRT = FUNC_OPCODES["sqrt"]
F_ABS = FUNC_OPCODES["abs"]
F_TANH = FUNC_OPCODES["tanh"]


@njit(cache=True, error_model="numpy")
def _log(a):
    if a < 0.0:
        return np.nan
    if a == 0.0:
        return -np.inf
    return math.log(a)


@njit(cache=True, error_model="numpy")
def _sqrt(a):
    if a < 0.0:
        return np.nan
    return math.sqrt(a)


@njit(cache=True, error_model="numpy")
def _pow(a, b):
    if a < 0.0 and b != math.floor(b):
        return np.nan
    if a == 0.0 and b < 0.0:
        return np.inf
    return a**b


@njit(cache=True, error_model="numpy")
def _powi(a, n):
    if n >= 0:
        return a**n
    return 1.0 / a ** (-n)


@njit(cache=True, error_model="numpy")
def eval_block(ops, args, consts, dim, xs, m, sv, sg):
    """Run the program over the first ``m`` columns of ``xs`` (dim, B).

    Each opcode is one tight loop over the block, so dispatch is paid once
    per block rather than once per point.  The value ends in ``sv[0, :m]``
    and the gradient in ``sg[0, :, :m]``.
    """
    top = -1
    for k in range(ops.shape[0]):
        op = ops[k]
        arg = args[k]
        if op == OP_CONST:
            top += 1
            c = consts[arg]
            for i in range(m):
                sv[top, i] = c
            for j in range(dim):
                for i in range(m):
                    sg[top, j, i] = 0.0
        elif op == OP_VAR:
            top += 1
            for i in range(m):
                sv[top, i] = xs[arg, i]
            for j in range(dim):
                e = 1.0 if j == arg else 0.0
                for i in range(m):
                    sg[top, j, i] = e
        elif op == OP_NEG:
            for i in range(m):
                sv[top, i] = -sv[top, i]
            for j in range(dim):
                for i in range(m):
                    sg[top, j, i] = -sg[top, j, i]
        elif op == OP_POWI:
            for i in range(m):
                a = sv[top, i]
                sv[top, i] = _powi(a, arg)
                dv = 0.0 if arg == 0 else arg * _powi(a, arg - 1)
                for j in range(dim):
                    sg[top, j, i] *= dv
        elif op >= F_SIN:
            for i in range(m):
                a = sv[top, i]
                if op == F_SIN:
                    v = math.sin(a)
                    dv = math.cos(a)
                elif op == F_COS:
                    v = math.cos(a)
                    dv = -math.sin(a)
                elif op == F_TAN:
                    v = math.tan(a)
                    c = math.cos(a)
                    dv = 1.0 / (c * c)
                elif op == F_EXP:
                    v = math.exp(a)
                    dv = v
                elif op == F_LOG:
                    v = _log(a)
                    dv = 1.0 / a
                elif op == F_SQRT:
                    v = _sqrt(a)
                    dv = 0.5 / v
                elif op == F_ABS:
                    v = abs(a)
                    if a > 0.0:
                        dv = 1.0
                    elif a < 0.0:
                        dv = -1.0
                    else:
                        dv = 0.0
                else:
                    v = math.tanh(a)
                    dv = 1.0 - v * v
                sv[top, i] = v
                for j in range(dim):
                    sg[top, j, i] *= dv
        else:
            top -= 1
            r = top + 1
            if op == OP_ADD:
                for i in range(m):
                    sv[top, i] += sv[r, i]
                for j in range(dim):
                    for i in range(m):
                        sg[top, j, i] += sg[r, j, i]
            elif op == OP_SUB:
                for i in range(m):
                    sv[top, i] -= sv[r, i]
                for j in range(dim):
                    for i in range(m):
                        sg[top, j, i] -= sg[r, j, i]
            elif op == OP_MUL:
                for j in range(dim):
                    for i in range(m):
                        sg[top, j, i] = sg[top, j, i] * sv[r, i] + sg[r, j, i] * sv[top, i]
                for i in range(m):
                    sv[top, i] *= sv[r, i]
            elif op == OP_DIV:
                for j in range(dim):
                    for i in range(m):
                        b = sv[r, i]
                        sg[top, j, i] = (sg[top, j, i] * b - sg[r, j, i] * sv[top, i]) / (b * b)
                for i in range(m):
                    sv[top, i] /= sv[r, i]
            else:
                for i in range(m):
                    a = sv[top, i]
                    b = sv[r, i]
                    v = _pow(a, b)
                    dpow = b * _pow(a, b - 1.0)
                    active = False
                    for j in range(dim):
                        if sg[r, j, i] != 0.0:
                            active = True
                    lg = _log(a) if active else 0.0
                    for j in range(dim):
                        gj = sg[top, j, i] * dpow
                        if sg[r, j, i] != 0.0:
                            gj += sg[r, j, i] * (v * lg)
                        sg[top, j, i] = gj
                    sv[top, i] = v


BLOCK = 256


@njit(cache=True, parallel=True, error_model="numpy")
def _eval_many(ops, args, consts, dim, depth, pts, value, grad):
    n = pts.shape[0]
    nblocks = (n + BLOCK - 1) // BLOCK
    for blk in prange(nblocks):
        xs = np.empty((dim, BLOCK))
        sv = np.empty((depth, BLOCK))
        sg = np.empty((depth, dim, BLOCK))
        i0 = blk * BLOCK
        m = min(n, i0 + BLOCK) - i0
        for i in range(m):
            for j in range(dim):
                xs[j, i] = pts[i0 + i, j]
        eval_block(ops, args, consts, dim, xs, m, sv, sg)
        for i in range(m):
            value[i0 + i] = sv[0, i]
            for j in range(dim):
                grad[i0 + i, j] = sg[0, j, i]


def eval_program(ops, args, consts, dim, pts, want_grad=True, depth=None):
    n = pts.shape[0]
    value = np.empty(n)
    grad = np.empty((n, dim))
    if depth is None:
        depth = ops.shape[0]
    _eval_many(ops, args, consts, dim, depth, np.ascontiguousarray(pts, dtype=np.float64), value, grad)
    return value, (grad if want_grad else None)


@njit(cache=True, error_model="numpy")
def _roots_block(ops, args, consts, dim, depth, a, b, fa, fb, tau0, ztol, rtol, i0, m, t, gval, status):
    """Segments ``i0 .. i0+m`` stepped in lock-step, one block evaluation per sweep."""
    eps4 = 4.0 * np.finfo(np.float64).eps
    xs = np.empty((dim, BLOCK))
    sv = np.empty((depth, BLOCK))
    sg = np.empty((depth, dim, BLOCK))
    idx = np.empty(BLOCK, dtype=np.int64)
    lo = np.zeros(BLOCK)
    hi = np.ones(BLOCK)
    flo = np.empty(BLOCK)
    tc = np.empty(BLOCK)
    tol = np.empty(BLOCK)
    na = 0
    for k in range(m):
        i = i0 + k
        t[i] = 0.0
        gval[i] = fa[i]
        status[i] = ROOT_OK
        if not (math.isfinite(fa[i]) and math.isfinite(fb[i])):
            gval[i] = np.nan
            status[i] = ROOT_NAN
        elif abs(fa[i]) <= ztol:
            pass
        elif abs(fb[i]) <= ztol:
            t[i] = 1.0
            gval[i] = fb[i]
        elif (fa[i] > 0.0) == (fb[i] > 0.0):
            status[i] = ROOT_NO_SIGN
        else:
            idx[na] = k
            flo[k] = fa[i]
            tol[k] = rtol * (1.0 + abs(fa[i]) + abs(fb[i]))
            tc[k] = tau0[i] if (tau0[i] > 0.0 and tau0[i] < 1.0) else 0.5
            na += 1
    for _ in range(MAX_ITER):
        if na == 0:
            break
        for c in range(na):
            k = idx[c]
            i = i0 + k
            for j in range(dim):
                xs[j, c] = a[i, j] + tc[k] * (b[i, j] - a[i, j])
        eval_block(ops, args, consts, dim, xs, na, sv, sg)
        keep = 0
        for c in range(na):
            k = idx[c]
            i = i0 + k
            tt = tc[k]
            g = sv[0, c]
            if not math.isfinite(g):
                t[i] = tt
                gval[i] = g
                status[i] = ROOT_NAN
                continue
            dg = 0.0
            for j in range(dim):
                dg += sg[0, j, c] * (b[i, j] - a[i, j])
            newton = tt - g / dg if dg != 0.0 else np.nan
            if abs(g) <= tol[k]:
                # final polish step when it stays inside the bracket
                t[i] = newton if (newton >= lo[k] and newton <= hi[k]) else tt
                gval[i] = g
                continue
            if (g > 0.0) == (flo[k] > 0.0):
                lo[k] = tt
                flo[k] = g
            else:
                hi[k] = tt
            if hi[k] - lo[k] <= eps4 * max(1.0, abs(tt)):
                t[i] = tt
                gval[i] = g
                continue
            tc[k] = newton if (newton > lo[k] and newton < hi[k]) else 0.5 * (lo[k] + hi[k])
            idx[keep] = k
            keep += 1
        na = keep
    for c in range(na):
        i = i0 + idx[c]
        t[i] = tc[idx[c]]
        status[i] = ROOT_NO_CONVERGENCE


@njit(cache=True, parallel=True, error_model="numpy")
def _roots_many(ops, args, consts, dim, depth, a, b, fa, fb, tau0, ztol, rtol, t, gval, status):
    n = a.shape[0]
    nblocks = (n + BLOCK - 1) // BLOCK
    for blk in prange(nblocks):
        i0 = blk * BLOCK
        _roots_block(ops, args, consts, dim, depth, a, b, fa, fb, tau0, ztol, rtol,
                     i0, min(n, i0 + BLOCK) - i0, t, gval, status)
def segment_roots_program(program, a, b, fa, fb, tau0, ztol, rtol):
    n = a.shape[0]
    t = np.empty(n)
    gval = np.empty(n)
    status = np.empty(n, dtype=np.int64)
    _roots_many(program.ops, program.args, program.consts, program.dim, program.depth,
                np.ascontiguousarray(a, dtype=np.float64), np.ascontiguousarray(b, dtype=np.float64),
                np.ascontiguousarray(fa, dtype=np.float64), np.ascontiguousarray(fb, dtype=np.float64),
                np.ascontiguousarray(tau0, dtype=np.float64), float(ztol), float(rtol),
                t, gval, status)
    return t, gval, status
