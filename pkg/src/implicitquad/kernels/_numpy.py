"""Vectorised numpy kernels: postfix interpreter and bracketed Newton.

Every function here has a twin of the same signature in ``_numba`` and the
two must agree to rounding.
"""

import numpy as np

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

ROOT_OK, ROOT_NO_SIGN, ROOT_NO_CONVERGENCE, ROOT_NAN = 0, 1, 2, 3
MAX_ITER = 200

_F = {code: name for name, code in FUNC_OPCODES.items()}


def eval_program(ops, args, consts, dim, pts, want_grad=True):
    """Evaluate a program on ``(N, dim)`` points; returns ``(value, grad)``.

    ``grad`` has shape ``(N, dim)`` or is ``None`` when ``want_grad`` is off.
    """
    n = pts.shape[0]
    vs, gs = [], []
    with np.errstate(all="ignore"):
        for op, arg in zip(ops.tolist(), args.tolist()):
            if op == OP_CONST:
                vs.append(np.full(n, consts[arg]))
                gs.append(np.zeros((dim, n)) if want_grad else None)
                continue
            if op == OP_VAR:
                vs.append(pts[:, arg].copy())
                if want_grad:
                    g = np.zeros((dim, n))
                    g[arg] = 1.0
                    gs.append(g)
                else:
                    gs.append(None)
                continue
            if op == OP_NEG:
                vs[-1] = -vs[-1]
                if want_grad:
                    gs[-1] = -gs[-1]
                continue
            if op == OP_POWI:
                a, ga = vs[-1], gs[-1]
                vs[-1] = a**arg if arg >= 0 else 1.0 / a ** (-arg)
                if want_grad:
                    if arg == 0:
                        gs[-1] = np.zeros_like(ga)
                    else:
                        gs[-1] = ga * (arg * (a ** (arg - 1) if arg >= 1 else 1.0 / a ** (1 - arg)))
                continue
            if op in _F:
                a, ga = vs[-1], gs[-1]
                name = _F[op]
                if name == "sin":
                    v, dv = np.sin(a), np.cos(a)
                elif name == "cos":
                    v, dv = np.cos(a), -np.sin(a)
                elif name == "tan":
                    v = np.tan(a)
                    dv = 1.0 / np.cos(a) ** 2
                elif name == "exp":
                    v = np.exp(a)
                    dv = v
                elif name == "log":
                    v, dv = np.log(a), 1.0 / a
                elif name == "sqrt":
                    v = np.sqrt(a)
                    dv = 0.5 / v
                elif name == "abs":
                    v, dv = np.abs(a), np.sign(a)
                else:
                    v = np.tanh(a)
                    dv = 1.0 - v * v
                vs[-1] = v
                if want_grad:
                    gs[-1] = ga * dv
                continue
            b, gb = vs.pop(), gs.pop()
            a, ga = vs[-1], gs[-1]
            if op == OP_ADD:
                vs[-1] = a + b
                g = ga + gb if want_grad else None
            elif op == OP_SUB:
                vs[-1] = a - b
                g = ga - gb if want_grad else None
            elif op == OP_MUL:
                vs[-1] = a * b
                g = ga * b + gb * a if want_grad else None
            elif op == OP_DIV:
                vs[-1] = a / b
                g = (ga * b - gb * a) / (b * b) if want_grad else None
            else:  # OP_POW
                v = np.power(a, b)
                vs[-1] = v
                if want_grad:
                    g = ga * (b * np.power(a, b - 1))
                    active = gb != 0
                    if np.any(active):
                        g = g + np.where(active, gb * (v * np.log(a)), 0.0)
            if want_grad:
                gs[-1] = g
    value = vs[0]
    grad = gs[0].T.copy() if want_grad else None
    return value, grad


def segment_roots(value_and_grad, a, b, fa, fb, tau0, ztol, rtol):
    """Roots of ``g(t) = F(a + t (b - a))`` on ``[0, 1]`` for ``N`` segments.

    ``value_and_grad`` maps ``(M, d)`` points to ``(value, grad)``.  The
    bracket ``[lo, hi]`` is maintained per segment; Newton iterates leaving it
    are replaced by the midpoint.  Returns ``(t, g(t), status)``.
    """
    n = a.shape[0]
    t = np.zeros(n)
    gval = np.zeros(n)
    status = np.full(n, ROOT_OK, dtype=np.int64)
    direction = b - a

    at_a = np.abs(fa) <= ztol
    at_b = (np.abs(fb) <= ztol) & ~at_a
    t[at_b] = 1.0
    gval[at_a] = fa[at_a]
    gval[at_b] = fb[at_b]
    nan = ~(np.isfinite(fa) & np.isfinite(fb))
    no_sign = ~at_a & ~at_b & (np.sign(fa) == np.sign(fb)) & ~nan
    status[nan] = ROOT_NAN
    status[no_sign] = ROOT_NO_SIGN

    active = np.flatnonzero(~at_a & ~at_b & ~no_sign & ~nan)
    lo = np.zeros(n)
    hi = np.ones(n)
    flo = fa.copy()
    tol = rtol * (1.0 + np.abs(fa) + np.abs(fb))
    tc = np.where((tau0 > 0.0) & (tau0 < 1.0), tau0, 0.5)

    for _ in range(MAX_ITER):
        if active.size == 0:
            break
        tt = tc[active]
        pts = a[active] + tt[:, None] * direction[active]
        g, grad = value_and_grad(pts)
        dg = np.einsum("ij,ij->i", grad, direction[active])

        bad = ~np.isfinite(g)
        status[active[bad]] = ROOT_NAN

        l, h, fl = lo[active], hi[active], flo[active]
        newton = tt - g / np.where(dg != 0.0, dg, np.nan)
        converged = np.abs(g) <= tol[active]
        # final polish step when it stays inside the bracket
        polish = converged & (newton >= l) & (newton <= h)
        done_t = np.where(polish, newton, tt)

        same = np.sign(g) == np.sign(fl)
        l = np.where(same, tt, l)
        fl = np.where(same, g, fl)
        h = np.where(same, h, tt)
        inside = (newton > l) & (newton < h)
        nxt = np.where(inside, newton, 0.5 * (l + h))
        collapsed = (h - l) <= 4.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(tt))
        finished = converged | collapsed | bad

        t[active[finished]] = np.where(converged, done_t, tt)[finished]
        gval[active[finished]] = g[finished]
        lo[active], hi[active], flo[active] = l, h, fl
        tc[active] = nxt
        active = active[~finished]
    if active.size:
        status[active] = ROOT_NO_CONVERGENCE
    return t, gval, status
