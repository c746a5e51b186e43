"""Scalar fields: a level-set function or integrand with its gradient."""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from . import kernels
from .expr import Expression, parse

CHUNK = 1 << 18


class ScalarField:
    """Base interface: vectorised value and gradient on ``(N, d)`` points."""

    dim: int
    program = None

    def value_and_grad(self, pts):
        raise NotImplementedError

    def value(self, pts):
        return self.value_and_grad(pts)[0]

    def __call__(self, pts):
        return self.value(np.asarray(pts, dtype=float))

    @property
    def constant(self) -> Optional[float]:
        """The field's value when it does not depend on position, else None."""
        return None


class ExprField(ScalarField):
    def __init__(self, expr: Expression):
        self.expr = expr
        self.dim = expr.dim
        self.program = expr.program

    @classmethod
    def from_text(cls, text: str, dim: int) -> "ExprField":
        return cls(parse(text, dim))

    def __repr__(self):
        return f"ExprField({str(self.expr)!r}, dim={self.dim})"

    def _eval(self, pts, want_grad):
        pts = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        if pts.shape[0] <= CHUNK:
            return kernels.eval_program(self.program, pts, want_grad)
        values, grads = [], []
        for start in range(0, pts.shape[0], CHUNK):
            v, g = kernels.eval_program(self.program, pts[start:start + CHUNK], want_grad)
            values.append(v)
            grads.append(g)
        return np.concatenate(values), (np.concatenate(grads) if want_grad else None)

    def value_and_grad(self, pts):
        return self._eval(pts, True)

    def value(self, pts):
        return self._eval(pts, False)[0]

    @property
    def constant(self):
        if self.expr.variables:
            return None
        return float(self.expr.dual(np.zeros((1, self.dim)))[0][0])


class FunctionField(ScalarField):
    """Wrap vectorised Python callables ``f(pts)`` and ``grad(pts)``."""

    def __init__(self, func: Callable, grad: Optional[Callable] = None, dim: int = 2):
        self.func = func
        self.grad = grad
        self.dim = dim

    def value(self, pts):
        return np.asarray(self.func(np.asarray(pts, dtype=float)), dtype=float)

    def value_and_grad(self, pts):
        if self.grad is None:
            raise TypeError("this field has no gradient")
        pts = np.asarray(pts, dtype=float)
        return self.value(pts), np.asarray(self.grad(pts), dtype=float)


def as_field(obj, dim: int) -> ScalarField:
    if isinstance(obj, ScalarField):
        if obj.dim != dim:
            raise ValueError(f"field is {obj.dim}-D, expected {dim}-D")
        return obj
    if isinstance(obj, Expression):
        return ExprField(obj)
    if isinstance(obj, str):
        return ExprField.from_text(obj, dim)
    if isinstance(obj, (int, float)):
        return ExprField.from_text(repr(float(obj)), dim)
    raise TypeError(f"cannot turn {type(obj).__name__} into a scalar field")
