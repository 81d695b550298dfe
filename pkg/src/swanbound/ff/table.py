"""Log/antilog/trace tables for vectorized arithmetic on whole fields.

Elements are handled as integer codes (see :mod:`swanbound.ff.tower`).
Multiplication goes through discrete logs to a fixed primitive element,
addition goes digitwise, and the absolute trace is a table lookup. This
is the hot path for exponential sums; the scalar :class:`FFElement`
arithmetic is the reference it is tested against.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from sympy import factorint

from ..errors import BudgetExceeded
from .tower import DEFAULT_BUDGET, FFElement, FieldTower

_BLOCK = 4096


def primitive_element(tower: FieldTower) -> FFElement:
    """The generator of F_{q^k}^* with the smallest code."""
    n = tower.order - 1
    exps = [n // ell for ell in factorint(n)]
    for code in range(1, tower.order):
        g = tower.from_code(code)
        if all(g ** e != tower.one for e in exps):
            return g
    raise AssertionError("multiplicative group has no generator")


class FieldTable:
    def __init__(self, tower: FieldTower, budget: int = DEFAULT_BUDGET):
        if tower.order > budget:
            raise BudgetExceeded(f"|F| = {tower.order} exceeds enumeration budget {budget}")
        self.tower = tower
        self.p = p = tower.p
        self.n = n = tower.degree
        self.order = Q = tower.order
        self.pw = p ** np.arange(n, dtype=np.int64)
        self.generator = g = primitive_element(tower)

        # columns of multiplication-by-g on the F_p-basis given by codes p^j
        mat = np.zeros((n, n), dtype=np.int64)
        for j in range(n):
            image = (g * tower.from_code(p**j)).code
            for i in range(n):
                image, mat[i, j] = divmod(image, p)

        nblk = min(_BLOCK, Q - 1)
        blk = np.zeros((nblk, n), dtype=np.int64)
        vec = np.zeros(n, dtype=np.int64)
        vec[0] = 1
        for i in range(nblk):
            blk[i] = vec
            vec = (mat @ vec) % p
        step = np.eye(n, dtype=np.int64)
        for _ in range(nblk):
            step = (mat @ step) % p
        antilog = np.empty(Q - 1, dtype=np.int64)
        for start in range(0, Q - 1, nblk):
            m = min(nblk, Q - 1 - start)
            antilog[start:start + m] = blk[:m] @ self.pw
            blk = (blk @ step.T) % p
        log = np.full(Q, -1, dtype=np.int64)
        log[antilog] = np.arange(Q - 1, dtype=np.int64)
        if (log[1:] < 0).any():
            raise AssertionError("generator does not span the multiplicative group")
        self.antilog = antilog
        self.log = log

        trace = np.zeros(1, dtype=np.int64)
        for j in range(n):
            tj = tower.from_code(p**j).absolute_trace()
            trace = np.concatenate([(trace + d * tj) % p for d in range(p)])
        self.trace = trace.astype(np.int8)

    # -- codes -------------------------------------------------------------------

    def code(self, x: FFElement) -> int:
        return self.tower.embed(x).code

    def digits(self, c: np.ndarray) -> np.ndarray:
        return (np.asarray(c)[..., None] // self.pw) % self.p

    def add(self, a, b) -> np.ndarray:
        return ((self.digits(a) + self.digits(b)) % self.p) @ self.pw

    def sub(self, a, b) -> np.ndarray:
        return ((self.digits(a) - self.digits(b)) % self.p) @ self.pw

    def neg(self, a) -> np.ndarray:
        return ((-self.digits(a)) % self.p) @ self.pw

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a)
        b = np.asarray(b)
        a, b = np.broadcast_arrays(a, b)
        out = np.zeros(a.shape, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        out[nz] = self.antilog[(self.log[a[nz]] + self.log[b[nz]]) % (self.order - 1)]
        return out

    def inv(self, a) -> np.ndarray:
        a = np.asarray(a)
        if (a == 0).any():
            raise ZeroDivisionError("inverse of zero")
        return self.antilog[(-self.log[a]) % (self.order - 1)]

    def power(self, a, e: int) -> np.ndarray:
        a = np.asarray(a)
        out = np.zeros(a.shape, dtype=np.int64)
        nz = a != 0
        out[nz] = self.antilog[(self.log[a[nz]] * e) % (self.order - 1)]
        if e == 0:
            out[:] = 1
        return out

    def poly_eval(self, coeff_codes, x) -> np.ndarray:
        """Horner evaluation of a polynomial given by coefficient codes."""
        x = np.asarray(x)
        acc = np.zeros(x.shape, dtype=np.int64)
        for c in reversed(list(coeff_codes)):
            acc = self.mul(acc, x)
            if c:
                acc = self.add(acc, np.full(x.shape, c, dtype=np.int64))
        return acc

    def is_square(self, a) -> np.ndarray:
        """True for nonzero squares (zero is reported separately by callers)."""
        a = np.asarray(a)
        return (a != 0) & (self.log[a] % 2 == 0)

    def sqrt(self, a) -> np.ndarray:
        """A square root for each entry; only meaningful where is_square or zero."""
        a = np.asarray(a)
        out = np.zeros(a.shape, dtype=np.int64)
        nz = a != 0
        out[nz] = self.antilog[self.log[a[nz]] // 2]
        return out


@lru_cache(maxsize=6)
def field_table(tower: FieldTower, budget: int = DEFAULT_BUDGET) -> FieldTable:
    return FieldTable(tower, budget)
