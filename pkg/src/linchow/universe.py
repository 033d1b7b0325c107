"""Integer-indexed tables over all one-variable coordinate functions.

Index layout: the valid FracLin1 values (non-constant ones and constants
2..p-1) in coefficient-tuple order, followed by three extra codes for the raw
constants 0, 1 and inf that show up while restricting to faces. Points of
P^1 are coded 0..p-1 with p standing for inf.
"""

from __future__ import annotations

import numpy as np

from .fraclin import FracLin1, all_mobius, constant1
from .gf import INF, FieldConfig, get_field


class Universe1:
    def __init__(self, F: FieldConfig):
        self.F = F
        p = self.p = F.p
        funcs = all_mobius(F) + [constant1(F, v) for v in range(2, p)]
        funcs.sort()
        self.funcs = funcs
        self.n_valid = n = len(funcs)
        self.index = {f: i for i, f in enumerate(funcs)}
        self.RAW0, self.RAW1, self.RAWINF = n, n + 1, n + 2
        self.size = n + 3
        self.is_const = np.zeros(self.size, np.int8)
        self.const_code = np.full(self.size, -1, np.int16)
        self.zero = np.full(self.size, -1, np.int16)
        self.pole = np.full(self.size, -1, np.int16)
        self.val = np.zeros((self.size, p + 1), np.int16)
        for i, f in enumerate(funcs):
            if f.is_constant:
                self.is_const[i] = 1
                self.const_code[i] = f.value
                self.val[i, :] = f.value
                continue
            a, b, c, d = f.coeffs
            self.zero[i] = p if a == 0 else F.div(-b, a)
            self.pole[i] = p if c == 0 else F.div(-d, c)
            for x in range(p + 1):
                y = f(INF if x == p else x)
                self.val[i, x] = p if y is INF else y
        for i, v in ((self.RAW0, 0), (self.RAW1, 1), (self.RAWINF, p)):
            self.is_const[i] = 1
            self.const_code[i] = v
            self.val[i, :] = v
        self._comp = None
        self._inv = None

    def code_of(self, f) -> int:
        """Index of a FracLin1 or of a raw constant ProjPoint."""
        if isinstance(f, FracLin1):
            return self.index[f]
        if f is INF:
            return self.RAWINF
        if f == 0:
            return self.RAW0
        if f == 1:
            return self.RAW1
        return self.index[constant1(self.F, f)]

    def func(self, i: int):
        if i < self.n_valid:
            return self.funcs[i]
        return {self.RAW0: 0, self.RAW1: 1, self.RAWINF: INF}[i]

    def _build_mobius_tables(self):
        from .fraclin import compose1, invert_mobius

        size = self.size
        comp = np.full((size, size), -1, np.int32)
        inv = np.full(size, -1, np.int32)
        nonconst = [i for i in range(self.n_valid) if not self.is_const[i]]
        for s in nonconst:
            inv[s] = self.index[invert_mobius(self.funcs[s])]
            for f in range(size):
                if self.is_const[f]:
                    comp[f, s] = f
                else:
                    comp[f, s] = self.index[compose1(self.funcs[f], self.funcs[s])]
        self._comp, self._inv = comp, inv

    @property
    def compose_table(self) -> np.ndarray:
        """comp[f, s] = index of f o s for non-constant s (-1 otherwise)."""
        if self._comp is None:
            self._build_mobius_tables()
        return self._comp

    @property
    def inverse_table(self) -> np.ndarray:
        if self._inv is None:
            self._build_mobius_tables()
        return self._inv


_CACHE: dict = {}


def get_universe(p: int) -> Universe1:
    U = _CACHE.get(p)
    if U is None:
        U = _CACHE[p] = Universe1(get_field(p))
    return U
