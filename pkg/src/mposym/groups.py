from dataclasses import dataclass, field

import numpy as np

from mposym.errors import InputError


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table, with element 0 the identity."""

    mult: np.ndarray
    labels: tuple[str, ...] = ()
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        table = np.asarray(self.mult, dtype=int)
        n = table.shape[0]
        if table.shape != (n, n) or n == 0:
            raise InputError(f"multiplication table must be square, got shape {table.shape}")
        if table.min() < 0 or table.max() >= n:
            raise InputError("multiplication table has entries outside 0..order-1")
        object.__setattr__(self, "mult", table)
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(g) for g in range(n)))
        elif len(self.labels) != n:
            raise InputError(f"expected {n} labels, got {len(self.labels)}")
        self._validate()
        inverse = np.array([int(np.flatnonzero(table[g] == 0)[0]) for g in range(n)])
        object.__setattr__(self, "inverse", inverse)

    def _validate(self) -> None:
        t = self.mult
        n = self.order
        identity = np.arange(n)
        if not (np.array_equal(t[0], identity) and np.array_equal(t[:, 0], identity)):
            raise InputError("element 0 must be the identity")
        for g in range(n):
            if sorted(t[g]) != list(range(n)) or sorted(t[:, g]) != list(range(n)):
                raise InputError(f"row/column {g} is not a permutation; not a group")
        # (gh)k == g(hk) for all triples
        left = t[t]
        right = t[np.arange(n)[:, None, None], t[None, :, :]]
        if not np.array_equal(left, right):
            raise InputError("multiplication table is not associative")

    @property
    def order(self) -> int:
        return self.mult.shape[0]

    def mul(self, g: int, h: int) -> int:
        return int(self.mult[g, h])

    def inv(self, g: int) -> int:
        return int(self.inverse[g])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mult, self.mult.T))

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        if n < 1:
            raise InputError(f"cyclic group order must be positive, got {n}")
        g = np.arange(n)
        return cls((g[:, None] + g[None, :]) % n, tuple(str(k) for k in range(n)))

    @classmethod
    def direct_product(cls, first: "FiniteGroup", second: "FiniteGroup") -> "FiniteGroup":
        """Pairs (a, b) indexed as a * |second| + b."""
        m = second.order
        n = first.order * m
        table = np.empty((n, n), dtype=int)
        for x in range(n):
            for y in range(n):
                a = first.mul(x // m, y // m)
                b = second.mul(x % m, y % m)
                table[x, y] = a * m + b
        labels = tuple(f"({p},{q})" for p in first.labels for q in second.labels)
        return cls(table, labels)
