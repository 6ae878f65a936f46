"""Integer partitions (Young diagrams) and the combinatorics used to index blocks.

Partitions are immutable tuples of positive, weakly decreasing integers with
zero parts dropped; ``Partition()`` is the empty diagram. Cells are 1-based
``(row, col)`` pairs.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial, prod
from typing import Iterable, Iterator, Sequence

from .errors import DomainError


class Partition(tuple):
    """A Young diagram stored as its row lengths."""

    def __new__(cls, parts: Iterable[int] = ()):
        parts = [int(p) for p in parts]
        if any(p < 0 for p in parts):
            raise DomainError(f"negative part in {parts}")
        parts = [p for p in parts if p > 0]
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise DomainError(f"parts must be weakly decreasing, got {parts}")
        return super().__new__(cls, parts)

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def part(self, i: int) -> int:
        """Row length ``λ_i`` (1-based), zero beyond the last row."""
        return self[i - 1] if 1 <= i <= len(self) else 0

    def conjugate(self) -> "Partition":
        if not self:
            return Partition()
        return Partition(sum(1 for p in self if p > j) for j in range(self[0]))

    def cells(self) -> Iterator[tuple[int, int]]:
        for i, row in enumerate(self, start=1):
            for j in range(1, row + 1):
                yield (i, j)

    def to_json(self) -> list[int]:
        return list(self)

    @classmethod
    def from_json(cls, data: Sequence[int]) -> "Partition":
        return cls(data)

    def __repr__(self) -> str:
        return f"Partition({list(self)})"


def as_partition(p: Iterable[int]) -> Partition:
    return p if isinstance(p, Partition) else Partition(p)


def rectangle(n: int, k: int) -> Partition:
    """The ``k``-row rectangle ``(n^k)``."""
    return Partition([n] * k)


def enumerate_partitions(N: int, max_rows: int | None = None) -> list[Partition]:
    """All partitions of ``N`` with at most ``max_rows`` rows, lexicographically descending."""
    if N < 0:
        raise DomainError("N must be nonnegative")
    rows = N if max_rows is None else max_rows
    return [Partition(p) for p in _partitions(N, N, rows)]


@lru_cache(maxsize=None)
def _partitions(n: int, largest: int, rows: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    if rows == 0:
        return ()
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first, rows - 1):
            out.append((first,) + rest)
    return tuple(out)


def hook_length(lam: Partition, cell: tuple[int, int]) -> int:
    """Arm + leg + 1 of a 1-based cell inside ``lam``."""
    lam = as_partition(lam)
    i, j = cell
    if not (1 <= i <= lam.length and 1 <= j <= lam.part(i)):
        raise DomainError(f"cell {cell} is not in {list(lam)}")
    arm = lam.part(i) - j
    leg = lam.conjugate().part(j) - i
    return arm + leg + 1


@lru_cache(maxsize=None)
def _dim_specht(lam: tuple[int, ...]) -> int:
    p = Partition(lam)
    hooks = prod(hook_length(p, c) for c in p.cells())
    return factorial(p.size) // hooks


def dim_specht(lam: Iterable[int]) -> int:
    """Dimension of the Specht module, by the hook length formula."""
    return _dim_specht(tuple(as_partition(lam)))


@lru_cache(maxsize=None)
def _dim_unitary(lam: tuple[int, ...], m: int) -> int:
    p = Partition(lam)
    if p.length > m:
        return 0
    value = Fraction(1)
    for i, j in p.cells():
        value *= Fraction(m + j - i, hook_length(p, (i, j)))
    assert value.denominator == 1
    return int(value)


def dim_unitary_irrep(lam: Iterable[int], m: int) -> int:
    """Dimension of the U(m) irrep with highest weight ``lam`` (hook-content formula).

    Zero when ``lam`` has more than ``m`` rows.
    """
    if m < 1:
        raise DomainError("m must be positive")
    return _dim_unitary(tuple(as_partition(lam)), m)


def remove_first_column(lam: Iterable[int]) -> Partition:
    """``λ⁻``: every row shortened by one box."""
    return Partition(p - 1 for p in as_partition(lam))


def contains(mu: Iterable[int], lam: Iterable[int]) -> bool:
    """True when the diagram ``mu`` sits inside ``lam``."""
    mu, lam = as_partition(mu), as_partition(lam)
    return mu.length <= lam.length and all(a <= b for a, b in zip(mu, lam))


def covers(lam: Iterable[int], mu: Iterable[int]) -> bool:
    """True when ``lam`` is ``mu`` with exactly one box appended."""
    lam, mu = as_partition(lam), as_partition(mu)
    return lam.size == mu.size + 1 and contains(mu, lam)


def add_box(mu: Partition, row: int) -> Partition | None:
    """Append a box in 1-based ``row``; None when the result is not a partition."""
    parts = list(mu) + [0]
    if row > len(parts):
        return None
    parts[row - 1] += 1
    if row >= 2 and parts[row - 1] > parts[row - 2]:
        return None
    return Partition(parts)


def admissible_mus(lam: Iterable[int], k: int) -> list[Partition]:
    """Diagrams ``μ ⊂ λ`` with ``μ ↘ λ⁻`` and at most ``k`` rows, ordered by the added row.

    These index the Specht modules of ``S_N`` that pair with the dual
    ``(1^{k-1})`` factor to produce ``λ``.
    """
    lam = as_partition(lam)
    if lam.length != k:
        raise DomainError(f"{list(lam)} must have exactly k={k} rows")
    base = remove_first_column(lam)
    out = []
    for row in range(1, k + 1):
        mu = add_box(base, row)
        if mu is not None and mu.length <= k and contains(mu, lam):
            out.append(mu)
    return out


def complement_in_rectangle(mu: Iterable[int], n: int, d: int) -> Partition:
    """The 180°-rotated complement of ``mu`` inside the rectangle ``(n^d)``."""
    mu = as_partition(mu)
    if not contains(mu, rectangle(n, d)):
        raise DomainError(f"{list(mu)} does not fit in ({n}^{d})")
    return Partition(n - mu.part(d + 1 - i) for i in range(1, d + 1))


def standard_tableaux(lam: Iterable[int]) -> list[tuple[tuple[int, ...], ...]]:
    """All standard Young tableaux of shape ``lam`` as tuples of rows (entries 1..N)."""
    lam = as_partition(lam)
    N = lam.size
    out: list[tuple[tuple[int, ...], ...]] = []

    def fill(rows: list[list[int]], nxt: int) -> None:
        if nxt > N:
            out.append(tuple(tuple(r) for r in rows))
            return
        for i in range(lam.length):
            if len(rows[i]) < lam[i] and (i == 0 or len(rows[i - 1]) > len(rows[i])):
                rows[i].append(nxt)
                fill(rows, nxt + 1)
                rows[i].pop()

    fill([[] for _ in lam], 1)
    return out


def semistandard_tableaux(lam: Iterable[int], m: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Semistandard tableaux of shape ``lam`` with entries in ``1..m``."""
    lam = as_partition(lam)
    if lam.length > m:
        return

    def rows_of(length: int) -> list[tuple[int, ...]]:
        return [r for r in product(range(1, m + 1), repeat=length)
                if all(r[i] <= r[i + 1] for i in range(length - 1))]

    rows_choices = [rows_of(L) for L in lam]

    def build(i: int, acc: list[tuple[int, ...]]) -> Iterator[tuple[tuple[int, ...], ...]]:
        if i == len(lam):
            yield tuple(acc)
            return
        for row in rows_choices[i]:
            if i and any(row[j] <= acc[i - 1][j] for j in range(len(row))):
                continue
            acc.append(row)
            yield from build(i + 1, acc)
            acc.pop()

    yield from build(0, [])
