"""Finite categorical distributions."""

from __future__ import annotations

from fractions import Fraction
from numbers import Real
from typing import Callable, Generic, Hashable, Iterable, Iterator, TypeVar

T = TypeVar("T", bound=Hashable)
U = TypeVar("U", bound=Hashable)

NORMALIZATION_TOL = 1e-9


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


class Dist(Generic[T]):
    """An immutable, normalized distribution over hashable elements.

    The support keeps insertion order, which is what makes enumeration
    output reproducible. Masses may be floats or :class:`fractions.Fraction`;
    with fractions all arithmetic stays exact.
    """

    __slots__ = ("_items", "_index")

    def __init__(self, items: Iterable[tuple[T, Real]]):
        pairs = tuple(items)
        if not pairs:
            raise ValueError("distribution support must be non-empty")
        index: dict[T, int] = {}
        for i, (x, p) in enumerate(pairs):
            if x in index:
                raise ValueError(f"duplicate element in support: {x!r}")
            if p < 0:
                raise ValueError(f"negative mass {p!r} on {x!r}")
            index[x] = i
        total = sum(p for _, p in pairs)
        if abs(total - 1) > NORMALIZATION_TOL:
            raise ValueError(f"masses sum to {total!r}, not 1")
        self._items = pairs
        self._index = index

    @classmethod
    def from_weights(cls, weights: Iterable[tuple[T, Real]],
                     merge_tol: float | None = None) -> "Dist[T]":
        """Build a distribution from unnormalized weights.

        Duplicate elements are summed, zero weights dropped. With
        ``merge_tol`` set, numeric elements closer than the tolerance to an
        earlier element are folded into it.
        """
        acc: dict[T, Real] = {}
        for x, w in weights:
            if w < 0:
                raise ValueError(f"negative weight {w!r} on {x!r}")
            if merge_tol is not None:
                for y in acc:
                    if abs(x - y) < merge_tol:
                        x = y
                        break
            acc[x] = acc.get(x, 0) + w
        total = sum(acc.values())
        if total <= 0:
            raise ValueError("weights sum to zero")
        if _is_exact(total):
            total = Fraction(total)
        return cls((x, w / total) for x, w in acc.items() if w > 0)

    @classmethod
    def point(cls, x: T) -> "Dist[T]":
        return cls([(x, 1)])

    @classmethod
    def uniform(cls, xs: Iterable[T]) -> "Dist[T]":
        xs = list(xs)
        return cls((x, Fraction(1, len(xs))) for x in xs)

    def __iter__(self) -> Iterator[tuple[T, Real]]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, x) -> bool:
        return x in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dist):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        body = ", ".join(f"{x!r}: {float(p):.6g}" for x, p in self._items)
        return f"Dist({{{body}}})"

    @property
    def support(self) -> tuple[T, ...]:
        return tuple(x for x, _ in self._items)

    def items(self) -> tuple[tuple[T, Real], ...]:
        return self._items

    def prob(self, x) -> Real:
        i = self._index.get(x)
        return 0 if i is None else self._items[i][1]

    def prob_where(self, pred: Callable[[T], bool]) -> Real:
        return sum((p for x, p in self._items if pred(x)), 0)

    def map(self, f: Callable[[T], U]) -> "Dist[U]":
        """Push the distribution forward through ``f``, summing collisions."""
        acc: dict[U, Real] = {}
        for x, p in self._items:
            y = f(x)
            acc[y] = acc.get(y, 0) + p
        return Dist(acc.items())

    def reweight(self, likelihood: Callable[[T], Real]) -> "Dist[T] | None":
        """Multiply by ``likelihood`` and renormalize; ``None`` if no mass remains."""
        weighted = [(x, p * likelihood(x)) for x, p in self._items]
        total = sum((w for _, w in weighted), 0)
        if total <= 0:
            return None
        if _is_exact(total):
            total = Fraction(total)
        return Dist((x, w / total) for x, w in weighted if w > 0)

    def expectation(self, f: Callable[[T], Real] | None = None) -> Real:
        if f is None:
            return sum((x * p for x, p in self._items), 0)
        return sum((f(x) * p for x, p in self._items), 0)

    def mode(self) -> T:
        """Most probable element; ties go to the earliest in support order."""
        best, best_p = self._items[0]
        for x, p in self._items[1:]:
            if p > best_p:
                best, best_p = x, p
        return best

    @property
    def exact(self) -> bool:
        return all(_is_exact(p) for _, p in self._items)


def expectation(dist: Dist) -> Real:
    """Mean of a distribution over numbers."""
    return dist.expectation()
