"""Weighted sampling over a dynamic discrete distribution."""

from typing import Iterable, Optional

import numpy as np


class SumTree:
    """Binary sum tree over non-negative integer weights.

    Leaves hold the weights, every inner node the sum of its two children, so that
    updates and inverse-CDF lookups both cost O(log N). Weights are kept as Python
    integers, which makes the sampled sequence exact and platform independent for a
    given generator state.
    """

    def __init__(self, weights: Iterable[int]):
        weights = [int(w) for w in weights]
        assert len(weights) > 0, "SumTree needs at least one leaf."
        assert all(w >= 0 for w in weights), "Weights must be non-negative."

        self.size = len(weights)
        capacity = 1
        while capacity < self.size:
            capacity *= 2
        self._capacity = capacity

        tree = [0] * (2 * capacity)
        tree[capacity : capacity + self.size] = weights
        for node in range(capacity - 1, 0, -1):
            tree[node] = tree[2 * node] + tree[2 * node + 1]
        self._tree = tree

    @property
    def total(self) -> int:
        return self._tree[1]

    def weight(self, index: int) -> int:
        return self._tree[self._capacity + index]

    def weights(self) -> np.ndarray:
        start = self._capacity
        return np.array(self._tree[start : start + self.size], dtype=np.int64)

    def add(self, index: int, delta: int) -> None:
        """Add `delta` to the weight of leaf `index`."""
        node = self._capacity + index
        assert self._tree[node] + delta >= 0, "Weights must stay non-negative."
        tree = self._tree
        while node:
            tree[node] += delta
            node //= 2

    def update(self, index: int, weight: int) -> None:
        """Set the weight of leaf `index`."""
        self.add(index, int(weight) - self.weight(index))

    def find(self, value: int) -> int:
        """Return the leaf whose cumulative weight interval contains `value`.

        Args:
            value: Integer in [0, total).
        """
        assert 0 <= value < self.total, f"Value {value} outside [0, {self.total})."
        tree = self._tree
        node = 1
        while node < self._capacity:
            left = 2 * node
            if value < tree[left]:
                node = left
            else:
                value -= tree[left]
                node = left + 1
        return node - self._capacity

    def sample(
        self, rng: np.random.Generator, exclude: Optional[int] = None
    ) -> int:
        """Draw one leaf with probability proportional to its weight.

        Args:
            rng: Seeded numpy generator.
            exclude: Optional leaf that must not be returned.
        """
        if exclude is None:
            return self.find(int(rng.integers(self.total)))

        excluded_weight = self.weight(exclude)
        assert self.total - excluded_weight > 0, "No leaf left to sample from."
        self.add(exclude, -excluded_weight)
        try:
            return self.find(int(rng.integers(self.total)))
        finally:
            self.add(exclude, excluded_weight)
