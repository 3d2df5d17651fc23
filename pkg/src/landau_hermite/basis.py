"""Truncated tensor Hermite basis for velocity-space fluctuations.

The one-dimensional basis functions are the rescaled Hermite functions
psi_n(x) = 2^(-1/4) phi_n(x / sqrt(2)), orthonormal in L2(dx), with ground state
psi_0(x) = (2*pi)^(-1/4) exp(-x^2/4) so that psi_0^2 is the standard Gaussian
density.  In dimension d the tensor functions Psi_alpha(v) = prod_j psi_alpha_j(v_j)
are indexed by multi-indices alpha (plain tuples of ints here), and Psi_0 is the
square root of the Maxwellian mu_d.

A coefficient vector ("CoeffVector" throughout the package) is a plain float64
numpy array whose entries follow the graded lexicographic ordering fixed by
:class:`BasisTruncation`: total degree ascending, ties broken lexicographically
ascending on the tuple.  Degree levels therefore occupy contiguous slices.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["BasisTruncation", "enumerate_basis"]


def _degree_indices(dimension: int, degree: int) -> list[tuple[int, ...]]:
    """Multi-indices of the given total degree, lexicographically ascending."""
    if dimension == 1:
        return [(degree,)]
    out = []
    for first in range(degree + 1):
        for rest in _degree_indices(dimension - 1, degree - first):
            out.append((first,) + rest)
    return out


class BasisTruncation:
    """All multi-indices with |alpha| <= max_degree in graded-lex order."""

    def __init__(self, dimension: int, max_degree: int):
        if dimension < 2:
            raise ValueError(f"dimension must be >= 2, got {dimension}")
        if max_degree < 0:
            raise ValueError(f"max_degree must be >= 0, got {max_degree}")
        self.dimension = dimension
        self.max_degree = max_degree
        ordering: list[tuple[int, ...]] = []
        offsets = [0]
        for k in range(max_degree + 1):
            ordering.extend(_degree_indices(dimension, k))
            offsets.append(len(ordering))
        self.ordering = tuple(ordering)
        self._offsets = tuple(offsets)
        self._position = {alpha: i for i, alpha in enumerate(ordering)}
        self.degrees = np.array([sum(a) for a in ordering], dtype=np.int64)

    @property
    def size(self) -> int:
        return len(self.ordering)

    def __len__(self) -> int:
        return len(self.ordering)

    def __repr__(self) -> str:
        return f"BasisTruncation(dimension={self.dimension}, max_degree={self.max_degree})"

    def index_of(self, alpha) -> int:
        """Position of the multi-index alpha in the ordering."""
        try:
            return self._position[tuple(alpha)]
        except KeyError:
            raise KeyError(f"multi-index {tuple(alpha)} outside truncation") from None

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self._position

    def level_slice(self, k: int) -> slice:
        """Contiguous slice holding the degree-k level."""
        if not 0 <= k <= self.max_degree:
            raise ValueError(f"level {k} outside [0, {self.max_degree}]")
        return slice(self._offsets[k], self._offsets[k + 1])

    def level_count(self, k: int) -> int:
        sl = self.level_slice(k)
        return sl.stop - sl.start

    def unit(self, alpha) -> np.ndarray:
        """Coefficient vector of the single basis function Psi_alpha."""
        c = np.zeros(self.size)
        c[self.index_of(alpha)] = 1.0
        return c

    def _check(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.size,):
            raise ValueError(f"coefficient vector has shape {values.shape}, expected ({self.size},)")
        return values

    def project_level(self, values: np.ndarray, k: int) -> np.ndarray:
        """Orthogonal projection onto the degree-k level (a fresh array)."""
        values = self._check(values)
        out = np.zeros_like(values)
        sl = self.level_slice(k)
        out[sl] = values[sl]
        return out

    def project_cumulative(self, values: np.ndarray, n: int) -> np.ndarray:
        """Projection onto all degrees <= n."""
        if not 0 <= n <= self.max_degree:
            raise ValueError(f"cutoff {n} outside [0, {self.max_degree}]")
        values = self._check(values)
        out = np.zeros_like(values)
        out[: self._offsets[n + 1]] = values[: self._offsets[n + 1]]
        return out

    def level_norms(self, values: np.ndarray) -> np.ndarray:
        """Euclidean norm of each degree level, shape (max_degree + 1,)."""
        values = self._check(values)
        return np.array(
            [math.sqrt(float(np.sum(values[self.level_slice(k)] ** 2))) for k in range(self.max_degree + 1)]
        )

    def ordering_as_lists(self) -> list[list[int]]:
        """Ordering serialized for run manifests."""
        return [list(a) for a in self.ordering]


def enumerate_basis(dimension: int, max_degree: int) -> BasisTruncation:
    """Construct the graded-lex basis truncation for the given size."""
    return BasisTruncation(dimension, max_degree)
