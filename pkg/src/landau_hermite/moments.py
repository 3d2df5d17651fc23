"""Moment bookkeeping: normalization, diagonalization, temperatures.

The solver works in the frame where the density has unit mass, zero mean
velocity, and total second moment equal to d (temperature trace d), with the
second-moment matrix diagonal.  This module produces that frame from a raw
Gaussian-mixture description and extracts moment functionals from fluctuation
coefficient vectors.

Coefficient-level formulas (c indexed by multi-index):

    mass defect      c_0
    momentum defect  c_{e_j}
    energy defect    sqrt(2) sum_j c_{2 e_j} + d c_0
    off-diagonal     c_{e_j + e_k},  j != k
    alpha_j          sqrt(2) c_{2 e_j} + c_0   (diagonal temperature excess)

Diagonal temperatures relax as T_j(t) = 1 + (T_j(0) - 1) e^{-4 d t}.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from landau_hermite.basis import BasisTruncation

__all__ = [
    "GaussianComponent",
    "GaussianMixtureSpec",
    "AffineFrame",
    "MomentState",
    "MomentDefects",
    "normalize_distribution",
    "diagonalize_second_moments",
    "rotate_mixture",
    "compute_alpha",
    "admissible_delta",
    "temperature_closed_form",
    "extract_moments",
]


@dataclass
class GaussianComponent:
    weight: float
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        self.mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        self.covariance = np.asarray(self.covariance, dtype=float)
        d = self.mean.size
        if self.covariance.shape != (d, d):
            raise ValueError(f"covariance shape {self.covariance.shape} does not match mean size {d}")
        if self.weight <= 0:
            raise ValueError(f"component weight must be positive, got {self.weight}")
        if np.abs(self.covariance - self.covariance.T).max() > 1e-12:
            raise ValueError("covariance must be symmetric")
        if np.linalg.eigvalsh(self.covariance).min() <= 0:
            raise ValueError("covariance must be positive definite")


@dataclass
class GaussianMixtureSpec:
    """Finite Gaussian mixture sum_i w_i N(m_i, S_i); weights need not sum to 1."""

    components: list[GaussianComponent]

    def __post_init__(self):
        if not self.components:
            raise ValueError("mixture needs at least one component")
        d = self.components[0].mean.size
        for comp in self.components:
            if comp.mean.size != d:
                raise ValueError("mixture components disagree on dimension")

    @property
    def dimension(self) -> int:
        return self.components[0].mean.size

    def mass(self) -> float:
        return float(sum(c.weight for c in self.components))

    def mean_velocity(self) -> np.ndarray:
        return sum(c.weight * c.mean for c in self.components) / self.mass()

    def energy(self) -> float:
        """Kinetic energy (1/2) int f |v|^2 dv about the origin."""
        return 0.5 * float(
            sum(c.weight * (np.trace(c.covariance) + c.mean @ c.mean) for c in self.components)
        )

    def centered_energy(self) -> float:
        v = self.mean_velocity()
        return 0.5 * float(
            sum(c.weight * (np.trace(c.covariance) + (c.mean - v) @ (c.mean - v)) for c in self.components)
        )

    def second_moment(self) -> np.ndarray:
        """int f v (x) v dv (not mass-normalized)."""
        return sum(c.weight * (c.covariance + np.outer(c.mean, c.mean)) for c in self.components)


@dataclass
class AffineFrame:
    """Map from solver coordinates w to original coordinates v = dilation * (rotation @ w) + translation."""

    translation: np.ndarray
    dilation: float
    rotation: np.ndarray

    @classmethod
    def identity(cls, dimension: int) -> "AffineFrame":
        return cls(np.zeros(dimension), 1.0, np.eye(dimension))

    def as_dict(self) -> dict:
        return {
            "translation": [float(x) for x in self.translation],
            "dilation": float(self.dilation),
            "rotation": [[float(x) for x in row] for row in self.rotation],
        }


def normalize_distribution(spec: GaussianMixtureSpec) -> tuple[GaussianMixtureSpec, AffineFrame]:
    """Rescale to unit mass, zero mean velocity, and int f |v|^2 = d.

    Returns the normalized mixture and the affine frame mapping solver
    coordinates back to the original ones.  Degenerate inputs (nonpositive mass
    or centered energy) are rejected.
    """
    d = spec.dimension
    mass = spec.mass()
    if mass <= 0:
        raise ValueError(f"total mass must be positive, got {mass}")
    vbar = spec.mean_velocity()
    e_centered = spec.centered_energy()
    if e_centered <= 0:
        raise ValueError("centered energy must be positive (degenerate distribution)")
    dilation = math.sqrt(2.0 * e_centered / (mass * d))
    comps = [
        GaussianComponent(
            weight=c.weight / mass,
            mean=(c.mean - vbar) / dilation,
            covariance=c.covariance / dilation**2,
        )
        for c in spec.components
    ]
    frame = AffineFrame(translation=vbar, dilation=dilation, rotation=np.eye(d))
    return GaussianMixtureSpec(comps), frame


def diagonalize_second_moments(spec: GaussianMixtureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Rotation diagonalizing the second-moment matrix of a normalized mixture.

    Returns (rotation, T0) with rotation^T S rotation = diag(T0), T0 sorted
    descending and det(rotation) = +1.  Column signs follow the
    first-nonzero-component-positive rule; when that forces det = -1 the last
    column (smallest temperature) is negated instead.  An already diagonal,
    already descending matrix maps to the exact identity.
    """
    d = spec.dimension
    if abs(spec.mass() - 1.0) > 1e-8:
        raise ValueError(f"mixture not normalized: mass {spec.mass()!r}")
    if np.abs(spec.mean_velocity()).max() > 1e-8:
        raise ValueError("mixture not normalized: nonzero mean velocity")
    second = spec.second_moment()
    if abs(np.trace(second) - d) > 1e-8:
        raise ValueError(f"mixture not normalized: second-moment trace {np.trace(second)!r}")

    offdiag = second - np.diag(np.diag(second))
    diag = np.diag(second)
    if np.abs(offdiag).max() <= 1e-14 and np.all(np.diff(diag) <= 0):
        return np.eye(d), diag.copy()

    eigvals, eigvecs = np.linalg.eigh(second)
    order = np.argsort(eigvals)[::-1]
    t0 = eigvals[order]
    rot = eigvecs[:, order]
    for col in range(d):
        nz = np.nonzero(np.abs(rot[:, col]) > 1e-14)[0]
        if nz.size and rot[nz[0], col] < 0:
            rot[:, col] = -rot[:, col]
    if np.linalg.det(rot) < 0:
        rot[:, -1] = -rot[:, -1]
    return rot, t0


def rotate_mixture(spec: GaussianMixtureSpec, rotation: np.ndarray) -> GaussianMixtureSpec:
    """Express the mixture in the rotated frame w = rotation^T v."""
    r = np.asarray(rotation, dtype=float)
    comps = [
        GaussianComponent(c.weight, r.T @ c.mean, r.T @ c.covariance @ r)
        for c in spec.components
    ]
    return GaussianMixtureSpec(comps)


def _diag_pair_indices(basis: BasisTruncation) -> list[int]:
    d = basis.dimension
    return [basis.index_of(tuple(2 if i == j else 0 for i in range(d))) for j in range(d)]


def compute_alpha(basis: BasisTruncation, coeffs: np.ndarray) -> np.ndarray:
    """Diagonal temperature excesses alpha_j = sqrt(2) c_{2 e_j} + c_0.

    Warns when sum_j alpha_j exceeds 1e-10 in magnitude: a normalized setup has
    exactly zero trace excess, and the reduced dynamics assume it.
    """
    if basis.max_degree < 2:
        raise ValueError("alpha extraction needs max_degree >= 2")
    coeffs = np.asarray(coeffs, dtype=float)
    c0 = coeffs[0]
    alpha = np.array([math.sqrt(2.0) * coeffs[i] + c0 for i in _diag_pair_indices(basis)])
    if abs(alpha.sum()) > 1e-10:
        warnings.warn(
            f"sum of alpha is {alpha.sum():.3e}; initial data do not satisfy the "
            "normalized-moment constraints",
            stacklevel=2,
        )
    return alpha


def admissible_delta(alpha: np.ndarray, dimension: int, scale: float = 0.99) -> float | None:
    """Default weight rate: 0.99 * min(1, d - 1 - sup_j |alpha_j|), or None if inadmissible."""
    room = dimension - 1 - float(np.abs(alpha).max()) if len(alpha) else dimension - 1
    if room <= 0:
        return None
    return scale * min(1.0, room)


def temperature_closed_form(t0: np.ndarray, dimension: int, t) -> np.ndarray:
    """Closed-form diagonal temperatures T_j(t) = 1 + (T_j(0) - 1) exp(-4 d t).

    t may be a scalar or an array; an array produces shape (len(t), d).
    """
    t0 = np.asarray(t0, dtype=float)
    if np.any(t0 <= 0):
        raise ValueError("initial temperatures must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be nonnegative")
    decay = np.exp(-4.0 * dimension * t)
    if t.ndim == 0:
        return 1.0 + (t0 - 1.0) * decay
    return 1.0 + np.outer(decay, t0 - 1.0)


@dataclass
class MomentDefects:
    """Deviations of mu + sqrt(mu) g from the normalized-moment constraints."""

    mass: float
    momentum: np.ndarray
    energy: float
    offdiagonal: np.ndarray
    alpha: np.ndarray

    def max_conservation_defect(self) -> float:
        return max(
            abs(self.mass),
            float(np.abs(self.momentum).max()),
            abs(self.energy),
            float(np.abs(self.offdiagonal).max()) if self.offdiagonal.size else 0.0,
        )


def extract_moments(basis: BasisTruncation, coeffs: np.ndarray) -> MomentDefects:
    """Mass/momentum/energy/off-diagonal defects and alpha from coefficients."""
    if basis.max_degree < 2:
        raise ValueError("moment extraction needs max_degree >= 2")
    coeffs = np.asarray(coeffs, dtype=float)
    d = basis.dimension
    c0 = float(coeffs[0])
    momentum = np.array(
        [coeffs[basis.index_of(tuple(1 if i == j else 0 for i in range(d)))] for j in range(d)]
    )
    diag_pairs = np.array([coeffs[i] for i in _diag_pair_indices(basis)])
    energy = math.sqrt(2.0) * float(diag_pairs.sum()) + d * c0
    offdiag = np.zeros((d, d))
    for j in range(d):
        for k in range(j + 1, d):
            idx = tuple(1 if i in (j, k) else 0 for i in range(d))
            offdiag[j, k] = offdiag[k, j] = coeffs[basis.index_of(idx)]
    alpha = math.sqrt(2.0) * diag_pairs + c0
    return MomentDefects(mass=c0, momentum=momentum, energy=energy, offdiagonal=offdiag, alpha=alpha)


@dataclass
class MomentState:
    """Resolved moment data for a run in the solver frame."""

    mass: float
    mean_velocity: np.ndarray
    energy: float
    second_moment: np.ndarray
    temperatures_initial: np.ndarray
    alpha: np.ndarray
    delta: float | None

    @classmethod
    def from_coefficients(
        cls,
        basis: BasisTruncation,
        coeffs: np.ndarray,
        delta_override: float | None = None,
    ) -> "MomentState":
        """Moment state of f = mu + sqrt(mu) g given the fluctuation coefficients."""
        d = basis.dimension
        defects = extract_moments(basis, coeffs)
        second = np.diag(1.0 + defects.alpha) + defects.offdiagonal
        energy = 0.5 * (d + defects.energy)
        if delta_override is not None:
            if not 0.0 < delta_override <= 1.0:
                raise ValueError(f"delta must lie in (0, 1], got {delta_override}")
            if np.abs(defects.alpha).max() > d - 1 - delta_override + 1e-12:
                raise ValueError(
                    f"delta = {delta_override} violates sup|alpha| <= d - 1 - delta "
                    f"(sup|alpha| = {np.abs(defects.alpha).max():.6g})"
                )
            delta = delta_override
        else:
            delta = admissible_delta(defects.alpha, d)
        return cls(
            mass=1.0 + defects.mass,
            mean_velocity=defects.momentum.copy(),
            energy=energy,
            second_moment=second,
            temperatures_initial=1.0 + defects.alpha,
            alpha=defects.alpha.copy(),
            delta=delta,
        )

    def as_dict(self) -> dict:
        return {
            "mass": float(self.mass),
            "mean_velocity": [float(x) for x in self.mean_velocity],
            "energy": float(self.energy),
            "second_moment": [[float(x) for x in row] for row in self.second_moment],
            "temperatures_initial": [float(x) for x in self.temperatures_initial],
            "alpha": [float(x) for x in self.alpha],
            "delta": None if self.delta is None else float(self.delta),
        }
