"""Ladder-operator assembly of the velocity-space operators.

Everything is built from the raising/lowering pair on each axis,

    A_{+,j} = v_j/2 - d/dv_j,   A_{-,j} = v_j/2 + d/dv_j,

which act on the tensor Hermite basis as A_{+,j} Psi_alpha =
sqrt(alpha_j + 1) Psi_{alpha + e_j} and A_{-,j} Psi_alpha =
sqrt(alpha_j) Psi_{alpha - e_j}.  Matrices are Galerkin truncations to
degrees <= N: a raising step out of the top level is dropped, so identities
that consume one raising step hold exactly only on degrees <= N - 1.
Degree-preserving operators (harmonic oscillator, angular momentum squares,
the linearized collision operator) are exact blockwise at every level.

Sign convention for the angular-momentum generator:
L_jk = v_j d_k - v_k d_j = A_{+,j} A_{-,k} - A_{+,k} A_{-,j}, so that
L_12 Psi_(1,0) = -Psi_(0,1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from landau_hermite.basis import BasisTruncation

__all__ = [
    "SparseOperator",
    "build_ladder",
    "build_harmonic",
    "build_angular_momentum",
    "build_laplace_beltrami",
    "build_linearized_landau",
    "level_projector",
    "kernel_basis",
    "collisional_invariants",
    "read_triplets",
]


@dataclass
class SparseOperator:
    """A CSR matrix acting on coefficient vectors, tagged with its basis."""

    basis: BasisTruncation
    matrix: sp.csr_matrix
    symmetric: bool
    name: str = ""

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix)
        self.matrix.sum_duplicates()
        self.matrix.sort_indices()

    @property
    def shape(self):
        return self.matrix.shape

    def dot(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ values

    __matmul__ = dot

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def symmetry_defect(self) -> float:
        """max |M - M^T|; 0 for exactly symmetric assemblies."""
        diff = self.matrix - self.matrix.T
        return 0.0 if diff.nnz == 0 else float(np.abs(diff.data).max())

    def triplet_lines(self) -> list[str]:
        """Plain-text export: header (d, N, symmetry flag), then row col value."""
        m = self.matrix.tocoo()
        lines = [
            f"{self.basis.dimension} {self.basis.max_degree} "
            f"{'symmetric' if self.symmetric else 'general'}"
        ]
        order = np.lexsort((m.col, m.row))
        for i in order:
            if m.data[i] == 0.0:
                continue
            lines.append(f"{m.row[i]} {m.col[i]} {m.data[i]:.17g}")
        return lines

    def export_triplets(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("\n".join(self.triplet_lines()) + "\n")


def read_triplets(path) -> tuple[int, int, bool, sp.csr_matrix]:
    """Read a triplet file back; returns (dimension, max_degree, symmetric, matrix)."""
    with open(path) as fh:
        header = fh.readline().split()
        d, n, flag = int(header[0]), int(header[1]), header[2]
        rows, cols, vals = [], [], []
        for line in fh:
            if not line.strip():
                continue
            r, c, v = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    size = len(BasisTruncation(d, n).ordering)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(size, size))
    return d, n, flag == "symmetric", mat


def _check_axis(basis: BasisTruncation, axis: int) -> None:
    if not 0 <= axis < basis.dimension:
        raise ValueError(f"axis {axis} out of range for dimension {basis.dimension}")


def build_ladder(basis: BasisTruncation, axis: int, sign: str) -> SparseOperator:
    """Raising ('+') or lowering ('-') operator along a 0-based axis."""
    _check_axis(basis, axis)
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    rows, cols, vals = [], [], []
    for col, alpha in enumerate(basis.ordering):
        if sign == "+":
            target = alpha[:axis] + (alpha[axis] + 1,) + alpha[axis + 1 :]
            if sum(target) > basis.max_degree:
                continue
            vals.append(math.sqrt(alpha[axis] + 1))
        else:
            if alpha[axis] == 0:
                continue
            target = alpha[:axis] + (alpha[axis] - 1,) + alpha[axis + 1 :]
            vals.append(math.sqrt(alpha[axis]))
        rows.append(basis.index_of(target))
        cols.append(col)
    n = basis.size
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return SparseOperator(basis, mat, symmetric=False, name=f"A{sign}{axis}")


def build_harmonic(basis: BasisTruncation) -> SparseOperator:
    """Harmonic oscillator -Delta + |v|^2/4, diagonal with entries d/2 + |alpha|."""
    diag = basis.dimension / 2.0 + basis.degrees.astype(float)
    mat = sp.diags(diag, format="csr")
    return SparseOperator(basis, mat, symmetric=True, name="harmonic")


def level_projector(basis: BasisTruncation, k: int) -> sp.csr_matrix:
    """Diagonal 0/1 projector onto the degree-k level."""
    diag = np.zeros(basis.size)
    diag[basis.level_slice(k)] = 1.0
    return sp.diags(diag, format="csr")


def build_angular_momentum(basis: BasisTruncation, j: int, k: int) -> SparseOperator:
    """Rotation generator L_jk = v_j d_k - v_k d_j (degree preserving, antisymmetric)."""
    _check_axis(basis, j)
    _check_axis(basis, k)
    if j == k:
        raise ValueError("angular momentum axes must differ")
    apj = build_ladder(basis, j, "+").matrix
    amk = build_ladder(basis, k, "-").matrix
    apk = build_ladder(basis, k, "+").matrix
    amj = build_ladder(basis, j, "-").matrix
    mat = apj @ amk - apk @ amj
    return SparseOperator(basis, mat, symmetric=False, name=f"L{j}{k}")


# Deliberate-defect seam for negative-control testing: the verification suite
# flips this to -1.0 to confirm the checks actually catch a broken assembly.
_spherical_sign = 1.0


def build_laplace_beltrami(basis: BasisTruncation) -> SparseOperator:
    """Spherical Laplacian (1/2) sum_{j != k} L_jk^2 = sum_{j < k} L_jk^2.

    Negative semidefinite; block diagonal over degree levels, so the truncated
    assembly is exact at every level.  On the l-harmonics of a level it acts as
    -l(l + d - 2).
    """
    d = basis.dimension
    n = basis.size
    mat = sp.csr_matrix((n, n))
    for j in range(d):
        for k in range(j + 1, d):
            ljk = build_angular_momentum(basis, j, k).matrix
            mat = mat + ljk @ ljk
    op = SparseOperator(basis, _spherical_sign * mat, symmetric=True, name="laplace_beltrami")
    op.matrix.eliminate_zeros()
    return op


def build_linearized_landau(basis: BasisTruncation) -> SparseOperator:
    """Linearized Maxwellian-molecule collision operator on fluctuations.

    With H the harmonic oscillator, D_S the spherical Laplacian, and P_1, P_2
    the projectors onto degree levels 1 and 2:

        L = (d-1)(H - d/2) - D_S + [D_S - (d-1)(H - d/2)] P_1
                                 + [-D_S - (d-1)(H - d/2)] P_2

    Symmetric positive semidefinite; its kernel is spanned by the d + 2
    collisional invariants (see :func:`collisional_invariants`).  On level 2 it
    reduces to -2 D_S; on levels k >= 3 it is (d-1)k - D_S.
    """
    if basis.max_degree < 2:
        raise ValueError("linearized collision operator needs max_degree >= 2 (level-2 projector)")
    d = basis.dimension
    ident = sp.identity(basis.size, format="csr")
    shifted = build_harmonic(basis).matrix - (d / 2.0) * ident
    ds = build_laplace_beltrami(basis).matrix
    core = (d - 1) * shifted - ds
    p1 = level_projector(basis, 1)
    p2 = level_projector(basis, 2)
    mat = core + (ds - (d - 1) * shifted) @ p1 + (-ds - (d - 1) * shifted) @ p2
    op = SparseOperator(basis, mat, symmetric=True, name="linearized_landau")
    op.matrix.eliminate_zeros()
    return op


def collisional_invariants(basis: BasisTruncation) -> np.ndarray:
    """Orthonormal coefficient vectors spanning the collision kernel.

    Columns: sqrt(mu), v_j sqrt(mu) for each axis, and the energy direction
    (|v|^2 - d) sqrt(mu) which is proportional to sum_j Psi_{2 e_j}.
    Shape (size, d + 2).
    """
    if basis.max_degree < 2:
        raise ValueError("collisional invariants need max_degree >= 2")
    d = basis.dimension
    cols = [basis.unit((0,) * d)]
    for j in range(d):
        e_j = tuple(1 if i == j else 0 for i in range(d))
        cols.append(basis.unit(e_j))
    energy = np.zeros(basis.size)
    for j in range(d):
        two_e_j = tuple(2 if i == j else 0 for i in range(d))
        energy[basis.index_of(two_e_j)] = 1.0 / math.sqrt(d)
    cols.append(energy)
    return np.column_stack(cols)


def kernel_basis(op: SparseOperator, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal kernel vectors of a symmetric operator via dense eigh.

    Returns (vectors, eigenvalues) where vectors has one column per eigenvalue
    below tol.  Residual norms ||A w - lambda w|| are checked; a residual above
    1e-8 is reported as eigensolver failure.
    """
    if not op.symmetric:
        raise ValueError("kernel_basis expects a symmetric operator")
    dense = op.to_dense()
    try:
        eigvals, eigvecs = scipy.linalg.eigh(dense)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - not seen in practice
        raise RuntimeError(f"eigensolver failed on {op.name}: {exc}") from exc
    resid = np.linalg.norm(dense @ eigvecs - eigvecs * eigvals, axis=0)
    worst = float(resid.max()) if resid.size else 0.0
    if worst > 1e-8:
        raise RuntimeError(f"eigensolver residual {worst:.3e} on {op.name} exceeds 1e-8")
    mask = eigvals < tol
    return eigvecs[:, mask], eigvals[mask]
