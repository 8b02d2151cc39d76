"""A small conic-program builder on top of Clarabel.

Supports complex Hermitian PSD blocks (through their real 2n x 2n embedding),
scalar variables, linear inequalities, ``t <= log(affine)`` epigraphs and
Hermitian LMIs. The caller minimises a linear objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import clarabel
import numpy as np
import scipy.sparse as sp

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
NUMERICAL_FAILURE = "numerical_failure"

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class HermitianVar:
    """Real parametrisation of an r x r Hermitian matrix: diag, Re(upper), Im(upper)."""

    offset: int
    r: int

    @property
    def size(self) -> int:
        return self.r * self.r

    @property
    def slice(self) -> slice:
        return slice(self.offset, self.offset + self.size)


@lru_cache(maxsize=64)
def _upper(r: int):
    return np.triu_indices(r, 1)


@lru_cache(maxsize=64)
def hermitian_basis(r: int) -> np.ndarray:
    """Basis matrices B_m with Y = sum_m y_m B_m; shape (r*r, r, r)."""
    iu, ju = _upper(r)
    p = len(iu)
    B = np.zeros((r * r, r, r), dtype=complex)
    B[np.arange(r), np.arange(r), np.arange(r)] = 1.0
    idx = r + np.arange(p)
    B[idx, iu, ju] = 1.0
    B[idx, ju, iu] = 1.0
    idx = r + p + np.arange(p)
    B[idx, iu, ju] = 1j
    B[idx, ju, iu] = -1j
    return B


def hermitian_coeffs(A: np.ndarray) -> np.ndarray:
    """Coefficient vector c with tr(A Y) = c @ y for Hermitian A."""
    r = A.shape[0]
    iu, ju = _upper(r)
    return np.concatenate([A.diagonal().real, 2 * A[iu, ju].real, 2 * A[iu, ju].imag])


def quad_coeffs(c: np.ndarray) -> np.ndarray:
    """Coefficients of c^H Y c for each row of ``c`` (shape (m, r) or (r,))."""
    c = np.atleast_2d(c)
    r = c.shape[1]
    iu, ju = _upper(r)
    cross = c[:, iu] * c[:, ju].conj()  # entries of c c^H above the diagonal
    return np.concatenate([np.abs(c) ** 2, 2 * cross.real, 2 * cross.imag], axis=1)


def to_matrix(y: np.ndarray, r: int) -> np.ndarray:
    iu, ju = _upper(r)
    p = len(iu)
    Y = np.diag(y[:r]).astype(complex)
    Y[iu, ju] = y[r:r + p] + 1j * y[r + p:]
    Y[ju, iu] = y[r:r + p] - 1j * y[r + p:]
    return Y


def from_matrix(Y: np.ndarray) -> np.ndarray:
    r = Y.shape[0]
    iu, ju = _upper(r)
    return np.concatenate([Y.diagonal().real, Y[iu, ju].real, Y[iu, ju].imag])


@lru_cache(maxsize=64)
def _svec_index(n: int):
    # upper triangle in column-major order, as Clarabel's PSDTriangleConeT expects
    cols, rows = np.tril_indices(n)
    scale = np.where(rows == cols, 1.0, _SQRT2)
    return rows, cols, scale


def svec_embedded(F: np.ndarray) -> np.ndarray:
    """svec of the real embedding [[Re F, -Im F], [Im F, Re F]]; F may be batched."""
    m = F.shape[-1]
    R = np.empty(F.shape[:-2] + (2 * m, 2 * m))
    R[..., :m, :m] = F.real
    R[..., m:, m:] = F.real
    R[..., :m, m:] = -F.imag
    R[..., m:, :m] = F.imag
    rows, cols, scale = _svec_index(2 * m)
    return R[..., rows, cols] * scale


@dataclass
class ConicResult:
    status: str
    x: np.ndarray | None
    objective: float
    raw_status: str
    iterations: int
    solve_time: float


class ConicProgram:
    """Accumulates ``s = b - A x`` rows per cone; variables are declared first."""

    def __init__(self):
        self.n = 0
        self._frozen = False
        self._nonneg: list[tuple[np.ndarray, float]] = []
        self._exp: list[tuple[int, np.ndarray, float]] = []
        self._psd: list[tuple[sp.spmatrix, np.ndarray, int]] = []

    # -- variables
    def hermitian(self, r: int) -> HermitianVar:
        self._check_open()
        var = HermitianVar(self.n, r)
        self.n += var.size
        return var

    def scalar(self) -> int:
        self._check_open()
        self.n += 1
        return self.n - 1

    def _check_open(self):
        if self._frozen:
            raise RuntimeError("variables must be declared before constraints")

    def zeros(self) -> np.ndarray:
        self._frozen = True
        return np.zeros(self.n)

    # -- constraints
    def nonneg(self, row: np.ndarray, const: float = 0.0) -> None:
        """row @ x + const >= 0"""
        self._frozen = True
        self._nonneg.append((np.asarray(row, dtype=float), float(const)))

    def log_epigraph(self, t: int, row: np.ndarray, const: float) -> None:
        """x[t] <= log(row @ x + const)"""
        self._frozen = True
        self._exp.append((t, np.asarray(row, dtype=float), float(const)))

    def lmi(self, const: np.ndarray, var: HermitianVar, images: np.ndarray,
            scalar_terms: dict[int, np.ndarray] | None = None) -> None:
        """const + sum_m y_m images[m] + sum_j x_j F_j  is Hermitian PSD.

        ``images`` has one Hermitian matrix per real parameter of ``var``.
        """
        self._frozen = True
        m = const.shape[0]
        dim = m * (2 * m + 1)
        idx = [var.offset + np.arange(var.size)]
        data = [svec_embedded(np.asarray(images))]
        for j, F in (scalar_terms or {}).items():
            idx.append(np.array([j]))
            data.append(svec_embedded(F)[None, :])
        idx = np.concatenate(idx)
        data = -np.concatenate(data).T  # (dim, len(idx))
        rows = np.repeat(np.arange(dim), len(idx))
        A = sp.csr_matrix((data.ravel(), (rows, np.tile(idx, dim))), shape=(dim, self.n))
        A.eliminate_zeros()
        self._psd.append((A, svec_embedded(const), 2 * m))

    def psd(self, var: HermitianVar) -> None:
        r = var.r
        self.lmi(np.zeros((r, r), dtype=complex), var, hermitian_basis(r))

    # -- solve
    def solve(self, c: np.ndarray, tol: float = 1e-9, max_iter: int = 200) -> ConicResult:
        blocks, b, cones = [], [], []
        if self._nonneg:
            rows = np.array([r for r, _ in self._nonneg])
            blocks.append(sp.csr_matrix(-rows))
            b.append(np.array([k for _, k in self._nonneg]))
            cones.append(clarabel.NonnegativeConeT(len(rows)))
        for t, row, const in self._exp:
            A = np.zeros((3, self.n))
            A[0, t] = -1.0
            A[2] = -row
            blocks.append(sp.csr_matrix(A))
            b.append(np.array([0.0, 1.0, const]))
            cones.append(clarabel.ExponentialConeT())
        for A, bb, n in self._psd:
            blocks.append(A)
            b.append(bb)
            cones.append(clarabel.PSDTriangleConeT(n))
        A = sp.vstack(blocks).tocsc()
        settings = clarabel.DefaultSettings()
        settings.verbose = False
        settings.max_iter = max_iter
        settings.tol_gap_abs = tol
        settings.tol_gap_rel = tol
        settings.tol_feas = tol
        solver = clarabel.DefaultSolver(sp.csc_matrix((self.n, self.n)), np.asarray(c, float),
                                        A, np.concatenate(b), cones, settings)
        sol = solver.solve()
        raw = str(sol.status)
        if raw in ("Solved", "AlmostSolved"):
            status = OPTIMAL
        elif "PrimalInfeasible" in raw:
            status = INFEASIBLE
        else:
            status = NUMERICAL_FAILURE
        x = np.array(sol.x) if status == OPTIMAL else None
        return ConicResult(status, x, float(sol.obj_val), raw, int(sol.iterations),
                           float(sol.solve_time))
