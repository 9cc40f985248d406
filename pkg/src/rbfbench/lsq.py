"""Overdetermined RBF collocation solved in the least-squares sense.

Source and field node sets need not coincide: each field node
contributes one row (governing equation or boundary condition), each
source node one expansion column. Two solution paths are provided: the
literal normal equations, and an orthogonal-factorization solve that is
the numerically preferred default because forming G^T G squares the
condition number.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import lstsq

from .bkm import BoundaryData
from .errors import RankError, ShapeError
from .geometry import NodeSet
from .kernels import RadialKernel
from .operators import (
    OperatorSpec,
    adjoint_image_matrix,
    adjoint_normal_image_matrix,
    field_normal_matrix,
    kernel_value_matrix,
    ll_star_matrix,
    operator_image_matrix,
)

SCHEMES = ("kansa_like", "mkm_like")


@dataclass(frozen=True)
class OverdeterminedSystem:
    """Tall collocation system G beta = b with M rows over N sources."""

    G: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        M, N = self.G.shape
        if M < N or N < 1:
            raise ShapeError(f"system is {M}x{N}; need at least as many rows as columns")
        if not (np.all(np.isfinite(self.G)) and np.all(np.isfinite(self.b))):
            raise ValueError("system entries must be finite")

    @property
    def field_count(self) -> int:
        return self.G.shape[0]

    @property
    def source_count(self) -> int:
        return self.G.shape[1]


def assemble_overdetermined(
    source_points: np.ndarray,
    field_nodes: NodeSet,
    op: OperatorSpec,
    bc: BoundaryData,
    f: Callable,
    psi: RadialKernel,
    scheme: str = "kansa_like",
) -> OverdeterminedSystem:
    """Collocate the expansion over the sources at every field node.

    `kansa_like` uses plain kernel columns; `mkm_like` uses
    adjoint-operator images of the kernel as the expansion basis. Rows
    are ordered [field interior | field Dirichlet | field Neumann] and
    carry unit weights.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    bc.check_counts(field_nodes)
    src = np.atleast_2d(np.asarray(source_points, dtype=float))
    xi = field_nodes.interior
    xd, xn = field_nodes.dirichlet_points, field_nodes.neumann_points
    nn = field_nodes.neumann_normals

    if scheme == "kansa_like":
        governing = operator_image_matrix(op, psi, xi, src) if len(xi) else None
        value = kernel_value_matrix(psi, xd, src)
        normal = field_normal_matrix(psi, xn, src, nn) if len(xn) else None
    else:
        governing = ll_star_matrix(op, psi, xi, src) if len(xi) else None
        value = adjoint_image_matrix(op, psi, xd, src)
        normal = adjoint_normal_image_matrix(op, psi, xn, src, nn) if len(xn) else None

    blocks = [blk for blk in (governing, value, normal) if blk is not None]
    G = np.vstack(blocks)
    b = np.concatenate(
        [
            np.asarray(f(xi), dtype=float) if len(xi) else np.empty(0),
            bc.dirichlet_values,
            bc.neumann_values,
        ]
    )
    return OverdeterminedSystem(G=G, b=b)


@dataclass
class LeastSquaresResult:
    beta: np.ndarray
    sigma: float  # sum of squared row residuals
    rank_deficient: bool
    cond_est: float


def residual_sigma(system: OverdeterminedSystem, beta: np.ndarray) -> float:
    """Sum of squared row residuals of a candidate solution."""
    res = system.G @ beta - system.b
    return float(res @ res)


def solve_least_squares(
    system: OverdeterminedSystem, method: str = "orthogonal"
) -> LeastSquaresResult:
    """Minimize the squared residual over the expansion coefficients.

    `normal_equations` forms G^T G and solves it directly; it refuses
    rank-deficient systems. `orthogonal` factorizes G itself and falls
    back to the minimum-norm solution (flagged) when rank drops.
    """
    G, b = system.G, system.b
    if method == "normal_equations":
        Ghat = G.T @ G
        bhat = G.T @ b
        cond = float(np.linalg.cond(Ghat))
        if not np.isfinite(cond) or cond > 1e14:
            raise RankError(
                f"normal equations are rank deficient (condition {cond:.3e})"
            )
        beta = np.linalg.solve(Ghat, bhat)
        return LeastSquaresResult(
            beta=beta,
            sigma=residual_sigma(system, beta),
            rank_deficient=False,
            cond_est=cond,
        )
    if method == "orthogonal":
        beta, _, rank, _ = lstsq(G, b)
        return LeastSquaresResult(
            beta=beta,
            sigma=residual_sigma(system, beta),
            rank_deficient=rank < system.source_count,
            cond_est=float(np.linalg.cond(G)),
        )
    raise ValueError(f"method must be 'normal_equations' or 'orthogonal', got {method!r}")
