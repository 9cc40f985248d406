"""Boundary particle method: boundary-only solves via multiple reciprocity.

The particular solution is replaced by a truncated series of
higher-order homogeneous terms. Each order m is a Hermite expansion in
the order-m chain kernel (L{u_m} = u_(m-1)); because repeated operator
application collapses any order onto the base kernel, every order is
solved with one shared matrix Q, factored once. Orders are solved top
down: the truncation order first (its own tail set to zero), each lower
order subtracting the traces of the already-solved tail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .bkm import (
    BoundaryData,
    assemble_symmetric_system,
    hermite_trace_matrix,
)
from .errors import ConditioningError, ConfigError
from .geometry import NodeSet
from .kernels import RadialKernel
from .operators import OperatorSpec, kernel_value_matrix, source_normal_matrix

#: step for the fallback central-difference gradient of source-term chains
_FD_STEP = 1e-6


@dataclass(frozen=True)
class MrmProblem:
    """Inhomogeneous problem with an analytic operator-power chain.

    `f_chain[j]` evaluates the j-fold operator image of the source term
    (entry 0 is the source term itself); `f_grad_chain` optionally
    supplies the matching gradients for Neumann rows, otherwise central
    differences are used. The chain must reach the truncation order.
    """

    operator: OperatorSpec
    bc: BoundaryData
    f_chain: tuple
    order: int
    f_grad_chain: Optional[tuple] = None

    def __post_init__(self):
        if self.order < 1:
            raise ConfigError(f"truncation order must be >= 1, got {self.order}")
        if len(self.f_chain) < self.order:
            raise ConfigError(
                f"source-term chain has {len(self.f_chain)} entries; "
                f"order {self.order} needs at least {self.order}"
            )
        if self.f_grad_chain is not None and len(self.f_grad_chain) < self.order:
            raise ConfigError("gradient chain shorter than the truncation order")

    def chain_normal_derivative(self, j: int, points, normals) -> np.ndarray:
        pts = np.atleast_2d(points)
        nrm = np.atleast_2d(normals)
        if self.f_grad_chain is not None:
            g = np.asarray(self.f_grad_chain[j](pts), dtype=float)
            return np.einsum("ij,ij->i", g, nrm)
        f = self.f_chain[j]
        plus = np.asarray(f(pts + _FD_STEP * nrm), dtype=float)
        minus = np.asarray(f(pts - _FD_STEP * nrm), dtype=float)
        return (plus - minus) / (2.0 * _FD_STEP)


@dataclass
class QFactorization:
    """Shared collocation matrix with a reusable LU factorization."""

    matrix: np.ndarray
    cond_est: float
    _lu: tuple = field(repr=False, default=None)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return lu_solve(self._lu, rhs)


def assemble_Q(nodes: NodeSet, op: OperatorSpec, u_sharp_0: RadialKernel) -> QFactorization:
    """Assemble the shared matrix (identical to the BKM matrix) and factor it."""
    Q = assemble_symmetric_system(nodes, op, u_sharp_0)
    cond = float(np.linalg.cond(Q))
    if not np.isfinite(cond):
        raise ConditioningError("shared collocation matrix is singular", cond)
    return QFactorization(matrix=Q, cond_est=cond, _lu=lu_factor(Q))


@dataclass
class BpmSolution:
    """Per-order expansion coefficients and the kernel chain they pair with."""

    beta_by_order: list
    kernel_chain: list
    nodes: NodeSet
    cond_est: float

    @property
    def order(self) -> int:
        return len(self.beta_by_order) - 1

    @property
    def tail_magnitude(self) -> float:
        """Max-norm of the top-order coefficients; small means the series settled."""
        return float(np.max(np.abs(self.beta_by_order[-1])))

    def _order_value(self, n: int, points) -> np.ndarray:
        nodes, kern = self.nodes, self.kernel_chain[n]
        beta = self.beta_by_order[n]
        L_D = len(nodes.dirichlet_idx)
        out = kernel_value_matrix(kern, points, nodes.dirichlet_points) @ beta[:L_D]
        if len(nodes.neumann_idx):
            out = out + (
                source_normal_matrix(
                    kern, points, nodes.neumann_points, nodes.neumann_normals
                )
                @ beta[L_D:]
            )
        return out

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(points)
        out = np.zeros(len(pts))
        for n in range(self.order + 1):
            out += self._order_value(n, pts)
        return out


def evaluate_bpm(solution: BpmSolution, x) -> float:
    """Series value at a single point."""
    return float(solution.evaluate(np.asarray(x, dtype=float)[None, :])[0])


def solve_bpm(
    nodes: NodeSet,
    problem: MrmProblem,
    kernel_chain: Sequence[RadialKernel],
    q: Optional[QFactorization] = None,
) -> BpmSolution:
    """Reversal recursion over orders, reusing one factorization of Q.

    Order M is solved against the (M-1)-fold operator image of the
    source term with its particular tail truncated to zero; each lower
    order subtracts the boundary traces of the already-solved higher
    orders, shifted down the kernel chain by the operator powers applied
    to that row block. Order 0 carries the physical boundary data.
    """
    problem.bc.check_counts(nodes)
    M = problem.order
    if len(kernel_chain) < M + 1:
        raise ConfigError(
            f"kernel chain has {len(kernel_chain)} entries; order {M} needs {M + 1}"
        )
    if q is None:
        q = assemble_Q(nodes, problem.operator, kernel_chain[0])

    # trace matrices of every chain kernel; index k maps coefficients of an
    # order-(n+k) expansion to its boundary traces after n operator powers
    trace = [q.matrix] + [hermite_trace_matrix(nodes, kernel_chain[k]) for k in range(1, M + 1)]

    xd, xn = nodes.dirichlet_points, nodes.neumann_points
    nn = nodes.neumann_normals
    L_D, L_N = len(xd), len(xn)

    betas: list = [None] * (M + 1)
    for n in range(M, 0, -1):
        rhs = np.empty(L_D + L_N)
        rhs[:L_D] = np.asarray(problem.f_chain[n - 1](xd), dtype=float)
        if L_N:
            rhs[L_D:] = problem.chain_normal_derivative(n - 1, xn, nn)
        for m in range(n + 1, M + 1):
            rhs -= trace[m - n] @ betas[m]
        betas[n] = q.solve(rhs)

    rhs = np.concatenate([problem.bc.dirichlet_values, problem.bc.neumann_values])
    for m in range(1, M + 1):
        rhs = rhs - trace[m] @ betas[m]
    betas[0] = q.solve(rhs)

    return BpmSolution(
        beta_by_order=betas,
        kernel_chain=list(kernel_chain[: M + 1]),
        nodes=nodes,
        cond_est=q.cond_est,
    )
