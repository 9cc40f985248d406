"""Symmetric boundary knot method, indirect and direct variants.

The field splits into a particular part (an RBF fit of the source term
over all nodes) and a homogeneous part expanded in a nonsingular
general solution of the operator. The homogeneous expansion is Hermite:
Dirichlet boundary nodes contribute plain kernel columns, Neumann nodes
contribute source-normal derivative columns with a sign that makes the
collocation matrix exactly symmetric. Interior nodes never enter the
boundary solve; interior values are explicit evaluations afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConditioningError, InvalidKernelError
from .geometry import NodeSet
from .kernels import RadialKernel
from .operators import (
    OperatorSpec,
    field_normal_matrix,
    homogeneous_residual,
    kernel_value_matrix,
    mixed_normal_matrix,
    operator_image_matrix,
    source_normal_matrix,
)

#: solves refuse matrices beyond this condition estimate
CONDITION_LIMIT = 1e14

#: residual ceiling for accepting a kernel as a homogeneous solution
GENERAL_SOLUTION_TOL = 1e-4


@dataclass(frozen=True)
class BoundaryData:
    """Prescribed boundary values: R on the Dirichlet part, N on the Neumann part."""

    dirichlet_values: np.ndarray
    neumann_values: np.ndarray

    @staticmethod
    def from_callables(nodes: NodeSet, value: Callable, gradient: Callable) -> "BoundaryData":
        """Sample Dirichlet values and Neumann normal derivatives of a field."""
        xd, xn = nodes.dirichlet_points, nodes.neumann_points
        r = np.asarray(value(xd), dtype=float)
        if len(xn):
            g = np.asarray(gradient(xn), dtype=float)
            n = np.einsum("ij,ij->i", g, nodes.neumann_normals)
        else:
            n = np.empty(0)
        return BoundaryData(r, n)

    def check_counts(self, nodes: NodeSet):
        if len(self.dirichlet_values) != len(nodes.dirichlet_idx):
            raise ValueError("Dirichlet value count does not match partition")
        if len(self.neumann_values) != len(nodes.neumann_idx):
            raise ValueError("Neumann value count does not match partition")


@dataclass(frozen=True)
class RecoveredTraces:
    """Complementary boundary traces from the direct solve.

    Normal derivatives at Dirichlet nodes and field values at Neumann
    nodes, in partition order.
    """

    neumann_at_dirichlet: np.ndarray
    dirichlet_at_neumann: np.ndarray
    cond_est: float


def _checked_solve(A: np.ndarray, rhs: np.ndarray, what: str) -> tuple[np.ndarray, float]:
    """Dense solve that reports its condition estimate.

    Ill-conditioning is reported, not refused: global RBF matrices
    routinely pass 1e16 while the collocated field stays accurate.
    Only genuinely singular systems raise.
    """
    cond = float(np.linalg.cond(A))
    try:
        x = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        raise ConditioningError(f"{what} matrix is singular", cond)
    if not np.all(np.isfinite(x)) or not np.isfinite(cond):
        raise ConditioningError(f"{what} solve produced non-finite values", cond)
    return x, cond


@dataclass
class ParticularFit:
    """RBF fit of the source term: coefficients and evaluators."""

    alpha: np.ndarray
    centers: np.ndarray
    kernel: RadialKernel
    cond_est: float

    def value(self, points) -> np.ndarray:
        return kernel_value_matrix(self.kernel, points, self.centers) @ self.alpha

    def normal_derivative(self, points, normals) -> np.ndarray:
        return (
            field_normal_matrix(self.kernel, points, self.centers, normals)
            @ self.alpha
        )


def fit_particular(
    nodes: NodeSet, f_samples, op: OperatorSpec, phi: RadialKernel
) -> ParticularFit:
    """Fit coefficients so the kernel expansion satisfies L{u_p} = f at all nodes.

    The interpolation matrix carries L{phi} entries; the fitted expansion
    itself sums plain phi terms, so L applied to it reproduces f at the
    nodes by construction.
    """
    centers = nodes.all_points()
    f = np.asarray(f_samples, dtype=float)
    if len(f) != len(centers):
        raise ValueError(f"expected {len(centers)} source samples, got {len(f)}")
    A = operator_image_matrix(op, phi, centers, centers)
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise ConditioningError("particular-solution fit matrix is too ill-conditioned", cond)
    alpha = np.linalg.solve(A, f)
    return ParticularFit(alpha=alpha, centers=centers, kernel=phi, cond_est=cond)


def hermite_trace_matrix(nodes: NodeSet, kernel: RadialKernel) -> np.ndarray:
    """Boundary collocation matrix of the Hermite expansion.

    Rows: field values at Dirichlet nodes, then field-normal derivatives
    at Neumann nodes. Columns: kernel sources at Dirichlet nodes, then
    source-normal derivative sources at Neumann nodes. Symmetric for any
    radial kernel.
    """
    xd, xn = nodes.dirichlet_points, nodes.neumann_points
    nn = nodes.neumann_normals
    L_D, L_N = len(xd), len(xn)
    A = np.empty((L_D + L_N, L_D + L_N))
    A[:L_D, :L_D] = kernel_value_matrix(kernel, xd, xd)
    if L_N:
        A[:L_D, L_D:] = source_normal_matrix(kernel, xd, xn, nn)
        A[L_D:, :L_D] = field_normal_matrix(kernel, xn, xd, nn)
        A[L_D:, L_D:] = mixed_normal_matrix(kernel, xn, xn, nn, nn)
    return A


def complementary_trace_matrix(nodes: NodeSet, kernel: RadialKernel) -> np.ndarray:
    """Swapped traces: normal derivatives at Dirichlet nodes, values at Neumann nodes."""
    xd, xn = nodes.dirichlet_points, nodes.neumann_points
    nd, nn = nodes.dirichlet_normals, nodes.neumann_normals
    L_D, L_N = len(xd), len(xn)
    B = np.empty((L_D + L_N, L_D + L_N))
    B[:L_D, :L_D] = field_normal_matrix(kernel, xd, xd, nd)
    if L_N:
        B[:L_D, L_D:] = mixed_normal_matrix(kernel, xd, xn, nd, nn)
        B[L_D:, :L_D] = kernel_value_matrix(kernel, xn, xd)
        B[L_D:, L_D:] = source_normal_matrix(kernel, xn, xn, nn)
    return B


def assemble_symmetric_system(
    nodes: NodeSet, op: OperatorSpec, u_sharp: RadialKernel
) -> np.ndarray:
    """Validate the kernel against the operator, then build the trace matrix."""
    res = homogeneous_residual(op, u_sharp)
    if res > GENERAL_SOLUTION_TOL:
        raise InvalidKernelError(
            f"kernel {u_sharp.name} is not a homogeneous solution of "
            f"{op.kind} (residual {res:.2e})"
        )
    return hermite_trace_matrix(nodes, u_sharp)


@dataclass
class BkmSolution:
    """Expansion coefficients plus evaluators over the closed domain."""

    alpha: np.ndarray
    lam: np.ndarray
    phi: Optional[RadialKernel]
    u_sharp: RadialKernel
    nodes: NodeSet
    particular: Optional[ParticularFit]
    interior_values: np.ndarray
    cond_est: float

    def homogeneous_value(self, points) -> np.ndarray:
        nodes = self.nodes
        L_D = len(nodes.dirichlet_idx)
        out = kernel_value_matrix(self.u_sharp, points, nodes.dirichlet_points) @ self.lam[:L_D]
        if len(nodes.neumann_idx):
            out = out + (
                source_normal_matrix(
                    self.u_sharp, points, nodes.neumann_points, nodes.neumann_normals
                )
                @ self.lam[L_D:]
            )
        return out

    def homogeneous_normal_derivative(self, points, normals) -> np.ndarray:
        nodes = self.nodes
        L_D = len(nodes.dirichlet_idx)
        out = (
            field_normal_matrix(self.u_sharp, points, nodes.dirichlet_points, normals)
            @ self.lam[:L_D]
        )
        if len(nodes.neumann_idx):
            out = out + (
                mixed_normal_matrix(
                    self.u_sharp,
                    points,
                    nodes.neumann_points,
                    normals,
                    nodes.neumann_normals,
                )
                @ self.lam[L_D:]
            )
        return out

    def evaluate(self, points) -> np.ndarray:
        out = self.homogeneous_value(points)
        if self.particular is not None:
            out = out + self.particular.value(points)
        return out

    def normal_derivative(self, points, normals) -> np.ndarray:
        out = self.homogeneous_normal_derivative(points, normals)
        if self.particular is not None:
            out = out + self.particular.normal_derivative(points, normals)
        return out


def boundary_rhs(
    nodes: NodeSet, bc: BoundaryData, particular: Optional[ParticularFit] = None
) -> np.ndarray:
    """Right-hand side for the symmetric system: boundary data minus
    particular-solution traces (value rows first, then normal rows)."""
    rhs = np.concatenate([bc.dirichlet_values, bc.neumann_values])
    if particular is not None:
        L_D = len(nodes.dirichlet_idx)
        rhs = rhs.copy()
        rhs[:L_D] -= particular.value(nodes.dirichlet_points)
        if len(nodes.neumann_idx):
            rhs[L_D:] -= particular.normal_derivative(
                nodes.neumann_points, nodes.neumann_normals
            )
    return rhs


def _maybe_fit_particular(
    nodes: NodeSet, f_samples, op: OperatorSpec, phi: Optional[RadialKernel]
) -> Optional[ParticularFit]:
    # Homogeneous problems bypass the fit entirely; no interior nodes needed.
    if f_samples is None:
        return None
    f = np.asarray(f_samples, dtype=float)
    if not np.any(f):
        return None
    if phi is None:
        raise ValueError("inhomogeneous problem needs a fitting kernel phi")
    return fit_particular(nodes, f, op, phi)


def solve_indirect(
    nodes: NodeSet,
    op: OperatorSpec,
    bc: BoundaryData,
    f_samples,
    phi: Optional[RadialKernel],
    u_sharp: RadialKernel,
) -> BkmSolution:
    """Two-step solve: boundary expansion coefficients, then interior values."""
    bc.check_counts(nodes)
    particular = _maybe_fit_particular(nodes, f_samples, op, phi)
    A = assemble_symmetric_system(nodes, op, u_sharp)
    rhs = boundary_rhs(nodes, bc, particular)
    lam, cond = _checked_solve(A, rhs, "boundary knot")

    n_total = nodes.n_interior + nodes.n_boundary
    alpha = particular.alpha if particular is not None else np.zeros(n_total)

    solution = BkmSolution(
        alpha=alpha,
        lam=lam,
        phi=phi,
        u_sharp=u_sharp,
        nodes=nodes,
        particular=particular,
        interior_values=np.empty(0),
        cond_est=cond,
    )
    if nodes.n_interior:
        solution.interior_values = solution.evaluate(nodes.interior)
    return solution


def solve_direct(
    nodes: NodeSet,
    op: OperatorSpec,
    bc: BoundaryData,
    f_samples,
    phi: Optional[RadialKernel],
    u_sharp: RadialKernel,
) -> RecoveredTraces:
    """Recover the complementary boundary traces without exposing coefficients.

    Solves the same symmetric system for the prescribed data, then maps
    the coefficients through the swapped trace matrix; particular-solution
    traces shift both sides when the problem is inhomogeneous.
    """
    bc.check_counts(nodes)
    particular = _maybe_fit_particular(nodes, f_samples, op, phi)
    A = assemble_symmetric_system(nodes, op, u_sharp)
    B = complementary_trace_matrix(nodes, u_sharp)
    rhs = boundary_rhs(nodes, bc, particular)
    lam, cond = _checked_solve(A, rhs, "boundary knot")
    traces = B @ lam
    L_D = len(nodes.dirichlet_idx)
    if particular is not None:
        traces[:L_D] += particular.normal_derivative(
            nodes.dirichlet_points, nodes.dirichlet_normals
        )
        if len(nodes.neumann_idx):
            traces[L_D:] += particular.value(nodes.neumann_points)
    return RecoveredTraces(
        neumann_at_dirichlet=traces[:L_D],
        dirichlet_at_neumann=traces[L_D:],
        cond_est=cond,
    )
