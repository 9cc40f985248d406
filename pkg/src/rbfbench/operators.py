"""Governing operators applied analytically to radial kernels.

Supported operators have the form L = D*Lap + gamma - v.grad with
constant coefficients: the 2D Laplacian (D=1, gamma=0), Helmholtz
(gamma=+k^2), modified Helmholtz (gamma=-k^2) and convection-diffusion
(D, velocity v). The adjoint-sign variant L* flips the velocity.

Besides the scalar operations, this module provides vectorized pairwise
matrix builders used by every collocation scheme: kernel values,
field/source normal derivatives, the mixed two-normal derivative, and
operator images up to L L* (which needs third and fourth radial
derivatives). Coincident field/source pairs (r below 1e-8) are patched
with the analytic limits; for smooth radial kernels the gradient at the
origin is the zero vector and the Laplacian limit is 2*phi''(0).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import KernelSmoothnessError, ParameterError, SingularityError
from .kernels import RadialKernel

#: below this separation a field/source pair is treated as coincident
COINCIDENT_TOL = 1e-8

OPERATOR_KINDS = (
    "laplace_2d",
    "helmholtz_2d",
    "mod_helmholtz_2d",
    "convection_diffusion_2d",
)


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    k: float = 0.0
    diffusivity: float = 1.0
    velocity: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise ParameterError(f"unknown operator kind {self.kind!r}")
        if self.kind in ("helmholtz_2d", "mod_helmholtz_2d") and self.k <= 0:
            raise ParameterError(f"wavenumber k must be positive, got {self.k}")
        if self.kind == "convection_diffusion_2d":
            if self.diffusivity <= 0:
                raise ParameterError(
                    f"diffusivity must be positive, got {self.diffusivity}"
                )
            if not np.all(np.isfinite(self.velocity)):
                raise ParameterError(f"velocity must be finite, got {self.velocity}")

    @property
    def reaction(self) -> float:
        """Constant term gamma in L = D*Lap + gamma - v.grad."""
        if self.kind == "helmholtz_2d":
            return self.k * self.k
        if self.kind == "mod_helmholtz_2d":
            return -self.k * self.k
        return 0.0

    @property
    def diff_coeff(self) -> float:
        return self.diffusivity if self.kind == "convection_diffusion_2d" else 1.0

    @property
    def velocity_vec(self) -> np.ndarray:
        if self.kind == "convection_diffusion_2d":
            return np.asarray(self.velocity, dtype=float)
        return np.zeros(2)

    @property
    def is_self_adjoint(self) -> bool:
        return np.all(self.velocity_vec == 0.0)


def laplace() -> OperatorSpec:
    return OperatorSpec("laplace_2d")


def helmholtz(k: float) -> OperatorSpec:
    return OperatorSpec("helmholtz_2d", k=k)


def mod_helmholtz(k: float) -> OperatorSpec:
    return OperatorSpec("mod_helmholtz_2d", k=k)


def convection_diffusion(diffusivity: float, velocity) -> OperatorSpec:
    return OperatorSpec(
        "convection_diffusion_2d",
        diffusivity=diffusivity,
        velocity=(float(velocity[0]), float(velocity[1])),
    )


def adjoint_of(op: OperatorSpec) -> OperatorSpec:
    """Formal adjoint: odd-order derivative terms change sign."""
    if op.kind == "convection_diffusion_2d":
        v = op.velocity
        return replace(op, velocity=(-v[0], -v[1]))
    return op


# ---------------------------------------------------------------------------
# pairwise plumbing
# ---------------------------------------------------------------------------


def _pairwise(X: np.ndarray, Y: np.ndarray):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    d = X[:, None, :] - Y[None, :, :]
    r = np.sqrt(np.einsum("ijk,ijk->ij", d, d))
    return d, r


def _masked_radius(kernel: RadialKernel, r: np.ndarray, what: str):
    """Return (safe_r, coincident_mask); refuse poles of singular kernels."""
    z = r < COINCIDENT_TOL
    if kernel.singular_at_origin and np.any(z):
        raise SingularityError(
            f"{what}: coincident points hit the pole of kernel {kernel.name}"
        )
    return np.where(z, 1.0, r), z


def kernel_value_matrix(kernel: RadialKernel, X, Y) -> np.ndarray:
    """phi(|x_i - y_j|)."""
    _, r = _pairwise(X, Y)
    if kernel.singular_at_origin and np.any(r == 0.0):
        raise SingularityError(f"kernel {kernel.name} evaluated at its pole")
    return kernel.phi(r)


def field_normal_matrix(kernel: RadialKernel, X, Y, normals_X) -> np.ndarray:
    """Directional derivative at the field point: phi'(r) (d.n_i)/r."""
    d, r = _pairwise(X, Y)
    nX = np.atleast_2d(np.asarray(normals_X, dtype=float))
    rs, z = _masked_radius(kernel, r, "field normal derivative")
    proj = np.einsum("ijk,ik->ij", d, nX)
    out = kernel.d1(rs) * proj / rs
    out[z] = 0.0
    return out

def source_normal_matrix(kernel: RadialKernel, X, Y, normals_Y) -> np.ndarray:
    """Directional derivative at the source point: -phi'(r) (d.n_j)/r."""
    d, r = _pairwise(X, Y)
    nY = np.atleast_2d(np.asarray(normals_Y, dtype=float))
    rs, z = _masked_radius(kernel, r, "source normal derivative")
    proj = np.einsum("ijk,jk->ij", d, nY)
    out = -kernel.d1(rs) * proj / rs
    out[z] = 0.0
    return out


def mixed_normal_matrix(kernel: RadialKernel, X, Y, normals_X, normals_Y) -> np.ndarray:
    """Field-normal derivative of the source-normal derivative.

    Symmetric under the simultaneous swap (x, n_x) <-> (y, n_y); the
    coincident limit is -phi''(0) (n_x . n_y).
    """
    d, r = _pairwise(X, Y)
    nX = np.atleast_2d(np.asarray(normals_X, dtype=float))
    nY = np.atleast_2d(np.asarray(normals_Y, dtype=float))
    rs, z = _masked_radius(kernel, r, "mixed normal derivative")
    px = np.einsum("ijk,ik->ij", d, nX)
    py = np.einsum("ijk,jk->ij", d, nY)
    nn = nX @ nY.T
    d1, d2 = kernel.d1(rs), kernel.d2(rs)
    out = -(d2 * py * px / rs**2 + d1 * (nn / rs - py * px / rs**3))
    if np.any(z):
        out[z] = (-kernel.d2(0.0) * nn)[z]
    return out


def operator_image_matrix(op: OperatorSpec, kernel: RadialKernel, X, Y) -> np.ndarray:
    """L applied in the field variable: D*(phi'' + phi'/r) + gamma*phi - phi' (v.d)/r."""
    d, r = _pairwise(X, Y)
    rs, z = _masked_radius(kernel, r, "operator image")
    d1, d2 = kernel.d1(rs), kernel.d2(rs)
    D, gamma, v = op.diff_coeff, op.reaction, op.velocity_vec
    out = D * (d2 + d1 / rs) + gamma * kernel.phi(rs)
    if np.any(v):
        out -= d1 * (d @ v) / rs
    if np.any(z):
        out[z] = 2.0 * D * kernel.d2(0.0) + gamma * kernel.phi(0.0)
    return out


def adjoint_image_matrix(op: OperatorSpec, kernel: RadialKernel, X, Y) -> np.ndarray:
    """L* applied in the field variable (the Hermite trial basis)."""
    return operator_image_matrix(adjoint_of(op), kernel, X, Y)


def _lap_derivative(kernel: RadialKernel, rs: np.ndarray) -> np.ndarray:
    # radial derivative of Lap(phi): phi''' + phi''/r - phi'/r^2
    return kernel.d3(rs) + kernel.d2(rs) / rs - kernel.d1(rs) / rs**2


def operator_source_normal_matrix(
    op: OperatorSpec, kernel: RadialKernel, X, Y, normals_Y
) -> np.ndarray:
    """L (field) applied to the source-normal basis column."""
    _require_fourth_order(kernel, third_only=True)
    d, r = _pairwise(X, Y)
    nY = np.atleast_2d(np.asarray(normals_Y, dtype=float))
    rs, z = _masked_radius(kernel, r, "operator image of normal basis")
    d1, d2 = kernel.d1(rs), kernel.d2(rs)
    D, gamma, v = op.diff_coeff, op.reaction, op.velocity_vec
    py = np.einsum("ijk,jk->ij", d, nY)
    out = -(D * _lap_derivative(kernel, rs) + gamma * d1) * py / rs
    if np.any(v):
        vd = d @ v
        vn = np.broadcast_to(nY @ v, out.shape)
        out += d2 * py * vd / rs**2 + d1 * (vn / rs - py * vd / rs**3)
    if np.any(z):
        vn = np.broadcast_to(nY @ v, out.shape)
        out[z] = (kernel.d2(0.0) * vn)[z]
    return out


def adjoint_normal_image_matrix(
    op: OperatorSpec, kernel: RadialKernel, X, Y, normals_X
) -> np.ndarray:
    """Field-normal derivative of the L* image (boundary rows on trial columns)."""
    _require_fourth_order(kernel, third_only=True)
    d, r = _pairwise(X, Y)
    nX = np.atleast_2d(np.asarray(normals_X, dtype=float))
    rs, z = _masked_radius(kernel, r, "normal derivative of operator image")
    d1, d2 = kernel.d1(rs), kernel.d2(rs)
    D, gamma, v = op.diff_coeff, op.reaction, op.velocity_vec
    px = np.einsum("ijk,ik->ij", d, nX)
    out = (D * _lap_derivative(kernel, rs) + gamma * d1) * px / rs
    if np.any(v):
        vd = d @ v
        vn = np.broadcast_to((nX @ v)[:, None], out.shape)
        out += d2 * vd * px / rs**2 + d1 * (vn / rs - vd * px / rs**3)
    if np.any(z):
        vn = np.broadcast_to((nX @ v)[:, None], out.shape)
        out[z] = (kernel.d2(0.0) * vn)[z]
    return out


def ll_star_matrix(op: OperatorSpec, kernel: RadialKernel, X, Y) -> np.ndarray:
    """L L* applied to the kernel: D^2 Lap^2 + 2 gamma D Lap + gamma^2 - (v.grad)^2."""
    _require_fourth_order(kernel)
    d, r = _pairwise(X, Y)
    rs, z = _masked_radius(kernel, r, "L L* image")
    d1, d2, d3, d4 = kernel.d1(rs), kernel.d2(rs), kernel.d3(rs), kernel.d4(rs)
    D, gamma, v = op.diff_coeff, op.reaction, op.velocity_vec
    bilap = d4 + 2.0 * d3 / rs - d2 / rs**2 + d1 / rs**3
    lap = d2 + d1 / rs
    out = D * D * bilap + 2.0 * gamma * D * lap + gamma * gamma * kernel.phi(rs)
    if np.any(v):
        vd = d @ v
        vv = float(v @ v)
        out -= d2 * vd**2 / rs**2 + d1 * (vv / rs - vd**2 / rs**3)
    if np.any(z):
        out[z] = (
            D * D * (8.0 / 3.0) * kernel.d4(0.0)
            + 4.0 * gamma * D * kernel.d2(0.0)
            + gamma * gamma * kernel.phi(0.0)
            - kernel.d2(0.0) * float(v @ v)
        )
    return out


def _require_fourth_order(kernel: RadialKernel, third_only: bool = False):
    need = "third" if third_only else "third and fourth"
    if not kernel.has_fourth_order:
        raise KernelSmoothnessError(
            f"kernel {kernel.name} lacks the {need} radial derivatives "
            "needed by fourth-order schemes"
        )
    if abs(kernel.d1(0.0)) > 1e-12:
        raise KernelSmoothnessError(
            f"kernel {kernel.name} has a kink at the origin (phi'(0) != 0)"
        )


# ---------------------------------------------------------------------------
# scalar operations
# ---------------------------------------------------------------------------


def apply_radial_operator(op: OperatorSpec, kernel: RadialKernel, x, x_s) -> float:
    """L{phi(|x - x_s|)} evaluated at the field point x."""
    out = operator_image_matrix(op, kernel, np.asarray(x)[None, :], np.asarray(x_s)[None, :])
    return float(out[0, 0])


def normal_derivative(kernel: RadialKernel, x, x_s, n, side: str = "field") -> float:
    """Directional derivative along n, taken at the field or source point.

    The source-side value is the exact negation of the field-side value.
    """
    x = np.asarray(x, dtype=float)
    x_s = np.asarray(x_s, dtype=float)
    n = np.asarray(n, dtype=float)
    d = x - x_s
    r = float(np.linalg.norm(d))
    if r == 0.0:
        raise SingularityError("normal derivative undefined at zero separation")
    fieldval = kernel.d1(r) * float(d @ n) / r
    if side == "field":
        return fieldval
    if side == "source":
        return -fieldval
    raise ValueError(f"side must be 'field' or 'source', got {side!r}")


def mixed_normal_second_derivative(kernel: RadialKernel, x, x_s, n_x, n_s) -> float:
    """Field-normal derivative of the source-normal derivative."""
    x = np.asarray(x, dtype=float)
    x_s = np.asarray(x_s, dtype=float)
    if np.array_equal(x, x_s):
        raise SingularityError("mixed normal derivative undefined at zero separation")
    out = mixed_normal_matrix(
        kernel,
        x[None, :],
        x_s[None, :],
        np.asarray(n_x, dtype=float)[None, :],
        np.asarray(n_s, dtype=float)[None, :],
    )
    return float(out[0, 0])


def homogeneous_residual(op: OperatorSpec, kernel: RadialKernel, radii=(0.5, 1.0, 2.0)) -> float:
    """Max |L{phi}| over sample radii, normalized by max(1, |phi|)."""
    worst = 0.0
    for r in radii:
        lap = kernel.d2(r) + kernel.d1(r) / r
        val = op.diff_coeff * lap + op.reaction * kernel.phi(r)
        worst = max(worst, abs(val) / max(1.0, abs(kernel.phi(r))))
    return worst
