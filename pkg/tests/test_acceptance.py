"""Acceptance suite: one test per release criterion.

Each test prints a single [criterion N] PASS line (visible with -s);
a failed assertion is the corresponding FAIL. Accuracy thresholds were
locked from pre-build pilot runs and act as regression bounds alongside
the criterion bounds.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from conftest import central_d1, radial_fd_laplacian
from rbfbench import bkm, bpm, lsq, mkm
from rbfbench.bench import boundary_band_mask, compute_errors, probe_grid, run_benchmark
from rbfbench.geometry import DomainSpec, generate_nodes, partition_boundary
from rbfbench.kernels import (
    CATALOG,
    build_kernel,
    check_regulation,
    higher_order_solution,
)
from rbfbench.operators import convection_diffusion, helmholtz, laplace, mod_helmholtz
from rbfbench.problems import get_problem

REPO = Path(__file__).resolve().parent.parent
DISK = DomainSpec("unit_disk")
SQUARE = DomainSpec("rectangle", 1.0, 1.0)


class budget:
    """Assert the criterion body stays inside its runtime budget."""

    def __init__(self, seconds):
        self.limit = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, *_):
        self.elapsed = time.perf_counter() - self.start
        if exc_type is None:
            assert self.elapsed < self.limit, f"exceeded {self.limit}s budget"
        return False


def _report(n, detail):
    print(f"[criterion {n}] PASS: {detail}")


def _kernel_params(family):
    if family in ("mq", "imq"):
        return dict(c=0.8)
    if family == "gaussian":
        return dict(c=0.6)
    if family == "exp_decay":
        return dict(omega=1.0)
    if family.startswith(("helmholtz", "mod_helmholtz")):
        return dict(k=2.0 if "mod" not in family else 1.5)
    return {}


def test_criterion_01_symmetry_suite():
    with budget(10.0) as b:
        worst = 0.0
        # boundary-knot matrices: general-solution kernels, several
        # partitions and node counts, on both domains
        bkm_cases = [
            (helmholtz(2.0), build_kernel("helmholtz_gs_2d", k=2.0)),
            (mod_helmholtz(1.5), build_kernel("mod_helmholtz_gs_2d", k=1.5)),
        ]
        for op, u_sharp in bkm_cases:
            for domain in (DISK, SQUARE):
                for n_boundary in (12, 20):
                    for cut in (1.0, 0.5, 0.25):
                        nodes = partition_boundary(
                            generate_nodes(domain, n_boundary, 0, seed=2), [(0.0, cut)]
                        )
                        A = bkm.assemble_symmetric_system(nodes, op, u_sharp)
                        worst = max(worst, np.max(np.abs(A - A.T)) / np.max(np.abs(A)))
                        Q = bpm.assemble_Q(nodes, op, u_sharp).matrix
                        assert np.array_equal(Q, A)

        # Hermite domain scheme: smooth kernels, self-adjoint operators and
        # convection-diffusion through its adjoint pairing
        mkm_ops = [laplace(), helmholtz(2.0), convection_diffusion(0.7, (0.4, -0.3))]
        mkm_kernels = [
            build_kernel("mq", c=0.8),
            build_kernel("imq", c=0.8),
            build_kernel("gaussian", c=0.6),
        ]
        for op in mkm_ops:
            for phi in mkm_kernels:
                for domain, nb, ni in ((DISK, 8, 6), (SQUARE, 12, 9)):
                    nodes = partition_boundary(
                        generate_nodes(domain, nb, ni, seed=4), [(0.0, 0.75)]
                    )
                    bc = bkm.BoundaryData(
                        np.zeros(len(nodes.dirichlet_idx)),
                        np.zeros(len(nodes.neumann_idx)),
                    )
                    system = mkm.assemble_mkm(nodes, op, bc, np.zeros(nb + ni), phi)
                    worst = max(worst, system.symmetry_defect())
        assert worst <= 1e-10
    _report(1, f"max symmetry defect {worst:.2e} across the matrix family ({b.elapsed:.1f}s)")


def test_criterion_02_bpm_degenerates_to_bkm():
    with budget(5.0) as b:
        p = get_problem("helmholtz_disk")
        nodes = partition_boundary(generate_nodes(DISK, 16, 0, seed=7), p.bc_rule)
        bc = bkm.BoundaryData.from_callables(nodes, p.exact, p.exact_grad)
        u0 = build_kernel("helmholtz_gs_2d", k=2.0)
        sol_bkm = bkm.solve_indirect(nodes, p.operator, bc, None, None, u0)
        prob = bpm.MrmProblem(
            operator=p.operator, bc=bc, f_chain=p.f_chain, order=1,
            f_grad_chain=p.f_grad_chain,
        )
        sol_bpm = bpm.solve_bpm(nodes, prob, [u0, higher_order_solution(p.operator, 1)])
        rng = np.random.default_rng(3)
        probes = rng.uniform(-0.6, 0.6, size=(50, 2))
        dev = float(np.max(np.abs(sol_bkm.evaluate(probes) - sol_bpm.evaluate(probes))))
        assert dev <= 1e-10
    _report(2, f"max deviation {dev:.2e} at 50 probes ({b.elapsed:.1f}s)")


def test_criterion_03_direct_indirect_equivalence():
    with budget(5.0) as b:
        p = get_problem("helmholtz_disk")
        nodes = partition_boundary(generate_nodes(DISK, 16, 0, seed=7), p.bc_rule)
        bc = bkm.BoundaryData.from_callables(nodes, p.exact, p.exact_grad)
        u0 = build_kernel("helmholtz_gs_2d", k=2.0)
        sol = bkm.solve_indirect(nodes, p.operator, bc, None, None, u0)
        rec = bkm.solve_direct(nodes, p.operator, bc, None, None, u0)
        assert rec.cond_est < 1e10
        ind_nu = sol.normal_derivative(nodes.dirichlet_points, nodes.dirichlet_normals)
        ind_dg = sol.evaluate(nodes.neumann_points)
        scale = max(np.max(np.abs(ind_nu)), np.max(np.abs(ind_dg)))
        dev = max(
            np.max(np.abs(ind_nu - rec.neumann_at_dirichlet)),
            np.max(np.abs(ind_dg - rec.dirichlet_at_neumann)),
        ) / scale
        assert dev < 1e-8
    _report(3, f"trace deviation {dev:.2e} at condition {rec.cond_est:.2e} ({b.elapsed:.1f}s)")


def test_criterion_04_analytic_solution_accuracy():
    with budget(30.0) as b:
        p1 = get_problem("helmholtz_disk")
        nodes = partition_boundary(generate_nodes(DISK, 32, 0, seed=7), p1.bc_rule)
        bc = bkm.BoundaryData.from_callables(nodes, p1.exact, p1.exact_grad)
        sol = bkm.solve_indirect(
            nodes, p1.operator, bc, None, None, build_kernel("helmholtz_gs_2d", k=2.0)
        )
        probes = probe_grid(DISK)
        e_bkm = compute_errors(sol.evaluate, p1.exact, probes).l2_rel_err
        assert e_bkm < 1e-3  # criterion bound
        assert e_bkm < 1e-4  # frozen regression bound (pilot: 1.0e-8)

        p2 = get_problem("poisson_square")
        nodes2 = partition_boundary(generate_nodes(SQUARE, 32, 81, seed=7), p2.bc_rule)
        bc2 = bkm.BoundaryData.from_callables(nodes2, p2.exact, p2.exact_grad)
        system = mkm.assemble_mkm(
            nodes2, p2.operator, bc2, np.zeros(113), build_kernel("mq", c=0.8)
        )
        sol2 = mkm.solve_mkm(system)
        probes2 = probe_grid(SQUARE)
        e_mkm = compute_errors(sol2.evaluate, p2.exact, probes2).l2_rel_err
        assert e_mkm < 1e-3  # criterion bound
        assert e_mkm < 1e-4  # frozen regression bound (pilot: 1.6e-6)
    _report(4, f"BKM l2 {e_bkm:.2e}, MKM l2 {e_mkm:.2e} ({b.elapsed:.1f}s)")


def test_criterion_05_kernel_oracles():
    with budget(5.0) as b:
        for family in CATALOG:
            kern = build_kernel(family, **_kernel_params(family))
            for r in (0.1, 0.5, 1.0, 2.0, 5.0):
                assert kern.d1(r) == pytest.approx(
                    central_d1(kern.phi, r, h=1e-6), rel=1e-5, abs=1e-10
                ), family
                assert kern.d2(r) == pytest.approx(
                    central_d1(kern.d1, r, h=1e-6), rel=1e-5, abs=1e-10
                ), family

        k = 2.0
        j0 = build_kernel("helmholtz_gs_2d", k=k)
        for r in (0.3, 1.0, 2.5):
            image = radial_fd_laplacian(j0.phi, r) + k * k * j0.phi(r)
            assert abs(image) < 1e-6

        for op in (helmholtz(1.3), laplace()):
            chain = [higher_order_solution(op, m) for m in range(5)]
            radii = (0.3, 1.0, 2.5)
            for m in range(1, 5):
                scale = max(abs(chain[m - 1].phi(r)) for r in radii)
                for r in radii:
                    image = radial_fd_laplacian(chain[m].phi, r) + op.reaction * chain[m].phi(r)
                    assert abs(image - chain[m - 1].phi(r)) / scale < 1e-5
    _report(5, f"derivative, annihilation and chain oracles hold ({b.elapsed:.1f}s)")


def test_criterion_06_regulation_table():
    expect_pass = ("mq", "imq", "gaussian", "tps", "exp_decay",
                   "helmholtz_gs_2d", "helmholtz_gs_3d")
    expect_fail = ("laplace_fs_2d", "laplace_fs_3d", "helmholtz_fs_2d")
    for family in expect_pass:
        assert check_regulation(build_kernel(family, **_kernel_params(family))), family
    for family in expect_fail:
        assert not check_regulation(build_kernel(family, **_kernel_params(family))), family
    _report(6, "regulation classification exact on all ten kernels")


def test_criterion_07_least_squares_identities():
    rng = np.random.default_rng(42)
    G = rng.standard_normal((40, 20))
    b = G @ rng.standard_normal(20) + 0.01 * rng.standard_normal(40)
    system = lsq.OverdeterminedSystem(G=G, b=b)
    r_ne = lsq.solve_least_squares(system, "normal_equations")
    r_or = lsq.solve_least_squares(system, "orthogonal")
    agree = np.max(np.abs(r_ne.beta - r_or.beta)) / np.max(np.abs(r_or.beta))
    assert agree < 1e-6

    Gs = rng.standard_normal((15, 15))
    bs = rng.standard_normal(15)
    r_sq = lsq.solve_least_squares(lsq.OverdeterminedSystem(G=Gs, b=bs))
    direct = np.linalg.solve(Gs, bs)
    assert np.max(np.abs(r_sq.beta - direct)) <= 1e-8 * np.max(np.abs(direct))

    for i in range(0, 20, 2):
        bumped = r_or.beta.copy()
        bumped[i] += 1e-3
        assert lsq.residual_sigma(system, bumped) >= r_or.sigma
    _report(7, f"square=interpolation, method agreement {agree:.1e}, optimality at 10 coords")


def test_criterion_08_boundary_band_comparison(tmp_path):
    p = get_problem("poisson_square")
    nodes = partition_boundary(generate_nodes(SQUARE, 32, 81, seed=7), p.bc_rule)
    bc = bkm.BoundaryData.from_callables(nodes, p.exact, p.exact_grad)
    phi = build_kernel("mq", c=0.8)
    fs = np.zeros(113)
    sol_mkm = mkm.solve_mkm(mkm.assemble_mkm(nodes, p.operator, bc, fs, phi))
    sol_kan = mkm.solve_kansa_baseline(nodes, p.operator, bc, fs, phi)
    probes = probe_grid(SQUARE)
    band = boundary_band_mask(SQUARE, probes)
    e_mkm = compute_errors(sol_mkm.evaluate, p.exact, probes, band).boundary_band_err
    e_kan = compute_errors(sol_kan.evaluate, p.exact, probes, band).boundary_band_err
    assert e_mkm <= e_kan
    ratio = e_mkm / e_kan
    out = tmp_path / "band_ratio.csv"
    out.write_text(
        "problem,mkm_band_err,kansa_band_err,ratio\n"
        f"poisson_square,{e_mkm!r},{e_kan!r},{ratio!r}\n"
    )
    _report(8, f"band errors mkm {e_mkm:.2e} vs kansa {e_kan:.2e}, ratio {ratio:.3f} -> {out}")


def test_criterion_09_deterministic_default_suite(tmp_path):
    cfg = str(REPO / "configs" / "default.json")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_benchmark(cfg, out_path=a)
    run_benchmark(cfg, out_path=b)
    assert a.read_bytes() == b.read_bytes()
    _report(9, f"two default-suite runs byte-identical ({a.stat().st_size} bytes)")


def test_criterion_10_lu_reuse_bitwise_identity():
    p = get_problem("helmholtz_disk_inhom")
    nodes = partition_boundary(generate_nodes(DISK, 16, 0, seed=7), p.bc_rule)
    bc = bkm.BoundaryData.from_callables(nodes, p.exact, p.exact_grad)
    chain = [higher_order_solution(p.operator, m) for m in range(4)]
    prob = bpm.MrmProblem(
        operator=p.operator, bc=bc, f_chain=p.f_chain, order=3, f_grad_chain=p.f_grad_chain
    )
    shared = bpm.solve_bpm(nodes, prob, chain, q=bpm.assemble_Q(nodes, p.operator, chain[0]))

    class PerOrderRefactor:
        def __init__(self):
            fresh = bpm.assemble_Q(nodes, p.operator, chain[0])
            self.matrix, self.cond_est = fresh.matrix, fresh.cond_est

        def solve(self, rhs):
            return bpm.assemble_Q(nodes, p.operator, chain[0]).solve(rhs)

    refac = bpm.solve_bpm(nodes, prob, chain, q=PerOrderRefactor())
    for a, b in zip(shared.beta_by_order, refac.beta_by_order):
        assert np.array_equal(a, b)
    _report(10, "shared-factorization coefficients bit-identical to refactorization")
