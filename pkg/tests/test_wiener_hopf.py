import math

import numpy as np
import pytest

from edgeplasmon import (
    ConductivityTensor,
    NonzeroIndexError,
    Problem,
    SplitHalf,
    boundary_split_q,
    build_log_kernel,
    cauchy_transform,
    lambda_pm,
    p_of_xi,
    q_asymptotic,
    quadratic_roots,
    split_q,
)
from conftest import make_sigma


class TestLogKernel:
    def test_trivial_sheet(self):
        k = build_log_kernel(Problem.single_sheet(
            ConductivityTensor.diagonal(0, 0, nondimensional=True), 4.0))
        assert k.trivial and k.nu_k == 0
        assert np.all(k.log_values(np.linspace(-9, 9, 11)) == 0)

    def test_exp_log_reproduces_symbol(self, root_problems, root_kernels, rng):
        prob, kernel = root_problems["A"], root_kernels["A"]
        zeta = rng.uniform(-kernel.m_cutoff, kernel.m_cutoff, size=1000)
        lv = kernel.log_values(zeta)
        pv = p_of_xi(prob, zeta)
        assert np.max(np.abs(np.exp(lv) - pv) / np.abs(pv)) < 1e-12

    def test_phase_steps_below_half_pi(self, root_kernels):
        kernel = root_kernels["C"]
        steps = np.abs(np.diff(kernel.phase))
        assert steps.max() < 0.5 * math.pi

    def test_zero_index_phase_closure(self, root_kernels):
        # nu_K = 0: the unwrapped phase at +X returns to its -X value;
        # the O(1/X) tail drift vanishes at large probing radius
        kernel = root_kernels["C"]
        big = 1e5 * kernel.scale
        gap = abs(float(kernel.phase_at(big)) - float(kernel.phase_at(-big)))
        assert gap < 1e-3

    def test_base_value_and_tail_branch(self, root_problems, root_kernels):
        # case A: P real negative on the whole axis, phase pinned at +pi
        kernel = root_kernels["A"]
        base = kernel.base_value
        p0 = complex(p_of_xi(root_problems["A"], 0.0))
        assert base.imag == pytest.approx(math.pi)
        assert math.exp(base.real) == pytest.approx(abs(p0), rel=1e-13)

    def test_nu_recorded(self):
        prob = Problem.single_sheet(make_sigma("C"), 0.85 * (21.657 + 0.217j))
        assert build_log_kernel(prob).nu_k == -1


class TestSplitQ:
    def test_zero_sheet_splits_to_zero(self):
        kernel = build_log_kernel(Problem.single_sheet(
            ConductivityTensor.diagonal(0, 0, nondimensional=True), 4.0))
        assert split_q(kernel, 2.0 + 1.0j, SplitHalf.PLUS).value == 0

    def test_case_a_dispersion_sum(self, root_kernels):
        # Q+(xi+) + Q-(xi-) = ln(-C+/C-) = i pi at the reference root
        kernel = root_kernels["A"]
        prob = kernel.problem
        r = quadratic_roots(prob.sigma, prob.q)
        qp = split_q(kernel, r.xi_plus, SplitHalf.PLUS)
        qm = split_q(kernel, r.xi_minus, SplitHalf.MINUS)
        assert qp.value + qm.value == pytest.approx(1j * math.pi, abs=1e-3)
        assert qp.quadrature_error_estimate < 1e-8

    def test_half_plane_preconditions(self, root_kernels):
        kernel = root_kernels["A"]
        with pytest.raises(ValueError, match="upper half-plane"):
            split_q(kernel, 1.0 - 2.0j, SplitHalf.PLUS)
        with pytest.raises(ValueError, match="lower half-plane"):
            split_q(kernel, 1.0 + 2.0j, SplitHalf.MINUS)
        with pytest.raises(ValueError, match="boundary_split_q"):
            split_q(kernel, 3.0, SplitHalf.PLUS)

    def test_nonzero_index_refused(self):
        kernel = build_log_kernel(
            Problem.single_sheet(make_sigma("C"), 0.85 * (21.657 + 0.217j)))
        with pytest.raises(NonzeroIndexError):
            split_q(kernel, 2j, SplitHalf.PLUS)

    def test_magneto_small_q_breve_limit(self):
        # |Q_+-(xi^+-)| -> 0 as |q_breve| -> 0
        sbar = ConductivityTensor(
            -2e-4j, -0.02 - 2e-7j, 0.02 + 2e-7j, -2e-4j, nondimensional=True)
        prev = None
        for q in (200.0, 20.0, 2.0):
            prob = Problem.single_sheet(sbar, q)
            kernel = build_log_kernel(prob)
            r = quadratic_roots(sbar, q)
            mag = max(abs(split_q(kernel, r.xi_plus, SplitHalf.PLUS).value),
                      abs(split_q(kernel, r.xi_minus, SplitHalf.MINUS).value))
            if prev is not None:
                assert mag < prev
            prev = mag
        assert prev < 1e-3

    def test_analyticity_probe(self, root_kernels):
        # Q_+ at a point equals its Cauchy reconstruction from a circle
        kernel = root_kernels["C"]
        r = quadratic_roots(kernel.problem.sigma, kernel.problem.q)
        z0 = r.xi_plus
        radius = 0.25 * kernel.scale
        angles = np.linspace(0.0, 2.0 * math.pi, 48, endpoint=False)
        ring = z0 + radius * np.exp(1j * angles)
        vals = np.array([cauchy_transform(kernel, z, rtol=1e-11).value
                         for z in ring])
        recon = np.mean(vals)  # mean over the circle = center value
        direct = cauchy_transform(kernel, z0).value
        assert abs(recon - direct) < 1e-6


class TestBoundaryValues:
    def test_plemelj_sum_is_log_symbol(self, root_kernels):
        kernel = root_kernels["B"]
        for x in (-17.3, -2.0, 0.7, 9.4, 23.1):
            qp = boundary_split_q(kernel, x, SplitHalf.PLUS).value
            qm = boundary_split_q(kernel, x, SplitHalf.MINUS).value
            ref = complex(kernel.log_values(np.array([x]))[0])
            assert qp + qm == pytest.approx(ref, abs=1e-10)

    def test_boundary_matches_off_axis_limit(self, root_kernels):
        kernel = root_kernels["B"]
        x = 5.5
        qb = boundary_split_q(kernel, x, SplitHalf.PLUS).value
        seq = [split_q(kernel, x + 1j * d, SplitHalf.PLUS).value
               for d in (1e-3, 1e-5, 1e-7)]
        errs = [abs(v - qb) for v in seq]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-6

    def test_factorization_tightens_with_delta(self, root_problems, root_kernels):
        # Plemelj limit: the defect of exp(Q+(x+id) + Q-(x-id)) against P(x)
        # shrinks linearly in the offset d
        prob, kernel = root_problems["B"], root_kernels["B"]
        xs = np.linspace(-2.2 * abs(prob.q), 2.2 * abs(prob.q), 40)
        errs = {}
        for delta in (1e-4, 1e-5, 1e-6):
            worst = 0.0
            for x in xs:
                qp = split_q(kernel, x + 1j * delta, SplitHalf.PLUS).value
                qm = split_q(kernel, x - 1j * delta, SplitHalf.MINUS).value
                p_ref = complex(p_of_xi(prob, x))
                worst = max(worst, abs(np.exp(qp + qm) - p_ref) / abs(p_ref))
            errs[delta] = worst
        assert errs[1e-4] < 1e-2
        assert errs[1e-5] < 0.15 * errs[1e-4]
        assert errs[1e-6] < 0.15 * errs[1e-5]


class TestQAsymptotic:
    def test_log_scaling_law(self, root_problems):
        prob = root_problems["B"]
        xi = 40.0 + 60.0j
        d = q_asymptotic(prob, 2 * xi, SplitHalf.PLUS) \
            - q_asymptotic(prob, xi, SplitHalf.PLUS)
        assert d == pytest.approx(0.5 * math.log(2.0))

    def test_minus_half_mirrors_plus(self, root_problems):
        prob = root_problems["B"]
        xi = 25.0 + 3.0j
        assert q_asymptotic(prob, -xi, SplitHalf.MINUS) \
            == q_asymptotic(prob, xi, SplitHalf.PLUS)

    def test_quadrature_approaches_log_law(self, root_kernels, root_problems):
        # |Q_+(iR) - asymptote| * R/(ln R + 1) stays bounded as R grows
        kernel, prob = root_kernels["B"], root_problems["B"]
        bounds = []
        for r_mag in (1e2, 1e3, 1e4):
            direct = split_q(kernel, 1j * r_mag, SplitHalf.PLUS).value
            asym = q_asymptotic(prob, 1j * r_mag, SplitHalf.PLUS)
            bounds.append(abs(direct - asym) * r_mag / (math.log(r_mag) + 1.0))
        assert max(bounds) < 50.0
        assert bounds[2] < 4.0 * bounds[0] + 1.0


class TestLambda:
    def _constants(self, kernel):
        roots, coeffs, phi_p, phi_m = kernel.root_constants()
        return roots, coeffs, np.exp(-phi_p.value), np.exp(-phi_m.value)

    def test_reconstruction_identity_on_grid(self, root_problems, root_kernels):
        # -i[Lambda_+ + Lambda_-] = (q s_yx + xi s_xx) K-hat e^{-Q_+} on a
        # thousand-point grid parallel to the real axis
        prob, kernel = root_problems["C"], root_kernels["C"]
        roots, coeffs, a, b = self._constants(kernel)
        table = kernel.cauchy_table()
        delta = 1e-6 * kernel.scale
        xi = np.linspace(-3 * abs(prob.q), 3 * abs(prob.q), 1000) + 1j * delta
        phi = table.phi(xi)
        e_mqp = np.exp(-phi)               # e^{-Q_+}, upper side
        p_here = p_of_xi(prob, xi)
        e_qm = p_here * e_mqp              # e^{+Q_-} continued upward
        lam_p = (-coeffs.c_plus * (e_mqp - a) / (xi - roots.xi_plus)
                 + coeffs.c_minus * (b - e_mqp) / (xi - roots.xi_minus))
        lam_m = (coeffs.c_minus * (e_qm - b) / (xi - roots.xi_minus)
                 - coeffs.c_plus * (a - e_qm) / (xi - roots.xi_plus))
        lhs = -1j * (lam_p + lam_m)
        sig = prob.sigma_eff
        rhs = (prob.q * sig.yx + xi * sig.xx) * (0.5 / np.sqrt(
            xi * xi + prob.q * prob.q)) * e_mqp
        rel = np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1e-12)
        assert rel.max() < 1e-8

    def test_lambda_pm_matches_table_construction(self, root_problems, root_kernels):
        prob, kernel = root_problems["C"], root_kernels["C"]
        roots, coeffs, a, b = self._constants(kernel)
        for xi in (3.0 + 0.5j, -11.0 + 2.0j):
            phi = cauchy_transform(kernel, xi).value
            e_mqp = np.exp(-phi)
            manual = (-coeffs.c_plus * (e_mqp - a) / (xi - roots.xi_plus)
                      + coeffs.c_minus * (b - e_mqp) / (xi - roots.xi_minus))
            assert lambda_pm(prob, kernel, xi, SplitHalf.PLUS) \
                == pytest.approx(manual, rel=1e-9)
        for xi in (4.0 - 1.0j, -6.0 - 3.0j):
            phi = cauchy_transform(kernel, xi).value
            e_qm = np.exp(-phi)
            manual = (coeffs.c_minus * (e_qm - b) / (xi - roots.xi_minus)
                      - coeffs.c_plus * (a - e_qm) / (xi - roots.xi_plus))
            assert lambda_pm(prob, kernel, xi, SplitHalf.MINUS) \
                == pytest.approx(manual, rel=1e-9)

    def test_zero_sheet_lambda_vanishes(self):
        prob = Problem.single_sheet(make_sigma("A"), 12.171985)
        kernel = build_log_kernel(prob)
        # Lambda for the empty sheet is identically zero: C+ a = C- b = 1/2
        # and e^{-Q} = 1 (via a trivial kernel)
        zero_prob = Problem.single_sheet(
            ConductivityTensor.diagonal(0, 0, nondimensional=True), 12.0)
        zero_kernel = build_log_kernel(zero_prob)
        with pytest.raises(Exception):
            # quadratic roots are undefined for the empty sheet
            lambda_pm(zero_prob, zero_kernel, 2j, SplitHalf.PLUS)

    def test_removable_singularity_at_root(self, root_problems, root_kernels):
        prob, kernel = root_problems["C"], root_kernels["C"]
        roots, _, _, _ = self._constants(kernel)
        inside = lambda_pm(prob, kernel, roots.xi_plus + 1e-8, SplitHalf.PLUS)
        outside = lambda_pm(prob, kernel,
                            roots.xi_plus + 5e-6 * kernel.scale, SplitHalf.PLUS)
        assert np.isfinite(inside)
        assert inside == pytest.approx(outside, rel=2e-4)


class TestCauchyTable:
    def test_matches_pointwise_adaptive(self, root_kernels, rng):
        kernel = root_kernels["C"]
        table = kernel.cauchy_table()
        pts = (rng.uniform(-30, 30, 24)
               + 1j * np.concatenate([rng.uniform(0.01, 8, 12),
                                      -rng.uniform(0.01, 8, 12)]))
        batch = table.phi(pts)
        for z, tv in zip(pts, batch):
            ref = cauchy_transform(kernel, complex(z)).value
            assert abs(tv - ref) < 2e-8, f"table mismatch at {z}"

    def test_near_axis_points(self, root_kernels):
        kernel = root_kernels["B"]
        table = kernel.cauchy_table()
        for delta in (1e-4, 1e-6):
            z = 7.7 + 1j * delta
            ref = cauchy_transform(kernel, z).value
            assert abs(complex(table.phi(np.array([z]))[0]) - ref) < 2e-8
