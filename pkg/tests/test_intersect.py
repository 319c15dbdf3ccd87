"""Tests for line queries against a moving family."""

import unittest

import numpy as np
from numpy.testing import assert_allclose

from fixtures import (
    CUBIC_POINTS,
    CUBIC_THETAS,
    CUBIC_XI,
    FICTITIOUS_LINE_POINT,
    FICTITIOUS_THETA,
    FICTITIOUS_XI,
    PRINTED_A,
    PRINTED_B,
    bilinear_patch,
    cubic_curve,
    cubic_line,
    isolated_settings,
    nodal_cubic,
    nodal_line,
    parabola,
    random_curve,
    random_line,
    random_surface,
)

from src.errors import (
    AmbiguousPreimageError,
    InsufficientFamilyError,
    SchemaValidationError,
    ShapeMismatchError,
    UnresolvedMultiplicityError,
)
from src.geometry.polybasis import PowerCurve, eval_power_curve
from src.implicit.implicitize import AuxBasis, implicitize
from src.implicit.intersect import (
    Candidate,
    Pencil,
    QueryLine,
    Status,
    assemble_pencil,
    classify_and_filter,
    intersect_line,
    intersect_lines,
    recover_theta_multiple,
    recover_theta_simple,
    run_query,
    select_square,
    solve_missing_parameter,
)
from src.linalg.backend import generalized_eig


def _printed_pencil() -> Pencil:
    return Pencil(a=PRINTED_A, b=PRINTED_B, aux=AuxBasis((3,)))


def _confirmed(records):
    return [r for r in records if r.status is Status.CONFIRMED]


class TestQueryLine(unittest.TestCase):
    """Test cases for query line validation."""

    def test_point(self):
        """Test r(xi) = c0 + xi c1."""
        assert_allclose(cubic_line().point(0.5), [2.0, 0.0])

    def test_zero_direction(self):
        """Test a zero direction is rejected."""
        with self.assertRaises(SchemaValidationError):
            QueryLine([0.0, 0.0], [0.0, 0.0])

    def test_mismatched_shapes(self):
        """Test origin and direction must have the same dimension."""
        with self.assertRaises(ShapeMismatchError):
            QueryLine([0.0, 0.0], [1.0, 0.0, 0.0])

    def test_wrong_space_dimension(self):
        """Test a 3D line cannot query a planar curve."""
        family = implicitize(cubic_curve(), settings=isolated_settings())
        with self.assertRaises(ShapeMismatchError):
            assemble_pencil(family, QueryLine([0, 0, 0], [1, 0, 0]))

    def test_reparametrize(self):
        """Test the shifted and scaled line is the same point set."""
        line = cubic_line().reparametrize(0.3, 2.0)
        assert_allclose(line.point(0.1), cubic_line().point(0.5))


class TestPencilAssembly(unittest.TestCase):
    """Test cases for the rectangular pencil."""

    def test_shape(self):
        """Test one row per auxiliary monomial and one column per moving line."""
        family = implicitize(cubic_curve(), 3, isolated_settings())
        pencil = assemble_pencil(family, cubic_line())
        self.assertEqual(pencil.shape, (4, 5))

    def test_left_null_vector_at_intersection(self):
        """Test P~(theta) is a left null vector of A - xi B at a true intersection."""
        family = implicitize(cubic_curve(), 3, isolated_settings())
        pencil = assemble_pencil(family, cubic_line())
        phi = pencil.aux.evaluate(0.5)
        assert_allclose(phi @ pencil.at(0.359375), 0.0, atol=1e-12)

    def _assert_annihilated(self, result, line):
        pencil = assemble_pencil(result.family, line)
        scale = np.linalg.norm(pencil.a) + np.linalg.norm(pencil.b)
        for record in result.confirmed:
            phi = pencil.aux.evaluate(record.theta if record.theta.size > 1 else record.theta[0])
            bound = 1e-7 * np.linalg.norm(phi) * (np.linalg.norm(pencil.a) + abs(record.xi) * np.linalg.norm(pencil.b))
            self.assertLessEqual(np.linalg.norm(phi @ pencil.at(record.xi)), bound + 1e-14 * scale)

    def test_confirmed_records_annihilate_random_curves(self):
        """Test (P~(theta), xi) of every confirmed curve record is a left null vector."""
        rng = np.random.default_rng(41)
        settings = isolated_settings()
        for _ in range(40):
            curve = random_curve(rng, int(rng.integers(1, 6)))
            line = random_line(rng, 2)
            self._assert_annihilated(run_query(curve, line, settings), line)

    def test_confirmed_records_annihilate_random_surfaces(self):
        """Test the same for lines through random biquadratic patches."""
        rng = np.random.default_rng(42)
        settings = isolated_settings()
        for _ in range(10):
            surface = random_surface(rng, (2, 2))
            target = surface(rng.uniform(0.1, 0.9, 2))
            direction = rng.normal(size=3)
            line = QueryLine(target - direction, direction)
            self._assert_annihilated(run_query(surface, line, settings), line)


class TestSelectSquare(unittest.TestCase):
    """Test cases for square sub-pencil selection."""

    def test_first_and_last(self):
        """Test the first and last strategies on the printed pencil."""
        _, _, first = select_square(_printed_pencil(), "first")
        _, _, last = select_square(_printed_pencil(), "last")
        self.assertEqual(first, (0, 1, 2, 3))
        self.assertEqual(last, (1, 2, 3, 4))

    def test_cond(self):
        """Test QR pivoting keeps four distinct columns in increasing order."""
        a, b, selected = select_square(_printed_pencil(), "cond")
        self.assertEqual(len(selected), 4)
        self.assertEqual(list(selected), sorted(set(selected)))
        assert_allclose(a, PRINTED_A[:, list(selected)])
        assert_allclose(b, PRINTED_B[:, list(selected)])

    def test_unknown_strategy(self):
        """Test an unknown strategy name."""
        with self.assertRaises(ValueError):
            select_square(_printed_pencil(), "middle")

    def test_too_few_columns(self):
        """Test a pencil with fewer columns than rows."""
        pencil = Pencil(a=np.ones((3, 2)), b=np.ones((3, 2)), aux=AuxBasis((2,)))
        with self.assertRaises(InsufficientFamilyError):
            select_square(pencil)

    def test_square_is_kept(self):
        """Test a square pencil is used whole."""
        pencil = Pencil(a=np.eye(2), b=np.eye(2), aux=AuxBasis((1,)))
        self.assertEqual(select_square(pencil, "last")[2], (0, 1))


class TestPreimageRecovery(unittest.TestCase):
    """Test cases for parameter recovery from eigenvectors."""

    def test_printed_last_four(self):
        """Test theta from the left eigenvectors of the last four printed columns."""
        eig = generalized_eig(PRINTED_A[:, 1:], PRINTED_B[:, 1:])
        xi = eig.eigenvalues().real
        aux = AuxBasis((3,))
        for expected_xi, expected_theta in zip(CUBIC_XI, CUBIC_THETAS):
            k = int(np.argmin(np.abs(xi - expected_xi)))
            theta = recover_theta_simple(eig.left_vectors[:, k], aux)
            assert_allclose(theta, [expected_theta], atol=0.02)

    def test_simple_exact(self):
        """Test the ratio of an exact monomial vector."""
        aux = AuxBasis((3,))
        assert_allclose(recover_theta_simple(3.0 * aux.evaluate(0.7), aux), [0.7])

    def test_simple_surface(self):
        """Test both ratios on a bivariate monomial vector."""
        aux = AuxBasis((2, 1))
        assert_allclose(recover_theta_simple(aux.evaluate([0.4, -1.5]), aux), [0.4, -1.5])

    def test_degree_zero_direction_is_nan(self):
        """Test a direction with auxiliary degree 0 carries no ratio."""
        aux = AuxBasis((1, 0))
        theta = recover_theta_simple(aux.evaluate([0.25, 0.75]), aux)
        self.assertAlmostEqual(theta[0], 0.25)
        self.assertTrue(np.isnan(theta[1]))

    def test_zero_vector(self):
        """Test a zero eigenvector is ambiguous."""
        with self.assertRaises(AmbiguousPreimageError):
            recover_theta_simple(np.zeros(3), AuxBasis((2,)))

    def test_vanishing_denominator(self):
        """Test an eigenvector living only in the top monomial is ambiguous."""
        with self.assertRaises(AmbiguousPreimageError):
            recover_theta_simple([0.0, 0.0, 1.0], AuxBasis((2,)))

    def test_multiple_curve(self):
        """Test two preimages recovered from a mixed two-row kernel."""
        aux = AuxBasis((3,))
        basis = np.vstack([aux.evaluate(0.2), aux.evaluate(0.7)])
        kernel = np.array([[1.0, 2.0], [-0.5, 1.0]]) @ basis
        thetas = recover_theta_multiple(kernel, 2, aux)
        self.assertEqual(thetas.shape, (2, 1))
        assert_allclose(np.sort(thetas[:, 0].real), [0.2, 0.7], atol=1e-10)

    def test_multiple_surface(self):
        """Test two parameter pairs recovered from a mixed bivariate kernel."""
        aux = AuxBasis((2, 2))
        basis = np.vstack([aux.evaluate([0.2, 0.3]), aux.evaluate([0.6, 0.8])])
        kernel = np.array([[0.8, 0.6], [-0.6, 0.8]]) @ basis
        thetas = recover_theta_multiple(kernel, 2, aux).real
        thetas = thetas[np.argsort(thetas[:, 0])]
        assert_allclose(thetas, [[0.2, 0.3], [0.6, 0.8]], atol=1e-9)

    def test_multiple_default_aux(self):
        """Test the curve basis is inferred from the kernel width."""
        aux = AuxBasis((2,))
        kernel = np.vstack([aux.evaluate(-1.0), aux.evaluate(2.0)])
        thetas = recover_theta_multiple(kernel, 2)
        assert_allclose(np.sort(thetas[:, 0].real), [-1.0, 2.0], atol=1e-10)

    def test_multiple_degenerate(self):
        """Test a rank-deficient kernel cannot separate the preimages."""
        aux = AuxBasis((3,))
        kernel = np.vstack([aux.evaluate(0.3), 2.0 * aux.evaluate(0.3)])
        with self.assertRaises(UnresolvedMultiplicityError):
            recover_theta_multiple(kernel, 2, aux)

    def test_multiple_row_count(self):
        """Test the kernel must have p rows."""
        with self.assertRaises(ShapeMismatchError):
            recover_theta_multiple(np.ones((3, 4)), 2)

    def test_missing_curve_parameter(self):
        """Test the nearest parameter on the parabola."""
        theta = solve_missing_parameter(parabola(), [np.nan], [0.5, 0.25])
        assert_allclose(theta, [0.5], atol=1e-10)

    def test_missing_surface_parameter(self):
        """Test the second direction is found along the first."""
        theta = solve_missing_parameter(bilinear_patch(), [0.25, np.nan], [0.25, 0.75, 0.0])
        assert_allclose(theta, [0.25, 0.75], atol=1e-10)

    def test_missing_first_surface_parameter(self):
        """Test the first direction is found along the second."""
        theta = solve_missing_parameter(bilinear_patch(), [np.nan, 0.5], [0.1, 0.5, 0.0])
        assert_allclose(theta, [0.1, 0.5], atol=1e-10)

    def test_all_surface_parameters_missing(self):
        """Test nothing can be recovered with both directions missing."""
        with self.assertRaises(AmbiguousPreimageError):
            solve_missing_parameter(bilinear_patch(), [np.nan, np.nan], [0.0, 0.0, 0.0])

    def test_nothing_missing(self):
        """Test complete parameters pass through."""
        assert_allclose(solve_missing_parameter(parabola(), [0.3], [9.0, 9.0]), [0.3])


class TestClassify(unittest.TestCase):
    """Test cases for the residual test."""

    def test_true_and_fictitious(self):
        """Test three rounded true candidates pass and the fictitious one fails."""
        candidates = [Candidate(xi, 1.0, np.array([theta])) for xi, theta in zip(CUBIC_XI, CUBIC_THETAS)]
        candidates.append(Candidate(FICTITIOUS_XI, 1.0, np.array([FICTITIOUS_THETA])))
        records = classify_and_filter(candidates, cubic_curve(), cubic_line(), confirm_tol=1e-3)
        statuses = [r.status for r in records]
        self.assertEqual(statuses, [Status.CONFIRMED] * 3 + [Status.FICTITIOUS])
        self.assertGreater(records[-1].residual, 0.1)
        for record in records[:3]:
            self.assertLess(record.residual, 1e-3)
        assert_allclose([r.point for r in records[:3]], CUBIC_POINTS, rtol=1e-3)
        assert_allclose(records[-1].point, FICTITIOUS_LINE_POINT, rtol=5e-4)
        assert_allclose(records[-1].theta, [FICTITIOUS_THETA])

    def test_residual_scaled_by_curve_point(self):
        """Test confirmation compares the residual relative to 1 + |x(theta)|."""
        offset = np.array([2.0e4, -1.0e4])
        curve = cubic_curve()
        shifted = PowerCurve(curve.coeffs + np.vstack([offset, np.zeros((3, 2))]))
        line = cubic_line()
        line = QueryLine(line.origin + offset, line.direction)
        candidates = [Candidate(xi, 1.0, np.array([theta])) for xi, theta in zip(CUBIC_XI, CUBIC_THETAS)]
        records = classify_and_filter(candidates, shifted, line, confirm_tol=1e-3)
        for record in records:
            on_curve = eval_power_curve(shifted, record.theta[0])
            assert_allclose(record.scaled_residual, record.residual / (1.0 + np.linalg.norm(on_curve)))
            self.assertLessEqual(record.scaled_residual, 1e-3 * record.residual)
            self.assertIs(record.status, Status.CONFIRMED)

    def test_infinite_and_complex(self):
        """Test beta = 0 and complex xi are discarded with their own statuses."""
        candidates = [Candidate(1.0, 0.0), Candidate(1.0 + 1.0j, 1.0)]
        records = classify_and_filter(candidates, cubic_curve(), cubic_line())
        self.assertEqual([r.status for r in records], [Status.INFINITE, Status.COMPLEX])
        self.assertEqual(records[0].xi, np.inf)
        self.assertEqual(records[1].xi_imag, 1.0)

    def test_complex_theta(self):
        """Test a real xi with a complex preimage is discarded."""
        records = classify_and_filter(
            [Candidate(0.5, 1.0, np.array([0.5 + 0.2j]))], cubic_curve(), cubic_line()
        )
        self.assertIs(records[0].status, Status.COMPLEX)

    def test_unrecovered_theta(self):
        """Test a candidate without a preimage stays fictitious with its note."""
        records = classify_and_filter(
            [Candidate(0.5, 1.0, None, note="ambiguous-preimage")], cubic_curve(), cubic_line()
        )
        self.assertIs(records[0].status, Status.FICTITIOUS)
        self.assertEqual(records[0].note, "ambiguous-preimage")


class TestCubicQueries(unittest.TestCase):
    """End-to-end queries on the four-point cubic."""

    def test_default_auxiliary_degree(self):
        """Test the square pencil gives the three intersections."""
        records = intersect_line(cubic_curve(), cubic_line(), isolated_settings())
        confirmed = _confirmed(records)
        self.assertEqual(len(confirmed), 3)
        assert_allclose([r.xi for r in confirmed], CUBIC_XI, rtol=1e-3)
        assert_allclose([r.theta[0] for r in confirmed], CUBIC_THETAS, atol=1e-4)
        assert_allclose([r.point for r in confirmed], CUBIC_POINTS, rtol=1e-3)
        self.assertAlmostEqual(confirmed[1].xi, 0.359375, places=9)
        self.assertAlmostEqual(confirmed[1].theta[0], 0.5, places=9)
        assert_allclose(confirmed[1].point, [1.4375, 0.28125], atol=1e-9)

    def test_sorted_by_xi(self):
        """Test confirmed records come first in increasing xi."""
        records = intersect_line(cubic_curve(), cubic_line(), isolated_settings(), q_g=3)
        xi = [r.xi for r in _confirmed(records)]
        self.assertEqual(xi, sorted(xi))
        self.assertTrue(records[0].confirmed)

    def test_every_strategy(self):
        """Test each selection keeps the three intersections and one extra eigenvalue."""
        for strategy in ("cond", "first", "last"):
            with self.subTest(strategy=strategy):
                result = run_query(cubic_curve(), cubic_line(), isolated_settings(strategy=strategy), q_g=3)
                self.assertEqual(result.pencil_shape, (4, 5))
                self.assertEqual(len(result.selected_columns), 4)
                self.assertEqual(len(result.records), 4)
                self.assertEqual(len(result.confirmed), 3)
                extra = [r for r in result.records if not r.confirmed][0]
                self.assertIn(extra.status, (Status.FICTITIOUS, Status.INFINITE))
                assert_allclose([r.xi for r in result.confirmed], CUBIC_XI, rtol=1e-3)

    def test_column_scaling(self):
        """Test equilibrated columns give the same intersections."""
        settings = isolated_settings(column_scaling=True)
        result = run_query(cubic_curve(), cubic_line(), settings, q_g=3)
        assert_allclose([r.xi for r in result.confirmed], CUBIC_XI, rtol=1e-3)

    def test_line_rescaling(self):
        """Test theta is invariant and xi transforms under a new line parametrization."""
        settings = isolated_settings()
        before = _confirmed(intersect_line(cubic_curve(), cubic_line(), settings))
        after = _confirmed(intersect_line(cubic_curve(), cubic_line().reparametrize(0.3, 2.0), settings))
        assert_allclose([r.theta[0] for r in after], [r.theta[0] for r in before], atol=1e-9)
        assert_allclose([r.xi for r in after], [(r.xi - 0.3) / 2.0 for r in before], atol=1e-9)

    def test_domain_flag(self):
        """Test in_domain is set only when the unit domain is requested."""
        records = _confirmed(intersect_line(cubic_curve(), cubic_line(), isolated_settings(domain="unit")))
        self.assertTrue(all(r.in_domain for r in records))
        records = _confirmed(intersect_line(cubic_curve(), cubic_line(), isolated_settings()))
        self.assertTrue(all(r.in_domain is None for r in records))

    def test_shared_family(self):
        """Test a precomputed family is reused as is."""
        settings = isolated_settings()
        family = implicitize(cubic_curve(), 3, settings)
        result = run_query(cubic_curve(), cubic_line(), settings, family=family)
        self.assertIs(result.family, family)


class TestSpecialCases(unittest.TestCase):
    """Queries exercising multiplicity, complex and infinite eigenvalues."""

    def test_double_point(self):
        """Test both branches through the double point of the nodal cubic."""
        records = _confirmed(intersect_line(nodal_cubic(), nodal_line(), isolated_settings()))
        self.assertEqual(len(records), 3)
        assert_allclose([r.xi for r in records], [0.09, 1.0, 1.0], atol=1e-6)
        assert_allclose(sorted(r.theta[0] for r in records), [0.25, 0.575, 0.75], atol=1e-6)
        double = [r for r in records if abs(r.xi - 1.0) < 1e-6]
        self.assertTrue(all(r.multiplicity == 2 for r in double))

    def test_complex_pair(self):
        """Test a line missing the parabola gives two complex eigenvalues."""
        records = intersect_line(parabola(), QueryLine([0.0, -1.0], [1.0, 0.0]), isolated_settings())
        self.assertEqual([r.status for r in records], [Status.COMPLEX, Status.COMPLEX])
        assert_allclose(sorted(r.xi_imag for r in records), [-1.0, 1.0], atol=1e-9)

    def test_infinite_eigenvalue(self):
        """Test a line parallel to the parabola axis meets it once at finite xi."""
        records = intersect_line(parabola(), QueryLine([0.5, 0.0], [0.0, 1.0]), isolated_settings())
        self.assertEqual([r.status for r in records], [Status.CONFIRMED, Status.INFINITE])
        self.assertAlmostEqual(records[0].xi, 0.25, places=9)
        self.assertAlmostEqual(records[0].theta[0], 0.5, places=9)

    def test_outside_unit_domain(self):
        """Test a preimage beyond theta = 1 is flagged."""
        settings = isolated_settings(domain="unit")
        records = _confirmed(intersect_line(parabola(), QueryLine([1.5, 0.0], [0.0, 1.0]), settings))
        self.assertEqual(len(records), 1)
        self.assertAlmostEqual(records[0].xi, 2.25, places=9)
        self.assertFalse(records[0].in_domain)

    def test_segment(self):
        """Test a degree-1 curve through a 1x1 pencil."""
        segment = PowerCurve([[0.0, 0.0], [1.0, 1.0]])
        result = run_query(segment, QueryLine([0.0, 1.0], [1.0, -1.0]), isolated_settings())
        self.assertEqual(result.pencil_shape, (1, 1))
        self.assertEqual(len(result.confirmed), 1)
        self.assertAlmostEqual(result.confirmed[0].xi, 0.5, places=12)
        self.assertAlmostEqual(result.confirmed[0].theta[0], 0.5, places=9)

    def test_axis_segment(self):
        """Test a vertical line crossing x(theta) = (theta, 0) at its start."""
        segment = PowerCurve([[0.0, 0.0], [1.0, 0.0]])
        records = intersect_line(segment, QueryLine([0.0, -1.0], [0.0, 2.0]), isolated_settings())
        self.assertEqual(len(records), 1)
        self.assertTrue(records[0].confirmed)
        self.assertAlmostEqual(records[0].xi, 0.5, places=12)
        self.assertAlmostEqual(records[0].theta[0], 0.0, places=9)

    def test_bilinear_patch(self):
        """Test a vertical line through the flat patch."""
        line = QueryLine([0.25, 0.75, -2.0], [0.0, 0.0, 1.0])
        records = intersect_line(bilinear_patch(), line, isolated_settings())
        confirmed = _confirmed(records)
        self.assertEqual(len(records), 2)
        self.assertEqual(len(confirmed), 1)
        self.assertAlmostEqual(confirmed[0].xi, 2.0, places=9)
        assert_allclose(confirmed[0].theta, [0.25, 0.75], atol=1e-9)


class TestBatch(unittest.TestCase):
    """Test cases for batched queries."""

    def test_threads_keep_order(self):
        """Test a threaded batch matches the sequential one line by line."""
        rng = np.random.default_rng(12)
        lines = [random_line(rng, 2) for _ in range(12)]
        settings = isolated_settings()
        sequential = intersect_lines(cubic_curve(), lines, settings)
        threaded = intersect_lines(cubic_curve(), lines, settings, jobs=4)
        self.assertEqual(len(threaded), len(lines))
        for a, b in zip(sequential, threaded):
            self.assertEqual([r.status for r in a.records], [r.status for r in b.records])
            assert_allclose([r.xi for r in a.confirmed], [r.xi for r in b.confirmed])

    def test_empty_batch(self):
        """Test no lines give no results."""
        self.assertEqual(intersect_lines(cubic_curve(), [], isolated_settings()), [])

    def test_batch_shares_family(self):
        """Test every result carries the same family."""
        results = intersect_lines(cubic_curve(), [cubic_line(), nodal_line()], isolated_settings(), q_g=3)
        self.assertIs(results[0].family, results[1].family)
        self.assertEqual(results[0].family.aux_degree, 3)


if __name__ == '__main__':
    unittest.main()
