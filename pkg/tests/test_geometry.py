import numpy as np
import pytest

from manistat.exceptions import DegenerateDataError, DomainError, InvalidInputError
from manistat.geometry import (
    ManifoldDescriptor,
    ManifoldKind,
    ManifoldPoint,
    ManifoldSeries,
    SelfAdjointOperator,
    TangentVector,
    get_manifold,
    symmetric_unit_matrices,
)
from manistat.geometry.linalg import expm_sym, logm_spd, sqrt_and_inv_sqrt
from tests.config import N_ROUNDTRIPS

SPHERE = ManifoldDescriptor.sphere(6)
SPD3 = ManifoldDescriptor.spd(3)


def _pole(d: int = 6) -> np.ndarray:
    p = np.zeros(d + 1)
    p[-1] = 1.0
    return p


def _tangents(manifold, rng, p):
    """Random tangent vectors, rescaled inside the injectivity radius on spheres."""
    v = manifold.random_tangent(rng, p)
    if manifold.descriptor.kind is ManifoldKind.sphere:
        target = rng.uniform(0.01, 3.0, len(p))
        v *= (target / np.linalg.norm(v, axis=-1))[:, None]
    return v


class TestRoundTrips:
    def test_exp_inverts_log(self, descriptor, rng):
        m = get_manifold(descriptor)
        p = m.random_point(rng, (N_ROUNDTRIPS,))
        v = _tangents(m, rng, p)
        q = m.exp_map(p, v)
        np.testing.assert_allclose(m.log_map(p, q), v, atol=1e-8)
        np.testing.assert_allclose(m.exp_map(p, m.log_map(p, q)), q, atol=1e-8)

    def test_distance_is_norm_of_log(self, descriptor, rng):
        m = get_manifold(descriptor)
        p = m.random_point(rng, (200,))
        q = m.exp_map(p, _tangents(m, rng, p))
        np.testing.assert_allclose(
            m.distance(p, q), m.norm(p, m.log_map(p, q)), atol=1e-9
        )
        np.testing.assert_allclose(m.distance(p, q), m.distance(q, p), atol=1e-9)

    def test_transport_is_an_isometry(self, descriptor, rng):
        m = get_manifold(descriptor)
        p = m.random_point(rng, (200,))
        q = m.exp_map(p, _tangents(m, rng, p))
        u, v = _tangents(m, rng, p), _tangents(m, rng, p)
        tu = m.parallel_transport(u, p, q)
        tv = m.parallel_transport(v, p, q)
        np.testing.assert_allclose(
            m.metric_inner(q, tu, tv), m.metric_inner(p, u, v), rtol=1e-9, atol=1e-9
        )

    def test_standard_basis_is_orthonormal(self, descriptor, rng):
        m = get_manifold(descriptor)
        p = m.random_point(rng)
        basis = m.standard_basis(p)
        np.testing.assert_allclose(basis.gram(), np.eye(m.dim), atol=1e-10)
        c = rng.standard_normal(m.dim)
        np.testing.assert_allclose(basis.coords(basis.to_ambient(c)), c, atol=1e-10)


class TestSphere:
    def test_antipodal_log_names_the_observation(self):
        m = get_manifold(SPHERE)
        p = _pole()
        qs = np.eye(7)[[0, 1, 2, 6, 3]]
        qs[3] = -p
        with pytest.raises(DomainError) as excinfo:
            m.log_map(p, qs)
        assert excinfo.value.code == "cut_locus"
        assert excinfo.value.index == 4
        assert excinfo.value.exit_code == 4

    def test_exp_beyond_injectivity_radius(self):
        m = get_manifold(SPHERE)
        v = np.zeros(7)
        v[0] = np.pi
        with pytest.raises(DomainError) as excinfo:
            m.exp_map(_pole(), v)
        assert excinfo.value.code == "injectivity"

    def test_log_of_quarter_circle(self):
        m = get_manifold(SPHERE)
        e1 = np.eye(7)[0]
        np.testing.assert_allclose(m.log_map(_pole(), e1), np.pi / 2 * e1, atol=1e-15)
        assert m.distance(_pole(), e1) == pytest.approx(np.pi / 2)

    def test_closed_form_hessian_matches_finite_differences(self, rng):
        m = get_manifold(SPHERE)
        p = m.random_point(rng)
        basis = m.standard_basis(p)
        v = m.random_tangent(rng, np.broadcast_to(p, (50, 7)))
        v *= (rng.uniform(0.1, 2.0, 50) / np.linalg.norm(v, axis=-1))[:, None]
        xs = m.exp_map(p, v)
        closed = m.hessian_matrices(p, xs, basis)
        oracle = m.finite_difference_hessian(p, xs, basis)
        gap = np.linalg.norm(closed - oracle, ord=2, axis=(-2, -1))
        assert gap.max() < 1e-4

    def test_hessian_at_the_base_point_is_identity(self):
        m = get_manifold(SPHERE)
        p = _pole()
        operator = m.hessian(p, p, m.standard_basis(p))
        np.testing.assert_allclose(operator.matrix, np.eye(6), atol=1e-12)

    def test_hessian_rejects_a_basis_at_another_point(self):
        m = get_manifold(SPHERE)
        basis = m.standard_basis(np.eye(7)[0])
        with pytest.raises(InvalidInputError):
            m.hessian(_pole(), _pole(), basis)

    def test_series_rejects_off_sphere_row(self):
        points = np.eye(3)
        points[2] *= 0.9
        with pytest.raises(InvalidInputError) as excinfo:
            ManifoldSeries(descriptor=ManifoldDescriptor.sphere(2), points=points)
        assert excinfo.value.index == 3

    def test_descriptor_mismatch(self):
        m = get_manifold(SPHERE)
        other = ManifoldPoint(
            descriptor=ManifoldDescriptor.sphere(2), coords=np.array([0.0, 0.0, 1.0])
        )
        with pytest.raises(InvalidInputError):
            m.log_map(other, _pole())


class TestSPD:
    def test_series_rejects_indefinite_row(self):
        points = np.stack([np.eye(3), np.diag([1.0, -1.0, 1.0])])
        with pytest.raises(InvalidInputError) as excinfo:
            ManifoldSeries(descriptor=SPD3, points=points)
        assert excinfo.value.index == 2

    def test_transport_to_the_same_point_is_exact(self, rng):
        m = get_manifold(SPD3)
        p = m.random_point(rng)
        v = m.random_tangent(rng, p)
        np.testing.assert_array_equal(m.parallel_transport(v, p, p), v)

    def test_parallel_frame_stays_orthonormal(self, rng):
        m = get_manifold(SPD3)
        p, q = m.random_point(rng), m.random_point(rng)
        curve = m.geodesic(p, q, np.linspace(0.0, 1.0, 20))
        frames = m.parallel_frame(curve, m.standard_basis(curve[0]))
        for frame in frames:
            np.testing.assert_allclose(frame.gram(), np.eye(6), atol=1e-7)

    def test_unit_matrices_norms_at_identity(self):
        units = symmetric_unit_matrices(3, normalised=False)
        norms = np.linalg.norm(units, axis=(-2, -1))
        np.testing.assert_allclose(norms, [1, np.sqrt(2), np.sqrt(2), 1, np.sqrt(2), 1])


class TestLinalg:
    def test_exp_inverts_log(self, rng):
        a = get_manifold(SPD3).random_point(rng, (20,))
        np.testing.assert_allclose(expm_sym(logm_spd(a)), a, rtol=1e-10, atol=1e-12)

    def test_roots_multiply_to_identity(self, rng):
        a = get_manifold(SPD3).random_point(rng)
        root, inv_root = sqrt_and_inv_sqrt(a)
        np.testing.assert_allclose(root @ root, a, atol=1e-12)
        np.testing.assert_allclose(root @ inv_root, np.eye(3), atol=1e-12)

    @pytest.mark.parametrize(
        "matrix",
        [np.diag([1.0, -1.0, 1.0]), np.diag([1.0, 1e-13, 1.0])],
        ids=["indefinite", "ill_conditioned"],
    )
    def test_log_refuses_degenerate_matrices(self, matrix):
        with pytest.raises(DegenerateDataError):
            logm_spd(matrix)


class TestEuclidean:
    def test_hessian_is_identity(self, rng):
        m = get_manifold(ManifoldDescriptor.euclidean(4))
        xs = rng.standard_normal((5, 4))
        p = np.zeros(4)
        np.testing.assert_array_equal(
            m.hessian_matrices(p, xs, m.standard_basis(p)),
            np.broadcast_to(np.eye(4), (5, 4, 4)),
        )


def test_operator_must_be_symmetric():
    with pytest.raises(InvalidInputError):
        SelfAdjointOperator(base=np.zeros(2), matrix=np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_descriptor_dimensions_must_agree():
    with pytest.raises(InvalidInputError):
        ManifoldDescriptor(kind="sphere", intrinsic_dim=6, ambient_dim=6)


def _moderate_step(m, rng, p):
    v = m.random_tangent(rng, p)
    return v * (1.5 / m.norm(p, v))


class TestParallelFrame:
    def test_step_count_along_a_geodesic_does_not_matter(self, descriptor, rng):
        m = get_manifold(descriptor)
        p = m.random_point(rng)
        q = m.exp_map(p, _moderate_step(m, rng, p))
        curve = m.geodesic(p, q, np.linspace(0.0, 1.0, 101))
        initial = m.standard_basis(curve[0])
        fine = m.parallel_frame(curve, initial)[-1]
        coarse = m.parallel_frame(curve[[0, -1]], initial)[-1]
        assert len(m.parallel_frame(curve, initial)) == 101
        np.testing.assert_allclose(fine.vectors, coarse.vectors, atol=1e-9)
        np.testing.assert_allclose(fine.gram(), np.eye(m.dim), atol=1e-8)


class TestHessian:
    def test_matrices_are_symmetric(self, descriptor, rng):
        m = get_manifold(descriptor)
        p = m.random_point(rng)
        xs = m.exp_map(p, np.stack([_moderate_step(m, rng, p) for _ in range(10)]))
        matrices = m.hessian_matrices(p, xs, m.standard_basis(p))
        assert matrices.shape == (10, m.dim, m.dim)
        np.testing.assert_allclose(
            matrices, np.swapaxes(matrices, -1, -2), atol=1e-10
        )

    def test_spd_hessian_at_the_base_point_is_identity(self, rng):
        m = get_manifold(SPD3)
        p = m.random_point(rng)
        operator = m.hessian(p, p, m.standard_basis(p))
        np.testing.assert_allclose(operator.matrix, np.eye(6), atol=1e-6)

    def test_spd_hessian_is_at_least_identity(self, rng):
        m = get_manifold(SPD3)
        p = m.random_point(rng)
        x = m.exp_map(p, _moderate_step(m, rng, p))
        operator = m.hessian(p, x, m.standard_basis(p))
        assert operator.eigenvalues().min() >= 1.0 - 1e-6


class TestTangentVector:
    def test_based_vector_matches_the_plain_array(self, descriptor, rng):
        m = get_manifold(descriptor)
        p = m.random_point(rng)
        v = 0.5 * _moderate_step(m, rng, p)
        tangent = TangentVector(descriptor=descriptor, base=p, vector=v)
        np.testing.assert_array_equal(m.exp_map(p, tangent), m.exp_map(p, v))
        assert m.metric_inner(p, tangent, tangent) == pytest.approx(
            m.metric_inner(p, v, v)
        )

    def test_base_mismatch_is_rejected(self, descriptor, rng):
        m = get_manifold(descriptor)
        p, q = m.random_point(rng), m.random_point(rng)
        tangent = TangentVector(
            descriptor=descriptor, base=p, vector=0.5 * _moderate_step(m, rng, p)
        )
        with pytest.raises(InvalidInputError) as excinfo:
            m.exp_map(q, tangent)
        assert "different point" in str(excinfo.value)
        with pytest.raises(InvalidInputError):
            m.metric_inner(q, tangent, tangent)
        with pytest.raises(InvalidInputError):
            m.parallel_transport(tangent, q, p)

    def test_transport_accepts_a_vector_based_at_the_start(self, rng):
        m = get_manifold(SPHERE)
        p = _pole()
        v = np.eye(7)[0]
        tangent = TangentVector(descriptor=SPHERE, base=p, vector=v)
        np.testing.assert_allclose(
            m.parallel_transport(tangent, p, np.eye(7)[1]), v, atol=1e-15
        )

    def test_radial_vector_is_not_tangent_to_the_sphere(self):
        with pytest.raises(InvalidInputError):
            TangentVector(descriptor=SPHERE, base=_pole(), vector=_pole())

    def test_spd_tangent_vector_must_be_symmetric(self):
        with pytest.raises(InvalidInputError):
            TangentVector(
                descriptor=SPD3, base=np.eye(3), vector=np.triu(np.ones((3, 3)))
            )

    def test_vector_from_another_manifold(self):
        m = get_manifold(SPHERE)
        other = TangentVector(
            descriptor=ManifoldDescriptor.euclidean(7),
            base=_pole(),
            vector=np.eye(7)[0],
        )
        with pytest.raises(InvalidInputError):
            m.exp_map(_pole(), other)
