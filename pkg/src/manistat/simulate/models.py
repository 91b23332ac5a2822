"""Time-varying autoregressive processes on manifolds with known ground truth.

Every model is a tangent-space AR(1) recursion around a mean curve mu(t):

    s_{i+1} = a(t_i) s_i + w(t_i) * Z_i,    X_{i+1} = Exp_{mu(t_{i+1})}(E(t_{i+1}) s_{i+1})

where s is the coordinate vector of the tangent state in a frame E(t) that is
parallel along the curve, so transporting the state from one time to the next
leaves its coordinates unchanged. The state starts at zero and runs `burn_in`
steps with the coefficients at t = 0 before X_1 is emitted. All models share
one engine; the mean curve is always built as Exp_mu0(s_i v_i) so a local
alternative with b = 0 reproduces the tau = 0 model bit for bit.

The module includes the following functions:
- `simulate_m1`: Sphere S^6 with a mean moving along a quarter great circle.
- `simulate_m2`: SPD(3) with a mean moving from I to 2I.
- `simulate_m3`: A fixed mean and a time-varying AR coefficient on S^6,
  SPD(3) or R^6.
- `simulate_local_alternative`: A mean curve Exp_mu(tau_T b(t)) that
  shrinks towards mu as T grows.
- `simulate`: Dispatches on `SimSpec.model`.

Typical usage example:

    series = simulate(SimSpec(model="M3_sphere", tau=1.0, T=1024, seed=5))
"""

from typing import Callable, NamedTuple

import numpy as np

from manistat.exceptions import DomainError, InvalidInputError, SimulationError
from manistat.geometry import Manifold, ManifoldKind, ManifoldSeries
from manistat.simulate.config import SimModel, SimSpec
from manistat.simulate.schemas import FourierCurve
from manistat.utils import get_logger, substream_rng

logger = get_logger(__name__)

INNOVATION_STREAM = 0
RESAMPLE_STREAM = 1
MAX_RESAMPLES = 10

_SPHERE_POLE = 6
_SPHERE_TARGET = 0


class _Law(NamedTuple):
    """AR coefficient a(t), innovation weights w(t) and the law of Z."""

    coefficient: Callable[[float], float]
    weights: Callable[[float], np.ndarray]
    draw: Callable[[np.random.Generator, tuple[int, ...]], np.ndarray]


def _uniform(half_width: float):
    def draw(rng: np.random.Generator, size: tuple[int, ...]) -> np.ndarray:
        return rng.uniform(-half_width, half_width, size=size)

    return draw


def _spd_units_law(n: int):
    """Z_jj ~ N(0, 1), Z_jk ~ N(0, 1/4), returned as orthonormal coordinates.

    The innovation sum_jk Z_jk E_jk uses the unnormalised units E_jk with
    |E_jk| = sqrt(2) off the diagonal, so those coordinates carry sqrt(2).
    """
    rows, cols = np.triu_indices(n)
    off = rows != cols
    sd = np.where(off, 0.5, 1.0)
    unit_norms = np.where(off, np.sqrt(2.0), 1.0)
    scale = sd * unit_norms

    def draw(rng: np.random.Generator, size: tuple[int, ...]) -> np.ndarray:
        return rng.standard_normal(size) * scale

    return draw


def _sphere_pole(dim: int, axis: int) -> np.ndarray:
    point = np.zeros(dim + 1)
    point[axis] = 1.0
    return point


def _m3_coefficient(tau: float) -> Callable[[float], float]:
    def coefficient(t: float) -> float:
        return 0.1 + tau * (0.2 * np.cos(2.0 * np.pi * t) + t * (1.0 - t))

    return coefficient


def _base_point(spec: SimSpec) -> np.ndarray:
    descriptor = spec.descriptor
    if descriptor.kind is ManifoldKind.sphere:
        return _sphere_pole(descriptor.intrinsic_dim, _SPHERE_POLE)
    if descriptor.kind is ManifoldKind.spd:
        return np.eye(descriptor.ambient_dim)
    return np.zeros(descriptor.ambient_dim)


def _law(spec: SimSpec) -> _Law:
    tau = spec.tau
    d = spec.descriptor.intrinsic_dim
    ones = np.ones(d)
    if spec.model is SimModel.M1:

        def weights(t: float) -> np.ndarray:
            sigma = np.where(np.arange(d) < 3, 1.1 + 1.1 * t, 1.0) / (1.0 + tau)
            return sigma / (1.0 + tau)

        return _Law(lambda t: 0.05 + 0.5 * t * (1.0 - t), weights, _uniform(0.5))
    if spec.model is SimModel.M2:
        return _Law(
            lambda t: 0.05 + 0.25 * t,
            lambda t: ones * (6.25 * (t - 0.25) ** 2 + 0.2) / (1.0 + 2.0 * tau),
            _spd_units_law(spec.descriptor.ambient_dim),
        )
    if spec.model is SimModel.M3_spd:
        return _Law(
            _m3_coefficient(tau),
            lambda t: ones,
            _spd_units_law(spec.descriptor.ambient_dim),
        )
    return _Law(_m3_coefficient(tau), lambda t: ones, _uniform(0.75))


def _check_model(spec: SimSpec, allowed: tuple[SimModel, ...]) -> None:
    if spec.model not in allowed:
        names = ", ".join(m.value for m in allowed)
        raise InvalidInputError(f"model {spec.model.value} is not one of {names}")


def _times(T: int) -> np.ndarray:
    """t_0..t_T with t_i = i / T."""
    return np.arange(T + 1) / T


class _Engine:
    """Runs the tangent AR recursion along a discretised mean curve."""

    def __init__(self, manifold: Manifold, spec: SimSpec, law: _Law):
        self.manifold = manifold
        self.spec = spec
        self.law = law
        self.resamples = 0
        self._guard = manifold.descriptor.kind is ManifoldKind.sphere

    def _advance(self, state, a, w, z, step):
        candidate = a * state + w * z
        if not self._guard or np.linalg.norm(candidate) < np.pi:
            return candidate
        for attempt in range(1, MAX_RESAMPLES + 1):
            self.resamples += 1
            rng = substream_rng(self.spec.seed, RESAMPLE_STREAM, step, attempt)
            candidate = a * state + w * self.law.draw(rng, state.shape)
            if np.linalg.norm(candidate) < np.pi:
                return candidate
        raise DomainError(
            f"tangent state left the injectivity radius after {MAX_RESAMPLES} "
            f"resampled innovations",
            code="injectivity",
            index=max(step - self.spec.burn_in + 1, 1),
        )

    def run(self, curve: np.ndarray) -> ManifoldSeries:
        spec, law, manifold = self.spec, self.law, self.manifold
        T, burn_in = spec.T, spec.burn_in
        d = manifold.dim
        frames = manifold.parallel_frame(curve, manifold.standard_basis(curve[0]))
        z = law.draw(substream_rng(spec.seed, INNOVATION_STREAM), (burn_in + T, d))

        state = np.zeros(d)
        a0, w0 = law.coefficient(0.0), law.weights(0.0)
        for step in range(burn_in):
            state = self._advance(state, a0, w0, z[step], step)

        points = np.empty((T,) + manifold.point_shape)
        for i, t in enumerate(_times(T)[:-1]):
            step = burn_in + i
            state = self._advance(
                state, law.coefficient(t), law.weights(t), z[step], step
            )
            frame = frames[i + 1]
            points[i] = manifold.exp_map(curve[i + 1], frame.to_ambient(state))

        if self.resamples:
            logger.warning(
                f"resampled {self.resamples} innovations to stay inside the "
                f"injectivity radius"
            )
        if manifold.descriptor.kind is ManifoldKind.spd:
            _check_positive_definite(points)
        return ManifoldSeries(descriptor=manifold.descriptor, points=points)


def _check_positive_definite(points: np.ndarray) -> None:
    finite = np.all(np.isfinite(points), axis=(-2, -1))
    min_eig = np.full(len(points), -np.inf)
    min_eig[finite] = np.linalg.eigvalsh(points[finite])[:, 0]
    bad = np.flatnonzero(min_eig <= 0)
    if len(bad):
        raise SimulationError(
            f"simulated point {bad[0] + 1} is not positive definite",
            index=int(bad[0]) + 1,
        )


def _curve(manifold: Manifold, base: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Mean curve Exp_base(v_i) for tangent vectors v_i at base."""
    # -0.0 + 0.0 is +0.0, so curves built from zero directions are bitwise equal
    return manifold.exp_map(base, directions + 0.0)


def _geodesic_directions(
    manifold: Manifold, start: np.ndarray, end: np.ndarray, spec: SimSpec
) -> np.ndarray:
    """Tangent vectors (tau t_i) Log_start(end), i = 0..T."""
    v = manifold.log_map(start, end)
    s = spec.tau * _times(spec.T)
    return s.reshape(s.shape + (1,) * manifold.point_ndim) * v


def simulate_m1(spec: SimSpec) -> ManifoldSeries:
    """Sphere model with mean mu(tau t) on the geodesic from e_7 to e_1."""
    _check_model(spec, (SimModel.M1,))
    manifold = spec.descriptor.manifold
    start = _base_point(spec)
    end = _sphere_pole(manifold.dim, _SPHERE_TARGET)
    curve = _curve(manifold, start, _geodesic_directions(manifold, start, end, spec))
    return _Engine(manifold, spec, _law(spec)).run(curve)


def simulate_m2(spec: SimSpec) -> ManifoldSeries:
    """SPD model with mean mu(tau t) = 2^{tau t} I."""
    _check_model(spec, (SimModel.M2,))
    manifold = spec.descriptor.manifold
    start = _base_point(spec)
    curve = _curve(
        manifold, start, _geodesic_directions(manifold, start, 2.0 * start, spec)
    )
    return _Engine(manifold, spec, _law(spec)).run(curve)


def simulate_m3(spec: SimSpec) -> ManifoldSeries:
    """Fixed mean with AR coefficient 0.1 + tau (0.2 cos(2 pi t) + t (1 - t))."""
    _check_model(spec, (SimModel.M3_sphere, SimModel.M3_spd, SimModel.EuclideanAR))
    manifold = spec.descriptor.manifold
    base = _base_point(spec)
    directions = np.zeros((spec.T + 1,) + manifold.point_shape)
    return _Engine(manifold, spec, _law(spec)).run(_curve(manifold, base, directions))


def simulate_local_alternative(
    base_spec: SimSpec,
    b_curve: FourierCurve,
    rate: float,
    exponent: float = 0.5,
) -> ManifoldSeries:
    """Series whose mean is Exp_mu(tau_T b(t)) with tau_T = rate * T^-exponent.

    The innovation law and AR coefficient are those of `base_spec.model` at
    tau = 0; mu is that model's mean at t = 0. `exponent=0` keeps tau fixed.

    Raises:
        DomainError: if tau_T |b(t)| reaches the injectivity radius.
    """
    spec = base_spec.model_copy(update={"tau": 0.0})
    manifold = spec.descriptor.manifold
    if b_curve.dim != manifold.dim:
        raise InvalidInputError(
            f"b(t) has {b_curve.dim} coordinates, the manifold has dimension "
            f"{manifold.dim}"
        )
    base = _base_point(spec)
    tau_T = rate * spec.T ** (-exponent)
    basis = manifold.standard_basis(base)
    directions = tau_T * basis.to_ambient(b_curve(_times(spec.T)))
    curve = _curve(manifold, base, directions)
    logger.debug(f"local alternative with tau_T={tau_T:.4g} on {spec.model.value}")
    return _Engine(manifold, spec, _law(spec)).run(curve)


def simulate(spec: SimSpec) -> ManifoldSeries:
    if spec.model is SimModel.M1:
        return simulate_m1(spec)
    if spec.model is SimModel.M2:
        return simulate_m2(spec)
    return simulate_m3(spec)

