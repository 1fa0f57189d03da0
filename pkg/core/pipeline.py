"""
Signal f -> QSP phases Psi, with the checks that certify the result.

The signal lives on the same grid as the circle functions: x_j = cos(theta_j),
theta_j = pi*j/N, so that b(z_j) = i f(x_j) with z_j = exp(2i*theta_j).
Samples for j > N/2 sit at negative x and carry the even extension of f.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import chebyshev

from .errors import (
    InvalidSignal,
    NonPositiveAInfinity,
    SignalTooLarge,
    SymmetryViolation,
    TailNotDecaying,
)
from .inverse import (
    DEFAULT_TOL_FP,
    HALF_SQRT,
    OUTER_CHECK_EVERY,
    RENORMALIZE_EVERY,
    LayerStripper,
    complete_outer,
    rh_factorize,
)
from .logger import logger
from .nlfs import CoeffSequence, SU2Pair, check_grid_fits, nlfs_finite, su2_product
from .qsp import PhaseSequence, coeffs_to_phases, qsp_response_batch
from .spectral import CircleFunction, CircleGrid, mean_value


MIN_EPSILON = 1e-6
EVEN_TOLERANCE = 1e-9
IMAGINARY_TOLERANCE = 1e-9
LIPSCHITZ_CONSTANT = 7.3
# Tail target is tightened by this factor while the measured residual misses tol
TAIL_TIGHTENING = 16.0


def default_d_max(grid_size: int) -> int:
    """Largest degree whose content stays inside the N/4 band"""
    return grid_size // 4


def default_epsilon(values: np.ndarray) -> float:
    return HALF_SQRT - float(np.max(np.abs(values)))


@dataclass(frozen=True, eq=False)
class SignalSamples:
    grid: CircleGrid
    values: np.ndarray
    epsilon: float

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.shape != (self.grid.size,):
            raise InvalidSignal(f"Expected {self.grid.size} samples, got {values.shape[0]}")
        if not np.all(np.isfinite(values)):
            raise InvalidSignal("Signal samples must be finite")
        mirrored = values[self.grid.reflection]
        defect = float(np.max(np.abs(values - mirrored)))
        if defect > EVEN_TOLERANCE:
            raise InvalidSignal(
                f"Samples are not even under x -> -x (defect {defect:.3e}); "
                f"sample j and N-j must agree"
            )
        values = 0.5 * (values + mirrored)

        epsilon = float(self.epsilon)
        peak = float(np.max(np.abs(values)))
        if epsilon <= MIN_EPSILON:
            raise SignalTooLarge(
                f"sup |f| = {peak:.6g} leaves margin eps = {epsilon:.3g} below the "
                f"2^(-1/2) threshold; need sup |f| <= 2^(-1/2) - eps with eps > {MIN_EPSILON}"
            )
        if peak > HALF_SQRT - epsilon + 1e-12:
            raise SignalTooLarge(
                f"sup |f| = {peak:.6g} exceeds 2^(-1/2) - eps = {HALF_SQRT - epsilon:.6g}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "epsilon", epsilon)

    @classmethod
    def _build(cls, grid: CircleGrid, values: np.ndarray, epsilon: Optional[float]) -> "SignalSamples":
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.shape != (grid.size,):
            raise InvalidSignal(f"Expected {grid.size} samples, got {values.shape[0]}")
        if epsilon is None:
            epsilon = default_epsilon(values)
        return cls(grid, values, epsilon)

    @classmethod
    def from_function(
        cls, grid: CircleGrid, func: Callable, epsilon: Optional[float] = None
    ) -> "SignalSamples":
        """Sample f on [0, 1] at |x_j|, which is its even extension."""
        xs = np.abs(grid.abscissae)
        try:
            values = np.broadcast_to(np.asarray(func(xs), dtype=float), xs.shape).copy()
        except (TypeError, ValueError):
            values = np.array([float(func(x)) for x in xs])
        return cls._build(grid, values, epsilon)

    @classmethod
    def from_samples(
        cls, grid: CircleGrid, values: Sequence[float], epsilon: Optional[float] = None
    ) -> "SignalSamples":
        return cls._build(grid, values, epsilon)

    @classmethod
    def from_chebyshev(
        cls, grid: CircleGrid, coefficients: Sequence[float], epsilon: Optional[float] = None
    ) -> "SignalSamples":
        coefficients = np.asarray(coefficients, dtype=float).reshape(-1)
        if len(coefficients) == 0:
            raise InvalidSignal("Empty Chebyshev coefficient list")
        values = chebyshev.chebval(np.abs(grid.abscissae), coefficients)
        return cls._build(grid, values, epsilon)

    @classmethod
    def constant(cls, grid: CircleGrid, value: float, epsilon: Optional[float] = None) -> "SignalSamples":
        return cls._build(grid, np.full(grid.size, float(value)), epsilon)

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def pair_margin(self) -> float:
        """min_j sqrt(1 - f_j^2) - 2^(-1/2), the |a| margin of the completed pair"""
        return float(np.sqrt(1.0 - self.sup ** 2)) - HALF_SQRT

    def halved(self) -> np.ndarray:
        """Samples on the grid of size N/2 (every other node)"""
        return self.values[::2]


def weighted_norm(values: np.ndarray) -> float:
    """(2/pi int_0^1 |f|^2 dx/sqrt(1-x^2))^(1/2) as the uniform theta-mean"""
    return float(np.sqrt(np.mean(np.abs(values) ** 2)))


def hs_norm(f: SignalSamples) -> float:
    return weighted_norm(f.values)


def weighted_distance(f: SignalSamples, g: SignalSamples) -> float:
    f.grid.check_same(g.grid)
    return weighted_norm(f.values - g.values)


def signal_to_b(f: SignalSamples) -> CircleFunction:
    """b(z_j) = i f(x_j); the samples are symmetrized on construction, so c_n = c_-n."""
    return CircleFunction(f.grid, 1j * f.values)


def grid_response(psi: PhaseSequence, d: int, grid: CircleGrid) -> np.ndarray:
    """Im u_d at every x_j of the grid; nodes j and N-j share |x_j|"""
    if d > psi.degree:
        psi = PhaseSequence(psi.padded(d + 1))
    half = grid.size // 2
    xs = np.abs(grid.abscissae[:half + 1])
    upper = qsp_response_batch(psi, d, xs)[:, 0, 0].imag
    return np.concatenate([upper, upper[1:half][::-1]])


def convergence_profile(psi: PhaseSequence, f: SignalSamples, d_list: Iterable[int]) -> Dict[int, float]:
    """Weighted residual ||Im u_d - f|| for each requested d (phases beyond psi are zero)."""
    return {
        int(d): weighted_norm(grid_response(psi, int(d), f.grid) - f.values)
        for d in d_list
    }


def plancherel_sum(psi: PhaseSequence) -> float:
    """sum over k in Z of log(1 + tan^2 psi_|k|): psi_0 once, psi_k twice for k >= 1"""
    terms = np.log1p(np.tan(psi.values) ** 2)
    return float(terms[0] + 2.0 * np.sum(terms[1:]))


def log_mass(values: np.ndarray) -> float:
    return float(-np.mean(np.log1p(-np.asarray(values) ** 2)))


def plancherel_check(psi: PhaseSequence, f: SignalSamples) -> Tuple[float, float]:
    return plancherel_sum(psi), log_mass(f.values)


@dataclass
class SynthesisReport:
    phases: PhaseSequence
    degree: int
    plancherel_lhs: float
    plancherel_rhs: float
    quadrature_budget: float
    hs_residual: float
    tol: float
    converged: bool
    fp_iterations: int
    contraction_rate: float
    epsilon: float
    pair_epsilon: float
    grid_size: int
    coefficients: CoeffSequence = field(repr=False, default_factory=CoeffSequence.empty)
    drift: Dict[str, float] = field(default_factory=dict)

    @property
    def plancherel_gap(self) -> float:
        return abs(self.plancherel_lhs - self.plancherel_rhs)

    @property
    def plancherel_ok(self) -> bool:
        return self.plancherel_gap <= self.quadrature_budget

    @property
    def not_converged(self) -> bool:
        return not self.converged


def _phases_from_plus(coefficients: CoeffSequence) -> Tuple[PhaseSequence, CoeffSequence, float]:
    if coefficients.width == 0:
        return PhaseSequence.zeros(), CoeffSequence.empty(), 0.0

    half = coefficients.values
    leak = float(np.max(np.abs(half.real)))
    if leak > IMAGINARY_TOLERANCE:
        raise SymmetryViolation(f"Recovered coefficients are not purely imaginary (|Re F| = {leak:.3e})")
    full = CoeffSequence(-(len(half) - 1), np.concatenate([half[:0:-1], half]))
    return coeffs_to_phases(full), full, leak


def synthesize(
    f: SignalSamples,
    tol: float = 1e-6,
    d_max: Optional[int] = None,
    tol_fp: float = DEFAULT_TOL_FP,
    fp_max_iter: Optional[int] = None,
    renormalize_every: int = RENORMALIZE_EVERY,
    outer_check_every: int = OUTER_CHECK_EVERY,
) -> SynthesisReport:
    grid = f.grid
    if d_max is None:
        d_max = default_d_max(grid.size)
    if grid.size < 4 * d_max:
        logger.warning(f"d_max {d_max} exceeds the N/4 band of grid {grid.size}; results may alias")
    elif grid.size < 8 * d_max:
        logger.debug(f"d_max {d_max} above N/8 on grid {grid.size}")

    pair_epsilon = f.pair_margin()
    logger.info(f"Synthesizing on grid {grid.size}: eps {f.epsilon:.4g}, pair margin {pair_epsilon:.4g}")

    b = signal_to_b(f)
    completed = complete_outer(b, pair_epsilon)
    factors = rh_factorize(completed, tol_fp, fp_max_iter)
    logger.info(f"Riemann-Hilbert fixed point: {factors.iterations} iterations, rate {factors.rate:.3f}")

    stripper = LayerStripper(factors.plus, renormalize_every, outer_check_every)
    floor = stripper.noise_floor
    target: Optional[float] = max(tol ** 2, floor)
    limit = d_max
    while True:
        stalled = False
        try:
            stripped = stripper.run(limit, target)
        except TailNotDecaying:
            stripped = stripper.result(converged=False)
            stalled = True
        phases, coefficients, imag_leak = _phases_from_plus(stripped.coefficients)
        residual = weighted_norm(grid_response(phases, phases.degree, grid) - f.values)
        logger.debug(
            f"Stripped {stripper.steps} layers, tail {stripped.tail:.3e}, residual {residual:.3e}"
        )
        if stalled:
            if residual > tol:
                raise TailNotDecaying(
                    f"Plancherel tail {stripped.tail:.3e} stalled after {stripper.steps} layers "
                    f"with residual {residual:.3e} above tol {tol:.1e}"
                )
            logger.warning(f"Tail stalled at {stripped.tail:.3e}; residual {residual:.3e} already meets tol")
            break
        if residual <= tol or stripper.steps > d_max:
            break
        if target is not None and target > floor:
            target = max(target / TAIL_TIGHTENING, floor)
        else:
            # tail is down to roundoff; grow the degree on the measured residual alone
            target = None
            limit = min(d_max, 2 * stripper.steps)

    converged = residual <= tol
    if not converged:
        logger.warning(f"Residual {residual:.3e} above tol {tol:.1e} at degree {phases.degree}")

    lhs, rhs = plancherel_check(phases, f)
    halving = abs(rhs - log_mass(f.halved()))
    budget = 2.0 * max(stripped.tail, 0.0) + 2.0 * halving + 1e-10

    drift = dict(stripped.diagnostics)
    drift.update({
        "imag_leak": imag_leak,
        "quadrature_halving": halving,
        "plus_unitarity_defect": factors.plus.unitarity_defect(),
        "outer_residual": completed.outer_residual(),
        "rh_reconstruction": factors.reconstruction_error(completed.pair),
        "tail": stripped.tail,
    })
    drift.update({f"pair_{key}": value for key, value in completed.diagnostics().items()})

    report = SynthesisReport(
        phases=phases,
        degree=phases.degree,
        plancherel_lhs=lhs,
        plancherel_rhs=rhs,
        quadrature_budget=budget,
        hs_residual=residual,
        tol=tol,
        converged=converged,
        fp_iterations=factors.iterations,
        contraction_rate=factors.rate,
        epsilon=f.epsilon,
        pair_epsilon=pair_epsilon,
        grid_size=grid.size,
        coefficients=coefficients,
        drift=drift,
    )
    if not report.plancherel_ok:
        logger.warning(
            f"Plancherel gap {report.plancherel_gap:.3e} exceeds budget {budget:.3e}"
        )
    logger.info(f"Synthesized degree {report.degree}, residual {residual:.3e}")
    return report


@dataclass(frozen=True)
class SignalLipschitz:
    ratio: float
    bound: float
    phase_distance: float
    signal_distance: float
    degenerate: bool = False

    @property
    def holds(self) -> bool:
        return self.ratio <= self.bound


def lipschitz_bound(epsilon: float) -> float:
    return LIPSCHITZ_CONSTANT * epsilon ** -1.5


def lipschitz_probe(
    f: SignalSamples,
    f_tilde: SignalSamples,
    epsilon: Optional[float] = None,
    tol: float = 1e-8,
    **kwargs,
) -> SignalLipschitz:
    """||Psi - Psi~||_inf / ||f - f~||; 0 with the degenerate flag when f = f~."""
    if epsilon is None:
        epsilon = min(f.epsilon, f_tilde.epsilon)
    bound = lipschitz_bound(epsilon)

    signal_distance = weighted_distance(f, f_tilde)
    if signal_distance == 0:
        return SignalLipschitz(0.0, bound, 0.0, 0.0, degenerate=True)

    first = synthesize(f, tol=tol, **kwargs).phases
    second = synthesize(f_tilde, tol=tol, **kwargs).phases
    phase_distance = first.sup_distance(second)
    return SignalLipschitz(phase_distance / signal_distance, bound, phase_distance, signal_distance)


def lipschitz_sweep(
    pairs: Iterable[Tuple[SignalSamples, SignalSamples]],
    epsilon: float,
    **kwargs,
) -> List[SignalLipschitz]:
    results = [lipschitz_probe(f, g, epsilon, **kwargs) for f, g in pairs]
    if results:
        worst = max(r.ratio for r in results)
        logger.info(f"Lipschitz sweep over {len(results)} pairs: max ratio {worst:.3f}, bound {lipschitz_bound(epsilon):.3f}")
    return results


def _log_a_infinity(pair: SU2Pair) -> float:
    center = mean_value(pair.a)
    if center.real <= 0:
        raise NonPositiveAInfinity(f"a(inf) = {center:.3e} has nonpositive real part")
    return math.log(center.real)


def rho_metric(p: SU2Pair, q: SU2Pair) -> float:
    """||a - c||_2 + ||b - d||_2 + |log a(inf) - log c(inf)|"""
    p.grid.check_same(q.grid)
    return (
        p.a.distance(q.a)
        + p.b.distance(q.b)
        + abs(_log_a_infinity(p) - _log_a_infinity(q))
    )


@dataclass(frozen=True)
class RhoGluing:
    product_distance: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.product_distance <= self.bound + 1e-12


def rho_product_probe(
    left: CoeffSequence,
    left_tilde: CoeffSequence,
    right: CoeffSequence,
    right_tilde: CoeffSequence,
    grid: CircleGrid,
) -> RhoGluing:
    """rho of glued products against 2 rho(left) + 2 rho(right); left supports lie left of right ones."""
    for sequence in (left, left_tilde, right, right_tilde):
        check_grid_fits(sequence, grid)
    p, p_tilde = nlfs_finite(left, grid), nlfs_finite(left_tilde, grid)
    q, q_tilde = nlfs_finite(right, grid), nlfs_finite(right_tilde, grid)
    glued = rho_metric(su2_product(p, q), su2_product(p_tilde, q_tilde))
    return RhoGluing(glued, 2.0 * rho_metric(p, p_tilde) + 2.0 * rho_metric(q, q_tilde))
