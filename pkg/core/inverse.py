"""
Inverse nonlinear Fourier transform on the grid.

complete_outer turns b into an outer a with |a|^2 + |b|^2 = 1,
rh_factorize splits (a, b) = (a-, b-)(a+, b+) by the contraction

    (A, B) -> ((1 - P_D(r B*))*, P_D(r A)),   r = b / a,

whose fixed point is a+(inf) (a+, b+), and LayerStripper peels the plus
factor one coefficient at a time.

The B_eps lower bound on |a| is stated on D*; since log|a| is harmonic
there with boundary values log sqrt(1 - |b|^2), its infimum is attained
on T and the grid check is the only one performed.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .errors import (
    ContractionBroken,
    DegenerateA,
    NoConvergence,
    PlancherelViolation,
    SignalTooLarge,
    TailNotDecaying,
)
from .logger import logger
from .nlfs import CoeffSequence, SU2Pair, su2_product
from .spectral import (
    CircleFunction,
    cauchy_project_disk,
    hilbert_transform,
    mean_value,
    outer_residual,
    star,
)


ETA = 3 ** 1.5 / 2
HALF_SQRT = 2 ** -0.5

DEFAULT_TOL_FP = 1e-12
# Residual ratios below this level are roundoff, not contraction
RATE_NOISE_FLOOR = 1e-11
DEGENERATE_A = 1e-8
# The tail -2 log a_n(inf) plateaus at roundoff that grows with the grid size
TAIL_NOISE_FLOOR = 1e-13
TAIL_ROUNDOFF = 1e-14

RENORMALIZE_EVERY = 64
OUTER_CHECK_EVERY = 16
OUTER_WARN_LEVEL = 1e-8


@dataclass(frozen=True)
class BEpsilonPair:
    pair: SU2Pair
    epsilon: float

    @property
    def ratio(self) -> np.ndarray:
        return self.pair.b.samples / self.pair.a.samples

    def margin(self) -> float:
        """min_j |a(z_j)| - 2^(-1/2)"""
        return float(np.min(np.abs(self.pair.a.samples))) - HALF_SQRT

    def ratio_bound(self) -> float:
        return 1.0 - ETA * self.epsilon

    def sup_ratio(self) -> float:
        return float(np.max(np.abs(self.ratio)))

    def outer_residual(self) -> float:
        return outer_residual(self.pair.a)

    def diagnostics(self) -> Dict[str, float]:
        return {
            "margin": self.margin(),
            "sup_ratio": self.sup_ratio(),
            "ratio_bound": self.ratio_bound(),
            "outer_residual": self.outer_residual(),
            "unitarity_defect": self.pair.unitarity_defect(),
        }


def complete_outer(b: CircleFunction, epsilon: float) -> BEpsilonPair:
    """Outer a = exp(M - iHM) with M = log sqrt(1 - |b|^2)."""
    allowed = 1.0 - (HALF_SQRT + epsilon) ** 2
    peak = float(np.max(np.abs(b.samples) ** 2))
    if peak > allowed + 1e-12:
        raise SignalTooLarge(
            f"sup |b|^2 = {peak:.6g} exceeds 1 - (2^(-1/2) + eps)^2 = {allowed:.6g} "
            f"for eps = {epsilon:.6g}"
        )

    log_modulus = CircleFunction(b.grid, 0.5 * np.log1p(-np.abs(b.samples) ** 2))
    conjugate = hilbert_transform(log_modulus)
    a = CircleFunction(b.grid, np.exp(log_modulus.samples.real - 1j * conjugate.samples.real))

    result = BEpsilonPair(SU2Pair(a, b), epsilon)
    residual = result.outer_residual()
    if residual > 1e-9:
        logger.warning(f"Outer completion residual {residual:.3e} on grid {b.grid.size}")
    return result


@dataclass(frozen=True)
class RHFactors:
    minus: SU2Pair
    plus: SU2Pair
    a_plus_infinity: float
    iterations: int
    rate: float
    residuals: List[float] = field(default_factory=list)
    fixed_point_norm: float = 0.0  # ||(A, B)||_H before normalization

    def reconstruction_error(self, pair: SU2Pair) -> float:
        return su2_product(self.minus, self.plus).sup_distance(pair)


def default_max_iter(epsilon: float, tol_fp: float, sup_ratio: float) -> int:
    q = 1.0 - ETA * epsilon
    if not 0.0 < q < 1.0:
        q = sup_ratio
    if q <= 0.0:
        return 17
    return int(math.ceil(math.log(tol_fp) / math.log(q))) + 16


def _fixed_point(p: BEpsilonPair, tol_fp: float, max_iter: Optional[int]):
    grid = p.pair.grid
    r = CircleFunction(grid, p.ratio)
    if max_iter is None:
        max_iter = default_max_iter(p.epsilon, tol_fp, p.sup_ratio())

    A = grid.constant(1.0)
    B = grid.constant(0.0)
    residuals: List[float] = []
    rate = 0.0

    for iteration in range(1, max_iter + 1):
        A_next = star(1.0 - cauchy_project_disk(r * star(B)))
        B_next = cauchy_project_disk(r * A)
        residual = float(math.hypot(A_next.distance(A), B_next.distance(B)))
        A, B = A_next, B_next

        if residuals and residuals[-1] > RATE_NOISE_FLOOR:
            ratio = residual / residuals[-1]
            if ratio > 1.0:
                raise ContractionBroken(
                    f"Fixed-point residual grew by {ratio:.3f} at iteration {iteration}"
                )
            rate = max(rate, ratio)
        residuals.append(residual)
        logger.debug(f"RH iteration {iteration}: residual {residual:.3e}")

        if residual <= tol_fp:
            return A, B, iteration, rate, residuals

    raise NoConvergence(
        f"Fixed point not within {tol_fp:.1e} after {max_iter} iterations "
        f"(last residual {residuals[-1]:.3e})"
    )


def rh_factorize(
    p: BEpsilonPair,
    tol_fp: float = DEFAULT_TOL_FP,
    max_iter: Optional[int] = None,
) -> RHFactors:
    A, B, iterations, rate, residuals = _fixed_point(p, tol_fp, max_iter)

    a_inf_squared = mean_value(A).real
    if a_inf_squared <= 0:
        raise DegenerateA(f"Fixed point has A(inf) = {a_inf_squared:.3e}")
    fixed_point = SU2Pair(A, B)
    plus = fixed_point.scaled(1.0 / math.sqrt(a_inf_squared))
    minus = su2_product(p.pair, SU2Pair(star(plus.a), -plus.b))

    logger.debug(
        f"RH factorization: {iterations} iterations, rate {rate:.3f}, "
        f"a+(inf) {math.sqrt(a_inf_squared):.12f}"
    )
    return RHFactors(
        minus, plus, math.sqrt(a_inf_squared), iterations, rate, residuals, fixed_point.h_norm()
    )


def contraction_rate(p: BEpsilonPair, tol_fp: float = DEFAULT_TOL_FP) -> float:
    """Largest observed ratio of successive fixed-point residuals."""
    return _fixed_point(p, tol_fp, None)[3]


def fixed_point_norm_bound(epsilon: float) -> float:
    """||(A, B)||_H <= 1 / (eta eps)"""
    return 1.0 / (ETA * epsilon)


@dataclass(frozen=True)
class LayerStep:
    coefficient: complex
    next: SU2Pair
    drift: float  # |zeroth coefficient| discarded by the division by z


def _strip(a: np.ndarray, b: np.ndarray, nodes: np.ndarray):
    a_mean = np.mean(a)
    if abs(a_mean) < DEGENERATE_A:
        raise DegenerateA(f"|a(inf)| = {abs(a_mean):.3e} too small to strip a layer")
    y = np.mean(b) / np.conj(a_mean)
    scale = 1.0 / math.sqrt(1.0 + abs(y) ** 2)
    # (1, -y)(a, b) = (a + y b*, b - y a*)
    a_next = scale * (a + y * np.conj(b))
    b_next = scale * (b - y * np.conj(a))
    residue = np.mean(b_next)
    b_next = (b_next - residue) * np.conj(nodes)
    return complex(y), a_next, b_next, abs(residue)


def layer_strip_step(plus: SU2Pair) -> LayerStep:
    """F_0 = b(0)/a*(0) and the next pair (1+|y|^2)^(-1/2)(1, -y)(a, b) with b divided by z."""
    y, a_next, b_next, drift = _strip(plus.a.samples, plus.b.samples, plus.grid.nodes)
    grid = plus.grid
    return LayerStep(y, SU2Pair(CircleFunction(grid, a_next), CircleFunction(grid, b_next)), drift)


@dataclass(frozen=True)
class LayerStripResult:
    coefficients: CoeffSequence
    tail: float
    converged: bool
    diagnostics: Dict[str, float]


class LayerStripper:
    """Resumable layer stripping of a plus factor (b in H2(D), a in H2(D*))."""

    def __init__(
        self,
        plus: SU2Pair,
        renormalize_every: int = RENORMALIZE_EVERY,
        outer_check_every: int = OUTER_CHECK_EVERY,
    ):
        self.grid = plus.grid
        self.a = plus.a.samples.copy()
        self.b = plus.b.samples.copy()
        self.renormalize_every = renormalize_every
        self.outer_check_every = outer_check_every

        self.a_infinity = float(np.mean(self.a).real)
        self.coefficients: List[complex] = []
        self.tails: List[float] = [self.tail]
        self.strip_drift = 0.0
        self.max_unitarity_defect = 0.0
        self.max_outer_residual = 0.0
        self.renormalizations = 0

    @property
    def steps(self) -> int:
        return len(self.coefficients)

    @property
    def noise_floor(self) -> float:
        """Tail level below which a stall is roundoff rather than a non-outer a"""
        return max(TAIL_NOISE_FLOOR, TAIL_ROUNDOFF * self.grid.size)

    @property
    def tail(self) -> float:
        """Remaining Plancherel mass -2 log a_n(inf) of the unstripped pair"""
        center = float(np.mean(self.a).real)
        if center <= 0:
            return float("inf")
        return -2.0 * math.log(center)

    def pair(self) -> SU2Pair:
        return SU2Pair(CircleFunction(self.grid, self.a), CircleFunction(self.grid, self.b))

    def step(self) -> complex:
        y, self.a, self.b, drift = _strip(self.a, self.b, self.grid.nodes)
        self.coefficients.append(y)
        self.strip_drift += drift

        defect = float(np.max(np.abs(np.abs(self.a) ** 2 + np.abs(self.b) ** 2 - 1.0)))
        self.max_unitarity_defect = max(self.max_unitarity_defect, defect)

        if self.renormalize_every and self.steps % self.renormalize_every == 0:
            norm = np.sqrt(np.abs(self.a) ** 2 + np.abs(self.b) ** 2)
            self.a = self.a / norm
            self.b = self.b / norm
            self.renormalizations += 1

        if self.outer_check_every and self.steps % self.outer_check_every == 0:
            residual = outer_residual(CircleFunction(self.grid, self.a))
            self.max_outer_residual = max(self.max_outer_residual, residual)
            if residual > OUTER_WARN_LEVEL:
                logger.warning(f"Outerness drift {residual:.3e} after {self.steps} layers")

        self.tails.append(self.tail)
        return y

    def run(self, d_max: int, tail_tol: Optional[float] = None) -> LayerStripResult:
        """Strip until the tail is within tail_tol or coefficients F_0..F_d_max exist."""
        limit = d_max + 1
        while self.steps < limit:
            if tail_tol is not None and self.tail <= tail_tol:
                break
            self.step()

        converged = tail_tol is None or self.tail <= tail_tol
        if not converged and self._stagnated():
            raise TailNotDecaying(
                f"Plancherel tail {self.tail:.3e} stalled above {tail_tol:.1e} after {self.steps} layers"
            )
        self._check_plancherel()
        return self.result(converged)

    def _stagnated(self) -> bool:
        if self.steps < 8 or self.tail <= self.noise_floor:
            return False
        earlier = self.tails[(3 * self.steps) // 4]
        return self.tail > 0.99 * earlier

    def _check_plancherel(self):
        product = math.exp(-0.5 * sum(math.log1p(abs(y) ** 2) for y in self.coefficients))
        if product < self.a_infinity - 1e-8:
            raise PlancherelViolation(
                f"prod (1+|F_n|^2)^(-1/2) = {product:.12f} below a(inf) = {self.a_infinity:.12f}"
            )

    def result(self, converged: bool = True) -> LayerStripResult:
        if self.coefficients:
            sequence = CoeffSequence(0, np.array(self.coefficients))
        else:
            sequence = CoeffSequence.empty()
        return LayerStripResult(
            coefficients=sequence,
            tail=self.tail,
            converged=converged,
            diagnostics={
                "strip_drift": self.strip_drift,
                "max_unitarity_defect": self.max_unitarity_defect,
                "max_outer_residual": self.max_outer_residual,
                "renormalizations": float(self.renormalizations),
            },
        )


def layer_strip_all(
    plus: SU2Pair,
    d_max: int,
    tail_tol: Optional[float] = None,
) -> CoeffSequence:
    return LayerStripper(plus).run(d_max, tail_tol).coefficients


@dataclass(frozen=True)
class LipschitzProbe:
    ratio: float
    bound: float
    degenerate: bool = False

    @property
    def holds(self) -> bool:
        return self.ratio <= self.bound


def plus_lipschitz_bound(epsilon: float) -> float:
    return (2 ** 2.5 + 4) * (ETA * epsilon) ** -1.5


def layer_lipschitz_bound(epsilon: float) -> float:
    return (8 + 2 ** 2.5) * (ETA * epsilon) ** -1.5


def plus_lipschitz_probe(p: BEpsilonPair, q: BEpsilonPair, tol_fp: float = DEFAULT_TOL_FP) -> LipschitzProbe:
    """||(a+, b+) - (c+, d+)||_H against ||(a, b) - (c, d)||_H."""
    bound = plus_lipschitz_bound(min(p.epsilon, q.epsilon))
    distance = p.pair.h_distance(q.pair)
    if distance == 0:
        return LipschitzProbe(0.0, bound, degenerate=True)
    left = rh_factorize(p, tol_fp).plus
    right = rh_factorize(q, tol_fp).plus
    return LipschitzProbe(left.h_distance(right) / distance, bound)


def layer_lipschitz_probe(p: BEpsilonPair, q: BEpsilonPair, tol_fp: float = DEFAULT_TOL_FP) -> LipschitzProbe:
    """|F_0 - F~_0| against ||(a, b) - (c, d)||_H."""
    bound = layer_lipschitz_bound(min(p.epsilon, q.epsilon))
    distance = p.pair.h_distance(q.pair)
    if distance == 0:
        return LipschitzProbe(0.0, bound, degenerate=True)
    first = layer_strip_step(rh_factorize(p, tol_fp).plus).coefficient
    second = layer_strip_step(rh_factorize(q, tol_fp).plus).coefficient
    return LipschitzProbe(abs(first - second) / distance, bound)
