"""
SU(2) nonlinear Fourier series of finite sequences.

A pair (a, b) stands for the matrix [[a, b], [-b*, a*]]. The series of F on
[M, N] is the ordered product, left to right, of the factors
(1 + |F_n|^2)^(-1/2) (1, F_n z^n).
"""

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, NamedTuple, Optional

import numpy as np

from .errors import GridMismatch, GridTooCoarse, NonUnimodularFactor, OracleTooLarge
from .logger import logger
from .spectral import (
    CircleFunction,
    CircleGrid,
    from_coeffs,
    l2_norm,
    mean_value,
    next_power_of_two,
    outer_residual,
    reflect,
    star,
    support_leak,
    wiener_norm,
)


UNIT_MODULUS_TOLERANCE = 1e-12
SUPPORT_TOLERANCE = 1e-9

ORACLE_MAX_ORDER = 5
ORACLE_MAX_WIDTH = 32

# Reverse Wiener inequality only holds for small l1 radius
REVERSE_WIENER_RADIUS = 0.36


@dataclass(frozen=True, eq=False)
class CoeffSequence:
    """Finite sequence F_n on the window [start, stop]; zero outside."""

    start: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex).reshape(-1)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "start", int(self.start))

    @classmethod
    def empty(cls) -> "CoeffSequence":
        return cls(0, np.zeros(0, dtype=complex))

    @classmethod
    def zeros(cls, start: int, stop: int) -> "CoeffSequence":
        return cls(start, np.zeros(max(stop - start + 1, 0), dtype=complex))

    @classmethod
    def from_mapping(cls, entries: Mapping[int, complex]) -> "CoeffSequence":
        if not entries:
            return cls.empty()
        lo, hi = min(entries), max(entries)
        values = np.zeros(hi - lo + 1, dtype=complex)
        for n, value in entries.items():
            values[n - lo] = value
        return cls(lo, values)

    @property
    def width(self) -> int:
        return len(self.values)

    @property
    def stop(self) -> int:
        return self.start + self.width - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.start + self.width)

    def __len__(self) -> int:
        return self.width

    def __getitem__(self, n: int) -> complex:
        if self.start <= n <= self.stop:
            return complex(self.values[n - self.start])
        return 0j

    def items(self):
        return zip(self.indices.tolist(), self.values.tolist())

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values)))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.width else 0.0

    def _aligned(self, other: "CoeffSequence"):
        if self.width == 0:
            return other.start, np.zeros(other.width, dtype=complex), other.values.copy()
        if other.width == 0:
            return self.start, self.values.copy(), np.zeros(self.width, dtype=complex)
        lo = min(self.start, other.start)
        hi = max(self.stop, other.stop)
        left = np.zeros(hi - lo + 1, dtype=complex)
        right = np.zeros(hi - lo + 1, dtype=complex)
        left[self.start - lo:self.stop - lo + 1] = self.values
        right[other.start - lo:other.stop - lo + 1] = other.values
        return lo, left, right

    def __add__(self, other: "CoeffSequence") -> "CoeffSequence":
        lo, left, right = self._aligned(other)
        return CoeffSequence(lo, left + right)

    def __sub__(self, other: "CoeffSequence") -> "CoeffSequence":
        lo, left, right = self._aligned(other)
        return CoeffSequence(lo, left - right)

    def __mul__(self, scalar: complex) -> "CoeffSequence":
        return CoeffSequence(self.start, self.values * scalar)

    __rmul__ = __mul__

    def restrict(self, lo: int, hi: int) -> "CoeffSequence":
        """Entries on [lo, hi], window clipped to the current support."""
        lo, hi = max(lo, self.start), min(hi, self.stop)
        if lo > hi:
            return CoeffSequence.empty()
        return CoeffSequence(lo, self.values[lo - self.start:hi - self.start + 1])

    def nonnegative_part(self) -> "CoeffSequence":
        return self.restrict(0, max(self.stop, 0))

    def negative_part(self) -> "CoeffSequence":
        return self.restrict(min(self.start, -1), -1)

    def trimmed(self, tol: float = 0.0) -> "CoeffSequence":
        """Drop leading and trailing entries with modulus <= tol"""
        keep = np.nonzero(np.abs(self.values) > tol)[0]
        if len(keep) == 0:
            return CoeffSequence.empty()
        return CoeffSequence(self.start + keep[0], self.values[keep[0]:keep[-1] + 1])

    def extent(self) -> int:
        """max |n| over the window"""
        if self.width == 0:
            return 0
        return max(abs(self.start), abs(self.stop))

    def symmetry_defect(self) -> float:
        """sup_n max(|F_n - F_-n|, |Re F_n|); zero for the QSP (even, imaginary) class."""
        if self.width == 0:
            return 0.0
        lo, hi = -self.extent(), self.extent()
        full = np.array([self[n] for n in range(lo, hi + 1)])
        even = np.max(np.abs(full - full[::-1]))
        imaginary = np.max(np.abs(full.real))
        return float(max(even, imaginary))

    def distance_sup(self, other: "CoeffSequence") -> float:
        return (self - other).sup_norm()


@dataclass(frozen=True, eq=False)
class SU2Pair:
    a: CircleFunction
    b: CircleFunction

    def __post_init__(self):
        self.a.grid.check_same(self.b.grid)

    @classmethod
    def identity(cls, grid: CircleGrid) -> "SU2Pair":
        return cls(grid.constant(1.0), grid.constant(0.0))

    @property
    def grid(self) -> CircleGrid:
        return self.a.grid

    def determinant(self) -> np.ndarray:
        return np.abs(self.a.samples) ** 2 + np.abs(self.b.samples) ** 2

    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.determinant() - 1.0)))

    def a_infinity(self) -> complex:
        return mean_value(self.a)

    def matrices(self) -> np.ndarray:
        """(N, 2, 2) array of [[a, b], [-b*, a*]] at each node"""
        a, b = self.a.samples, self.b.samples
        out = np.empty((len(a), 2, 2), dtype=complex)
        out[:, 0, 0] = a
        out[:, 0, 1] = b
        out[:, 1, 0] = -np.conj(b)
        out[:, 1, 1] = np.conj(a)
        return out

    def h_norm(self) -> float:
        """sqrt(||a||^2 + ||b||^2) in normalized L2(T)"""
        return float(np.hypot(l2_norm(self.a), l2_norm(self.b)))

    def h_distance(self, other: "SU2Pair") -> float:
        return float(np.hypot(self.a.distance(other.a), self.b.distance(other.b)))

    def sup_distance(self, other: "SU2Pair") -> float:
        self.grid.check_same(other.grid)
        return float(max(
            np.max(np.abs(self.a.samples - other.a.samples)),
            np.max(np.abs(self.b.samples - other.b.samples)),
        ))

    def scaled(self, factor) -> "SU2Pair":
        return SU2Pair(self.a * factor, self.b * factor)


def su2_product(p: SU2Pair, q: SU2Pair) -> SU2Pair:
    """(a, b)(c, d) = (ac - b d*, ad + b c*)"""
    if p.grid.size != q.grid.size:
        raise GridMismatch(f"Cannot multiply pairs on grids {p.grid.size} and {q.grid.size}")
    a, b = p.a.samples, p.b.samples
    c, d = q.a.samples, q.b.samples
    return SU2Pair(
        CircleFunction(p.grid, a * c - b * np.conj(d)),
        CircleFunction(p.grid, a * d + b * np.conj(c)),
    )


def check_grid_fits(F: CoeffSequence, grid: CircleGrid):
    if F.width == 0:
        return
    if grid.size < 4 * F.width or F.extent() > grid.size // 4:
        raise GridTooCoarse(
            f"Grid of size {grid.size} too coarse for window [{F.start}, {F.stop}]; "
            f"need N >= 4*width and support inside [-N/4, N/4]"
        )


def grid_for(*sequences: CoeffSequence, minimum: int = 64) -> CircleGrid:
    """Smallest power-of-two grid with comfortable room for all windows"""
    need = minimum
    for F in sequences:
        need = max(need, 8 * F.width, 8 * F.extent() + 8)
    return CircleGrid(next_power_of_two(need))


def nlfs_finite(F: CoeffSequence, grid: CircleGrid) -> SU2Pair:
    """Forward series of F by pointwise 2x2 products, factors in increasing n."""
    check_grid_fits(F, grid)

    a = np.ones(grid.size, dtype=complex)
    b = np.zeros(grid.size, dtype=complex)
    for n, value in F.items():
        if value == 0:
            continue
        scale = 1.0 / math.sqrt(1.0 + abs(value) ** 2)
        zn = grid.power(n)
        # (a, b)(s, s F z^n) = s(a - b conj(F) z^-n, a F z^n + b)
        a, b = scale * (a - b * np.conj(value * zn)), scale * (a * value * zn + b)

    pair = SU2Pair(CircleFunction(grid, a), CircleFunction(grid, b))

    if F.width:
        leak = max(
            support_leak(pair.b, F.start, F.stop),
            support_leak(pair.a, F.start - F.stop, 0),
        )
        if leak > SUPPORT_TOLERANCE:
            logger.warning(f"NLFS support leak {leak:.3e} on window [{F.start}, {F.stop}]")

    return pair


def nlfs_matrices(F: CoeffSequence, z: np.ndarray) -> np.ndarray:
    """Ordered product G(z) as an (len(z), 2, 2) array at arbitrary points of T."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    result = np.broadcast_to(np.eye(2, dtype=complex), (len(z), 2, 2)).copy()
    for n, value in F.items():
        if value == 0:
            continue
        scale = 1.0 / math.sqrt(1.0 + abs(value) ** 2)
        bn = value * z ** n
        factor = np.empty((len(z), 2, 2), dtype=complex)
        factor[:, 0, 0] = scale
        factor[:, 0, 1] = scale * bn
        factor[:, 1, 0] = -scale * np.conj(bn)
        factor[:, 1, 1] = scale
        result = result @ factor
    return result


def a_infinity_product(F: CoeffSequence) -> float:
    """prod (1 + |F_n|^2)^(-1/2)"""
    return float(np.exp(-0.5 * np.sum(np.log1p(np.abs(F.values) ** 2))))


@dataclass(frozen=True)
class SymmetryTransform:
    """A transformed sequence together with the predicted action on its series."""

    name: str
    original: CoeffSequence
    sequence: CoeffSequence
    predict: Callable[[SU2Pair], SU2Pair]

    def deviation(self, grid: Optional[CircleGrid] = None) -> float:
        if grid is None:
            grid = grid_for(self.original, self.sequence)
        expected = self.predict(nlfs_finite(self.original, grid))
        actual = nlfs_finite(self.sequence, grid)
        return expected.sup_distance(actual)

    def check(self, grid: Optional[CircleGrid] = None, tol: float = 1e-11) -> bool:
        deviation = self.deviation(grid)
        if deviation > tol:
            logger.warning(f"Symmetry {self.name} violated on grid: {deviation:.3e}")
        return deviation <= tol


def symmetry_shift(F: CoeffSequence) -> SymmetryTransform:
    """F_n -> F_(n-1); predicts (a, z b)."""
    def predict(pair: SU2Pair) -> SU2Pair:
        return SU2Pair(pair.a, pair.b * pair.grid.nodes)

    return SymmetryTransform("shift", F, CoeffSequence(F.start + 1, F.values), predict)


def symmetry_modulate(F: CoeffSequence, c: complex) -> SymmetryTransform:
    """F -> cF with |c| = 1; predicts (a, c b)."""
    if abs(abs(c) - 1.0) > UNIT_MODULUS_TOLERANCE:
        raise NonUnimodularFactor(f"Modulation factor must have modulus 1, got |c| = {abs(c)}")

    def predict(pair: SU2Pair) -> SU2Pair:
        return SU2Pair(pair.a, pair.b * c)

    return SymmetryTransform("modulate", F, F * c, predict)


def symmetry_reflect(F: CoeffSequence) -> SymmetryTransform:
    """F_n -> F_(-n); predicts (a*(1/z), b(1/z))."""
    def predict(pair: SU2Pair) -> SU2Pair:
        return SU2Pair(reflect(star(pair.a)), reflect(pair.b))

    reflected = CoeffSequence(-F.stop, F.values[::-1]) if F.width else F
    return SymmetryTransform("reflect", F, reflected, predict)


def symmetry_conjugate(F: CoeffSequence) -> SymmetryTransform:
    """F_n -> conj(F_n); predicts (a*(1/z), b*(1/z))."""
    def predict(pair: SU2Pair) -> SU2Pair:
        return SU2Pair(reflect(star(pair.a)), reflect(star(pair.b)))

    return SymmetryTransform("conjugate", F, CoeffSequence(F.start, np.conj(F.values)), predict)


class PlancherelPair(NamedTuple):
    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)


def plancherel_finite(F: CoeffSequence, grid: Optional[CircleGrid] = None) -> PlancherelPair:
    """lhs = sum log(1+|F_n|^2); rhs = -mean log(1 - |b|^2) over the grid."""
    if grid is None:
        grid = grid_for(F, minimum=4096)
    lhs = float(np.sum(np.log1p(np.abs(F.values) ** 2)))
    pair = nlfs_finite(F, grid)

    outer = outer_residual(pair.a)
    if outer > 1e-8:
        logger.warning(f"a is not outer on the grid (residual {outer:.3e}); Plancherel gap expected")

    rhs = float(-np.mean(np.log1p(-np.abs(pair.b.samples) ** 2)))
    return PlancherelPair(lhs, rhs)


def multilinear_T(n: int, F: CoeffSequence, grid: CircleGrid) -> CircleFunction:
    """Sum over j_1 < ... < j_n of alternating F_j z^j and -conj(F_j) z^-j factors."""
    if n < 0:
        raise OracleTooLarge(f"Order must be nonnegative, got {n}")
    if n > ORACLE_MAX_ORDER or F.width > ORACLE_MAX_WIDTH:
        raise OracleTooLarge(
            f"Brute-force oracle limited to n <= {ORACLE_MAX_ORDER} and width <= "
            f"{ORACLE_MAX_WIDTH}, got n = {n}, width = {F.width}"
        )
    if n == 0:
        return grid.constant(1.0)

    support = [(j, value) for j, value in F.items() if value != 0]
    monomials: Dict[int, complex] = {}
    for chosen in itertools.combinations(support, n):
        coefficient = 1.0 + 0j
        exponent = 0
        for k, (j, value) in enumerate(chosen):
            if k % 2 == 0:
                coefficient *= value
                exponent += j
            else:
                coefficient *= -np.conj(value)
                exponent -= j
        monomials[exponent] = monomials.get(exponent, 0j) + coefficient

    half = grid.size // 2
    if monomials and max(abs(e) for e in monomials) >= half:
        raise GridTooCoarse(f"Multilinear term of order {n} aliases on grid {grid.size}")
    return from_coeffs(grid, monomials)


@dataclass(frozen=True)
class MultilinearApproximation:
    pair: SU2Pair
    order: int
    tail_bound: float


def nlfs_via_multilinear(F: CoeffSequence, n_max: int, grid: CircleGrid) -> MultilinearApproximation:
    """Truncated multilinear expansion a = C sum T_even, b = C sum T_odd."""
    radius = F.l1_norm()
    if radius > 0.5:
        logger.warning(f"l1 norm {radius:.3f} > 0.5; multilinear tail bound is weak")

    normalizer = a_infinity_product(F)
    a = grid.constant(0.0)
    b = grid.constant(0.0)
    for n in range(n_max + 1):
        term = multilinear_T(n, F, grid)
        if n % 2 == 0:
            a = a + term
        else:
            b = b + term

    m = n_max + 1
    tail = radius ** m / math.factorial(m) * math.exp(radius)
    return MultilinearApproximation(SU2Pair(a * normalizer, b * normalizer), n_max, tail)


@dataclass(frozen=True)
class WienerProbe:
    b_distance: float  # ||b - b'||_A
    coeff_distance: float  # ||F - F'||_1
    radius: float
    forward_holds: bool
    reverse_checked: bool
    reverse_holds: bool

    @property
    def forward_bound(self) -> float:
        return math.exp(self.radius) * self.coeff_distance

    @property
    def holds(self) -> bool:
        return self.forward_holds and (self.reverse_holds or not self.reverse_checked)


def wiener_lipschitz_probe(
    F: CoeffSequence,
    F_prime: CoeffSequence,
    radius: Optional[float] = None,
    grid: Optional[CircleGrid] = None,
) -> WienerProbe:
    if radius is None:
        radius = max(F.l1_norm(), F_prime.l1_norm())
    if grid is None:
        grid = grid_for(F, F_prime)

    coeff_distance = (F - F_prime).l1_norm()
    b = nlfs_finite(F, grid).b
    b_prime = nlfs_finite(F_prime, grid).b
    b_distance = wiener_norm(b - b_prime)

    slack = 1e-12
    forward = b_distance <= math.exp(radius) * coeff_distance + slack
    reverse_checked = radius <= REVERSE_WIENER_RADIUS
    reverse = coeff_distance <= 2.0 * b_distance + slack if reverse_checked else True

    if not forward or not reverse:
        logger.warning(
            f"Wiener bound failed: |b-b'|_A={b_distance:.3e}, |F-F'|_1={coeff_distance:.3e}, R={radius}"
        )
    return WienerProbe(b_distance, coeff_distance, radius, forward, reverse_checked, reverse)


def linf_lipschitz_probe(F: CoeffSequence, F_prime: CoeffSequence, grid: Optional[CircleGrid] = None) -> float:
    """sup |b - b'| / ||F - F'||_1; bounded by 3 for every pair of l1 sequences."""
    distance = (F - F_prime).l1_norm()
    if distance == 0:
        return 0.0
    if grid is None:
        grid = grid_for(F, F_prime)
    b = nlfs_finite(F, grid).b
    b_prime = nlfs_finite(F_prime, grid).b
    return float(np.max(np.abs(b.samples - b_prime.samples))) / distance
