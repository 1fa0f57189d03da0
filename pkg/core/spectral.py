"""
Analysis substrate on the unit circle.

Functions live on the uniform grid z_j = exp(2*pi*i*j/N). Fourier
coefficients follow c_n = (1/N) * sum_j g(z_j) z_j^(-n) on the window
[-N/2, N/2); the Nyquist coefficient n = -N/2 sits on the negative side.

With that window the two Cauchy projections satisfy
P_D g + P_D* g - mean(g) = g for every g, while the star identity
P_D* g = (P_D g*)* is exact whenever the Nyquist coefficient of g is zero.
Every nonlinear operation in this package keeps its content inside
[-N/4, N/4], so both hold there. Refining the grid is the only control on
aliasing for inputs that are not bandlimited.
"""

from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Union

import numpy as np

from .errors import GridError, GridMismatch, NonRealInput


MIN_GRID_SIZE = 8
REAL_TOLERANCE = 1e-12


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    """Get the smallest power of two >= n"""
    return 1 << max(int(n) - 1, 0).bit_length()


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class CircleGrid:
    size: int

    def __post_init__(self):
        if isinstance(self.size, bool) or not isinstance(self.size, (int, np.integer)):
            raise GridError(f"Grid size must be an integer, got {self.size!r}")
        if not is_power_of_two(int(self.size)) or self.size < MIN_GRID_SIZE:
            raise GridError(
                f"Grid size must be a power of two >= {MIN_GRID_SIZE}, got {self.size}"
            )
        object.__setattr__(self, "size", int(self.size))

    @cached_property
    def nodes(self) -> np.ndarray:
        return _frozen(np.exp(2j * np.pi * np.arange(self.size) / self.size))

    @cached_property
    def angles(self) -> np.ndarray:
        """Signal-side angles theta_j = pi*j/N, so that z_j = exp(2i*theta_j)"""
        return _frozen(np.pi * np.arange(self.size) / self.size)

    @cached_property
    def abscissae(self) -> np.ndarray:
        return _frozen(np.cos(self.angles))

    @cached_property
    def indices(self) -> np.ndarray:
        """Frequency index of each FFT slot: 0, 1, ..., N/2-1, -N/2, ..., -1"""
        return _frozen(np.fft.fftfreq(self.size, d=1.0 / self.size).round().astype(np.int64))

    @cached_property
    def reflection(self) -> np.ndarray:
        """Permutation j -> -j mod N, i.e. evaluation at z^(-1)"""
        return _frozen((-np.arange(self.size)) % self.size)

    def power(self, n: int) -> np.ndarray:
        """Samples of z^n, taken from the node table so that they are exact roots of unity."""
        return self.nodes[(np.arange(self.size) * int(n)) % self.size]

    def constant(self, value: complex) -> "CircleFunction":
        return CircleFunction(self, np.full(self.size, value, dtype=complex))

    def monomial(self, n: int, coefficient: complex = 1.0) -> "CircleFunction":
        return CircleFunction(self, coefficient * self.power(n))

    def check_same(self, other: "CircleGrid"):
        if self.size != other.size:
            raise GridMismatch(f"Grid sizes differ: {self.size} vs {other.size}")


class FourierCoefficients(Mapping):
    """Read-only view n -> c_n over the window [-N/2, N/2)."""

    def __init__(self, grid: CircleGrid, array: np.ndarray):
        self.grid = grid
        self.array = array

    def __getitem__(self, n: int) -> complex:
        half = self.grid.size // 2
        if not -half <= n < half:
            raise KeyError(n)
        return complex(self.array[n % self.grid.size])

    def __iter__(self) -> Iterator[int]:
        half = self.grid.size // 2
        return iter(range(-half, half))

    def __len__(self) -> int:
        return self.grid.size

    def get(self, n: int, default: complex = 0j) -> complex:
        try:
            return self[n]
        except KeyError:
            return default

    def ordered(self) -> np.ndarray:
        """Coefficients for n = -N/2 .. N/2-1 in increasing order"""
        return np.fft.fftshift(self.array)


@dataclass(frozen=True, eq=False)
class CircleFunction:
    grid: CircleGrid
    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.shape != (self.grid.size,):
            raise GridMismatch(
                f"Expected {self.grid.size} samples, got shape {samples.shape}"
            )
        object.__setattr__(self, "samples", _frozen(samples))

    @cached_property
    def coeffs(self) -> np.ndarray:
        """Fourier coefficients in FFT slot order (see CircleGrid.indices)"""
        return _frozen(np.fft.fft(self.samples) / self.grid.size)

    def _operand(self, other) -> np.ndarray:
        if isinstance(other, CircleFunction):
            self.grid.check_same(other.grid)
            return other.samples
        return other

    def __add__(self, other) -> "CircleFunction":
        return CircleFunction(self.grid, self.samples + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other) -> "CircleFunction":
        return CircleFunction(self.grid, self.samples - self._operand(other))

    def __rsub__(self, other) -> "CircleFunction":
        return CircleFunction(self.grid, self._operand(other) - self.samples)

    def __mul__(self, other) -> "CircleFunction":
        return CircleFunction(self.grid, self.samples * self._operand(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "CircleFunction":
        return CircleFunction(self.grid, self.samples / self._operand(other))

    def __neg__(self) -> "CircleFunction":
        return CircleFunction(self.grid, -self.samples)

    def conj(self) -> "CircleFunction":
        return star(self)

    def distance(self, other: "CircleFunction") -> float:
        return l2_norm(self - other)


CoefficientInput = Union[np.ndarray, Mapping]


def to_coeffs(g: CircleFunction) -> FourierCoefficients:
    return FourierCoefficients(g.grid, g.coeffs)


def from_coeffs(grid: CircleGrid, coefficients: CoefficientInput) -> CircleFunction:
    """Build a circle function from FFT-ordered coefficients or a mapping n -> c_n."""
    if isinstance(coefficients, Mapping):
        array = np.zeros(grid.size, dtype=complex)
        half = grid.size // 2
        for n, value in coefficients.items():
            if not -half <= n < half:
                raise GridMismatch(f"Coefficient index {n} outside [-{half}, {half})")
            array[n % grid.size] = value
    else:
        array = np.asarray(coefficients, dtype=complex)
        if array.shape != (grid.size,):
            raise GridMismatch(f"Expected {grid.size} coefficients, got shape {array.shape}")
    return CircleFunction(grid, np.fft.ifft(array) * grid.size)


def _apply_multiplier(g: CircleFunction, multiplier: np.ndarray) -> CircleFunction:
    return CircleFunction(g.grid, np.fft.ifft(g.coeffs * multiplier) * g.grid.size)


def cauchy_project_disk(g: CircleFunction) -> CircleFunction:
    """P_D: keep coefficients n >= 0."""
    return _apply_multiplier(g, g.grid.indices >= 0)


def cauchy_project_disk_star(g: CircleFunction) -> CircleFunction:
    """P_D*: keep coefficients n <= 0 (Nyquist included)."""
    return _apply_multiplier(g, g.grid.indices <= 0)


def hilbert_transform(g: CircleFunction) -> CircleFunction:
    """Conjugate function of a real g: multiplier -i*sign(n), zero at n = 0 and at Nyquist."""
    leak = float(np.max(np.abs(g.samples.imag))) if g.grid.size else 0.0
    if leak > REAL_TOLERANCE:
        raise NonRealInput(f"Hilbert transform needs real input, imaginary part {leak:.3e}")

    indices = g.grid.indices
    multiplier = -1j * np.sign(indices)
    multiplier[indices == -g.grid.size // 2] = 0
    coeffs = np.fft.fft(g.samples.real) / g.grid.size
    values = np.fft.ifft(coeffs * multiplier) * g.grid.size
    return CircleFunction(g.grid, values.real)


def mean_value(g: CircleFunction) -> complex:
    return complex(np.mean(g.samples))


def star(g: CircleFunction) -> CircleFunction:
    """a*(z) = conj(a(1/conj z)); on the circle this is pointwise conjugation."""
    return CircleFunction(g.grid, np.conj(g.samples))


def reflect(g: CircleFunction) -> CircleFunction:
    """g(z^(-1)) on the grid"""
    return CircleFunction(g.grid, g.samples[g.grid.reflection])


def l2_norm(g: CircleFunction) -> float:
    """Normalized L2(T) norm: sqrt(mean |g|^2)"""
    return float(np.sqrt(np.mean(np.abs(g.samples) ** 2)))


def wiener_norm(g: CircleFunction) -> float:
    """Wiener algebra norm: l1 norm of the Fourier coefficients"""
    return float(np.sum(np.abs(g.coeffs)))


def sup_norm(g: CircleFunction) -> float:
    return float(np.max(np.abs(g.samples)))


def outer_residual(a: CircleFunction) -> float:
    """|mean log|a| - log a(inf)|; zero for outer a with positive mean."""
    modulus = np.abs(a.samples)
    if np.any(modulus == 0):
        return float("inf")
    center = mean_value(a)
    if center == 0:
        return float("inf")
    return float(abs(np.mean(np.log(modulus)) - np.log(center)))


def bandwidth(g: CircleFunction, tol: float = 1e-12) -> int:
    """Largest |n| with |c_n| > tol, or -1 if g vanishes."""
    significant = np.abs(g.coeffs) > tol
    if not np.any(significant):
        return -1
    return int(np.max(np.abs(g.grid.indices[significant])))


def support_leak(g: CircleFunction, lo: int, hi: int) -> float:
    """Largest coefficient modulus of g outside the index window [lo, hi]"""
    indices = g.grid.indices
    outside = (indices < lo) | (indices > hi)
    if not np.any(outside):
        return 0.0
    return float(np.max(np.abs(g.coeffs[outside])))
