"""Symmetric QSP unitaries and the phase <-> coefficient correspondence."""

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence

import numpy as np

from .errors import DegreeOutOfRange, InvalidInput, PhaseOutOfRange, SymmetryViolation
from .nlfs import CoeffSequence, nlfs_matrices


PHASE_MARGIN = 1e-12
SYMMETRY_TOLERANCE = 1e-9
UNITARY_TOLERANCE = 1e-12

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class PhaseSequence:
    """Phases psi_0..psi_K, each strictly inside (-pi/2, pi/2)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if len(values) == 0:
            raise InvalidInput("A phase sequence needs at least psi_0")
        if not np.all(np.isfinite(values)):
            raise PhaseOutOfRange("Phases must be finite")
        worst = float(np.max(np.abs(values)))
        if worst >= math.pi / 2 - PHASE_MARGIN:
            raise PhaseOutOfRange(f"Phase magnitude {worst!r} not inside (-pi/2, pi/2)")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, degree: int = 0) -> "PhaseSequence":
        return cls(np.zeros(degree + 1))

    @property
    def degree(self) -> int:
        return len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        return float(self.values[k]) if 0 <= k < len(self.values) else 0.0

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, len(self.values)))
        out[:len(self.values)] = self.values
        return out

    def sup_distance(self, other: "PhaseSequence") -> float:
        """||Psi - Psi'||_inf, the shorter sequence padded with zeros"""
        length = max(len(self), len(other))
        return float(np.max(np.abs(self.padded(length) - other.padded(length))))

    def tolist(self) -> List[float]:
        return [float(v) for v in self.values]


class Unitary2(NamedTuple):
    u00: complex
    u01: complex
    u10: complex
    u11: complex

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Unitary2":
        return cls(complex(matrix[0, 0]), complex(matrix[0, 1]),
                   complex(matrix[1, 0]), complex(matrix[1, 1]))

    def matrix(self) -> np.ndarray:
        return np.array([[self.u00, self.u01], [self.u10, self.u11]], dtype=complex)

    def unitarity_defect(self) -> float:
        m = self.matrix()
        return float(np.max(np.abs(m @ m.conj().T - np.eye(2))))

    def determinant_defect(self) -> float:
        return abs(abs(np.linalg.det(self.matrix())) - 1.0)


def _check_degree(psi: PhaseSequence, d: int):
    if d < 0 or d > psi.degree:
        raise DegreeOutOfRange(f"Degree {d} outside [0, {psi.degree}]")


def _check_abscissae(xs: np.ndarray):
    if np.any(xs < 0.0) or np.any(xs > 1.0) or not np.all(np.isfinite(xs)):
        raise InvalidInput("Abscissae must lie in [0, 1]")


def signal_rotation(xs: np.ndarray) -> np.ndarray:
    """W(x) = [[x, i sqrt(1-x^2)], [i sqrt(1-x^2), x]] for each x, shape (M, 2, 2)"""
    xs = np.asarray(xs, dtype=float)
    s = 1j * np.sqrt(np.clip(1.0 - xs ** 2, 0.0, None))
    w = np.empty((len(xs), 2, 2), dtype=complex)
    w[:, 0, 0] = xs
    w[:, 0, 1] = s
    w[:, 1, 0] = s
    w[:, 1, 1] = xs
    return w


def qsp_response_batch(psi: PhaseSequence, d: int, xs: Sequence[float]) -> np.ndarray:
    """U_d(Psi, x) for many x at once, shape (M, 2, 2)."""
    _check_degree(psi, d)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    _check_abscissae(xs)

    w = signal_rotation(xs)
    u = np.zeros((len(xs), 2, 2), dtype=complex)
    u[:, 0, 0] = np.exp(1j * psi[0])
    u[:, 1, 1] = np.exp(-1j * psi[0])
    for k in range(1, d + 1):
        phase = np.exp(2j * psi[k])
        # E X E with E = exp(i psi Z) is X scaled entrywise
        sandwich = np.array([[phase, 1.0], [1.0, np.conj(phase)]])
        u = (w @ u @ w) * sandwich
    return u


def qsp_unitary(psi: PhaseSequence, d: int, x: float) -> Unitary2:
    return Unitary2.from_matrix(qsp_response_batch(psi, d, [x])[0])


def qsp_response(psi: PhaseSequence, d: int, x: float) -> float:
    """Im of the upper-left entry of U_d(Psi, x)"""
    return float(qsp_response_batch(psi, d, [x])[0, 0, 0].imag)


def response_on_abscissae(psi: PhaseSequence, d: int, xs: np.ndarray) -> np.ndarray:
    """Im u_d at arbitrary x in [-1, 1], using that the response is even in x."""
    return qsp_response_batch(psi, d, np.abs(np.asarray(xs, dtype=float)))[:, 0, 0].imag


def phases_to_coeffs(psi: PhaseSequence) -> CoeffSequence:
    """F_n = i tan(psi_|n|) on [-K, K]"""
    half = 1j * np.tan(psi.values)
    values = np.concatenate([half[:0:-1], half])
    return CoeffSequence(-psi.degree, values)


def coeffs_to_phases(F: CoeffSequence) -> PhaseSequence:
    """psi_n = arctan(F_n / i) for n >= 0; F must be even and purely imaginary."""
    defect = F.symmetry_defect()
    if defect > SYMMETRY_TOLERANCE:
        raise SymmetryViolation(f"Sequence is not even and purely imaginary (defect {defect:.3e})")
    if F.width == 0:
        return PhaseSequence.zeros()
    top = F.extent()
    values = np.array([F[n] for n in range(top + 1)])
    return PhaseSequence(np.arctan((values / 1j).real))


def half_angles(xs: np.ndarray) -> np.ndarray:
    """theta in [0, pi/2] with cos(theta) = x, via atan2 for stability near x = 1"""
    xs = np.asarray(xs, dtype=float)
    return np.arctan2(np.sqrt(np.clip(1.0 - xs ** 2, 0.0, None)), xs)


def truncated_coeffs(psi: PhaseSequence, d: int) -> CoeffSequence:
    return phases_to_coeffs(PhaseSequence(psi.values[:d + 1]))


def correspondence_deviation(psi: PhaseSequence, d: int, xs: Sequence[float]) -> np.ndarray:
    """Max entrywise |M U_d M - D G_d(z) D| per abscissa, D = diag(e^{id theta}, e^{-id theta})."""
    _check_degree(psi, d)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    lhs = HADAMARD @ qsp_response_batch(psi, d, xs) @ HADAMARD

    theta = half_angles(xs)
    z = np.exp(2j * theta)
    g = nlfs_matrices(truncated_coeffs(psi, d), z)
    phase = np.exp(1j * d * theta)
    # D G D scales entry (j, k) by D_j D_k
    rhs = g.copy()
    rhs[:, 0, 0] *= phase ** 2
    rhs[:, 1, 1] *= np.conj(phase) ** 2
    return np.max(np.abs(lhs - rhs), axis=(1, 2))


def correspondence_check(psi: PhaseSequence, d: int, x: float) -> float:
    return float(correspondence_deviation(psi, d, [x])[0])


class ResponseParts(NamedTuple):
    real_response: float  # Re u_d
    a_rotated: float  # Re(a(z) z^d)
    imag_response: float  # Im u_d
    imag_b: float  # Im b(z)


def response_real_part(psi: PhaseSequence, d: int, x: float) -> ResponseParts:
    """Both readings of the upper-left entry: u_d = Re(a(z) z^d) + i Im b(z)."""
    _check_degree(psi, d)
    u00 = qsp_response_batch(psi, d, [x])[0, 0, 0]
    theta = half_angles(np.array([x]))
    z = np.exp(2j * theta)
    g = nlfs_matrices(truncated_coeffs(psi, d), z)[0]
    return ResponseParts(
        float(u00.real),
        float((g[0, 0] * z[0] ** d).real),
        float(u00.imag),
        float(g[0, 1].imag),
    )
