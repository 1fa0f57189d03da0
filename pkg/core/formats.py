import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from packaging.version import InvalidVersion, Version

from .errors import FormatError, InvalidInput
from .logger import logger
from .pipeline import SignalSamples, SynthesisReport
from .qsp import PhaseSequence
from .spectral import CircleGrid


PHASE_SCHEMA_VERSION = "1.0"
SUPPORTED_MAJOR = 1


def encode_float(value: float) -> str:
    """Decimal string with 17 significant digits; float() of it is bit-identical."""
    return format(float(value), ".17g")


def decode_float(text: Any, name: str) -> float:
    if isinstance(text, bool):
        raise FormatError(f"Field {name!r} must be numeric")
    try:
        return float(text)
    except (TypeError, ValueError):
        raise FormatError(f"Field {name!r} is not a number: {text!r}")


def check_schema(version: Any):
    if version is None:
        raise FormatError("Missing schema_version")
    try:
        parsed = Version(str(version))
    except InvalidVersion:
        raise FormatError(f"Invalid schema_version {version!r}")
    if parsed.major != SUPPORTED_MAJOR:
        raise FormatError(f"Unsupported schema_version {version} (supported: {SUPPORTED_MAJOR}.x)")


def _read_json(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except OSError as e:
        raise InvalidInput(f"Cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise FormatError(f"{path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise FormatError(f"{path} must contain a JSON object")
    return data


@dataclass
class PhaseFile:
    phases: PhaseSequence
    epsilon: float
    grid_size: int
    plancherel_lhs: float
    plancherel_rhs: float
    residual: float
    converged: bool = True
    schema_version: str = PHASE_SCHEMA_VERSION

    @property
    def degree(self) -> int:
        return self.phases.degree

    @classmethod
    def from_report(cls, report: SynthesisReport) -> "PhaseFile":
        return cls(
            phases=report.phases,
            epsilon=report.epsilon,
            grid_size=report.grid_size,
            plancherel_lhs=report.plancherel_lhs,
            plancherel_rhs=report.plancherel_rhs,
            residual=report.hs_residual,
            converged=report.converged,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "epsilon": encode_float(self.epsilon),
            "grid_size": self.grid_size,
            "degree": self.degree,
            "phases": [encode_float(v) for v in self.phases.values],
            "plancherel": {
                "lhs": encode_float(self.plancherel_lhs),
                "rhs": encode_float(self.plancherel_rhs),
            },
            "residual": encode_float(self.residual),
            "converged": self.converged,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def save(self, path: Union[str, Path]):
        with open(path, 'w') as f:
            f.write(self.dumps())
        logger.debug(f"Wrote phase file {path}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PhaseFile":
        check_schema(data.get("schema_version"))

        raw_phases = data.get("phases")
        if not isinstance(raw_phases, list) or not raw_phases:
            raise FormatError("Field 'phases' must be a non-empty list")
        values = [decode_float(v, f"phases[{k}]") for k, v in enumerate(raw_phases)]
        phases = PhaseSequence(values)

        degree = data.get("degree", phases.degree)
        if degree != phases.degree:
            raise FormatError(f"degree {degree} does not match {len(values)} phases")

        plancherel = data.get("plancherel", {})
        if not isinstance(plancherel, dict):
            raise FormatError("Field 'plancherel' must be an object")

        try:
            grid_size = int(data.get("grid_size", 0))
        except (TypeError, ValueError):
            raise FormatError(f"Invalid grid_size {data.get('grid_size')!r}")

        return cls(
            phases=phases,
            epsilon=decode_float(data.get("epsilon", "nan"), "epsilon"),
            grid_size=grid_size,
            plancherel_lhs=decode_float(plancherel.get("lhs", "nan"), "plancherel.lhs"),
            plancherel_rhs=decode_float(plancherel.get("rhs", "nan"), "plancherel.rhs"),
            residual=decode_float(data.get("residual", "nan"), "residual"),
            converged=bool(data.get("converged", True)),
            schema_version=str(data["schema_version"]),
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PhaseFile":
        return cls.from_dict(_read_json(path))


@dataclass
class SignalFile:
    samples: Optional[List[float]] = None
    chebyshev: Optional[List[float]] = None
    epsilon: Optional[float] = None

    def __post_init__(self):
        if (self.samples is None) == (self.chebyshev is None):
            raise FormatError("Signal file needs exactly one of 'samples' or 'chebyshev'")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SignalFile":
        if "schema_version" in data:
            check_schema(data["schema_version"])

        def numbers(key: str) -> Optional[List[float]]:
            if key not in data:
                return None
            raw = data[key]
            if not isinstance(raw, list) or not raw:
                raise FormatError(f"Field {key!r} must be a non-empty list")
            return [decode_float(v, f"{key}[{k}]") for k, v in enumerate(raw)]

        epsilon = data.get("epsilon")
        return cls(
            samples=numbers("samples"),
            chebyshev=numbers("chebyshev"),
            epsilon=None if epsilon is None else decode_float(epsilon, "epsilon"),
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SignalFile":
        return cls.from_dict(_read_json(path))

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {}
        if self.samples is not None:
            data["samples"] = [encode_float(v) for v in self.samples]
        else:
            data["chebyshev"] = [encode_float(v) for v in self.chebyshev]
        if self.epsilon is not None:
            data["epsilon"] = encode_float(self.epsilon)
        return data

    def save(self, path: Union[str, Path]):
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=2)

    def native_grid_size(self) -> Optional[int]:
        """Sampled signals fix the grid; Chebyshev signals adapt to any grid."""
        return len(self.samples) if self.samples is not None else None

    def to_signal(self, grid: CircleGrid, epsilon: Optional[float] = None) -> SignalSamples:
        epsilon = epsilon if epsilon is not None else self.epsilon
        if self.samples is not None:
            if len(self.samples) != grid.size:
                raise FormatError(
                    f"Signal file has {len(self.samples)} samples but the grid has {grid.size}"
                )
            return SignalSamples.from_samples(grid, self.samples, epsilon)
        return SignalSamples.from_chebyshev(grid, self.chebyshev, epsilon)
