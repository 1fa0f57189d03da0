import csv
import math
import sys
from enum import IntEnum
from typing import List, Optional, TextIO

import numpy as np

from core.errors import InvalidInput, NumericalError, QSPLayerError, SignalTooLarge
from core.formats import PhaseFile, SignalFile, encode_float
from core.inverse import LayerStripper
from core.logger import logger
from core.nlfs import CoeffSequence, nlfs_finite
from core.pipeline import (
    SignalSamples,
    convergence_profile,
    log_mass,
    plancherel_sum,
    synthesize,
)
from core.qsp import PhaseSequence, correspondence_deviation, qsp_response_batch, response_on_abscissae
from core.settings import AppSettings, SettingsManager
from core.spectral import CircleGrid, next_power_of_two


CORRESPONDENCE_TOL = 1e-10
ROUNDTRIP_TOL = 1e-9
VERIFY_POINTS = 64


class ExitCode(IntEnum):
    OK = 0
    INPUT = 1
    NOT_CONVERGED = 2
    VERIFY_FAILED = 3


def load_settings(args, **overrides) -> AppSettings:
    manager = SettingsManager()
    return manager.resolve(getattr(args, "profile", None), **overrides)


def parse_floats(text: str, name: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise InvalidInput(f"--{name} expects comma separated numbers, got {text!r}")


def _fail(error: Exception) -> ExitCode:
    if isinstance(error, SignalTooLarge):
        logger.error(f"{error} (signals must satisfy sup |f| <= 2^(-1/2) - eps)")
        return ExitCode.INPUT
    if isinstance(error, NumericalError):
        logger.error(f"Numerical failure: {error}")
        return ExitCode.NOT_CONVERGED
    logger.error(str(error))
    return ExitCode.INPUT


def _open_out(path: Optional[str]) -> TextIO:
    if path is None:
        return sys.stdout
    return open(path, 'w', newline='')


def _read_signal(args, settings: AppSettings) -> SignalSamples:
    inline = [args.signal is not None, args.chebyshev is not None, args.constant is not None]
    if sum(inline) != 1:
        raise InvalidInput("Give exactly one of: a signal file, --chebyshev, --constant")

    if args.signal is not None:
        signal_file = SignalFile.load(args.signal)
        native = signal_file.native_grid_size()
        if native is not None and args.grid is not None and native != args.grid:
            raise InvalidInput(f"--grid {args.grid} disagrees with {native} samples in {args.signal}")
        grid = CircleGrid(native if native is not None else settings.grid_size)
        return signal_file.to_signal(grid, args.epsilon)

    grid = CircleGrid(settings.grid_size)
    if args.chebyshev is not None:
        return SignalSamples.from_chebyshev(grid, parse_floats(args.chebyshev, "chebyshev"), args.epsilon)
    return SignalSamples.constant(grid, args.constant, args.epsilon)


def cmd_synth(args) -> ExitCode:
    try:
        settings = load_settings(
            args, grid_size=args.grid, tol=args.tol, d_max=args.dmax, tol_fp=args.tol_fp
        )
        signal = _read_signal(args, settings)
        d_max = settings.effective_d_max(signal.grid.size)
        report = synthesize(
            signal,
            tol=settings.tol,
            d_max=d_max,
            tol_fp=settings.tol_fp,
            fp_max_iter=settings.fp_max_iter,
            renormalize_every=settings.renormalize_every,
            outer_check_every=settings.outer_check_every,
        )
    except QSPLayerError as e:
        return _fail(e)

    phase_file = PhaseFile.from_report(report)
    if args.out is None:
        sys.stdout.write(phase_file.dumps())
    else:
        phase_file.save(args.out)
        logger.info(f"Phases written to {args.out}")

    if not report.converged:
        logger.error(f"NotConverged: residual {report.hs_residual:.3e} above tol {report.tol:.1e}")
        return ExitCode.NOT_CONVERGED
    return ExitCode.OK


def cmd_eval(args) -> ExitCode:
    try:
        phase_file = PhaseFile.load(args.phases)
        phases = phase_file.phases
        degree = phases.degree if args.degree is None else args.degree

        if args.x is not None and args.grid is not None:
            raise InvalidInput("Use either --x or --grid")
        if args.x is not None:
            xs = np.array(parse_floats(args.x, "x"))
        else:
            size = args.grid or phase_file.grid_size or load_settings(args).grid_size
            xs = np.array(CircleGrid(size).abscissae)
        if np.any(np.abs(xs) > 1.0):
            raise InvalidInput("Abscissae must lie in [-1, 1]")

        if degree > phases.degree:
            phases = PhaseSequence(phases.padded(degree + 1))
        values = response_on_abscissae(phases, degree, xs)
    except QSPLayerError as e:
        return _fail(e)

    out = _open_out(args.out)
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["x", "im_u"])
        for x, value in zip(xs, values):
            writer.writerow([encode_float(x), encode_float(value)])
    finally:
        if out is not sys.stdout:
            out.close()
    return ExitCode.OK


def _report_check(name: str, value: float, tol: float) -> bool:
    passed = bool(value <= tol)
    status = "PASS" if passed else "FAIL"
    print(f"{status} {name}: {value:.3e} (tol {tol:.1e})")
    return passed


def cmd_verify(args) -> ExitCode:
    try:
        settings = load_settings(args, plancherel_tol=args.plancherel_tol)
        phase_file = PhaseFile.load(args.phases)
        signal = None
        if args.signal is not None:
            signal_file = SignalFile.load(args.signal)
            size = signal_file.native_grid_size() or phase_file.grid_size or settings.grid_size
            signal = signal_file.to_signal(CircleGrid(size))
    except QSPLayerError as e:
        return _fail(e)

    phases = phase_file.phases
    d = phases.degree
    xs = np.cos(0.5 * np.pi * np.arange(VERIFY_POINTS) / (VERIFY_POINTS - 1))

    unitaries = qsp_response_batch(phases, d, xs)
    gram = unitaries @ np.conj(np.transpose(unitaries, (0, 2, 1)))
    unitarity = float(np.max(np.abs(gram - np.eye(2))))
    results = [_report_check("unitarity", unitarity, settings.unitarity_tol)]

    correspondence = float(np.max(correspondence_deviation(phases, d, xs)))
    results.append(_report_check("correspondence", correspondence, CORRESPONDENCE_TOL))

    lhs = plancherel_sum(phases)
    rhs = log_mass(signal.values) if signal is not None else phase_file.plancherel_rhs
    if math.isnan(rhs):
        logger.warning("No Plancherel reference: phase file has no rhs and no signal was given")
    else:
        results.append(_report_check("plancherel", abs(lhs - rhs), settings.plancherel_tol))

    if signal is not None:
        residual = convergence_profile(phases, signal, [d])[d]
        budget = max(phase_file.residual, 0.0) * (1 + 1e-6) + 1e-9
        results.append(_report_check("residual", residual, budget))

    if all(results):
        return ExitCode.OK
    logger.error("Verification failed")
    return ExitCode.VERIFY_FAILED


def roundtrip_grid(width: int) -> CircleGrid:
    return CircleGrid(max(64, next_power_of_two(8 * (width + 1))))


def cmd_roundtrip(args) -> ExitCode:
    if args.width < 0 or args.norm_cap < 0:
        logger.error("--width and --norm-cap must be nonnegative")
        return ExitCode.INPUT

    settings = load_settings(args)
    seed = settings.seed if args.seed is None else args.seed
    rng = np.random.default_rng(seed)

    radius = args.norm_cap * np.sqrt(rng.random(args.width))
    angle = 2 * np.pi * rng.random(args.width)
    F = CoeffSequence(0, radius * np.exp(1j * angle))
    try:
        grid = CircleGrid(args.grid) if args.grid else roundtrip_grid(args.width)
        pair = nlfs_finite(F, grid)
    except QSPLayerError as e:
        return _fail(e)

    error = 0.0
    try:
        recovered = LayerStripper(pair).run(args.width - 1).coefficients
        if args.width:
            error = recovered.distance_sup(F)
    except NumericalError as e:
        logger.warning(f"NonOuter: {e}")
        error = math.inf

    if math.isfinite(error) and args.width:
        gap = abs(
            float(np.sum(np.log1p(np.abs(recovered.values) ** 2)))
            - float(np.sum(np.log1p(np.abs(F.values) ** 2)))
        )
        if gap > 1e-8:
            logger.warning(f"NonOuter: Plancherel gap {gap:.3e} between recovered and true sequence")

    print(f"width={args.width} seed={seed} norm_cap={args.norm_cap} grid={grid.size} "
          f"max_error={error:.3e}")
    return ExitCode.OK if error <= ROUNDTRIP_TOL else ExitCode.VERIFY_FAILED
