import json
import math
import tempfile
import unittest
import sys
from pathlib import Path

import numpy as np

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.errors import FormatError, InvalidInput, PhaseOutOfRange
from core.formats import PhaseFile, SignalFile, check_schema, decode_float, encode_float
from core.pipeline import SignalSamples, synthesize
from core.qsp import PhaseSequence
from core.spectral import CircleGrid


class TestFloatEncoding(unittest.TestCase):

    def test_bit_identical(self):
        rng = np.random.default_rng(0)
        for value in list(rng.normal(size=50)) + [0.1, 1e-300, -0.0, math.pi]:
            self.assertEqual(float(encode_float(value)), float(value))
        self.assertEqual(encode_float(0.1), "0.10000000000000001")

    def test_decode_rejects_non_numbers(self):
        self.assertEqual(decode_float("0.25", "x"), 0.25)
        self.assertEqual(decode_float(3, "x"), 3.0)
        with self.assertRaises(FormatError):
            decode_float("abc", "x")
        with self.assertRaises(FormatError):
            decode_float(True, "x")

    def test_schema(self):
        check_schema("1.0")
        check_schema("1.3")
        with self.assertRaises(FormatError):
            check_schema(None)
        with self.assertRaises(FormatError):
            check_schema("2.0")
        with self.assertRaises(FormatError):
            check_schema("not-a-version")


class TestPhaseFile(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def sample_file(self) -> PhaseFile:
        phases = PhaseSequence(np.random.default_rng(1).uniform(-1, 1, 9))
        return PhaseFile(phases, 0.2, 1024, 0.123, 0.1230000001, 3e-9)

    def test_save_and_load(self):
        original = self.sample_file()
        path = self.dir / "phases.json"
        original.save(path)
        loaded = PhaseFile.load(path)
        self.assertTrue(np.array_equal(loaded.phases.values, original.phases.values))
        self.assertEqual(loaded.degree, 8)
        self.assertEqual(loaded.grid_size, 1024)
        self.assertEqual(loaded.plancherel_rhs, original.plancherel_rhs)
        self.assertEqual(loaded.residual, original.residual)
        self.assertTrue(loaded.converged)

    def test_layout(self):
        data = json.loads(self.sample_file().dumps())
        self.assertEqual(data["schema_version"], "1.0")
        self.assertEqual(data["degree"], 8)
        self.assertEqual(len(data["phases"]), 9)
        self.assertIn("lhs", data["plancherel"])
        self.assertIsInstance(data["phases"][0], str)

    def test_rejects_bad_files(self):
        good = self.sample_file().to_dict()

        missing = dict(good)
        del missing["schema_version"]
        with self.assertRaises(FormatError):
            PhaseFile.from_dict(missing)

        future = dict(good, schema_version="2.0")
        with self.assertRaises(FormatError):
            PhaseFile.from_dict(future)

        wrong_degree = dict(good, degree=3)
        with self.assertRaises(FormatError):
            PhaseFile.from_dict(wrong_degree)

        with self.assertRaises(FormatError):
            PhaseFile.from_dict(dict(good, phases=[]))

        with self.assertRaises(PhaseOutOfRange):
            PhaseFile.from_dict(dict(good, phases=["2.0"], degree=0))

    def test_io_errors(self):
        with self.assertRaises(InvalidInput):
            PhaseFile.load(self.dir / "missing.json")
        broken = self.dir / "broken.json"
        broken.write_text("{not json")
        with self.assertRaises(FormatError):
            PhaseFile.load(broken)
        listing = self.dir / "list.json"
        listing.write_text("[1, 2]")
        with self.assertRaises(FormatError):
            PhaseFile.load(listing)

    def test_from_report(self):
        report = synthesize(SignalSamples.constant(CircleGrid(64), 0.2), tol=1e-8)
        phase_file = PhaseFile.from_report(report)
        self.assertEqual(phase_file.grid_size, 64)
        self.assertEqual(phase_file.residual, report.hs_residual)
        self.assertAlmostEqual(phase_file.phases[0], math.asin(0.2), places=8)


class TestSignalFile(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_exactly_one_payload(self):
        with self.assertRaises(FormatError):
            SignalFile()
        with self.assertRaises(FormatError):
            SignalFile(samples=[0.0] * 8, chebyshev=[0.1])
        with self.assertRaises(FormatError):
            SignalFile.from_dict({"samples": []})

    def test_samples_fix_the_grid(self):
        signal_file = SignalFile(samples=[0.1] * 16)
        self.assertEqual(signal_file.native_grid_size(), 16)
        signal = signal_file.to_signal(CircleGrid(16))
        self.assertAlmostEqual(signal.sup, 0.1)
        with self.assertRaises(FormatError):
            signal_file.to_signal(CircleGrid(32))

    def test_chebyshev_adapts(self):
        signal_file = SignalFile(chebyshev=[0.0, 0.0, 0.3], epsilon=0.2)
        self.assertIsNone(signal_file.native_grid_size())
        for size in (16, 256):
            signal = signal_file.to_signal(CircleGrid(size))
            self.assertEqual(signal.epsilon, 0.2)
            self.assertAlmostEqual(signal.sup, 0.3)

    def test_save_and_load(self):
        path = self.dir / "signal.json"
        SignalFile(chebyshev=[0.1, 0.0, 0.2], epsilon=0.3).save(path)
        loaded = SignalFile.load(path)
        self.assertEqual(loaded.chebyshev, [0.1, 0.0, 0.2])
        self.assertEqual(loaded.epsilon, 0.3)
        self.assertIsNone(loaded.samples)


if __name__ == '__main__':
    unittest.main()
