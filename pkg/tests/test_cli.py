# tests/test_cli.py - Tests for the qednp command line

import unittest
import os
import sys
import io
import tempfile
from contextlib import redirect_stdout
from unittest.mock import patch

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Add the project root to Python path
sys.path.append(ROOT)

import main as cli

GOOD = """[scenario]
kind = scatter
id = cli_scatter

[params]
beta = 0.98
"""


class TestCli(unittest.TestCase):
    """Test cases for the run, fit and validate commands"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.log_patch = patch.object(cli.config, "LOG_FILE", os.path.join(self.tmp.name, "qednp.log"))
        self.log_patch.start()

    def tearDown(self):
        self.log_patch.stop()
        self.tmp.cleanup()

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
        return path

    def call(self, *argv):
        out = io.StringIO()
        with redirect_stdout(out):
            code = cli.main(list(argv))
        return code, out.getvalue()

    def test_validate_ok(self):
        code, out = self.call("validate", self.write("good.ini", GOOD))
        self.assertEqual(code, cli.EXIT_OK)
        self.assertIn("valid scatter scenario 'cli_scatter' with 1 point(s)", out)

    def test_validate_config_error(self):
        code, out = self.call("validate", self.write("bad.ini", GOOD.replace("0.98", "1.5")))
        self.assertEqual(code, cli.EXIT_CONFIG)
        self.assertIn("line 6", out)

    def test_validate_missing_file(self):
        code, _ = self.call("validate", os.path.join(self.tmp.name, "absent.ini"))
        self.assertEqual(code, cli.EXIT_CONFIG)

    def test_run(self):
        out_dir = os.path.join(self.tmp.name, "results")
        code, out = self.call("run", self.write("good.ini", GOOD), "--out", out_dir)
        self.assertEqual(code, cli.EXIT_OK)
        self.assertTrue(os.path.exists(os.path.join(out_dir, "cli_scatter_summary.csv")))
        self.assertIn("Scenario 'cli_scatter' (scatter) finished", out)

    def test_run_jc_spectra(self):
        scenario = os.path.join(ROOT, "scenarios", "jc_spectra_q5e4_f50.ini")
        code, out = self.call("run", scenario, "--out", self.tmp.name)
        self.assertEqual(code, cli.EXIT_OK)
        self.assertTrue(os.path.exists(os.path.join(self.tmp.name, "jc_spectra_q5e4_f50_0.csv")))
        self.assertIn("Scenario 'jc_spectra_q5e4_f50' (jc-spectra) finished", out)

    def test_run_partial_failure(self):
        text = GOOD + "delta = 1 rad/ns\n\n[sweep]\nparam = gamma_dp\nvalues = 0, 0.5\n"
        code, _ = self.call("run", self.write("partial.ini", text), "--out", self.tmp.name)
        self.assertEqual(code, cli.EXIT_PARTIAL)

    def test_run_domain_error(self):
        text = GOOD + "delta = 1 rad/ns\ngamma_dp = 0.5 ns^-1\n"
        code, _ = self.call("run", self.write("bad_point.ini", text), "--out", self.tmp.name)
        self.assertEqual(code, cli.EXIT_NUMERIC)

    def test_fit_missing_curve(self):
        code, _ = self.call("fit", os.path.join(self.tmp.name, "absent.csv"))
        self.assertEqual(code, cli.EXIT_CONFIG)


class TestJobs(unittest.TestCase):
    """Test cases for the QEDNP_JOBS override"""

    def test_flag_when_unset(self):
        with patch.dict(os.environ, {}, clear=False):
            os.environ.pop("QEDNP_JOBS", None)
            self.assertEqual(cli._resolve_jobs(3), 3)
            self.assertEqual(cli._resolve_jobs(0), 1)

    def test_environment_overrides(self):
        with patch.dict(os.environ, {"QEDNP_JOBS": "6"}):
            self.assertEqual(cli._resolve_jobs(2), 6)

    def test_invalid_environment_ignored(self):
        with patch.dict(os.environ, {"QEDNP_JOBS": "many"}):
            self.assertEqual(cli._resolve_jobs(2), 2)


if __name__ == '__main__':
    unittest.main()
