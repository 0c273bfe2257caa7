import json
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from click.testing import CliRunner

from hypam.errors import EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERDICT_FAILED, JobError
from hypam.main import build_job, cli, parse_inputs, parse_tolerances
from hypam.runner import HypamRunner, load_job, run_job
from hypam.selftest import cylinder_line, geodesic_curve, geodesic_line, horosphere_line, run_examples
from hypam.surfaces import borel_plane, trace_quadric_family
from hypam.tools.codecs import FloorDiagramModel, Job, SurfaceModel
from hypam.tropical import constant_line_diagram


class TestArguments(unittest.TestCase):

    def test_parse_tolerances(self):
        """Test both spellings of a tolerance override."""
        found = parse_tolerances(["--tol.eps_q", "1e-6", "--tol.eps_geo=0.5"])
        self.assertEqual(found, {"eps_q": 1e-6, "eps_geo": 0.5})
        with self.assertRaises(JobError):
            parse_tolerances(["--tol.eps_q"])
        with self.assertRaises(JobError):
            parse_tolerances(["--colour", "red"])
        with self.assertRaises(JobError):
            parse_tolerances(["--tol.eps_q=small"])

    def test_parse_inputs(self):
        """Test paths, inline JSON and malformed pairs."""
        found = parse_inputs(("line=line.json", 'params=["inf"]', "cloud="))
        self.assertEqual(found, {"line": "line.json", "params": ["inf"], "cloud": ""})
        with self.assertRaises(JobError):
            parse_inputs(("line",))
        with self.assertRaises(JobError):
            parse_inputs(("line={oops",))

    def test_build_job_conflict(self):
        """Test that the command line cannot contradict the job file."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "job.json"
            path.write_text(json.dumps({"command": "line-classify", "seed": 1}), encoding="utf-8")
            job, base = build_job(None, str(path), {"seed": 9, "out": None}, {}, {"eps_q": 1e-6})
            self.assertEqual((job.command, job.seed, job.tolerances), ("line-classify", 9, {"eps_q": 1e-6}))
            self.assertEqual(base, Path(tmp).resolve())
            with self.assertRaises(JobError):
                build_job("line-sample", str(path), {}, {}, {})
        with self.assertRaises(JobError):
            build_job(None, None, {}, {}, {})


class TestHypamRunner(unittest.TestCase):

    def setUp(self):
        """A runner in a scratch directory."""
        self.tmp = tempfile.TemporaryDirectory()
        self.base = Path(self.tmp.name)
        self.runner = HypamRunner(self.base)

    def tearDown(self):
        self.tmp.cleanup()

    # Test Dispatch Methods
    def test_every_command_has_a_handler(self):
        """Test that the catalogue and the handlers agree."""
        self.assertEqual(set(self.runner.catalogue), set(self.runner.handlers))

    def test_line_classify(self):
        """Test the report of the geodesic line."""
        report = self.runner.run(Job(command="line-classify", inputs={"line": geodesic_line()}))
        self.assertEqual(report.exit_code, EXIT_OK)
        self.assertEqual(report.results["class"], "geodesic")
        self.assertEqual(report.results["intersection"], "transverse")

    def test_tolerance_override_reaches_the_job(self):
        """Test that a large eps_geo reports the cylinder line as a geodesic."""
        job = Job(command="line-classify", inputs={"line": cylinder_line()})
        self.assertEqual(self.runner.run(job).results["class"], "cylinder")
        job = Job(command="line-classify", inputs={"line": cylinder_line()}, tolerances={"eps_geo": 1.0})
        self.assertEqual(self.runner.run(job).results["class"], "geodesic")

    def test_inputs_from_files(self):
        """Test that a string input is read relative to the base directory."""
        (self.base / "line.json").write_text(json.dumps(horosphere_line()), encoding="utf-8")
        report = self.runner.run(Job(command="line-classify", inputs={"line": "line.json"}))
        self.assertEqual(report.results["class"], "horosphere")
        with self.assertRaises(JobError):
            self.runner.run(Job(command="line-classify", inputs={"line": "missing.json"}))

    def test_job_errors(self):
        """Test unknown commands, missing inputs and missing seeds."""
        with self.assertRaises(JobError):
            self.runner.run(Job(command="line-draw"))
        with self.assertRaises(JobError):
            self.runner.run(Job(command="line-classify"))
        with self.assertRaises(JobError):
            self.runner.run(Job(command="line-sample", inputs={"line": geodesic_line()}))

    def test_errors_become_reports(self):
        """Test that run_job folds an error into a report with its exit code."""
        report = run_job(Job(command="line-sample", inputs={"line": geodesic_line()}), self.base)
        self.assertEqual(report.exit_code, EXIT_INPUT_ERROR)
        self.assertEqual(report.results["error"], "JobError")

    # Test Verdict Methods
    def test_convexity_verdict(self):
        """Test a passing convexity verdict on the trace family."""
        surface = SurfaceModel.of(trace_quadric_family(-4.0)).model_dump()
        job = Job(command="surface-convexity", inputs={"surface": surface, "pairs": 2, "steps": 3},
                  seed=5, starts=16)
        report = self.runner.run(job)
        self.assertTrue(report.verdicts["convex"])
        self.assertEqual(report.exit_code, EXIT_OK)

    def test_invalid_diagram_fails_the_verdict(self):
        """Test that a diagram with the wrong degree exits with 2."""
        model = FloorDiagramModel.of(constant_line_diagram((0, 0, 1), (0, 0, -1)))
        model.degree = 2
        report = self.runner.run(Job(command="trop-validate", inputs={"diagram": model.model_dump()}))
        self.assertFalse(report.verdicts["valid"])
        self.assertEqual(report.exit_code, EXIT_VERDICT_FAILED)

    def test_curve_critical_verdict(self):
        """Test that confirmed critical parameters keep the detectors verdict."""
        report = self.runner.run(Job(command="curve-critical", inputs={"curve": geodesic_curve()},
                                     count=16))
        self.assertEqual(len(report.results["critical"]), 16)
        self.assertEqual(report.results["rejected"], [])
        self.assertTrue(report.verdicts["detectors_agree"])
        self.assertEqual(report.exit_code, EXIT_OK)

    @patch("hypam.curves.jacobian_ratio", return_value=0.5)
    def test_rejected_critical_parameters_fail_the_verdict(self, mock_ratio):
        """Test that Gauss hits without a degenerate Jacobian exit with 2."""
        report = self.runner.run(Job(command="curve-critical", inputs={"curve": geodesic_curve()},
                                     count=16))
        self.assertEqual(report.results["critical"], [])
        self.assertEqual(len(report.results["rejected"]), 16)
        self.assertFalse(report.verdicts["detectors_agree"])
        self.assertEqual(report.exit_code, EXIT_VERDICT_FAILED)

    def test_surface_gauss_verdict(self):
        """Test that the Borel plane reports agreeing detectors."""
        surface = SurfaceModel.of(borel_plane()).model_dump()
        point = {"entries": [{"re": 1.0}, {"re": 0.5}, {"re": 0.0}, {"re": 1.0}]}
        report = self.runner.run(Job(command="surface-gauss", inputs={"surface": surface, "point": point}))
        self.assertFalse(report.results["gauss_critical"])
        self.assertTrue(report.verdicts["detectors_agree"])

    def test_sample_artifact(self):
        """Test that line-sample writes its cloud."""
        job = Job(command="line-sample", inputs={"line": horosphere_line()}, seed=3, count=25,
                  out="out/cloud.csv")
        report = self.runner.run(job)
        self.assertEqual(report.results["count"], 25)
        self.assertTrue((self.base / "out" / "cloud.csv").exists())

    def test_load_job(self):
        """Test that unreadable and invalid job files raise JobError."""
        bad = self.base / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        with self.assertRaises(JobError):
            load_job(bad)
        bad.write_text(json.dumps({"command": "line-classify", "colour": "red"}), encoding="utf-8")
        with self.assertRaises(JobError):
            load_job(bad)


class TestCli(unittest.TestCase):

    def setUp(self):
        """A click test runner."""
        self.cli = CliRunner()

    def invoke(self, args):
        return self.cli.invoke(cli, args, standalone_mode=False)

    def test_line_classify(self):
        """Test that the report is printed and written with --report."""
        with self.cli.isolated_filesystem():
            result = self.invoke(["line-classify", "--input", "line=" + json.dumps(geodesic_line()),
                                  "--report", "report.json"])
            self.assertEqual(result.return_value, EXIT_OK)
            report = json.loads(result.stdout)
            self.assertEqual(report["results"]["class"], "geodesic")
            self.assertEqual(json.loads(Path("report.json").read_text(encoding="utf-8")), report)

    def test_tolerance_flags(self):
        """Test that --tol.<name> overrides reach the job."""
        result = self.invoke(["line-classify", "--input", "line=" + json.dumps(cylinder_line()),
                              "--tol.eps_geo", "1.0"])
        self.assertEqual(json.loads(result.stdout)["results"]["class"], "geodesic")
        result = self.invoke(["line-classify", "--input", "line=" + json.dumps(cylinder_line()),
                              "--tol.eps_nothing", "1.0"])
        self.assertEqual(result.return_value, EXIT_INPUT_ERROR)

    def test_malformed_job_file(self):
        """Test that a malformed job exits with 3 and writes no report."""
        with self.cli.isolated_filesystem():
            Path("job.json").write_text("{", encoding="utf-8")
            result = self.invoke(["--job", "job.json", "--report", "report.json"])
            self.assertEqual(result.return_value, EXIT_INPUT_ERROR)
            self.assertFalse(Path("report.json").exists())

    def test_missing_seed(self):
        """Test that a sampling command without a seed exits with 3."""
        with self.cli.isolated_filesystem():
            result = self.invoke(["line-sample", "--input", "line=" + json.dumps(geodesic_line()),
                                  "--report", "report.json"])
            self.assertEqual(result.return_value, EXIT_INPUT_ERROR)
            self.assertFalse(Path("report.json").exists())

    def test_selftest_flag(self):
        """Test the examples of one command through the CLI."""
        result = self.invoke(["line-classify", "--selftest"])
        self.assertEqual(result.return_value, EXIT_OK)
        self.assertIn("3/3 examples passed", result.stdout)


class TestSelftest(unittest.TestCase):

    def test_cheap_examples_pass(self):
        """Test the examples of the fast commands."""
        for command in ("line-classify", "curve-gauss", "trop-validate", "trop-theta", "export"):
            for outcome in run_examples(command):
                self.assertTrue(outcome.passed, f"{outcome.command}: {outcome.name}: {outcome.detail}")

    def test_unknown_command(self):
        """Test that selecting an unknown command is an error."""
        with self.assertRaises(JobError):
            run_examples("line-draw")


if __name__ == "__main__":
    unittest.main()
