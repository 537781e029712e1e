import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from BackEnd.services.constructions import TORUS_SWEEP_ORDER, catalog
from BackEnd.utils.io import dumps, serialize_complex
from FrontEnd.cli import EXIT_ERROR, EXIT_OK, EXIT_USAGE, execute, main

TETRAHEDRON = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name, document):
        path = self.root / name
        path.write_text(document if isinstance(document, str) else dumps(document), encoding="utf-8")
        return str(path)

    def catalog_file(self, name):
        return self.write(f"{name}.json", serialize_complex(catalog(name)))


class TestExitCodes(CliTestCase):
    def test_usage_errors(self):
        for argv in ([], ["frobnicate"], ["profile", "x.json"], ["thin", "x.json", "--ordering", "o", "--budget", "many"]):
            with self.subTest(argv=argv):
                result = execute(argv)
                self.assertEqual(result.exit_code, EXIT_USAGE)
                self.assertIsNone(result.payload)
                self.assertTrue(result.diagnostics)

    def test_help_and_version(self):
        for argv in (["--help"], ["--version"], ["catalog", "--help"]):
            with self.subTest(argv=argv):
                result = execute(argv)
                self.assertEqual((result.exit_code, result.payload), (EXIT_OK, None))

    def test_domain_error(self):
        path = self.write(
            "bad.json",
            {
                "format": "brickcplx-v1",
                "dimension": 2,
                "simplices": [[0, 1, 2], [0, 1, 3], [0, 1, 4]],
            },
        )
        result = execute(["validate", path])

        self.assertEqual(result.exit_code, EXIT_ERROR)
        self.assertIn("facet incidence exceeds 2", result.diagnostics[0])

    def test_missing_file(self):
        result = execute(["info", str(self.root / "absent.json")])
        self.assertEqual(result.exit_code, EXIT_ERROR)

    def test_schema_error(self):
        result = execute(["info", self.write("float.json", '{"format": "brickcplx-v1", "dimension": 2.0}')])
        self.assertEqual(result.exit_code, EXIT_ERROR)

    def test_unknown_catalog_name(self):
        result = execute(["catalog", "klein-bottle"])
        self.assertEqual(result.exit_code, EXIT_ERROR)


class TestCommands(CliTestCase):
    def test_validate_and_info(self):
        path = self.catalog_file("tetrahedron")

        validated = execute(["validate", path])
        info = execute(["info", path])

        self.assertEqual(validated.exit_code, EXIT_OK)
        self.assertTrue(validated.payload["valid"])
        self.assertTrue(validated.payload["report"]["closed"])
        self.assertEqual(info.payload["bricks"], 4)
        self.assertEqual(info.payload["facets"], 6)
        self.assertEqual(info.payload["boundary_facets"], 0)

    def test_info_reports_weight_flags(self):
        plain = execute(["info", self.catalog_file("tetrahedron")]).payload
        weighted = execute(
            [
                "info",
                self.write(
                    "weighted.json",
                    {
                        "format": "brickcplx-v1",
                        "dimension": 2,
                        "simplices": TETRAHEDRON,
                        "weights": {"0,1": "0", "0,2": "3/2"},
                    },
                ),
            ]
        ).payload

        self.assertEqual((plain["unit_weights"], plain["zero_weights"]), (True, False))
        self.assertEqual((weighted["unit_weights"], weighted["zero_weights"]), (False, True))
        self.assertEqual(weighted["total_weight"], "11/2")

    def test_catalog_round_trip(self):
        printed = execute(["catalog", "torus18"]).payload
        path = self.write("torus.json", printed)

        self.assertEqual(execute(["info", path]).payload["bricks"], 18)
        self.assertEqual(execute(["catalog", "torus18"]).payload, printed)

    def test_profile_and_width(self):
        path = self.catalog_file("torus18")
        ordering = self.write("order.json", {"ordering": list(TORUS_SWEEP_ORDER)})

        profile = execute(["profile", path, "--ordering", ordering]).payload
        width = execute(["width", path, "--ordering", ordering]).payload

        self.assertEqual(profile["profile"][7], "9")
        self.assertEqual(profile["trunk"], "9")
        self.assertEqual(width["width"], ["9", "8", "7", "7"])

    def test_bad_ordering_document(self):
        path = self.catalog_file("tetrahedron")
        ordering = self.write("order.json", {"ordering": [0, 1, 2]})

        result = execute(["width", path, "--ordering", ordering])

        self.assertEqual(result.exit_code, EXIT_ERROR)

    def test_surfaces_at_the_worked_ordering(self):
        path = self.catalog_file("torus18")
        ordering = self.write("order.json", {"ordering": list(TORUS_SWEEP_ORDER)})

        surfaces = execute(["surfaces", path, "--ordering", ordering]).payload["surfaces"]
        verdicts = {s["height"]: s["classification"]["verdict"] for s in surfaces}

        self.assertEqual(verdicts[6], "stable")
        self.assertEqual(verdicts[5], "unstable")
        self.assertEqual(verdicts[7], "neither")

    def test_classify(self):
        path = self.catalog_file("tetrahedron")
        surface = self.write("quad.json", {"facets": [[0, 2], [0, 3], [1, 2], [1, 3]]})

        payload = execute(["classify", path, "--surface", surface]).payload

        self.assertEqual(payload["verdict"], "unstable")
        self.assertEqual(payload["weight"], "4")

    def test_classify_unknown_facet(self):
        path = self.catalog_file("tetrahedron")
        surface = self.write("bad.json", {"facets": [[0, 9]]})

        self.assertEqual(execute(["classify", path, "--surface", surface]).exit_code, EXIT_ERROR)

    def test_oracles(self):
        path = self.catalog_file("tetrahedron")

        width = execute(["oracle-width", path]).payload
        pruned = execute(["oracle-width", path, "--bnb", "--start", "2"]).payload
        trunk = execute(["oracle-trunk", path]).payload

        self.assertEqual(width["width"], ["4"])
        self.assertTrue(width["optimal"])
        self.assertEqual(pruned["ordering"][0], 2)
        self.assertEqual(pruned["mode"], "bnb")
        self.assertEqual(trunk["trunk"], "4")

    def test_thin_and_certify(self):
        path = self.catalog_file("tetrahedron")
        ordering = self.write("order.json", {"ordering": [0, 1, 2, 3]})

        thin = execute(["thin", path, "--ordering", ordering, "--budget", "50"]).payload
        certificate = execute(["certify", path, "--ordering", ordering]).payload

        self.assertEqual(thin["width"], ["4"])
        self.assertEqual(certificate["status"], "locally-thin")

    def test_connected_sum(self):
        path = self.catalog_file("tetrahedron")
        vertex_map = self.write("map.json", {"map": {"1": 0, "2": 1, "3": 2}})
        argv = ["connect-sum", path, path, "--brick-a", "3", "--brick-b", "0", "--vertex-map", vertex_map]

        plain = execute(argv).payload
        verified = execute(argv + ["--verify"]).payload

        self.assertEqual(len(plain["complex"]["simplices"]), 6)
        self.assertEqual(verified["complex"], plain["complex"])
        self.assertEqual(verified["report"]["trunk_equal_ok"]["status"], "verified")

    def test_stabilize(self):
        path = self.catalog_file("tetrahedron")

        payload = execute(["stabilize", path, "--brick", "0"]).payload

        self.assertEqual(len(payload["complex"]["simplices"]), 6)
        self.assertEqual(len(payload["new_bricks"]), 3)

    def test_generalized_profile(self):
        path = self.write(
            "fan.json",
            {
                "format": "brickcplx-v1",
                "dimension": 2,
                "kind": "non-pure",
                "simplices": [[0, 1, 2], [0, 1, 3], [0, 1, 4]],
            },
        )
        ordering = self.write("order.json", {"ordering": [0, 1, 2]})

        payload = execute(["generalized-profile", path, "--ordering", ordering]).payload

        self.assertEqual(payload["profile"], ["0", "2", "2", "0"])
        self.assertEqual(payload["width"], ["2"])

    def test_dot(self):
        path = self.catalog_file("tetrahedron")
        surface = self.write("quad.json", {"facets": [[0, 2], [0, 3], [1, 2], [1, 3]]})

        payload = execute(["dot", path, "--surface", surface]).payload

        self.assertEqual(payload["format"], "dot")
        self.assertEqual(payload["text"].count("red"), 4)

    def test_inventory(self):
        payload = execute(["inventory", self.catalog_file("tetrahedron")]).payload

        self.assertEqual(payload["counts"], {"neither": 4, "unstable": 3})
        self.assertEqual(len(payload["surfaces"]), 7)

    def test_output_is_deterministic(self):
        path = self.catalog_file("torus18")
        ordering = self.write("order.json", {"ordering": list(TORUS_SWEEP_ORDER)})
        argv = ["surfaces", path, "--ordering", ordering]

        self.assertEqual(dumps(execute(argv).payload), dumps(execute(argv).payload))


class TestMain(CliTestCase):
    def test_payload_goes_to_stdout(self):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(["catalog", "tetrahedron"])

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out.getvalue())["simplices"], TETRAHEDRON)
        self.assertEqual(err.getvalue(), "")

    def test_diagnostics_go_to_stderr(self):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(["info", str(self.root / "absent.json")])

        self.assertEqual(code, EXIT_ERROR)
        self.assertEqual(out.getvalue(), "")
        self.assertTrue(err.getvalue().startswith("error"))


if __name__ == "__main__":
    unittest.main()
