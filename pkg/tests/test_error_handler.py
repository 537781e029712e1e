import json
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from BackEnd.core.config import reset_config
from BackEnd.models.errors import ComplexError, SchemaError
from FrontEnd.utils.error_handler import (
    MAX_ENTRIES,
    describe_error,
    error_log_file,
    get_logs,
    log_error,
)


class TestDescribeError(unittest.TestCase):
    def test_engine_error_with_context_and_details(self):
        error = ComplexError("facet incidence exceeds 2", context="build", details={"facet": (0, 1)})

        lines = describe_error(error)

        self.assertEqual(lines[0], "error [build]: facet incidence exceeds 2")
        self.assertEqual(lines[1], "  facet: [0, 1]")

    def test_engine_error_without_context(self):
        self.assertEqual(describe_error(SchemaError("bad document")), ["error: bad document"])

    def test_other_errors(self):
        self.assertEqual(describe_error(ValueError("boom")), ["error: ValueError: boom"])


class TestLogError(unittest.TestCase):
    def test_without_a_log_directory_nothing_is_written(self):
        self.assertIsNone(error_log_file())

        entry = log_error(ValueError("boom"), context="unit")

        self.assertEqual(entry["context"], "unit")
        self.assertEqual(entry["error_type"], "ValueError")
        self.assertNotIn("log_file", entry)
        self.assertEqual(get_logs(), [])

    def test_persists_entries(self):
        with tempfile.TemporaryDirectory() as tmp:
            log_dir = Path(tmp) / "logs"
            error = SchemaError("missing field", context="parse", details={"path": "a.json"})

            entry = log_error(error, context="validate", details={"argv": ["validate", "a.json"]}, log_dir=log_dir)

            self.assertEqual(entry["log_file"], str(log_dir / "error_logs.json"))
            logs = get_logs(log_dir)
            self.assertEqual(len(logs), 1)
            self.assertEqual(logs[0]["details"]["operation"], "parse")
            self.assertEqual(logs[0]["details"]["path"], "a.json")
            self.assertEqual(logs[0]["details"]["argv"], ["validate", "a.json"])
            self.assertEqual(logs[0]["error_type"], "SchemaError")

    def test_configured_directory_from_environment(self):
        with tempfile.TemporaryDirectory() as tmp:
            with patch.dict("os.environ", {"THINPOS_LOG_DIR": tmp}):
                reset_config()
                log_error(RuntimeError("late"), context="env")
                logs = get_logs()

        self.assertEqual([entry["error"] for entry in logs], ["late"])

    def test_log_is_capped(self):
        with tempfile.TemporaryDirectory() as tmp:
            log_dir = Path(tmp)
            target = log_dir / "error_logs.json"
            target.write_text(json.dumps([{"error": str(i)} for i in range(MAX_ENTRIES)]), encoding="utf-8")

            log_error(ValueError("newest"), log_dir=log_dir)
            logs = get_logs(log_dir)

        self.assertEqual(len(logs), MAX_ENTRIES)
        self.assertEqual(logs[0]["error"], "1")
        self.assertEqual(logs[-1]["error"], "newest")

    def test_corrupt_log_is_replaced(self):
        with tempfile.TemporaryDirectory() as tmp:
            log_dir = Path(tmp)
            (log_dir / "error_logs.json").write_text("{not json", encoding="utf-8")

            self.assertEqual(get_logs(log_dir), [])
            log_error(ValueError("fresh"), log_dir=log_dir)

            self.assertEqual([entry["error"] for entry in get_logs(log_dir)], ["fresh"])


if __name__ == "__main__":
    unittest.main()
