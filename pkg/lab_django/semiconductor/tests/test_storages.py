# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.
import json
import logging
import os
import unittest

import jsonschema
import numpy as np

from .factories import fake
from .utils import LabTestCase
from ..storages import RunOutputStorage, format_float, load_schema, to_json_compatible

logger = logging.getLogger(__file__)
logger.setLevel(logging.INFO)


class FormattingTests(LabTestCase):
    def test_float_round_trip(self):
        rng = np.random.default_rng(fake.pyint())
        for _ in range(20):
            x = float(rng.uniform(-1e6, 1e6))
            with self.subTest(x=x):
                self.assertEqual(float(format_float(x)), x)
        self.assertEqual(format_float(0.1), "0.10000000000000001")
        self.assertEqual(format_float(np.float64(2.0)), "2")
        self.assertEqual(format_float(float("nan")), "nan")
        self.assertEqual(format_float(-np.inf), "-inf")

    def test_json_compatible(self):
        value = {
            "array": np.array([1.0, np.nan]),
            1: (np.int64(3), np.bool_(True), None),
            "inf": np.float32(np.inf),
            "text": "ok",
        }
        self.assertEqual(
            to_json_compatible(value),
            {"array": [1.0, None], "1": [3, True, None], "inf": None, "text": "ok"},
        )


class RunOutputStorageTests(LabTestCase):
    def test_default_location(self):
        storage = RunOutputStorage()
        self.assertEqual(storage.location, os.path.abspath(self.out_dir))
        self.assertTrue(os.path.isdir(self.out_dir))

    def test_files_are_replaced(self):
        storage = RunOutputStorage()
        self.assertEqual(storage.write_text("a.txt", "first"), "a.txt")
        self.assertEqual(storage.write_text("a.txt", "second"), "a.txt")
        self.assertEqual(self.read_output("a.txt"), "second")
        self.assertEqual(os.listdir(self.out_dir), ["a.txt"])

    def test_csv(self):
        storage = RunOutputStorage()
        storage.write_csv("t.csv", ("x", "y"), [(0.5, 1), (np.float64(0.25), np.nan)])
        self.assertEqual(self.read_output("t.csv"), "x,y\n0.5,1\n0.25,nan\n")

    def test_json_writes_null_for_nan(self):
        storage = RunOutputStorage()
        storage.write_json("p.json", {"value": np.nan, "values": np.arange(3)})
        self.assertEqual(json.loads(self.read_output("p.json")), {"value": None, "values": [0, 1, 2]})

    def test_schema_violation_writes_nothing(self):
        storage = RunOutputStorage()
        with self.assertRaises(jsonschema.ValidationError):
            storage.write_json("steady.json", {"J_bar": 0.0}, load_schema("steady.json"))
        self.assertFalse(storage.exists("steady.json"))


if __name__ == "__main__":
    unittest.main()
