# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os

import jsonschema
import numpy as np
from django.conf import settings
from django.core.files.base import ContentFile
from django.core.files.storage import FileSystemStorage

logger = logging.getLogger(__name__)

SCHEMA_DIR = f"{os.path.dirname(__file__)}/schemas"


def load_schema(name: str) -> dict:
    with open(f"{SCHEMA_DIR}/{name}") as f:
        return json.load(f)


def format_float(x) -> str:
    """
    17 significant digits round-trip every float64; non-finite values are
    written as nan/inf.
    """
    return format(float(x), ".17g")


def to_json_compatible(value):
    """
    Replace numpy scalars and arrays with Python values and non-finite floats
    with None.
    """
    if isinstance(value, dict):
        return {str(k): to_json_compatible(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_compatible(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_json_compatible(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


class RunOutputStorage(FileSystemStorage):
    """
    Output directory of one command run. Existing files of the same name are
    replaced, so repeated runs give identical trees.
    """

    def __init__(self, location=None, **kwargs):
        location = location or settings.SEMICONDUCTOR_OUTPUT_DIR
        os.makedirs(location, exist_ok=True)
        super().__init__(location=location, **kwargs)

    def get_available_name(self, name, max_length=None):
        if self.exists(name):
            self.delete(name)
        return name

    def write_text(self, name: str, text: str) -> str:
        saved = self.save(name, ContentFile(text.encode("utf-8")))
        logger.debug(f"Wrote {self.path(saved)}")
        return saved

    def write_json(self, name: str, payload: dict, schema: dict | None = None) -> str:
        document = to_json_compatible(payload)
        if schema is not None:
            jsonschema.validate(document, schema)
        return self.write_text(name, json.dumps(document, indent=2, allow_nan=False) + "\n")

    def write_csv(self, name: str, header, rows) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(x) for x in row])
        return self.write_text(name, buffer.getvalue())
