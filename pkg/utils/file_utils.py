"""
File output utilities.
Every artifact is written to a temporary file in the target directory and
renamed into place, so a failed run never leaves a half-written file.
"""

import csv
import json
import os
import tempfile
from contextlib import contextmanager
from typing import Iterable, Sequence

from config.settings import FLOAT_FORMAT
from utils.json_utils import to_jsonable


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


@contextmanager
def atomic_open(path: str):
    directory = os.path.dirname(os.path.abspath(path))
    ensure_dir(directory)
    fd, tmp = tempfile.mkstemp(prefix=".tmp_", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def format_cell(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, int):
        return str(value)
    try:
        return FLOAT_FORMAT % float(value)
    except (TypeError, ValueError):
        return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    with atomic_open(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
    return path


def write_json(path: str, obj) -> str:
    with atomic_open(path) as f:
        json.dump(to_jsonable(obj), f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    return path
