"""Result files. Every CSV starts with a ``# config-sha256=<hex>`` line and
a header row; numbers carry nine significant digits."""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path
from typing import IO, Any, Iterable, List, Mapping, Sequence

import numpy as np

from hjbandit.lattice import (
    ValueField,
    encode_value_field,
    format_number,
    write_value_csv,
)

log = logging.getLogger(__name__)

__all__ = [
    "ResultWriter",
    "jsonable",
]

Row = Sequence[Any]


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_number(float(value))
    return str(value)


def jsonable(value: Any) -> Any:
    """Plain JSON types; NaN becomes null, infinities stay strings"""
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if hasattr(value, "_asdict"):
        return jsonable(value._asdict())
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


class ResultWriter:
    """Writes the files of one command into ``directory``.

    Arguments:
        directory (str): created on first write
        digest (str): hex digest of the configuration, stamped on every CSV
    """

    def __init__(self, directory: str, digest: str) -> None:
        self.directory = Path(directory)
        self.digest = digest
        self.written: List[Path] = []

    def _open(self, name: str, mode: str = "w") -> IO[Any]:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / name
        self.written.append(path)
        log.debug("Writing %s", path)
        if "b" in mode:
            return path.open(mode)
        return path.open(mode, encoding="utf-8", newline="")

    def csv(self, name: str, header: Sequence[str], rows: Iterable[Row]) -> Path:
        with self._open(name) as f:
            f.write(f"# config-sha256={self.digest}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        return self.written[-1]

    def json(self, name: str, payload: Any) -> Path:
        with self._open(name) as f:
            json.dump(jsonable(payload), f, indent=2, sort_keys=True)
            f.write("\n")
        return self.written[-1]

    def json_lines(self, name: str, records: Iterable[Any]) -> Path:
        with self._open(name) as f:
            for record in records:
                f.write(json.dumps(jsonable(record), sort_keys=True))
                f.write("\n")
        return self.written[-1]

    def value_field(
        self, stem: str, field: ValueField, *, binary: bool, compresslevel: Any
    ) -> Path:
        """One value slice, as CSV or in the binary value-field format"""
        if binary:
            with self._open(f"{stem}.hjbv", "wb") as f:
                f.write(encode_value_field(field, compresslevel))
            return self.written[-1]
        with self._open(f"{stem}.csv") as f:
            write_value_csv(field, f, comment=f"config-sha256={self.digest}")
        return self.written[-1]
