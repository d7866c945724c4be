# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""Self-describing text container shared by dataset files and checkpoints.

Layout::

    %geansim <kind> <version>
    ---
    <YAML header, validated against the kind's schema>
    ...
    @table <name> <rows> <cols>
    <comma-separated column names>
    <rows of comma-separated numbers, floats with 17 significant digits>
    @table ...
    @end

The trailing ``@end`` line makes truncation detectable.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from . import constants
from .errors import ConfigError, FormatVersionError, ParseError
from .validation import validate_yaml_data

MAGIC = "%geansim"


@dataclass
class Table:
    """Named numeric table; the first int_columns columns are written as integers."""

    name: str
    columns: Sequence[str]
    data: np.ndarray
    int_columns: int = 0


def write_container(
    path,
    kind: str,
    version: int,
    header: Dict,
    tables: Sequence[Table],
) -> None:
    with open(path, "w", newline="\n") as f:
        f.write(f"{MAGIC} {kind} {version}\n---\n")
        f.write(yaml.safe_dump(header, sort_keys=False, default_flow_style=None))
        f.write("...\n")
        for table in tables:
            data = np.atleast_2d(np.asarray(table.data, dtype=np.float64))
            if data.size == 0:
                data = data.reshape(0, len(table.columns))
            if data.shape[1] != len(table.columns):
                raise ValueError(
                    f"table {table.name!r} has {data.shape[1]} columns, "
                    f"expected {len(table.columns)}"
                )
            f.write(f"@table {table.name} {data.shape[0]} {data.shape[1]}\n")
            f.write(",".join(table.columns) + "\n")
            fmt = ["%d"] * table.int_columns + [constants.FLOAT_FORMAT] * (
                data.shape[1] - table.int_columns
            )
            if data.shape[0]:
                np.savetxt(f, data, fmt=fmt, delimiter=",")
        f.write("@end\n")


def _parse_rows(path, lines: List[str], start: int, n_rows: int, n_cols: int) -> np.ndarray:
    chunk = lines[start : start + n_rows]
    if len(chunk) < n_rows:
        raise ParseError(path, len(lines), f"expected {n_rows} rows, file is truncated")
    if n_rows == 0:
        return np.zeros((0, n_cols))
    try:
        data = np.loadtxt(chunk, delimiter=",", dtype=np.float64, ndmin=2)
        if data.shape == (n_rows, n_cols):
            return data
    except ValueError:
        pass
    for offset, row in enumerate(chunk):
        cells = row.split(",")
        if len(cells) != n_cols:
            raise ParseError(
                path, start + offset + 1, f"expected {n_cols} values, found {len(cells)}"
            )
        try:
            [float(cell) for cell in cells]
        except ValueError as exc:
            raise ParseError(path, start + offset + 1, f"bad number: {exc}") from exc
    raise ParseError(path, start + 1, "malformed table")


def read_container(
    path, kind: str, version: int, schema_file: Optional[str] = None
) -> Tuple[Dict, Dict[str, Table]]:
    """Read a container, checking kind and version; return (header, tables by name)."""
    try:
        with open(path, "r") as f:
            lines = f.read().splitlines()
    except UnicodeDecodeError as exc:
        raise ParseError(path, None, f"not a text container: {exc}") from exc
    if not lines:
        raise ParseError(path, 1, "empty file")
    magic = lines[0].split()
    if len(magic) != 3 or magic[0] != MAGIC:
        raise ParseError(path, 1, f"missing {MAGIC} header line")
    if magic[1] != kind:
        raise FormatVersionError(path, 1, f"container holds {magic[1]!r}, expected {kind!r}")
    if magic[2] != str(version):
        raise FormatVersionError(
            path, 1, f"format version {magic[2]} is not supported (expected {version})"
        )
    if len(lines) < 2 or lines[1] != "---":
        raise ParseError(path, 2, "expected '---' to open the header")
    try:
        end = lines.index("...", 2)
    except ValueError:
        raise ParseError(path, len(lines), "header is not terminated by '...'") from None
    try:
        header = yaml.safe_load("\n".join(lines[2:end]))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 3 if mark is not None else 3
        raise ParseError(path, line, f"invalid header: {exc}") from exc
    if not isinstance(header, dict):
        raise ParseError(path, 3, "header must be a mapping")
    if schema_file is not None:
        try:
            validate_yaml_data(header, schema_file, where=str(path))
        except ConfigError as exc:
            raise ParseError(path, 3, f"header does not match schema: {exc}") from exc

    tables: Dict[str, Table] = {}
    i = end + 1
    while True:
        if i >= len(lines):
            raise ParseError(path, len(lines), "missing '@end', file is truncated")
        line = lines[i]
        if line == "@end":
            if any(rest.strip() for rest in lines[i + 1 :]):
                raise ParseError(path, i + 2, "content after '@end'")
            break
        parts = line.split()
        if len(parts) != 4 or parts[0] != "@table":
            raise ParseError(path, i + 1, f"expected '@table <name> <rows> <cols>', got {line!r}")
        try:
            n_rows, n_cols = int(parts[2]), int(parts[3])
        except ValueError:
            raise ParseError(path, i + 1, f"bad table size in {line!r}") from None
        if i + 1 >= len(lines):
            raise ParseError(path, i + 1, "missing column line, file is truncated")
        columns = lines[i + 1].split(",")
        if len(columns) != n_cols:
            raise ParseError(path, i + 2, f"expected {n_cols} column names, found {len(columns)}")
        data = _parse_rows(path, lines, i + 2, n_rows, n_cols)
        tables[parts[1]] = Table(name=parts[1], columns=columns, data=data)
        i += 2 + n_rows
    return header, tables
