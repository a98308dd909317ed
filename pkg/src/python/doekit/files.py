"""CSV and JSON serialization of designs and experimental results.

Design and results files are comma separated, with LF line endings. An
optional leading ``run`` column carries the run ids (runs are numbered
from 1 otherwise). Levels are written as -1, 0 and 1 codes; on input,
``L``/``H`` and ``-``/``+`` tokens are accepted as well. Factor labels and
the design kind live in a JSON sidecar, ``<stem>.labels.json``.
"""

import csv
import io
import json
import logging
import math
import os
from pathlib import Path
import tempfile

from .design import DesignKind, DesignMatrix, FactorSpec, RUN_COLUMN, Run, \
                    THREE_LEVELS, TWO_LEVELS
from .effects import DEFAULT_RESPONSE, ExperimentData
from .errors import ParseError, ValidationError

__all__ = [
    "format_design_csv",
    "format_results_csv",
    "format_sidecar",
    "parse_design_csv",
    "parse_results_csv",
    "read_sidecar",
    "read_text",
    "sidecar_path",
    "write_design_csv",
    "write_results_csv",
    "write_text",
]

logger = logging.getLogger(__name__)

TOKENS = {
    "-1": -1, "0": 0, "1": 1, "+1": 1,
    "-": -1, "+": 1,
    "L": -1, "H": 1, "l": -1, "h": 1,
}


def sidecar_path(path):
    """Path of the label sidecar of a CSV file."""
    return Path(path).with_suffix(".labels.json")


def format_sidecar(design):
    """JSON sidecar holding the design kind and factor labels."""

    factors = {}
    for factor in design.factors:
        labels = None if factor.labels is None else {
            str(level): text for level, text in sorted(factor.labels.items())
        }
        factors[factor.name] = {"levels": list(factor.levels),
                                "labels": labels}
    content = {"kind": design.kind.value, "factors": factors}
    return json.dumps(content, indent=2) + "\n"


def read_sidecar(path):
    """Load a sidecar, if any, as ``(kind, {name: FactorSpec})``."""

    path = sidecar_path(path)
    if not path.exists():
        return None
    try:
        content = json.loads(read_text(path))
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=path, row=e.lineno) from None
    try:
        kind = DesignKind(content.get("kind", DesignKind.CUSTOM.value))
        factors = {
            name: FactorSpec(name, spec["levels"], spec.get("labels"))
            for name, spec in content["factors"].items()
        }
    except ValidationError as e:
        raise ParseError(str(e), path=path) from None
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad sidecar ({e})", path=path) from None
    return kind, factors


def read_text(path):
    """Read a UTF-8 text file.

    Undecodable content raises a ParseError locating the offending row.
    """

    path = Path(path)
    data = path.read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        row = data.count(b"\n", 0, e.start) + 1
        raise ParseError(
            f"invalid UTF-8 byte at offset {e.start}", path=path, row=row
        ) from None


def _open(source):
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        return path, read_text(path)
    path = getattr(source, "name", None)
    try:
        return path, source.read()
    except UnicodeDecodeError as e:
        raise ParseError(f"invalid UTF-8 content ({e.reason})", path=path) \
            from None


def _read_table(text, path):
    reader = csv.reader(io.StringIO(text))
    header, rows = None, []
    for record in reader:
        if not record or all(not cell.strip() for cell in record):
            continue
        record = [cell.strip() for cell in record]
        if header is None:
            header = record
            continue
        if len(record) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, found {len(record)}",
                path=path, row=reader.line_num,
            )
        rows.append((reader.line_num, record))

    if header is None:
        raise ParseError("missing header", path=path)
    if len(set(header)) != len(header):
        raise ParseError("duplicate column names", path=path, row=1)
    if not rows:
        raise ParseError("no runs", path=path)
    return header, rows


def _build_design(header, rows, path, sidecar, skip=()):
    if header and header[0] == RUN_COLUMN:
        names = header[1:]
        offset = 1
    else:
        names = list(header)
        offset = 0
    names = [name for name in names if name not in skip]
    if not names:
        raise ParseError("no factor columns", path=path)
    columns = [header.index(name) for name in names]

    ids, settings = [], []
    for i, (line, record) in enumerate(rows, 1):
        if offset:
            try:
                ids.append(int(record[0]))
            except ValueError:
                raise ParseError(
                    f"bad run id ({record[0]!r})", path=path, row=line,
                    column=RUN_COLUMN,
                ) from None
        else:
            ids.append(i)

        levels = []
        for name, j in zip(names, columns):
            token = record[j]
            if token not in TOKENS:
                raise ParseError(
                    f"unknown level token ({token!r})", path=path, row=line,
                    column=name,
                )
            levels.append(TOKENS[token])
        settings.append(tuple(levels))

    if sidecar is not None:
        kind, specs = sidecar
        if set(specs) != set(names):
            raise ParseError(
                "sidecar factors do not match the CSV columns", path=path
            )

    try:
        if sidecar is None:
            kind = DesignKind.CUSTOM
            factors = []
            for j, name in enumerate(names):
                centred = any(s[j] == 0 for s in settings)
                factors.append(
                    FactorSpec(name, THREE_LEVELS if centred else TWO_LEVELS)
                )
        else:
            factors = [specs[name] for name in names]
        runs = tuple(Run(run_id, s) for run_id, s in zip(ids, settings))
        return DesignMatrix(tuple(factors), runs, kind)
    except ValidationError as e:
        raise ParseError(str(e), path=path) from None


def parse_design_csv(source, sidecar=None):
    """Parse a design CSV from a path or a text stream.

    When reading from a path, a ``<stem>.labels.json`` sidecar is loaded
    if present.
    """

    path, text = _open(source)
    if sidecar is None and isinstance(source, (str, os.PathLike)):
        sidecar = read_sidecar(path)
    header, rows = _read_table(text, path)
    return _build_design(header, rows, path, sidecar)


def parse_results_csv(source, response=DEFAULT_RESPONSE, sidecar=None):
    """Parse experimental results from a path or a text stream.

    All columns but the response (and ``run``) are factors.
    """

    path, text = _open(source)
    if sidecar is None and isinstance(source, (str, os.PathLike)):
        sidecar = read_sidecar(path)
    header, rows = _read_table(text, path)
    if response not in header:
        raise ParseError(f"missing response column ({response!r})", path=path)
    design = _build_design(header, rows, path, sidecar, skip=(response,))

    j = header.index(response)
    values = []
    for line, record in rows:
        try:
            value = float(record[j])
        except ValueError:
            value = math.nan
        if not math.isfinite(value):
            raise ParseError(
                f"bad response ({record[j]!r})", path=path, row=line,
                column=response,
            )
        values.append(value)

    logger.debug("parsed %d runs over %d factors", len(design),
                 len(design.factors))
    return ExperimentData(design, tuple(values), response)


def _format(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def format_design_csv(design):
    """Canonical CSV text of a design."""

    header = [RUN_COLUMN, *design.names]
    rows = [[run.run_id, *run.settings] for run in design.runs]
    return _format(header, rows)


def format_results_csv(data, decimals=1):
    """Canonical CSV text of experimental results."""

    header = [RUN_COLUMN, *data.design.names, data.response_name]
    rows = [
        [run.run_id, *run.settings,
         f"{round(value, decimals) + 0.0:.{decimals}f}"]
        for run, value in zip(data.runs, data.response)
    ]
    return _format(header, rows)


def write_text(path, text):
    """Write a file atomically."""

    path = Path(path)
    fd, tmp = tempfile.mkstemp(
        dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}."
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_design_csv(design, path):
    """Write a design CSV and its label sidecar."""

    csv_text = format_design_csv(design)
    sidecar = format_sidecar(design)
    write_text(path, csv_text)
    write_text(sidecar_path(path), sidecar)


def write_results_csv(data, path, decimals=1):
    """Write a results CSV and its label sidecar."""

    csv_text = format_results_csv(data, decimals)
    sidecar = format_sidecar(data.design)
    write_text(path, csv_text)
    write_text(sidecar_path(path), sidecar)
