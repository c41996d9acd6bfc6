"""Solidity source tree -> call-record table."""

from __future__ import annotations

import csv
import io
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple, Union

from dappnet.extract.lexer import LexError, Token, tokenize_text
from dappnet.extract.model import (
    NONE_TARGET,
    CallRecord,
    ContractDecl,
    FileDecls,
    FunctionDecl,
    SourceUnit,
)
from dappnet.extract.parser import ParseError, parse_declarations, parse_file
from dappnet.extract.resolver import SymbolTable, resolve_calls

log = logging.getLogger(__name__)

CSV_HEADER = ("File", "Source_Contract", "Source_Function", "Target_Contract")

__all__ = [
    "CSV_HEADER",
    "CallRecord",
    "ContractDecl",
    "FunctionDecl",
    "LexError",
    "NONE_TARGET",
    "ParseError",
    "ProjectExtraction",
    "SourceUnit",
    "SymbolTable",
    "emit_call_table",
    "extract_project",
    "parse_declarations",
    "read_call_table",
    "resolve_calls",
    "scan_project",
    "tokenize",
]


def scan_project(root: Union[str, Path]) -> List[SourceUnit]:
    """All ``.sol`` files under ``root`` in lexicographic path order.

    Files that cannot be read or decoded as UTF-8 are logged and skipped.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"source root does not exist: {root}")
    units = []
    for path in sorted(root.rglob("*.sol"), key=lambda p: p.relative_to(root).as_posix()):
        if not path.is_file():
            continue
        try:
            text = path.read_bytes().decode("utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            log.warning("skipping %s: %s", path, exc)
            continue
        units.append(SourceUnit(path=path.relative_to(root).as_posix(), text=text))
    return units


def tokenize(unit: SourceUnit) -> List[Token]:
    return tokenize_text(unit.text, unit.path)


class ProjectExtraction:
    """Result of running the extractor over one source tree."""

    def __init__(self, table: SymbolTable, records: List[CallRecord], errors: List[str]) -> None:
        self.table = table
        self.records = records
        self.errors = errors

    @property
    def contracts(self) -> List[ContractDecl]:
        return [decl for decl, _ in self.table.order]

    @property
    def functions(self) -> List[FunctionDecl]:
        return [fn for _, fns in self.table.order for fn in fns]


def extract_units(units: Sequence[SourceUnit]) -> ProjectExtraction:
    files: List[FileDecls] = []
    errors: List[str] = []
    for unit in units:
        try:
            files.append(parse_file(tokenize(unit), unit))
        except (LexError, ParseError) as exc:
            log.warning("skipping %s: %s", unit.path, exc)
            errors.append(str(exc))
    table = SymbolTable.build(files)
    return ProjectExtraction(table, resolve_calls(table), errors)


def extract_project(root: Union[str, Path]) -> ProjectExtraction:
    return extract_units(scan_project(root))


def emit_call_table(records: Iterable[CallRecord], out: Optional[TextIO] = None) -> str:
    """Render records as the 4-column CSV; also written to ``out`` if given."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.as_row())
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def read_call_table(source: Union[str, Path, TextIO]) -> List[CallRecord]:
    """Parse a call table written by this or any compatible extractor."""
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_call_table(fh)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None:
        return []
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise ValueError(f"unexpected call-table header: {header}")
    records = []
    for row in reader:
        if not row:
            continue
        if len(row) != 4:
            raise ValueError(f"malformed call-table row: {row}")
        file, src_c, src_f, tgt = (cell.strip() for cell in row)
        records.append(CallRecord(file, src_c, src_f, None if tgt == NONE_TARGET else tgt))
    return records


def declared_contracts(ext: ProjectExtraction) -> List[str]:
    return [decl.name for decl in ext.contracts]
