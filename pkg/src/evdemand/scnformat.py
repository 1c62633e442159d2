"""Line-oriented section/key-value syntax for scenario and dataset files.

The format is UTF-8 text. ``#`` starts a comment to end of line (outside
quoted strings), ``[section-name]`` lines open sections, and entries are
``key = value``. A value is one of:

* a quantity literal (``4055 TWh``, ``61 %``),
* a bare decimal (dimensionless),
* a double-quoted string (no escapes), or
* an identifier (``shares``, ``catalog-median``).

This module only tokenizes and structures the text; meaning is assigned by
the scenario loader.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import EvDemandError, ParseError
from .quantities import Quantity, parse_quantity

__all__ = ["RawValue", "Entry", "Section", "Document", "parse_document", "write_document"]

_SECTION_RE = re.compile(r"^\[([A-Za-z_][A-Za-z0-9_-]*)\]$")
_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")
# identifier values may carry dots (sweep parameter paths)
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.-]*$")
_NUMBER_RE = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")
_NUMBER_PREFIX_RE = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


@dataclass(frozen=True)
class RawValue:
    """A parsed value: ``kind`` is quantity, number, string, ident, or list.

    A list payload is a tuple of scalar RawValues (comma-separated source).
    """

    kind: str
    text: str
    payload: Union[Quantity, float, str, tuple]
    line: int
    column: int


@dataclass(frozen=True)
class Entry:
    key: str
    value: RawValue
    line: int


@dataclass(frozen=True)
class Section:
    name: str
    line: int
    entries: tuple[Entry, ...]

    def keys(self) -> tuple[str, ...]:
        return tuple(e.key for e in self.entries)

    def get(self, key: str) -> RawValue | None:
        for e in self.entries:
            if e.key == key:
                return e.value
        return None


@dataclass(frozen=True)
class Document:
    sections: tuple[Section, ...]

    def section(self, name: str) -> Section | None:
        for s in self.sections:
            if s.name == name:
                return s
        return None

    def section_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.sections)


def _strip_comment(line: str) -> str:
    in_string = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_string = not in_string
        elif ch == "#" and not in_string:
            return line[:i]
    return line


def _parse_value(text: str, line_no: int, column: int) -> RawValue:
    if "," in text and not text.startswith('"'):
        items = []
        offset = 0
        for piece in text.split(","):
            stripped = piece.strip()
            if not stripped:
                raise ParseError("empty item in value list", line=line_no,
                                 column=column + offset)
            items.append(_parse_value(stripped, line_no, column + offset))
            offset += len(piece) + 1
        return RawValue("list", text, tuple(items), line_no, column)
    if text.startswith('"'):
        if len(text) < 2 or not text.endswith('"') or text.count('"') != 2:
            raise ParseError(f"unterminated or malformed string {text!r}",
                             line=line_no, column=column)
        return RawValue("string", text, text[1:-1], line_no, column)
    if _NUMBER_RE.match(text):
        return RawValue("number", text, float(text), line_no, column)
    if _NUMBER_PREFIX_RE.match(text):
        try:
            q = parse_quantity(text)
        except EvDemandError as exc:
            raise ParseError(f"bad quantity literal {text!r}: {exc}",
                             line=line_no, column=column) from exc
        return RawValue("quantity", text, q, line_no, column)
    if _IDENT_RE.match(text):
        return RawValue("ident", text, text, line_no, column)
    raise ParseError(f"unrecognized value {text!r}", line=line_no, column=column)


def parse_document(text: str) -> Document:
    """Parse file text into ordered sections of ordered entries.

    Raises :class:`ParseError` (with line/column) for anything malformed:
    entries before the first section, duplicate sections, duplicate keys
    within a section, or garbled lines. An input with no sections at all is
    also an error; these files always declare at least one.
    """
    sections: list[tuple[str, int, list[Entry]]] = []
    seen_sections: set[str] = set()
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line).strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            name = m.group(1)
            if name in seen_sections:
                raise ParseError(f"duplicate section [{name}]", line=line_no, column=1)
            seen_sections.add(name)
            sections.append((name, line_no, []))
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value' or '[section]', got {line!r}",
                             line=line_no, column=1)
        key_part, _, value_part = line.partition("=")
        key = key_part.strip()
        value_text = value_part.strip()
        if not _KEY_RE.match(key):
            raise ParseError(f"bad key {key!r}", line=line_no, column=1)
        if not sections:
            raise ParseError(f"entry {key!r} appears before any section",
                             line=line_no, column=1)
        if not value_text:
            raise ParseError(f"missing value for key {key!r}", line=line_no, column=1)
        column = raw_line.find(value_text) + 1
        value = _parse_value(value_text, line_no, column)
        name, sec_line, entries = sections[-1]
        if any(e.key == key for e in entries):
            raise ParseError(f"duplicate key {key!r} in section [{name}]",
                             line=line_no, column=1)
        entries.append(Entry(key=key, value=value, line=line_no))
    if not sections:
        raise ParseError("no sections found", line=1, column=1)
    return Document(sections=tuple(
        Section(name=n, line=ln, entries=tuple(es)) for n, ln, es in sections))


def write_document(sections: list[tuple[str, list[tuple[str, str]]]],
                   header_comments: list[str] | None = None) -> str:
    """Render sections back to file text. Values must be pre-rendered strings."""
    lines: list[str] = []
    for comment in header_comments or []:
        lines.append(f"# {comment}" if comment else "#")
    if header_comments:
        lines.append("")
    for i, (name, entries) in enumerate(sections):
        if i or header_comments:
            if lines and lines[-1] != "":
                lines.append("")
        lines.append(f"[{name}]")
        for key, value in entries:
            lines.append(f"{key} = {value}")
    lines.append("")
    return "\n".join(lines)
