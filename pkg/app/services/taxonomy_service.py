"""
Parsing, validation and navigation of the ISIC code table.

CSV contract: header `level,code,parent,description`, UTF-8, RFC 4180 quoting.
Row numbers in error messages count data rows from 1 (the header is not a row).
"""

from __future__ import annotations

import csv
import io
import logging
from pathlib import Path
from typing import Dict, List, Tuple

from app.core.errors import TaxonomyError
from app.models.taxonomy import IsicCode, Level, Taxonomy, TaxonomyNode, level_of

logger = logging.getLogger(__name__)

TAXONOMY_HEADER = ["level", "code", "parent", "description"]


def parse_taxonomy(source: str, *, revision: str = "") -> Taxonomy:
    if source.startswith("\ufeff"):
        source = source[1:]
    # numbered before blank rows are dropped so messages match the file
    records = [(i, r) for i, r in enumerate(csv.reader(io.StringIO(source))) if any(f.strip() for f in r)]
    if not records:
        raise TaxonomyError("empty taxonomy")
    header_at, header_row = records[0]
    header = [h.strip().lower() for h in header_row]
    if header != TAXONOMY_HEADER:
        raise TaxonomyError(f"bad taxonomy header {header_row!r}, expected {','.join(TAXONOMY_HEADER)}")
    data = [(i - header_at, row) for i, row in records[1:]]
    if not data:
        raise TaxonomyError("empty taxonomy")

    parsed: List[Tuple[int, TaxonomyNode | TaxonomyError]] = []
    for n, row in data:
        try:
            parsed.append((n, _parse_row(n, row)))
        except TaxonomyError as e:
            parsed.append((n, e))

    # parents may appear after their children
    known: Dict[IsicCode, TaxonomyNode] = {}
    for _, node in reversed(parsed):
        if isinstance(node, TaxonomyNode):
            known[node.code] = node

    # rows are checked in file order so the error names the first offending row
    nodes: Dict[IsicCode, TaxonomyNode] = {}
    for n, node in parsed:
        if isinstance(node, TaxonomyError):
            raise node
        if node.code in nodes:
            raise TaxonomyError(f"duplicate code {node.code!r} at row {n}")
        _check_parent(n, node, known)
        nodes[node.code] = node

    children: Dict[IsicCode, List[IsicCode]] = {code: [] for code in nodes}
    for node in nodes.values():
        if node.parent is not None:
            children[node.parent].append(node.code)

    taxonomy = Taxonomy(
        nodes=nodes,
        children={code: tuple(sorted(kids)) for code, kids in children.items()},
        revision=revision,
    )
    logger.debug("parsed taxonomy with %d nodes", len(nodes))
    return taxonomy


def _parse_row(n: int, row: List[str]) -> TaxonomyNode:
    if len(row) != 4:
        raise TaxonomyError(f"row {n}: expected 4 fields, got {len(row)}")
    raw_level, code, parent, description = row[0].strip().lower(), row[1].strip(), row[2].strip(), row[3]
    try:
        level = Level(raw_level)
    except ValueError:
        raise TaxonomyError(f"row {n}: unknown level {row[0]!r}") from None
    shape = level_of(code)
    if shape is None:
        raise TaxonomyError(f"row {n}: malformed ISIC code {code!r}")
    if shape is not level:
        raise TaxonomyError(f"row {n}: code {code!r} has the shape of a {shape.value}, not a {level.value}")
    if level is Level.SECTION:
        if parent:
            raise TaxonomyError(f"row {n}: section {code!r} must not have a parent")
        return TaxonomyNode(code=code, level=level, parent=None, description=description)
    if not parent:
        raise TaxonomyError(f"row {n}: {level.value} {code!r} has no parent")
    return TaxonomyNode(code=code, level=level, parent=parent, description=description)


def _check_parent(n: int, node: TaxonomyNode, known: Dict[IsicCode, TaxonomyNode]) -> None:
    if node.parent is None:
        return
    parent = known.get(node.parent)
    if parent is None:
        raise TaxonomyError(f"row {n}: orphan parent reference {node.parent!r} for {node.code!r}")
    if parent.level.depth != node.level.depth - 1:
        raise TaxonomyError(
            f"row {n}: parent {parent.code!r} of {node.code!r} is a {parent.level.value}, not one level up"
        )
    # letters are not prefixes; only digit parents follow the prefix rule
    if node.level in (Level.GROUP, Level.CLASS) and node.code[:-1] != parent.code:
        raise TaxonomyError(f"row {n}: {node.code!r} is not under its parent prefix {parent.code!r}")


def load_taxonomy(path: str | Path, *, revision: str = "") -> Taxonomy:
    return parse_taxonomy(Path(path).read_text(encoding="utf-8"), revision=revision)


def serialize_taxonomy(taxonomy: Taxonomy) -> str:
    """CSV text, sections first, depth-first by ascending code."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TAXONOMY_HEADER)

    def walk(code: IsicCode) -> None:
        node = taxonomy.nodes[code]
        writer.writerow([node.level.value, node.code, node.parent or "", node.description])
        for child in taxonomy.children.get(code, ()):
            walk(child)

    for code in codes_at(taxonomy, Level.SECTION):
        walk(code)
    return buf.getvalue()


def _node(taxonomy: Taxonomy, code: IsicCode) -> TaxonomyNode:
    node = taxonomy.nodes.get(code)
    if node is None:
        raise TaxonomyError(f"unknown code {code!r}")
    return node


def ancestors(taxonomy: Taxonomy, code: IsicCode) -> List[IsicCode]:
    """Immediate parent first, section last."""
    chain: List[IsicCode] = []
    node = _node(taxonomy, code)
    while node.parent is not None:
        chain.append(node.parent)
        node = taxonomy.nodes[node.parent]
    return chain


def division_of(code: IsicCode) -> IsicCode:
    level = level_of(code)
    if level is None:
        raise TaxonomyError(f"malformed ISIC code {code!r}")
    if level not in (Level.GROUP, Level.CLASS):
        raise TaxonomyError(f"{code!r} is a {level.value}; division_of needs a group or class code")
    return code[:2]


def describe(taxonomy: Taxonomy, code: IsicCode) -> str:
    return _node(taxonomy, code).description


def children(taxonomy: Taxonomy, code: IsicCode) -> Tuple[IsicCode, ...]:
    _node(taxonomy, code)
    return taxonomy.children.get(code, ())


def codes_at(taxonomy: Taxonomy, level: Level) -> List[IsicCode]:
    return sorted(code for code, node in taxonomy.nodes.items() if node.level is level)
