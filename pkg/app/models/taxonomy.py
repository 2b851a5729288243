from __future__ import annotations

import re
from enum import Enum
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

# Codes are always strings so "0111" keeps its leading zero.
IsicCode = str

_SECTION_RE = re.compile(r"^[A-Z]$")
_DIGITS_RE = re.compile(r"^[0-9]{2,4}$")


class Level(str, Enum):
    SECTION = "section"
    DIVISION = "division"
    GROUP = "group"
    CLASS = "class"

    @property
    def depth(self) -> int:
        return _DEPTH[self]


_DEPTH = {Level.SECTION: 0, Level.DIVISION: 1, Level.GROUP: 2, Level.CLASS: 3}
_BY_DIGITS = {2: Level.DIVISION, 3: Level.GROUP, 4: Level.CLASS}


def level_of(code: str) -> Optional[Level]:
    """Level implied by the code's shape, or None if the shape is invalid."""
    if _SECTION_RE.match(code):
        return Level.SECTION
    if _DIGITS_RE.match(code):
        return _BY_DIGITS[len(code)]
    return None


def is_valid_code(code: str) -> bool:
    return level_of(code) is not None


class TaxonomyNode(BaseModel):
    """
    One row of the ISIC hierarchy.
    - parent: None only for sections
    - description: kept verbatim from the source table
    """
    model_config = ConfigDict(frozen=True)

    code: IsicCode
    level: Level
    parent: Optional[IsicCode] = None
    description: str


class Taxonomy(BaseModel):
    """
    Validated Section -> Division -> Group -> Class tree.
    Immutable after construction; `children` lists are sorted ascending.
    `revision` is opaque metadata (e.g. "Rev.4"), never interpreted.
    """
    model_config = ConfigDict(frozen=True)

    nodes: Dict[IsicCode, TaxonomyNode]
    children: Dict[IsicCode, Tuple[IsicCode, ...]] = Field(default_factory=dict)
    revision: str = ""

    def __contains__(self, code: object) -> bool:
        return code in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)
