"""Declaration and call-record types produced by the extractor."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from dappnet.extract.lexer import Token

NONE_TARGET = "None"

CONTRACT_KINDS = ("contract", "library", "interface", "abstract-contract")
VISIBILITIES = ("public", "external", "internal", "private", "unspecified")


@dataclass
class SourceUnit:
    path: str
    text: str
    pragma_versions: List[str] = field(default_factory=list)


@dataclass
class ContractDecl:
    name: str
    kind: str
    file: str
    bases: List[str] = field(default_factory=list)
    state_var_types: Dict[str, str] = field(default_factory=dict)
    # libraries attached with `using L for T`
    usings: List[str] = field(default_factory=list)
    # struct / enum / event / error names declared inside the contract
    type_names: List[str] = field(default_factory=list)
    line: int = 0


@dataclass
class FunctionDecl:
    contract: str
    name: str
    visibility: str = "unspecified"
    ordinal: int = 0
    kind: str = "function"  # function | constructor | fallback | receive | modifier
    params: Dict[str, str] = field(default_factory=dict)
    body: Tuple[Token, ...] = ()
    has_body: bool = False
    line: int = 0

    @property
    def key(self) -> Tuple[str, str, int]:
        return (self.contract, self.name, self.ordinal)


@dataclass(frozen=True)
class CallRecord:
    file: str
    source_contract: str
    source_function: str
    target_contract: Optional[str]

    @property
    def target_label(self) -> str:
        return NONE_TARGET if self.target_contract is None else self.target_contract

    def as_row(self) -> Tuple[str, str, str, str]:
        return (self.file, self.source_contract, self.source_function, self.target_label)


@dataclass
class FileDecls:
    """Everything parse_declarations found in one source unit."""

    unit: SourceUnit
    contracts: List[ContractDecl]
    functions: List[FunctionDecl]
    usings: List[str] = field(default_factory=list)
    type_names: List[str] = field(default_factory=list)


def display_path(path: str, root: Optional[str]) -> str:
    if root is None:
        return path
    try:
        return Path(path).relative_to(root).as_posix()
    except ValueError:
        return path
