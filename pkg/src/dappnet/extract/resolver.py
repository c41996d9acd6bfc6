"""Project-wide symbol table and call-target resolution."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from dappnet.extract.lexer import IDENT, PUNCT, Token
from dappnet.extract.model import CallRecord, ContractDecl, FileDecls, FunctionDecl
from dappnet.extract.parser import VARIABLE_QUALIFIERS

log = logging.getLogger(__name__)

# never contract interactions
BUILTIN_CALLS = frozenset(
    {
        "require", "assert", "revert", "keccak256", "sha256", "sha3", "ripemd160",
        "ecrecover", "addmod", "mulmod", "blockhash", "gasleft", "selfdestruct",
        "suicide", "type", "emit", "payable", "address", "bool", "string", "bytes",
        "byte", "uint", "int", "fixed", "ufixed", "blobhash",
    }
)
GLOBAL_NAMESPACES = frozenset({"abi", "msg", "tx", "block", "bytes", "string", "type"})
# members of arrays, bytes and user value types rather than calls into code
VALUE_MEMBERS = frozenset({"push", "pop", "concat", "wrap", "unwrap"})
STATEMENT_KEYWORDS = frozenset(
    {
        "if", "for", "while", "do", "return", "returns", "else", "try", "catch",
        "unchecked", "delete", "new", "emit", "revert", "function", "assembly",
    }
)


def _is_elementary(name: str) -> bool:
    if name in BUILTIN_CALLS:
        return True
    for prefix in ("uint", "int", "bytes", "ufixed", "fixed"):
        if name.startswith(prefix) and name[len(prefix):].replace("x", "").isdigit():
            return True
    return False


@dataclass
class SymbolTable:
    contracts: Dict[str, ContractDecl] = field(default_factory=dict)
    functions: Dict[str, Set[str]] = field(default_factory=dict)
    file_usings: Dict[str, List[str]] = field(default_factory=dict)
    type_names: Set[str] = field(default_factory=set)
    # contracts in first-seen order, paired with their function decls
    order: List[Tuple[ContractDecl, List[FunctionDecl]]] = field(default_factory=list)

    @classmethod
    def build(cls, files: Iterable[FileDecls]) -> "SymbolTable":
        """Merge per-file declarations; duplicate contract names get a suffix."""
        table = cls()
        for fd in files:
            table.file_usings[fd.unit.path] = list(fd.usings)
            table.type_names.update(fd.type_names)
            by_contract: Dict[str, List[FunctionDecl]] = defaultdict(list)
            for fn in fd.functions:
                by_contract[fn.contract].append(fn)
            for decl in fd.contracts:
                fns = by_contract.get(decl.name, [])
                if decl.name in table.contracts:
                    k = 2
                    while f"{decl.name}_{k}" in table.contracts:
                        k += 1
                    new = f"{decl.name}_{k}"
                    log.warning(
                        "duplicate contract %s in %s (first in %s); renamed to %s",
                        decl.name, decl.file, table.contracts[decl.name].file, new,
                    )
                    decl.name = new
                    for fn in fns:
                        fn.contract = new
                table.contracts[decl.name] = decl
                table.functions[decl.name] = {fn.name for fn in fns}
                table.type_names.update(decl.type_names)
                table.order.append((decl, fns))
        return table

    def lineage(self, name: str) -> List[str]:
        """``name`` followed by its transitive bases, most-derived first.

        Bases are visited right to left, matching the precedence Solidity
        gives the last-listed base.
        """
        seen: List[str] = []
        stack = [name]
        while stack:
            c = stack.pop(0)
            if c in seen:
                continue
            seen.append(c)
            decl = self.contracts.get(c)
            if decl is not None:
                stack.extend(b for b in reversed(decl.bases) if b not in seen)
        return seen

    def declaring_contract(self, contract: str, fn: str, *, skip_self: bool = False) -> Optional[str]:
        for c in self.lineage(contract)[1 if skip_self else 0:]:
            if fn in self.functions.get(c, ()):
                return c
        return None

    def state_type(self, contract: str, var: str) -> Optional[str]:
        for c in self.lineage(contract):
            decl = self.contracts.get(c)
            if decl is not None and var in decl.state_var_types:
                return decl.state_var_types[var]
        return None

    def attached_libraries(self, contract: str) -> Set[str]:
        libs: Set[str] = set()
        for c in self.lineage(contract):
            decl = self.contracts.get(c)
            if decl is None:
                continue
            libs.update(decl.usings)
            libs.update(self.file_usings.get(decl.file, ()))
        return libs

    def library_for(self, contract: str, fn: str) -> Optional[str]:
        candidates = [
            name
            for name, decl in self.contracts.items()
            if decl.kind == "library" and fn in self.functions.get(name, ())
        ]
        if len(candidates) == 1 and candidates[0] in self.attached_libraries(contract):
            return candidates[0]
        return None


def _local_types(body: Sequence[Token]) -> Dict[str, str]:
    """Declared types of local variables: ``T [memory] name`` patterns."""
    out: Dict[str, str] = {}
    n = len(body)
    for i in range(n - 1):
        t = body[i]
        if t.kind != IDENT or t.text in STATEMENT_KEYWORDS:
            continue
        if i > 0 and body[i - 1].text == ".":
            continue
        j = i + 1
        # skip array suffixes: T[] / T[3]
        while j < n and body[j].text == "[":
            k = j
            depth = 0
            while k < n:
                if body[k].text == "[":
                    depth += 1
                elif body[k].text == "]":
                    depth -= 1
                    if depth == 0:
                        break
                k += 1
            j = k + 1
        while j < n and body[j].kind == IDENT and body[j].text in VARIABLE_QUALIFIERS:
            j += 1
        if j + 1 < n and body[j].kind == IDENT and body[j].text not in STATEMENT_KEYWORDS:
            if body[j + 1].text in ("=", ";", ",", ")"):
                out.setdefault(body[j].text, t.text)
    return out


def _back_to_open(body: Sequence[Token], close: int) -> int:
    pair = {")": "(", "]": "[", "}": "{"}
    closer = body[close].text
    opener = pair[closer]
    depth = 0
    for k in range(close, -1, -1):
        if body[k].text == closer:
            depth += 1
        elif body[k].text == opener:
            depth -= 1
            if depth == 0:
                return k
    return -1


def _forward_to_close(body: Sequence[Token], open_: int) -> int:
    depth = 0
    for k in range(open_, len(body)):
        if body[k].text == "(":
            depth += 1
        elif body[k].text == ")":
            depth -= 1
            if depth == 0:
                return k
    return len(body) - 1


def _strip_assembly(body: Sequence[Token]) -> List[Token]:
    out: List[Token] = []
    i = 0
    n = len(body)
    while i < n:
        t = body[i]
        if t.kind == IDENT and t.text == "assembly":
            j = i + 1
            while j < n and body[j].text != "{":
                j += 1
            depth = 0
            while j < n:
                if body[j].text == "{":
                    depth += 1
                elif body[j].text == "}":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            i = j + 1
            continue
        out.append(t)
        i += 1
    return out


class _Resolver:
    def __init__(self, table: SymbolTable, fn: FunctionDecl) -> None:
        self.table = table
        self.fn = fn
        self.contract = fn.contract
        self.locals = dict(fn.params)
        self.body = _strip_assembly(fn.body)
        self.locals.update(_local_types(self.body))

    def var_type(self, name: str) -> Optional[str]:
        if name in self.locals:
            return self.locals[name]
        return self.table.state_type(self.contract, name)

    def calls(self) -> List[Optional[str]]:
        """Resolved target for every call site, in source order.

        ``None`` stands for the unresolved sentinel. Sites that are not
        contract interactions (built-ins, casts, events) are omitted.
        """
        out: List[Optional[str]] = []
        body = self.body
        for i, t in enumerate(body):
            if not (t.kind == PUNCT and t.text == "(") or i == 0:
                continue
            callee = i - 1
            if body[callee].text == "}":
                # call options: x.f{value: v}(...)
                callee = _back_to_open(body, callee) - 1
                if callee < 0:
                    continue
            prev = body[callee]
            if prev.kind != IDENT:
                continue
            target = self._resolve(callee)
            if target is not _SKIP:
                out.append(target)
        return out

    def _resolve(self, k: int):
        body = self.body
        name = body[k].text
        before = body[k - 1] if k > 0 else None
        if before is not None and before.text == ".":
            return self._member(k, name)
        if before is not None and before.kind == IDENT:
            if before.text == "new":
                return name if name in self.table.contracts else None
            if before.text in ("emit", "revert", "function", "returns", "modifier", "event", "error"):
                return _SKIP
        if name in STATEMENT_KEYWORDS or _is_elementary(name):
            return _SKIP
        if name in self.table.type_names:
            return _SKIP
        if name in self.table.contracts:
            # type conversion such as Vault(addr); the member call after it resolves
            return _SKIP
        target = self.table.declaring_contract(self.contract, name)
        if target is None and self._followed_by_member(k):
            # IToken(addr).f(): a cast to an out-of-project type; only the
            # member call after it is recorded
            return _SKIP
        return target

    def _followed_by_member(self, k: int) -> bool:
        body = self.body
        if k + 1 >= len(body) or body[k + 1].text != "(":
            return False
        close = _forward_to_close(body, k + 1)
        return close + 1 < len(body) and body[close + 1].text == "."

    def _member(self, k: int, fname: str):
        body = self.body
        if k < 2:
            return None
        r = k - 2
        recv = body[r]
        if recv.text in (")", "]"):
            open_ = _back_to_open(body, r)
            if open_ <= 0:
                return None
            base = body[open_ - 1]
            if recv.text == ")":
                # Contract(addr).f(...) casts; anything else stays unresolved
                if base.kind == IDENT and base.text in self.table.contracts:
                    if open_ < 2 or body[open_ - 2].text != ".":
                        return base.text
                if base.kind == IDENT and base.text == "type":
                    return _SKIP
                return self._library_or_none(fname)
            # indexed receiver: vaults[i].f(...)
            if base.kind == IDENT and (open_ < 2 or body[open_ - 2].text != "."):
                typ = self.var_type(base.text)
                if typ in self.table.contracts:
                    return typ
            if fname in VALUE_MEMBERS:
                return _SKIP
            return self._library_or_none(fname)
        if recv.kind != IDENT:
            return None
        if r > 0 and body[r - 1].text == ".":
            # a.b.f(): only global namespaces are recognised
            root = body[r - 2].text if r >= 2 else ""
            if root in GLOBAL_NAMESPACES and recv.text not in ("sender", "origin"):
                return _SKIP
            return self._library_or_none(fname)
        name = recv.text
        if name == "this":
            return self.table.declaring_contract(self.contract, fname) or self.contract
        if name == "super":
            return self.table.declaring_contract(self.contract, fname, skip_self=True)
        typ = self.var_type(name)
        if typ is not None:
            if typ in self.table.contracts:
                return typ
            if fname in VALUE_MEMBERS:
                return _SKIP
            return self._library_or_none(fname)
        if name in self.table.type_names and fname in VALUE_MEMBERS:
            return _SKIP
        if name in self.table.contracts:
            return name
        if name in GLOBAL_NAMESPACES:
            return _SKIP
        return self._library_or_none(fname)

    def _library_or_none(self, fname: str) -> Optional[str]:
        return self.table.library_for(self.contract, fname)


_SKIP = object()


def resolve_calls(table: SymbolTable, files: Dict[str, str] | None = None) -> List[CallRecord]:
    """One CallRecord per call site, ordered by file then source position.

    ``files`` maps a declaration path to the label written in the File
    column; by default the declaration path is used as-is.
    """
    records: List[CallRecord] = []
    ordered = sorted(
        ((decl, fns) for decl, fns in table.order),
        key=lambda item: (item[0].file, item[0].line),
    )
    for decl, fns in ordered:
        label = files.get(decl.file, decl.file) if files else decl.file
        for fn in sorted(fns, key=lambda f: f.line):
            if not fn.body:
                continue
            for target in _Resolver(table, fn).calls():
                records.append(CallRecord(label, decl.name, fn.name, target))
    return records
