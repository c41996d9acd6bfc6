"""Declaration parser for the supported Solidity subset.

Only the structure the call extractor needs is recognised: contract-like
declarations with their inheritance lists, state variables, and the
bodies of functions, constructors, fallback/receive and modifiers.
Anything else is skipped by brace (or semicolon) balancing.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from dappnet.extract.lexer import IDENT, PUNCT, STRING, Token
from dappnet.extract.model import ContractDecl, FileDecls, FunctionDecl, SourceUnit

log = logging.getLogger(__name__)

CONTRACT_KEYWORDS = {"contract": "contract", "library": "library", "interface": "interface"}
VISIBILITY_WORDS = {"public", "external", "internal", "private"}
# words that can sit between a variable's type and its name
VARIABLE_QUALIFIERS = VISIBILITY_WORDS | {
    "constant",
    "immutable",
    "override",
    "memory",
    "storage",
    "calldata",
    "payable",
    "indexed",
    "transient",
}
SPECIAL_FUNCTIONS = ("constructor", "fallback", "receive")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, path: str = "") -> None:
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.path = path


def matching(tokens: Sequence[Token], i: int, path: str = "") -> int:
    """Index of the bracket closing the one at ``tokens[i]``."""
    open_ = tokens[i].text
    close = {"{": "}", "(": ")", "[": "]"}[open_]
    depth = 0
    for j in range(i, len(tokens)):
        t = tokens[j]
        if t.kind != PUNCT:
            continue
        if t.text == open_:
            depth += 1
        elif t.text == close:
            depth -= 1
            if depth == 0:
                return j
    raise ParseError(f"unbalanced {open_!r}", tokens[i].line, path)


def _skip_statement(tokens: Sequence[Token], i: int, path: str) -> int:
    """Skip to just past the next top-level ``;`` or balanced ``{...}``."""
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if t.kind == PUNCT:
            if t.text == ";":
                return i + 1
            if t.text in "([":
                i = matching(tokens, i, path) + 1
                continue
            if t.text == "{":
                return matching(tokens, i, path) + 1
            if t.text == "}":
                raise ParseError("unexpected '}'", t.line, path)
        i += 1
    return n


def element_type(type_tokens: Sequence[Token]) -> Optional[str]:
    """Reduce a declared type to the identifier of its element type.

    ``Vault[]`` -> ``Vault``, ``mapping(address => Item)`` -> ``Item``,
    ``IERC20`` -> ``IERC20``, ``lib.Type`` -> ``Type``.
    """
    toks = list(type_tokens)
    while toks and toks[0].kind == IDENT and toks[0].text == "mapping":
        # mapping ( K => V ) : take the value side
        try:
            arrow = next(k for k, t in enumerate(toks) if t.text == "=>")
        except StopIteration:
            return None
        toks = toks[arrow + 1 :]
        # drop the closing paren of the outermost mapping and any names
        depth = 0
        cut = len(toks)
        for k, t in enumerate(toks):
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                if depth == 0:
                    cut = k
                    break
                depth -= 1
        toks = toks[:cut]
    idents = []
    for t in toks:
        if t.text == "[":
            break
        if t.kind == IDENT:
            idents.append(t.text)
    if not idents:
        return None
    # value-side mapping names (`mapping(a => Item item)`) put the type first
    if len(idents) > 1 and all(t.text != "." for t in toks):
        return idents[0]
    return idents[-1]


def _split_params(tokens: Sequence[Token]) -> Dict[str, str]:
    """Parameter list tokens (without the parens) -> {name: element type}."""
    params: Dict[str, str] = {}
    groups: List[List[Token]] = [[]]
    depth = 0
    for t in tokens:
        if t.text in "([":
            depth += 1
        elif t.text in ")]":
            depth -= 1
        if t.text == "," and depth == 0:
            groups.append([])
            continue
        groups[-1].append(t)
    for g in groups:
        while g and g[-1].kind == IDENT and g[-1].text in VARIABLE_QUALIFIERS:
            g.pop()
        if len(g) < 2 or g[-1].kind != IDENT:
            continue
        name = g[-1].text
        type_toks = [t for t in g[:-1] if t.text not in VARIABLE_QUALIFIERS]
        typ = element_type(type_toks)
        if typ:
            params[name] = typ
    return params


class _Parser:
    def __init__(self, tokens: Sequence[Token], unit: SourceUnit) -> None:
        self.toks = list(tokens)
        self.unit = unit
        self.path = unit.path
        self.contracts: List[ContractDecl] = []
        self.functions: List[FunctionDecl] = []
        self.usings: List[str] = []
        self.type_names: List[str] = []
        self._ordinals: Dict[Tuple[str, str], int] = {}

    def at(self, i: int) -> Optional[Token]:
        return self.toks[i] if i < len(self.toks) else None

    def text(self, i: int) -> str:
        t = self.at(i)
        return t.text if t is not None else ""

    def parse(self) -> FileDecls:
        i = 0
        n = len(self.toks)
        while i < n:
            t = self.toks[i]
            word = t.text if t.kind == IDENT else None
            if t.kind == PUNCT and t.text == "}":
                raise ParseError("unbalanced '}' at file scope", t.line, self.path)
            if word == "pragma":
                j = i + 1
                while j < n and self.toks[j].text != ";":
                    j += 1
                if self.text(i + 1) == "solidity":
                    self.unit.pragma_versions.append(
                        " ".join(tok.text for tok in self.toks[i + 2 : j])
                    )
                i = j + 1
            elif word == "abstract" and self.text(i + 1) == "contract":
                i = self._contract(i + 1, "abstract-contract")
            elif word in CONTRACT_KEYWORDS and self._is_decl_name(i + 1):
                i = self._contract(i, CONTRACT_KEYWORDS[word])
            elif word == "using":
                i = self._using(i, self.usings)
            elif word in ("struct", "enum", "event", "error", "type") and self._is_decl_name(i + 1):
                self.type_names.append(self.text(i + 1))
                i = _skip_statement(self.toks, i, self.path)
            else:
                # imports, free functions, constants, user types
                i = _skip_statement(self.toks, i, self.path)
        return FileDecls(self.unit, self.contracts, self.functions, self.usings, self.type_names)

    def _is_decl_name(self, i: int) -> bool:
        t = self.at(i)
        return t is not None and t.kind == IDENT

    def _using(self, i: int, into: List[str]) -> int:
        j = i + 1
        if self.text(j) == "{":
            # using {f, g} for T; attaches free functions, not libraries
            j = matching(self.toks, j, self.path) + 1
        elif self.at(j) is not None and self.toks[j].kind == IDENT:
            lib = [self.toks[j].text]
            while self.text(j + 1) == "." and self.at(j + 2) is not None:
                j += 2
                lib.append(self.toks[j].text)
            into.append(lib[-1])
        return _skip_statement(self.toks, i, self.path)

    def _contract(self, i: int, kind: str) -> int:
        name_tok = self.toks[i + 1]
        decl = ContractDecl(name=name_tok.text, kind=kind, file=self.path, line=name_tok.line)
        j = i + 2
        if self.text(j) == "is":
            j += 1
            while j < len(self.toks) and self.text(j) != "{":
                t = self.toks[j]
                if t.text == "(":
                    j = matching(self.toks, j, self.path) + 1
                    continue
                if t.kind == IDENT and self.text(j + 1) != ".":
                    if t.text not in decl.bases:
                        decl.bases.append(t.text)
                j += 1
        if self.text(j) != "{":
            raise ParseError(f"expected '{{' after contract {decl.name}", name_tok.line, self.path)
        end = matching(self.toks, j, self.path)
        self._members(j + 1, end, decl)
        self.contracts.append(decl)
        return end + 1

    def _members(self, i: int, end: int, decl: ContractDecl) -> None:
        while i < end:
            t = self.toks[i]
            word = t.text if t.kind == IDENT else None
            if word == "function":
                i = self._function(i, decl, "function")
            elif word in SPECIAL_FUNCTIONS and self.text(i + 1) == "(":
                i = self._function(i, decl, word)
            elif word == "modifier":
                i = self._function(i, decl, "modifier")
            elif word == "using":
                i = self._using(i, decl.usings)
            elif word in ("struct", "enum", "event", "error", "type") and self._is_decl_name(i + 1):
                decl.type_names.append(self.text(i + 1))
                i = _skip_statement(self.toks, i, self.path)
            else:
                i = self._state_variable(i, end, decl)

    def _state_variable(self, i: int, end: int, decl: ContractDecl) -> int:
        stop = min(_skip_statement(self.toks, i, self.path), end)
        stmt = self.toks[i:stop]
        if not stmt or stmt[-1].text != ";":
            return stop
        head: List[Token] = []
        depth = 0
        for t in stmt[:-1]:
            if t.text in "([":
                depth += 1
            elif t.text in ")]":
                depth -= 1
            if depth == 0 and t.text == "=":
                break
            head.append(t)
        while head and head[-1].kind == IDENT and head[-1].text in VARIABLE_QUALIFIERS:
            head.pop()
        if len(head) < 2 or head[-1].kind != IDENT:
            return stop
        name = head[-1].text
        type_toks = [t for t in head[:-1] if t.text not in VARIABLE_QUALIFIERS]
        typ = element_type(type_toks)
        if typ:
            decl.state_var_types[name] = typ
        return stop

    def _function(self, i: int, decl: ContractDecl, kind: str) -> int:
        start_line = self.toks[i].line
        j = i + 1
        if kind in SPECIAL_FUNCTIONS:
            name = kind
        elif kind == "function" and self.text(j) == "(":
            # legacy unnamed fallback: function () external payable { ... }
            name = "fallback"
            kind = "fallback"
        else:
            name_tok = self.at(j)
            if name_tok is None or name_tok.kind != IDENT:
                raise ParseError(f"expected name after {kind}", start_line, self.path)
            name = name_tok.text
            if kind == "function" and name in ("fallback", "receive"):
                kind = name
            j += 1
        params: Dict[str, str] = {}
        if self.text(j) == "(":
            close = matching(self.toks, j, self.path)
            params = _split_params(self.toks[j + 1 : close])
            j = close + 1
        visibility = "unspecified"
        n = len(self.toks)
        while j < n and self.toks[j].text not in ("{", ";"):
            t = self.toks[j]
            if t.text == "(":
                # returns (...) or modifier(args); named returns are locals
                close = matching(self.toks, j, self.path)
                if self.text(j - 1) == "returns":
                    params.update(_split_params(self.toks[j + 1 : close]))
                j = close + 1
                continue
            if t.kind == IDENT and t.text in VISIBILITY_WORDS:
                visibility = t.text
            j += 1
        if j >= n:
            raise ParseError(f"unterminated declaration of {name}", start_line, self.path)
        body: Tuple[Token, ...] = ()
        has_body = False
        if self.toks[j].text == "{":
            close = matching(self.toks, j, self.path)
            body = tuple(self.toks[j + 1 : close])
            has_body = True
            j = close + 1
        else:
            j += 1
        key = (decl.name, name)
        ordinal = self._ordinals.get(key, 0)
        self._ordinals[key] = ordinal + 1
        self.functions.append(
            FunctionDecl(
                contract=decl.name,
                name=name,
                visibility=visibility,
                ordinal=ordinal,
                kind=kind,
                params=params,
                body=body,
                has_body=has_body,
                line=start_line,
            )
        )
        return j


def parse_declarations(
    tokens: Sequence[Token], unit: SourceUnit
) -> Tuple[List[ContractDecl], List[FunctionDecl]]:
    decls = parse_file(tokens, unit)
    return decls.contracts, decls.functions


def parse_file(tokens: Sequence[Token], unit: SourceUnit) -> FileDecls:
    """Like :func:`parse_declarations` but also returns file-level scope."""
    return _Parser(tokens, unit).parse()
