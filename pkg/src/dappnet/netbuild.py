"""Contract networks, function-contract bipartite matrices, and projection."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from dappnet.extract.model import NONE_TARGET, CallRecord
from dappnet.graph import WeightedDigraph

SEP = "::"


class SizeClass(str, enum.Enum):
    SMALL = "Small"
    MEDIUM = "Medium"
    LARGE = "Large"


def function_label(contract: str, function: str) -> str:
    return f"{contract}{SEP}{function}"


def split_label(label: str) -> Tuple[str, str]:
    contract, _, fn = label.partition(SEP)
    return contract, fn


def build_contract_graph(
    records: Iterable[CallRecord],
    include_sentinel: bool = True,
    contracts: Optional[Sequence[str]] = None,
) -> WeightedDigraph:
    """Weighted directed contract network; weight = number of calls.

    ``contracts`` lists declared contracts so that ones without any
    recorded call still appear as isolated nodes.
    """
    g = WeightedDigraph(list(contracts or ()))
    for rec in records:
        if rec.target_contract is None and not include_sentinel:
            g.add_node(rec.source_contract)
            continue
        g.add_edge(rec.source_contract, rec.target_label, 1.0)
    return g


@dataclass
class BipartiteCallMatrix:
    functions: List[str] = field(default_factory=list)
    contracts: List[str] = field(default_factory=list)
    counts: Dict[Tuple[str, str], int] = field(default_factory=dict)

    def row_sums(self) -> Dict[str, int]:
        s = {f: 0 for f in self.functions}
        for (f, _), k in self.counts.items():
            s[f] += k
        return s

    def column_sums(self) -> Dict[str, int]:
        t = {c: 0 for c in self.contracts}
        for (_, c), k in self.counts.items():
            t[c] += k
        return t

    def dense(self) -> List[List[int]]:
        return [[self.counts.get((f, c), 0) for c in self.contracts] for f in self.functions]

    @classmethod
    def from_dense(
        cls, functions: Sequence[str], contracts: Sequence[str], rows: Sequence[Sequence[int]]
    ) -> "BipartiteCallMatrix":
        counts = {}
        for f, row in zip(functions, rows):
            for c, k in zip(contracts, row):
                if k < 0:
                    raise ValueError("bipartite counts must be nonnegative")
                if k:
                    counts[(f, c)] = int(k)
        return cls(list(functions), list(contracts), counts)

    def drop_empty(self) -> "BipartiteCallMatrix":
        rows = self.row_sums()
        cols = self.column_sums()
        return BipartiteCallMatrix(
            [f for f in self.functions if rows[f] > 0],
            [c for c in self.contracts if cols[c] > 0],
            dict(self.counts),
        )


def build_bipartite(records: Iterable[CallRecord], include_sentinel: bool = True) -> BipartiteCallMatrix:
    """Function x target-contract call counts, functions labelled ``C::f``."""
    counts: Counter = Counter()
    functions: Dict[str, None] = {}
    contracts: Dict[str, None] = {}
    for rec in records:
        if rec.target_contract is None and not include_sentinel:
            continue
        f = function_label(rec.source_contract, rec.source_function)
        c = rec.target_label
        functions.setdefault(f)
        contracts.setdefault(c)
        counts[(f, c)] += 1
    return BipartiteCallMatrix(list(functions), list(contracts), dict(counts))


def project_functions(m: BipartiteCallMatrix) -> WeightedDigraph:
    """Probabilistic-spreading projection onto the function layer.

    w(f1 -> f2) = sum_c M[f1,c] / s(f1) * M[f2,c] / t(c), with s the row
    sum and t the column sum. Every row of the result sums to one.
    """
    s = m.row_sums()
    t = m.column_sums()
    by_contract: Dict[str, List[Tuple[str, int]]] = {c: [] for c in m.contracts}
    for f in m.functions:
        if s[f] < 1:
            raise ValueError(f"function {f} has no calls; drop empty rows before projecting")
    for (f, c), k in m.counts.items():
        by_contract[c].append((f, k))
    order = {f: i for i, f in enumerate(m.functions)}
    weights: Dict[Tuple[str, str], float] = {}
    for c in m.contracts:
        callers = sorted(by_contract[c], key=lambda fk: order[fk[0]])
        if not callers:
            continue
        assert t[c] > 0, f"contract {c} has entries but zero column sum"
        for f1, k1 in callers:
            out_p = k1 / s[f1]
            for f2, k2 in callers:
                key = (f1, f2)
                weights[key] = weights.get(key, 0.0) + out_p * (k2 / t[c])
    g = WeightedDigraph(list(m.functions))
    # deterministic edge order: source row order, then target row order
    for key in sorted(weights, key=lambda e: (order[e[0]], order[e[1]])):
        if weights[key] > 0:
            g.edges[key] = weights[key]
    return g


def classify_size(n_contracts: int) -> SizeClass:
    """Small up to 23 contracts, Medium 24-45, Large from 46."""
    if n_contracts < 1:
        raise ValueError(f"contract count must be positive, got {n_contracts}")
    if n_contracts <= 23:
        return SizeClass.SMALL
    if n_contracts <= 45:
        return SizeClass.MEDIUM
    return SizeClass.LARGE


def function_contract_ratio(records: Iterable[CallRecord]) -> float:
    functions = set()
    contracts = set()
    for rec in records:
        functions.add((rec.source_contract, rec.source_function))
        contracts.add(rec.source_contract)
    if not contracts:
        raise ValueError("no source contracts in the record set")
    return len(functions) / len(contracts)


def display_names(labels: Sequence[str]) -> Dict[str, str]:
    """Bare function names where unambiguous, ``C::f`` otherwise."""
    bare = Counter(split_label(lab)[1] for lab in labels)
    out = {}
    for lab in labels:
        name = split_label(lab)[1]
        out[lab] = name if bare[name] == 1 and name else lab
    return out
