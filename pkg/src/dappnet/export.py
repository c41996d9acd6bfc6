"""Graph and table writers: DOT, GraphML, edge CSV, labelled matrices."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Dict, Hashable, Iterable, Mapping, Optional, Sequence, Union
from xml.sax.saxutils import escape, quoteattr

from dappnet.graph import WeightedDigraph
from dappnet.netbuild import BipartiteCallMatrix

FORMATS = ("dot", "graphml", "edge-csv")
NodeAttrs = Mapping[Hashable, Mapping[str, object]]


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return repr(round(value, 12))
    return str(value)


def _dot_id(value: object) -> str:
    s = str(value).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def to_dot(g: WeightedDigraph, node_attrs: Optional[NodeAttrs] = None, name: str = "G") -> str:
    lines = [f"digraph {_dot_id(name)} {{"]
    for n in g.nodes:
        attrs = (node_attrs or {}).get(n, {})
        if attrs:
            body = ", ".join(f"{k}={_dot_id(_fmt(v))}" for k, v in sorted(attrs.items()))
            lines.append(f"  {_dot_id(n)} [{body}];")
        else:
            lines.append(f"  {_dot_id(n)};")
    for (u, v), w in g.edges.items():
        lines.append(f"  {_dot_id(u)} -> {_dot_id(v)} [weight={_dot_id(_fmt(w))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _graphml_type(value: object) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "double"
    return "string"


def to_graphml(g: WeightedDigraph, node_attrs: Optional[NodeAttrs] = None) -> str:
    node_attrs = node_attrs or {}
    keys: Dict[str, str] = {}
    for n in g.nodes:
        for k, v in node_attrs.get(n, {}).items():
            keys.setdefault(k, _graphml_type(v))
    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write('<graphml xmlns="http://graphml.graphdrawing.org/xmlns">\n')
    for k in sorted(keys):
        out.write(f'  <key id={quoteattr(k)} for="node" attr.name={quoteattr(k)} attr.type="{keys[k]}"/>\n')
    out.write('  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>\n')
    out.write('  <graph edgedefault="directed">\n')
    for n in g.nodes:
        attrs = node_attrs.get(n, {})
        if not attrs:
            out.write(f"    <node id={quoteattr(str(n))}/>\n")
            continue
        out.write(f"    <node id={quoteattr(str(n))}>\n")
        for k in sorted(attrs):
            v = attrs[k]
            text = str(v).lower() if isinstance(v, bool) else _fmt(v)
            out.write(f"      <data key={quoteattr(k)}>{escape(text)}</data>\n")
        out.write("    </node>\n")
    for (u, v), w in g.edges.items():
        out.write(
            f"    <edge source={quoteattr(str(u))} target={quoteattr(str(v))}>"
            f'<data key="weight">{_fmt(float(w))}</data></edge>\n'
        )
    out.write("  </graph>\n</graphml>\n")
    return out.getvalue()


def to_edge_csv(g: WeightedDigraph) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("source", "target", "weight"))
    for (u, v), weight in g.edges.items():
        w.writerow((u, v, _fmt(float(weight))))
    return buf.getvalue()


def read_edge_csv(path: Union[str, Path], nodes: Optional[Sequence[str]] = None) -> WeightedDigraph:
    g = WeightedDigraph(list(nodes or ()))
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return g
        if [h.strip() for h in header] != ["source", "target", "weight"]:
            raise ValueError(f"{path}: expected source,target,weight header")
        for row in reader:
            if row:
                g.add_edge(row[0], row[1], float(row[2]))
    return g


def export_graph(
    g: WeightedDigraph,
    fmt: str,
    path: Union[str, Path, None] = None,
    node_attrs: Optional[NodeAttrs] = None,
) -> str:
    if fmt == "dot":
        text = to_dot(g, node_attrs)
    elif fmt == "graphml":
        text = to_graphml(g, node_attrs)
    elif fmt == "edge-csv":
        text = to_edge_csv(g)
    else:
        raise ValueError(f"unknown graph format {fmt!r}; expected one of {FORMATS}")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def write_nodes_csv(path: Union[str, Path], nodes: Iterable[str]) -> None:
    Path(path).write_text("node\n" + "".join(f"{n}\n" for n in nodes), encoding="utf-8")


def read_nodes_csv(path: Union[str, Path]) -> list:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [ln for ln in lines[1:] if ln]


def adjacency_matrix_csv(
    g: WeightedDigraph, labels: Optional[Mapping[Hashable, str]] = None, digits: Optional[int] = None
) -> str:
    """Square matrix, sources as rows and targets as columns."""
    labels = labels or {}
    names = [labels.get(n, str(n)) for n in g.nodes]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + names)
    for u, name in zip(g.nodes, names):
        row = []
        for v in g.nodes:
            x = g.edges.get((u, v), 0)
            if digits is not None:
                x = round(float(x), digits)
            row.append(_number(x))
        w.writerow([name] + row)
    return buf.getvalue()


def bipartite_csv(m: BipartiteCallMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + m.contracts)
    for f, row in zip(m.functions, m.dense()):
        w.writerow([f] + row)
    return buf.getvalue()


def _number(x: float) -> str:
    if float(x).is_integer():
        return str(int(x))
    return _fmt(float(x))


def histogram_csv(hist: Mapping[int, float], key: str = "value", value: str = "count") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow((key, value))
    for k in sorted(hist):
        w.writerow((k, _number(hist[k]) if isinstance(hist[k], float) else hist[k]))
    return buf.getvalue()


def rows_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()
