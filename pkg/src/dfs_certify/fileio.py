"""Plain-text graph files.

::

    dfsgraph 1 <n> <d> <0|1>
    labels <l_1> ... <l_n>
    e <u> <v>          (undirected, u < v by id; directed files use "a <u> <v>")
    end
"""

from __future__ import annotations

import io
from typing import IO

from .graph import LabeledGraph, build_graph

MAGIC = "dfsgraph"
VERSION = 1


class ParseError(ValueError):
    def __init__(self, message: str, line: int | str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def write_graph(g: LabeledGraph, stream: IO[str]) -> None:
    stream.write(f"{MAGIC} {VERSION} {g.n} {g.d} {int(g.directed)}\n")
    stream.write("labels " + " ".join(map(str, g.labels[1:].tolist())) + "\n")
    tag = "a" if g.directed else "e"
    edges = g.edges()
    order = sorted(map(tuple, edges.tolist()))
    stream.write("".join(f"{tag} {u} {v}\n" for u, v in order))
    stream.write("end\n")


def dumps(g: LabeledGraph) -> str:
    buf = io.StringIO()
    write_graph(g, buf)
    return buf.getvalue()


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_graph(stream: IO[str]) -> LabeledGraph:
    """Read a graph file; structural problems raise :class:`ParseError`.

    Well-formed files describing an invalid graph raise the corresponding
    :class:`dfs_certify.graph.GraphError`.
    """
    lines = iter(enumerate(stream, start=1))

    def next_line() -> tuple[int, list[str]]:
        for lineno, raw in lines:
            return lineno, raw.split()
        raise ParseError("unexpected end of file", "EOF")

    lineno, head = next_line()
    if len(head) != 5 or head[0] != MAGIC:
        raise ParseError(f"expected '{MAGIC} {VERSION} <n> <d> <0|1>'", lineno)
    version, n, d, flag = _ints(head[1:], lineno)
    if version != VERSION:
        raise ParseError(f"unsupported version {version}", lineno)
    if flag not in (0, 1):
        raise ParseError(f"directed flag must be 0 or 1, got {flag}", lineno)
    directed = bool(flag)
    lineno, lab = next_line()
    if not lab or lab[0] != "labels":
        raise ParseError("expected a 'labels' line", lineno)
    labels = _ints(lab[1:], lineno)
    if len(labels) != n:
        raise ParseError(f"expected {n} labels, got {len(labels)}", lineno)
    tag = "a" if directed else "e"
    edges = []
    while True:
        lineno, tok = next_line()
        if tok == ["end"]:
            break
        if len(tok) != 3 or tok[0] != tag:
            raise ParseError(f"expected '{tag} <u> <v>' or 'end'", lineno)
        edges.append(tuple(_ints(tok[1:], lineno)))
    for lineno, raw in lines:
        if raw.strip():
            raise ParseError("content after 'end'", lineno)
    return build_graph(n, d, edges, labels, directed)


def loads(text: str) -> LabeledGraph:
    return parse_graph(io.StringIO(text))


def read_graph(path: str) -> LabeledGraph:
    with open(path, encoding="ascii") as fh:
        return parse_graph(fh)


def save_graph(g: LabeledGraph, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        write_graph(g, fh)
