"""Named pattern constructors and the text interchange format for graphs.

Pattern names accepted by the CLI and the play service:

* ``K<n>``  complete graph, ``P<n>`` path, ``C<n>`` cycle, ``S<n>`` star
  (all on ``n`` vertices; ``C1`` is a single looped vertex, ``C2`` the
  doubled edge)
* ``loop``  a single looped vertex, ``loop+edge`` that plus a pendant
* ``C4+pendant`` (and friends): base name plus pendant vertices
* unions with ``|``, e.g. ``K3|K3``

The file format is line oriented and versioned (``aegraph 1``); a compact
single-token form (``mg:`` prefix) is used inside transcripts.
"""

from __future__ import annotations

import re

from .multigraph import GraphStructureError, LabeledMultigraph


def complete(n: int) -> LabeledMultigraph:
    return LabeledMultigraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def path(n: int) -> LabeledMultigraph:
    return LabeledMultigraph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> LabeledMultigraph:
    if n == 1:
        return looped_vertex()
    if n == 2:
        return doubled_edge()
    return LabeledMultigraph(n, [(i, (i + 1) % n) for i in range(n)])


def star(n: int) -> LabeledMultigraph:
    """Star on n vertices (centre plus n-1 leaves)."""
    if n < 2:
        raise GraphStructureError("star needs at least 2 vertices")
    return LabeledMultigraph(n, [(0, i) for i in range(1, n)])


def looped_vertex() -> LabeledMultigraph:
    return LabeledMultigraph(1, [(0, 0)])


def doubled_edge() -> LabeledMultigraph:
    return LabeledMultigraph(2, [(0, 1), (0, 1)], friend_pairs=[(0, 1)])


def loop_plus_edge() -> LabeledMultigraph:
    """Looped vertex with one pendant edge."""
    return LabeledMultigraph(2, [(0, 0), (0, 1)])


def with_pendant(g: LabeledMultigraph, at: int = 0, count: int = 1) -> LabeledMultigraph:
    edges = [(e.u, e.v, e.eid) for e in g.edges]
    m = max((e.eid for e in g.edges), default=-1) + 1
    n = g.vertex_count
    for i in range(count):
        edges.append((at, n + i, m + i))
    fp = [(a, b) for a, b in g.friend_pairs.items() if a < b]
    return LabeledMultigraph(n + count, edges, fp)


def disjoint_union(*graphs: LabeledMultigraph) -> LabeledMultigraph:
    edges = []
    fp = []
    voff = 0
    eoff = 0
    for g in graphs:
        for e in g.edges:
            edges.append((e.u + voff, e.v + voff, e.eid + eoff))
        fp.extend((a + eoff, b + eoff) for a, b in g.friend_pairs.items() if a < b)
        voff += g.vertex_count
        eoff += max((e.eid for e in g.edges), default=-1) + 1
    return LabeledMultigraph(voff, edges, fp)


_FAMILY = {"K": complete, "P": path, "C": cycle, "S": star}


def _parse_single(name: str) -> LabeledMultigraph:
    name = name.strip()
    if name.startswith("mg:"):
        return graph_from_token(name)
    if name == "loop":
        return looped_vertex()
    if name in ("loop+edge", "loop-edge"):
        return loop_plus_edge()
    m = re.fullmatch(r"([KPCS])(\d+)((?:\+pendant)*)", name)
    if not m:
        raise GraphStructureError(f"unknown pattern name: {name!r}")
    fam, n, pendants = m.group(1), int(m.group(2)), m.group(3)
    g = _FAMILY[fam](n)
    k = pendants.count("+pendant")
    if k:
        g = with_pendant(g, at=0, count=k)
    return g


def parse_pattern(name: str) -> LabeledMultigraph:
    """Parse a pattern name (see module docstring) into a multigraph."""
    parts = [p for p in name.split("|") if p.strip()]
    if not parts:
        raise GraphStructureError("empty pattern name")
    if len(parts) == 1:
        return _parse_single(parts[0])
    return disjoint_union(*(_parse_single(p) for p in parts))


# ---------------------------------------------------------------------------
# Interchange formats
# ---------------------------------------------------------------------------

FORMAT_VERSION = 1


def graph_to_text(g: LabeledMultigraph, parts: dict | None = None) -> str:
    lines = [f"aegraph {FORMAT_VERSION}", f"vertices {g.vertex_count}"]
    for e in g.edges:
        lines.append(f"edge {e.eid} {e.u} {e.v}")
    for a, b in sorted(g.friend_pairs.items()):
        if a < b:
            lines.append(f"friends {a} {b}")
    if parts:
        for v in sorted(parts):
            lines.append(f"part {v} {parts[v]}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> tuple[LabeledMultigraph, dict]:
    """Parse the line format; returns (graph, part assignment)."""
    n = None
    edges: list[tuple[int, int, int]] = []
    friends: list[tuple[int, int]] = []
    parts: dict[int, int] = {}
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("aegraph "):
        raise GraphStructureError("missing aegraph header")
    version = lines[0].split()[1]
    if version != str(FORMAT_VERSION):
        raise GraphStructureError(f"unsupported aegraph version {version}")
    for ln in lines[1:]:
        tok = ln.split()
        if tok[0] == "vertices":
            n = int(tok[1])
        elif tok[0] == "edge":
            edges.append((int(tok[2]), int(tok[3]), int(tok[1])))
        elif tok[0] == "friends":
            friends.append((int(tok[1]), int(tok[2])))
        elif tok[0] == "part":
            parts[int(tok[1])] = int(tok[2])
        elif tok[0] == "end":
            break
        else:
            raise GraphStructureError(f"unknown aegraph line: {ln!r}")
    if n is None:
        raise GraphStructureError("missing vertices line")
    return LabeledMultigraph(n, edges, friends), parts


def graph_to_token(g: LabeledMultigraph) -> str:
    """Compact single-token form used inside transcripts."""
    es = ",".join(f"{e.u}-{e.v}-{e.eid}" for e in g.edges)
    fs = ",".join(f"{a}-{b}" for a, b in sorted(g.friend_pairs.items()) if a < b)
    token = f"mg:{g.vertex_count}:{es}"
    if fs:
        token += f":{fs}"
    return token


def graph_from_token(token: str) -> LabeledMultigraph:
    if not token.startswith("mg:"):
        raise GraphStructureError(f"not a graph token: {token!r}")
    fields = token.split(":")
    n = int(fields[1])
    edges = []
    if len(fields) > 2 and fields[2]:
        for item in fields[2].split(","):
            u, v, eid = item.split("-")
            edges.append((int(u), int(v), int(eid)))
    friends = []
    if len(fields) > 3 and fields[3]:
        for item in fields[3].split(","):
            a, b = item.split("-")
            friends.append((int(a), int(b)))
    return LabeledMultigraph(n, edges, friends)


def pattern_to_name(g: LabeledMultigraph, fallback_token: bool = True) -> str:
    """Token form unless the graph is one we can't name; used for logs."""
    return graph_to_token(g) if fallback_token else repr(g)
