"""Annotated computational DAGs: model, GraphML I/O, dense baseline costs.

A vertex holds a vector of width ``vector_size``.  An edge (i, j) stands for
the dependence of elemental j on argument i and carries the elapsed run time
of one scalar tangent / adjoint sweep of that elemental, plus a flag marking
elemental Jacobians that are available up front at zero accumulation cost.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass


class GraphError(Exception):
    """Structural problem with an annotated dag."""


class GraphMLError(GraphError):
    """Malformed GraphML input; the message names the offending element."""


class CycleDetected(GraphError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle: " + " -> ".join(str(v) for v in self.cycle))


class DanglingVertex(GraphError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"vertex {index} lies on no input-to-output path")


@dataclass(frozen=True)
class DagVertex:
    index: int
    vector_size: int

    def __post_init__(self):
        if self.vector_size < 1:
            raise GraphError(f"vertex {self.index}: vector_size must be >= 1")


@dataclass(frozen=True)
class DagEdge:
    source: int
    target: int
    tangent_cost: int
    adjoint_cost: int
    has_jacobian: bool = False
    jacobian_kind: str = "general"

    def __post_init__(self):
        if self.source == self.target:
            raise CycleDetected((self.source, self.target))
        if self.tangent_cost < 0 or self.adjoint_cost < 0:
            raise GraphError(
                f"edge ({self.source},{self.target}): costs must be >= 0"
            )
        if self.jacobian_kind not in ("general", "identity"):
            raise GraphError(
                f"edge ({self.source},{self.target}): "
                f"unknown jacobian_kind {self.jacobian_kind!r}"
            )

    @property
    def key(self) -> tuple[int, int]:
        return (self.source, self.target)


class Dag:
    """Immutable annotated dag.

    Inputs are the minimal vertices (no predecessors), outputs the maximal
    ones.  Vertex indices may be negative and non-contiguous.
    """

    def __init__(self, vertices, edges):
        self.vertex_map: dict[int, DagVertex] = {}
        for v in vertices:
            if v.index in self.vertex_map:
                raise GraphError(f"duplicate vertex index {v.index}")
            self.vertex_map[v.index] = v
        self.edge_map: dict[tuple[int, int], DagEdge] = {}
        for e in edges:
            if e.source not in self.vertex_map or e.target not in self.vertex_map:
                raise GraphError(
                    f"edge ({e.source},{e.target}): unknown endpoint"
                )
            if e.key in self.edge_map:
                raise GraphError(f"duplicate edge ({e.source},{e.target})")
            self.edge_map[e.key] = e
        self.succ: dict[int, set[int]] = {i: set() for i in self.vertex_map}
        self.pred: dict[int, set[int]] = {i: set() for i in self.vertex_map}
        for s, t in self.edge_map:
            self.succ[s].add(t)
            self.pred[t].add(s)
        self.inputs: tuple[int, ...] = tuple(
            sorted(i for i, p in self.pred.items() if not p)
        )
        self.outputs: tuple[int, ...] = tuple(
            sorted(i for i, s in self.succ.items() if not s)
        )

    @property
    def vertices(self) -> tuple[DagVertex, ...]:
        return tuple(self.vertex_map[i] for i in sorted(self.vertex_map))

    @property
    def edges(self) -> tuple[DagEdge, ...]:
        return tuple(self.edge_map[k] for k in sorted(self.edge_map))

    def size(self, index: int) -> int:
        return self.vertex_map[index].vector_size

    def __eq__(self, other):
        if not isinstance(other, Dag):
            return NotImplemented
        return (
            set(self.vertex_map.values()) == set(other.vertex_map.values())
            and set(self.edge_map.values()) == set(other.edge_map.values())
        )

    def __repr__(self):
        return f"Dag(|V|={len(self.vertex_map)}, |E|={len(self.edge_map)})"

    def topological_order(self) -> list[int]:
        """Kahn's algorithm with index-sorted tie-breaking; raises on cycles."""
        indeg = {i: len(p) for i, p in self.pred.items()}
        ready = sorted(i for i, d in indeg.items() if d == 0)
        order: list[int] = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            inserted = False
            for w in sorted(self.succ[v]):
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
                    inserted = True
            if inserted:
                ready.sort()
        if len(order) != len(self.vertex_map):
            rest = [i for i in self.vertex_map if indeg[i] > 0]
            raise CycleDetected(_find_cycle(self, rest[0]))
        return order

    def ancestors(self, index: int) -> set[int]:
        seen: set[int] = set()
        stack = list(self.pred[index])
        while stack:
            v = stack.pop()
            if v not in seen:
                seen.add(v)
                stack.extend(self.pred[v])
        return seen

    def descendants(self, index: int) -> set[int]:
        seen: set[int] = set()
        stack = list(self.succ[index])
        while stack:
            v = stack.pop()
            if v not in seen:
                seen.add(v)
                stack.extend(self.succ[v])
        return seen


def _find_cycle(dag: Dag, start: int) -> list[int]:
    # Walk successors restricted to vertices still on a cycle-bearing set.
    path = [start]
    at = {start: 0}
    v = start
    while True:
        v = min(w for w in dag.succ[v] if dag.pred[w])
        if v in at:
            return path[at[v]:] + [v]
        at[v] = len(path)
        path.append(v)


def validate_dag(dag: Dag) -> None:
    """Check acyclicity and that, when edges exist, no vertex is isolated."""
    dag.topological_order()
    if dag.edge_map:
        for i in dag.vertex_map:
            if not dag.succ[i] and not dag.pred[i]:
                raise DanglingVertex(i)


def transpose_dag(dag: Dag) -> Dag:
    """Reverse every edge, swapping its tangent and adjoint costs."""
    edges = [
        DagEdge(
            source=e.target,
            target=e.source,
            tangent_cost=e.adjoint_cost,
            adjoint_cost=e.tangent_cost,
            has_jacobian=e.has_jacobian,
            jacobian_kind=e.jacobian_kind,
        )
        for e in dag.edges
    ]
    return Dag(dag.vertices, edges)


def dense_tangent_cost(dag: Dag) -> int:
    """Input width times the total tangent cost over all edges."""
    n = sum(dag.size(i) for i in dag.inputs)
    return n * sum(e.tangent_cost for e in dag.edges)


def dense_adjoint_cost(dag: Dag) -> int:
    """Output width times the total adjoint cost over all edges."""
    m = sum(dag.size(j) for j in dag.outputs)
    return m * sum(e.adjoint_cost for e in dag.edges)


# ---------------------------------------------------------------------------
# GraphML

_NODE_KEYS = ("index", "vector_size")
_EDGE_KEYS = ("tangent_cost", "adjoint_cost", "has_jacobian")


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _collect_data(elem, keymap, where: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for child in elem:
        if _local(child.tag) != "data":
            continue
        key = child.get("key")
        name = keymap.get(key, key)
        if name is None:
            raise GraphMLError(f"{where}: data element without key attribute")
        if name in out:
            raise GraphMLError(f"{where}: duplicate key {name!r}")
        out[name] = (child.text or "").strip()
    return out


def _as_int(data, name, where) -> int:
    if name not in data:
        raise GraphMLError(f"{where}: missing key {name!r}")
    try:
        return int(data[name])
    except ValueError:
        raise GraphMLError(
            f"{where}: key {name!r} has non-integer value {data[name]!r}"
        ) from None


def _as_bool(data, name, where) -> bool:
    raw = data.get(name, "0").lower()
    if raw in ("0", "false"):
        return False
    if raw in ("1", "true"):
        return True
    raise GraphMLError(f"{where}: key {name!r} has non-boolean value {raw!r}")


def parse_graphml(text: str) -> Dag:
    """Parse an annotated dag from GraphML.

    Nodes need integer data ``index`` and ``vector_size``; edges need
    ``tangent_cost``, ``adjoint_cost`` and ``has_jacobian`` (0/1), with an
    optional ``jacobian_kind`` of ``general`` or ``identity``.  Key elements
    may declare ids distinct from attribute names; bare key names as in the
    reference session listing are accepted too.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise GraphMLError(f"not well-formed XML: {exc}") from None
    keymap: dict[str, str] = {}
    for key in root.iter():
        if _local(key.tag) == "key" and key.get("id"):
            keymap[key.get("id")] = key.get("attr.name") or key.get("id")

    vertices: list[DagVertex] = []
    edges: list[DagEdge] = []
    id_to_index: dict[str, int] = {}
    for node in root.iter():
        if _local(node.tag) != "node":
            continue
        nid = node.get("id", "?")
        where = f"node {nid!r}"
        data = _collect_data(node, keymap, where)
        index = _as_int(data, "index", where)
        size = _as_int(data, "vector_size", where)
        if index in id_to_index.values():
            raise GraphMLError(f"{where}: duplicate vertex index {index}")
        id_to_index[nid] = index
        try:
            vertices.append(DagVertex(index, size))
        except GraphError as exc:
            raise GraphMLError(f"{where}: {exc}") from None
    for edge in root.iter():
        if _local(edge.tag) != "edge":
            continue
        eid = edge.get("id") or f"{edge.get('source')}->{edge.get('target')}"
        where = f"edge {eid!r}"
        for attr in ("source", "target"):
            if edge.get(attr) not in id_to_index:
                raise GraphMLError(
                    f"{where}: unknown {attr} node {edge.get(attr)!r}"
                )
        data = _collect_data(edge, keymap, where)
        kind = data.get("jacobian_kind", "general")
        try:
            edges.append(
                DagEdge(
                    source=id_to_index[edge.get("source")],
                    target=id_to_index[edge.get("target")],
                    tangent_cost=_as_int(data, "tangent_cost", where),
                    adjoint_cost=_as_int(data, "adjoint_cost", where),
                    has_jacobian=_as_bool(data, "has_jacobian", where),
                    jacobian_kind=kind,
                )
            )
        except CycleDetected:
            raise
        except GraphError as exc:
            raise GraphMLError(f"{where}: {exc}") from None
    try:
        dag = Dag(vertices, edges)
    except GraphError as exc:
        raise GraphMLError(str(exc)) from None
    dag.topological_order()  # raises CycleDetected on cycles
    return dag


def serialize_graphml(dag: Dag) -> str:
    """Emit GraphML that parses back to a structurally equal dag."""
    root = ET.Element("graphml", xmlns="http://graphml.graphdrawing.org/xmlns")
    for name in _NODE_KEYS:
        ET.SubElement(
            root, "key", id=name, **{"for": "node", "attr.name": name, "attr.type": "int"}
        )
    for name in _EDGE_KEYS:
        ET.SubElement(
            root, "key", id=name, **{"for": "edge", "attr.name": name, "attr.type": "int"}
        )
    ET.SubElement(
        root,
        "key",
        id="jacobian_kind",
        **{"for": "edge", "attr.name": "jacobian_kind", "attr.type": "string"},
    )
    graph = ET.SubElement(root, "graph", id="G", edgedefault="directed")
    for v in dag.vertices:
        node = ET.SubElement(graph, "node", id=str(v.index))
        for name, value in (("index", v.index), ("vector_size", v.vector_size)):
            ET.SubElement(node, "data", key=name).text = str(value)
    for k, e in enumerate(dag.edges):
        elem = ET.SubElement(
            graph, "edge", id=f"e{k}", source=str(e.source), target=str(e.target)
        )
        fields = [
            ("tangent_cost", e.tangent_cost),
            ("adjoint_cost", e.adjoint_cost),
            ("has_jacobian", int(e.has_jacobian)),
        ]
        if e.jacobian_kind != "general":
            fields.append(("jacobian_kind", e.jacobian_kind))
        for name, value in fields:
            ET.SubElement(elem, "data", key=name).text = str(value)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"
