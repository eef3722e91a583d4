"""Directed-graph genotype of a metaheuristic and its design space.

An algorithm graph has one Choose vertex (the entry), a tree of Search
vertices forming one or more parallel pathways, a single Update vertex
where all pathways merge, and optional Archive vertices hanging off the
Update vertex as observers.  Recursion is expressed by a vertex
``loop_count`` (consecutive re-executions per iteration), never by
back-edges, so execution stays acyclic.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import CATALOG, ParamKind, Role, component, components_for
from .encodings import Encoding
from .errors import EmptySpaceRole, GraphParseError, InvalidGraph, SchemaError

MAX_LOOP_COUNT = 5


@dataclass(frozen=True)
class Vertex:
    """One component instance: id, catalog name, hyperparameter values, loop count."""

    id: int
    component: str
    params: dict = field(default_factory=dict)
    loop_count: int = 1

    @property
    def role(self) -> Role:
        return component(self.component).role


@dataclass(frozen=True)
class AlgorithmGraph:
    """Immutable directed graph of component vertices.

    ``entry`` is the Choose vertex; ``encoding`` names the genome type all
    Search vertices operate on.
    """

    encoding: Encoding
    vertices: tuple
    edges: tuple
    entry: int

    def vertex(self, vid: int) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def successors(self, vid: int) -> tuple:
        return tuple(t for f, t in self.edges if f == vid)

    def predecessors(self, vid: int) -> tuple:
        return tuple(f for f, t in self.edges if t == vid)

    def by_role(self, role: Role) -> tuple:
        return tuple(v for v in self.vertices if v.role is role)

    @property
    def search_vertices(self) -> tuple:
        return self.by_role(Role.SEARCH)

    @property
    def update_vertex(self) -> Vertex:
        updates = self.by_role(Role.UPDATE)
        if len(updates) != 1:
            raise InvalidGraph([f"expected exactly one update vertex, found {len(updates)}"])
        return updates[0]

    @property
    def pathway_count(self) -> int:
        """Number of parallel search pathways (maximal entry-to-update paths)."""
        update = self.update_vertex
        return len([f for f, t in self.edges if t == update.id])


def build_chain(
    encoding: Encoding,
    choose: tuple | str,
    searches,
    update: tuple | str,
    archives=(),
) -> AlgorithmGraph:
    """Assemble a single-pathway graph from component specs.

    Each element is either a bare component name or ``(name, params)``;
    missing hyperparameters are filled with catalog defaults.
    """

    def norm(item):
        if isinstance(item, str):
            name, overrides = item, {}
        else:
            name, overrides = item
        spec = component(name)
        params = spec.default_params()
        for k, v in overrides.items():
            params[k] = spec.param(k).coerce(v)
        return name, params

    vertices = []
    edges = []
    name, params = norm(choose)
    vertices.append(Vertex(0, name, params))
    prev = 0
    for i, item in enumerate(searches, start=1):
        name, params = norm(item)
        vertices.append(Vertex(i, name, params))
        edges.append((prev, i))
        prev = i
    uid = len(vertices)
    name, params = norm(update)
    vertices.append(Vertex(uid, name, params))
    edges.append((prev, uid))
    for j, item in enumerate(archives, start=uid + 1):
        name, params = norm(item)
        vertices.append(Vertex(j, name, params))
        edges.append((uid, j))
    return AlgorithmGraph(encoding, tuple(vertices), tuple(edges), entry=0)


# ---------------------------------------------------------------------------
# design space
# ---------------------------------------------------------------------------


@dataclass
class DesignSpace:
    """Admissible components per role, hyperparameter ranges, topology caps.

    When ``fixed_topology`` is set, only hyperparameters vary; if
    ``tunable_params`` is also given, only those ``(vertex id, name)`` slots
    may change.
    """

    encoding: Encoding
    allowed: dict
    param_ranges: dict
    max_search_vertices: int = 3
    max_pathways: int = 2
    fixed_topology: AlgorithmGraph | None = None
    tunable_params: set | None = None

    def __post_init__(self):
        for role in (Role.CHOOSE, Role.SEARCH, Role.UPDATE):
            if not self.allowed.get(role):
                raise EmptySpaceRole(f"design space has no {role.value} components")
        if self.fixed_topology is not None:
            report = validate_graph(
                self.fixed_topology,
                DesignSpace(
                    self.encoding,
                    self.allowed,
                    self.param_ranges,
                    self.max_search_vertices,
                    self.max_pathways,
                ),
            )
            if report:
                raise InvalidGraph(report)

    def range_of(self, comp_name: str, param_name: str) -> tuple:
        key = (comp_name, param_name)
        if key in self.param_ranges:
            return self.param_ranges[key]
        p = component(comp_name).param(param_name)
        return (p.lower, p.upper)

    def tunable_slots(self, graph: AlgorithmGraph) -> list:
        """(vertex id, param name) slots free to vary for this graph."""
        slots = []
        for v in graph.vertices:
            for p in component(v.component).params:
                if self.tunable_params is not None and (v.id, p.name) not in self.tunable_params:
                    continue
                slots.append((v.id, p.name))
        return slots


def build_default_space(encoding: Encoding, **caps) -> DesignSpace:
    """Design space admitting every catalog component of the given encoding."""
    allowed = {
        Role.CHOOSE: components_for(Role.CHOOSE),
        Role.SEARCH: components_for(Role.SEARCH, encoding),
        Role.UPDATE: components_for(Role.UPDATE),
        Role.ARCHIVE: components_for(Role.ARCHIVE),
    }
    param_ranges = {}
    for names in allowed.values():
        for name in names:
            for p in CATALOG[name].params:
                param_ranges[(name, p.name)] = (p.lower, p.upper)
    return DesignSpace(encoding, allowed, param_ranges, **caps)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    where: str = ""

    def __str__(self):
        loc = f" at {self.where}" if self.where else ""
        return f"{self.code}: {self.message}{loc}"


def validate_graph(graph: AlgorithmGraph, space: DesignSpace) -> list:
    """Check a graph against all structural invariants and the space.

    Returns the list of violations; an empty list means the graph is valid.
    """
    out = []

    def bad(code, message, where=""):
        out.append(Violation(code, message, where))

    ids = [v.id for v in graph.vertices]
    if len(set(ids)) != len(ids):
        bad("duplicate_vertex_id", "vertex ids are not unique")
        return out
    id_set = set(ids)
    for f, t in graph.edges:
        if f not in id_set or t not in id_set:
            bad("dangling_edge", "edge references a missing vertex", f"edge ({f},{t})")
    if out:
        return out

    for v in graph.vertices:
        if v.component not in CATALOG:
            bad("unknown_component", f"component {v.component!r} not in catalog", f"vertex {v.id}")
    if out:
        return out

    if graph.encoding is not space.encoding:
        bad(
            "space_encoding_mismatch",
            f"graph encoding {graph.encoding.value} differs from space {space.encoding.value}",
        )

    chooses = graph.by_role(Role.CHOOSE)
    updates = graph.by_role(Role.UPDATE)
    searches = graph.by_role(Role.SEARCH)
    archives = graph.by_role(Role.ARCHIVE)

    if len(chooses) != 1:
        bad("choose_count", f"graph must have exactly one choose vertex, found {len(chooses)}")
    if len(updates) != 1:
        bad("multiple_update" if len(updates) > 1 else "missing_update",
            f"graph must have exactly one update vertex, found {len(updates)}")
    if graph.entry not in id_set:
        bad("bad_entry", f"entry vertex {graph.entry} does not exist")
        return out
    entry = graph.vertex(graph.entry)
    if entry.role is not Role.CHOOSE:
        bad("entry_role", "entry vertex is not a choose component", f"vertex {entry.id}")
    if graph.predecessors(graph.entry):
        bad("entry_incoming", "no edge may target the choose vertex", f"vertex {entry.id}")

    if len(chooses) != 1 or len(updates) != 1:
        return out
    update = updates[0]

    # archives observe the update vertex and sit on no pathway
    for a in archives:
        preds = graph.predecessors(a.id)
        if tuple(preds) != (update.id,):
            bad("archive_attachment", "archive must hang off the update vertex via one edge",
                f"vertex {a.id}")
        if graph.successors(a.id):
            bad("archive_outgoing", "archive vertices have no outgoing edges", f"vertex {a.id}")

    # update fans out only to archives
    for t in graph.successors(update.id):
        if graph.vertex(t).role is not Role.ARCHIVE:
            bad("update_successor", "update vertex may only feed archives", f"edge ({update.id},{t})")

    # search stage: tree rooted at entry, merging only at update
    for s in searches:
        preds = graph.predecessors(s.id)
        if len(preds) != 1:
            bad("search_indegree", "search vertex needs exactly one incoming edge",
                f"vertex {s.id}")
        elif graph.vertex(preds[0]).role not in (Role.CHOOSE, Role.SEARCH):
            bad("search_predecessor", "search vertex fed by a non-search stage", f"vertex {s.id}")
        succs = graph.successors(s.id)
        if not succs:
            bad("dangling_pathway", "pathway does not reach the update vertex", f"vertex {s.id}")
        for t in succs:
            if graph.vertex(t).role is Role.ARCHIVE:
                bad("search_to_archive", "search vertex may not feed an archive",
                    f"edge ({s.id},{t})")

    for t in graph.successors(entry.id):
        if graph.vertex(t).role not in (Role.SEARCH,):
            bad("empty_pathway", "choose must feed search vertices",
                f"edge ({entry.id},{t})")
    if not graph.successors(entry.id):
        bad("disconnected", "choose vertex has no outgoing pathway", f"vertex {entry.id}")

    # reachability and acyclicity over choose/search/update
    flow_ids = {v.id for v in (entry, update, *searches)}
    seen = set()
    stack = [entry.id]
    cycle = False
    visiting = {}
    order = []

    def dfs(u, trail):
        nonlocal cycle
        if u in trail:
            cycle = True
            return
        if u in seen:
            return
        seen.add(u)
        for t in graph.successors(u):
            if t in flow_ids:
                dfs(t, trail | {u})
        order.append(u)

    dfs(entry.id, frozenset())
    if cycle:
        bad("cycle", "cycle among choose/search/update vertices")
    unreachable = flow_ids - seen
    if unreachable:
        bad("disconnected", f"vertices unreachable from entry: {sorted(unreachable)}")

    if len(searches) == 0:
        bad("no_search", "graph needs at least one search vertex")
    if len(searches) > space.max_search_vertices:
        bad("search_cap", f"{len(searches)} search vertices exceed cap {space.max_search_vertices}")
    n_pathways = len([f for f, t in graph.edges if t == update.id])
    if n_pathways > space.max_pathways:
        bad("pathway_cap", f"{n_pathways} pathways exceed cap {space.max_pathways}")

    # per-vertex checks: role admissibility, encoding, params, loop counts
    for v in graph.vertices:
        spec = component(v.component)
        if v.component not in space.allowed.get(spec.role, ()):
            bad("component_not_allowed",
                f"{v.component} not admitted for role {spec.role.value}", f"vertex {v.id}")
        if spec.role is Role.SEARCH and not spec.supports(graph.encoding):
            bad("encoding_mismatch",
                f"{v.component} does not operate on {graph.encoding.value} genomes",
                f"vertex {v.id}")
        if not (1 <= v.loop_count <= MAX_LOOP_COUNT):
            bad("loop_count", f"loop_count {v.loop_count} outside [1, {MAX_LOOP_COUNT}]",
                f"vertex {v.id}")
        schema_names = {p.name for p in spec.params}
        for k, val in v.params.items():
            if k not in schema_names:
                bad("unknown_param", f"{v.component} has no hyperparameter {k!r}", f"vertex {v.id}")
                continue
            lo, hi = space.range_of(v.component, k)
            if not (lo <= float(val) <= hi) or not math.isfinite(float(val)):
                bad("param_range", f"{v.component}.{k}={val} outside [{lo}, {hi}]",
                    f"vertex {v.id}")
        for name in schema_names - set(v.params):
            bad("missing_param", f"{v.component} missing hyperparameter {name!r}", f"vertex {v.id}")

    # fixed-topology mode: structure must match exactly
    if space.fixed_topology is not None and not out:
        if not same_topology(graph, space.fixed_topology):
            bad("fixed_topology", "graph topology differs from the fixed topology")
    return out


def same_topology(a: AlgorithmGraph, b: AlgorithmGraph) -> bool:
    """True when the graphs share ids, components, edges, and loop counts."""
    va = {(v.id, v.component, v.loop_count) for v in a.vertices}
    vb = {(v.id, v.component, v.loop_count) for v in b.vertices}
    return va == vb and set(a.edges) == set(b.edges) and a.entry == b.entry


def require_valid(graph: AlgorithmGraph, space: DesignSpace) -> None:
    report = validate_graph(graph, space)
    if report:
        raise InvalidGraph(report)


# ---------------------------------------------------------------------------
# pseudocode rendering
# ---------------------------------------------------------------------------


def _format_value(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def _call(vertex: Vertex, args: str) -> str:
    spec = component(vertex.component)
    parts = [_format_value(vertex.params[p.name]) for p in spec.params if p.name in vertex.params]
    parts.append(args)
    suffix = f"  x {vertex.loop_count}" if vertex.loop_count > 1 else ""
    return f"{vertex.component}({', '.join(parts)}){suffix}"


def render_pseudocode(graph: AlgorithmGraph, space: DesignSpace | None = None) -> str:
    """Render the fixed frame: initialize, while-loop body, end.

    One line per non-archive vertex, in execution order; parallel pathways
    become indented branch blocks; ``loop_count`` > 1 renders as ``x k``.
    """
    if space is not None:
        require_valid(graph, space)
    update = graph.update_vertex
    lines = ["S = initialize()", "While stopping criterion not met"]
    entry = graph.vertex(graph.entry)
    lines.append(f"    S = {_call(entry, 'S')}")

    def emit_chain(vid: int, depth: int, first: bool):
        v = graph.vertex(vid)
        pad = "    " * depth
        src = "S" if first else "S_new"
        lines.append(f"{pad}S_new = {_call(v, src)}")
        nxt = [t for t in graph.successors(vid) if t != update.id]
        if len(nxt) == 1:
            emit_chain(nxt[0], depth, False)
        elif len(nxt) > 1:
            for i, t in enumerate(sorted(nxt), start=1):
                lines.append(f"{pad}Branch {i}:")
                emit_chain(t, depth + 1, False)

    roots = sorted(graph.successors(entry.id))
    if len(roots) == 1:
        emit_chain(roots[0], 1, True)
    else:
        for i, r in enumerate(roots, start=1):
            lines.append(f"    Branch {i}:")
            emit_chain(r, 2, True)
    lines.append(f"    S = {_call(update, 'S, S_new')}")
    lines.append("End While")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

_SCHEMA_FIELDS = ("encoding", "entry", "vertices", "edges")
_VERTEX_FIELDS = ("id", "component", "params", "loop_count")


def graph_to_dict(graph: AlgorithmGraph) -> dict:
    return {
        "encoding": graph.encoding.value,
        "entry": graph.entry,
        "vertices": [
            {
                "id": v.id,
                "component": v.component,
                "params": {k: v.params[k] for k in sorted(v.params)},
                "loop_count": v.loop_count,
            }
            for v in graph.vertices
        ],
        "edges": [[f, t] for f, t in graph.edges],
    }


def serialize_graph(graph: AlgorithmGraph) -> bytes:
    """Encode a graph as canonical JSON; numbers keep full precision."""
    return json.dumps(graph_to_dict(graph), indent=2, sort_keys=False).encode("utf-8")


def graph_from_dict(doc: dict) -> AlgorithmGraph:
    if not isinstance(doc, dict):
        raise SchemaError("<root>", "algorithm file must be a JSON object")
    for f in _SCHEMA_FIELDS:
        if f not in doc:
            raise SchemaError(f)
    extra = set(doc) - set(_SCHEMA_FIELDS)
    if extra:
        raise SchemaError(sorted(extra)[0], f"unexpected field {sorted(extra)[0]!r}")
    try:
        encoding = Encoding(doc["encoding"])
    except ValueError:
        raise SchemaError("encoding", f"unknown encoding {doc['encoding']!r}") from None
    vertices = []
    if not isinstance(doc["vertices"], list):
        raise SchemaError("vertices", "vertices must be a list")
    for i, vd in enumerate(doc["vertices"]):
        if not isinstance(vd, dict):
            raise SchemaError("vertices", f"vertex {i} must be an object")
        for f in _VERTEX_FIELDS:
            if f not in vd:
                raise SchemaError(f, f"vertex {i} missing field {f!r}")
        vextra = set(vd) - set(_VERTEX_FIELDS)
        if vextra:
            raise SchemaError(sorted(vextra)[0], f"vertex {i} has unexpected field")
        params = {}
        spec = CATALOG.get(vd["component"])
        for k, val in dict(vd["params"]).items():
            if spec is not None and any(p.name == k and p.kind is ParamKind.INTEGER for p in spec.params):
                params[k] = int(val)
            else:
                params[k] = float(val)
        vertices.append(Vertex(int(vd["id"]), str(vd["component"]), params, int(vd["loop_count"])))
    edges = []
    if not isinstance(doc["edges"], list):
        raise SchemaError("edges", "edges must be a list")
    for e in doc["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise SchemaError("edges", "each edge must be a [from, to] pair")
        edges.append((int(e[0]), int(e[1])))
    return AlgorithmGraph(encoding, tuple(vertices), tuple(edges), int(doc["entry"]))


def deserialize_graph(data: bytes) -> AlgorithmGraph:
    try:
        doc = json.loads(data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data)
    except json.JSONDecodeError as e:
        raise GraphParseError(e.msg, offset=e.pos) from None
    return graph_from_dict(doc)


def graph_fingerprint(graph: AlgorithmGraph) -> int:
    """Stable 63-bit content hash; identical graphs hash identically."""
    digest = hashlib.blake2b(serialize_graph(graph), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1
