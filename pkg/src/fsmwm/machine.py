"""Mealy machines, rooted connectivity graphs, and their matrix views.

All values are immutable after construction and all operations are pure,
so machines and graphs can be shared freely between threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import DimensionError, HaltError, SemanticError, SyntaxError_


@dataclass(frozen=True)
class Fsm:
    """Deterministic Mealy machine over string symbols.

    ``transitions`` and ``output_map`` share the same (state, input) key
    set; the map may be partial.  State ids are non-negative integers.
    """

    states: frozenset[int]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    reset: int
    transitions: dict[tuple[int, str], int] = field(hash=False)
    output_map: dict[tuple[int, str], str] = field(hash=False)

    def __post_init__(self):
        if self.reset not in self.states:
            raise SemanticError(f"reset state {self.reset} not in state set")
        if set(self.transitions) != set(self.output_map):
            raise SemanticError("transition and output maps must share keys")
        for (src, sym), dst in self.transitions.items():
            if src not in self.states or dst not in self.states:
                raise SemanticError(f"transition ({src},{sym})->{dst} leaves the state set")
            if sym not in self.inputs:
                raise SemanticError(f"unknown input symbol {sym!r}")
        for key, out in self.output_map.items():
            if out not in self.outputs:
                raise SemanticError(f"unknown output symbol {out!r} at {key}")

    def defined(self, state: int, sym: str) -> bool:
        return (state, sym) in self.transitions


@dataclass(frozen=True)
class ConnGraph:
    """Rooted digraph: the host machine's topology with I/O erased."""

    vertices: frozenset[int]
    edges: frozenset[tuple[int, int]]
    root: int

    def __post_init__(self):
        if self.root not in self.vertices:
            raise SemanticError(f"root {self.root} not in vertex set")
        for u, v in self.edges:
            if u not in self.vertices or v not in self.vertices:
                raise SemanticError(f"edge ({u},{v}) leaves the vertex set")

    def successors(self, v: int) -> list[int]:
        return sorted(w for (u, w) in self.edges if u == v)


@dataclass(frozen=True)
class BitMatrix:
    """Square boolean matrix with a fixed row/column <-> vertex-id mapping.

    Row i corresponds to ``ids[i]``; ids are sorted ascending so the
    matrix of a graph is reproducible.
    """

    ids: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = len(self.ids)
        if tuple(sorted(self.ids)) != self.ids:
            raise DimensionError("id mapping must be sorted ascending")
        if len(self.rows) != m or any(len(r) != m for r in self.rows):
            raise DimensionError("matrix must be square over the id mapping")

    @property
    def dimension(self) -> int:
        return len(self.ids)

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.ids, tuple(zip(*self.rows)) if self.rows else ())

    def matmul(self, other: "BitMatrix") -> "BitMatrix":
        if self.ids != other.ids:
            raise DimensionError("matrix product needs matching id mappings")
        m = self.dimension
        cols = other.transpose().rows
        rows = tuple(
            tuple(1 if any(a & b for a, b in zip(row, col)) else 0 for col in cols)
            for row in self.rows
        )
        return BitMatrix(self.ids, rows if m else ())


def connectivity_graph(m: Fsm) -> ConnGraph:
    """Project the transition map to edges, collapsing duplicate inputs."""
    edges = frozenset((src, dst) for (src, _), dst in m.transitions.items())
    return ConnGraph(vertices=m.states, edges=edges, root=m.reset)


def adjacency(g: ConnGraph) -> BitMatrix:
    ids = tuple(sorted(g.vertices))
    index = {v: i for i, v in enumerate(ids)}
    m = len(ids)
    rows = [[0] * m for _ in range(m)]
    for u, v in g.edges:
        rows[index[u]][index[v]] = 1
    return BitMatrix(ids, tuple(tuple(r) for r in rows))


def graph_of_adjacency(a: BitMatrix, root: int) -> ConnGraph:
    if root not in a.ids:
        raise DimensionError(f"root {root} does not index a row of the matrix")
    edges = frozenset(
        (a.ids[i], a.ids[j])
        for i, row in enumerate(a.rows)
        for j, bit in enumerate(row)
        if bit
    )
    return ConnGraph(vertices=frozenset(a.ids), edges=edges, root=root)


def standard_cg_machine(g: ConnGraph) -> Fsm:
    """Machine that walks the graph and outputs the vertex it leaves.

    With out-degree <= 1 everywhere the input alphabet degenerates to the
    single tick symbol "0"; branching vertices consume an edge-choice
    index, edges ordered by target id.
    """
    max_deg = max((len(g.successors(v)) for v in g.vertices), default=0)
    inputs = tuple(str(i) for i in range(max(1, max_deg)))
    outputs = tuple(str(v) for v in sorted(g.vertices))
    transitions = {}
    output_map = {}
    for v in sorted(g.vertices):
        for i, w in enumerate(g.successors(v)):
            transitions[(v, str(i))] = w
            output_map[(v, str(i))] = str(v)
    return Fsm(
        states=g.vertices,
        inputs=inputs,
        outputs=outputs,
        reset=g.root,
        transitions=transitions,
        output_map=output_map,
    )


def step(m: Fsm, state: int, sym: str) -> tuple[int, str]:
    """One deterministic step; raises HaltError on an undefined pair."""
    key = (state, sym)
    if key not in m.transitions:
        raise HaltError(f"no transition from state {state} on input {sym!r}")
    return m.transitions[key], m.output_map[key]


def run(m: Fsm, symbols) -> tuple[list[str], int]:
    """Left fold of ``step`` from reset; truncates at the first hole.

    Returns the emitted outputs and the number of inputs consumed.
    """
    state = m.reset
    out: list[str] = []
    consumed = 0
    for sym in symbols:
        if not m.defined(state, sym):
            break
        state, o = step(m, state, sym)
        out.append(o)
        consumed += 1
    return out, consumed


def run_states(m: Fsm, symbols) -> list[int]:
    """State trajectory from reset, truncating at holes; includes reset."""
    state = m.reset
    states = [state]
    for sym in symbols:
        if not m.defined(state, sym):
            break
        state, _ = step(m, state, sym)
        states.append(state)
    return states


# ---------------------------------------------------------------------------
# Interchange formats
# ---------------------------------------------------------------------------

def fsm_to_doc(m: Fsm) -> dict:
    return {
        "states": sorted(m.states),
        "inputs": list(m.inputs),
        "outputs": list(m.outputs),
        "reset": m.reset,
        "transitions": [
            {"from": src, "in": sym, "to": dst, "out": m.output_map[(src, sym)]}
            for (src, sym), dst in sorted(m.transitions.items())
        ],
    }


def fsm_from_doc(doc: dict) -> Fsm:
    for key in ("states", "inputs", "outputs", "transitions"):
        if key not in doc:
            raise SemanticError(f"missing field {key!r}")
    if "reset" not in doc:
        raise SemanticError("missing field 'reset'")
    states = frozenset(doc["states"])
    if any(not isinstance(s, int) or s < 0 for s in states):
        raise SemanticError("state ids must be non-negative integers")
    transitions = {}
    output_map = {}
    for t in doc["transitions"]:
        key = (t["from"], t["in"])
        if key in transitions:
            raise SemanticError(f"duplicate transition for state {t['from']} input {t['in']!r}")
        if t["from"] not in states or t["to"] not in states:
            raise SemanticError(f"transition references unknown state: {t}")
        transitions[key] = t["to"]
        output_map[key] = t["out"]
    return Fsm(
        states=states,
        inputs=tuple(doc["inputs"]),
        outputs=tuple(doc["outputs"]),
        reset=doc["reset"],
        transitions=transitions,
        output_map=output_map,
    )


def parse_fsm(text: str) -> Fsm:
    """Parse the JSON-shaped interchange document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SyntaxError_(e.msg, line=e.lineno, column=e.colno) from e
    if not isinstance(doc, dict):
        raise SemanticError("document must be a JSON object")
    return fsm_from_doc(doc)


def format_fsm(m: Fsm) -> str:
    return json.dumps(fsm_to_doc(m), sort_keys=True, indent=2) + "\n"


def graph_to_doc(g: ConnGraph) -> dict:
    return {
        "vertices": sorted(g.vertices),
        "edges": [list(e) for e in sorted(g.edges)],
        "root": g.root,
    }


def graph_from_doc(doc: dict) -> ConnGraph:
    for key in ("vertices", "edges", "root"):
        if key not in doc:
            raise SemanticError(f"missing field {key!r}")
    return ConnGraph(
        vertices=frozenset(doc["vertices"]),
        edges=frozenset((u, v) for u, v in doc["edges"]),
        root=doc["root"],
    )


def format_graph(g: ConnGraph) -> str:
    return json.dumps(graph_to_doc(g), sort_keys=True, indent=2) + "\n"


def parse_graph(text: str) -> ConnGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SyntaxError_(e.msg, line=e.lineno, column=e.colno) from e
    if not isinstance(doc, dict):
        raise SemanticError("document must be a JSON object")
    return graph_from_doc(doc)


def parse_kiss2(text: str) -> Fsm:
    """Map a KISS2 benchmark description onto the same Fsm model.

    Symbolic state names become dense integer ids in order of first
    appearance, the reset state first.  Don't-care input bits expand.
    """
    headers: dict[str, str] = {}
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("."):
            parts = stripped.split()
            headers[parts[0]] = parts[1] if len(parts) > 1 else ""
            continue
        parts = stripped.split()
        if len(parts) != 4:
            raise SyntaxError_("transition line needs 4 fields", line=lineno, column=1)
        lines.append((lineno, parts))
    if ".i" not in headers or ".o" not in headers:
        raise SemanticError("missing .i/.o header")
    ni = int(headers[".i"])
    name_to_id: dict[str, int] = {}

    def state_id(name: str) -> int:
        if name not in name_to_id:
            name_to_id[name] = len(name_to_id)
        return name_to_id[name]

    if ".r" in headers and headers[".r"]:
        state_id(headers[".r"])

    def expand(bits: str) -> list[str]:
        if len(bits) != ni:
            raise SemanticError(f"input field {bits!r} does not match .i {ni}")
        pats = [""]
        for b in bits:
            choices = "01" if b == "-" else b
            pats = [p + c for p in pats for c in choices]
        return pats

    transitions = {}
    output_map = {}
    outputs = set()
    for lineno, (ibits, src, dst, obits) in lines:
        for pat in expand(ibits):
            key = (state_id(src), pat)
            if key in transitions:
                raise SemanticError(f"duplicate transition at line {lineno}")
            transitions[key] = state_id(dst)
            output_map[key] = obits
            outputs.add(obits)
    if not name_to_id:
        raise SemanticError("no states in document")
    reset = 0
    inputs = tuple(format(i, f"0{ni}b") for i in range(2 ** ni)) if ni else ("",)
    return Fsm(
        states=frozenset(name_to_id.values()),
        inputs=inputs,
        outputs=tuple(sorted(outputs)),
        reset=reset,
        transitions=transitions,
        output_map=output_map,
    )
