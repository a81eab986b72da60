"""Permutation-matrix encryption of a linear reduction and the
trace-built decryption machine."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import AlphabetMismatchError, DimensionError, FsmwmError
from .machine import (
    BitMatrix,
    ConnGraph,
    Fsm,
    adjacency,
    graph_of_adjacency,
    standard_cg_machine,
)
from .reduction import chain_of


@dataclass(frozen=True)
class PermKey:
    """Permutation over matrix indices; matrix form is an identity with
    permuted rows, orthogonal over booleans."""

    image: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(len(self.image))):
            raise DimensionError("key image is not a permutation")

    @property
    def dimension(self) -> int:
        return len(self.image)

    def inverse(self) -> "PermKey":
        inv = [0] * len(self.image)
        for i, j in enumerate(self.image):
            inv[j] = i
        return PermKey(tuple(inv))

    def matrix(self) -> BitMatrix:
        m = self.dimension
        rows = tuple(
            tuple(1 if j == self.image[i] else 0 for j in range(m)) for i in range(m)
        )
        return BitMatrix(tuple(range(m)), rows)

    def vertex_map(self, g: ConnGraph) -> dict[int, int]:
        """Permutation lifted to vertex ids via the sorted index mapping."""
        ids = sorted(g.vertices)
        if len(ids) != self.dimension:
            raise DimensionError("key dimension does not match vertex count")
        return {ids[i]: ids[self.image[i]] for i in range(len(ids))}


def random_perm_key(m: int, seed: int) -> PermKey:
    """Uniform permutation via seeded Fisher-Yates; deterministic per seed."""
    if m < 1:
        raise DimensionError("dimension must be >= 1")
    image = list(range(m))
    rng = random.Random(seed)
    for i in range(m - 1, 0, -1):
        j = rng.randint(0, i)
        image[i], image[j] = image[j], image[i]
    return PermKey(tuple(image))


def _apply(key_matrix: BitMatrix, g: ConnGraph) -> ConnGraph:
    a = adjacency(g)
    if a.dimension != key_matrix.dimension:
        raise DimensionError(
            f"key dimension {key_matrix.dimension} != graph size {a.dimension}"
        )
    product = a.matmul(BitMatrix(a.ids, key_matrix.rows))
    return graph_of_adjacency(product, g.root)


def encrypt_graph(key: PermKey, g: ConnGraph) -> ConnGraph:
    """Right-multiply the adjacency matrix by the key."""
    return _apply(key.matrix(), g)


def decrypt_graph(key: PermKey, g: ConnGraph) -> ConnGraph:
    """Right-multiply by the transposed key; inverts encrypt_graph."""
    return _apply(key.matrix().transpose(), g)


def relabel_graph(key: PermKey, g: ConnGraph) -> ConnGraph:
    """Conjugation Kt*A*K: rename every vertex through the key."""
    pi = key.vertex_map(g)
    return ConnGraph(
        vertices=frozenset(pi[v] for v in g.vertices),
        edges=frozenset((pi[u], pi[v]) for u, v in g.edges),
        root=pi[g.root],
    )


def build_watermark_machine(key: PermKey, lpr_graph: ConnGraph) -> Fsm:
    """Runnable concealed machine: the reduction with vertices renamed
    through the key, then converted to a standard walking machine.

    Conjugation is used instead of the bare right-multiplication because
    the bare product can strand the walker on a vertex with no out-edge;
    the bare transforms remain available as encrypt/decrypt_graph.
    """
    return standard_cg_machine(relabel_graph(key, lpr_graph))


@dataclass(frozen=True)
class TracePair:
    """Synchronized walk of the reduction and its concealed twin."""

    pairs: tuple[tuple[int, int], ...]


def trace_pair(lpr_graph: ConnGraph, key: PermKey) -> TracePair:
    pi = key.vertex_map(lpr_graph)
    chain = chain_of(lpr_graph)
    return TracePair(tuple((u, pi[u]) for u in chain))


def build_decryption_machine(key: PermKey, lpr_graph: ConnGraph) -> Fsm:
    """Verifier-side machine that mimics the reduction but only advances
    on the concealed machine's next emission; any other input leaves it in
    place echoing its current state."""
    trace = trace_pair(lpr_graph, key).pairs
    chain = [u for u, _ in trace]
    inputs = tuple(str(v) for _, v in sorted(trace, key=lambda p: p[1]))
    transitions = {}
    output_map = {}
    for t, u in enumerate(chain):
        for _, v in trace:
            sym = str(v)
            if t + 1 < len(chain) and v == trace[t + 1][1]:
                transitions[(u, sym)] = chain[t + 1]
                output_map[(u, sym)] = str(chain[t + 1])
            else:
                transitions[(u, sym)] = u
                output_map[(u, sym)] = str(u)
    return Fsm(
        states=frozenset(chain),
        inputs=inputs,
        outputs=tuple(str(u) for u in sorted(chain)),
        reset=chain[0],
        transitions=transitions,
        output_map=output_map,
    )


def compose_cascade(front: Fsm, back: Fsm) -> Fsm:
    """Pipeline product: one external input drives the front machine and
    its output is consumed by the back machine within the same step; the
    composite output is the back machine's output.

    Only the reachable product states are materialized.
    """
    if not set(front.outputs) <= set(back.inputs):
        raise AlphabetMismatchError(
            "front output alphabet is not contained in back input alphabet"
        )
    start = (front.reset, back.reset)
    numbering = {start: 0}
    queue = [start]
    transitions = {}
    output_map = {}
    while queue:
        pair = queue.pop(0)
        sf, sb = pair
        for sym in front.inputs:
            if not front.defined(sf, sym):
                continue
            nf = front.transitions[(sf, sym)]
            of = front.output_map[(sf, sym)]
            if not back.defined(sb, of):
                continue
            nb = back.transitions[(sb, of)]
            ob = back.output_map[(sb, of)]
            nxt = (nf, nb)
            if nxt not in numbering:
                numbering[nxt] = len(numbering)
                queue.append(nxt)
            transitions[(numbering[pair], sym)] = numbering[nxt]
            output_map[(numbering[pair], sym)] = ob
    return Fsm(
        states=frozenset(numbering.values()),
        inputs=front.inputs,
        outputs=back.outputs,
        reset=0,
        transitions=transitions,
        output_map=output_map,
    )


def format_key(key: PermKey) -> str:
    """One line, space-separated permutation image."""
    return " ".join(str(i) for i in key.image) + "\n"


def parse_key(text: str) -> PermKey:
    try:
        image = tuple(int(tok) for tok in text.split())
    except ValueError as e:
        raise FsmwmError(f"malformed key file: {e}") from e
    if not image:
        raise FsmwmError("empty key file")
    return PermKey(image)
