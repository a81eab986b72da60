"""Characteristic-machine derivation: longest simple path, sizing
operators (repeat / renumber / truncate), the linear reduction, and the
multi-branch extension with add-shift renumbering."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import FsmwmError, HashCollisionError
from .machine import ConnGraph, Fsm


@dataclass(frozen=True)
class Path:
    """Ordered vertex string.  ``base_max`` is the radix actually used by
    the renumbering that produced this path (0 when unrenumbered)."""

    vertices: tuple[int, ...]
    base_max: int = 0

    def __post_init__(self):
        if not self.vertices:
            raise FsmwmError("paths are nonempty")

    def __len__(self):
        return len(self.vertices)


def longest_simple_path(g: ConnGraph) -> Path:
    """Backtracking search for the maximal simple path from the root.

    Maximal under (length, sequence) with vertices ordered by ascending
    id; neighbors are explored in descending order so the first
    full-length path found is already the lexical maximum, which lets the
    search stop early on Hamiltonian paths.
    """
    n = len(g.vertices)
    succ = {v: sorted(g.successors(v), reverse=True) for v in g.vertices}
    best: list[int] = [g.root]
    stack = [g.root]
    on_path = {g.root}

    def walk():
        nonlocal best
        if len(stack) > len(best) or (len(stack) == len(best) and stack > best):
            best = list(stack)
        if len(best) == n:
            return True
        for w in succ[stack[-1]]:
            if w in on_path:
                continue
            stack.append(w)
            on_path.add(w)
            done = walk()
            on_path.discard(w)
            stack.pop()
            if done:
                return True
        return False

    walk()
    return Path(tuple(best))


def repeat_path(p: Path, j: int) -> Path:
    """Raw j-fold repetition; duplicates allowed until renumbering."""
    if j < 1:
        raise FsmwmError("repetition count must be >= 1")
    return Path(p.vertices * j)


def _period(seq: tuple[int, ...]) -> int:
    for i in range(1, len(seq) + 1):
        if len(seq) % i == 0 and all(seq[t] == seq[t % i] for t in range(len(seq))):
            return i
    raise FsmwmError("not a repeated path")  # unreachable


def _stride(v_star: int, period: tuple[int, ...]) -> int:
    # The multiplier must cover the dense index range or rows collide.
    return max(v_star, len(set(period)))


def renumber(p_rep: Path, v_star: int) -> Path:
    """Radix-encode the row number into each vertex of a repeated path.

    Element at row r (1-based), column c becomes stride*(r-1) + idx(v_c)
    where idx is the 1-based rank of the value within the period.
    """
    i = _period(p_rep.vertices)
    period = p_rep.vertices[:i]
    if v_star < max(period):
        raise FsmwmError(f"v* {v_star} smaller than a path element")
    stride = _stride(v_star, period)
    rank = {v: pos + 1 for pos, v in enumerate(sorted(set(period)))}
    out = tuple(
        stride * (t // i) + rank[p_rep.vertices[t]] for t in range(len(p_rep.vertices))
    )
    return Path(out, base_max=stride)


def renumber_inverse(q: Path, v_star: int, base: Path) -> Path:
    """Undo ``renumber``: recover the raw repeated path."""
    period = base.vertices[: _period(base.vertices)]
    stride = _stride(v_star, period)
    values = sorted(set(period))
    out = []
    for w in q.vertices:
        idx = (w - 1) % stride
        if idx >= len(values):
            raise FsmwmError(f"value {w} not in the renumbered range")
        out.append(values[idx])
    return Path(tuple(out))


def truncate(p: Path, j: int) -> Path:
    """First j vertices; j >= 1 keeps the path nonempty."""
    if not 1 <= j <= len(p):
        raise FsmwmError(f"truncation length {j} out of range 1..{len(p)}")
    return Path(p.vertices[:j], base_max=p.base_max)


def sized_path(p: Path, m: int) -> Path:
    """Stretch or shrink a path to exactly m pairwise-distinct vertices."""
    if m < 1:
        raise FsmwmError("target length must be >= 1")
    j = math.ceil(m / len(p))
    return truncate(renumber(repeat_path(p, j), max(p.vertices)), m)


def lpr(g: ConnGraph, m: int) -> ConnGraph:
    """Linear reduction: the sized longest simple path as a rooted chain."""
    path = sized_path(longest_simple_path(g), m)
    edges = frozenset(zip(path.vertices, path.vertices[1:]))
    return ConnGraph(
        vertices=frozenset(path.vertices), edges=edges, root=path.vertices[0]
    )


def chain_of(g: ConnGraph) -> list[int]:
    """Vertex sequence of a linear graph, root first."""
    seq = [g.root]
    seen = {g.root}
    while True:
        nxt = [w for w in g.successors(seq[-1]) if w not in seen]
        if not nxt:
            return seq
        if len(nxt) > 1:
            raise FsmwmError("graph is not linear")
        seq.append(nxt[0])
        seen.add(nxt[0])


def add_shift_hash(x: int, r: int, c: int, z: int) -> int:
    """Rotate x left by c within z bits, then add r modulo 2**z.

    Bijective in x for fixed (r, c); the modulus is 2**z rather than z so
    the bijectivity actually holds.
    """
    if z < 1:
        raise FsmwmError("bit width must be >= 1")
    if not 0 <= x < (1 << z):
        raise FsmwmError(f"value {x} out of range for {z} bits")
    c %= z
    mask = (1 << z) - 1
    rotated = ((x << c) | (x >> (z - c))) & mask if c else x
    return (rotated + r) & mask


@dataclass(frozen=True)
class LprkSpec:
    """Shape of the multi-branch reduction: n rows per branch, k branches,
    states renumbered by the named hash family within z bits."""

    n: int
    k: int
    z: int
    hash_kind: str = "add-shift"

    def __post_init__(self):
        if self.n < 1 or self.k < 1 or self.z < 1:
            raise FsmwmError("n, k and z must be >= 1")
        if self.hash_kind != "add-shift":
            raise FsmwmError(f"unknown renumbering family {self.hash_kind!r}")


def branch_input_bits(k: int) -> int:
    """Bit width of the branch-select input field."""
    return max(1, math.ceil(math.log2(k))) if k > 1 else 1


def branch_state_id(x: int, row: int, branch: int, z: int) -> int:
    """Renumbered id for the branch state with base value x at 1-based
    ``row`` of 0-based ``branch``.

    The rotation amount is the row position and the added offset is the
    branch index; the opposite assignment admits no collision-free width
    for most (n, k) shapes.  Callers pass the 1-based depth as x.
    """
    return add_shift_hash(x, r=branch, c=row, z=z)


def lpr_k(g: ConnGraph, shape: LprkSpec) -> Fsm:
    """Join k renumbered copies of the length-n reduction at a fresh
    start state.

    The start state takes a branch-select input of chi bits (value v
    selects branch v mod k); within a branch the tick input "0" advances,
    and the branch tail ticks in place.  Outputs follow the standard
    convention: each transition emits its source state.
    """
    base = sized_path(longest_simple_path(g), shape.n).vertices
    assert len(base) == shape.n
    if shape.n >= (1 << shape.z):
        raise FsmwmError(f"z={shape.z} too narrow for {shape.n} rows")
    # Rows are renumbered by their 1-based depth, not the raw path values:
    # depth-based renumbering admits a narrow collision-free width for
    # every shape, value-based renumbering does not.
    columns = []
    for b in range(shape.k):
        columns.append(
            [branch_state_id(row, row, b, shape.z) for row in range(1, shape.n + 1)]
        )
    flat = [s for col in columns for s in col]
    if len(set(flat)) != len(flat):
        dupes = sorted({s for s in flat if flat.count(s) > 1})
        raise HashCollisionError(
            f"branch states collide at ids {dupes} with z={shape.z}; widen z"
        )
    start = 1 << shape.z
    chi = branch_input_bits(shape.k)
    inputs = tuple(str(v) for v in range(1 << chi))
    states = frozenset([start] + flat)
    transitions = {}
    output_map = {}
    for v in range(1 << chi):
        transitions[(start, str(v))] = columns[v % shape.k][0]
        output_map[(start, str(v))] = str(start)
    for col in columns:
        for row in range(shape.n):
            src = col[row]
            dst = col[row + 1] if row + 1 < shape.n else src
            transitions[(src, "0")] = dst
            output_map[(src, "0")] = str(src)
    return Fsm(
        states=states,
        inputs=inputs,
        outputs=tuple(str(s) for s in sorted(states)),
        reset=start,
        transitions=transitions,
        output_map=output_map,
    )


def find_branch_width(n: int, k: int, z_max: int = 24) -> int:
    """Smallest z for which the branch renumbering is collision-free."""
    z = max(1, n.bit_length())
    while z <= z_max:
        ids = [
            branch_state_id(row, row, b, z)
            for b in range(k)
            for row in range(1, n + 1)
        ]
        if len(set(ids)) == len(ids):
            return z
        z += 1
    raise HashCollisionError(f"no collision-free width <= {z_max} for n={n}, k={k}")
