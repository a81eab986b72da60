"""Cascade decomposition of the reduction: partition algebra, exhaustive
minimal search over the partition lattice, the fixed column/row
decomposition, and construction of the two cascade machines."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    CapExceededError,
    FsmwmError,
    IncompatibleBlocksError,
    NoNontrivialDecompositionError,
    PartitionError,
)
from .machine import Fsm
from .reduction import branch_input_bits


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks covering a state set.  Blocks are kept
    sorted by minimum element, which also fixes the block numbering e."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise PartitionError("empty block")
            if seen & b:
                raise PartitionError("blocks overlap")
            seen |= b
        if list(self.blocks) != sorted(self.blocks, key=min):
            raise PartitionError("blocks must be ordered by minimum element")

    @classmethod
    def of(cls, blocks) -> "Partition":
        frozen = tuple(frozenset(b) for b in blocks)
        if any(not b for b in frozen):
            raise PartitionError("empty block")
        return cls(tuple(sorted(frozen, key=min)))

    @classmethod
    def singletons(cls, states) -> "Partition":
        return cls.of([{s} for s in states])

    @classmethod
    def one_block(cls, states) -> "Partition":
        return cls.of([set(states)])

    def universe(self) -> frozenset[int]:
        return frozenset(s for b in self.blocks for s in b)

    def block_of(self, state: int) -> frozenset[int]:
        for b in self.blocks:
            if state in b:
                return b
        raise PartitionError(f"state {state} not covered")

    def number(self, block: frozenset[int]) -> int:
        return self.blocks.index(block)

    def signature(self) -> tuple:
        return tuple(tuple(sorted(b)) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)


@dataclass(frozen=True)
class PartitionPair:
    pi_i: Partition
    pi_d: Partition


def is_input_preserving(m: Fsm, pi: Partition) -> bool:
    """Blockwise consistency under every input.  A defined/undefined
    mismatch inside a block fails the check."""
    if pi.universe() != m.states:
        raise PartitionError("partition does not cover the state set")
    for block in pi.blocks:
        members = sorted(block)
        for sym in m.inputs:
            targets = set()
            defined = 0
            for s in members:
                if m.defined(s, sym):
                    defined += 1
                    targets.add(pi.block_of(m.transitions[(s, sym)]))
            if defined not in (0, len(members)) or len(targets) > 1:
                return False
    return True


def partition_dot(p1: Partition, p2: Partition) -> Partition:
    """All nonempty pairwise block intersections."""
    if p1.universe() != p2.universe():
        raise PartitionError("partitions cover different sets")
    blocks = []
    for b1 in p1.blocks:
        for b2 in p2.blocks:
            inter = b1 & b2
            if inter:
                blocks.append(inter)
    return Partition.of(blocks)


def is_orthogonal(p1: Partition, p2: Partition) -> bool:
    return all(len(b) == 1 for b in partition_dot(p1, p2).blocks)


def _restricted_growth_strings(n: int):
    """All set partitions of range(n) as block-assignment arrays."""
    assign = [0] * n

    def rec(pos: int, maxblk: int):
        if pos == n:
            yield tuple(assign)
            return
        for b in range(maxblk + 2):
            assign[pos] = b
            yield from rec(pos + 1, max(maxblk, b))

    yield from rec(1, 0) if n else iter(())


def enumerate_sp_partitions(m: Fsm, max_states: int = 12) -> list[Partition]:
    """Every input-preserving partition, by set-partition enumeration plus
    filter.  Refuses machines above the cap: the lattice grows with the
    Bell numbers."""
    states = sorted(m.states)
    n = len(states)
    if n > max_states:
        raise CapExceededError(
            f"machine has {n} states; exhaustive lattice search capped at {max_states}"
        )
    # Array-based filter; noticeably faster than the Partition API inside
    # the Bell-number loop.
    trans = [
        [m.transitions.get((s, sym)) for s in states] for sym in m.inputs
    ]
    index = {s: i for i, s in enumerate(states)}
    tindex = [
        [None if t is None else index[t] for t in row] for row in trans
    ]
    found = []
    for assign in _restricted_growth_strings(n):
        ok = True
        for row in tindex:
            sig: dict[int, object] = {}
            for i in range(n):
                t = row[i]
                val = -1 if t is None else assign[t]
                blk = assign[i]
                prev = sig.get(blk)
                if prev is None:
                    sig[blk] = val
                elif prev != val:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            nblocks = max(assign) + 1
            blocks = [set() for _ in range(nblocks)]
            for i, b in enumerate(assign):
                blocks[b].add(states[i])
            found.append(Partition.of(blocks))
    return found


def _nontrivial(p: Partition, n_states: int) -> bool:
    return 1 < len(p) < n_states


def minimal_decomposition(m: Fsm, cap: int = 12) -> PartitionPair:
    """Exhaustive lattice search for the orthogonal pair with the fewest
    total blocks; trivial pairs (involving the singleton or the one-block
    partition) are excluded.  Deterministic tie-break on block signatures."""
    parts = enumerate_sp_partitions(m, cap)
    n_states = len(m.states)
    candidates = [p for p in parts if _nontrivial(p, n_states)]
    best = None
    best_key = None
    for p1 in candidates:
        for p2 in candidates:
            if not is_orthogonal(p1, p2):
                continue
            key = (len(p1) + len(p2), p1.signature(), p2.signature())
            if best_key is None or key < best_key:
                best, best_key = PartitionPair(p1, p2), key
    if best is None:
        raise NoNontrivialDecompositionError(
            "only trivial orthogonal pairs exist for this machine"
        )
    return best


def lprk_layout(lprk: Fsm, n: int, k: int):
    """Recover start, columns and rows of a multi-branch reduction."""
    start = lprk.reset
    chi = branch_input_bits(k)
    heads = []
    for v in range(1 << chi):
        head = lprk.transitions.get((start, str(v)))
        if head is None:
            raise FsmwmError("machine is not a branch-select reduction")
        if head not in heads:
            heads.append(head)
    if len(heads) != k:
        raise FsmwmError(f"expected {k} branches, found {len(heads)}")
    columns = []
    for head in heads:
        col = [head]
        while True:
            nxt = lprk.transitions.get((col[-1], "0"))
            if nxt is None or nxt == col[-1]:
                break
            col.append(nxt)
        if len(col) != n:
            raise FsmwmError(f"branch length {len(col)} != n={n}")
        columns.append(col)
    return start, columns


def fixed_partitions_lprk(lprk: Fsm, n: int, k: int) -> PartitionPair:
    """Known-form decomposition: columns (plus the start in its own
    block) for the independent side, rows for the dependent side.
    Re-verified, since a construction bug here would poison everything
    downstream."""
    start, columns = lprk_layout(lprk, n, k)
    pi_i = Partition.of([{start}] + [set(col) for col in columns])
    pi_d = Partition.of(
        [{start}] + [{col[r] for col in columns} for r in range(n)]
    )
    if not (is_input_preserving(lprk, pi_i) and is_input_preserving(lprk, pi_d)):
        raise FsmwmError("internal error: fixed partitions are not input-preserving")
    if not is_orthogonal(pi_i, pi_d):
        raise FsmwmError("internal error: fixed partitions are not orthogonal")
    return PartitionPair(pi_i, pi_d)


def pair_symbol(sym: str, block_number: int) -> str:
    """Wire encoding of the (input, independent-state) pair."""
    return f"{sym},{block_number}"


def build_independent(m: Fsm, pi_i: Partition) -> Fsm:
    """Blockwise lift of the machine; outputs its own block number paired
    with the consumed input."""
    if not is_input_preserving(m, pi_i):
        raise PartitionError("partition is not input-preserving")
    transitions = {}
    output_map = {}
    for (src, sym), dst in m.transitions.items():
        b1 = pi_i.number(pi_i.block_of(src))
        b2 = pi_i.number(pi_i.block_of(dst))
        key = (b1, sym)
        if key in transitions and transitions[key] != b2:
            raise PartitionError("blockwise lift is inconsistent")
        transitions[key] = b2
        output_map[key] = pair_symbol(sym, b1)
    outputs = tuple(
        pair_symbol(sym, b) for sym in m.inputs for b in range(len(pi_i))
    )
    return Fsm(
        states=frozenset(range(len(pi_i))),
        inputs=m.inputs,
        outputs=outputs,
        reset=pi_i.number(pi_i.block_of(m.reset)),
        transitions=transitions,
        output_map=output_map,
    )


def chi(b_i: frozenset[int], b_d: frozenset[int]) -> int:
    """Unique common state of two blocks from an orthogonal pair."""
    common = b_i & b_d
    if len(common) != 1:
        raise IncompatibleBlocksError(
            f"blocks {sorted(b_i)} and {sorted(b_d)} share {len(common)} states"
        )
    return next(iter(common))


def build_dependent(m: Fsm, pair: PartitionPair) -> Fsm:
    """Blockwise lift over the dependent partition; consumes (input,
    independent block) pairs and outputs the original machine's current
    state, recovered through the block intersection."""
    pi_i, pi_d = pair.pi_i, pair.pi_d
    if not is_input_preserving(m, pi_d):
        raise PartitionError("dependent partition is not input-preserving")
    if not is_orthogonal(pi_i, pi_d):
        raise PartitionError("partition pair is not orthogonal")
    lifted = {}
    for (src, sym), dst in m.transitions.items():
        d1 = pi_d.number(pi_d.block_of(src))
        d2 = pi_d.number(pi_d.block_of(dst))
        lifted[(d1, sym)] = d2
    transitions = {}
    output_map = {}
    for (d1, sym), d2 in lifted.items():
        for v in range(len(pi_i)):
            inter = pi_i.blocks[v] & pi_d.blocks[d1]
            if not inter:
                continue
            key = (d1, pair_symbol(sym, v))
            transitions[key] = d2
            output_map[key] = str(chi(pi_i.blocks[v], pi_d.blocks[d1]))
    inputs = tuple(
        pair_symbol(sym, v) for sym in m.inputs for v in range(len(pi_i))
    )
    return Fsm(
        states=frozenset(range(len(pi_d))),
        inputs=inputs,
        outputs=tuple(str(s) for s in sorted(m.states)),
        reset=pi_d.number(pi_d.block_of(m.reset)),
        transitions=transitions,
        output_map=output_map,
    )


def format_partition(pi: Partition) -> str:
    """One block per line, comma-separated state ids."""
    return "\n".join(",".join(str(s) for s in sorted(b)) for b in pi.blocks) + "\n"


def parse_partition(text: str) -> Partition:
    blocks = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            blocks.append({int(tok) for tok in line.split(",")})
        except ValueError as e:
            raise PartitionError(f"malformed partition line {line!r}") from e
    if not blocks:
        raise PartitionError("empty partition file")
    return Partition.of(blocks)
