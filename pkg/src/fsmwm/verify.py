"""Watermark verification protocol and the attacker's side: constructive
informed reconstruction, adversarial consistency witnesses, and bounded
equivalence checking."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import (
    AlphabetMismatchError,
    FsmwmError,
    InconsistentTranscriptError,
    SemanticError,
)
from .machine import Fsm, fsm_from_doc, fsm_to_doc, run
from .matrixcrypt import compose_cascade
from .reduction import branch_input_bits


# ---------------------------------------------------------------------------
# Distribution bundles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Package:
    """What ships: host machine, concealed watermark machine, and the
    serial test-port configuration."""

    mode: str                       # "matrix" | "fixed" | "optimal"
    host: Fsm
    watermark: Fsm
    chi: int
    omega: int
    scheme: str = "lehmer"
    n: int = 0
    k: int = 1


@dataclass(frozen=True)
class Secret:
    """What the verifier keeps: the decoding machine, the reference
    reduction, and the permutation scheme id."""

    mode: str
    decoder: Fsm
    redux: Fsm
    scheme: str = "lehmer"


def _bundle_dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def format_package(p: Package) -> str:
    return _bundle_dump({
        "kind": "package",
        "mode": p.mode,
        "host": fsm_to_doc(p.host),
        "watermark": fsm_to_doc(p.watermark),
        "tap": {"chi": p.chi, "omega": p.omega, "scheme": p.scheme,
                "n": p.n, "k": p.k},
    })


def parse_package(text: str) -> Package:
    doc = json.loads(text)
    if doc.get("kind") != "package":
        raise SemanticError("not a package bundle")
    tap = doc["tap"]
    return Package(
        mode=doc["mode"],
        host=fsm_from_doc(doc["host"]),
        watermark=fsm_from_doc(doc["watermark"]),
        chi=tap["chi"],
        omega=tap["omega"],
        scheme=tap["scheme"],
        n=tap["n"],
        k=tap["k"],
    )


def format_secret(s: Secret) -> str:
    return _bundle_dump({
        "kind": "secret",
        "mode": s.mode,
        "decoder": fsm_to_doc(s.decoder),
        "redux": fsm_to_doc(s.redux),
        "scheme": s.scheme,
    })


def parse_secret(text: str) -> Secret:
    doc = json.loads(text)
    if doc.get("kind") != "secret":
        raise SemanticError("not a secret bundle")
    return Secret(
        mode=doc["mode"],
        decoder=fsm_from_doc(doc["decoder"]),
        redux=fsm_from_doc(doc["redux"]),
        scheme=doc["scheme"],
    )


# ---------------------------------------------------------------------------
# Verification protocol
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    passed: bool
    divergence_index: int | None
    expected: tuple[str, ...]
    observed: tuple[str, ...]

    def report(self) -> str:
        lines = ["PASS" if self.passed else "FAIL"]
        if not self.passed:
            lines.append(f"first divergence at index {self.divergence_index}")
        lines.append("expected: " + " ".join(self.expected))
        lines.append("observed: " + " ".join(self.observed))
        return "\n".join(lines) + "\n"


def _compare(expected: list[str], observed: list[str]) -> Verdict:
    for i, (e, o) in enumerate(zip(expected, observed)):
        if e != o:
            return Verdict(False, i, tuple(expected), tuple(observed))
    if len(expected) != len(observed):
        return Verdict(False, min(len(expected), len(observed)),
                       tuple(expected), tuple(observed))
    return Verdict(True, None, tuple(expected), tuple(observed))


def watermark_test(package: Package, secret: Secret, branch: int,
                   length: int) -> Verdict:
    """Three-step protocol: cascade the shipped machine with the decoder,
    run the reference reduction on the same schedule, compare outputs."""
    if package.mode != secret.mode:
        raise SemanticError(
            f"package mode {package.mode!r} does not match secret {secret.mode!r}"
        )
    if package.mode == "matrix":
        if branch != 0:
            raise FsmwmError("matrix-mode packages have a single branch 0")
        schedule = ["0"] * length
    else:
        width = branch_input_bits(package.k)
        if not 0 <= branch < (1 << width):
            raise FsmwmError(
                f"branch encoding {branch} out of range 0..{(1 << width) - 1}"
            )
        schedule = ([str(branch)] + ["0"] * (length - 1)) if length else []
    try:
        cascade = compose_cascade(package.watermark, secret.decoder)
    except AlphabetMismatchError as e:
        raise AlphabetMismatchError(f"wrong secret for this package: {e}") from e
    observed, _ = run(cascade, schedule)
    expected, _ = run(secret.redux, schedule)
    return _compare(expected, observed)


# ---------------------------------------------------------------------------
# Black-box oracle
# ---------------------------------------------------------------------------

class FsmOracle:
    """Resettable steppable view of a machine.  Exposes only what an
    attacker probing package pins would have: the input bit width and the
    output stream.  Counts resets as probes."""

    def __init__(self, machine: Fsm, chi: int):
        self._machine = machine
        self.chi = chi
        self._state = machine.reset
        self.resets = 0
        self.steps = 0

    @property
    def input_symbols(self) -> tuple[str, ...]:
        return tuple(str(v) for v in range(1 << self.chi))

    def reset(self):
        self._state = self._machine.reset
        self.resets += 1

    def step(self, sym: str):
        """Feed one input value; returns the output or None on a halt."""
        self.steps += 1
        if not self._machine.defined(self._state, sym):
            return None
        self._state, out = (
            self._machine.transitions[(self._state, sym)],
            self._machine.output_map[(self._state, sym)],
        )
        return out


@dataclass(frozen=True)
class OracleBudget:
    max_probes: int
    max_steps_per_probe: int

    def __post_init__(self):
        if self.max_probes < 1 or self.max_steps_per_probe < 1:
            raise FsmwmError("budget must be positive")


def informed_attack(oracle: FsmOracle, chi: int) -> Fsm:
    """Reconstruct a branch-select machine by probing every input value
    from reset, then ticking down each branch until the output stream
    stabilizes or halts.  Uses at most 2**chi resets."""
    traces: dict[str, list[str | None]] = {}
    for v in range(1 << chi):
        oracle.reset()
        sym = str(v)
        first = oracle.step(sym)
        trace: list[str | None] = [first]
        if first is not None:
            prev = None
            while True:
                out = oracle.step("0")
                trace.append(out)
                if out is None or out == prev:
                    break
                prev = out
        traces[sym] = trace
    assert oracle.resets <= (1 << chi)

    # Shared suffix structure: branches with identical tick streams are
    # one branch reached through several encodings.
    inputs = tuple(str(v) for v in range(1 << chi))
    transitions: dict[tuple[int, str], int] = {}
    output_map: dict[tuple[int, str], str] = {}
    outputs: set[str] = set()
    next_id = 1
    chain_ids: dict[tuple[str, ...], list[int]] = {}
    for sym, trace in traces.items():
        if trace[0] is None:
            continue
        ticks = tuple(t for t in trace[1:] if t is not None)
        if ticks not in chain_ids:
            ids = []
            for _ in ticks:
                ids.append(next_id)
                next_id += 1
            chain_ids[ticks] = ids
        ids = chain_ids[ticks]
        if not ids:
            continue
        transitions[(0, sym)] = ids[0]
        output_map[(0, sym)] = trace[0]
        outputs.add(trace[0])
        halted = trace[-1] is None
        for pos, out in enumerate(ticks):
            src = ids[pos]
            if pos + 1 < len(ids):
                dst = ids[pos + 1]
            elif halted:
                continue            # stream ended in a halt: leave the tail open
            else:
                dst = src           # stabilized: tail ticks in place
            transitions[(src, "0")] = dst
            output_map[(src, "0")] = out
            outputs.add(out)
    states = frozenset([0] + [s for ids in chain_ids.values() for s in ids])
    return Fsm(
        states=states,
        inputs=inputs,
        outputs=tuple(sorted(outputs)) or ("0",),
        reset=0,
        transitions=transitions,
        output_map=output_map,
    )


# ---------------------------------------------------------------------------
# Adversarial consistency witness
# ---------------------------------------------------------------------------

def _normalize_runs(transcript):
    if not transcript:
        return []
    first = transcript[0]
    if first and isinstance(first[0], str):
        return [list(transcript)]
    return [list(r) for r in transcript]


def adversarial_extension(transcript, j: int) -> Fsm:
    """Machine replaying every observed (input, output) pair but with one
    extra output reachable only past the observation horizon: the
    executable witness that output counts cannot be pinned down from
    finite observation."""
    runs = _normalize_runs(transcript)
    observed_outputs: set[str] = set()
    root: dict = {}
    for r in runs:
        node = root
        for sym, out in r:
            observed_outputs.add(out)
            if sym in node:
                prev_out, child = node[sym]
                if prev_out != out:
                    raise InconsistentTranscriptError(
                        f"input {sym!r} seen with outputs {prev_out!r} and {out!r}"
                    )
                node = child
            else:
                child: dict = {}
                node[sym] = (out, child)
                node = child
    if len(observed_outputs) != j:
        raise FsmwmError(
            f"transcript shows {len(observed_outputs)} outputs, caller claims {j}"
        )
    fresh = "extra"
    while fresh in observed_outputs:
        fresh += "'"
    syms = sorted({sym for r in runs for sym, _ in r}) or ["0"]

    if not any(runs):
        transitions = {(0, syms[0]): 0}
        output_map = {(0, syms[0]): fresh}
        return Fsm(
            states=frozenset([0]),
            inputs=tuple(syms),
            outputs=(fresh,),
            reset=0,
            transitions=transitions,
            output_map=output_map,
        )

    numbering: dict[int, dict] = {}
    transitions = {}
    output_map = {}

    def number(node: dict) -> int:
        nid = len(numbering)
        numbering[nid] = node
        return nid

    stack = [(number(root), root)]
    leaves = []
    while stack:
        nid, node = stack.pop()
        if not node:
            leaves.append(nid)
        for sym, (out, child) in sorted(node.items()):
            cid = number(child)
            transitions[(nid, sym)] = cid
            output_map[(nid, sym)] = out
            stack.append((cid, child))
    extra = len(numbering)
    first_leaf = min(leaves)
    transitions[(first_leaf, syms[0])] = extra
    output_map[(first_leaf, syms[0])] = fresh
    transitions[(extra, syms[0])] = extra
    output_map[(extra, syms[0])] = fresh
    return Fsm(
        states=frozenset(list(range(len(numbering))) + [extra]),
        inputs=tuple(syms),
        outputs=tuple(sorted(observed_outputs)) + (fresh,),
        reset=0,
        transitions=transitions,
        output_map=output_map,
    )


def reachable_outputs(m: Fsm) -> set[str]:
    seen = {m.reset}
    queue = [m.reset]
    outs = set()
    while queue:
        s = queue.pop()
        for sym in m.inputs:
            if m.defined(s, sym):
                outs.add(m.output_map[(s, sym)])
                t = m.transitions[(s, sym)]
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
    return outs


# ---------------------------------------------------------------------------
# Output-count heuristic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OutputEstimate:
    count: int
    probes_used: int
    note: str


def estimate_output_count(oracle: FsmOracle, budget: OracleBudget,
                          seed: int = 0) -> OutputEstimate:
    """Random probing with a stopping rule: give up after a stretch of
    probes showing nothing new.  Heuristic only; certainty is out of
    reach for a black box."""
    rng = random.Random(seed)
    seen: set[str] = set()
    stale = 0
    stale_limit = max(1, budget.max_probes // 4)
    probes = 0
    while probes < budget.max_probes and stale < stale_limit:
        probes += 1
        oracle.reset()
        new = False
        for _ in range(budget.max_steps_per_probe):
            out = oracle.step(rng.choice(oracle.input_symbols))
            if out is None:
                break
            if out not in seen:
                seen.add(out)
                new = True
        stale = 0 if new else stale + 1
    return OutputEstimate(
        count=len(seen),
        probes_used=probes,
        note="lower-bound heuristic; exact identification is impossible "
             "from finite observation",
    )


# ---------------------------------------------------------------------------
# Equivalence checking
# ---------------------------------------------------------------------------

def bounded_equiv(m1: Fsm, m2: Fsm, depth: int) -> bool:
    """All input strings up to the given length produce identical output
    strings (including identical truncation points).  Checked on the
    reachable product, which covers every string exhaustively."""
    if set(m1.inputs) != set(m2.inputs):
        raise AlphabetMismatchError("machines have different input alphabets")
    frontier = {(m1.reset, m2.reset)}
    seen = set(frontier)
    for _ in range(depth):
        nxt = set()
        for s1, s2 in frontier:
            for sym in m1.inputs:
                d1, d2 = m1.defined(s1, sym), m2.defined(s2, sym)
                if d1 != d2:
                    return False
                if not d1:
                    continue
                if m1.output_map[(s1, sym)] != m2.output_map[(s2, sym)]:
                    return False
                pair = (m1.transitions[(s1, sym)], m2.transitions[(s2, sym)])
                if pair not in seen:
                    seen.add(pair)
                    nxt.add(pair)
        frontier = nxt
        if not frontier:
            break
    return True


def full_equiv(m1: Fsm, m2: Fsm) -> bool:
    """Unbounded product-automaton equivalence; terminates because the
    reachable product is finite."""
    return bounded_equiv(m1, m2, len(m1.states) * len(m2.states) + 1)
