"""Shared builders for the test suite.

Everything here is deliberately independent of the library's own
constructions wherever it serves as an oracle.
"""

import random

import pytest

from fsmwm import ConnGraph, Fsm


def make_host8() -> Fsm:
    """Dense 8-state two-input host used across the suite."""
    tr = {}
    om = {}
    for s in range(8):
        for sym in ("0", "1"):
            tr[(s, sym)] = (s + (1 if sym == "0" else 3)) % 8
            om[(s, sym)] = str((s + int(sym)) % 2)
    return Fsm(frozenset(range(8)), ("0", "1"), ("0", "1"), 0, tr, om)


def make_chain_host(n: int) -> Fsm:
    """Sparse n-state host whose longest path is trivially the full chain."""
    tr = {}
    om = {}
    for s in range(n):
        tr[(s, "0")] = min(s + 1, n - 1)
        om[(s, "0")] = str(s % 2)
        tr[(s, "1")] = s
        om[(s, "1")] = str((s + 1) % 2)
    return Fsm(frozenset(range(n)), ("0", "1"), ("0", "1"), 0, tr, om)


def random_graph(rng: random.Random, m: int, density: float = 0.35) -> ConnGraph:
    vertices = frozenset(range(m))
    edges = set()
    for u in range(m):
        for v in range(m):
            if rng.random() < density:
                edges.add((u, v))
    return ConnGraph(vertices=vertices, edges=frozenset(edges), root=0)


def random_machine(rng: random.Random, n_states: int, n_inputs: int,
                   n_outputs: int = 3, total: bool = True) -> Fsm:
    inputs = tuple(str(i) for i in range(n_inputs))
    outputs = tuple(chr(ord("a") + i) for i in range(n_outputs))
    tr = {}
    om = {}
    for s in range(n_states):
        for sym in inputs:
            if total or rng.random() < 0.8:
                tr[(s, sym)] = rng.randrange(n_states)
                om[(s, sym)] = rng.choice(outputs)
    return Fsm(frozenset(range(n_states)), inputs, outputs, 0, tr, om)


def all_simple_paths_from(g: ConnGraph, start: int):
    """Exhaustive simple-path enumeration; oracle for the path search."""
    out = []

    def rec(path):
        out.append(tuple(path))
        for (u, w) in g.edges:
            if u == path[-1] and w not in path:
                path.append(w)
                rec(path)
                path.pop()

    rec([start])
    return out


@pytest.fixture
def host8():
    return make_host8()


@pytest.fixture
def rng():
    return random.Random(1234)
