"""End-to-end assembly: from a host machine to a distributable package
and the matching verifier secret, in either concealment mode."""

from __future__ import annotations

from .errors import FsmwmError
from .machine import Fsm, connectivity_graph, standard_cg_machine
from .matrixcrypt import (
    PermKey,
    build_decryption_machine,
    build_watermark_machine,
    random_perm_key,
)
from .decompose import (
    build_dependent,
    build_independent,
    fixed_partitions_lprk,
    minimal_decomposition,
)
from .reduction import (
    LprkSpec,
    branch_input_bits,
    find_branch_width,
    lpr,
    lpr_k,
)
from .verify import Package, Secret


def state_bits(m: Fsm) -> int:
    """Scan-register width needed for the state field of a machine."""
    return max(1, max(m.states).bit_length())


def build_matrix_bundle(host: Fsm, m: int, key_seed: int,
                        omega: int | None = None):
    """Conceal a length-m linear reduction of the host behind a random
    permutation key.  Returns (package, secret, key)."""
    g = connectivity_graph(host)
    reduced = lpr(g, m)
    key = random_perm_key(m, key_seed)
    watermark = build_watermark_machine(key, reduced)
    decoder = build_decryption_machine(key, reduced)
    redux = standard_cg_machine(reduced)
    chi = 1
    w = state_bits(watermark)
    if omega is None:
        omega = w
    elif omega < w:
        raise FsmwmError(f"omega {omega} too narrow; need at least {w} bits")
    package = Package(mode="matrix", host=host, watermark=watermark,
                      chi=chi, omega=omega, n=m, k=1)
    secret = Secret(mode="matrix", decoder=decoder, redux=redux)
    return package, secret, key


def build_decomp_bundle(host: Fsm, n: int, k: int, mode: str = "fixed",
                        z: int | None = None, cap: int = 12,
                        omega: int | None = None):
    """Conceal a k-branch reduction as a two-machine cascade.

    ``mode`` picks the decomposition: "fixed" uses the known column/row
    pair; "optimal" searches the whole partition lattice (capped).
    Returns (package, secret).
    """
    if mode not in ("fixed", "optimal"):
        raise FsmwmError(f"unknown decomposition mode {mode!r}")
    g = connectivity_graph(host)
    if z is None:
        z = find_branch_width(n, k)
    redux = lpr_k(g, LprkSpec(n=n, k=k, z=z))
    if mode == "fixed":
        pair = fixed_partitions_lprk(redux, n, k)
    else:
        pair = minimal_decomposition(redux, cap=cap)
    front = build_independent(redux, pair.pi_i)
    back = build_dependent(redux, pair)
    chi = branch_input_bits(k)
    w = state_bits(redux)
    if omega is None:
        omega = w
    elif omega < w:
        raise FsmwmError(f"omega {omega} too narrow; need at least {w} bits")
    package = Package(mode=mode, host=host, watermark=front,
                      chi=chi, omega=omega, n=n, k=k)
    secret = Secret(mode=mode, decoder=back, redux=redux)
    return package, secret
