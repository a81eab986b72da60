"""Simulated boundary-scan access to the concealed machine: a
three-state test access port, the scan register, and the per-session
permuted latch/assert scheme."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .errors import FsmwmError
from .machine import Fsm

LATCH, SHIFT, ASSERT = "Latch", "Shift", "Assert"
_NEXT = {LATCH: SHIFT, SHIFT: ASSERT, ASSERT: LATCH}


# ---------------------------------------------------------------------------
# Permutation scheme (factorial-number-system indexing)
# ---------------------------------------------------------------------------

def permutation_by_index(n: int, i: int) -> tuple[int, ...]:
    """The i-th permutation of range(n), 1-based, in lexicographic order;
    i=1 is the identity.  Decoded through factorial-base digits so large
    n never materializes n! beyond the index arithmetic."""
    if not 1 <= i <= math.factorial(n):
        raise FsmwmError(f"permutation index {i} out of range 1..{n}!")
    rank = i - 1
    digits = []
    for pos in range(n):
        f = math.factorial(n - 1 - pos)
        digits.append(rank // f)
        rank %= f
    pool = list(range(n))
    return tuple(pool.pop(d) for d in digits)


def apply_perm(bits: list[int], i: int) -> list[int]:
    """Permute a bit vector by setting i: output j takes input perm[j]."""
    perm = permutation_by_index(len(bits), i)
    return [bits[perm[j]] for j in range(len(bits))]


def invert_perm(bits: list[int], i: int) -> list[int]:
    perm = permutation_by_index(len(bits), i)
    out = [0] * len(bits)
    for j in range(len(bits)):
        out[perm[j]] = bits[j]
    return out


def draw_setting(rng: random.Random, n: int) -> int:
    """Uniform setting in [1, n!] via uniform factorial-base digits.

    Stands in for the hardware noise source; seeded, so reproducible.
    """
    rank = 0
    for pos in range(n):
        f = math.factorial(n - 1 - pos)
        rank += rng.randint(0, n - 1 - pos) * f
    return rank + 1


def setting_bit_width(n_b: int) -> int:
    """Width of the unpermuted setting preamble."""
    return max(1, math.ceil(math.log2(math.factorial(n_b)))) if n_b > 1 else 1


def int_to_bits(value: int, width: int) -> list[int]:
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


def bits_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | b
    return out


# ---------------------------------------------------------------------------
# TAP session
# ---------------------------------------------------------------------------

@dataclass
class Transcript:
    """Append-only per-cycle record of the serial interface."""

    n_b: int
    chi: int
    omega: int
    seed: int
    records: list[tuple[int, int, int, int, str]] = field(default_factory=list)

    def append(self, tms: int, tdi: int, tdo: int, state: str):
        self.records.append((len(self.records), tms, tdi, tdo, state))


def format_transcript(t: Transcript) -> str:
    lines = [f"{t.n_b} {t.chi} {t.omega} {t.seed}"]
    lines += [f"{i} {tms} {tdi} {tdo} {st}" for i, tms, tdi, tdo, st in t.records]
    return "\n".join(lines) + "\n"


def parse_transcript(text: str) -> Transcript:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FsmwmError("empty transcript")
    n_b, chi, omega, seed = (int(x) for x in lines[0].split())
    t = Transcript(n_b, chi, omega, seed)
    for expect, ln in enumerate(lines[1:]):
        idx, tms, tdi, tdo, st = ln.split()
        if int(idx) != expect:
            raise FsmwmError("cycle indices must be consecutive from 0")
        t.records.append((int(idx), int(tms), int(tdi), int(tdo), st))
    return t


class TapSession:
    """Single-owner serial window onto one concealed machine.

    Frame layout is output field then input field; shifting is MSB-out,
    LSB-in.  The session opens with the freshly drawn setting prepended
    to the chain unpermuted, followed by an implicit latch of the reset
    frame; the TAP starts in Latch.
    """

    def __init__(self, machine: Fsm, chi: int, omega: int, seed: int,
                 setting: int | None = None):
        self.machine = machine
        self.chi = chi
        self.omega = omega
        self.n_b = chi + omega
        self.seed = seed
        rng = random.Random(seed)
        self.setting = setting if setting is not None else draw_setting(rng, self.n_b)
        self.tap_state = LATCH
        self.mstate = machine.reset
        self.last_input_bits = [0] * chi
        self.transcript = Transcript(self.n_b, chi, omega, seed)
        self.chain = int_to_bits(self.setting - 1, setting_bit_width(self.n_b))
        self._latch()

    def _latch(self):
        frame = int_to_bits(self.mstate, self.omega) + list(self.last_input_bits)
        self.chain = self.chain + apply_perm(frame, self.setting)

    def _assert(self):
        bsr = self.chain[-self.n_b:]
        frame = invert_perm(bsr, self.setting)
        self.last_input_bits = frame[self.omega:]
        sym = str(bits_to_int(self.last_input_bits))
        if sym in self.machine.inputs and self.machine.defined(self.mstate, sym):
            self.mstate = self.machine.transitions[(self.mstate, sym)]
        # Undefined input: the machine stays frozen.
        self.chain = []

    def tap_step(self, tms: int, tdi: int) -> int:
        """One test-clock cycle.  TMS=0 holds the TAP state; TMS=1
        advances it cyclically, and the entered state acts immediately.
        Shifting occurs on every cycle spent in Shift, entry included."""
        if tms:
            self.tap_state = _NEXT[self.tap_state]
            if self.tap_state == ASSERT:
                self._assert()
            elif self.tap_state == LATCH:
                self._latch()
        tdo = 0
        if self.tap_state == SHIFT and self.chain:
            tdo = self.chain.pop(0)
            self.chain.append(tdi)
        self.transcript.append(tms, tdi, tdo, self.tap_state)
        return tdo


def drive_frames(session: TapSession, input_values: list[int]) -> Transcript:
    """Run one frame per input value: enter Shift, stream the register
    out while feeding the permuted next frame in, then assert and latch."""
    p = setting_bit_width(session.n_b)
    n_b = session.n_b
    for f, value in enumerate(input_values):
        window = p + n_b if f == 0 else n_b
        frame = [0] * session.omega + int_to_bits(value, session.chi)
        feed = ([0] * p if f == 0 else []) + apply_perm(frame, session.setting)
        session.tap_step(1, feed[0])          # enter Shift
        for bit in feed[1:]:
            session.tap_step(0, bit)
        assert window == len(feed)
        session.tap_step(1, 0)                # enter Assert
        session.tap_step(1, 0)                # enter Latch
    return session.transcript


def decode_transcript(t: Transcript, setting: int | None = None):
    """Recover the setting and the (state, input-field) payload stream
    from the serial log.  Requires knowledge of the permutation scheme;
    the setting itself is read from the unpermuted preamble."""
    p = setting_bit_width(t.n_b)
    shift_bits = [tdo for _, _, _, tdo, st in t.records if st == SHIFT]
    if len(shift_bits) < p:
        raise FsmwmError("transcript shorter than the setting preamble")
    decoded_setting = bits_to_int(shift_bits[:p]) + 1
    if setting is None:
        setting = decoded_setting
    payload = []
    rest = shift_bits[p:]
    for off in range(0, len(rest) - t.n_b + 1, t.n_b):
        frame = invert_perm(rest[off:off + t.n_b], setting)
        payload.append((bits_to_int(frame[:t.omega]), bits_to_int(frame[t.omega:])))
    return decoded_setting, payload


def scan_watermark_test(machine: Fsm, chi: int, omega: int, branch: int,
                        seed: int, steps: int,
                        setting: int | None = None) -> Transcript:
    """Drive a complete serial watermark test for one branch.

    The schedule is the branch selector, steps-1 ticks, and one trailing
    tick whose frame flushes the final latched state out of the register.
    """
    session = TapSession(machine, chi, omega, seed, setting=setting)
    values = [branch] + [0] * steps
    return drive_frames(session, values)
