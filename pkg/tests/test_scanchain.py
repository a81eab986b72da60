"""Serial test port: permutation scheme, TAP cycle accounting, and
serial/parallel agreement."""

import math
import random

import pytest

from fsmwm import (
    FsmwmError,
    TapSession,
    decode_transcript,
    drive_frames,
    permutation_by_index,
    run_states,
    scan_watermark_test,
)
from fsmwm.scanchain import (
    apply_perm,
    bits_to_int,
    draw_setting,
    format_transcript,
    int_to_bits,
    invert_perm,
    parse_transcript,
    setting_bit_width,
)
from conftest import make_chain_host, random_machine


def test_permutations_lexicographic_order():
    got = [permutation_by_index(3, i) for i in range(1, 7)]
    assert got == [
        (0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0),
    ]


def test_permutation_index_identity_and_bounds():
    assert permutation_by_index(5, 1) == (0, 1, 2, 3, 4)
    assert permutation_by_index(4, 24) == (3, 2, 1, 0)
    with pytest.raises(FsmwmError):
        permutation_by_index(3, 0)
    with pytest.raises(FsmwmError):
        permutation_by_index(3, 7)


def test_apply_invert_round_trip(rng):
    for _ in range(50):
        n = rng.randint(1, 8)
        bits = [rng.randint(0, 1) for _ in range(n)]
        i = rng.randint(1, math.factorial(n))
        assert invert_perm(apply_perm(bits, i), i) == bits


def test_draw_setting_range_and_determinism():
    r1, r2 = random.Random(9), random.Random(9)
    for n in (1, 2, 3, 6):
        vals = [draw_setting(r1, n) for _ in range(30)]
        assert all(1 <= v <= math.factorial(n) for v in vals)
        assert vals == [draw_setting(r2, n) for _ in range(30)]


def test_draw_setting_covers_small_space():
    rng_ = random.Random(0)
    seen = {draw_setting(rng_, 3) for _ in range(300)}
    assert seen == set(range(1, 7))


def test_setting_bit_width():
    assert setting_bit_width(1) == 1
    assert setting_bit_width(3) == 3      # 3! = 6 needs 3 bits
    assert setting_bit_width(4) == 5      # 4! = 24 needs 5 bits
    assert setting_bit_width(5) == 7      # 5! = 120 needs 7 bits


def test_int_bits_round_trip(rng):
    for _ in range(50):
        w = rng.randint(1, 12)
        v = rng.randrange(1 << w)
        assert bits_to_int(int_to_bits(v, w)) == v


def test_transcript_format_round_trip():
    host = make_chain_host(4)
    t = scan_watermark_test(host, 1, 2, 0, seed=5, steps=3)
    back = parse_transcript(format_transcript(t))
    assert back.records == t.records
    assert (back.n_b, back.chi, back.omega, back.seed) == (3, 1, 2, 5)


def test_transcript_rejects_gapped_indices():
    with pytest.raises(FsmwmError):
        parse_transcript("3 1 2 5\n0 1 0 0 Shift\n2 0 0 0 Shift\n")


def test_cycle_count_formula():
    host = make_chain_host(4)
    chi, omega, steps = 1, 2, 3
    t = scan_watermark_test(host, chi, omega, 0, seed=5, steps=steps)
    n_b = chi + omega
    p = setting_bit_width(n_b)
    frames = steps + 1
    assert len(t.records) == p + frames * (n_b + 2)


def _serial_states(machine, chi, omega, branch, steps, setting):
    t = scan_watermark_test(machine, chi, omega, branch, seed=0,
                            steps=steps, setting=setting)
    decoded_setting, payload = decode_transcript(t)
    assert decoded_setting == setting
    return [state for state, _ in payload]


def test_serial_matches_direct_exhaustive_small_settings():
    # every setting of a 3-bit register
    machine = make_chain_host(4)
    chi, omega = 1, 2
    for setting in range(1, math.factorial(3) + 1):
        got = _serial_states(machine, chi, omega, 1, 4, setting)
        want = run_states(machine, ["1", "0", "0", "0"])
        assert got == want


def test_serial_matches_direct_random_machines(rng):
    for _ in range(20):
        machine = random_machine(rng, rng.randint(2, 8), 2)
        chi, omega = 1, 3
        n_b = chi + omega
        setting = rng.randint(1, math.factorial(n_b))
        branch = rng.randint(0, 1)
        steps = rng.randint(1, 6)
        got = _serial_states(machine, chi, omega, branch, steps, setting)
        want = run_states(machine, [str(branch)] + ["0"] * (steps - 1))
        assert got == want


def test_undefined_input_value_is_ignored():
    # a value outside the machine's alphabet leaves the state alone for
    # that frame; later defined values still advance the machine
    machine = make_chain_host(4)
    got = _serial_states(machine, 2, 2, 3, 3, setting=1)
    assert got == [0, 0, 1, 2]


def test_preamble_is_unpermuted():
    machine = make_chain_host(4)
    setting = 5
    t = scan_watermark_test(machine, 1, 2, 0, seed=0, steps=2, setting=setting)
    p = setting_bit_width(3)
    shift_bits = [tdo for _, _, _, tdo, st in t.records if st == "Shift"]
    assert bits_to_int(shift_bits[:p]) + 1 == setting


def test_sessions_differ_by_seed():
    machine = make_chain_host(4)
    t1 = scan_watermark_test(machine, 1, 2, 1, seed=1, steps=3)
    t2 = scan_watermark_test(machine, 1, 2, 1, seed=2, steps=3)
    s1, p1 = decode_transcript(t1)
    s2, p2 = decode_transcript(t2)
    # payloads agree even though the wire images differ
    assert p1 == p2
    assert [r[3] for r in t1.records] != [r[3] for r in t2.records] or s1 == s2
