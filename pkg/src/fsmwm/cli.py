"""Command-line front end.

Exit codes: 0 success, 1 failed verification verdict, 2 usage error,
3 malformed or missing input.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import CapExceededError, FsmwmError
from .machine import (
    connectivity_graph,
    format_fsm,
    format_graph,
    parse_fsm,
    parse_graph,
    parse_kiss2,
    standard_cg_machine,
)
from .matrixcrypt import (
    build_decryption_machine,
    build_watermark_machine,
    format_key,
    parse_key,
    random_perm_key,
)
from .decompose import (
    build_dependent,
    build_independent,
    fixed_partitions_lprk,
    format_partition,
    is_input_preserving,
    is_orthogonal,
    minimal_decomposition,
    parse_partition,
)
from .pipeline import build_decomp_bundle, build_matrix_bundle
from .reduction import LprkSpec, find_branch_width, lpr, lpr_k
from .scanchain import (
    decode_transcript,
    format_transcript,
    parse_transcript,
    scan_watermark_test,
)
from .verify import (
    FsmOracle,
    format_package,
    format_secret,
    informed_attack,
    parse_package,
    parse_secret,
    watermark_test,
)

DEFAULT_KEY_SEED = 2718
DEFAULT_SETTING_SEED = 31415


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def _load_machine(path: str, fmt: str = "auto"):
    text = _read(path)
    if fmt == "kiss2" or (fmt == "auto" and not text.lstrip().startswith("{")):
        return parse_kiss2(text)
    return parse_fsm(text)


def _load_graph_or_machine(path: str):
    """Accept a graph document directly or extract one from a machine."""
    text = _read(path)
    if text.lstrip().startswith("{") and '"vertices"' in text:
        return parse_graph(text)
    if text.lstrip().startswith("{"):
        return connectivity_graph(parse_fsm(text))
    return connectivity_graph(parse_kiss2(text))


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fsmwm",
        description="Behavioral watermarking toolkit for finite-state machines.",
    )
    parser.add_argument(
        "--config",
        help="JSON file of option defaults; explicit flags take precedence",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)
    sps = {}

    def cmd(name, **kw):
        sp = sub.add_parser(name, **kw)
        sps[name] = sp
        return sp

    sp = cmd("extract-cg", help="connectivity graph of a machine")
    sp.add_argument("machine")
    sp.add_argument("-o", "--out", default="-")
    sp.add_argument("--format", choices=["auto", "json", "kiss2"], default="auto")

    sp = cmd("lpr", help="sized linear reduction of a host")
    sp.add_argument("source", help="machine or graph document")
    sp.add_argument("-m", "--size", type=int, required=True)
    sp.add_argument("-o", "--out", default="-")
    sp.add_argument("--as-machine", action="store_true",
                    help="emit the walking machine instead of the graph")

    sp = cmd("lprk", help="multi-branch reduction of a host")
    sp.add_argument("source")
    sp.add_argument("-n", "--rows", type=int, required=True)
    sp.add_argument("-k", "--branches", type=int, required=True)
    sp.add_argument("-z", "--width", type=int, default=0,
                    help="renumbering bit width; 0 picks the smallest collision-free")
    sp.add_argument("-o", "--out", default="-")

    sp = cmd("encrypt-matrix", help="conceal a linear reduction behind a key")
    sp.add_argument("graph", help="linear reduction graph document")
    sp.add_argument("--seed", type=int, default=DEFAULT_KEY_SEED)
    sp.add_argument("--key", help="existing key file to use instead of the seed")
    sp.add_argument("--out-machine", default="-")
    sp.add_argument("--out-key", help="where to save the generated key")

    sp = cmd("build-decrypt", help="verifier machine for a concealed reduction")
    sp.add_argument("graph")
    sp.add_argument("--key", required=True)
    sp.add_argument("-o", "--out", default="-")

    sp = cmd("decompose", help="cascade decomposition of a reduction")
    sp.add_argument("machine", help="multi-branch reduction document")
    sp.add_argument("--mode", choices=["fixed", "optimal"], default="fixed")
    sp.add_argument("-n", "--rows", type=int, help="rows (fixed mode)")
    sp.add_argument("-k", "--branches", type=int, help="branches (fixed mode)")
    sp.add_argument("--cap", type=int, default=12,
                    help="state cap for the exhaustive lattice search")
    sp.add_argument("--out-pi-i", default="pi_i.txt")
    sp.add_argument("--out-pi-d", default="pi_d.txt")
    sp.add_argument("--out-front", default="front.json")
    sp.add_argument("--out-back", default="back.json")

    sp = cmd("emit-package", help="build the distributable bundle pair")
    sp.add_argument("host")
    sp.add_argument("--mode", choices=["matrix", "fixed", "optimal"],
                    required=True)
    sp.add_argument("-m", "--size", type=int, help="reduction length (matrix)")
    sp.add_argument("-n", "--rows", type=int)
    sp.add_argument("-k", "--branches", type=int)
    sp.add_argument("-z", "--width", type=int, default=0)
    sp.add_argument("--key-seed", type=int, default=DEFAULT_KEY_SEED)
    sp.add_argument("--cap", type=int, default=12)
    sp.add_argument("--omega", type=int, help="state-field width override")
    sp.add_argument("--out-package", default="package.json")
    sp.add_argument("--out-secret", default="secret.json")
    sp.add_argument("--out-key", help="key file (matrix mode)")

    sp = cmd("verify", help="run the watermark verification protocol")
    sp.add_argument("--package", required=True)
    sp.add_argument("--secret", required=True)
    sp.add_argument("--branch", type=int, default=0)
    sp.add_argument("--length", type=int, required=True)

    sp = cmd("scan-test", help="drive a machine over the serial test port")
    sp.add_argument("machine")
    sp.add_argument("--chi", type=int, required=True)
    sp.add_argument("--omega", type=int, required=True)
    sp.add_argument("--branch", type=int, default=0)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--seed", type=int, default=DEFAULT_SETTING_SEED)
    sp.add_argument("--setting", type=int, help="fixed session setting")
    sp.add_argument("-o", "--out", default="-")

    sp = cmd("decode-scan", help="recover the payload from a serial log")
    sp.add_argument("transcript")

    sp = cmd("attack", help="reconstruct a branch machine from probing")
    sp.add_argument("machine")
    sp.add_argument("--chi", type=int, required=True)
    sp.add_argument("-o", "--out", default="-")

    sp = cmd("validate-partitions", help="check a decomposition pair")
    sp.add_argument("machine")
    sp.add_argument("--pi-i", required=True)
    sp.add_argument("--pi-d", required=True)

    return parser, sps


def _merge_config(parser, sps, argv):
    probe, _ = parser.parse_known_args(argv)
    if not getattr(probe, "config", None):
        return parser.parse_args(argv)
    with open(probe.config, "r", encoding="utf-8") as f:
        config = json.load(f)
    if not isinstance(config, dict):
        raise FsmwmError("config file must hold a JSON object")
    sp = sps.get(probe.cmd)
    if sp is not None:
        dests = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in config.items() if k in dests})
    return parser.parse_args(argv)


def _run(args) -> int:
    if args.cmd == "extract-cg":
        m = _load_machine(args.machine, args.format)
        _write(args.out, format_graph(connectivity_graph(m)))
    elif args.cmd == "lpr":
        g = _load_graph_or_machine(args.source)
        reduced = lpr(g, args.size)
        out = format_fsm(standard_cg_machine(reduced)) if args.as_machine \
            else format_graph(reduced)
        _write(args.out, out)
    elif args.cmd == "lprk":
        g = _load_graph_or_machine(args.source)
        z = args.width or find_branch_width(args.rows, args.branches)
        m = lpr_k(g, LprkSpec(n=args.rows, k=args.branches, z=z))
        _write(args.out, format_fsm(m))
    elif args.cmd == "encrypt-matrix":
        g = parse_graph(_read(args.graph))
        key = parse_key(_read(args.key)) if args.key else \
            random_perm_key(len(g.vertices), args.seed)
        _write(args.out_machine, format_fsm(build_watermark_machine(key, g)))
        if args.out_key:
            _write(args.out_key, format_key(key))
    elif args.cmd == "build-decrypt":
        g = parse_graph(_read(args.graph))
        key = parse_key(_read(args.key))
        _write(args.out, format_fsm(build_decryption_machine(key, g)))
    elif args.cmd == "decompose":
        m = _load_machine(args.machine, "json")
        if args.mode == "fixed":
            if args.rows is None or args.branches is None:
                raise FsmwmError("fixed mode needs --rows and --branches")
            pair = fixed_partitions_lprk(m, args.rows, args.branches)
        else:
            pair = minimal_decomposition(m, cap=args.cap)
        _write(args.out_pi_i, format_partition(pair.pi_i))
        _write(args.out_pi_d, format_partition(pair.pi_d))
        _write(args.out_front, format_fsm(build_independent(m, pair.pi_i)))
        _write(args.out_back, format_fsm(build_dependent(m, pair)))
    elif args.cmd == "emit-package":
        host = _load_machine(args.host)
        if args.mode == "matrix":
            if args.size is None:
                raise FsmwmError("matrix mode needs --size")
            package, secret, key = build_matrix_bundle(
                host, args.size, args.key_seed, omega=args.omega)
            if args.out_key:
                _write(args.out_key, format_key(key))
        else:
            if args.rows is None or args.branches is None:
                raise FsmwmError("decomposition modes need --rows and --branches")
            package, secret = build_decomp_bundle(
                host, args.rows, args.branches, mode=args.mode,
                z=args.width or None, cap=args.cap, omega=args.omega)
        _write(args.out_package, format_package(package))
        _write(args.out_secret, format_secret(secret))
    elif args.cmd == "verify":
        package = parse_package(_read(args.package))
        secret = parse_secret(_read(args.secret))
        verdict = watermark_test(package, secret, args.branch, args.length)
        sys.stdout.write(verdict.report())
        return 0 if verdict.passed else 1
    elif args.cmd == "scan-test":
        m = _load_machine(args.machine, "json")
        t = scan_watermark_test(m, args.chi, args.omega, args.branch,
                                args.seed, args.steps, setting=args.setting)
        _write(args.out, format_transcript(t))
    elif args.cmd == "decode-scan":
        t = parse_transcript(_read(args.transcript))
        setting, payload = decode_transcript(t)
        print(f"setting {setting}")
        for state, value in payload:
            print(f"{state} {value}")
    elif args.cmd == "attack":
        m = _load_machine(args.machine, "json")
        oracle = FsmOracle(m, args.chi)
        rebuilt = informed_attack(oracle, args.chi)
        _write(args.out, format_fsm(rebuilt))
        print(f"resets {oracle.resets} steps {oracle.steps}", file=sys.stderr)
    elif args.cmd == "validate-partitions":
        m = _load_machine(args.machine, "json")
        pi_i = parse_partition(_read(args.pi_i))
        pi_d = parse_partition(_read(args.pi_d))
        checks = [
            ("pi_i input-preserving", is_input_preserving(m, pi_i)),
            ("pi_d input-preserving", is_input_preserving(m, pi_d)),
            ("orthogonal", is_orthogonal(pi_i, pi_d)),
        ]
        ok = all(v for _, v in checks)
        for name, v in checks:
            print(f"{name}: {'yes' if v else 'no'}")
        return 0 if ok else 1
    return 0


def main(argv=None) -> int:
    parser, sps = _build_parser()
    try:
        args = _merge_config(parser, sps, argv)
        return _run(args)
    except CapExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (FsmwmError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
