"""Command line front end.

Subcommands: keygen, encrypt, decrypt, analyze, attack.  All randomness
flows through --entropy, which is either "system" (os.urandom) or
"fixed:<hex>"; with a fixed source, identical invocations produce
byte-identical output files.  Existing output files are never overwritten
without --force.

Exit codes:
    0  success
    2  usage error (bad flags; nothing was read or written)
    3  file I/O failure
    4  invalid input format (key file, entropy exhausted, bad parameters)
    5  container integrity failure (bad magic, truncation, sentinel
       mismatch, length mismatch; corruption and wrong keys look alike)
    6  refused to overwrite an existing output file
    7  brute-force space exceeds the configured cap
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import analysis, attacks, framing, keyspace
from .cipher import cipher_init
from .keyspace import EntropyExhausted, FixedEntropy, KeyFormatError, SystemEntropy

EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_INTEGRITY = 5
EXIT_EXISTS = 6
EXIT_SPACE = 7


class _Refusal(Exception):
    pass


def _entropy_arg(text: str):
    if text == "system":
        return SystemEntropy()
    if text.startswith("fixed:"):
        try:
            return FixedEntropy(bytes.fromhex(text[len("fixed:"):]))
        except ValueError:
            raise argparse.ArgumentTypeError("fixed entropy must be hex digits") from None
    raise argparse.ArgumentTypeError("entropy must be 'system' or 'fixed:<hex>'")


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _write(path: str, data: bytes, force: bool) -> None:
    p = Path(path)
    if p.exists() and not force:
        raise _Refusal(f"{path} exists; pass --force to overwrite")
    p.write_bytes(data)


def _load_key(path: str) -> keyspace.CipherKey:
    return keyspace.parse_key(_read(path))


def _write_csv(path: str, header: list[str], rows, force: bool) -> None:
    p = Path(path)
    if p.exists() and not force:
        raise _Refusal(f"{path} exists; pass --force to overwrite")
    with p.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _verdict(label: str, ok: bool, detail: str) -> None:
    print(f"{label}: {'PASS' if ok else 'FAIL'} ({detail})")


def cmd_keygen(args) -> int:
    key = keyspace.keygen(args.m, args.k, args.rounds, args.dummy, args.entropy,
                          xprime_mode=args.xprime_mode)
    _write(args.out, keyspace.serialize_key(key), args.force)
    print(f"wrote {args.out}: m={key.m} k={key.k} rounds={key.rounds} "
          f"mode={key.xprime_mode} D={key.dummy_len}")
    return 0


def cmd_encrypt(args) -> int:
    key = _load_key(args.key)
    blob = framing.seal(key, _read(args.infile), args.entropy)
    _write(args.out, blob, args.force)
    print(f"wrote {args.out}: {len(blob)} bytes")
    return 0


def cmd_decrypt(args) -> int:
    key = _load_key(args.key)
    plain = framing.open_container(key, _read(args.infile))
    _write(args.out, plain, args.force)
    print(f"wrote {args.out}: {len(plain)} bytes")
    return 0


def cmd_analyze(args) -> int:
    if args.mode == "table":
        table = analysis.combiner_table()
        print(" x  x'  P  y  C  y==C")
        for r in table.rows:
            print(f" {r.x}   {r.xprime}  {r.p}  {r.y}  {r.c}   {r.leak}")
        print("balance: " + "  ".join(f"{b:.0f}%" for b in table.balance_percent))
        return 0

    data = _read(args.infile)
    if args.mode == "entropy":
        words = framing.pack_words(data, args.m)
        profile = analysis.entropy_profile(words, args.slots, args.m)
        if args.csv:
            rows = ((i, f"{v:.6f}") for i, v in enumerate(profile.cumulative))
            _write_csv(args.csv, ["slot_index", "cumulative_bits"], rows, args.force)
        _verdict("entropy-linear", profile.r_squared >= analysis.R2_LINEAR_MIN,
                 f"H_total={profile.h_total:.4f} bits, r^2={profile.r_squared:.6f}, "
                 f"threshold {analysis.R2_LINEAR_MIN}")
    elif args.mode == "flatness":
        flat = analysis.byte_flatness(data)
        if args.csv:
            rows = ((b, int(c)) for b, c in enumerate(flat.counts))
            _write_csv(args.csv, ["byte", "count"], rows, args.force)
        ratio = "inf" if flat.ratio == float("inf") else f"{flat.ratio:.4f}"
        _verdict("byte-flat", flat.max_deviation <= analysis.FLATNESS_MAX_DEV,
                 f"max_dev={flat.max_deviation:.4%}, max/min={ratio}, "
                 f"chi2={flat.chi_square:.1f} (informational), "
                 f"threshold {analysis.FLATNESS_MAX_DEV:.0%}")
    elif args.mode == "complexity":
        ratio = analysis.huffman_ratio(data)
        _verdict("incompressible", ratio <= analysis.INCOMPRESSIBLE_MAX_RATIO,
                 f"huffman_ratio={ratio:.4f}, threshold {analysis.INCOMPRESSIBLE_MAX_RATIO}")
    elif args.mode == "phase":
        words = framing.pack_words(data, args.m)
        occ = analysis.phase_occupancy(words, args.grid, args.m)
        if args.csv:
            _write_csv(args.csv, ["cell_x", "cell_y", "count"],
                       analysis.phase_cells(words, args.grid, args.m), args.force)
        _verdict("space-filling", occ >= analysis.OCCUPANCY_MIN,
                 f"occupancy={occ:.4f} at grid {args.grid}, "
                 f"threshold {analysis.OCCUPANCY_MIN}")
    return 0


def cmd_attack(args) -> int:
    if args.attack_mode == "brute":
        space = attacks.SearchSpace(m=args.m, k=args.k, xprime_mode=args.mode)
        plain = framing.deserialize_words(_read(args.known), args.m)
        cipher = framing.deserialize_words(_read(args.cipher), args.m)
        result = attacks.brute_force(plain, cipher, space,
                                     cap=args.max_space, workers=args.workers)
        print(f"space: {result.space_size} states enumerated "
              f"(naive two-trajectory bound 2^{result.paper_bound.bit_length() - 1})")
        print(f"attempts: {result.attempts}, elapsed: {result.elapsed:.2f}s, "
              f"candidates: {len(result.candidates)}")
        for c in result.candidates[:16]:
            xp = "-" if c.xprime1 is None else f"{c.xprime1:x}"
            print(f"  lambda={c.lam:x} x1={c.x1:x} xprime1={xp}")
        if args.csv:
            rows = [(f"{c.lam:x}", f"{c.x1:x}",
                     "" if c.xprime1 is None else f"{c.xprime1:x}")
                    for c in result.candidates]
            _write_csv(args.csv, ["lambda", "x1", "xprime1"], rows, args.force)
        return 0

    if args.attack_mode == "scan":
        plain = framing.deserialize_words(_read(args.plain), args.m)
        cipher = framing.deserialize_words(_read(args.cipher), args.m)
        scan = attacks.zero_pn_scan(plain, cipher)
        print(f"zero-keystream positions: {scan.count} of {scan.total} "
              f"(rate {scan.rate:.3e}, expected ~{2.0 ** -args.m:.3e})")
        if args.csv:
            _write_csv(args.csv, ["position"], ((p,) for p in scan.positions), args.force)
        return 0

    # avalanche
    key = _load_key(args.key)
    plain_words = framing.pack_words(_read(args.infile), key.m)
    curves = []
    for trial in range(args.trials):
        session_a = keyspace.draw_session(args.entropy, key.m, key.rounds)
        bit = trial % key.m
        flipped = session_a[0] ^ (1 << bit)
        if flipped == 0:
            flipped = session_a[0] ^ (1 << ((bit + 1) % key.m))
        session_b = [flipped] + session_a[1:]
        curves.append(attacks.divergence(key, session_a, session_b, plain_words))
    n = len(plain_words)
    mean_curve = [sum(c.fractions[i] for c in curves) / len(curves) for i in range(n)]
    tail = mean_curve[16:]
    mean_tail = sum(tail) / len(tail) if tail else 0.0
    print(f"avalanche over {args.trials} trials: mean bit-difference fraction "
          f"beyond word 16 = {mean_tail:.4f}")
    if args.csv:
        rows = ((i, f"{v:.6f}") for i, v in enumerate(mean_curve))
        _write_csv(args.csv, ["word_index", "diff_fraction"], rows, args.force)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaoscipher",
                                     description="chaotic-map stream cipher toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key file")
    p.add_argument("--m", type=int, default=16, help="state word width in bits")
    p.add_argument("--k", type=int, default=16, help="lambda width in bits")
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--dummy", type=int, default=32, help="dummy region length in words")
    p.add_argument("--xprime-mode", choices=["derived", "independent"], default="derived")
    p.add_argument("--entropy", type=_entropy_arg, default="system")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="seal a file into a container")
    p.add_argument("--key", required=True)
    p.add_argument("-i", "--in", dest="infile", required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--entropy", type=_entropy_arg, default="system")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="open a container")
    p.add_argument("--key", required=True)
    p.add_argument("-i", "--in", dest="infile", required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("analyze", help="statistical analyses")
    p.add_argument("mode", choices=["entropy", "flatness", "complexity", "phase", "table"])
    p.add_argument("-i", "--in", dest="infile", help="input file (any bytes)")
    p.add_argument("--m", type=int, default=16, help="word width for word-level metrics")
    p.add_argument("--slots", type=int, default=analysis.DEFAULT_SLOTS)
    p.add_argument("--grid", type=int, default=analysis.DEFAULT_GRID)
    p.add_argument("--csv", help="write curve/histogram points to this CSV file")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("attack", help="cryptanalysis probes")
    asub = p.add_subparsers(dest="attack_mode", required=True)

    b = asub.add_parser("brute", help="known-plaintext exhaustive search")
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--mode", choices=["derived", "independent"], default="derived")
    b.add_argument("--known", required=True, help="known plaintext, serialized words")
    b.add_argument("--cipher", required=True, help="observed ciphertext, serialized words")
    b.add_argument("--max-space", type=int, default=attacks.DEFAULT_SPACE_CAP)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--csv")
    b.add_argument("--force", action="store_true")
    b.set_defaults(func=cmd_attack)

    s = asub.add_parser("scan", help="zero-keystream coincidence scan")
    s.add_argument("--plain", required=True, help="plaintext, serialized words")
    s.add_argument("--cipher", required=True, help="ciphertext, serialized words")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--csv")
    s.add_argument("--force", action="store_true")
    s.set_defaults(func=cmd_attack)

    a = asub.add_parser("avalanche", help="session-flip divergence")
    a.add_argument("--key", required=True)
    a.add_argument("-i", "--in", dest="infile", required=True)
    a.add_argument("--trials", type=int, default=16)
    a.add_argument("--entropy", type=_entropy_arg, default="system")
    a.add_argument("--csv")
    a.add_argument("--force", action="store_true")
    a.set_defaults(func=cmd_attack)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if isinstance(getattr(args, "entropy", None), str):
        args.entropy = _entropy_arg(args.entropy)  # argparse leaves defaults unconverted
    if args.command == "analyze" and args.mode != "table" and not args.infile:
        parser.error("analyze requires --in for every mode except 'table'")
    try:
        return args.func(args)
    except _Refusal as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXISTS
    except attacks.SpaceTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPACE
    except framing.ContainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (KeyFormatError, EntropyExhausted, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
