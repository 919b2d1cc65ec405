"""Command-line front end: build an index from a stream, then query it.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 malformed index.
"""

import argparse
import json
import sys
import time

from .errors import EmptyPatternError, FormatError, OespError, RangeError
from .index import IndexConfig, OespIndex

_CHUNK = 64 * 1024


class _UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageExit(message)


def decode_pattern(text):
    r"""Pattern argument to bytes; \xNN escapes arbitrary bytes, \\ a backslash."""
    out = bytearray()
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            if nxt == "x" and i + 3 < len(text):
                try:
                    out.append(int(text[i + 2:i + 4], 16))
                except ValueError:
                    raise _UsageExit(f"bad \\x escape at offset {i}")
                i += 4
                continue
            if nxt == "\\":
                out.append(0x5C)
                i += 2
                continue
            raise _UsageExit(f"unknown escape \\{nxt}")
        code = ord(c)
        if code > 255:
            raise _UsageExit(f"character {c!r} is not a byte; use \\xNN")
        out.append(code)
        i += 1
    return bytes(out)


def _build_argparser():
    ap = _Parser(prog="oesp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    b = sub.add_parser("build", help="index a text stream")
    b.add_argument("--input", "-i", default="-",
                   help="input file, or - for standard input")
    b.add_argument("--index", "-x", required=True, help="output index path")
    b.add_argument("--alpha", type=float, default=0.8,
                   help="reverse-dictionary load factor (default 0.8)")
    b.add_argument("--verbose", action="store_true")

    for verb, need_pattern in (("count", True), ("locate", True),
                               ("extract", False), ("stats", False)):
        q = sub.add_parser(verb)
        q.add_argument("--index", "-x", required=True, help="index file")
        if need_pattern:
            q.add_argument("--pattern", "-p", required=True,
                           help=r"pattern bytes; \xNN escapes non-printables")
        if verb == "extract":
            q.add_argument("--begin", type=int, required=True)
            q.add_argument("--end", type=int, required=True)
        if verb == "stats":
            q.add_argument("--stats-json", action="store_true",
                           help="machine-readable single JSON object")

    s = sub.add_parser("selftest", help="run the embedded property checks")
    s.add_argument("--cases", type=int, default=40)
    return ap


def _run_build(args):
    t0 = time.time()
    cfg = IndexConfig(load_factor=args.alpha)
    idx = OespIndex(cfg)
    try:
        if args.input == "-":
            stream = sys.stdin.buffer
            while True:
                chunk = stream.read(_CHUNK)
                if not chunk:
                    break
                idx.append_bytes(chunk)
        else:
            with open(args.input, "rb") as fh:
                while True:
                    chunk = fh.read(_CHUNK)
                    if not chunk:
                        break
                    idx.append_bytes(chunk)
    except OSError as exc:
        print(f"oesp: cannot read input: {exc}", file=sys.stderr)
        return 2
    if idx.text_length == 0:
        print("oesp: empty input", file=sys.stderr)
        return 2
    idx.finalize()
    try:
        idx.save(args.index)
    except OSError as exc:
        print(f"oesp: cannot write index: {exc}", file=sys.stderr)
        return 2
    st = idx.stats()
    print(f"oesp: N={st['text_length']} n={st['rules']} "
          f"tree_bits={st['tree_bits']} index_bytes={st['index_bytes']} "
          f"elapsed={time.time() - t0:.2f}s", file=sys.stderr)
    if args.verbose:
        print(f"oesp: parse_levels={st.get('parse_levels')} "
              f"max_level_fill={st.get('max_level_fill')}", file=sys.stderr)
    return 0


def _load_index(path):
    try:
        with open(path, "rb") as fh:
            return OespIndex.load(fh)
    except OSError as exc:
        print(f"oesp: cannot read index: {exc}", file=sys.stderr)
        sys.exit(2)
    except FormatError as exc:
        print(f"oesp: malformed index: {exc}", file=sys.stderr)
        sys.exit(3)


def _run_query(args):
    idx = _load_index(args.index)
    if args.verb == "count":
        pattern = decode_pattern(args.pattern)
        try:
            print(idx.count(pattern))
        except EmptyPatternError:
            raise _UsageExit("pattern must not be empty")
        return 0
    if args.verb == "locate":
        pattern = decode_pattern(args.pattern)
        try:
            for pos in idx.locate(pattern):
                print(pos)
        except EmptyPatternError:
            raise _UsageExit("pattern must not be empty")
        return 0
    if args.verb == "extract":
        try:
            data = idx.extract(args.begin, args.end)
        except RangeError as exc:
            raise _UsageExit(str(exc))
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return 0
    if args.verb == "stats":
        st = idx.stats()
        st.pop("parse_levels", None)
        st.pop("max_level_fill", None)
        if args.stats_json:
            print(json.dumps(st, sort_keys=True))
        else:
            for key in sorted(st):
                print(f"{key}: {st[key]}")
        return 0
    raise _UsageExit(f"unknown verb {args.verb}")


def _run_selftest(args):
    import random

    rng = random.Random(0xE5B)
    failures = 0
    for case in range(args.cases):
        n = rng.randint(1, 300)
        sigma = rng.choice([2, 4, 26, 256])
        text = bytes(rng.randrange(sigma) for _ in range(n))
        idx = OespIndex.build(text)
        if idx.extract(0, n - 1) != text:
            failures += 1
            print(f"selftest: extract round-trip failed (case {case})",
                  file=sys.stderr)
            continue
        if OespIndex.load(idx.to_bytes()).to_bytes() != idx.to_bytes():
            failures += 1
            print(f"selftest: serialization round-trip failed (case {case})",
                  file=sys.stderr)
            continue
        for _ in range(6):
            m = rng.randint(1, min(16, n))
            if rng.random() < 0.6:
                start = rng.randrange(n - m + 1)
                pattern = text[start:start + m]
            else:
                pattern = bytes(rng.randrange(sigma) for _ in range(m))
            naive = [i for i in range(n - m + 1) if text[i:i + m] == pattern]
            if idx.locate(pattern) != naive:
                failures += 1
                print(f"selftest: locate mismatch (case {case}, "
                      f"pattern {pattern!r})", file=sys.stderr)
                break
    if failures:
        print(f"selftest: {failures} failures / {args.cases} cases",
              file=sys.stderr)
        return 1
    print(f"selftest: {args.cases} cases ok")
    return 0


def main(argv=None):
    ap = _build_argparser()
    try:
        args = ap.parse_args(argv)
        if args.verb == "build":
            code = _run_build(args)
        elif args.verb == "selftest":
            code = _run_selftest(args)
        else:
            code = _run_query(args)
    except _UsageExit as exc:
        print(f"oesp: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    return code


if __name__ == "__main__":
    sys.exit(main())
