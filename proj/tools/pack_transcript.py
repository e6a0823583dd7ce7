#!/usr/bin/env python3
"""Pack a readable transcript source into JSONL for the scripted backend.

Source format: a header line starts each record,

    === layer=<n> role=<role> [task=<path>] [error=<kind>]

followed by the raw response text. Inside a response, @json-file(<path>)
is replaced by the JSON string literal of that file (path relative to the
source file), which keeps whole contracts out of hand-escaped JSON.
"""

import argparse
import json
import pathlib
import re
import sys

HEADER = re.compile(r"^=== layer=(\d+) role=(\w+)(?: task=(\S+))?(?: error=(\S+))?\s*$")
INCLUDE = re.compile(r"@json-file\(([^)]+)\)")


def pack(src: pathlib.Path) -> str:
    records = []
    current = None
    body = []

    def flush():
        if current is None:
            return
        lines = list(body)
        while lines and not lines[-1].strip():
            lines.pop()
        text = "\n".join(lines) + "\n" if lines else ""
        text = INCLUDE.sub(lambda m: json.dumps((src.parent / m.group(1)).read_text()), text)
        rec = {"layer": current[0], "role": current[1], "task": current[2], "request_sha256": ""}
        if current[3]:
            rec["error"] = current[3]
        else:
            rec["response"] = text
        records.append(rec)

    for n, line in enumerate(src.read_text().split("\n"), 1):
        m = HEADER.match(line)
        if m:
            flush()
            current = (int(m.group(1)), m.group(2), m.group(3) or "", m.group(4) or "")
            body = []
        elif current is None:
            if line.strip():
                sys.exit(f"{src}:{n}: text before the first record header")
        else:
            body.append(line)
    flush()
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("source", type=pathlib.Path)
    ap.add_argument("-o", "--output", type=pathlib.Path)
    ap.add_argument("--check", action="store_true", help="fail if OUTPUT differs from the packed source")
    args = ap.parse_args()
    packed = pack(args.source)
    if args.check:
        if not args.output:
            ap.error("--check needs --output")
        if args.output.read_text() != packed:
            print(f"{args.output} is stale; re-pack {args.source}", file=sys.stderr)
            return 1
        return 0
    if args.output:
        args.output.write_text(packed)
    else:
        sys.stdout.write(packed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
