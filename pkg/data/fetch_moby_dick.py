"""Download the Moby Dick word-frequency corpus used by acceptance criterion 7.

Usage::

    python3 data/fetch_moby_dick.py [--url URL] [--sha256 HEX]

The file holds one word frequency per line and is saved next to this script
as ``moby_dick_words.txt``. Its SHA-256 is printed; pass ``--sha256`` to
verify against a known digest. The test suite never needs network access:
criterion 7 is skipped when the file is absent. Set ``HEAVYTAIL_MOBY_DICK``
to point the suite at a copy stored elsewhere.
"""

import argparse
import hashlib
import sys
import urllib.request
from pathlib import Path

DEFAULT_URL = "https://aaronclauset.github.io/powerlaws/data/words.txt"
TARGET = Path(__file__).with_name("moby_dick_words.txt")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--url", default=DEFAULT_URL)
    ap.add_argument("--sha256", default=None, help="expected digest; abort on mismatch")
    args = ap.parse_args(argv)

    with urllib.request.urlopen(args.url, timeout=60) as resp:
        payload = resp.read()
    digest = hashlib.sha256(payload).hexdigest()
    if args.sha256 and digest != args.sha256.lower():
        print(f"checksum mismatch: got {digest}, expected {args.sha256}", file=sys.stderr)
        return 2
    TARGET.write_bytes(payload)
    print(f"wrote {TARGET} ({len(payload)} bytes) sha256={digest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
