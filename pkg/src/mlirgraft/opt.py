"""Opt-style command line for the reference target: flags, then one input file.

Exit code 0 on success, 1 with diagnostics on stderr otherwise.
"""

from __future__ import annotations

import sys

from .reference import reference_validate


def main(argv=None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    if not args or args[-1].startswith("--"):
        sys.stderr.write("usage: python -m mlirgraft.opt [--pass[=option] ...] FILE\n")
        return 2
    *flags, path = args
    with open(path, "rb") as fh:
        data = fh.read()
    verdict = reference_validate(data, flags)
    sys.stderr.write(verdict.stderr)
    return verdict.exit_code


if __name__ == "__main__":
    sys.exit(main())
