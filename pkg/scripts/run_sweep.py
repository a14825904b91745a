#!/usr/bin/env python3
"""Run the full verification sweep with default parameters.

Equivalent to `lecert sweep --c0 4 --tau 2^-10`; kept as a script so the
headline computation is one command from a fresh checkout.
"""

import sys

from lecert.cli import main

if __name__ == "__main__":
    sys.exit(main(["sweep", "--c0", "4", "--tau", "2^-10"] + sys.argv[1:]))
