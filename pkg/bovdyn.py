"""
bovdyn: dinámica de funciones meromorfas con valor omitido de Baker.

    python bovdyn.py repro ex43
    python bovdyn.py render --map 'lambda/(exp(z)+z)' --param lambda=0.04 --window=0,0,6,6 --res 512
"""

import sys

from src.cli.app import main

if __name__ == "__main__":
    sys.exit(main())
