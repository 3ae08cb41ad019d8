"""Chess engine toolkit.

Rules kernel, board-plane encoders, WDL value-head math, network scaling
arithmetic, pluggable evaluators, PUCT tree search, channel attribution,
an Elo match arena, and a UCI front end.
"""

__version__ = "0.1.0"
