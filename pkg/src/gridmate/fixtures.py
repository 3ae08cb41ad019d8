"""Curated reference positions.

OPPOSITE_COLOR_BISHOP_FENS is a suite of real endgames where each side
has exactly one bishop and the two bishops stand on different-colored
squares; the V2 encoder's opposite-color-bishops plane is all ones on
every entry.  They also make handy evaluator probes: most are drawn
despite a material or positional edge.
"""

OPPOSITE_COLOR_BISHOP_FENS = (
    "8/2k1b3/2P5/3KP2B/8/8/8/8 w - - 0 56",
    "8/3k4/8/2pK4/8/4b1p1/8/5B2 w - - 0 56",
    "5k2/8/8/7p/1b1p4/8/B7/5K2 b - - 0 56",
    "8/2b1k3/8/1B1PP3/3K4/8/8/8 w - - 0 56",
    "8/2k5/4Bp2/2b1p1p1/4K2p/7P/8/8 b - - 0 56",
    "8/8/8/5B2/1p3b2/2k1p3/8/5K2 w - - 0 56",
    "8/3k4/p2P4/2P4p/2bB4/P6P/5K2/8 w - - 0 56",
    "7b/4k2P/6K1/2p2P2/7P/1B6/8/8 b - - 0 56",
    "4k2b/7P/5PK1/7P/8/1B6/8/8 w - - 0 56",
    "8/5pK1/4k3/6B1/5PbP/6P1/8/8 b - - 0 56",
    "2r3k1/5ppp/p7/5q2/3P4/b2B2P1/P1R2P1P/5QK1 b - - 0 56",
    "5k2/5pp1/p6p/5B2/3P4/6P1/P3KP1P/2b5 w - - 0 56",
    "3b4/p4B1p/8/6k1/6P1/8/1P3PK1/8 w - - 0 56",
    "6B1/4b3/7p/3Pk2P/6PP/7K/8/8 w - - 0 56",
    "8/8/8/7p/2p5/5K1k/2Bb4/8 w - - 0 56",
    "3R4/4BK1k/r5p1/2P2bP1/8/8/8/8 w - - 0 56",
    "8/2k1b3/2P5/3K1P1B/8/8/8/8 w - - 0 56",
    "3k1b2/8/3PP3/1B1K4/8/8/8/8 w - - 0 56",
    "8/2k5/2P1K3/6p1/5p2/2b2B1P/6P1/8 b - - 0 56",
    "8/8/4b1p1/2Bp3p/5P1P/1pK1Pk2/8/8 b - - 0 56",
)
