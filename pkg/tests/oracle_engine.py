"""Independent chess oracle used only by the tests.

Deliberately written in a different style from the package under test: a
64-cell mailbox array with (file, rank) coordinate math and make/unmake
legality filtering.  No bitboards, no pin analysis, no shared code.  Slow
but simple enough to trust as a second opinion.

Also carries a small SAN reader so written PGN movetext can be replayed
through this engine rather than through the code that produced it.
"""

import re

FILES = "abcdefgh"

KNIGHT_STEPS = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
KING_STEPS = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
BISHOP_DIRS = [(1, 1), (-1, 1), (1, -1), (-1, -1)]
ROOK_DIRS = [(1, 0), (-1, 0), (0, 1), (0, -1)]


def name_of(f, r):
    return FILES[f] + str(r + 1)


def coords_of(name):
    return FILES.index(name[0]), int(name[1]) - 1


class OracleBoard:
    """Mailbox chess position driven entirely by FEN text."""

    def __init__(self, fen):
        fields = fen.split()
        self.cells = {}
        for i, row in enumerate(fields[0].split("/")):
            r = 7 - i
            f = 0
            for ch in row:
                if ch.isdigit():
                    f += int(ch)
                else:
                    self.cells[(f, r)] = ch
                    f += 1
        self.white_to_move = fields[1] == "w"
        self.castling = "" if fields[2] == "-" else fields[2]
        self.ep = None if fields[3] == "-" else coords_of(fields[3])
        self.halfmove = int(fields[4]) if len(fields) > 4 else 0
        self.fullmove = int(fields[5]) if len(fields) > 5 else 1

    def copy(self):
        out = OracleBoard.__new__(OracleBoard)
        out.cells = dict(self.cells)
        out.white_to_move = self.white_to_move
        out.castling = self.castling
        out.ep = self.ep
        out.halfmove = self.halfmove
        out.fullmove = self.fullmove
        return out

    def own(self, piece):
        return piece.isupper() == self.white_to_move

    def king_pos(self, white):
        target = "K" if white else "k"
        for pos, piece in self.cells.items():
            if piece == target:
                return pos
        raise ValueError("missing king")

    def attacked(self, pos, by_white):
        """Can any piece of the given color capture onto `pos`?"""
        f, r = pos
        dr = -1 if by_white else 1
        pawn = "P" if by_white else "p"
        for df in (-1, 1):
            if self.cells.get((f + df, r + dr)) == pawn:
                return True
        for steps, piece in ((KNIGHT_STEPS, "N"), (KING_STEPS, "K")):
            want = piece if by_white else piece.lower()
            for df, dr2 in steps:
                if self.cells.get((f + df, r + dr2)) == want:
                    return True
        for dirs, letters in ((BISHOP_DIRS, "BQ"), (ROOK_DIRS, "RQ")):
            want = letters if by_white else letters.lower()
            for df, dr2 in dirs:
                nf, nr = f + df, r + dr2
                while 0 <= nf < 8 and 0 <= nr < 8:
                    piece = self.cells.get((nf, nr))
                    if piece is not None:
                        if piece in want:
                            return True
                        break
                    nf += df
                    nr += dr2
        return False

    def pseudo_moves(self):
        """(from, to, promo, flag) tuples where flag is '', 'ep' or 'castle'."""
        out = []
        white = self.white_to_move
        for (f, r), piece in list(self.cells.items()):
            if not self.own(piece):
                continue
            kind = piece.upper()
            if kind == "P":
                ahead = 1 if white else -1
                start = 1 if white else 6
                last = 7 if white else 0
                if (f, r + ahead) not in self.cells:
                    out.extend(self._pawn_targets((f, r), (f, r + ahead), last))
                    if r == start and (f, r + 2 * ahead) not in self.cells:
                        out.append(((f, r), (f, r + 2 * ahead), None, ""))
                for df in (-1, 1):
                    to = (f + df, r + ahead)
                    if not (0 <= to[0] < 8 and 0 <= to[1] < 8):
                        continue
                    victim = self.cells.get(to)
                    if victim is not None and not self.own(victim):
                        out.extend(self._pawn_targets((f, r), to, last))
                    elif to == self.ep:
                        out.append(((f, r), to, None, "ep"))
            elif kind in ("N", "K"):
                steps = KNIGHT_STEPS if kind == "N" else KING_STEPS
                for df, dr in steps:
                    to = (f + df, r + dr)
                    if not (0 <= to[0] < 8 and 0 <= to[1] < 8):
                        continue
                    victim = self.cells.get(to)
                    if victim is None or not self.own(victim):
                        out.append(((f, r), to, None, ""))
            else:
                dirs = []
                if kind in ("B", "Q"):
                    dirs += BISHOP_DIRS
                if kind in ("R", "Q"):
                    dirs += ROOK_DIRS
                for df, dr in dirs:
                    nf, nr = f + df, r + dr
                    while 0 <= nf < 8 and 0 <= nr < 8:
                        victim = self.cells.get((nf, nr))
                        if victim is None:
                            out.append(((f, r), (nf, nr), None, ""))
                        else:
                            if not self.own(victim):
                                out.append(((f, r), (nf, nr), None, ""))
                            break
                        nf += df
                        nr += dr
        out.extend(self._castle_moves())
        return out

    def _pawn_targets(self, frm, to, last_rank):
        if to[1] == last_rank:
            return [(frm, to, promo, "") for promo in "nbrq"]
        return [(frm, to, None, "")]

    def _castle_moves(self):
        out = []
        white = self.white_to_move
        rank = 0 if white else 7
        king = (4, rank)
        if self.cells.get(king) != ("K" if white else "k"):
            return out
        if self.attacked(king, not white):
            return out
        rights = self.castling
        if ("K" if white else "k") in rights:
            if (self.cells.get((7, rank)) == ("R" if white else "r")
                    and (5, rank) not in self.cells and (6, rank) not in self.cells
                    and not self.attacked((5, rank), not white)
                    and not self.attacked((6, rank), not white)):
                out.append((king, (6, rank), None, "castle"))
        if ("Q" if white else "q") in rights:
            # b1/b8 may be attacked; only the king's path matters
            if (self.cells.get((0, rank)) == ("R" if white else "r")
                    and all((f, rank) not in self.cells for f in (1, 2, 3))
                    and not self.attacked((3, rank), not white)
                    and not self.attacked((2, rank), not white)):
                out.append((king, (2, rank), None, "castle"))
        return out

    def make(self, move):
        frm, to, promo, flag = move
        out = self.copy()
        piece = out.cells.pop(frm)
        captured = out.cells.pop(to, None)
        out.cells[to] = (promo.upper() if piece.isupper() else promo) if promo else piece
        if flag == "ep":
            out.cells.pop((to[0], frm[1]))
            captured = "pawn"
        if flag == "castle":
            rank = frm[1]
            if to[0] == 6:
                rook = out.cells.pop((7, rank))
                out.cells[(5, rank)] = rook
            else:
                rook = out.cells.pop((0, rank))
                out.cells[(3, rank)] = rook
        drop = ""
        if piece == "K":
            drop += "KQ"
        if piece == "k":
            drop += "kq"
        for sq, ch in (((0, 0), "Q"), ((7, 0), "K"), ((0, 7), "q"), ((7, 7), "k")):
            if frm == sq or to == sq:
                drop += ch
        out.castling = "".join(c for c in out.castling if c not in drop)
        out.ep = None
        if piece.upper() == "P" and abs(to[1] - frm[1]) == 2:
            out.ep = (frm[0], (frm[1] + to[1]) // 2)
        if piece.upper() == "P" or captured is not None:
            out.halfmove = 0
        else:
            out.halfmove += 1
        if not self.white_to_move:
            out.fullmove += 1
        out.white_to_move = not self.white_to_move
        return out

    def legal_moves(self):
        """Set of legal moves in long algebraic text (e2e4, e7e8q)."""
        out = set()
        for move in self.pseudo_moves():
            child = self.make(move)
            if not child.attacked(child.king_pos(self.white_to_move),
                                  child.white_to_move):
                frm, to, promo, _ = move
                out.add(name_of(*frm) + name_of(*to) + (promo or ""))
        return out

    def in_check(self):
        return self.attacked(self.king_pos(self.white_to_move),
                             not self.white_to_move)

    def play_uci(self, text):
        frm = coords_of(text[:2])
        to = coords_of(text[2:4])
        promo = text[4] if len(text) == 5 else None
        for move in self.pseudo_moves():
            if move[0] == frm and move[1] == to and move[2] == promo:
                return self.make(move)
        raise ValueError(f"oracle: no pseudo move {text}")


SAN_BODY = re.compile(
    r"^(?P<piece>[KQRBN]?)(?P<disambig>[a-h]?[1-8]?)(?P<capture>x?)"
    r"(?P<target>[a-h][1-8])(?:=(?P<promo>[QRBN]))?$"
)


def san_to_uci(board, san):
    """Resolve SAN text against the oracle's legal moves; returns uci text."""
    text = san.rstrip("+#!?")
    if text in ("O-O", "0-0"):
        rank = "1" if board.white_to_move else "8"
        return "e" + rank + "g" + rank
    if text in ("O-O-O", "0-0-0"):
        rank = "1" if board.white_to_move else "8"
        return "e" + rank + "c" + rank
    m = SAN_BODY.match(text)
    if not m:
        raise ValueError(f"oracle: bad SAN {san!r}")
    piece = m.group("piece") or "P"
    promo = (m.group("promo") or "").lower()
    target = m.group("target")
    disambig = m.group("disambig")
    matches = []
    for uci in sorted(board.legal_moves()):
        if uci[2:4] != target:
            continue
        if (uci[4:] or "") != promo:
            continue
        mover = board.cells[coords_of(uci[:2])].upper()
        if mover != piece:
            continue
        if disambig and not all(c in uci[:2] for c in disambig):
            continue
        matches.append(uci)
    if len(matches) != 1:
        raise ValueError(f"oracle: SAN {san!r} matched {matches}")
    return matches[0]
