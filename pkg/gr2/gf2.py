# gr2/gf2.py
"""Linear algebra over Z/2 with vectors packed into Python ints (bit k = coordinate k)."""


class Gf2Basis:
    """Incremental echelon basis; each row is stored under its highest set bit."""

    __slots__ = ("_rows",)

    def __init__(self, vectors=()):
        self._rows = {}
        for v in vectors:
            self.add(v)

    def reduce(self, v):
        rows = self._rows
        while v:
            top = v.bit_length() - 1
            row = rows.get(top)
            if row is None:
                return v
            v ^= row
        return 0

    def add(self, v):
        """Insert v; return True when the span grew."""
        v = self.reduce(v)
        if not v:
            return False
        self._rows[v.bit_length() - 1] = v
        return True

    def __contains__(self, v):
        return self.reduce(v) == 0

    @property
    def rank(self):
        return len(self._rows)

    def vectors(self):
        return [self._rows[k] for k in sorted(self._rows)]


def gf2_rank(vectors):
    return Gf2Basis(vectors).rank


def bits(v):
    """Positions of the set bits of v, ascending."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def from_positions(positions):
    v = 0
    for p in positions:
        v ^= 1 << p
    return v
