# gr2/symplectic_core.py
"""
The symplectic lattice H = Z^{2g}, its basis a1 < b1 < a2 < b2 < ... < ag < bg,
the form omega, the bar involution and the groups Sp(H) and G.

Basis symbols are addressed internally by their position in that order:
a_i sits at 2(i-1), b_i at 2(i-1)+1, so bar(p) = p ^ 1.
"""
import functools
import logging
import re
from dataclasses import dataclass
from enum import Enum

import numpy as np

from gr2 import config
from gr2.errors import GenusError, GenusMismatch, NonSymplectic, ParseError, SettingError

logger = logging.getLogger("gr2")

MIN_GENUS = 3


def check_genus(g):
    if not isinstance(g, int) or g < MIN_GENUS:
        raise GenusError(f"genus must be an integer >= {MIN_GENUS}, got {g!r}", {"genus": g})
    return g


class Kind(Enum):
    A = "a"
    B = "b"


@functools.total_ordering
@dataclass(frozen=True)
class BasisSymbol:
    kind: Kind
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"symbol index must be >= 1, got {self.index}")

    @property
    def position(self):
        return 2 * (self.index - 1) + (0 if self.kind is Kind.A else 1)

    @classmethod
    def from_position(cls, position):
        return cls(Kind.A if position % 2 == 0 else Kind.B, position // 2 + 1)

    @classmethod
    def parse(cls, text):
        match = re.fullmatch(r"\s*([ab])(\d+)\s*", text)
        if not match or int(match.group(2)) < 1:
            raise ParseError(f"not a basis symbol: {text!r}", {"input": text})
        return cls(Kind(match.group(1)), int(match.group(2)))

    def __lt__(self, other):
        return self.position < other.position

    def __str__(self):
        return f"{self.kind.value}{self.index}"


def symbol_name(position):
    return f"{'ab'[position % 2]}{position // 2 + 1}"


def bar(s):
    """a_i <-> b_i."""
    return BasisSymbol(Kind.B if s.kind is Kind.A else Kind.A, s.index)


def epsilon(s):
    """omega(s, bar(s)): +1 on a-symbols, -1 on b-symbols."""
    return 1 if s.kind is Kind.A else -1


def nmap(s):
    return s.index


def epsilon_position(p):
    return 1 if p % 2 == 0 else -1


def omega_positions(p, q):
    """omega on two basis positions."""
    if q == p ^ 1:
        return 1 if p % 2 == 0 else -1
    return 0


@dataclass(frozen=True)
class GenusConfig:
    g: int
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        check_genus(self.g)
        if not 0 <= self.seed < 2 ** 64:
            raise SettingError(f"seed must fit in 64 bits, got {self.seed}", {"seed": self.seed})
        if self.threads < 1:
            raise SettingError(f"threads must be positive, got {self.threads}", {"threads": self.threads})


_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+)\s*\*?\s*)?([ab])(\d+)\s*")


@dataclass(frozen=True)
class SymVector:
    coords: tuple

    def __post_init__(self):
        if len(self.coords) % 2:
            raise ValueError("a SymVector needs an even number of coordinates")

    @property
    def genus(self):
        return len(self.coords) // 2

    @classmethod
    def zero(cls, g):
        return cls((0,) * (2 * g))

    @classmethod
    def basis(cls, symbol, g):
        position = symbol if isinstance(symbol, int) else symbol.position
        if position >= 2 * g:
            raise GenusMismatch(f"{symbol_name(position)} does not exist in genus {g}")
        coords = [0] * (2 * g)
        coords[position] = 1
        return cls(tuple(coords))

    @classmethod
    def parse(cls, text, g):
        """Parse expressions such as 'a1+2*b3-a2' (or '0')."""
        source = text.strip()
        if source == "0":
            return cls.zero(g)
        coords = [0] * (2 * g)
        pos = 0
        while pos < len(source):
            match = _TERM.match(source, pos)
            if not match or match.end() == pos or (pos > 0 and match.group(1) is None):
                raise ParseError(f"cannot parse SymVector expression {text!r}", {"input": text})
            sign = -1 if match.group(1) == "-" else 1
            coefficient = int(match.group(2)) if match.group(2) else 1
            index = int(match.group(4))
            if not 1 <= index <= g:
                raise ParseError(f"symbol {match.group(3)}{index} outside genus {g}", {"input": text})
            coords[2 * (index - 1) + (0 if match.group(3) == "a" else 1)] += sign * coefficient
            pos = match.end()
        if not source:
            raise ParseError("empty SymVector expression", {"input": text})
        return cls(tuple(coords))

    def support(self):
        return [(p, c) for p, c in enumerate(self.coords) if c]

    def _check(self, other):
        if not isinstance(other, SymVector):
            return NotImplemented
        if other.genus != self.genus:
            raise GenusMismatch(f"genus {self.genus} vs {other.genus}")
        return True

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SymVector(tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SymVector(tuple(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self):
        return SymVector(tuple(-x for x in self.coords))

    def __rmul__(self, scalar):
        if not isinstance(scalar, int):
            return NotImplemented
        return SymVector(tuple(scalar * x for x in self.coords))

    def is_zero(self):
        return not any(self.coords)

    def __str__(self):
        terms = []
        for p, c in self.support():
            name = symbol_name(p)
            if c == 1:
                terms.append(f"+{name}")
            elif c == -1:
                terms.append(f"-{name}")
            else:
                terms.append(f"{c:+d}*{name}")
        if not terms:
            return "0"
        text = "".join(terms)
        return text[1:] if text.startswith("+") else text


def omega(x, y):
    if x.genus != y.genus:
        raise GenusMismatch(f"omega of genus {x.genus} and genus {y.genus} vectors")
    cx, cy = x.coords, y.coords
    return sum(cx[p] * cy[p + 1] - cx[p + 1] * cy[p] for p in range(0, len(cx), 2))


@functools.lru_cache(maxsize=None)
def gram_matrix(g):
    return tuple(tuple(omega_positions(p, q) for q in range(2 * g)) for p in range(2 * g))


def _matmul(left, right):
    n, k, m = len(left), len(right), len(right[0]) if right else 0
    return tuple(
        tuple(sum(left[i][t] * right[t][j] for t in range(k) if left[i][t]) for j in range(m))
        for i in range(n)
    )


@dataclass(frozen=True)
class SpMatrix:
    """A 2g x 2g integer matrix acting on column vectors; column p is the image of basis p."""
    entries: tuple

    @property
    def size(self):
        return len(self.entries)

    @property
    def genus(self):
        return self.size // 2

    @classmethod
    def identity(cls, g):
        n = 2 * g
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def from_columns(cls, columns):
        n = len(columns)
        return cls(tuple(tuple(columns[j].coords[i] for j in range(n)) for i in range(n)))

    def column(self, p):
        return SymVector(tuple(row[p] for row in self.entries))

    def columns(self):
        return [self.column(p) for p in range(self.size)]

    def transpose(self):
        return SpMatrix(tuple(zip(*self.entries)))

    def __matmul__(self, other):
        if isinstance(other, SpMatrix):
            if other.size != self.size:
                raise GenusMismatch(f"matrix sizes {self.size} and {other.size}")
            return SpMatrix(_matmul(self.entries, other.entries))
        if isinstance(other, SymVector):
            if other.genus != self.genus:
                raise GenusMismatch(f"genus {self.genus} matrix on genus {other.genus} vector")
            return SymVector(tuple(sum(a * b for a, b in zip(row, other.coords)) for row in self.entries))
        return NotImplemented

    def __pow__(self, exponent):
        result = SpMatrix.identity(self.genus)
        for _ in range(exponent):
            result = result @ self
        return result

    def inverse(self):
        return sp_inverse(self)


def is_symplectic(m):
    omega_matrix = gram_matrix(m.genus)
    return _matmul(_matmul(m.transpose().entries, omega_matrix), m.entries) == omega_matrix


def sp_inverse(m):
    """M^{-1} = -Omega M^T Omega, valid because M^T Omega M = Omega and Omega^2 = -1."""
    omega_matrix = gram_matrix(m.genus)
    product = _matmul(_matmul(omega_matrix, m.transpose().entries), omega_matrix)
    return SpMatrix(tuple(tuple(-x for x in row) for row in product))


def e_map(i, g):
    """E_i: (a_i, b_i) -> (-b_i, a_i)."""
    a, b = 2 * (i - 1), 2 * (i - 1) + 1
    columns = [SymVector.basis(p, g) for p in range(2 * g)]
    columns[a] = -SymVector.basis(b, g)
    columns[b] = SymVector.basis(a, g)
    return SpMatrix.from_columns(columns)


def f_map(i, j, g):
    """F_ij: swaps the handles (a_i, b_i) and (a_j, b_j)."""
    columns = [SymVector.basis(p, g) for p in range(2 * g)]
    for offset in (0, 1):
        p, q = 2 * (i - 1) + offset, 2 * (j - 1) + offset
        columns[p], columns[q] = columns[q], columns[p]
    return SpMatrix.from_columns(columns)


def g_generators(g):
    check_genus(g)
    generators = [e_map(i, g) for i in range(1, g + 1)]
    generators += [f_map(i, j, g) for i in range(1, g + 1) for j in range(i + 1, g + 1)]
    return generators


def g_closure_generators(g):
    """E_i and the adjacent swaps F_{i,i+1}; they generate the same group G."""
    check_genus(g)
    return [e_map(i, g) for i in range(1, g + 1)] + [f_map(i, i + 1, g) for i in range(1, g)]


def partial_symplectic(images, g):
    """
    Build the matrix sending the given basis symbols to the given vectors and fixing
    every other basis symbol.

    Args:
        images: mapping BasisSymbol (or position) -> SymVector
        g: genus

    Returns:
        SpMatrix

    Raises:
        NonSymplectic: carrying the first basis pair whose omega value is not preserved.
    """
    columns = [SymVector.basis(p, g) for p in range(2 * g)]
    for symbol, image in images.items():
        position = symbol if isinstance(symbol, int) else symbol.position
        if image.genus != g:
            raise GenusMismatch(f"image of {symbol_name(position)} has genus {image.genus}")
        columns[position] = image
    for p in range(2 * g):
        for q in range(p + 1, 2 * g):
            actual = omega(columns[p], columns[q])
            expected = omega_positions(p, q)
            if actual != expected:
                pair = [symbol_name(p), symbol_name(q)]
                raise NonSymplectic(
                    f"omega({pair[0]}, {pair[1]}) changes from {expected} to {actual}",
                    {"pair": pair, "expected": expected, "actual": actual},
                )
    return SpMatrix.from_columns(columns)


def transvection(v, g, power=1):
    """x -> x + power * omega(x, v) v."""
    columns = []
    for p in range(2 * g):
        e = SymVector.basis(p, g)
        columns.append(e + (power * omega(e, v)) * v)
    return SpMatrix.from_columns(columns)


@functools.lru_cache(maxsize=None)
def random_generator_set(g):
    """The fixed word alphabet of random_symplectic."""
    a = [SymVector.basis(2 * i, g) for i in range(g)]
    b = [SymVector.basis(2 * i + 1, g) for i in range(g)]
    directions = a + b
    for i in range(g - 1):
        directions += [a[i] + a[i + 1], b[i] + b[i + 1], a[i] + b[i + 1]]
    generators = []
    for v in directions:
        generators.append(transvection(v, g, 1))
        generators.append(transvection(v, g, -1))
    generators += [e_map(i, g) for i in range(1, g + 1)]
    generators += [f_map(i, j, g) for i in range(1, g + 1) for j in range(i + 1, g + 1)]
    return tuple(generators)


def random_symplectic(g, seed, steps=None):
    """Product of `steps` generators drawn with a Philox counter-based generator."""
    steps = config.random_steps() if steps is None else steps
    result = SpMatrix.identity(g)
    if steps <= 0:
        return result
    generators = random_generator_set(g)
    rng = np.random.Generator(np.random.Philox(seed))
    for choice in rng.integers(0, len(generators), size=steps):
        result = generators[int(choice)] @ result
    return result


def lemma_sp_maps(g):
    """
    The maps C1, D_i (i < g), E_i (i != 2) and F_ij (3 <= i < j) that fix
    a1^b1^a2, keyed by name.
    """
    check_genus(g)

    def a(i):
        return SymVector.basis(2 * (i - 1), g)

    def b(i):
        return SymVector.basis(2 * (i - 1) + 1, g)

    maps = {"C1": partial_symplectic({1: b(1) + a(1)}, g)}
    for i in range(1, g):
        maps[f"D{i}"] = partial_symplectic(
            {2 * (i - 1) + 1: b(i) + a(i + 1), 2 * i + 1: b(i + 1) + a(i)}, g)
    for i in range(1, g + 1):
        if i != 2:
            maps[f"E{i}"] = e_map(i, g)
    for i in range(3, g + 1):
        for j in range(i + 1, g + 1):
            maps[f"F{i}{j}"] = f_map(i, j, g)
    return maps


def group_closure(generators, limit=100000):
    """All products of the generators (brute force, small groups only)."""
    identity = SpMatrix.identity(generators[0].genus)
    seen = {identity}
    frontier = [identity]
    while frontier:
        next_frontier = []
        for element in frontier:
            for generator in generators:
                product = generator @ element
                if product not in seen:
                    seen.add(product)
                    next_frontier.append(product)
                    if len(seen) > limit:
                        raise RuntimeError(f"group closure exceeded {limit} elements")
        frontier = next_frontier
    logger.debug(f"group closure: {len(seen)} elements")
    return seen
