# gr2/multilinear_spaces.py
"""
Canonical bases and exact arithmetic for the modules built on H:

    L2H      pairs s < t of basis positions (s^t)
    L3H      sorted triples (s1^s2^s3), lexicographic
    L2L3H    pairs I < J of trivector indices, written <I|J>
    S2L2H    unordered products e.f of L2H basis elements, e <= f
    D2'      S2L2H modulo the image of L4H, in canonical quotient coordinates
    D2       the doubled model of D2' (x) Q: coordinates are twice the D2' ones
    S2H/2, L2H/2, L3H/2   the mod-2 targets

Vectors are sparse {basis index: coefficient} maps tagged with their space.
"""
import functools
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum

from gr2.errors import GenusMismatch, SpaceMismatch
from gr2.exact_lattice import IntMatrix, LatticeBasis, QuotientLattice, axpy, lattice_index
from gr2.symplectic_core import SymVector, check_genus, symbol_name

logger = logging.getLogger("gr2")


class Space(Enum):
    LAMBDA2 = "L2H"
    LAMBDA3 = "L3H"
    LAMBDA2_LAMBDA3 = "L2L3H"
    S2_LAMBDA2 = "S2L2H"
    D2_PRIME = "D2'"
    D2 = "D2"
    S2H_MOD2 = "S2H/2"
    LAMBDA2H_MOD2 = "L2H/2"
    LAMBDA3H_MOD2 = "L3H/2"

    @property
    def is_mod2(self):
        return self in (Space.S2H_MOD2, Space.LAMBDA2H_MOD2, Space.LAMBDA3H_MOD2)


@dataclass(frozen=True)
class GenusTables:
    genus: int
    wedge2: tuple
    wedge2_index: dict = field(repr=False)
    trivectors: tuple = field(repr=False)
    trivector_index: dict = field(repr=False)
    pairs: tuple = field(repr=False)
    pair_index: dict = field(repr=False)
    products: tuple = field(repr=False)
    product_index: dict = field(repr=False)
    s2h: tuple = field(repr=False)
    s2h_index: dict = field(repr=False)


@functools.lru_cache(maxsize=None)
def tables(g):
    """Basis enumerations for genus g, built once and shared read-only."""
    n = 2 * g
    wedge2 = tuple(itertools.combinations(range(n), 2))
    trivectors = tuple(itertools.combinations(range(n), 3))
    pairs = tuple(itertools.combinations(range(len(trivectors)), 2))
    products = tuple(itertools.combinations_with_replacement(range(len(wedge2)), 2))
    s2h = tuple(itertools.combinations_with_replacement(range(n), 2))
    logger.debug(f"genus {g} tables: {len(trivectors)} trivectors, {len(pairs)} pairs, {len(products)} products")
    return GenusTables(
        genus=g,
        wedge2=wedge2, wedge2_index={k: i for i, k in enumerate(wedge2)},
        trivectors=trivectors, trivector_index={k: i for i, k in enumerate(trivectors)},
        pairs=pairs, pair_index={k: i for i, k in enumerate(pairs)},
        products=products, product_index={k: i for i, k in enumerate(products)},
        s2h=s2h, s2h_index={k: i for i, k in enumerate(s2h)},
    )


def dimension(space, g):
    t = tables(g)
    if space in (Space.LAMBDA2, Space.LAMBDA2H_MOD2):
        return len(t.wedge2)
    if space in (Space.LAMBDA3, Space.LAMBDA3H_MOD2):
        return len(t.trivectors)
    if space is Space.LAMBDA2_LAMBDA3:
        return len(t.pairs)
    if space is Space.S2_LAMBDA2:
        return len(t.products)
    if space is Space.S2H_MOD2:
        return len(t.s2h)
    return build_D2prime(g).dimension


def sort_sign(items):
    """(sign of the sorting permutation, sorted tuple), or (0, None) on a repeat."""
    items = list(items)
    if len(set(items)) < len(items):
        return 0, None
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(items)


def _wedge2_label(key):
    return f"{symbol_name(key[0])}^{symbol_name(key[1])}"


def label(space, g, k):
    t = tables(g)
    if space in (Space.LAMBDA2, Space.LAMBDA2H_MOD2):
        return _wedge2_label(t.wedge2[k])
    if space in (Space.LAMBDA3, Space.LAMBDA3H_MOD2):
        return "^".join(symbol_name(p) for p in t.trivectors[k])
    if space is Space.LAMBDA2_LAMBDA3:
        i, j = t.pairs[k]
        return ("".join(symbol_name(p) for p in t.trivectors[i]) + "|"
                + "".join(symbol_name(p) for p in t.trivectors[j]))
    if space is Space.S2_LAMBDA2:
        e, f = t.products[k]
        return f"({_wedge2_label(t.wedge2[e])}).({_wedge2_label(t.wedge2[f])})"
    if space is Space.S2H_MOD2:
        s, u = t.s2h[k]
        return f"{symbol_name(s)}.{symbol_name(u)}"
    column = build_D2prime(g).coordinate_column(k)
    return label(Space.S2_LAMBDA2, g, column)


@dataclass(frozen=True, eq=False)
class ModuleVector:
    space: Space
    genus: int
    coords: dict

    def __post_init__(self):
        if self.space.is_mod2:
            cleaned = {k: 1 for k, c in self.coords.items() if c % 2}
        else:
            cleaned = {k: int(c) for k, c in self.coords.items() if c}
        object.__setattr__(self, "coords", cleaned)

    @classmethod
    def zero(cls, space, g):
        return cls(space, g, {})

    def _check(self, other):
        if not isinstance(other, ModuleVector):
            return False
        if other.space is not self.space:
            raise SpaceMismatch(f"cannot combine {self.space.value} with {other.space.value}")
        if other.genus != self.genus:
            raise GenusMismatch(f"genus {self.genus} vs {other.genus}")
        return True

    def __eq__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        return (self.space, self.genus, self.coords) == (other.space, other.genus, other.coords)

    __hash__ = None

    def __add__(self, other):
        if not self._check(other):
            return NotImplemented
        return ModuleVector(self.space, self.genus, axpy(dict(self.coords), 1, other.coords))

    def __sub__(self, other):
        if not self._check(other):
            return NotImplemented
        return ModuleVector(self.space, self.genus, axpy(dict(self.coords), -1, other.coords))

    def __neg__(self):
        return ModuleVector(self.space, self.genus, {k: -c for k, c in self.coords.items()})

    def __rmul__(self, scalar):
        if not isinstance(scalar, int):
            return NotImplemented
        return ModuleVector(self.space, self.genus, {k: scalar * c for k, c in self.coords.items()})

    def is_zero(self):
        return not self.coords

    def support(self):
        return sorted(self.coords.items())

    def coefficient(self, k):
        return self.coords.get(k, 0)

    def to_json(self):
        return {label(self.space, self.genus, k): c for k, c in self.support()}

    def __str__(self):
        if not self.coords:
            return "0"
        parts = []
        for k, c in self.support():
            name = label(self.space, self.genus, k)
            if c == 1:
                parts.append(f"+{name}")
            elif c == -1:
                parts.append(f"-{name}")
            else:
                parts.append(f"{c:+d}*{name}")
        text = " ".join(parts)
        return text[1:] if text.startswith("+") else text


def _positions(symbols):
    return [s if isinstance(s, int) else s.position for s in symbols]


def _same_genus(vectors):
    genera = {v.genus for v in vectors}
    if len(genera) != 1:
        raise GenusMismatch(f"mixed genera {sorted(genera)}")
    return genera.pop()


def elementary_wedge2(s, t, g):
    sign, key = sort_sign(_positions((s, t)))
    if not sign:
        return ModuleVector.zero(Space.LAMBDA2, g)
    return ModuleVector(Space.LAMBDA2, g, {tables(g).wedge2_index[key]: sign})


def elementary_trivector(s1, s2, s3, g):
    sign, key = sort_sign(_positions((s1, s2, s3)))
    if not sign:
        return ModuleVector.zero(Space.LAMBDA3, g)
    return ModuleVector(Space.LAMBDA3, g, {tables(g).trivector_index[key]: sign})


def wedge2(h1, h2):
    g = _same_genus((h1, h2))
    index = tables(g).wedge2_index
    coords = {}
    for p, c in h1.support():
        for q, d in h2.support():
            sign, key = sort_sign((p, q))
            if sign:
                k = index[key]
                coords[k] = coords.get(k, 0) + sign * c * d
    return ModuleVector(Space.LAMBDA2, g, coords)


def wedge3(h1, h2, h3):
    g = _same_genus((h1, h2, h3))
    index = tables(g).trivector_index
    coords = {}
    for p, c in h1.support():
        for q, d in h2.support():
            if q == p:
                continue
            for r, e in h3.support():
                sign, key = sort_sign((p, q, r))
                if sign:
                    k = index[key]
                    coords[k] = coords.get(k, 0) + sign * c * d * e
    return ModuleVector(Space.LAMBDA3, g, coords)


def _pair_coords(t, u, g):
    index = tables(g).pair_index
    coords = {}
    for i, c in t.items():
        for j, d in u.items():
            if i < j:
                k, value = index[(i, j)], c * d
            elif i > j:
                k, value = index[(j, i)], -c * d
            else:
                continue
            coords[k] = coords.get(k, 0) + value
    return coords


def wedge_pair(t, u):
    """(t) ^ (u) in L2(L3H)."""
    for v in (t, u):
        if v.space is not Space.LAMBDA3:
            raise SpaceMismatch(f"wedge_pair expects L3H vectors, got {v.space.value}")
    g = _same_genus((t, u))
    return ModuleVector(Space.LAMBDA2_LAMBDA3, g, _pair_coords(t.coords, u.coords, g))


def bracket_symbol(xs, ys, g):
    """<x1,x2,x3 | y1,y2,y3> on basis symbols."""
    return wedge_pair(elementary_trivector(*xs, g), elementary_trivector(*ys, g))


def pair_index_of(k, g):
    """The PairIndex (I, J) of basis element k, as two sorted position triples."""
    t = tables(g)
    i, j = t.pairs[k]
    return t.trivectors[i], t.trivectors[j]


def _product_coords(e, f, g):
    index = tables(g).product_index
    coords = {}
    for i, c in e.items():
        for j, d in f.items():
            k = index[(i, j) if i <= j else (j, i)]
            coords[k] = coords.get(k, 0) + c * d
    return coords


def product(e, f):
    """The symmetric product e.f of two L2H vectors."""
    for v in (e, f):
        if v.space is not Space.LAMBDA2:
            raise SpaceMismatch(f"product expects L2H vectors, got {v.space.value}")
    g = _same_genus((e, f))
    return ModuleVector(Space.S2_LAMBDA2, g, _product_coords(e.coords, f.coords, g))


def embed_lambda4(h1, h2, h3, h4):
    """(h1^h2).(h3^h4) + (h1^h3).(h4^h2) + (h1^h4).(h2^h3)."""
    return (product(wedge2(h1, h2), wedge2(h3, h4))
            + product(wedge2(h1, h3), wedge2(h4, h2))
            + product(wedge2(h1, h4), wedge2(h2, h3)))


def _basis_vectors(g):
    return [SymVector.basis(p, g) for p in range(2 * g)]


@functools.lru_cache(maxsize=None)
def build_D2prime(g):
    """S2(L2H) modulo the embedded L4H, one relation per sorted 4-subset of basis symbols."""
    check_genus(g)
    e = _basis_vectors(g)
    ambient = len(tables(g).products)
    relations = LatticeBasis(ambient)
    for a, b, c, d in itertools.combinations(range(2 * g), 4):
        relations.add_vector(embed_lambda4(e[a], e[b], e[c], e[d]).coords)
    quotient = QuotientLattice(ambient, relations)
    logger.info(f"D2' for genus {g}: ambient {ambient}, relations {relations.rank}, rank {quotient.rank}")
    return quotient


def to_d2prime(v):
    if v.space is not Space.S2_LAMBDA2:
        raise SpaceMismatch(f"to_d2prime expects S2L2H, got {v.space.value}")
    return ModuleVector(Space.D2_PRIME, v.genus, build_D2prime(v.genus).reduce(v.coords))


@functools.lru_cache(maxsize=None)
def square_coordinates(g):
    """D2' coordinates carried by squares e.e of L2H basis elements."""
    t = tables(g)
    quotient = build_D2prime(g)
    squares = []
    for e in range(len(t.wedge2)):
        index = quotient.coordinate_index(t.product_index[(e, e)])
        if index is None:
            raise RuntimeError(f"square of {_wedge2_label(t.wedge2[e])} is not a canonical coordinate")
        squares.append(index)
    return tuple(squares)


@functools.lru_cache(maxsize=None)
def build_D2(g):
    """D2 in the doubled model: D2' doubled plus every half-square 1/2 (s^t).(s^t)."""
    check_genus(g)
    rank = build_D2prime(g).rank
    squares = set(square_coordinates(g))
    return LatticeBasis(rank, ({k: 1} if k in squares else {k: 2} for k in range(rank)))


def doubled(t):
    if t.space is not Space.D2_PRIME:
        raise SpaceMismatch(f"doubled expects D2', got {t.space.value}")
    return ModuleVector(Space.D2, t.genus, {k: 2 * c for k, c in t.coords.items()})


def half_square(u, v):
    """1/2 (u^v).(u^v) in doubled coordinates."""
    w = wedge2(u, v)
    return ModuleVector(Space.D2, u.genus, to_d2prime(product(w, w)).coords)


def in_D2(x):
    if x.space is not Space.D2:
        raise SpaceMismatch(f"in_D2 expects D2, got {x.space.value}")
    return x.coords in build_D2(x.genus)


def d2_index(g):
    """[D2 : D2']."""
    rank = build_D2prime(g).rank
    return lattice_index(build_D2(g), LatticeBasis(rank, ({k: 2} for k in range(rank))))


@dataclass(frozen=True)
class Mod2Target:
    space: Space
    genus: int
    omega_bar: tuple
    kernel: tuple

    @property
    def dimension(self):
        return len(self.omega_bar)

    @property
    def kernel_dimension(self):
        return len(self.kernel)

    def evaluate(self, bits):
        """omega_bar of a packed mod-2 vector."""
        total = 0
        k = 0
        while bits:
            if bits & 1:
                total ^= self.omega_bar[k]
            bits >>= 1
            k += 1
        return total


@functools.lru_cache(maxsize=None)
def mod2_target(space, g):
    """Basis data of S2H/2 or L2H/2 with omega_bar(h.k) = omega(h, k) mod 2 and a basis of its kernel."""
    t = tables(g)
    if space is Space.S2H_MOD2:
        keys = t.s2h
    elif space is Space.LAMBDA2H_MOD2:
        keys = t.wedge2
    else:
        raise SpaceMismatch(f"no omega_bar on {space.value}")
    omega_bar = tuple(1 if q == p ^ 1 else 0 for p, q in keys)
    anchor = omega_bar.index(1)
    kernel = []
    for k, value in enumerate(omega_bar):
        if k == anchor:
            continue
        kernel.append((1 << k) | (value << anchor))
    return Mod2Target(space, g, omega_bar, tuple(kernel))


def pack_mod2(v):
    if not v.space.is_mod2:
        raise SpaceMismatch(f"pack_mod2 expects a mod-2 space, got {v.space.value}")
    bits = 0
    for k in v.coords:
        bits |= 1 << k
    return bits


def _check_action_genus(m, g):
    if m.genus != g:
        raise GenusMismatch(f"genus {m.genus} matrix on genus {g} space")


@functools.lru_cache(maxsize=256)
def induced_action(m, space):
    """Matrix of the symplectic matrix m on L2H, L3H, L2L3H, S2L2H or D2' in canonical bases."""
    g = m.genus
    t = tables(g)
    images = m.columns()
    if space is Space.LAMBDA2:
        columns = [wedge2(images[p], images[q]).coords for p, q in t.wedge2]
        return IntMatrix(len(columns), len(columns), columns)
    if space is Space.LAMBDA3:
        columns = [wedge3(images[p], images[q], images[r]).coords for p, q, r in t.trivectors]
        return IntMatrix(len(columns), len(columns), columns)
    if space is Space.LAMBDA2_LAMBDA3:
        cubic = induced_action(m, Space.LAMBDA3)
        columns = [_pair_coords(cubic.columns[i], cubic.columns[j], g) for i, j in t.pairs]
        return IntMatrix(len(columns), len(columns), columns)
    if space is Space.S2_LAMBDA2:
        square = induced_action(m, Space.LAMBDA2)
        columns = [_product_coords(square.columns[e], square.columns[f], g) for e, f in t.products]
        return IntMatrix(len(columns), len(columns), columns)
    if space is Space.D2_PRIME:
        quotient = build_D2prime(g)
        full = induced_action(m, Space.S2_LAMBDA2)
        columns = [quotient.reduce(full.columns[c]) for c in quotient.coordinate_columns]
        return IntMatrix(len(columns), len(columns), columns)
    raise SpaceMismatch(f"no induced action on {space.value}")


def apply_action(m, v):
    _check_action_genus(m, v.genus)
    if v.space is Space.D2:
        matrix = induced_action(m, Space.D2_PRIME)
    else:
        matrix = induced_action(m, v.space)
    return ModuleVector(v.space, v.genus, matrix.apply(v.coords))


@dataclass(frozen=True)
class ContractionType:
    mixed: int
    self_count: int
    component: str
    fine: str


def classify_pair(p, g=None):
    """
    Contraction type of a PairIndex, given as (I, J) position triples or as a
    basis index of L2L3H together with the genus.
    """
    if isinstance(p, int):
        first, second = pair_index_of(p, g)
    else:
        first, second = (tuple(sorted(_positions(side))) for side in p)
    mixed = [(s, s ^ 1) for s in first if s ^ 1 in second]
    m = len(mixed)
    if m == 0:
        return ContractionType(0, 0, "U0", "V0")
    if m >= 2:
        return ContractionType(m, 0, "U2" if m == 2 else "U3", "V2" if m == 2 else "V3")
    s, t = mixed[0]
    n = 0
    for side, used in ((first, s), (second, t)):
        rest = [x for x in side if x != used]
        if rest[0] ^ 1 == rest[1]:
            n += 1
    component = {0: "U1", 1: "U2", 2: "U3"}[n]
    return ContractionType(1, n, component, f"V1{n}")


@functools.lru_cache(maxsize=None)
def component_blocks(g):
    """Pair basis indices grouped by component label U0..U3."""
    blocks = {"U0": [], "U1": [], "U2": [], "U3": []}
    for k in range(len(tables(g).pairs)):
        blocks[classify_pair(k, g).component].append(k)
    return {name: tuple(indices) for name, indices in blocks.items()}


def contraction_weight(product_index, g):
    """Largest number of disjoint bar-dual pairs among the four symbols of a basis product."""
    t = tables(g)
    e, f = t.products[product_index]
    symbols = t.wedge2[e] + t.wedge2[f]
    best = 0
    for matching in ([(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]):
        best = max(best, sum(1 for i, j in matching if symbols[i] ^ 1 == symbols[j]))
    return best


@functools.lru_cache(maxsize=None)
def weight_blocks(g):
    """D2' coordinate indices grouped by contraction weight r = 0, 1, 2."""
    quotient = build_D2prime(g)
    blocks = {0: [], 1: [], 2: []}
    for index, column in enumerate(quotient.coordinate_columns):
        blocks[contraction_weight(column, g)].append(index)
    return {r: tuple(indices) for r, indices in blocks.items()}
