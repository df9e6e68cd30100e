# gr2/johnson_invariants.py
"""
Evaluators for the first and second Johnson homomorphisms and the invariants built on
them: the trace maps, Theta, dbar', the Morita d identity, the lattices U'(H) and U(H),
the extension cocycle and the unimodular form b on L3H.

D2 vectors use the doubled model (coordinates twice the D2' ones), so every function
that reads a D2 vector halves the result.
"""
import functools
import itertools
import logging
from dataclasses import dataclass

import numpy as np
from sympy import Rational
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from gr2 import config
from gr2.diagrammatic_bracket import assemble_B_matrix, b0, b2_x4, det3, omega_gram
from gr2.errors import (
    DiscrepancyFailure, GenerationFailure, IdentityFailure, InvalidSubsurfaceBasis,
    InvarianceFailure, MembershipFailure, NonDecomposable, RankMismatch, SpaceMismatch,
)
from gr2.exact_lattice import LatticeBasis, congruence_lattice, lattice_equal
from gr2.gf2 import Gf2Basis
from gr2.multilinear_spaces import (
    ModuleVector, Space, build_D2, build_D2prime, doubled, embed_lambda4, induced_action, mod2_target, pack_mod2,
    product, square_coordinates, tables, to_d2prime, wedge2, wedge3, wedge_pair,
)
from gr2.symplectic_core import (
    SymVector, check_genus, omega, omega_positions, random_symplectic, sp_inverse,
)

logger = logging.getLogger("gr2")


def _pairing(s, t):
    """<a_i, b_i> = <b_i, a_i> = 1, every other pair of basis symbols 0."""
    return 1 if t == s ^ 1 else 0


# Per-column values on the S2L2H product basis.

def _product_symbols(g, column):
    t = tables(g)
    e, f = t.products[column]
    return t.wedge2[e] + t.wedge2[f]


@functools.lru_cache(maxsize=None)
def _theta_columns(g):
    values = []
    for column in range(len(tables(g).products)):
        a, b, c, d = _product_symbols(g, column)
        values.append(_pairing(a, d) * _pairing(b, c) - _pairing(a, c) * _pairing(b, d))
    return tuple(values)


@functools.lru_cache(maxsize=None)
def _dbar_columns(g):
    w = omega_positions
    values = []
    for column in range(len(tables(g).products)):
        a, b, c, d = _product_symbols(g, column)
        values.append(-4 * w(a, b) * w(c, d) - 2 * w(a, c) * w(b, d) + 2 * w(a, d) * w(b, c))
    return tuple(values)


def _contraction_terms(a, b, c, d):
    """The four terms of omega(a,c) b.d + omega(a,d) b.c + omega(b,c) a.d + omega(b,d) a.c."""
    return ((omega_positions(a, c), b, d), (omega_positions(a, d), b, c),
            (omega_positions(b, c), a, d), (omega_positions(b, d), a, c))


@functools.lru_cache(maxsize=None)
def _trace_s_columns(g):
    index = tables(g).s2h_index
    values = []
    for column in range(len(tables(g).products)):
        bits = 0
        for w, s, t in _contraction_terms(*_product_symbols(g, column)):
            if w % 2:
                bits ^= 1 << index[(s, t) if s <= t else (t, s)]
        values.append(bits)
    return tuple(values)


@functools.lru_cache(maxsize=None)
def _trace_lambda_columns(g):
    index = tables(g).wedge2_index
    values = []
    for column in range(len(tables(g).products)):
        bits = 0
        for w, s, t in _contraction_terms(*_product_symbols(g, column)):
            if w % 2 and s != t:
                bits ^= 1 << index[(s, t) if s < t else (t, s)]
        values.append(bits)
    return tuple(values)


def _product_columns(t):
    """(S2L2H column, coefficient, divisor) triples of an S2L2H, D2' or D2 vector."""
    if t.space is Space.S2_LAMBDA2:
        return [(k, c) for k, c in t.coords.items()], 1
    if t.space in (Space.D2_PRIME, Space.D2):
        columns = build_D2prime(t.genus).coordinate_columns
        return [(columns[k], c) for k, c in t.coords.items()], (2 if t.space is Space.D2 else 1)
    raise SpaceMismatch(f"expected S2L2H, D2' or D2, got {t.space.value}")


def _linear_value(t, table):
    terms, divisor = _product_columns(t)
    total = sum(c * table[k] for k, c in terms)
    return Rational(total, divisor)


def theta(t, basis=None):
    """
    Theta of an S2L2H, D2' or D2 vector, optionally in the basis S' = M.S for a
    symplectic matrix M, computed as Theta_S(M^{-1} T).
    """
    if basis is not None:
        t = _transform(t, sp_inverse(basis))
    return _linear_value(t, _theta_columns(t.genus))


def _transform(t, m):
    if t.space is Space.S2_LAMBDA2:
        t = to_d2prime(t)
    matrix = induced_action(m, Space.D2_PRIME)
    return ModuleVector(t.space, t.genus, matrix.apply(t.coords))


def dbar_prime(t):
    return _linear_value(t, _dbar_columns(t.genus))


def trace_S(t):
    """Tr^S: D2' (or S2L2H) -> S2H (x) Z/2."""
    if t.space is Space.D2:
        raise SpaceMismatch("trace_S is defined on D2'; use trace_Lambda on D2")
    terms, _ = _product_columns(t)
    table = _trace_s_columns(t.genus)
    bits = 0
    for k, c in terms:
        if c % 2:
            bits ^= table[k]
    return ModuleVector(Space.S2H_MOD2, t.genus, {k: 1 for k in range(bits.bit_length()) if bits >> k & 1})


def _wedge_of_square(g, column):
    t = tables(g)
    e, _ = t.products[column]
    return e, t.wedge2[e]


def trace_Lambda(t):
    """
    Tr^Lambda: D2 -> L2H (x) Z/2. Half-squares 1/2 (u^v)^2 go to (1 + omega(u, v)) u^v,
    every other basis product follows the four-term contraction with u^v in place of u.v.
    """
    if t.space is Space.D2_PRIME:
        t = doubled(t)
    if t.space is not Space.D2:
        raise SpaceMismatch(f"trace_Lambda expects D2, got {t.space.value}")
    g = t.genus
    quotient = build_D2prime(g)
    squares = set(square_coordinates(g))
    table = _trace_lambda_columns(g)
    bits = 0
    for k, c in t.coords.items():
        column = quotient.coordinate_column(k)
        if k in squares:
            e, (u, v) = _wedge_of_square(g, column)
            if c % 2 and (1 + omega_positions(u, v)) % 2:
                bits ^= 1 << e
            continue
        if c % 2:
            raise MembershipFailure("odd coefficient on a non-square coordinate: not in D2",
                                    {"coordinate": k, "coefficient": c})
        if (c // 2) % 2:
            bits ^= table[column]
    return ModuleVector(Space.LAMBDA2H_MOD2, g, {k: 1 for k in range(bits.bit_length()) if bits >> k & 1})


# Subsurface data.

def _check_subsurface(pairs, extra=None):
    if not pairs:
        raise InvalidSubsurfaceBasis("a subsurface basis needs at least one pair")
    vectors = [v for pair in pairs for v in pair] + ([extra] if extra is not None else [])
    genera = {v.genus for v in vectors}
    if len(genera) != 1:
        raise InvalidSubsurfaceBasis(f"mixed genera {sorted(genera)}")
    for i, (u, v) in enumerate(pairs):
        for j, (x, y) in enumerate(pairs):
            checks = ((f"omega(u{i + 1}, v{j + 1})", omega(u, y), int(i == j)),
                      (f"omega(u{i + 1}, u{j + 1})", omega(u, x), 0),
                      (f"omega(v{i + 1}, v{j + 1})", omega(v, y), 0))
            for name, actual, expected in checks:
                if actual != expected:
                    raise InvalidSubsurfaceBasis(f"{name} = {actual}, expected {expected}",
                                                 {"pairing": name, "actual": actual, "expected": expected})
        if extra is not None:
            for name, w in ((f"u{i + 1}", u), (f"v{i + 1}", v)):
                if omega(extra, w):
                    raise InvalidSubsurfaceBasis(f"omega(e, {name}) = {omega(extra, w)}, expected 0",
                                                 {"pairing": f"omega(e, {name})", "actual": omega(extra, w)})


@dataclass(frozen=True)
class BPData:
    """A symplectic basis (u_i, v_i) of the subsurface cobounded by a bounding pair, and its class e."""
    pairs: tuple
    e: SymVector

    def __post_init__(self):
        _check_subsurface(self.pairs, self.e)

    @property
    def h(self):
        return len(self.pairs)


@dataclass(frozen=True)
class BSCCData:
    """A symplectic basis (u_i, v_i) of the subsurface bounded by a separating curve."""
    pairs: tuple

    def __post_init__(self):
        _check_subsurface(self.pairs)

    @property
    def h(self):
        return len(self.pairs)

    @classmethod
    def standard(cls, h, g):
        return cls(tuple((SymVector.basis(2 * i, g), SymVector.basis(2 * i + 1, g)) for i in range(h)))


@dataclass(frozen=True)
class DecomposableTrivector:
    factors: tuple

    @property
    def genus(self):
        return self.factors[0].genus

    @property
    def value(self):
        return wedge3(*self.factors)


def _factors(t):
    if not isinstance(t, DecomposableTrivector):
        raise NonDecomposable(f"expected a DecomposableTrivector, got {type(t).__name__}")
    return t.factors


def tau1_bp(d):
    g = d.e.genus
    total = ModuleVector.zero(Space.LAMBDA3, g)
    for u, v in d.pairs:
        total = total - wedge3(u, v, d.e)
    return total


def tau1_pb(x, y, z):
    return -wedge3(x, y, z)


def tau2_bscc(d):
    """1/2 sum_{i,j} (u_i^v_i).(u_j^v_j) in the doubled D2 model."""
    g = d.pairs[0][0].genus
    wedges = [wedge2(u, v) for u, v in d.pairs]
    coords = {}
    for w in wedges:
        for x in wedges:
            for k, c in to_d2prime(product(w, x)).coords.items():
                coords[k] = coords.get(k, 0) + c
    value = ModuleVector(Space.D2, g, coords)
    if value.coords not in build_D2(g):
        raise MembershipFailure("tau2 value is not in D2", {"value": value.to_json()})
    return value


# The d invariant.

def d_morita(u, v):
    """8 sum_{i,j in Z3} omega(x_i, x_{i+1}) omega(y_j, y_{j+1}) omega(x_{i+2}, y_{j+2})."""
    xs, ys = _factors(u), _factors(v)
    total = 0
    for i in range(3):
        for j in range(3):
            total += (omega(xs[i], xs[(i + 1) % 3]) * omega(ys[j], ys[(j + 1) % 3])
                      * omega(xs[(i + 2) % 3], ys[(j + 2) % 3]))
    return 8 * total


def pair_vector(u, v):
    return wedge_pair(u.value, v.value)


def d_decomposition(u, v):
    """(2 d', 48 d'') on the commutator of u and v: (-2 dbar'(b0), 12 b2_x4)."""
    pair = pair_vector(u, v)
    return -2 * dbar_prime(b0(pair)), 12 * b2_x4(pair)


def bscc_values(h):
    if h < 1:
        raise ValueError(f"h must be positive, got {h}")
    return 4 * h * (h - 1), Rational(-h, 8)


def bscc_cross_check(h, g=None):
    """4h(h-1) = 2 d'(tau2) + 48 d'' with d' = -dbar' o tau2 and d'' = -h/8."""
    g = max(3, h) if g is None else g
    d, d2 = bscc_values(h)
    tau2 = tau2_bscc(BSCCData.standard(h, g))
    rhs = -2 * dbar_prime(tau2) + 48 * d2
    if rhs != d:
        raise IdentityFailure(f"bscc identity fails at h={h}: {d} != {rhs}", {"h": h, "d": d, "rhs": str(rhs)})
    return {"h": h, "d": d, "d2": str(d2), "dbar_prime_tau2": str(dbar_prime(tau2))}


# Random sampling.

def _rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def random_symvector(g, rng, bound=None):
    bound = config.coefficient_bound() if bound is None else bound
    while True:
        coords = tuple(int(x) for x in rng.integers(-bound, bound + 1, size=2 * g))
        if any(coords):
            return SymVector(coords)


def random_decomposable(g, rng, bound=None):
    return DecomposableTrivector(tuple(random_symvector(g, rng, bound) for _ in range(3)))


def random_pair_vector(g, rng, terms=4):
    count = len(tables(g).pairs)
    coords = {}
    for k, c in zip(rng.integers(0, count, size=terms), rng.integers(-3, 4, size=terms)):
        coords[int(k)] = coords.get(int(k), 0) + int(c)
    return ModuleVector(Space.LAMBDA2_LAMBDA3, g, coords)


def verify_d_identity(g, trials=None, seed=None):
    """d = 2 d' + 48 d'' on commutators of random decomposable trivectors."""
    check_genus(g)
    trials = config.default_trials() if trials is None else trials
    seed = config.default_seed() if seed is None else seed
    rng = _rng(seed)
    for trial in range(trials):
        u, v = random_decomposable(g, rng), random_decomposable(g, rng)
        d = d_morita(u, v)
        d_prime_part, d_second_part = d_decomposition(u, v)
        if d != d_prime_part + d_second_part:
            raise IdentityFailure(
                f"d = {d} but 2d' + 48d'' = {d_prime_part + d_second_part} (trial {trial})",
                {"u": [str(x) for x in u.factors], "v": [str(y) for y in v.factors],
                 "d": d, "rhs": str(d_prime_part + d_second_part)})
    logger.info(f"d identity genus {g}: {trials} trials passed")
    return {"genus": g, "trials": trials, "seed": seed, "failures": 0}


def theta_discrepancy(x1, x2, x3, y1, y2, y3):
    """(Theta(b0(x^y)), -3 det(omega(x_i, y_j))); the two agree mod 4."""
    pair = wedge_pair(wedge3(x1, x2, x3), wedge3(y1, y2, y3))
    value = theta(b0(pair))
    tilde = -3 * det3(omega_gram((x1, x2, x3), (y1, y2, y3)))
    if value.q != 1 or (value - tilde) % 4:
        raise DiscrepancyFailure(f"theta {value} and {tilde} differ mod 4",
                                 {"xs": [str(x) for x in (x1, x2, x3)], "ys": [str(y) for y in (y1, y2, y3)]})
    return int(value), tilde


def sweep_theta_discrepancy(g, trials=None, seed=None):
    check_genus(g)
    trials = config.default_trials() if trials is None else trials
    seed = config.default_seed() if seed is None else seed
    rng = _rng(seed)
    for _ in range(trials):
        theta_discrepancy(*(random_symvector(g, rng) for _ in range(6)))
    return {"genus": g, "trials": trials, "seed": seed, "failures": 0}


@functools.lru_cache(maxsize=None)
def kernel_trace_lambda(g):
    """ker Tr^Lambda inside D2, doubled coordinates."""
    constraints = _d2_constraints(g)
    return congruence_lattice(build_D2prime(g).dimension, constraints)


def _d2_constraints(g):
    """Evenness off the squares, then Tr^Lambda = 0, written as congruences mod 2 and mod 4."""
    quotient = build_D2prime(g)
    squares = set(square_coordinates(g))
    table = _trace_lambda_columns(g)
    constraints = [({k: 1}, 2) for k in range(quotient.dimension) if k not in squares]
    rows = {}
    for k in range(quotient.dimension):
        column = quotient.coordinate_column(k)
        if k in squares:
            e, (u, v) = _wedge_of_square(g, column)
            if (1 + omega_positions(u, v)) % 2:
                rows.setdefault(e, {})[k] = 2
            continue
        bits = table[column]
        w = 0
        while bits:
            if bits & 1:
                rows.setdefault(w, {})[k] = 1
            bits >>= 1
            w += 1
    constraints += [(row, 4) for _, row in sorted(rows.items())]
    return constraints


def verify_theta_mod4(g, trials=None, seed=None):
    """
    Theta_{S'} = Theta_S mod 4 on im b0 and 2 Theta_{S'} = 2 Theta_S mod 4 on
    ker Tr^Lambda in D2, for random symplectic changes of basis.
    """
    check_genus(g)
    trials = config.default_trials() if trials is None else trials
    seed = config.default_seed() if seed is None else seed
    rng = _rng(seed)
    d2_rows = kernel_trace_lambda(g).echelon_rows()
    for trial in range(trials):
        m = random_symplectic(g, seed + trial + 1)
        t = b0(random_pair_vector(g, rng))
        before, after = theta(t), theta(t, basis=m)
        if (after - before) % 4:
            raise InvarianceFailure(f"Theta changes by {after - before} (trial {trial})",
                                    {"T": t.to_json(), "matrix": [list(r) for r in m.entries]})
        x = {}
        for i, c in zip(rng.integers(0, len(d2_rows), size=3), rng.integers(-2, 3, size=3)):
            for k, v in d2_rows[int(i)].items():
                x[k] = x.get(k, 0) + int(c) * v
        point = ModuleVector(Space.D2, g, x)
        before, after = 2 * theta(point), 2 * theta(point, basis=m)
        if (after - before) % 4:
            raise InvarianceFailure(f"2 Theta on D2 changes by {after - before} (trial {trial})",
                                    {"T": point.to_json(), "matrix": [list(r) for r in m.entries]})
    logger.info(f"Theta mod 4 genus {g}: {trials} trials passed")
    return {"genus": g, "trials": trials, "seed": seed, "failures": 0}


# U'(H), U(H) and the cocycle.

@dataclass(frozen=True)
class UPoint:
    T: ModuleVector
    z: int

    def vector(self):
        coords = dict(self.T.coords)
        if self.z:
            coords[build_D2prime(self.T.genus).dimension] = self.z
        return coords


@functools.lru_cache(maxsize=None)
def lattice_Uprime(g):
    """{(T, z) in D2' + Z : Tr^S(T) = 0, 2 Theta(T) + z = 0 mod 8}."""
    check_genus(g)
    quotient = build_D2prime(g)
    dim = quotient.dimension
    trace = _trace_s_columns(g)
    thetas = _theta_columns(g)
    rows = {}
    for k in range(dim):
        bits, s = trace[quotient.coordinate_column(k)], 0
        while bits:
            if bits & 1:
                rows.setdefault(s, {})[k] = 1
            bits >>= 1
            s += 1
    constraints = [(row, 2) for _, row in sorted(rows.items())]
    theta_row = {k: 2 * thetas[quotient.coordinate_column(k)] for k in range(dim)}
    theta_row[dim] = 1
    constraints.append((theta_row, 8))
    lattice = congruence_lattice(dim + 1, constraints)
    logger.info(f"U'(H) genus {g}: rank {lattice.rank}")
    return lattice


@functools.lru_cache(maxsize=None)
def lattice_U(g):
    """{(X, z) in D2 + Z : Tr^Lambda(X) = 0, 2 Theta(X) + z = 0 mod 4}, X doubled."""
    check_genus(g)
    quotient = build_D2prime(g)
    dim = quotient.dimension
    thetas = _theta_columns(g)
    constraints = _d2_constraints(g)
    theta_row = {k: thetas[quotient.coordinate_column(k)] for k in range(dim)}
    theta_row[dim] = 1
    constraints.append((theta_row, 4))
    lattice = congruence_lattice(dim + 1, constraints)
    logger.info(f"U(H) genus {g}: rank {lattice.rank}")
    return lattice


def in_Uprime(point):
    if point.T.space is not Space.D2_PRIME:
        raise SpaceMismatch(f"U'(H) points carry D2' vectors, got {point.T.space.value}")
    return point.vector() in lattice_Uprime(point.T.genus)


def in_U(point):
    if point.T.space is Space.D2_PRIME:
        point = UPoint(doubled(point.T), point.z)
    if point.T.space is not Space.D2:
        raise SpaceMismatch(f"U(H) points carry D2 vectors, got {point.T.space.value}")
    return point.vector() in lattice_U(point.T.genus)


def bracket_image_uprime(g):
    """The lattice spanned by (b0, 8 B2) = (b0, 2 b2_x4) on the pair basis."""
    matrix = assemble_B_matrix(g)
    theta_row = matrix.rows - 1
    vectors = []
    for column in matrix.columns:
        vector = dict(column)
        if theta_row in vector:
            vector[theta_row] *= 2
        vectors.append(vector)
    return LatticeBasis(matrix.rows, vectors)


def verify_uprime(g):
    """(b0, 8 B2) maps L2L3H onto U'(H)."""
    image = bracket_image_uprime(g)
    target = lattice_Uprime(g)
    report = {"genus": g, "rank_image": image.rank, "rank_Uprime": target.rank,
              "hnf_digest_image": image.digest(), "hnf_digest_Uprime": target.digest()}
    outside = next((row for row in image.echelon_rows() if row not in target), None)
    if outside is not None:
        raise MembershipFailure("(b0, 8 B2) leaves U'(H)", dict(report, row=sorted(outside.items())))
    if not lattice_equal(image, target):
        raise GenerationFailure("(b0, 8 B2) does not reach all of U'(H)", report)
    dim = build_D2prime(g).dimension
    for row in target.echelon_rows():
        point = UPoint(ModuleVector(Space.D2_PRIME, g, {k: c for k, c in row.items() if k < dim}), row.get(dim, 0))
        if not in_U(point):
            raise MembershipFailure("U'(H) is not inside U(H)", dict(report, row=sorted(row.items())))
    report["result"] = "pass"
    return report


def cocycle_C(u, v):
    """(b0(u^v), -2 det(omega(x_i, y_j))) as a point of U(H)."""
    xs, ys = _factors(u), _factors(v)
    pair = pair_vector(u, v)
    point = UPoint(doubled(b0(pair)), -2 * det3(omega_gram(xs, ys)))
    if point.z != 2 * b2_x4(pair):
        raise IdentityFailure("second coordinate differs from 8 B2",
                              {"z": point.z, "b2_x4": b2_x4(pair)})
    if not in_U(point):
        raise MembershipFailure("cocycle value is not in U(H)",
                                {"u": [str(x) for x in xs], "v": [str(y) for y in ys]})
    return point


def verify_cocycle(g, trials=None, seed=None):
    check_genus(g)
    trials = config.default_trials() if trials is None else trials
    seed = config.default_seed() if seed is None else seed
    basis = [SymVector.basis(p, g) for p in range(2 * g)]
    triples = [DecomposableTrivector(tuple(basis[p] for p in triple)) for triple in tables(g).trivectors]
    for first, second in tables(g).pairs:
        cocycle_C(triples[first], triples[second])
    rng = _rng(seed)
    for _ in range(trials):
        cocycle_C(random_decomposable(g, rng), random_decomposable(g, rng))
    logger.info(f"cocycle genus {g}: basis pairs and {trials} trials passed")
    return {"genus": g, "basis_pairs": len(tables(g).pairs), "trials": trials, "seed": seed, "failures": 0}


# The form b.

def form_b(t, s):
    return det3(omega_gram(_factors(t), _factors(s)))


def verify_b_nonsingular(g):
    check_genus(g)
    triples = tables(g).trivectors
    gram = [[det3([[omega_positions(x, y) for y in second] for x in first]) for second in triples]
             for first in triples]
    det = DomainMatrix([[ZZ(x) for x in row] for row in gram], (len(triples), len(triples)), ZZ).det()
    if abs(int(det)) != 1:
        raise RankMismatch(f"Gram determinant of b in genus {g} is {det}", {"det": int(det)})
    return {"genus": g, "size": len(triples), "det": int(det)}


# Exactness of the trace rows.

def check_exact_rows(g):
    """
    im b0 = ker Tr^S inside D2', and both traces are onto ker omega_bar.
    """
    check_genus(g)
    quotient = build_D2prime(g)
    dim = quotient.dimension
    image = LatticeBasis(dim, (column for column in _tree_columns(g)))
    trace = _trace_s_columns(g)
    rows = {}
    for k in range(dim):
        bits, s = trace[quotient.coordinate_column(k)], 0
        while bits:
            if bits & 1:
                rows.setdefault(s, {})[k] = 1
            bits >>= 1
            s += 1
    kernel = congruence_lattice(dim, [(row, 2) for _, row in sorted(rows.items())])
    if not lattice_equal(image, kernel):
        raise GenerationFailure("im b0 differs from ker Tr^S", {"rank_image": image.rank, "rank_kernel": kernel.rank})
    report = {"genus": g, "im_b0_rank": image.rank, "ker_trace_S_rank": kernel.rank}
    for name, space, images in (("trace_S", Space.S2H_MOD2, _trace_s_images(g)),
                                ("trace_Lambda", Space.LAMBDA2H_MOD2, _trace_lambda_images(g))):
        target = mod2_target(space, g)
        for bits in images:
            if target.evaluate(bits):
                raise MembershipFailure(f"{name} leaves ker omega_bar", {"bits": bits})
        rank = Gf2Basis(images).rank
        if rank != target.kernel_dimension:
            raise GenerationFailure(f"{name} has image rank {rank}, ker omega_bar has {target.kernel_dimension}",
                                    {"rank": rank})
        report[f"{name}_image_rank"] = rank
    return report


def _tree_columns(g):
    matrix = assemble_B_matrix(g)
    theta_row = matrix.rows - 1
    return [{k: c for k, c in column.items() if k != theta_row} for column in matrix.columns]


def _trace_s_images(g):
    quotient = build_D2prime(g)
    table = _trace_s_columns(g)
    return [table[quotient.coordinate_column(k)] for k in range(quotient.dimension)]


def _trace_lambda_images(g):
    return [pack_mod2(trace_Lambda(ModuleVector(Space.D2, g, row))) for row in build_D2(g).echelon_rows()]


def check_well_defined(g):
    """Theta, dbar' and Tr^S vanish on every embedded basis 4-vector."""
    basis = [SymVector.basis(p, g) for p in range(2 * g)]
    count = 0
    for a, b, c, d in itertools.combinations(range(2 * g), 4):
        v = embed_lambda4(basis[a], basis[b], basis[c], basis[d])
        if theta(v) or dbar_prime(v) or not trace_S(v).is_zero():
            raise InvarianceFailure("an invariant does not vanish on L4H", {"quadruple": [a, b, c, d]})
        count += 1
    return {"genus": g, "checked": count}


def evaluation_record(kind, inputs, value):
    """JSON-ready record of one invariant evaluation."""
    if isinstance(value, ModuleVector):
        value = value.to_json()
    elif isinstance(value, UPoint):
        value = {"T": value.T.to_json(), "z": value.z}
    elif isinstance(value, Rational):
        value = str(value)
    return {"input": inputs, kind: value}
