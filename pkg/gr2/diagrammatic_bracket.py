# gr2/diagrammatic_bracket.py
"""
The bracket B = (B0, B2) on L2(L3H), its integral matrix, its kernel K and the
splitting of K along the contraction components U0..U3.

B0(x1^x2^x3 ^ y1^y2^y3) = sum_{i,j in Z3} omega(x_i, y_j) (x_{i+1}^x_{i+2}).(y_{j+1}^y_{j+2})
B2 is stored as b2_x4 = 4 B2 = -det(omega(x_i, y_j)).
"""
import functools
import logging
from dataclasses import dataclass, field

from gr2.errors import DecompositionFailure, InvarianceFailure, RankMismatch, SpaceMismatch
from gr2.exact_lattice import (
    IntMatrix, LatticeBasis, axpy, integer_kernel, is_saturated, lattice_equal, lattice_sum,
)
from gr2.multilinear_spaces import (
    ModuleVector, Space, build_D2prime, classify_pair, component_blocks, induced_action, label,
    pair_index_of, product, sort_sign, tables, weight_blocks, wedge2,
)
from gr2.symplectic_core import check_genus, g_generators, omega, omega_positions
from gr2.workers import parallel_map

logger = logging.getLogger("gr2")

COMPONENTS = ("U0", "U1", "U2", "U3")


def det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def omega_gram(xs, ys):
    return [[omega(x, y) for y in ys] for x in xs]


def b0_decomposable(xs, ys):
    """B0 of (x1^x2^x3) ^ (y1^y2^y3) as an unreduced S2L2H vector."""
    g = xs[0].genus
    total = ModuleVector.zero(Space.S2_LAMBDA2, g)
    for i in range(3):
        for j in range(3):
            w = omega(xs[i], ys[j])
            if w:
                term = product(wedge2(xs[(i + 1) % 3], xs[(i + 2) % 3]),
                               wedge2(ys[(j + 1) % 3], ys[(j + 2) % 3]))
                total = total + w * term
    return total


def b2_x4_decomposable(xs, ys):
    return -det3(omega_gram(xs, ys))


@functools.lru_cache(maxsize=None)
def _bracket_column(g, k):
    """(B0 in D2' coordinates, 4 B2) of the pair basis element k."""
    t = tables(g)
    first, second = pair_index_of(k, g)
    tree = {}
    for i in range(3):
        for j in range(3):
            w = omega_positions(first[i], second[j])
            if not w:
                continue
            sx, kx = sort_sign((first[(i + 1) % 3], first[(i + 2) % 3]))
            sy, ky = sort_sign((second[(j + 1) % 3], second[(j + 2) % 3]))
            e, f = t.wedge2_index[kx], t.wedge2_index[ky]
            column = t.product_index[(e, f) if e <= f else (f, e)]
            tree[column] = tree.get(column, 0) + w * sx * sy
    gram = [[omega_positions(x, y) for y in second] for x in first]
    return build_D2prime(g).reduce(tree), -det3(gram)


@dataclass(frozen=True)
class BracketValue:
    tree_part: ModuleVector
    theta_part_x4: int


def _check_pair_vector(v):
    if v.space is not Space.LAMBDA2_LAMBDA3:
        raise SpaceMismatch(f"the bracket is defined on L2L3H, got {v.space.value}")


def b0(v):
    _check_pair_vector(v)
    tree = {}
    for k, c in v.coords.items():
        axpy(tree, c, _bracket_column(v.genus, k)[0])
    return ModuleVector(Space.D2_PRIME, v.genus, tree)


def b2_x4(v):
    _check_pair_vector(v)
    return sum(c * _bracket_column(v.genus, k)[1] for k, c in v.coords.items())


def bracket(v):
    return BracketValue(b0(v), b2_x4(v))


def bracket_vanishes(v):
    value = bracket(v)
    return value.tree_part.is_zero() and value.theta_part_x4 == 0


@functools.lru_cache(maxsize=None)
def assemble_B_matrix(g):
    """Rows: the D2' coordinates, then one row holding 4 B2. Columns: the pair basis."""
    check_genus(g)
    quotient = build_D2prime(g)
    theta_row = quotient.dimension
    count = len(tables(g).pairs)
    values = parallel_map(lambda k: _bracket_column(g, k), range(count))
    columns = []
    for tree, theta in values:
        column = dict(tree)
        if theta:
            column[theta_row] = theta
        columns.append(column)
    logger.info(f"B matrix for genus {g}: {theta_row + 1} x {count}")
    return IntMatrix(theta_row + 1, count, columns)


@functools.lru_cache(maxsize=None)
def compute_K(g):
    """The saturated integral kernel K of B."""
    kernel = integer_kernel(assemble_B_matrix(g))
    logger.info(f"K for genus {g}: rank {kernel.rank}")
    return kernel


def image_lattice(g):
    matrix = assemble_B_matrix(g)
    return LatticeBasis(matrix.rows, matrix.columns)


def unit_block(g, component):
    n = len(tables(g).pairs)
    return LatticeBasis(n, ({k: 1} for k in component_blocks(g)[component]))


@dataclass
class DecompositionReport:
    genus: int
    ranks: dict = field(default_factory=dict)
    passed: bool = False

    def to_dict(self):
        return {"genus": self.genus, "ranks": dict(self.ranks), "passed": self.passed}


@functools.lru_cache(maxsize=None)
def kernel_components(g):
    """K intersected with each coordinate block U0..U3."""
    kernel = compute_K(g)
    blocks = component_blocks(g)
    return {name: kernel.restrict(blocks[name]) for name in COMPONENTS}


def check_K_decomposition(g):
    """K = U0 + (K n U1) + (K n U2) + (K n U3), with U0 inside K."""
    check_genus(g)
    kernel = compute_K(g)
    blocks = component_blocks(g)
    pieces = kernel_components(g)
    report = DecompositionReport(g)
    report.ranks = {"K": kernel.rank}
    for name in COMPONENTS:
        report.ranks[f"K&{name}"] = pieces[name].rank
        report.ranks[name] = len(blocks[name])
    for k in blocks["U0"]:
        if {k: 1} not in kernel:
            raise DecompositionFailure(
                f"U0 basis element {label(Space.LAMBDA2_LAMBDA3, g, k)} is not in K",
                {"block": "U0", "pair": label(Space.LAMBDA2_LAMBDA3, g, k)})
    total = sum(pieces[name].rank for name in COMPONENTS)
    if total != kernel.rank:
        raise DecompositionFailure(
            f"component ranks add up to {total}, K has rank {kernel.rank}",
            {"ranks": report.ranks})
    summed = lattice_sum(kernel.ambient_rank, *(pieces[name] for name in COMPONENTS))
    if not lattice_equal(summed, kernel):
        missing = next(
            ((i, row) for i, row in enumerate(kernel.echelon_rows()) if row not in summed), (None, {}))
        raise DecompositionFailure(
            "the components do not sum to K",
            {"block": "sum", "kernel_row": missing[0], "ranks": report.ranks,
             "components": classify_support(ModuleVector(Space.LAMBDA2_LAMBDA3, g, missing[1]))})
    report.passed = True
    logger.info(f"K decomposition for genus {g}: {report.ranks}")
    return report


@dataclass
class RankReport:
    genus: int
    ranks: dict

    def to_dict(self):
        return {"genus": self.genus, "ranks": dict(self.ranks)}


def rank_certificate(g):
    check_genus(g)
    t = tables(g)
    quotient = build_D2prime(g)
    kernel = compute_K(g)
    image = image_lattice(g)
    ranks = {
        "L3H": len(t.trivectors),
        "L2L3H": len(t.pairs),
        "D2'": quotient.rank,
        "K": kernel.rank,
        "imB": image.rank,
    }
    expected = quotient.rank + 1
    if ranks["imB"] != expected:
        raise RankMismatch(f"rank im B = {ranks['imB']}, expected {expected}", {"ranks": ranks})
    if ranks["L2L3H"] != ranks["K"] + ranks["imB"]:
        raise RankMismatch(
            f"{ranks['L2L3H']} != {ranks['K']} + {ranks['imB']}", {"ranks": ranks})
    return RankReport(g, ranks)


def check_b0_grading(g):
    """B0 kills U0 and maps U_i into the weight-(i-1) part of D2'."""
    check_genus(g)
    weights = {r: set(indices) for r, indices in weight_blocks(g).items()}
    counts = {}
    for i, name in enumerate(COMPONENTS):
        allowed = weights.get(i - 1, set())
        for k in component_blocks(g)[name]:
            tree = _bracket_column(g, k)[0]
            if any(index not in allowed for index in tree):
                raise DecompositionFailure(
                    f"B0 of {label(Space.LAMBDA2_LAMBDA3, g, k)} leaves W{i - 1}",
                    {"block": name, "pair": label(Space.LAMBDA2_LAMBDA3, g, k)})
        counts[name] = len(component_blocks(g)[name])
    return {"genus": g, "checked": counts}


def check_equivariance(g, generators=None):
    """B0 intertwines the G-actions and 4 B2 is G-invariant."""
    check_genus(g)
    generators = g_generators(g) if generators is None else generators
    count = len(tables(g).pairs)
    for gamma in generators:
        on_pairs = induced_action(gamma, Space.LAMBDA2_LAMBDA3)
        on_tree = induced_action(gamma, Space.D2_PRIME)
        for k in range(count):
            moved = ModuleVector(Space.LAMBDA2_LAMBDA3, g, on_pairs.columns[k])
            tree, theta = _bracket_column(g, k)
            if b0(moved).coords != on_tree.apply(tree) or b2_x4(moved) != theta:
                raise InvarianceFailure(
                    f"B is not equivariant at {label(Space.LAMBDA2_LAMBDA3, g, k)}",
                    {"pair": label(Space.LAMBDA2_LAMBDA3, g, k), "matrix": [list(r) for r in gamma.entries]})
    return {"genus": g, "generators": len(generators), "pairs": count}


def check_K_saturated(g):
    return is_saturated(compute_K(g))


def export_kernel(g):
    """K as a list of sparse maps keyed by PairIndex strings."""
    return [{label(Space.LAMBDA2_LAMBDA3, g, k): c for k, c in sorted(row.items())}
            for row in compute_K(g).hnf_rows()]


def classify_support(v):
    """Components met by the support of a pair vector."""
    return sorted({classify_pair(k, v.genus).component for k in v.coords})
