# gr2/relation_library.py
"""
The relation families D, Sq, T, IHX1, IHX2, IHX3, IHX3p, the 26-element generating
list of K (stored as data) and the checks that these elements G-generate K and its
components.
"""
import functools
import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum

from gr2.diagrammatic_bracket import (
    bracket, bracket_vanishes, classify_support, compute_K, kernel_components, unit_block,
)
from gr2.errors import (
    ClauseViolation, GenerationFailure, GenusMismatch, MembershipFailure, UnclassifiedElement,
)
from gr2.exact_lattice import lattice_equal, lattice_index, span_closure_with_stats
from gr2.multilinear_spaces import (
    ModuleVector, Space, bracket_symbol, component_blocks, induced_action, label,
)
from gr2.symplectic_core import (
    BasisSymbol, check_genus, e_map, epsilon_position, f_map, g_closure_generators, symbol_name,
)
from gr2.workers import chunked, parallel_map

logger = logging.getLogger("gr2")


class Family(Enum):
    PAIR = "R0"
    D = "D"
    SQ = "Sq"
    T = "T"
    IHX1 = "IHX1"
    IHX2 = "IHX2"
    IHX3 = "IHX3"
    IHX3P = "IHX3p"


ARITY = {
    Family.D: 6, Family.SQ: 6, Family.T: 4, Family.IHX1: 5,
    Family.IHX2: 4, Family.IHX3: 3, Family.IHX3P: 4,
}


def _position(symbol):
    if isinstance(symbol, int):
        return symbol
    if isinstance(symbol, str):
        return BasisSymbol.parse(symbol).position
    return symbol.position


def _clause(family, p):
    """(symbols that must be pairwise different, (symbol, set it must avoid) or None)."""
    if family is Family.D:
        x, y, c1, c2, xp, yp = p
        return [x, y, c1, c2, xp ^ 1, yp ^ 1], None
    if family is Family.SQ:
        x, y, a, b, c, d = p
        return [a, b, c, d, x, y ^ 1], None
    if family is Family.T:
        x, a, b, c = p
        return [a, a ^ 1, b, b ^ 1, c, c ^ 1, x], None
    if family is Family.IHX1:
        s1, s2, s3, s4, c = p
        group = [c, s2, s2 ^ 1, s3, s3 ^ 1, s4, s4 ^ 1]
        return group, (s1, group)
    if family is Family.IHX2:
        x, y, a, c = p
        return [x, x ^ 1, y, y ^ 1, a, a ^ 1], (c, [x, y, a, a ^ 1])
    if family is Family.IHX3:
        a, b, c = p
        return [a, a ^ 1, b, b ^ 1, c, c ^ 1], None
    if family is Family.IHX3P:
        a, b, c, d = p
        return [a, a ^ 1, b, b ^ 1, c, c ^ 1, d, d ^ 1], None
    raise ValueError(f"no clause for {family}")


def clause_problem(family, p):
    """None when the parameters satisfy the family's clause, else the offending symbols."""
    distinct, avoid = _clause(family, p)
    seen = {}
    for s in distinct:
        if s in seen:
            return [symbol_name(s)]
        seen[s] = True
    if avoid is not None and avoid[0] in avoid[1]:
        return [symbol_name(avoid[0])]
    return None


def _terms(family, p):
    """Signed bracket symbols (coefficient, xs, ys) of the family's combination."""
    e = epsilon_position
    b = lambda s: s ^ 1  # noqa: E731
    if family is Family.D:
        x, y, c1, c2, xp, yp = p
        return [(e(c1), (x, y, c1), (b(c1), xp, yp)),
                (-e(c2), (x, y, c2), (b(c2), xp, yp))]
    if family is Family.SQ:
        x, y, pp, q, r, s = p
        return [(e(r) * e(s), (x, pp, q), (y, b(pp), b(q))),
                (-e(pp) * e(r), (x, q, s), (y, b(q), b(s))),
                (e(pp) * e(q), (x, r, s), (y, b(r), b(s))),
                (-e(q) * e(s), (x, pp, r), (y, b(pp), b(r)))]
    if family is Family.T:
        x, pp, q, r = p
        return [(e(r), (x, pp, q), (x, b(pp), b(q))),
                (-e(q), (x, pp, r), (x, b(pp), b(r))),
                (e(pp), (x, q, b(r)), (x, b(q), r))]
    if family is Family.IHX1:
        s1, s2, s3, s4, c = p
        return [(1, (s1, s2, c), (b(c), s3, s4)),
                (1, (s1, s3, c), (b(c), s4, s2)),
                (1, (s1, s4, c), (b(c), s2, s3))]
    if family is Family.IHX2:
        x, y, pp, c = p
        return [(e(pp), (x, pp, b(pp)), (y, pp, b(pp))),
                (-e(c), (x, y, c), (pp, b(pp), b(c)))]
    if family is Family.IHX3:
        pp, q, r = p
        return [(e(r), (pp, b(pp), q), (b(q), r, b(r))),
                (-e(q), (r, b(r), pp), (b(pp), r, b(r))),
                (-e(r), (q, b(q), pp), (b(pp), r, b(r))),
                (e(pp), (r, b(r), q), (b(q), r, b(r)))]
    if family is Family.IHX3P:
        pp, q, r, s = p
        return [(e(q), (pp, r, s), (b(pp), b(r), b(s))),
                (-e(pp), (q, r, s), (b(q), b(r), b(s))),
                (-e(s), (b(r), b(pp), q), (r, pp, b(q))),
                (-e(r), (s, b(pp), q), (b(s), pp, b(q))),
                (-e(r), (s, b(s), q), (b(q), pp, b(pp))),
                (e(s), (q, b(q), pp), (b(pp), r, b(r)))]
    raise ValueError(f"no terms for {family}")


def family_value(family, positions, g):
    total = ModuleVector.zero(Space.LAMBDA2_LAMBDA3, g)
    for coefficient, xs, ys in _terms(family, positions):
        total = total + coefficient * bracket_symbol(xs, ys, g)
    return total


@dataclass(frozen=True, eq=False)
class RelationElement:
    family: Family
    params: tuple
    value: ModuleVector

    @property
    def name(self):
        if self.family is Family.PAIR:
            first, second = self.params[:3], self.params[3:]
            return "<" + "".join(map(str, first)) + "|" + "".join(map(str, second)) + ">"
        return f"{self.family.value}(" + ",".join(map(str, self.params)) + ")"


def make_relation(family, params, genus):
    """Build a relation element, enforcing its clause and its membership in K."""
    check_genus(genus)
    positions = tuple(_position(s) for s in params)
    if len(positions) != (6 if family is Family.PAIR else ARITY[family]):
        raise ValueError(f"{family.value} takes {ARITY.get(family, 6)} symbols, got {len(positions)}")
    for p in positions:
        if p >= 2 * genus:
            raise GenusMismatch(f"{symbol_name(p)} does not exist in genus {genus}")
    symbols = tuple(BasisSymbol.from_position(p) for p in positions)
    if family is Family.PAIR:
        value = bracket_symbol(positions[:3], positions[3:], genus)
    else:
        problem = clause_problem(family, positions)
        if problem is not None:
            raise ClauseViolation(
                f"{family.value}{tuple(map(str, symbols))}: coincident symbols {problem}",
                {"family": family.value, "params": [str(s) for s in symbols], "coincident": problem})
        value = family_value(family, positions, genus)
    element = RelationElement(family, symbols, value)
    if not bracket_vanishes(value):
        raise MembershipFailure(
            f"{element.name} is not in the kernel of B",
            {"family": family.value, "params": [str(s) for s in symbols],
             "bracket": str(bracket(value).tree_part)})
    return element


def rel_D(x, y, c1, c2, xp, yp, *, genus):
    return make_relation(Family.D, (x, y, c1, c2, xp, yp), genus)


def rel_Sq(x, y, p, q, r, s, *, genus):
    return make_relation(Family.SQ, (x, y, p, q, r, s), genus)


def rel_T(x, p, q, r, *, genus):
    return make_relation(Family.T, (x, p, q, r), genus)


def rel_IHX1(s1, s2, s3, s4, c, *, genus):
    return make_relation(Family.IHX1, (s1, s2, s3, s4, c), genus)


def rel_IHX2(x, y, p, c, *, genus):
    return make_relation(Family.IHX2, (x, y, p, c), genus)


def rel_IHX3(p, q, r, *, genus):
    return make_relation(Family.IHX3, (p, q, r), genus)


def rel_IHX3p(p, q, r, s, *, genus):
    return make_relation(Family.IHX3P, (p, q, r, s), genus)


def pair_element(xs, ys, *, genus):
    return make_relation(Family.PAIR, tuple(xs) + tuple(ys), genus)


# The generating list of K, grouped by the component each family lives in.
GENERATING_LIST = {
    0: [
        (Family.PAIR, "a1 a2 a3 a4 a5 a6"),
        (Family.PAIR, "a1 b1 a2 a3 a4 a5"),
        (Family.PAIR, "a1 b1 a2 a3 b3 a4"),
        (Family.PAIR, "a1 a2 a3 a3 a4 a5"),
        (Family.PAIR, "a1 b1 a2 a2 a3 a4"),
        (Family.PAIR, "a1 b1 a2 a2 a3 b3"),
        (Family.PAIR, "a1 a2 a3 a2 a3 a4"),
    ],
    1: [
        (Family.D, "a1 a2 a5 a3 a3 a4"),
        (Family.D, "a1 a2 a3 a4 a3 a4"),
        (Family.D, "a1 a2 a3 b1 a3 a4"),
        (Family.D, "a3 a1 a4 a2 a2 a3"),
        (Family.D, "a3 a1 b1 a2 a2 a3"),
        (Family.D, "a1 a2 a4 a3 a2 a1"),
        (Family.IHX1, "a1 a2 a3 a4 b1"),
    ],
    2: [
        (Family.SQ, "a1 a2 a4 a5 a3 b3"),
        (Family.SQ, "a1 a2 a4 b4 a3 b3"),
        (Family.SQ, "a1 a2 a2 b1 a3 b3"),
        (Family.SQ, "a1 a2 a2 a4 a3 b3"),
        (Family.SQ, "a1 a2 b1 a4 a3 b3"),
        (Family.T, "a1 a2 a3 a4"),
        (Family.IHX2, "a1 a2 a3 a4"),
        (Family.IHX2, "a1 a2 a3 b1"),
    ],
    3: [
        (Family.D, "a1 b1 a2 b2 a3 b3"),
        (Family.D, "a1 b1 a2 a3 a4 b4"),
        (Family.IHX3, "a1 a2 a3"),
        (Family.IHX3P, "a1 a2 a3 a4"),
    ],
}


def _symbols(text):
    return [BasisSymbol.parse(s) for s in text.split()]


def family_R(g, i):
    """The entries of the i-th group of the generating list whose symbols exist in genus g."""
    check_genus(g)
    elements = []
    for family, text in GENERATING_LIST[i]:
        symbols = _symbols(text)
        if max(s.index for s in symbols) <= g:
            elements.append(make_relation(family, symbols, g))
    return elements


def enumerate_tuples(family, g):
    """All clause-valid parameter tuples (as positions) of a family in genus g."""
    n = 2 * g
    if family in (Family.D, Family.SQ):
        for chosen in itertools.permutations(range(n), 6):
            if family is Family.D:
                x, y, c1, c2, xb, yb = chosen
                yield (x, y, c1, c2, xb ^ 1, yb ^ 1)
            else:
                a, b, c, d, x, yb = chosen
                yield (x, yb ^ 1, a, b, c, d)
        return
    for params in itertools.product(range(n), repeat=ARITY[family]):
        if clause_problem(family, params) is None:
            yield params


def _sweep_chunk(family, g, chunk):
    for params in chunk:
        if not bracket_vanishes(family_value(family, params, g)):
            return params
    return None


def verify_relation_sweep(g, families=None):
    """Every clause-valid member of every family lies in K."""
    check_genus(g)
    families = list(ARITY) if families is None else families
    counts = {}
    for family in families:
        tuples = list(enumerate_tuples(family, g))
        failures = parallel_map(lambda chunk: _sweep_chunk(family, g, chunk), chunked(tuples, 512))
        bad = next((params for params in failures if params is not None), None)
        if bad is not None:
            names = [symbol_name(p) for p in bad]
            raise MembershipFailure(
                f"{family.value}({','.join(names)}) has nonzero bracket",
                {"family": family.value, "params": names})
        counts[family.value] = len(tuples)
        logger.debug(f"sweep genus {g}: {family.value} {len(tuples)} tuples")
    logger.info(f"relation sweep genus {g}: {counts}")
    return {"genus": g, "counts": counts, "failures": 0}


@functools.lru_cache(maxsize=None)
def pair_endomorphisms(g):
    return tuple(induced_action(m, Space.LAMBDA2_LAMBDA3) for m in g_closure_generators(g))


def _generation_certificate(theorem, g, target, generators):
    closure = span_closure_with_stats([e.value.coords for e in generators], list(pair_endomorphisms(g)),
                                      target.ambient_rank)
    certificate = {
        "theorem": theorem,
        "genus": g,
        "generator_count": closure.generator_count,
        "closure_iterations": closure.iterations,
        "hnf_digest_lhs": closure.lattice.digest(),
        "hnf_digest_rhs": target.digest(),
        "rank_lhs": closure.lattice.rank,
        "rank_rhs": target.rank,
    }
    outside = next((row for row in closure.lattice.echelon_rows() if row not in target), None)
    if outside is not None:
        raise GenerationFailure(f"{theorem}: the closure leaves the target lattice",
                                dict(certificate, direction="closure-outside-target"))
    if not lattice_equal(closure.lattice, target):
        missing = next(i for i, row in enumerate(target.hnf_rows()) if row not in closure.lattice)
        index = lattice_index(target, closure.lattice)
        raise GenerationFailure(
            f"{theorem}: basis vector {missing} of the target is not generated",
            dict(certificate, missing_basis_index=missing,
                 index=None if index == math.inf else index))
    certificate["result"] = "pass"
    return certificate


def verify_theorem_K(g):
    """The G-closure of the whole generating list equals K."""
    check_genus(g)
    generators = [e for i in range(4) for e in family_R(g, i)]
    certificate = _generation_certificate("theorem-k", g, compute_K(g), generators)
    logger.info(f"theorem-k genus {g}: closure equals K in {certificate['closure_iterations']} rounds")
    return certificate


def verify_component(g, i):
    """The G-closure of the i-th group equals K n U_i."""
    check_genus(g)
    target = kernel_components(g)[f"U{i}"]
    certificate = _generation_certificate(f"component-U{i}", g, target, family_R(g, i))
    if i == 0:
        certificate["K_meets_U0_in_U0"] = lattice_equal(target, unit_block(g, "U0"))
        if not certificate["K_meets_U0_in_U0"]:
            raise GenerationFailure("K n U0 differs from U0", certificate)
    return certificate


def _signed_permutation(matrix):
    image = []
    for column in matrix.columns:
        if len(column) != 1:
            raise ValueError("not a signed permutation matrix")
        (target, _), = column.items()
        image.append(target)
    return image


def orbit_classification_U0(g):
    """Every U0 basis pair lies, up to sign, in the G-orbit of one of the pair patterns."""
    check_genus(g)
    blocks = component_blocks(g)["U0"]
    permutations = [_signed_permutation(m) for m in pair_endomorphisms(g)]
    orbit_of = {}
    orbits = []
    for start in blocks:
        if start in orbit_of:
            continue
        orbit_id = len(orbits)
        members = [start]
        orbit_of[start] = orbit_id
        for k in members:
            for perm in permutations:
                target = perm[k]
                if target not in orbit_of:
                    orbit_of[target] = orbit_id
                    members.append(target)
        orbits.append(members)
    patterns = {}
    for element in family_R(g, 0):
        (k, _), = element.value.coords.items()
        patterns.setdefault(orbit_of[k], []).append(element.name)
    for orbit_id, members in enumerate(orbits):
        if orbit_id not in patterns:
            raise UnclassifiedElement(
                f"the orbit of {label(Space.LAMBDA2_LAMBDA3, g, members[0])} contains no pattern",
                {"pair": label(Space.LAMBDA2_LAMBDA3, g, members[0]), "orbit_size": len(members)})
    return {
        "genus": g,
        "orbits": len(orbits),
        "sizes": [len(members) for members in orbits],
        "patterns": [patterns[i] for i in range(len(orbits))],
        "covered": len(blocks),
    }


def quadruplet_orbits(g):
    """
    G-orbit representatives of quadruplets of basis symbols with no bar-dual pair and
    multiplicity at most two.
    """
    check_genus(g)
    moves = []
    for m in [e_map(i, g) for i in range(1, g + 1)] + [f_map(i, i + 1, g) for i in range(1, g)]:
        moves.append([next(q for q, c in enumerate(m.column(p).coords) if c) for p in range(2 * g)])
    candidates = set()
    for quad in itertools.combinations_with_replacement(range(2 * g), 4):
        if any(quad.count(s) > 2 for s in quad):
            continue
        if any(s ^ 1 in quad for s in quad):
            continue
        candidates.add(quad)
    seen = set()
    representatives = []
    for quad in sorted(candidates):
        if quad in seen:
            continue
        orbit = [quad]
        seen.add(quad)
        for current in orbit:
            for move in moves:
                image = tuple(sorted(move[s] for s in current))
                if image not in seen:
                    seen.add(image)
                    orbit.append(image)
        representatives.append(tuple(symbol_name(s) for s in min(orbit)))
    return representatives


def family_components(element):
    return classify_support(element.value)


def generating_list_size(g):
    return sum(len(family_R(g, i)) for i in range(4))
