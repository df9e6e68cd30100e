# gr2/exact_lattice.py
"""
Exact integer linear algebra on sparse vectors.

A vector is a dict {column: nonzero int}. LatticeBasis keeps an incremental
row echelon form (one row per pivot column, pivot = smallest column of the row,
pivot entry positive) and produces the canonical Hermite normal form on demand.
Smith normal forms and invariant factors come from sympy.
"""
import hashlib
import json
import logging
import math
from bisect import insort
from dataclasses import dataclass

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors as _sympy_invariant_factors
from sympy.polys.matrices.normalforms import smith_normal_decomp

from gr2.errors import AmbientMismatch
from gr2.workers import parallel_map

logger = logging.getLogger("gr2")


def xgcd(a, b):
    """Return (x, y, d) with x*a + y*b == d == gcd(a, b) >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    d, next_d = a, b
    while next_d:
        q = d // next_d
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        d, next_d = next_d, d - q * next_d
    if d < 0:
        x, y, d = -x, -y, -d
    return x, y, d


def axpy(target, q, row):
    """target += q * row, in place, dropping zeros."""
    if not q:
        return target
    for k, c in row.items():
        value = target.get(k, 0) + q * c
        if value:
            target[k] = value
        else:
            target.pop(k, None)
    return target


def combine(x, u, y, v):
    """x*u + y*v as a new sparse vector."""
    result = {}
    if x:
        for k, c in u.items():
            result[k] = x * c
    if y:
        axpy(result, y, v)
    return {k: c for k, c in result.items() if c}


def clean(vector):
    return {k: int(c) for k, c in vector.items() if c}


def scale(vector, factor):
    if not factor:
        return {}
    return {k: factor * c for k, c in vector.items()}


def add_vectors(*vectors):
    result = {}
    for vector in vectors:
        axpy(result, 1, vector)
    return result


class IntMatrix:
    """Sparse integer matrix stored by columns; acts on column vectors."""

    __slots__ = ("rows", "cols", "columns")

    def __init__(self, rows, cols, columns=None):
        self.rows = rows
        self.cols = cols
        self.columns = [dict() for _ in range(cols)] if columns is None else [clean(c) for c in columns]
        if len(self.columns) != cols:
            raise ValueError(f"expected {cols} columns, got {len(self.columns)}")

    @classmethod
    def from_dense(cls, data, cols=None):
        data = [list(row) for row in data]
        rows = len(data)
        cols = len(data[0]) if data else (cols or 0)
        columns = [{i: data[i][j] for i in range(rows) if data[i][j]} for j in range(cols)]
        return cls(rows, cols, columns)

    @classmethod
    def from_rows(cls, row_vectors, cols):
        columns = [dict() for _ in range(cols)]
        for i, row in enumerate(row_vectors):
            for j, c in row.items():
                if c:
                    columns[j][i] = c
        return cls(len(row_vectors), cols, columns)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [{j: 1} for j in range(n)])

    def column(self, j):
        return self.columns[j]

    def row_vectors(self):
        rows = [dict() for _ in range(self.rows)]
        for j, column in enumerate(self.columns):
            for i, c in column.items():
                rows[i][j] = c
        return rows

    def to_dense(self):
        dense = [[0] * self.cols for _ in range(self.rows)]
        for j, column in enumerate(self.columns):
            for i, c in column.items():
                dense[i][j] = c
        return dense

    def apply(self, vector):
        result = {}
        for j, c in vector.items():
            axpy(result, c, self.columns[j])
        return result

    def __matmul__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise AmbientMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        return IntMatrix(self.rows, other.cols, [self.apply(c) for c in other.columns])

    def transpose(self):
        return IntMatrix(self.cols, self.rows, self.row_vectors())

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.columns) == (other.rows, other.cols, other.columns)

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols})"

    def to_domain_matrix(self):
        dense = self.to_dense()
        return DomainMatrix([[ZZ(x) for x in row] for row in dense], (self.rows, self.cols), ZZ)


def _from_domain_matrix(dm):
    rows, cols = dm.shape
    return IntMatrix.from_dense([[int(x) for x in row] for row in dm.to_list()], cols)


class LatticeBasis:
    """A sublattice of Z^n kept in incremental echelon form."""

    __slots__ = ("ambient_rank", "_rows", "_pivots", "_hnf")

    def __init__(self, ambient_rank, vectors=()):
        self.ambient_rank = ambient_rank
        self._rows = {}
        self._pivots = []
        self._hnf = None
        for vector in vectors:
            self.add_vector(vector)

    def _check(self, vector):
        for k in vector:
            if not 0 <= k < self.ambient_rank:
                raise AmbientMismatch(
                    f"coordinate {k} outside ambient rank {self.ambient_rank}", {"coordinate": k})

    def add_vector(self, vector):
        """Insert a vector; return True when the lattice grew."""
        self._check(vector)
        vec = clean(vector)
        rows = self._rows
        changed = False
        while vec:
            j = min(vec)
            row = rows.get(j)
            if row is None:
                if vec[j] < 0:
                    vec = scale(vec, -1)
                rows[j] = vec
                insort(self._pivots, j)
                self._hnf = None
                return True
            a, b = row[j], vec[j]
            if b % a == 0:
                axpy(vec, -(b // a), row)
                continue
            x, y, d = xgcd(a, b)
            rows[j] = combine(x, row, y, vec)
            vec = combine(-b // d, row, a // d, vec)
            self._hnf = None
            changed = True
        return changed

    def add_vectors(self, vectors):
        grew = False
        for vector in vectors:
            grew = self.add_vector(vector) or grew
        return grew

    def __contains__(self, vector):
        self._check(vector)
        vec = clean(vector)
        while vec:
            j = min(vec)
            row = self._rows.get(j)
            if row is None or vec[j] % row[j]:
                return False
            axpy(vec, -(vec[j] // row[j]), row)
        return True

    def coordinates(self, vector):
        """Coefficients on echelon_rows(), or None when the vector is not in the lattice."""
        vec = clean(vector)
        index = {p: i for i, p in enumerate(self._pivots)}
        coefficients = [0] * len(self._pivots)
        while vec:
            j = min(vec)
            row = self._rows.get(j)
            if row is None or vec[j] % row[j]:
                return None
            q = vec[j] // row[j]
            coefficients[index[j]] = q
            axpy(vec, -q, row)
        return coefficients

    @property
    def rank(self):
        return len(self._pivots)

    @property
    def pivots(self):
        return tuple(self._pivots)

    def echelon_rows(self):
        return [self._rows[p] for p in self._pivots]

    def echelon_items(self):
        return [(p, self._rows[p]) for p in self._pivots]

    def hnf_rows(self):
        """The unique row Hermite normal form: entries above each pivot lie in [0, pivot)."""
        if self._hnf is None:
            pivots = self._pivots
            rows = [dict(self._rows[p]) for p in pivots]
            for i in range(len(rows)):
                current = rows[i]
                for k in range(i + 1, len(rows)):
                    c = current.get(pivots[k])
                    if c:
                        q = c // rows[k][pivots[k]]
                        if q:
                            axpy(current, -q, rows[k])
            self._hnf = rows
        return [dict(row) for row in self._hnf]

    def basis(self):
        return self.hnf_rows()

    def pivot_values(self):
        return [self._rows[p][p] for p in self._pivots]

    def to_matrix(self):
        return IntMatrix.from_rows(self.hnf_rows(), self.ambient_rank)

    def digest(self):
        """SHA-256 of the canonical HNF."""
        payload = json.dumps(
            {"ambient_rank": self.ambient_rank,
             "rows": [sorted(row.items()) for row in self.hnf_rows()]},
            separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def restrict(self, coordinates):
        """The intersection with the coordinate sublattice spanned by `coordinates`."""
        keep = sorted(set(coordinates))
        kept = set(keep)
        complement = [k for k in range(self.ambient_rank) if k not in kept]
        order = complement + keep
        forward = {k: i for i, k in enumerate(order)}
        permuted = LatticeBasis(self.ambient_rank, (
            {forward[k]: c for k, c in row.items()} for row in self.echelon_rows()))
        cut = len(complement)
        result = LatticeBasis(self.ambient_rank)
        for pivot, row in permuted.echelon_items():
            if pivot >= cut:
                result.add_vector({order[k]: c for k, c in row.items()})
        return result

    def is_subset_of(self, other):
        return all(row in other for row in self.echelon_rows())

    def __eq__(self, other):
        if not isinstance(other, LatticeBasis):
            return NotImplemented
        return lattice_equal(self, other)

    __hash__ = None

    def __repr__(self):
        return f"LatticeBasis(ambient_rank={self.ambient_rank}, rank={self.rank})"


def hnf(matrix):
    lattice = LatticeBasis(matrix.cols, matrix.row_vectors())
    return IntMatrix.from_rows(lattice.hnf_rows(), matrix.cols)


def snf(matrix):
    """Smith normal form (diag, U, V) with U*M*V = diag; diag lists the nonzero invariant factors."""
    if matrix.rows == 0 or matrix.cols == 0:
        return (), IntMatrix.identity(matrix.rows), IntMatrix.identity(matrix.cols)
    smf, s, t = smith_normal_decomp(matrix.to_domain_matrix())
    dense = smf.to_list()
    diag = tuple(abs(int(dense[i][i])) for i in range(min(matrix.rows, matrix.cols)) if dense[i][i])
    return diag, _from_domain_matrix(s), _from_domain_matrix(t)


def invariant_factors(matrix):
    if matrix.rows == 0 or matrix.cols == 0:
        return ()
    return tuple(abs(int(x)) for x in _sympy_invariant_factors(matrix.to_domain_matrix()) if x)


def integer_kernel(matrix):
    """A Z-basis of {v : M v = 0}, from the echelon form of the columns augmented by the identity."""
    offset = matrix.rows
    augmented = LatticeBasis(offset + matrix.cols)
    for j, column in enumerate(matrix.columns):
        vector = dict(column)
        vector[offset + j] = 1
        augmented.add_vector(vector)
    kernel = LatticeBasis(matrix.cols)
    for pivot, row in augmented.echelon_items():
        if pivot >= offset:
            kernel.add_vector({k - offset: c for k, c in row.items()})
    logger.debug(f"integer kernel of {matrix.rows}x{matrix.cols}: rank {kernel.rank}")
    return kernel


def _check_ambient(a, b):
    if a.ambient_rank != b.ambient_rank:
        raise AmbientMismatch(
            f"ambient ranks {a.ambient_rank} and {b.ambient_rank} differ",
            {"left": a.ambient_rank, "right": b.ambient_rank})


def lattice_equal(a, b):
    _check_ambient(a, b)
    return a.rank == b.rank and a.hnf_rows() == b.hnf_rows()


def lattice_index(a, b):
    """[A : B] for B inside A; math.inf when the ranks differ."""
    _check_ambient(a, b)
    if not b.is_subset_of(a):
        raise ValueError("lattice_index needs the second lattice inside the first")
    if a.rank != b.rank:
        return math.inf
    return math.prod(b.pivot_values()) // math.prod(a.pivot_values())


def lattice_sum(ambient_rank, *lattices):
    total = LatticeBasis(ambient_rank)
    for lattice in lattices:
        _check_ambient(total, lattice)
        total.add_vectors(lattice.echelon_rows())
    return total


def orthogonal(lattice):
    """{x : <b, x> = 0 for every b in the lattice}."""
    return integer_kernel(IntMatrix.from_rows(lattice.echelon_rows(), lattice.ambient_rank))


def saturation(lattice):
    return orthogonal(orthogonal(lattice))


def is_saturated(lattice):
    """Unit HNF pivots certify saturation directly; otherwise compare with the double orthogonal."""
    if all(p == 1 for p in lattice.pivot_values()):
        return True
    return lattice_equal(lattice, saturation(lattice))


def quotient_torsion(lattice):
    """Invariant factors > 1 of Z^n / lattice."""
    if all(p == 1 for p in lattice.pivot_values()):
        return ()
    return tuple(d for d in invariant_factors(lattice.to_matrix()) if d > 1)


def congruence_lattice(ambient_rank, constraints):
    """
    {x in Z^n : row . x = 0 mod m for each (row, m)}, as the projection of the
    kernel of [A | -diag(m)].
    """
    count = len(constraints)
    columns = [dict() for _ in range(ambient_rank + count)]
    for i, (row, modulus) in enumerate(constraints):
        for j, c in row.items():
            if c:
                columns[j][i] = c
        columns[ambient_rank + i][i] = -modulus
    kernel = integer_kernel(IntMatrix(count, ambient_rank + count, columns))
    projected = LatticeBasis(ambient_rank)
    for row in kernel.echelon_rows():
        projected.add_vector({k: c for k, c in row.items() if k < ambient_rank})
    return projected


@dataclass
class ClosureResult:
    lattice: LatticeBasis
    iterations: int
    generator_count: int


def span_closure_with_stats(gens, endos, ambient_rank=None):
    """
    Smallest lattice containing `gens` and stable under every endomorphism.

    Breadth-first: each round inserts the pending vectors, then queues the
    images of the ones that enlarged the lattice.
    """
    gens = [clean(g) for g in gens]
    if ambient_rank is None:
        if endos:
            ambient_rank = endos[0].cols
        else:
            ambient_rank = max((max(g) for g in gens if g), default=-1) + 1
    for endo in endos:
        if endo.rows != ambient_rank or endo.cols != ambient_rank:
            raise AmbientMismatch(f"endomorphism of shape {endo.rows}x{endo.cols} on rank {ambient_rank}")
    lattice = LatticeBasis(ambient_rank)
    frontier = gens
    iterations = 0
    while frontier:
        iterations += 1
        accepted = [v for v in frontier if lattice.add_vector(v)]
        logger.debug(f"closure round {iterations}: {len(accepted)} of {len(frontier)} new, rank {lattice.rank}")
        images = parallel_map(lambda v: [endo.apply(v) for endo in endos], accepted)
        frontier = [image for batch in images for image in batch]
    return ClosureResult(lattice, iterations, len(gens))


def span_closure(gens, endos, ambient_rank=None):
    return span_closure_with_stats(gens, endos, ambient_rank).lattice


class QuotientLattice:
    """
    Z^n modulo a relation lattice. Canonical coordinates are the non-pivot columns of
    the relation HNF plus the residues at pivots larger than one.
    """

    def __init__(self, ambient_rank, relations):
        if relations.ambient_rank != ambient_rank:
            raise AmbientMismatch(f"relations live in rank {relations.ambient_rank}, not {ambient_rank}")
        self.ambient_rank = ambient_rank
        self.relations = relations
        self._pivot_rows = dict(zip(relations.pivots, relations.hnf_rows()))
        units = {p for p, row in self._pivot_rows.items() if row[p] == 1}
        self.coordinate_columns = tuple(k for k in range(ambient_rank) if k not in units)
        self._coordinate_index = {k: i for i, k in enumerate(self.coordinate_columns)}
        self.linear = len(units) == relations.rank
        self._images = {}
        self._torsion = None

    @property
    def free_rank(self):
        return self.ambient_rank - self.relations.rank

    @property
    def rank(self):
        return self.free_rank

    @property
    def dimension(self):
        """Number of canonical coordinates."""
        return len(self.coordinate_columns)

    @property
    def torsion(self):
        if self._torsion is None:
            self._torsion = quotient_torsion(self.relations)
        return self._torsion

    def coordinate_column(self, index):
        return self.coordinate_columns[index]

    def coordinate_index(self, column):
        return self._coordinate_index.get(column)

    def column_image(self, column):
        """reduce(e_column) for torsion-free unit-pivot quotients, where reduce is linear."""
        image = self._images.get(column)
        if image is None:
            if column in self._coordinate_index:
                image = {self._coordinate_index[column]: 1}
            else:
                image = {self._coordinate_index[k]: -c
                         for k, c in self._pivot_rows[column].items() if k != column}
            self._images[column] = image
        return image

    def reduce(self, vector):
        for k in vector:
            if not 0 <= k < self.ambient_rank:
                raise AmbientMismatch(f"coordinate {k} outside ambient rank {self.ambient_rank}")
        if self.linear:
            result = {}
            for k, c in vector.items():
                if c:
                    axpy(result, c, self.column_image(k))
            return result
        vec = clean(vector)
        for p in self.relations.pivots:
            c = vec.get(p)
            if c:
                row = self._pivot_rows[p]
                axpy(vec, -(c // row[p]), row)
        return {self._coordinate_index[k]: c for k, c in vec.items()}

    def __repr__(self):
        return f"QuotientLattice(ambient_rank={self.ambient_rank}, rank={self.rank})"


def quotient_reduce(quotient, vector):
    return quotient.reduce(vector)
