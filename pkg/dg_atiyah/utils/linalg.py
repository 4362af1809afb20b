"""Exact linear algebra over QQ, backed by sympy's DomainMatrix.

Matrices cross this boundary as lists (or sparse dicts) of ``Fraction`` and
come back the same way; sympy domain elements never leak out.
"""

import logging
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from ..errors import StructuralError

logger = logging.getLogger(__name__)

SparseRows = Sequence[Mapping[int, Fraction]]


def to_qq(value: Fraction):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def from_qq(element) -> Fraction:
    return Fraction(int(element.numerator), int(element.denominator))


def _sparse(rows: Mapping[int, Mapping[int, Fraction]], shape: tuple[int, int]) -> DomainMatrix:
    data = {}
    for i, row in rows.items():
        entries = {j: to_qq(v) for j, v in row.items() if v}
        if entries:
            data[i] = entries
    return DomainMatrix(data, shape, QQ)


def _dense_to_sparse(matrix: Sequence[Sequence[Fraction]]) -> tuple[dict, tuple[int, int]]:
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    rows = {}
    for i, row in enumerate(matrix):
        if len(row) != ncols:
            raise StructuralError("ragged matrix")
        rows[i] = {j: v for j, v in enumerate(row) if v}
    return rows, (nrows, ncols)


def _rref_rows(dm: DomainMatrix) -> tuple[dict[int, dict[int, Fraction]], tuple[int, ...]]:
    reduced, pivots = dm.rref()
    sparse = reduced.to_sparse().rep
    rows = {i: {j: from_qq(v) for j, v in row.items()} for i, row in sparse.items()}
    return rows, tuple(pivots)


def solve(equations: SparseRows, rhs: Sequence[Fraction], ncols: int) -> Optional[list[Fraction]]:
    """Solve ``A x = b`` exactly; ``equations[r]`` maps column -> coefficient.

    Returns one solution (free unknowns set to zero) or ``None`` when the
    system is inconsistent.
    """
    if len(equations) != len(rhs):
        raise StructuralError("equation count and right-hand side length differ")
    if not equations:
        return [Fraction(0)] * ncols
    augmented = {}
    for r, (row, b) in enumerate(zip(equations, rhs)):
        entries = dict(row)
        if b:
            entries[ncols] = b
        augmented[r] = entries
    logger.debug("solving %d x %d exact system", len(equations), ncols)
    rows, pivots = _rref_rows(_sparse(augmented, (len(equations), ncols + 1)))
    if ncols in pivots:
        return None
    solution = [Fraction(0)] * ncols
    for r, pivot in enumerate(pivots):
        solution[pivot] = rows.get(r, {}).get(ncols, Fraction(0))
    return solution


def rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    rows, shape = _dense_to_sparse(matrix)
    if 0 in shape:
        return 0
    return len(_sparse(rows, shape).rref()[1])


def rref(matrix: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], tuple[int, ...]]:
    """Reduced row echelon form (dense) and pivot columns."""
    rows, (nrows, ncols) = _dense_to_sparse(matrix)
    if nrows == 0 or ncols == 0:
        return [[Fraction(0)] * ncols for _ in range(nrows)], ()
    reduced, pivots = _rref_rows(_sparse(rows, (nrows, ncols)))
    dense = [[reduced.get(i, {}).get(j, Fraction(0)) for j in range(ncols)] for i in range(nrows)]
    return dense, pivots


def nullspace(matrix: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> list[list[Fraction]]:
    """Basis of the right kernel, one vector per free column, in column order."""
    rows, shape = _dense_to_sparse(matrix)
    if ncols is not None and shape[0] == 0:
        shape = (0, ncols)
    nrows, width = shape
    if nrows == 0:
        return [[Fraction(int(i == j)) for j in range(width)] for i in range(width)]
    reduced, pivots = _rref_rows(_sparse(rows, shape))
    free = [j for j in range(width) if j not in pivots]
    basis = []
    for f in free:
        vector = [Fraction(0)] * width
        vector[f] = Fraction(1)
        for r, pivot in enumerate(pivots):
            vector[pivot] = -reduced.get(r, {}).get(f, Fraction(0))
        basis.append(vector)
    return basis


def inverse(matrix: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    rows, (nrows, ncols) = _dense_to_sparse(matrix)
    if nrows != ncols:
        raise StructuralError(f"cannot invert a {nrows}x{ncols} matrix")
    augmented = {i: dict(row) for i, row in rows.items()}
    for i in range(nrows):
        augmented.setdefault(i, {})[ncols + i] = Fraction(1)
    reduced, pivots = _rref_rows(_sparse(augmented, (nrows, 2 * ncols)))
    if pivots[:nrows] != tuple(range(nrows)):
        raise StructuralError("matrix is not invertible")
    return [
        [reduced.get(i, {}).get(ncols + j, Fraction(0)) for j in range(ncols)]
        for i in range(nrows)
    ]


def mat_vec(matrix: Sequence[Sequence[Fraction]], vector: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, vector)), Fraction(0)) for row in matrix]
