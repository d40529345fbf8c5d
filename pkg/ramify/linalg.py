from __future__ import annotations

from collections.abc import Sequence

from .errors import DomainError

Vector = list[int]
Matrix = list[list[int]]


def clone_matrix(matrix: Sequence[Sequence[int]], p: int) -> Matrix:
    """Copy of matrix with every entry reduced mod p."""
    return [[value % p for value in row] for row in matrix]


def row_reduce(matrix: Sequence[Sequence[int]], p: int) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over F_p and the list of pivot columns."""
    reduced = clone_matrix(matrix, p)
    if not reduced:
        return reduced, []
    n_rows, n_cols = len(reduced), len(reduced[0])
    pivots: list[int] = []
    row = 0
    for col in range(n_cols):
        if row >= n_rows:
            break
        pivot = next((r for r in range(row, n_rows) if reduced[r][col]), None)
        if pivot is None:
            continue
        reduced[row], reduced[pivot] = reduced[pivot], reduced[row]
        inv = pow(reduced[row][col], -1, p)
        reduced[row] = [(value * inv) % p for value in reduced[row]]
        for other in range(n_rows):
            factor = reduced[other][col]
            if other != row and factor:
                reduced[other] = [
                    (value - factor * lead) % p
                    for value, lead in zip(reduced[other], reduced[row])
                ]
        pivots.append(col)
        row += 1
    return reduced, pivots


def rank(matrix: Sequence[Sequence[int]], p: int) -> int:
    return len(row_reduce(matrix, p)[1])


def nullspace(matrix: Sequence[Sequence[int]], p: int, n_cols: int) -> list[Vector]:
    """Basis of {x : matrix x = 0} over F_p, one vector per free column.

    n_cols is explicit so that an empty system still has a well-defined
    ambient dimension.
    """
    if not matrix:
        return [[int(i == j) for j in range(n_cols)] for i in range(n_cols)]
    reduced, pivots = row_reduce(matrix, p)
    free = [col for col in range(n_cols) if col not in pivots]
    basis: list[Vector] = []
    for free_col in free:
        vector = [0] * n_cols
        vector[free_col] = 1
        for row, pivot_col in enumerate(pivots):
            vector[pivot_col] = (-reduced[row][free_col]) % p
        basis.append(vector)
    return basis


def solve(
    matrix: Sequence[Sequence[int]], target: Sequence[int], p: int
) -> Vector | None:
    """One solution x of matrix x = target over F_p, or None if inconsistent."""
    if len(matrix) != len(target):
        raise DomainError("matrix and target have different row counts.")
    n_cols = len(matrix[0]) if matrix else 0
    augmented = [list(row) + [value] for row, value in zip(matrix, target)]
    reduced, pivots = row_reduce(augmented, p)
    if n_cols in pivots:
        return None
    solution = [0] * n_cols
    for row, pivot_col in enumerate(pivots):
        solution[pivot_col] = reduced[row][n_cols]
    return solution


def columns_to_matrix(columns: Sequence[Sequence[int]]) -> Matrix:
    """Matrix whose columns are the given vectors."""
    if not columns:
        return []
    return [list(row) for row in zip(*columns)]


def in_span(vector: Sequence[int], basis: Sequence[Sequence[int]], p: int) -> bool:
    if not basis:
        return all(value % p == 0 for value in vector)
    return solve(columns_to_matrix(basis), vector, p) is not None
