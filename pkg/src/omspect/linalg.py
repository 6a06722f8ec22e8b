"""Small exact dense linear algebra over QuadScalar (dimensions here are <= 4)."""
from __future__ import annotations

from .scalars import QS0, QS1, QuadScalar

Vector = tuple
Matrix = tuple


def vec(entries) -> Vector:
    return tuple(x if isinstance(x, QuadScalar) else QuadScalar(x) for x in entries)


def dot(u: Vector, v: Vector) -> QuadScalar:
    s = QS0
    for x, y in zip(u, v, strict=True):
        s = s + x * y
    return s


def outer(u: Vector, v: Vector) -> Matrix:
    return tuple(tuple(x * y for y in v) for x in u)


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_scale(c: QuadScalar, A: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in row) for row in A)


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, k, m = len(A), len(B), len(B[0])
    cols = list(zip(*B))
    return tuple(tuple(dot(A[i], cols[j]) for j in range(m)) for i in range(n))


def identity(d: int) -> Matrix:
    return tuple(tuple(QS1 if i == j else QS0 for j in range(d)) for i in range(d))


def zeros(d: int) -> Matrix:
    return tuple((QS0,) * d for _ in range(d))


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def trace(A: Matrix) -> QuadScalar:
    t = QS0
    for i in range(len(A)):
        t = t + A[i][i]
    return t


def trace_product(A: Matrix, B: Matrix) -> QuadScalar:
    """trace(A @ B) without forming the product."""
    t = QS0
    for i in range(len(A)):
        for j in range(len(A)):
            t = t + A[i][j] * B[j][i]
    return t


def is_symmetric(A: Matrix) -> bool:
    d = len(A)
    return all(A[i][j] == A[j][i] for i in range(d) for j in range(i + 1, d))
