from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .errors import (
    DomainError,
    PreconditionError,
    SingularMatrixError,
    UnsupportedConfigurationError,
)

# Residues are machine integers: p**level must stay below a signed 64-bit word.
MAX_MODULUS = 2**63

Entries = tuple[int, int, int, int]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    factor = 3
    while factor * factor <= n:
        if n % factor == 0:
            return False
        factor += 2
    return True


@lru_cache(maxsize=None)
def check_precision(p: int, level: int) -> None:
    """Reject (p, level) pairs the workbench cannot represent exactly."""
    if not isinstance(p, int) or not is_prime(p) or p < 5:
        raise UnsupportedConfigurationError(f"p must be a prime >= 5, got {p!r}.")
    if not isinstance(level, int) or level < 1:
        raise UnsupportedConfigurationError(f"level must be >= 1, got {level!r}.")
    if p**level >= MAX_MODULUS:
        raise UnsupportedConfigurationError(
            f"p**N does not fit in 64 bits for p={p}, N={level}."
        )


def valuation(value: int, p: int, level: int) -> int:
    """p-adic valuation of value mod p**level; zero has valuation level."""
    value %= p**level
    if value == 0:
        return level
    count = 0
    while value % p == 0:
        value //= p
        count += 1
    return count


def multiplicative_order(a: int, modulus: int) -> int:
    a %= modulus
    if a == 0:
        raise DomainError("zero has no multiplicative order.")
    order = 1
    current = a
    while current != 1 % modulus:
        current = (current * a) % modulus
        order += 1
        if order > modulus:
            raise DomainError(f"{a} is not a unit mod {modulus}.")
    return order


def primitive_root(p: int) -> int:
    for candidate in range(2, p):
        if multiplicative_order(candidate, p) == p - 1:
            return candidate
    raise DomainError(f"no primitive root found mod {p}.")


def gl2_order(p: int, level: int) -> int:
    return p ** (4 * (level - 1)) * (p * p - 1) * (p * p - p)


def matmul_mod(x: Entries, y: Entries, modulus: int) -> Entries:
    a, b, c, d = x
    e, f, g, h = y
    return (
        (a * e + b * g) % modulus,
        (a * f + b * h) % modulus,
        (c * e + d * g) % modulus,
        (c * f + d * h) % modulus,
    )


def matpow_mod(x: Entries, exponent: int, modulus: int) -> Entries:
    if exponent < 0:
        raise DomainError("matpow_mod expects a non-negative exponent.")
    result: Entries = (1 % modulus, 0, 0, 1 % modulus)
    base = x
    while exponent:
        if exponent & 1:
            result = matmul_mod(result, base, modulus)
        base = matmul_mod(base, base, modulus)
        exponent >>= 1
    return result


@dataclass(frozen=True)
class Residue:
    value: int
    p: int
    level: int

    def __post_init__(self) -> None:
        check_precision(self.p, self.level)
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    @property
    def modulus(self) -> int:
        return self.p**self.level

    def _other(self, other: object) -> tuple[int, int] | None:
        if isinstance(other, Residue):
            if other.p != self.p:
                raise DomainError(
                    f"cannot combine residues mod {self.p} and mod {other.p}."
                )
            return other.value, min(self.level, other.level)
        if isinstance(other, int):
            return other, self.level
        return None

    def __add__(self, other: object) -> Residue:
        pair = self._other(other)
        if pair is None:
            return NotImplemented
        return Residue(self.value + pair[0], self.p, pair[1])

    __radd__ = __add__

    def __sub__(self, other: object) -> Residue:
        pair = self._other(other)
        if pair is None:
            return NotImplemented
        return Residue(self.value - pair[0], self.p, pair[1])

    def __rsub__(self, other: object) -> Residue:
        pair = self._other(other)
        if pair is None:
            return NotImplemented
        return Residue(pair[0] - self.value, self.p, pair[1])

    def __mul__(self, other: object) -> Residue:
        pair = self._other(other)
        if pair is None:
            return NotImplemented
        return Residue(self.value * pair[0], self.p, pair[1])

    __rmul__ = __mul__

    def __neg__(self) -> Residue:
        return Residue(-self.value, self.p, self.level)

    def __pow__(self, exponent: int) -> Residue:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return Residue(pow(self.value, exponent, self.modulus), self.p, self.level)

    def __int__(self) -> int:
        return self.value

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def inverse(self) -> Residue:
        if not self.is_unit():
            raise DomainError(f"{self.value} is not a unit mod {self.p}^{self.level}.")
        return Residue(pow(self.value, -1, self.modulus), self.p, self.level)

    def valuation(self) -> int:
        return valuation(self.value, self.p, self.level)

    def reduce(self, level: int) -> Residue:
        if level > self.level:
            raise DomainError(f"cannot reduce level {self.level} to {level}.")
        return Residue(self.value, self.p, level)

    def lift(self, level: int) -> Residue:
        """Canonical lift: the same integer representative at a higher level."""
        return Residue(self.value, self.p, level)


@dataclass(frozen=True)
class Mat2:
    """2x2 matrix over Z/p^level, entries stored row-major as a, b / c, d."""

    a: int
    b: int
    c: int
    d: int
    p: int
    level: int

    def __post_init__(self) -> None:
        check_precision(self.p, self.level)
        modulus = self.modulus
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, int(getattr(self, name)) % modulus)

    @classmethod
    def identity(cls, p: int, level: int) -> Mat2:
        return cls(1, 0, 0, 1, p, level)

    @classmethod
    def zero(cls, p: int, level: int) -> Mat2:
        return cls(0, 0, 0, 0, p, level)

    @classmethod
    def diag(cls, x: int | Residue, y: int | Residue, p: int, level: int) -> Mat2:
        return cls(int(x), 0, 0, int(y), p, level)

    @classmethod
    def from_entries(cls, entries: Entries, p: int, level: int) -> Mat2:
        a, b, c, d = entries
        return cls(a, b, c, d, p, level)

    @classmethod
    def from_rows(cls, rows: list[list[int]], p: int, level: int) -> Mat2:
        (a, b), (c, d) = rows
        return cls(a, b, c, d, p, level)

    @property
    def modulus(self) -> int:
        return self.p**self.level

    @property
    def entries(self) -> Entries:
        return (self.a, self.b, self.c, self.d)

    @property
    def rows(self) -> tuple[tuple[Residue, Residue], tuple[Residue, Residue]]:
        return (
            (self.entry(0, 0), self.entry(0, 1)),
            (self.entry(1, 0), self.entry(1, 1)),
        )

    def entry(self, row: int, col: int) -> Residue:
        return Residue(self.entries[2 * row + col], self.p, self.level)

    def _level_with(self, other: Mat2) -> int:
        if other.p != self.p:
            raise DomainError(f"cannot combine matrices mod {self.p} and {other.p}.")
        return min(self.level, other.level)

    def __add__(self, other: Mat2) -> Mat2:
        level = self._level_with(other)
        return Mat2(
            self.a + other.a,
            self.b + other.b,
            self.c + other.c,
            self.d + other.d,
            self.p,
            level,
        )

    def __sub__(self, other: Mat2) -> Mat2:
        return self + (-other)

    def __neg__(self) -> Mat2:
        return Mat2(-self.a, -self.b, -self.c, -self.d, self.p, self.level)

    def __matmul__(self, other: Mat2) -> Mat2:
        level = self._level_with(other)
        return Mat2.from_entries(
            matmul_mod(self.entries, other.entries, self.p**level), self.p, level
        )

    def scale(self, factor: int | Residue) -> Mat2:
        k = int(factor)
        return Mat2(k * self.a, k * self.b, k * self.c, k * self.d, self.p, self.level)

    def det(self) -> Residue:
        return Residue(self.a * self.d - self.b * self.c, self.p, self.level)

    def trace(self) -> Residue:
        return Residue(self.a + self.d, self.p, self.level)

    def is_invertible(self) -> bool:
        return self.det().is_unit()

    def inverse(self) -> Mat2:
        det = self.det()
        if not det.is_unit():
            raise SingularMatrixError(
                f"determinant {det.value} is not a unit mod {self.p}."
            )
        inv = pow(det.value, -1, self.modulus)
        return Mat2(
            self.d * inv, -self.b * inv, -self.c * inv, self.a * inv, self.p, self.level
        )

    def __pow__(self, exponent: int) -> Mat2:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return Mat2.from_entries(
            matpow_mod(self.entries, exponent, self.modulus), self.p, self.level
        )

    def conjugate(self, by: Mat2) -> Mat2:
        return by @ self @ by.inverse()

    def reduce(self, level: int) -> Mat2:
        if level > self.level:
            raise DomainError(f"cannot reduce level {self.level} to {level}.")
        return Mat2(self.a, self.b, self.c, self.d, self.p, level)

    def lift(self, level: int) -> Mat2:
        """Canonical lift: same integer entries read at a higher level."""
        return Mat2(self.a, self.b, self.c, self.d, self.p, level)

    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def is_zero(self) -> bool:
        return self.entries == (0, 0, 0, 0)

    def is_diagonal(self) -> bool:
        return self.b == 0 and self.c == 0

    def is_trace_zero(self) -> bool:
        return self.trace().value == 0

    def to_rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]


@dataclass(frozen=True)
class TraceZeroMat(Mat2):
    def __post_init__(self) -> None:
        super().__post_init__()
        if (self.a + self.d) % self.modulus != 0:
            raise DomainError(
                f"matrix {self.to_rows()} has nonzero trace mod {self.p}^{self.level}."
            )

    @classmethod
    def from_mat(cls, m: Mat2) -> TraceZeroMat:
        return cls(m.a, m.b, m.c, m.d, m.p, m.level)


Scalar = Union[int, Residue]


def teichmuller(a: Scalar, p: int, level: int) -> Residue:
    """The unique (p-1)-st root of unity mod p**level congruent to a mod p."""
    check_precision(p, level)
    value = int(a) % p
    if value == 0:
        raise DomainError(f"{int(a)} is divisible by {p}; no Teichmuller lift.")
    modulus = p**level
    return Residue(pow(value, p ** (level - 1), modulus), p, level)


def hensel_diagonalize(m: Mat2) -> tuple[Mat2, Mat2]:
    """Return (C, D) with C = I mod p and C m C^-1 = D diagonal.

    m must be diagonal mod p with distinct diagonal entries mod p. Each step
    conjugates by I + X with X off-diagonal, pushing the off-diagonal
    entries at least one p-power deeper. The conjugator is normalized so that
    the columns of C^-1 (the eigenvectors of m) have leading coordinate 1.
    """
    p, level = m.p, m.level
    if m.b % p or m.c % p:
        raise PreconditionError(f"matrix {m.to_rows()} is not diagonal mod {p}.")
    if (m.a - m.d) % p == 0:
        raise PreconditionError(
            f"matrix {m.to_rows()} has repeated eigenvalues mod {p}."
        )
    modulus = m.modulus
    conjugator = Mat2.identity(p, level)
    current = m
    for _ in range(level + 1):
        if current.is_diagonal():
            break
        gap_inv = pow(current.a - current.d, -1, modulus)
        step = Mat2(1, current.b * gap_inv, -current.c * gap_inv, 1, p, level)
        current = current.conjugate(step)
        conjugator = step @ conjugator
    if not current.is_diagonal():
        raise PreconditionError(f"Hensel iteration did not converge for {m.to_rows()}.")

    eigenvectors = conjugator.inverse()
    conjugator = Mat2.diag(eigenvectors.a, eigenvectors.d, p, level) @ conjugator
    return conjugator, current
