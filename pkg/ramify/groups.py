from __future__ import annotations

import logging
import time
from collections import deque
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from itertools import product
from typing import Literal

from .errors import PartialSearchError, PreconditionError, UnsupportedConfigurationError
from .logs import log_debug, log_info
from .zmod import (
    Entries,
    Mat2,
    Residue,
    TraceZeroMat,
    check_precision,
    gl2_order,
    matmul_mod,
    primitive_root,
    teichmuller,
)

Variant = Literal["uncond", "grh"]

_IDENTITY: Entries = (1, 0, 0, 1)


@dataclass(frozen=True)
class CapExceeded:
    cap: int


def _closure_entries(
    generators: Sequence[Entries], modulus: int, cap: int | None
) -> int | CapExceeded:
    identity = (1 % modulus, 0, 0, 1 % modulus)
    visited = {identity}
    queue = deque([identity])
    while queue:
        current = queue.popleft()
        for generator in generators:
            image = matmul_mod(current, generator, modulus)
            if image in visited:
                continue
            visited.add(image)
            if cap is not None and len(visited) > cap:
                return CapExceeded(cap)
            queue.append(image)
    return len(visited)


def closure(generators: Sequence[Mat2], cap: int | None = None) -> int | CapExceeded:
    """Order of the subgroup generated by `generators`, found breadth first.

    Returns CapExceeded as soon as more than `cap` elements have been seen.
    """
    if not generators:
        return 1
    p, level = generators[0].p, generators[0].level
    for generator in generators:
        if generator.p != p or generator.level != level:
            raise UnsupportedConfigurationError("generators live in different rings.")
        generator.inverse()
    return _closure_entries([g.entries for g in generators], p**level, cap)


def matrix_order(m: Mat2) -> int:
    m.inverse()
    bound = gl2_order(m.p, m.level)
    current = m
    order = 1
    while not current.is_identity():
        current = current @ m
        order += 1
        if order > bound:
            raise UnsupportedConfigurationError("matrix order exceeds |GL2|.")
    return order


def _entries_order(x: Entries, modulus: int) -> int:
    current = x
    order = 1
    while current != _IDENTITY:
        current = matmul_mod(current, x, modulus)
        order += 1
    return order


@dataclass(frozen=True)
class NoSection:
    examined: int
    total: int
    closures: int
    elapsed: float


@dataclass(frozen=True)
class SectionFound:
    witness: tuple[Mat2, Mat2]
    examined: int
    total: int
    closures: int
    elapsed: float


def gl2_generators(p: int) -> tuple[Mat2, Mat2]:
    """diag(g, 1) for a primitive root g and the order-6 element (0, -1; 1, 1)."""
    g = primitive_root(p)
    return Mat2.diag(g, 1, p, 1), Mat2(0, -1, 1, 1, p, 1)


def _lifts(x: Mat2, level: int) -> Iterator[Entries]:
    p = x.p
    depth = p ** (level - 1)
    modulus = p**level
    for a, b, c, d in product(range(depth), repeat=4):
        yield (
            (x.a + p * a) % modulus,
            (x.b + p * b) % modulus,
            (x.c + p * c) % modulus,
            (x.d + p * d) % modulus,
        )


def section_search(
    p: int,
    *,
    level: int = 2,
    generators: tuple[Mat2, Mat2] | None = None,
    budget: int | None = None,
    logger: logging.Logger | None = None,
) -> NoSection | SectionFound:
    """Look for lifts (X, Y) mod p^level of a generating pair of a group H
    mod p that generate a subgroup of order |H|.

    Such a subgroup maps onto H and would be a section of reduction. H is
    GL2(F_p) unless other residual generators are given.
    Lifts whose orders differ from their residual images are skipped before
    the capped closure, which aborts at |H| + 1 elements.
    """
    check_precision(p, level)
    started = time.perf_counter()
    x, y = generators if generators is not None else gl2_generators(p)
    if (x.p, x.level, y.p, y.level) != (p, 1, p, 1):
        raise PreconditionError("residual generators must live mod p.")
    group_order = closure([x, y])
    assert isinstance(group_order, int)
    if generators is None and group_order != gl2_order(p, 1):
        raise PreconditionError(f"chosen pair does not generate GL2(F_{p}).")

    modulus = p**level
    order_x = _entries_order(x.entries, p)
    order_y = _entries_order(y.entries, p)
    order_xy = _entries_order(matmul_mod(x.entries, y.entries, p), p)
    lifts_per_generator = p ** (4 * (level - 1))
    total = lifts_per_generator**2

    y_lifts = [
        lift for lift in _lifts(y, level) if _entries_order(lift, modulus) == order_y
    ]
    log_info(
        logger,
        "Section search p=%d level=%d candidates=%d y_lifts_kept=%d",
        p,
        level,
        total,
        len(y_lifts),
    )

    examined = 0
    closures = 0
    for x_lift in _lifts(x, level):
        if budget is not None and examined + lifts_per_generator > budget:
            raise PartialSearchError(
                f"budget {budget} exhausted after {examined} of {total} candidates.",
                examined=examined,
                total=total,
            )
        examined += lifts_per_generator
        if _entries_order(x_lift, modulus) != order_x:
            continue
        for y_lift in y_lifts:
            product_lift = matmul_mod(x_lift, y_lift, modulus)
            if _entries_order(product_lift, modulus) != order_xy:
                continue
            closures += 1
            size = _closure_entries([x_lift, y_lift], modulus, group_order)
            if size == group_order:
                elapsed = time.perf_counter() - started
                log_info(logger, "Section found after %d closures", closures)
                return SectionFound(
                    witness=(
                        Mat2.from_entries(x_lift, p, level),
                        Mat2.from_entries(y_lift, p, level),
                    ),
                    examined=examined,
                    total=total,
                    closures=closures,
                    elapsed=elapsed,
                )
        log_debug(logger, "Examined %d/%d candidates", examined, total)

    elapsed = time.perf_counter() - started
    log_info(
        logger,
        "No section: examined=%d closures=%d elapsed=%.2fs",
        examined,
        closures,
        elapsed,
    )
    return NoSection(
        examined=examined, total=total, closures=closures, elapsed=elapsed
    )


def _act(c: Mat2, n: TraceZeroMat) -> TraceZeroMat:
    residual = c.reduce(1)
    return TraceZeroMat.from_mat(n.conjugate(residual))


@dataclass(frozen=True)
class SemidirectElement:
    """(n, c) in N x| C with N a tower of Ad0 layers over F_p.

    Layers are ordered bottom to top; c acts on every layer by conjugation
    through its reduction mod p.
    """

    layers: tuple[TraceZeroMat, ...]
    c_part: Mat2

    def __post_init__(self) -> None:
        for layer in self.layers:
            if layer.p != self.c_part.p or layer.level != 1:
                raise UnsupportedConfigurationError(
                    "layers must be trace-zero matrices over F_p."
                )

    @classmethod
    def identity(cls, p: int, level: int, depth: int) -> SemidirectElement:
        zero = TraceZeroMat(0, 0, 0, 0, p, 1)
        return cls((zero,) * depth, Mat2.identity(p, level))

    def __mul__(self, other: SemidirectElement) -> SemidirectElement:
        if len(self.layers) != len(other.layers):
            raise UnsupportedConfigurationError("elements have different depths.")
        layers = tuple(
            TraceZeroMat.from_mat(mine + _act(self.c_part, theirs))
            for mine, theirs in zip(self.layers, other.layers)
        )
        return SemidirectElement(layers, self.c_part @ other.c_part)

    def inverse(self) -> SemidirectElement:
        c_inv = self.c_part.inverse()
        layers = tuple(
            TraceZeroMat.from_mat(-_act(c_inv, layer)) for layer in self.layers
        )
        return SemidirectElement(layers, c_inv)

    def project_down(self) -> SemidirectElement:
        """Drop the top Ad0 layer."""
        return SemidirectElement(self.layers[:-1], self.c_part)

    def is_identity(self) -> bool:
        return self.c_part.is_identity() and all(
            layer.is_zero() for layer in self.layers
        )


def element_order(x: SemidirectElement) -> int:
    """ord(c) times p when the accumulated layer part is nonzero.

    x^ord(c) = (sum of c^j . n, I) lives in an elementary abelian p-group.
    """
    c_order = matrix_order(x.c_part)
    power = SemidirectElement.identity(x.c_part.p, x.c_part.level, len(x.layers))
    for _ in range(c_order):
        power = power * x
    return c_order if power.is_identity() else c_order * x.c_part.p


def layer_centralizer_order(a_residual: Mat2) -> int:
    """Number of trace-zero X over F_p with a X a^-1 = X."""
    a = a_residual.reduce(1)
    if not a.is_diagonal() or a.a == a.d:
        raise UnsupportedConfigurationError(
            f"{a.to_rows()} is not diagonal with distinct entries mod {a.p}."
        )
    p = a.p
    a_inv = a.inverse()
    count = 0
    for x, y, z in product(range(p), repeat=3):
        layer = Mat2(x, y, z, -x, p, 1)
        if a @ layer @ a_inv == layer:
            count += 1
    return count


@dataclass(frozen=True)
class ChebotarevClassSpec:
    variant: Variant
    p: int
    k: int
    A: Mat2
    B: TraceZeroMat
    frobenius_congruence: Residue

    def element(self) -> SemidirectElement:
        return SemidirectElement((self.B,), self.A)


def chebotarev_class(variant: Variant, p: int, k: int) -> ChebotarevClassSpec:
    """Frobenius class (A, B) used to pick the stage-(k+1) primes.

    Primes in the class satisfy q = 2* mod p^(k+2) with 2* the Teichmuller
    lift of 2.
    """
    if variant not in ("uncond", "grh"):
        raise UnsupportedConfigurationError(f"unknown variant {variant!r}.")
    level = k + 2
    two_star = teichmuller(2, p, level)
    if variant == "uncond":
        a = Mat2.diag(two_star, 1, p, level)
        b = TraceZeroMat(1, 0, 0, -1, p, 1)
    else:
        shift = p ** (k + 1)
        a = Mat2.diag(two_star.value * (1 + shift), 1 - shift, p, level)
        b = TraceZeroMat(0, 0, 0, 0, p, 1)
    return ChebotarevClassSpec(
        variant=variant, p=p, k=k, A=a, B=b, frobenius_congruence=two_star
    )


def is_torsion_free_lift(tau: Mat2) -> bool:
    """tau = I mod p and tau != I: has infinite order in GL2(Z_p) for odd p."""
    return tau.reduce(1).is_identity() and not tau.is_identity()
