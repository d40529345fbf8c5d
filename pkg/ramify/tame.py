from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Literal

from . import linalg
from .errors import (
    CannotAdjustError,
    ExponentRangeError,
    InconsistentLiftError,
    InvalidCocycleError,
    PreconditionError,
    UnsupportedConfigurationError,
)
from .zmod import (
    Entries,
    Mat2,
    Residue,
    TraceZeroMat,
    check_precision,
    hensel_diagonalize,
    matmul_mod,
    matpow_mod,
    multiplicative_order,
)

CocycleKind = Literal["coboundary", "unramified", "null", "mixed"]


@dataclass(frozen=True)
class TameModel:
    """Tame quotient at a prime l: sigma tau sigma^-1 = tau^l.

    `level` is the precision cap N at which l is known. tau_order and
    sigma_order describe the finite quotient used by the brute-force oracles.
    """

    p: int
    l: int
    level: int
    tau_order: int | None = None
    sigma_order: int | None = None

    def __post_init__(self) -> None:
        check_precision(self.p, self.level)
        object.__setattr__(self, "l", self.l % self.p**self.level)
        residual = self.l % self.p
        if residual in (0, 1, self.p - 1):
            raise UnsupportedConfigurationError(
                f"l must not be 0 or +-1 mod p; got l = {residual} mod {self.p}."
            )
        tau_order = self.tau_order if self.tau_order is not None else self.p
        sigma_order = (
            self.sigma_order
            if self.sigma_order is not None
            else self.p * multiplicative_order(self.l, self.p)
        )
        if sigma_order % (self.p * multiplicative_order(self.l, self.p)):
            raise UnsupportedConfigurationError(
                f"sigma_order {sigma_order} is not divisible by p * ord_p(l)."
            )
        if pow(self.l, sigma_order, tau_order) != 1 % tau_order:
            raise UnsupportedConfigurationError(
                f"l^{sigma_order} is not 1 mod tau_order {tau_order}."
            )
        object.__setattr__(self, "tau_order", tau_order)
        object.__setattr__(self, "sigma_order", sigma_order)

    @property
    def residual_l(self) -> int:
        return self.l % self.p

    def residual_frobenius(self) -> Mat2:
        return Mat2.diag(self.residual_l, 1, self.p, 1)


def trace_zero(x: int, y: int, z: int, p: int) -> TraceZeroMat:
    """The trace-zero matrix (x, y; z, -x) over F_p."""
    return TraceZeroMat(x, y, z, -x, p, 1)


def _coordinates(m: Mat2) -> list[int]:
    return [m.a, m.b, m.c]


def _adjoint(m: TraceZeroMat, by: Mat2) -> TraceZeroMat:
    return TraceZeroMat.from_mat(m.conjugate(by))


@dataclass(frozen=True)
class Cocycle:
    """Values f(sigma), f(tau) of a 1-cocycle with coefficients in Ad0 over F_p."""

    f_sigma: TraceZeroMat
    f_tau: TraceZeroMat

    def __post_init__(self) -> None:
        if self.f_sigma.p != self.f_tau.p:
            raise UnsupportedConfigurationError("cocycle values disagree on p.")
        object.__setattr__(self, "f_sigma", _to_fp(self.f_sigma))
        object.__setattr__(self, "f_tau", _to_fp(self.f_tau))

    @property
    def p(self) -> int:
        return self.f_sigma.p

    @classmethod
    def zero(cls, p: int) -> Cocycle:
        return cls(trace_zero(0, 0, 0, p), trace_zero(0, 0, 0, p))

    @classmethod
    def from_vector(cls, vector: list[int], p: int) -> Cocycle:
        xs, ys, zs, xt, yt, zt = vector
        return cls(trace_zero(xs, ys, zs, p), trace_zero(xt, yt, zt, p))

    def to_vector(self) -> list[int]:
        return _coordinates(self.f_sigma) + _coordinates(self.f_tau)

    def __add__(self, other: Cocycle) -> Cocycle:
        return Cocycle(
            TraceZeroMat.from_mat(self.f_sigma + other.f_sigma),
            TraceZeroMat.from_mat(self.f_tau + other.f_tau),
        )

    def scale(self, factor: int | Residue) -> Cocycle:
        return Cocycle(
            TraceZeroMat.from_mat(self.f_sigma.scale(factor)),
            TraceZeroMat.from_mat(self.f_tau.scale(factor)),
        )

    def is_zero(self) -> bool:
        return self.f_sigma.is_zero() and self.f_tau.is_zero()

    def to_record(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "level": 1,
            "f_sigma": list(self.f_sigma.entries),
            "f_tau": list(self.f_tau.entries),
        }


def _to_fp(m: Mat2) -> TraceZeroMat:
    return TraceZeroMat(m.a, m.b, m.c, m.d, m.p, 1)


def r_class(p: int) -> Cocycle:
    """Unramified class: f(sigma) = diag(1, -1), f(tau) = 0."""
    return Cocycle(trace_zero(1, 0, 0, p), trace_zero(0, 0, 0, p))


def s_class(p: int) -> Cocycle:
    """Null class: f(sigma) = 0, f(tau) = upper-right elementary matrix."""
    return Cocycle(trace_zero(0, 0, 0, p), trace_zero(0, 1, 0, p))


def coboundary(m: TraceZeroMat, model: TameModel) -> Cocycle:
    """g -> M - g.M; vanishes on tau because tau is residually trivial."""
    m = _to_fp(m)
    moved = _adjoint(m, model.residual_frobenius())
    return Cocycle(TraceZeroMat.from_mat(m - moved), trace_zero(0, 0, 0, model.p))


@dataclass(frozen=True)
class CocycleSpace:
    z1_basis: tuple[Cocycle, ...]
    b1_basis: tuple[Cocycle, ...]
    h1_basis: tuple[Cocycle, ...]

    @property
    def dims(self) -> tuple[int, int, int]:
        return (len(self.z1_basis), len(self.b1_basis), len(self.h1_basis))


@dataclass(frozen=True)
class CocycleClassification:
    kind: CocycleKind
    a: int
    b: int

    @property
    def is_nonnull(self) -> bool:
        return self.a != 0


@dataclass(frozen=True)
class BruteForceDims:
    group_order: int
    h0: int
    z1: int
    b1: int

    @property
    def h1(self) -> int:
        return self.z1 - self.b1


def _eigenspace_constraints(model: TameModel) -> list[list[int]]:
    # f_tau must satisfy Ad(sigma_bar) f_tau = l f_tau.
    p, l_bar = model.p, model.residual_l
    l_inv = pow(l_bar, -1, p)
    scales = (1, l_bar, l_inv)
    rows = []
    for index, scale in enumerate(scales):
        row = [0] * 6
        row[3 + index] = (scale - l_bar) % p
        rows.append(row)
    return rows


def cocycle_space(model: TameModel) -> CocycleSpace:
    p = model.p
    z1 = linalg.nullspace(_eigenspace_constraints(model), p, 6)
    boundaries = [
        coboundary(trace_zero(*unit, p), model).to_vector()
        for unit in ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    ]
    reduced, pivots = linalg.row_reduce(boundaries, p)
    b1 = [row for row in reduced[: len(pivots)]]
    return CocycleSpace(
        z1_basis=tuple(Cocycle.from_vector(vector, p) for vector in z1),
        b1_basis=tuple(Cocycle.from_vector(vector, p) for vector in b1),
        h1_basis=(r_class(p), s_class(p)),
    )


def is_cocycle(c: Cocycle, model: TameModel) -> bool:
    vector = c.to_vector()
    return all(
        sum(coef * value for coef, value in zip(row, vector)) % model.p == 0
        for row in _eigenspace_constraints(model)
    )


def classify(c: Cocycle, model: TameModel) -> CocycleClassification:
    """Coordinates (a, b) of [c] in the (r, s) basis and the kind of class.

    Coboundaries have zero diagonal on sigma and vanish on tau, so a is the
    diagonal entry of f(sigma) and b the upper-right entry of f(tau).
    """
    if c.p != model.p:
        raise InvalidCocycleError(f"cocycle is over F_{c.p}, model over F_{model.p}.")
    if not is_cocycle(c, model):
        raise InvalidCocycleError(
            f"f(tau) = {c.f_tau.to_rows()} is not in the l-eigenspace of Frobenius."
        )
    a, b = c.f_sigma.a, c.f_tau.b
    if a == 0 and b == 0:
        kind: CocycleKind = "coboundary"
    elif b == 0:
        kind = "unramified"
    elif a == 0:
        kind = "null"
    else:
        kind = "mixed"
    return CocycleClassification(kind=kind, a=a, b=b)


def _act_on_coordinates(j: int, model: TameModel) -> tuple[int, int, int]:
    # sigma^j acts on (x, y, z) by scaling with (1, l^j, l^-j).
    p, l_bar = model.p, model.residual_l
    return (1, pow(l_bar, j, p), pow(l_bar, -j, p))


def bruteforce_cocycle_dims(model: TameModel) -> BruteForceDims:
    """Z1, B1 and H0 of the finite tame quotient by direct enumeration.

    Elements are tau^i sigma^j with (i, j)(i', j') = (i + l^j i', j + j').
    f is propagated along Cayley-graph edges as a linear form in the six
    unknown coordinates of f(sigma), f(tau); every closed cycle yields a
    linear constraint and Z1 is their common kernel.
    """
    p, t, s = model.p, model.tau_order, model.sigma_order
    assert t is not None and s is not None
    generators = {"sigma": ((0, 1), 0), "tau": ((1, 0), 3)}

    def multiply(g: tuple[int, int], h: tuple[int, int]) -> tuple[int, int]:
        return ((g[0] + pow(model.l, g[1], t) * h[0]) % t, (g[1] + h[1]) % s)

    zero_form = [[0] * 6 for _ in range(3)]
    values: dict[tuple[int, int], list[list[int]]] = {(0, 0): zero_form}
    constraints: list[list[int]] = []
    queue = deque([(0, 0)])
    while queue:
        g = queue.popleft()
        scales = _act_on_coordinates(g[1], model)
        for element, offset in generators.values():
            h = multiply(g, element)
            candidate = [list(row) for row in values[g]]
            for coord in range(3):
                candidate[coord][offset + coord] = (
                    candidate[coord][offset + coord] + scales[coord]
                ) % p
            if h not in values:
                values[h] = candidate
                queue.append(h)
                continue
            for coord in range(3):
                row = [(x - y) % p for x, y in zip(candidate[coord], values[h][coord])]
                if any(row):
                    constraints.append(row)

    z1 = len(linalg.nullspace(constraints, p, 6))
    boundaries = [
        coboundary(trace_zero(*unit, p), model).to_vector()
        for unit in ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    ]
    return BruteForceDims(
        group_order=len(values),
        h0=h0_dim_bruteforce(model),
        z1=z1,
        b1=linalg.rank(boundaries, p),
    )


def h0_dim_bruteforce(model: TameModel) -> int:
    """Dimension of the Ad0 invariants under the residual tame image."""
    p = model.p
    rows = []
    for index, scale in enumerate(_act_on_coordinates(1, model)):
        row = [0, 0, 0]
        row[index] = (scale - 1) % p
        rows.append(row)
    return len(linalg.nullspace(rows, p, 3))


@dataclass(frozen=True)
class LocalRep:
    """Images of Frobenius and an inertia generator mod p^level."""

    model: TameModel
    level: int
    sigma_img: Mat2
    tau_img: Mat2

    def __post_init__(self) -> None:
        for name in ("sigma_img", "tau_img"):
            matrix = getattr(self, name)
            if matrix.p != self.model.p or matrix.level != self.level:
                raise UnsupportedConfigurationError(
                    f"{name} is mod {matrix.p}^{matrix.level}, "
                    f"expected mod {self.model.p}^{self.level}."
                )

    @property
    def p(self) -> int:
        return self.model.p

    @property
    def u(self) -> Residue:
        return self.tau_img.entry(0, 1)

    def reduce(self, level: int) -> LocalRep:
        return LocalRep(
            self.model, level, self.sigma_img.reduce(level), self.tau_img.reduce(level)
        )

    def lift(self, level: int) -> LocalRep:
        return LocalRep(
            self.model, level, self.sigma_img.lift(level), self.tau_img.lift(level)
        )

    def conjugate(self, by: Mat2) -> LocalRep:
        return LocalRep(
            self.model,
            self.level,
            self.sigma_img.conjugate(by),
            self.tau_img.conjugate(by),
        )

    def to_record(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "level": self.level,
            "l": self.model.l % self.p**self.level,
            "sigma": list(self.sigma_img.entries),
            "tau": list(self.tau_img.entries),
        }


def check_relation(rep: LocalRep) -> bool:
    lhs = rep.tau_img.conjugate(rep.sigma_img)
    return lhs == rep.tau_img ** rep.model.l


def has_residual_shape(rep: LocalRep) -> bool:
    sigma = rep.sigma_img.reduce(1)
    tau = rep.tau_img.reduce(1)
    return sigma == rep.model.residual_frobenius() and tau.is_identity()


def has_cyclotomic_determinant(rep: LocalRep) -> bool:
    return rep.sigma_img.det().value == rep.model.l % rep.p**rep.level and (
        rep.tau_img.det().value == 1
    )


def special_rep(model: TameModel, level: int, u: int | Residue) -> LocalRep:
    """sigma -> diag(l, 1), tau -> (1, u; 0, 1)."""
    if int(u) % model.p:
        raise PreconditionError(f"u = {int(u)} is not divisible by p = {model.p}.")
    return LocalRep(
        model,
        level,
        Mat2.diag(model.l, 1, model.p, level),
        Mat2(1, int(u), 0, 1, model.p, level),
    )


def is_special(rep: LocalRep) -> bool:
    """Exact grade: the matrices have precisely the special shape."""
    tau = rep.tau_img
    return (
        rep.sigma_img == Mat2.diag(rep.model.l, 1, rep.p, rep.level)
        and (tau.a, tau.c, tau.d) == (1, 0, 1)
        and tau.b % rep.p == 0
    )


def act(f: Cocycle, rep: LocalRep, e: int) -> LocalRep:
    """Twist rep by f at depth e: g -> (I + p^e f(g)) rep(g)."""
    if not 1 <= e <= rep.level - 1:
        raise ExponentRangeError(
            f"exponent e = {e} must satisfy 1 <= e <= {rep.level - 1}."
        )
    p, level = rep.p, rep.level
    step = p**e

    # The lift of f(g) keeps trace exactly zero: (x, y; z, -x).
    def twist(value: TraceZeroMat) -> Mat2:
        return Mat2(
            1 + step * value.a,
            step * value.b,
            step * value.c,
            1 - step * value.a,
            p,
            level,
        )

    return LocalRep(
        rep.model,
        level,
        twist(f.f_sigma) @ rep.sigma_img,
        twist(f.f_tau) @ rep.tau_img,
    )


@dataclass(frozen=True)
class SpecialForm:
    """Result of normalizing a local rep.

    u is read off after conjugating by a matrix whose inverse has unit
    diagonal. Under an arbitrary strict equivalence u is determined up to a
    unit factor congruent to 1 mod p, so its valuation is well defined.
    """

    conjugator: Mat2
    eigenpair: tuple[Residue, Residue]
    u: Residue
    rep: LocalRep

    @property
    def is_special(self) -> bool:
        lam1, lam2 = self.eigenpair
        return lam1.value == self.rep.model.l % lam1.modulus and lam2.value == 1


def normalize_to_special(rep: LocalRep) -> SpecialForm:
    if not has_residual_shape(rep):
        raise PreconditionError(
            "rep does not reduce to (diag(l, 1), I) mod p: "
            f"sigma = {rep.sigma_img.to_rows()}, tau = {rep.tau_img.to_rows()}."
        )
    if not check_relation(rep):
        raise PreconditionError(
            f"tame relation fails at level {rep.level} for the given rep."
        )
    conjugator, diagonal = hensel_diagonalize(rep.sigma_img)
    normalized = LocalRep(
        rep.model, rep.level, diagonal, rep.tau_img.conjugate(conjugator)
    )
    return SpecialForm(
        conjugator=conjugator,
        eigenpair=(diagonal.entry(0, 0), diagonal.entry(1, 1)),
        u=normalized.u,
        rep=normalized,
    )


@dataclass(frozen=True)
class Adjustment:
    alpha: int
    rep: LocalRep


def adjust_to_special(rep: LocalRep, f: Cocycle) -> Adjustment:
    """Find the unique alpha mod p with (alpha f) . rep special at rep.level.

    rep lives at level n + 1 and reduces to a special rep at level n. Acting
    at depth n multiplies the first Frobenius eigenvalue by 1 + p^n alpha a
    where a is the r-coordinate of f, so alpha = -delta / a for
    lambda_1 = l (1 + p^n delta).
    """
    classification = classify(f, rep.model)
    if not classification.is_nonnull:
        raise CannotAdjustError(
            f"class with coordinates (0, {classification.b}) is null and cannot "
            "repair the Frobenius eigenvalue."
        )
    p, n = rep.p, rep.level - 1
    if n < 1:
        raise ExponentRangeError("adjust_to_special needs a rep at level >= 2.")
    form = normalize_to_special(rep)
    lam1 = form.eigenpair[0].value
    l_value = rep.model.l % p**rep.level
    gap = (lam1 * pow(l_value, -1, p**rep.level) - 1) % p**rep.level
    if gap % p**n:
        raise PreconditionError(
            f"reduction to level {n} is not special: lambda_1 = {lam1}, l = {l_value}."
        )
    delta = (gap // p**n) % p
    alpha = (-delta * pow(classification.a, -1, p)) % p
    adjusted = normalize_to_special(act(f.scale(alpha), rep, n))
    if not adjusted.is_special:
        raise PreconditionError(
            f"adjustment by alpha = {alpha} did not restore specialness; "
            "det(sigma) is probably not l."
        )
    return Adjustment(alpha=alpha, rep=adjusted.rep)


def special_lift_step(rep: LocalRep, u_next: int | Residue) -> LocalRep:
    if not is_special(rep):
        raise PreconditionError("special_lift_step needs an exactly special rep.")
    n = rep.level
    if (int(u_next) - rep.u.value) % rep.p**n:
        raise InconsistentLiftError(
            f"u_next = {int(u_next)} does not reduce to u = {rep.u.value} "
            f"mod {rep.p}^{n}."
        )
    return special_rep(rep.model, n + 1, int(u_next))


def count_lift_classes(rep: LocalRep) -> int:
    """Lifts of rep to level + 1 satisfying the relation, up to strict equivalence.

    Candidates are (I + p^n F) rep(g) with F trace-zero over F_p, which keeps
    determinants mod p^(n+1). Classes are orbits under conjugation by
    I + p^n M for M in M_2(F_p).
    """
    p, n = rep.p, rep.level
    level = n + 1
    modulus = p**level
    step = p**n
    base = special_rep(rep.model, level, rep.u) if is_special(rep) else rep.lift(level)
    sigma0, tau0 = base.sigma_img.entries, base.tau_img.entries
    l_value = rep.model.l

    def perturbations() -> list[Entries]:
        out = []
        for x, y, z in product(range(p), repeat=3):
            twist = (1 + step * x, step * y, step * z, 1 - step * x)
            out.append(twist)
        return out

    sigmas = []
    for twist in perturbations():
        sigma = matmul_mod(twist, sigma0, modulus)
        sigma_inv = Mat2.from_entries(sigma, p, level).inverse().entries
        sigmas.append((sigma, sigma_inv))
    taus = []
    for twist in perturbations():
        tau = matmul_mod(twist, tau0, modulus)
        taus.append((tau, matpow_mod(tau, l_value, modulus)))

    lifts = set()
    for sigma, sigma_inv in sigmas:
        for tau, tau_l in taus:
            lhs = matmul_mod(matmul_mod(sigma, tau, modulus), sigma_inv, modulus)
            if lhs == tau_l:
                lifts.add((sigma, tau))

    conjugators = []
    for a, b, c, d in product(range(p), repeat=4):
        conj = (1 + step * a, step * b, step * c, 1 + step * d)
        conj_inv = Mat2.from_entries(conj, p, level).inverse().entries
        conjugators.append((conj, conj_inv))

    seen: set[tuple[Entries, Entries]] = set()
    classes = 0
    for candidate in sorted(lifts):
        if candidate in seen:
            continue
        classes += 1
        sigma, tau = candidate
        for conj, conj_inv in conjugators:
            seen.add(
                (
                    matmul_mod(matmul_mod(conj, sigma, modulus), conj_inv, modulus),
                    matmul_mod(matmul_mod(conj, tau, modulus), conj_inv, modulus),
                )
            )
    return classes


def nonnull_line_fraction(p: int) -> Fraction:
    """Share of ramified lines in local H1 that are also nonnull.

    Lines are spanned by (a, b) in the (r, s) basis; ramified means b != 0
    and nonnull means a != 0.
    """
    check_precision(p, 1)
    lines = {(1, 0)} | {(a, 1) for a in range(p)}
    ramified = [line for line in lines if line[1] != 0]
    nonnull = [line for line in ramified if line[0] != 0]
    return Fraction(len(nonnull), len(ramified))
