from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from . import linalg
from .errors import ModelValidationError, UnsupportedConfigurationError
from .models import GlobalClass, GlobalModel, PlaceDescriptor, PrimeSpec
from .tame import TameModel
from .zmod import check_precision, teichmuller

if TYPE_CHECKING:
    from .config import RunConfig


def validate_place_descriptor(place: PlaceDescriptor) -> None:
    """Reject descriptors outside the supported local case analysis."""
    check_precision(place.p, 1)
    p = place.p
    if place.kind == "tame_l":
        if place.l is None:
            raise UnsupportedConfigurationError("tame_l place needs l.")
        if place.l % p in (0, 1, p - 1):
            raise UnsupportedConfigurationError(
                f"tame_l place needs l != 0, +-1 mod p; got {place.l % p}."
            )
    elif place.kind == "multiplicative_v":
        if place.v is None:
            raise UnsupportedConfigurationError("multiplicative_v place needs v.")
        if place.v in (p, 3):
            raise UnsupportedConfigurationError(
                f"multiplicative place v={place.v} must differ from p and 3."
            )
        if not place.star_nontrivial:
            raise UnsupportedConfigurationError(
                "multiplicative places are only supported with nontrivial star."
            )
    elif place.kind == "ordinary_p":
        if place.psi_order is None or place.psi_order <= 2:
            raise UnsupportedConfigurationError(
                f"ordinary_p place needs psi_order > 2; got {place.psi_order}."
            )


def validate_run_config(config: "RunConfig", *, lift: bool = False) -> None:
    check_precision(config.p, config.N)
    if lift and config.kmax is not None and config.kmax + 2 > config.N:
        raise UnsupportedConfigurationError(
            f"kmax + 2 must not exceed N; got kmax={config.kmax}, N={config.N}."
        )


@dataclass(frozen=True)
class PrimeInfo:
    name: str
    stage: int
    l: int
    tame: TameModel
    spec: PrimeSpec


@dataclass(frozen=True)
class ValidatedModel:
    """A GlobalModel that passed validate_global_model, with lookup tables.

    Only validate_global_model constructs these; the lifter refuses anything
    else.
    """

    model: GlobalModel
    primes: tuple[PrimeInfo, ...]
    repair_order: tuple[str, ...]

    @property
    def p(self) -> int:
        return self.model.p

    @property
    def N(self) -> int:
        return self.model.N

    @property
    def variant(self) -> str:
        return self.model.variant

    @property
    def stage_count(self) -> int:
        return len(self.model.stages)

    def prime(self, name: str) -> PrimeInfo:
        return next(info for info in self.primes if info.name == name)

    def stage_primes(self, stage: int) -> list[PrimeInfo]:
        return [info for info in self.primes if info.stage == stage]

    def cls(self, name: str) -> GlobalClass:
        found = self.model.class_by_name(name)
        assert found is not None
        return found

    def repair_class(self, prime: str) -> GlobalClass:
        return self.cls(self.prime(prime).spec.repair_class)


def repair_order(model: GlobalModel) -> tuple[str, ...]:
    """Newest stage first; inside a two-prime stage q1 before q2."""
    order: list[str] = []
    for stage in sorted(model.stages, key=lambda item: item.stage, reverse=True):
        order.extend(prime.name for prime in stage.primes)
    return tuple(order)


def validate_global_model(model: GlobalModel) -> ValidatedModel:
    problems: list[str] = []
    try:
        check_precision(model.p, model.N)
    except UnsupportedConfigurationError as exc:
        raise ModelValidationError([str(exc)]) from exc
    p = model.p

    _check_classes(model, problems)
    _check_stages(model, problems)
    if problems:
        raise ModelValidationError(problems)

    infos: list[PrimeInfo] = []
    for stage, prime in model.prime_entries():
        l_value = model.prime_l(stage, prime)
        congruence = teichmuller(2, p, min(stage + 1, model.N)).value
        if l_value % p ** min(stage + 1, model.N) != congruence:
            problems.append(
                f"prime {prime.name}: l={l_value} is not 2* mod p^{stage + 1}."
            )
            continue
        infos.append(
            PrimeInfo(
                name=prime.name,
                stage=stage,
                l=l_value,
                tame=TameModel(p, l_value, model.N),
                spec=prime,
            )
        )

    _check_ordinary(model, problems)
    if model.variant == "uncond":
        _check_uncond_records(model, problems)
    else:
        _check_grh_records(model, problems)
    _check_triviality_pattern(model, problems)
    order = repair_order(model)
    _check_repair_order(model, order, problems)

    if problems:
        raise ModelValidationError(problems)
    return ValidatedModel(model=model, primes=tuple(infos), repair_order=order)


def _check_classes(model: GlobalModel, problems: list[str]) -> None:
    names = [item.name for item in model.classes]
    if len(set(names)) != len(names):
        problems.append("class names must be unique.")
    if model.base_h1_dim != 2:
        problems.append(f"base_h1_dim must be 2; got {model.base_h1_dim}.")
    base = model.base_classes()
    if len(base) != model.base_h1_dim:
        problems.append(
            f"expected {model.base_h1_dim} base classes (origin 0); got {len(base)}."
        )
    prime_names = {prime.name for _, prime in model.prime_entries()}
    for item in model.classes:
        for prime, (a, b) in item.restrictions.items():
            if prime not in prime_names:
                problems.append(f"class {item.name}: unknown prime {prime}.")
            if not (0 <= a < model.p and 0 <= b < model.p):
                problems.append(
                    f"class {item.name}: restriction at {prime} must be mod p."
                )


def _check_stages(model: GlobalModel, problems: list[str]) -> None:
    numbers = [stage.stage for stage in model.stages]
    if numbers != list(range(1, len(numbers) + 1)):
        problems.append(f"stages must be numbered 1..k in order; got {numbers}.")
    names = [prime.name for _, prime in model.prime_entries()]
    if len(set(names)) != len(names):
        problems.append("prime names must be unique.")
    for stage in model.stages:
        if stage.two_prime and model.variant != "grh":
            problems.append(f"stage {stage.stage}: two-prime stages are grh only.")
        origin_count = sum(
            1 for item in model.classes if item.origin_stage == stage.stage
        )
        if origin_count != len(stage.primes):
            problems.append(
                f"stage {stage.stage}: each new prime adds one class; expected "
                f"{len(stage.primes)} classes of origin {stage.stage}, "
                f"got {origin_count}."
            )
    expected = model.base_h1_dim + len(names)
    if len(model.classes) != expected:
        problems.append(
            f"global H1 must have dimension {expected}; got {len(model.classes)}."
        )
    for _, prime in model.prime_entries():
        for ref in (prime.repair_class, prime.introduction_class):
            if ref is not None and model.class_by_name(ref) is None:
                problems.append(f"prime {prime.name}: unknown class {ref}.")


def _check_ordinary(model: GlobalModel, problems: list[str]) -> None:
    if model.variant == "uncond":
        if model.ordinary is not None:
            problems.append("ordinary data is only used by grh models.")
        for item in model.classes:
            if item.at_p:
                problems.append(f"class {item.name}: at_p is only used by grh.")
        return
    ordinary = model.ordinary
    if ordinary is None:
        problems.append("grh models need ordinary data.")
        return
    dim = ordinary.ambient_dim
    for item in model.classes:
        if len(item.at_p) != dim:
            problems.append(f"class {item.name}: at_p must have length {dim}.")
    for vector in ordinary.w_basis:
        if len(vector) != dim:
            problems.append(f"ordinary w_basis vectors must have length {dim}.")
    if problems:
        return
    u_basis = [item.at_p for item in model.base_classes()]
    columns = u_basis + ordinary.w_basis
    if (
        len(columns) != dim
        or linalg.rank(linalg.columns_to_matrix(columns), model.p) != dim
    ):
        problems.append(
            "restrictions of base classes at p and the ordinary subspace are "
            "not complementary."
        )


def _class(model: GlobalModel, ref: str | None) -> GlobalClass | None:
    return model.class_by_name(ref) if ref is not None else None


def _check_uncond_records(model: GlobalModel, problems: list[str]) -> None:
    for stage, prime in model.prime_entries():
        intro = _class(model, prime.introduction_class)
        if intro is None:
            problems.append(f"prime {prime.name}: introduction class is required.")
        else:
            if intro.origin_stage != stage:
                problems.append(
                    f"prime {prime.name}: introduction class must originate at "
                    f"stage {stage}."
                )
            if intro.restriction(prime.name)[1] == 0:
                problems.append(
                    f"prime {prime.name}: introduction class must be ramified there."
                )
        repair = _class(model, prime.repair_class)
        if repair is None:
            continue
        if repair.origin_stage != stage - 1:
            problems.append(
                f"prime {prime.name}: repair class must originate at stage "
                f"{stage - 1}."
            )
        a, b = repair.restriction(prime.name)
        if a == 0:
            problems.append(f"prime {prime.name}: repair class is null there.")
        if b != 0:
            problems.append(
                f"prime {prime.name}: repair class must be unramified there."
            )


def _check_grh_records(model: GlobalModel, problems: list[str]) -> None:
    for stage in model.stages:
        for prime in stage.primes:
            if prime.introduction_class is not None:
                problems.append(
                    f"prime {prime.name}: grh primes are introduced by their "
                    "repair class."
                )
            repair = _class(model, prime.repair_class)
            if repair is not None and repair.origin_stage != stage.stage:
                problems.append(
                    f"prime {prime.name}: repair class must originate at stage "
                    f"{stage.stage}."
                )
        if not stage.two_prime:
            prime = stage.primes[0]
            repair = _class(model, prime.repair_class)
            if repair is not None and 0 in repair.restriction(prime.name):
                problems.append(
                    f"prime {prime.name}: repair class must be nonnull and "
                    "ramified there."
                )
            continue
        first, second = stage.primes
        h2 = _class(model, first.repair_class)
        h1 = _class(model, second.repair_class)
        if h1 is None or h2 is None:
            continue
        if h1.name == h2.name:
            problems.append(f"stage {stage.stage}: the two repair classes coincide.")
        for own, other, cls in ((first, second, h2), (second, first, h1)):
            a, b = cls.restriction(own.name)
            if a == 0 or b != 0:
                problems.append(
                    f"prime {own.name}: repair class must be unramified and "
                    "nontrivial there."
                )
            a, b = cls.restriction(other.name)
            if a != 0 or b == 0:
                problems.append(
                    f"prime {other.name}: repair class of {own.name} must be "
                    "null and ramified there."
                )


def _check_triviality_pattern(model: GlobalModel, problems: list[str]) -> None:
    # Classes born long enough ago restrict trivially at newer primes.
    gap = 2 if model.variant == "uncond" else 1
    for item in model.classes:
        for stage, prime in model.prime_entries():
            if item.origin_stage > stage - gap:
                continue
            if item.restriction(prime.name) != (0, 0):
                problems.append(
                    f"class {item.name}: must restrict trivially at {prime.name}."
                )


def _check_repair_order(
    model: GlobalModel, order: tuple[str, ...], problems: list[str]
) -> None:
    lookup = {prime.name: prime for _, prime in model.prime_entries()}
    for position, name in enumerate(order):
        repair = model.class_by_name(lookup[name].repair_class)
        if repair is None:
            continue
        for earlier in order[:position]:
            if repair.restriction(earlier)[0] != 0:
                problems.append(
                    f"repair class {repair.name} of {name} would break "
                    f"the already repaired prime {earlier}."
                )
