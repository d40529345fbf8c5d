from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from . import linalg
from .errors import (
    CannotAdjustError,
    DomainError,
    ModelInconsistencyError,
    PreconditionError,
    SingularMatrixError,
    UnsupportedConfigurationError,
)
from .groups import chebotarev_class, is_torsion_free_lift
from .localdims import SubspaceDecompositionProblem, subspace_decompose
from .logs import log_debug, log_info, log_warning
from .models import (
    GlobalClass,
    GlobalModel,
    OrdinaryData,
    PrimeSpec,
    StageSpec,
    Variant,
)
from .tame import (
    Cocycle,
    LocalRep,
    TameModel,
    act,
    adjust_to_special,
    check_relation,
    has_cyclotomic_determinant,
    is_special,
    r_class,
    s_class,
    special_lift_step,
)
from .trace import LiftTrace, TraceEvent, TraceHeader, TracePrime
from .validations import ValidatedModel
from .zmod import Mat2, valuation

RepairOrder = Literal["newest_first", "oldest_first"]
Draw = Callable[[], int]


@dataclass(frozen=True)
class AdjustmentRecord:
    kind: Literal["introduce", "repair", "ordinary"]
    stage: int
    level: int
    prime: str | None
    source: str
    alpha: int


@dataclass(frozen=True)
class StageOutput:
    stage: int
    reps: dict[str, LocalRep]
    p_history: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class LiftState:
    """Snapshot of the lift at one working level.

    p_history[e - 1] is the coordinate vector, in local H1 at p, of the
    level-(e + 1) step of the local-at-p component; it is empty for uncond
    models.
    """

    model: ValidatedModel
    stage: int
    level: int
    reps: dict[str, LocalRep] = field(default_factory=dict)
    p_history: tuple[tuple[int, ...], ...] = ()
    ledger: tuple[StageOutput, ...] = ()
    adjustments: tuple[AdjustmentRecord, ...] = ()

    def u_values(self) -> dict[str, int]:
        return {name: rep.u.value for name, rep in self.reps.items()}

    def reduce(self, level: int) -> LiftState:
        return replace(
            self,
            level=level,
            reps={name: rep.reduce(level) for name, rep in self.reps.items()},
            p_history=self.p_history[: level - 1],
        )

    def is_ordinary(self) -> bool:
        ordinary = self.model.model.ordinary
        if ordinary is None:
            return True
        return all(
            linalg.in_span(list(vector), ordinary.w_basis, self.model.p)
            for vector in self.p_history
        )


def base_state(model: ValidatedModel) -> LiftState:
    """The residual representation: level 1, no auxiliary primes."""
    return LiftState(model=model, stage=0, level=1)


def restriction_cocycle(cls: GlobalClass, prime: str, p: int) -> Cocycle:
    a, b = cls.restriction(prime)
    return r_class(p).scale(a) + s_class(p).scale(b)


def _apply_class(
    state: LiftState,
    cls: GlobalClass,
    alpha: int,
    e: int,
    *,
    skip: tuple[str, ...] = (),
) -> LiftState:
    """Act by alpha * cls at depth e on every prime and on the p-component."""
    p = state.model.p
    alpha %= p
    if alpha == 0:
        return state
    reps = dict(state.reps)
    for name, rep in state.reps.items():
        if name in skip or cls.restriction(name) == (0, 0):
            continue
        reps[name] = act(restriction_cocycle(cls, name, p).scale(alpha), rep, e)
    history = list(state.p_history)
    if cls.at_p and e - 1 < len(history):
        history[e - 1] = tuple(
            (value + alpha * shift) % p
            for value, shift in zip(history[e - 1], cls.at_p)
        )
    return replace(state, reps=reps, p_history=tuple(history))


def _record(state: LiftState, record: AdjustmentRecord) -> LiftState:
    return replace(state, adjustments=(*state.adjustments, record))


def _adjust_prime(
    state: LiftState,
    name: str,
    kind: Literal["introduce", "repair"],
    logger: logging.Logger | None,
) -> tuple[LiftState, int]:
    cls = state.model.repair_class(name)
    e = state.level - 1
    try:
        adjustment = adjust_to_special(
            state.reps[name], restriction_cocycle(cls, name, state.model.p)
        )
    except CannotAdjustError as exc:
        raise ModelInconsistencyError(
            f"repair class {cls.name} is null at {name}.",
            prime=name,
            stage=state.stage,
        ) from exc
    reps = dict(state.reps)
    reps[name] = adjustment.rep
    state = replace(state, reps=reps)
    state = _apply_class(state, cls, adjustment.alpha, e, skip=(name,))
    if adjustment.alpha:
        log_debug(
            logger,
            "stage=%d level=%d prime=%s class=%s alpha=%d",
            state.stage,
            state.level,
            name,
            cls.name,
            adjustment.alpha,
        )
    state = _record(
        state,
        AdjustmentRecord(
            kind=kind,
            stage=state.stage,
            level=state.level,
            prime=name,
            source=cls.name,
            alpha=adjustment.alpha,
        ),
    )
    return state, adjustment.alpha


def introduce_ramification(
    state: LiftState, record: StageSpec, *, logger: logging.Logger | None = None
) -> LiftState:
    """Add the primes of `record` at level stage + 1 and make them ramified.

    New primes start from the Chebotarev Frobenius matrix A with trivial
    inertia. uncond: act by the introduction class at depth stage. grh: the
    Frobenius eigenvalues are not (l, 1), so adjusting by the repair class
    needs a nonzero multiple, which introduces ramification.
    """
    model = state.model
    stage = record.stage
    if state.level != stage + 1:
        raise PreconditionError(
            f"stage {stage} starts at level {stage + 1}, not {state.level}."
        )
    p = model.p
    spec = chebotarev_class(model.variant, p, stage - 1)
    reps = dict(state.reps)
    for prime in record.primes:
        info = model.prime(prime.name)
        reps[prime.name] = LocalRep(
            info.tame, state.level, spec.A, Mat2.identity(p, state.level)
        )
    state = replace(state, stage=stage, reps=reps)
    e = stage

    if model.variant == "uncond":
        for prime in record.primes:
            intro = model.cls(prime.introduction_class or "")
            state = _apply_class(state, intro, 1, e)
            state = _record(
                state,
                AdjustmentRecord(
                    kind="introduce",
                    stage=stage,
                    level=state.level,
                    prime=prime.name,
                    source=intro.name,
                    alpha=1,
                ),
            )
        return state

    for prime in record.primes:
        state, alpha = _adjust_prime(state, prime.name, "introduce", logger)
        if alpha == 0:
            raise ModelInconsistencyError(
                f"zero adjustment at {prime.name}: Frobenius was already special.",
                prime=prime.name,
                stage=stage,
            )
    return state


def repair_pass(
    state: LiftState,
    *,
    order: RepairOrder = "newest_first",
    logger: logging.Logger | None = None,
) -> LiftState:
    """Make every prime exactly special at the working level.

    Newest-first order never breaks a repaired prime because later repair
    classes restrict trivially or null there. Oldest-first is exposed only to
    show that the order matters.
    """
    names = [name for name in state.model.repair_order if name in state.reps]
    if order == "oldest_first":
        names.reverse()
    for name in names:
        state, _ = _adjust_prime(state, name, "repair", logger)
    if order == "newest_first":
        broken = [name for name, rep in state.reps.items() if not is_special(rep)]
        if broken:
            raise ModelInconsistencyError(
                f"primes {broken} are not special after the repair pass.",
                prime=broken[0],
                stage=state.stage,
            )
    return state


def ordinary_pass(
    state: LiftState, *, logger: logging.Logger | None = None
) -> LiftState:
    """Move the newest p-component step into the ordinary subspace W.

    The step d is split as u + w with u in the span of the base classes at
    p; acting by the matching combination of base classes subtracts u.
    """
    model = state.model
    ordinary = model.model.ordinary
    if model.variant != "grh" or ordinary is None:
        raise PreconditionError("ordinary_pass needs a grh model.")
    e = state.level - 1
    if e < 1:
        return state
    base = model.model.base_classes()
    problem = SubspaceDecompositionProblem(
        p=model.p,
        ambient_dim=ordinary.ambient_dim,
        u_basis=tuple(tuple(item.at_p) for item in base),
        w_basis=tuple(tuple(vector) for vector in ordinary.w_basis),
        target=state.p_history[e - 1],
    )
    decomposition = subspace_decompose(problem)
    for cls, coef in zip(base, decomposition.u_coords):
        alpha = (-coef) % model.p
        state = _apply_class(state, cls, alpha, e)
        state = _record(
            state,
            AdjustmentRecord(
                kind="ordinary",
                stage=state.stage,
                level=state.level,
                prime=None,
                source=cls.name,
                alpha=alpha,
            ),
        )
    if state.p_history[e - 1] != decomposition.w_part:
        raise ModelInconsistencyError(
            f"p-component {state.p_history[e - 1]} is not ordinary after the "
            "ordinary pass.",
            stage=state.stage,
        )
    return state


def lift_level(
    state: LiftState,
    rng: np.random.Generator,
    *,
    logger: logging.Logger | None = None,
) -> LiftState:
    """Lift from level m to m + 1, then repair.

    Each prime's special rep is lifted with a random next digit of u, twisted
    by a random cocycle at depth m and conjugated by a random I + p^m M, which
    models an arbitrary lift up to strict equivalence.
    """
    model = state.model
    p, m = model.p, state.level
    step = p**m
    reps: dict[str, LocalRep] = {}
    for name, rep in state.reps.items():
        digit, a, b = (int(value) for value in rng.integers(0, p, size=3))
        lifted = special_lift_step(rep, rep.u.value + step * digit)
        lifted = act(r_class(p).scale(a) + s_class(p).scale(b), lifted, m)
        entries = [int(value) for value in rng.integers(0, p, size=4)]
        conjugator = Mat2(
            1 + step * entries[0],
            step * entries[1],
            step * entries[2],
            1 + step * entries[3],
            p,
            m + 1,
        )
        reps[name] = lifted.conjugate(conjugator)
    ambient = model.model.ordinary.ambient_dim if model.model.ordinary else 0
    noise = tuple(int(value) for value in rng.integers(0, p, size=ambient))
    state = replace(
        state, level=m + 1, reps=reps, p_history=(*state.p_history, noise)
    )
    state = repair_pass(state, logger=logger)
    if model.variant == "grh":
        state = ordinary_pass(state, logger=logger)
    return state


def _header(model: ValidatedModel, k_max: int, k_effective: int) -> TraceHeader:
    doc = model.model
    restrictions = {}
    classes = {}
    for info in model.primes:
        cls = model.repair_class(info.name)
        classes[info.name] = cls.name
        restrictions[info.name] = {
            other.name: cls.restriction(other.name) for other in model.primes
        }
    return TraceHeader(
        p=doc.p,
        N=doc.N,
        variant=doc.variant,
        seed=doc.seed,
        k_max=k_max,
        k_effective=k_effective,
        primes=[
            TracePrime(name=info.name, stage=info.stage, l=info.l)
            for info in model.primes
        ],
        repair_order=list(model.repair_order),
        repair_classes=classes,
        repair_restrictions=restrictions,
        two_prime_stages=[stage.stage for stage in doc.stages if stage.two_prime],
        w_basis=[list(vector) for vector in doc.ordinary.w_basis]
        if doc.ordinary
        else [],
    )


def _level_events(state: LiftState) -> list[TraceEvent]:
    events = []
    for name, rep in state.reps.items():
        events.append(
            TraceEvent(
                kind="level",
                stage=state.stage,
                level=state.level,
                prime=name,
                l=rep.model.l,
                u=rep.u.value,
                sigma=list(rep.sigma_img.entries),
                tau=list(rep.tau_img.entries),
            )
        )
    if state.model.variant == "grh" and state.level >= 2:
        events.append(
            TraceEvent(
                kind="ordinary",
                stage=state.stage,
                level=state.level,
                deviation=list(state.p_history[state.level - 2]),
            )
        )
    return events


def _adjustment_events(records: tuple[AdjustmentRecord, ...]) -> list[TraceEvent]:
    return [
        TraceEvent(
            kind="introduce" if record.kind == "introduce" else "adjustment",
            stage=record.stage,
            level=record.level,
            prime=record.prime,
            source=record.source,
            alpha=record.alpha,
            message=record.kind,
        )
        for record in records
    ]


def _drain(state: LiftState, trace: LiftTrace) -> tuple[LiftState, LiftTrace]:
    trace = trace.extend(_adjustment_events(state.adjustments))
    trace = trace.extend(_level_events(state))
    return replace(state, adjustments=()), trace


def _lift_to_cap(
    state: LiftState,
    trace: LiftTrace,
    rng: np.random.Generator,
    logger: logging.Logger | None,
) -> tuple[LiftState, LiftTrace]:
    while state.level < state.model.N:
        state = lift_level(state, rng, logger=logger)
        state, trace = _drain(state, trace)
    return state, trace


def _stage_output(state: LiftState, trace: LiftTrace) -> tuple[LiftState, LiftTrace]:
    output = StageOutput(
        stage=state.stage, reps=dict(state.reps), p_history=state.p_history
    )
    events = [
        TraceEvent(
            kind="stage_output",
            stage=state.stage,
            level=state.level,
            prime=name,
            l=rep.model.l,
            u=rep.u.value,
            sigma=list(rep.sigma_img.entries),
            tau=list(rep.tau_img.entries),
        )
        for name, rep in state.reps.items()
    ]
    return replace(state, ledger=(*state.ledger, output)), trace.extend(events)


def run(
    model: ValidatedModel,
    k_max: int | None = None,
    *,
    logger: logging.Logger | None = None,
) -> tuple[LiftState, LiftTrace]:
    """Run the inductive construction for stages 1..k_max up to level N."""
    if not isinstance(model, ValidatedModel):
        raise TypeError("run needs a model returned by validate_global_model.")
    requested = model.stage_count if k_max is None else k_max
    if requested < 0:
        raise PreconditionError(f"k_max must be >= 0; got {requested}.")
    effective = min(requested, model.stage_count, max(model.N - 2, 0))
    trace = LiftTrace(header=_header(model, requested, effective))
    if effective < requested:
        message = (
            f"requested {requested} stages; precision N={model.N} and "
            f"{model.stage_count} model stages allow {effective}."
        )
        log_warning(logger, "Truncated run: %s", message)
        trace = trace.append(
            TraceEvent(kind="truncated", stage=effective, message=message)
        )

    rng = np.random.default_rng(model.model.seed)
    state = base_state(model)
    log_info(logger, "Stage 0: lifting the residual representation to N=%d", model.N)
    state, trace = _lift_to_cap(state, trace, rng, logger)
    state, trace = _stage_output(state, trace)

    for record in model.model.stages[:effective]:
        stage = record.stage
        log_info(
            logger,
            "Stage %d: primes=%s onset_level=%d",
            stage,
            ",".join(prime.name for prime in record.primes),
            stage + 1,
        )
        trace = trace.append(TraceEvent(kind="stage_start", stage=stage))
        state = replace(state.reduce(stage + 1), stage=stage)
        state = introduce_ramification(state, record, logger=logger)
        state = repair_pass(state, logger=logger)
        if model.variant == "grh":
            state = ordinary_pass(state, logger=logger)
        state, trace = _drain(state, trace)
        state, trace = _lift_to_cap(state, trace, rng, logger)
        state, trace = _stage_output(state, trace)
        log_info(logger, "Stage %d done: u=%s", stage, state.u_values())
    return state, trace


@dataclass(frozen=True)
class ChainReport:
    checked: int
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _rep_from_event(event: TraceEvent, p: int, cap: int) -> LocalRep:
    level = event.level or cap
    if event.l is None or not event.sigma or not event.tau:
        raise PreconditionError("record is missing l, sigma or tau.")
    tame = TameModel(p, event.l, cap)
    return LocalRep(
        tame,
        level,
        Mat2.from_entries(tuple(event.sigma), p, level),
        Mat2.from_entries(tuple(event.tau), p, level),
    )


def _event_violations(
    event: TraceEvent, rep: LocalRep, where: str, expected: int | None
) -> list[str]:
    problems: list[str] = []
    if event.u is not None and event.u != rep.u.value:
        problems.append(f"{where}: recorded u disagrees with tau.")
    if not check_relation(rep):
        problems.append(f"{where}: tame relation fails.")
    if not is_special(rep):
        problems.append(f"{where}: not exactly special.")
    if not has_cyclotomic_determinant(rep):
        problems.append(f"{where}: determinant pattern fails.")
    actual = valuation(event.u if event.u is not None else 0, rep.p, rep.level)
    if expected is not None and actual != expected:
        problems.append(f"{where}: u valuation {actual}, expected {expected}.")
    if event.kind == "stage_output" and not is_torsion_free_lift(rep.tau_img):
        problems.append(f"{where}: inertia image is I or not I mod p.")
    return problems


def verify_chain(trace: LiftTrace) -> ChainReport:
    """Re-check a lift trace from the raw matrices it recorded.

    Never raises on a damaged trace: records that cannot even be read as a
    local rep are reported as violations and skipped.
    """
    header = trace.header
    p, cap = header.p, header.N
    stage_of = {prime.name: prime.stage for prime in header.primes}
    violations: list[str] = []
    checked = 0

    by_level: dict[tuple[int, str], dict[int, LocalRep]] = defaultdict(dict)
    outputs: dict[int, dict[str, LocalRep]] = defaultdict(dict)

    for event in trace.events:
        if event.kind not in ("level", "stage_output") or event.prime is None:
            continue
        checked += 1
        where = f"stage {event.stage} level {event.level} prime {event.prime}"
        try:
            rep = _rep_from_event(event, p, cap)
            violations.extend(
                _event_violations(event, rep, where, stage_of.get(event.prime))
            )
        except SingularMatrixError:
            violations.append(f"{where}: sigma or tau is not invertible.")
            continue
        except UnsupportedConfigurationError as exc:
            violations.append(f"{where}: unsupported tame model ({exc})")
            continue
        except (DomainError, PreconditionError) as exc:
            violations.append(f"{where}: unreadable record ({exc})")
            continue
        if event.kind == "level":
            by_level[(event.stage, event.prime)][rep.level] = rep
        else:
            outputs[event.stage][event.prime] = rep

    for (stage, prime), reps in by_level.items():
        levels = sorted(reps)
        for lower, upper in zip(levels, levels[1:]):
            reduced = reps[upper].reduce(lower)
            if (
                reduced.sigma_img != reps[lower].sigma_img
                or reduced.tau_img != reps[lower].tau_img
            ):
                violations.append(
                    f"stage {stage} prime {prime}: level {upper} does not reduce "
                    f"to level {lower} (congruence)."
                )

    stages = sorted(outputs)
    for previous, current in zip(stages, stages[1:]):
        for prime, rep in outputs[current].items():
            if prime not in outputs[previous]:
                continue
            older = outputs[previous][prime].reduce(current)
            newer = rep.reduce(current)
            if (older.sigma_img, older.tau_img) != (newer.sigma_img, newer.tau_img):
                violations.append(
                    f"prime {prime}: stage {current} output is not congruent to "
                    f"stage {previous} mod p^{current} (congruence)."
                )

    if header.variant == "grh":
        for event in trace.of_kind("ordinary"):
            checked += 1
            if not linalg.in_span(event.deviation or [], header.w_basis, p):
                violations.append(
                    f"stage {event.stage} level {event.level}: p-component is "
                    "not ordinary."
                )

    violations.extend(_pattern_violations(header))
    return ChainReport(checked=checked, violations=tuple(violations))


def _pattern_violations(header: TraceHeader) -> list[str]:
    problems: list[str] = []
    table = header.repair_restrictions
    order = header.repair_order
    for position, name in enumerate(order):
        own = table.get(name, {}).get(name, (0, 0))
        if own[0] == 0:
            problems.append(f"repair class of {name} is null at {name}.")
        for earlier in order[:position]:
            if table.get(name, {}).get(earlier, (0, 0))[0] != 0:
                problems.append(
                    f"repair class of {name} breaks already repaired {earlier}."
                )
    for stage in header.two_prime_stages:
        pair = [prime.name for prime in header.primes if prime.stage == stage]
        if len(pair) != 2:
            problems.append(f"two-prime stage {stage} has {len(pair)} primes.")
            continue
        for own, other in (pair, pair[::-1]):
            a, b = table.get(own, {}).get(own, (0, 0))
            if a == 0 or b != 0:
                problems.append(
                    f"repair class of {own} is not unramified and nontrivial there."
                )
            a, b = table.get(own, {}).get(other, (0, 0))
            if a != 0 or b == 0:
                problems.append(
                    f"repair class of {own} is not null and ramified at {other}."
                )
    return problems


def stabilized_u(trace: LiftTrace) -> dict[str, int]:
    """Number of p-adic digits of u shared by every recorded stage output."""
    p, cap = trace.header.p, trace.header.N
    values: dict[str, list[int]] = defaultdict(list)
    for event in trace.of_kind("stage_output"):
        if event.prime is not None and event.u is not None:
            values[event.prime].append(event.u)
    digits = {}
    for prime, history in values.items():
        agreed = cap
        for older, newer in zip(history, history[1:]):
            agreed = min(agreed, valuation(newer - older, p, cap))
        digits[prime] = agreed
    return digits


def generate_model(
    p: int,
    N: int,
    variant: Variant,
    kmax: int,
    seed: int = 0,
    two_prime_stages: tuple[int, ...] = (),
) -> GlobalModel:
    """Draw a synthetic global model satisfying every validator constraint."""
    rng = np.random.default_rng(seed)

    def digit() -> int:
        return int(rng.integers(0, p))

    def unit() -> int:
        return int(rng.integers(1, p))

    if variant == "uncond":
        if two_prime_stages:
            raise PreconditionError("two-prime stages are grh only.")
        return _generate_uncond(p, N, kmax, seed, digit, unit)
    return _generate_grh(p, N, kmax, seed, set(two_prime_stages), digit, unit)


def _generate_uncond(
    p: int, N: int, kmax: int, seed: int, digit: Draw, unit: Draw
) -> GlobalModel:
    names = [f"l{i}" for i in range(1, kmax + 1)]
    restrictions: dict[str, dict[str, tuple[int, int]]] = {
        "b1": {},
        "b2": {},
        **{f"g{i}": {} for i in range(1, kmax + 1)},
    }
    if kmax >= 1:
        restrictions["b1"]["l1"] = (unit(), 0)
        restrictions["b2"]["l1"] = (digit(), digit())
    for i in range(1, kmax + 1):
        table = restrictions[f"g{i}"]
        for j in range(1, i):
            table[f"l{j}"] = (digit(), digit())
        table[f"l{i}"] = (digit(), unit())
        if i + 1 <= kmax:
            table[f"l{i + 1}"] = (unit(), 0)
    classes = [
        GlobalClass(name="b1", origin_stage=0, restrictions=restrictions["b1"]),
        GlobalClass(name="b2", origin_stage=0, restrictions=restrictions["b2"]),
    ] + [
        GlobalClass(name=f"g{i}", origin_stage=i, restrictions=restrictions[f"g{i}"])
        for i in range(1, kmax + 1)
    ]
    stages = [
        StageSpec(
            stage=i,
            primes=[
                PrimeSpec(
                    name=names[i - 1],
                    l_shift=digit(),
                    introduction_class=f"g{i}",
                    repair_class="b1" if i == 1 else f"g{i - 1}",
                )
            ],
        )
        for i in range(1, kmax + 1)
    ]
    return GlobalModel(
        p=p, N=N, variant="uncond", seed=seed, classes=classes, stages=stages
    )


def _generate_grh(
    p: int,
    N: int,
    kmax: int,
    seed: int,
    two_prime: set[int],
    digit: Draw,
    unit: Draw,
) -> GlobalModel:
    ambient = 3
    while True:
        w_vector = [digit() for _ in range(ambient)]
        base_at_p = [[digit() for _ in range(ambient)] for _ in range(2)]
        columns = base_at_p + [w_vector]
        if linalg.rank(linalg.columns_to_matrix(columns), p) == ambient:
            break

    classes = [
        GlobalClass(name="b1", origin_stage=0, at_p=base_at_p[0]),
        GlobalClass(name="b2", origin_stage=0, at_p=base_at_p[1]),
    ]
    stages: list[StageSpec] = []
    earlier: list[str] = []
    for i in range(1, kmax + 1):
        if i in two_prime:
            first, second = f"q{i}a", f"q{i}b"
            pair = []
            for own, other in ((first, second), (second, first)):
                table = {name: (digit(), digit()) for name in earlier}
                table[own] = (unit(), 0)
                table[other] = (0, unit())
                pair.append(
                    GlobalClass(
                        name=f"x{own[1:]}",
                        origin_stage=i,
                        restrictions=table,
                        at_p=[digit() for _ in range(ambient)],
                    )
                )
            classes.extend(pair)
            stages.append(
                StageSpec(
                    stage=i,
                    primes=[
                        PrimeSpec(
                            name=first, l_shift=digit(), repair_class=pair[0].name
                        ),
                        PrimeSpec(
                            name=second, l_shift=digit(), repair_class=pair[1].name
                        ),
                    ],
                )
            )
            earlier.extend([first, second])
            continue
        name = f"q{i}"
        table = {other: (digit(), digit()) for other in earlier}
        table[name] = (unit(), unit())
        classes.append(
            GlobalClass(
                name=f"c{i}",
                origin_stage=i,
                restrictions=table,
                at_p=[digit() for _ in range(ambient)],
            )
        )
        stages.append(
            StageSpec(
                stage=i,
                primes=[PrimeSpec(name=name, l_shift=digit(), repair_class=f"c{i}")],
            )
        )
        earlier.append(name)
    return GlobalModel(
        p=p,
        N=N,
        variant="grh",
        seed=seed,
        ordinary=OrdinaryData(ambient_dim=ambient, w_basis=[w_vector]),
        classes=classes,
        stages=stages,
    )
