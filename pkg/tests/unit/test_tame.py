from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from ramify.errors import (
    CannotAdjustError,
    ExponentRangeError,
    InconsistentLiftError,
    InvalidCocycleError,
    PreconditionError,
    UnsupportedConfigurationError,
)
from ramify.tame import (
    Cocycle,
    LocalRep,
    TameModel,
    act,
    adjust_to_special,
    bruteforce_cocycle_dims,
    check_relation,
    has_cyclotomic_determinant,
    classify,
    coboundary,
    cocycle_space,
    count_lift_classes,
    is_special,
    nonnull_line_fraction,
    normalize_to_special,
    r_class,
    s_class,
    special_lift_step,
    special_rep,
    trace_zero,
)
from ramify.zmod import Mat2, multiplicative_order


@pytest.mark.parametrize("p", [5, 7, 13])
def test_cocycle_space_matches_bruteforce(p: int) -> None:
    """Z1, B1, H1 have dimensions 4, 2, 2 and enumeration agrees."""
    # Arrange
    model = TameModel(p, 2, 2)

    # Act
    space = cocycle_space(model)
    brute = bruteforce_cocycle_dims(model)

    # Assert
    assert space.dims == (4, 2, 2)
    assert (brute.z1, brute.b1, brute.h1) == (4, 2, 2)
    assert brute.group_order == p * p * multiplicative_order(2, p)
    assert brute.h0 == 1


def test_tame_model_rejects_l_minus_one() -> None:
    """l = -1 mod p is outside the supported case analysis."""
    # Act + Assert
    with pytest.raises(UnsupportedConfigurationError, match="must not be"):
        TameModel(5, 4, 2)


@pytest.mark.parametrize(
    ("cocycle", "kind"),
    [
        (r_class(5), "unramified"),
        (s_class(5), "null"),
        (r_class(5) + s_class(5).scale(3), "mixed"),
        (Cocycle.zero(5), "coboundary"),
    ],
)
def test_classify_reports_kind(cocycle: Cocycle, kind: str, tame_model_p5) -> None:
    """The (r, s) coordinates decide the kind of class."""
    # Act
    result = classify(cocycle, tame_model_p5)

    # Assert
    assert result.kind == kind


def test_classify_ignores_coboundary_part(tame_model_p5) -> None:
    """Adding a coboundary does not change the class."""
    # Arrange
    shifted = r_class(5).scale(2) + coboundary(trace_zero(0, 1, 0, 5), tame_model_p5)

    # Act
    result = classify(shifted, tame_model_p5)

    # Assert
    assert (result.a, result.b) == (2, 0)


def test_classify_rejects_non_cocycle(tame_model_p5) -> None:
    """f(tau) outside the l-eigenspace violates the tame relation."""
    # Arrange
    bad = Cocycle.from_vector([0, 0, 0, 1, 0, 0], 5)

    # Act + Assert
    with pytest.raises(InvalidCocycleError, match="eigenspace"):
        classify(bad, tame_model_p5)


def test_adjust_to_special_worked_example(worked_rep) -> None:
    """diag(17, 21) mod 25 at l = 7 needs alpha = 4 times r."""
    # Act
    adjustment = adjust_to_special(worked_rep, r_class(5))

    # Assert
    assert adjustment.alpha == 4
    assert is_special(adjustment.rep)
    assert adjustment.rep.sigma_img.entries == (7, 0, 0, 1)


def test_adjust_to_special_rejects_null_class(worked_rep) -> None:
    """The null class cannot move the Frobenius eigenvalue."""
    # Act + Assert
    with pytest.raises(CannotAdjustError, match="null"):
        adjust_to_special(worked_rep, s_class(5))


def test_adjust_to_special_keeps_special_rep(tame_model_p5) -> None:
    """An already special rep needs alpha = 0."""
    # Arrange
    rep = special_rep(tame_model_p5, 4, 25)

    # Act
    adjustment = adjust_to_special(rep, r_class(5))

    # Assert
    assert adjustment.alpha == 0
    assert adjustment.rep.u.value == 25


@pytest.mark.parametrize("level", [2, 3, 4, 5, 6])
def test_act_null_class_shifts_u(level: int, tame_model_p5) -> None:
    """Acting by s at depth n - 1 sends u to u + p^(n-1) and stays special."""
    # Arrange
    step = 5 ** (level - 1)
    modulus = 5**level

    for u in range(0, modulus, 5):
        rep = special_rep(tame_model_p5, level, u)

        # Act
        moved = act(s_class(5), rep, level - 1)

        # Assert
        assert is_special(moved)
        assert moved.u.value == (u + step) % modulus


def test_act_rejects_exponent_out_of_range(tame_model_p5) -> None:
    """e must lie in [1, level - 1]."""
    # Arrange
    rep = special_rep(tame_model_p5, 3, 0)

    # Act + Assert
    with pytest.raises(ExponentRangeError):
        act(r_class(5), rep, 3)


def test_act_preserves_relation(tame_model_p5) -> None:
    """Twisting by a cocycle keeps sigma tau sigma^-1 = tau^l."""
    # Arrange
    rep = special_rep(tame_model_p5, 4, 50)

    # Act
    moved = act(r_class(5).scale(2) + s_class(5).scale(3), rep, 3)

    # Assert
    assert check_relation(moved)
    assert not is_special(moved)


def test_special_rep_rejects_unit_u(tame_model_p5) -> None:
    """u must be divisible by p."""
    # Act + Assert
    with pytest.raises(PreconditionError, match="not divisible"):
        special_rep(tame_model_p5, 3, 2)


def test_special_lift_step_rejects_inconsistent_u(tame_model_p5) -> None:
    """The next u has to reduce to the current one."""
    # Arrange
    rep = special_rep(tame_model_p5, 2, 5)

    # Act + Assert
    with pytest.raises(InconsistentLiftError):
        special_lift_step(rep, 10)


def test_special_lift_step_extends_level(tame_model_p5) -> None:
    """A consistent u gives the special rep one level up."""
    # Arrange
    rep = special_rep(tame_model_p5, 2, 5)

    # Act
    lifted = special_lift_step(rep, 5 + 25 * 3)

    # Assert
    assert lifted.level == 3
    assert lifted.u.value == 80
    assert is_special(lifted)


def test_normalize_to_special_rejects_wrong_residual_shape(tame_model_p5) -> None:
    """Inertia has to be trivial mod p."""
    # Arrange
    rep = LocalRep(
        tame_model_p5, 2, Mat2.diag(7, 1, 5, 2), Mat2(1, 1, 0, 1, 5, 2)
    )

    # Act + Assert
    with pytest.raises(PreconditionError, match="does not reduce"):
        normalize_to_special(rep)


def test_count_lift_classes_is_p_squared() -> None:
    """Lifts of a special rep one level up form p^2 strict classes."""
    # Arrange
    model = TameModel(5, 7, 3)
    rep = special_rep(model, 2, 5)

    # Act
    classes = count_lift_classes(rep)

    # Assert
    assert classes == 25


def test_nonnull_line_fraction() -> None:
    """Of the p ramified lines, p - 1 are nonnull."""
    # Act + Assert
    assert nonnull_line_fraction(5) == Fraction(4, 5)


def test_adjust_to_special_random_perturbations(tame_model_p5) -> None:
    """Seeded lifts of special reps at levels 2..7 have exactly one good alpha."""
    # Arrange
    rng = np.random.default_rng(0)
    p = 5

    for _ in range(1000):
        level = int(rng.integers(2, 8))
        e = level - 1
        step = p**e
        u = p * int(rng.integers(0, p ** (level - 1)))
        a, b = (int(value) for value in rng.integers(0, p, size=2))
        x, y, z, w = (int(value) for value in rng.integers(0, p, size=4))
        conjugator = Mat2(1 + step * x, step * y, step * z, 1 + step * w, p, level)
        rep = act(
            r_class(p).scale(a) + s_class(p).scale(b),
            special_rep(tame_model_p5, level, u),
            e,
        ).conjugate(conjugator)

        # Act
        adjustment = adjust_to_special(rep, r_class(p))

        # Assert
        assert is_special(adjustment.rep)
        good = [
            beta
            for beta in range(p)
            if normalize_to_special(act(r_class(p).scale(beta), rep, e)).is_special
        ]
        assert good == [adjustment.alpha]


def test_act_by_coboundary_is_conjugation(tame_model_p5) -> None:
    """f and f + dM give reps conjugate by I + p^e M."""
    # Arrange
    rep = special_rep(tame_model_p5, 4, 25)
    f = r_class(5).scale(2) + s_class(5)
    m = trace_zero(1, 2, 3, 5)
    conjugator = Mat2(1 + 125, 250, 375, 1 - 125, 5, 4)

    # Act
    shifted = act(f + coboundary(m, tame_model_p5), rep, 3)
    conjugated = act(f, rep, 3).conjugate(conjugator)

    # Assert
    assert shifted == conjugated
    assert has_cyclotomic_determinant(shifted)


def test_check_relation_rejects_lower_unitriangular_tau() -> None:
    """sigma = diag(7, 1), tau = (1, 0; 5, 1) mod 25 breaks the tame relation."""
    # Arrange
    model = TameModel(5, 7, 2)
    rep = LocalRep(model, 2, Mat2.diag(7, 1, 5, 2), Mat2(1, 0, 5, 1, 5, 2))

    # Act + Assert
    assert not check_relation(rep)


def test_check_relation_forces_unipotent_tau() -> None:
    """Every tau = I mod 5 satisfying the relation mod 25 is (1, 5b; 0, 1)."""
    # Arrange
    model = TameModel(5, 7, 2)
    sigma = Mat2.diag(7, 1, 5, 2)

    candidates = [
        Mat2(1 + 5 * a, 5 * b, 5 * c, 1 + 5 * d, 5, 2)
        for a, b, c, d in itertools.product(range(5), repeat=4)
    ]

    # Act
    solutions = [
        tau for tau in candidates if check_relation(LocalRep(model, 2, sigma, tau))
    ]

    # Assert
    assert len(solutions) == 5
    assert all((tau.a, tau.c, tau.d) == (1, 0, 1) for tau in solutions)


@pytest.mark.parametrize("shape", ["upper", "lower"])
def test_normalize_to_special_recovers_special_rep(shape: str, tame_model_p5) -> None:
    """Conjugating a special rep by a unipotent I mod p is undone exactly."""
    # Arrange
    rng = np.random.default_rng(11)
    for _ in range(50):
        level = int(rng.integers(2, 8))
        u = 5 * int(rng.integers(0, 5 ** (level - 1)))
        x = 5 * int(rng.integers(0, 5 ** (level - 1)))
        unipotent = (
            Mat2(1, x, 0, 1, 5, level)
            if shape == "upper"
            else Mat2(1, 0, x, 1, 5, level)
        )
        special = special_rep(tame_model_p5, level, u)

        # Act
        form = normalize_to_special(special.conjugate(unipotent))

        # Assert
        assert form.is_special
        assert form.eigenpair[0].value == 7
        assert form.eigenpair[1].value == 1
        assert form.u.value == u
        assert form.rep == special


def test_act_unramified_class_moves_frobenius() -> None:
    """r acting at depth 1 takes diag(7, 1) to diag(17, 21) mod 25."""
    # Arrange
    model = TameModel(5, 7, 2)
    rep = LocalRep(model, 2, Mat2.diag(7, 1, 5, 2), Mat2.identity(5, 2))

    # Act
    moved = act(r_class(5), rep, 1)

    # Assert
    assert moved.sigma_img == Mat2.diag(17, 21, 5, 2)
    assert moved.tau_img.is_identity()


def test_adjust_to_special_with_mixed_class_keeps_reduction(tame_model_p5) -> None:
    """Adjusting by r + s fixes the top level and leaves the level below alone."""
    # Arrange
    rng = np.random.default_rng(5)
    p = 5
    f = r_class(p) + s_class(p)

    for _ in range(200):
        level = int(rng.integers(2, 8))
        e = level - 1
        step = p**e
        u = p * int(rng.integers(0, p ** (level - 1)))
        a, b, x, y, z, w = (int(value) for value in rng.integers(0, p, size=6))
        rep = act(
            r_class(p).scale(a) + s_class(p).scale(b),
            special_rep(tame_model_p5, level, u),
            e,
        ).conjugate(Mat2(1 + step * x, step * y, step * z, 1 + step * w, p, level))

        # Act
        adjustment = adjust_to_special(rep, f)

        # Assert
        assert is_special(adjustment.rep)
        assert adjustment.rep.reduce(e) == rep.reduce(e)
