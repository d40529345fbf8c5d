from __future__ import annotations

import numpy as np
import pytest

from ramify.errors import PartialSearchError, UnsupportedConfigurationError
from ramify.groups import (
    CapExceeded,
    NoSection,
    SectionFound,
    SemidirectElement,
    chebotarev_class,
    closure,
    element_order,
    gl2_generators,
    is_torsion_free_lift,
    layer_centralizer_order,
    matrix_order,
    section_search,
)
from ramify.zmod import Mat2, TraceZeroMat, gl2_order, teichmuller


@pytest.mark.parametrize("p", [5, 7])
def test_closure_generates_gl2(p: int) -> None:
    """The chosen generator pair spans all of GL2(F_p)."""
    # Act
    size = closure(gl2_generators(p))

    # Assert
    assert size == gl2_order(p, 1) == (p * p - 1) * (p * p - p)


def test_closure_stops_at_cap() -> None:
    """Exceeding the cap returns CapExceeded instead of a size."""
    # Act
    result = closure(gl2_generators(5), cap=100)

    # Assert
    assert result == CapExceeded(100)


def test_matrix_order_of_generators() -> None:
    """(0, -1; 1, 1) has order 6 and diag(2, 1) order 4 mod 5."""
    # Arrange
    diagonal, rotation = gl2_generators(5)

    # Act + Assert
    assert matrix_order(rotation) == 6
    assert matrix_order(diagonal) == 4


def test_section_search_finds_split_torus() -> None:
    """The diagonal torus mod p lifts isomorphically through Teichmuller."""
    # Arrange
    x = Mat2.diag(2, 1, 5, 1)
    y = Mat2.diag(1, 2, 5, 1)

    # Act
    result = section_search(5, generators=(x, y))

    # Assert
    assert isinstance(result, SectionFound)
    witness_x, witness_y = result.witness
    assert closure([witness_x, witness_y]) == 16
    assert witness_x.reduce(1) == x


def test_section_search_respects_budget() -> None:
    """A budget smaller than one row of candidates stops before any work."""
    # Act
    with pytest.raises(PartialSearchError) as excinfo:
        section_search(5, budget=100)

    # Assert
    assert excinfo.value.examined == 0
    assert excinfo.value.total == 390625


@pytest.mark.slow
def test_section_search_finds_no_section_of_gl2() -> None:
    """GL2(Z/25) -> GL2(F_5) does not split: all 5^16 pairs are ruled out."""
    # Act
    result = section_search(5)

    # Assert
    assert isinstance(result, NoSection)
    assert result.examined == result.total == 390625


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_element_order_of_uncond_class(k: int) -> None:
    """(diag(2*, 1), diag(1, -1)) has order p * ord(2) = 20 for p = 5."""
    # Arrange
    spec = chebotarev_class("uncond", 5, k)

    # Act
    order = element_order(spec.element())

    # Assert
    assert order == 20
    assert element_order(spec.element().project_down()) == 4


def test_chebotarev_class_grh_is_special_below_top() -> None:
    """The grh class agrees with diag(2*, 1) mod p^(k+1) but not mod p^(k+2)."""
    # Arrange
    spec = chebotarev_class("grh", 5, 2)
    special = Mat2.diag(teichmuller(2, 5, 4), 1, 5, 4)

    # Act + Assert
    assert spec.A.reduce(3) == special.reduce(3)
    assert spec.A != special
    assert spec.B.is_zero()
    assert spec.frobenius_congruence.value == teichmuller(2, 5, 4).value


def test_chebotarev_class_rejects_unknown_variant() -> None:
    """Only the two lifting variants have Frobenius classes."""
    # Act + Assert
    with pytest.raises(UnsupportedConfigurationError, match="unknown variant"):
        chebotarev_class("other", 5, 1)  # type: ignore[arg-type]


@pytest.mark.parametrize(("p", "g"), [(5, 2), (7, 3)])
def test_layer_centralizer_order_is_p(p: int, g: int) -> None:
    """Only the diagonal trace-zero layer commutes with diag(g, 1)."""
    # Act + Assert
    assert layer_centralizer_order(Mat2.diag(g, 1, p, 1)) == p


def test_layer_centralizer_order_rejects_scalar() -> None:
    """A scalar matrix centralizes every layer and is refused."""
    # Act + Assert
    with pytest.raises(UnsupportedConfigurationError, match="distinct entries"):
        layer_centralizer_order(Mat2.diag(2, 2, 5, 1))


@pytest.mark.parametrize(
    ("entries", "expected"),
    [((1, 5, 0, 1), True), ((1, 0, 0, 1), False), ((2, 0, 0, 1), False)],
)
def test_is_torsion_free_lift(
    entries: tuple[int, int, int, int], expected: bool
) -> None:
    """Only nontrivial lifts of the identity are torsion free."""
    # Arrange
    tau = Mat2.from_entries(entries, 5, 2)

    # Act + Assert
    assert is_torsion_free_lift(tau) is expected


def test_semidirect_inverse_cancels() -> None:
    """x * x^-1 is the identity, layers included."""
    # Arrange
    element = chebotarev_class("uncond", 5, 1).element()

    # Act
    product = element * element.inverse()

    # Assert
    assert product.is_identity()
    assert (element.inverse() * element).is_identity()


def test_chebotarev_class_grh_first_stage_matrix() -> None:
    """At k = 0 the grh Frobenius is diag(17, 21) mod 25: special mod 5 only."""
    # Act
    spec = chebotarev_class("grh", 5, 0)

    # Assert
    assert spec.A.entries == (17, 0, 0, 21)
    assert spec.A.reduce(1) == Mat2.diag(2, 1, 5, 1)


@pytest.mark.parametrize(
    ("generators", "expected"),
    [([Mat2.identity(5, 1)], 1), ([Mat2.diag(2, 1, 5, 1)], 4)],
)
def test_closure_of_small_groups(generators: list[Mat2], expected: int) -> None:
    """{I} spans the trivial group and diag(2, 1) a cyclic group of order 4."""
    # Act + Assert
    assert closure(generators) == expected


@pytest.mark.slow
def test_closure_cap_agrees_with_full_closure() -> None:
    """Capping at |GL2(F_5)| aborts exactly when the full closure is larger."""
    # Arrange
    rng = np.random.default_rng(2)
    x, y = gl2_generators(5)
    cap = gl2_order(5, 1)

    for _ in range(3):
        shifts = [5 * int(value) for value in rng.integers(0, 5, size=8)]
        x_lift = Mat2.from_entries(
            tuple(v + s for v, s in zip(x.entries, shifts[:4])), 5, 2
        )
        y_lift = Mat2.from_entries(
            tuple(v + s for v, s in zip(y.entries, shifts[4:])), 5, 2
        )

        # Act
        capped = closure([x_lift, y_lift], cap=cap)
        full = closure([x_lift, y_lift])

        # Assert
        assert isinstance(full, int)
        if isinstance(capped, CapExceeded):
            assert full > cap
        else:
            assert capped == full <= cap


def test_section_search_mod_p_is_a_section() -> None:
    """With a trivial kernel (level 1) the generators themselves are a section."""
    # Act
    result = section_search(5, level=1)

    # Assert
    assert isinstance(result, SectionFound)
    assert result.total == 1
    assert closure(list(result.witness)) == gl2_order(5, 1)


def _random_element(rng: np.random.Generator, depth: int) -> SemidirectElement:
    while True:
        entries = [int(value) for value in rng.integers(0, 25, size=4)]
        c_part = Mat2(*entries, 5, 2)
        if c_part.det().value % 5:
            break
    layers = []
    for _ in range(depth):
        x, y, z = (int(value) for value in rng.integers(0, 5, size=3))
        layers.append(TraceZeroMat(x, y, z, -x, 5, 1))
    return SemidirectElement(tuple(layers), c_part)


def test_semidirect_product_is_associative() -> None:
    """(a b) c = a (b c) for random elements with two layers."""
    # Arrange
    rng = np.random.default_rng(4)

    for _ in range(100):
        a, b, c = (_random_element(rng, 2) for _ in range(3))

        # Act + Assert
        assert (a * b) * c == a * (b * c)
