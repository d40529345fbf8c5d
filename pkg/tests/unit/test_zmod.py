from __future__ import annotations

import numpy as np
import pytest

from ramify.errors import (
    DomainError,
    PreconditionError,
    SingularMatrixError,
    UnsupportedConfigurationError,
)
from ramify.zmod import (
    Mat2,
    Residue,
    check_precision,
    gl2_order,
    hensel_diagonalize,
    teichmuller,
    valuation,
)


@pytest.mark.parametrize("level", [1, 2, 4, 8])
def test_teichmuller_is_root_of_unity(level: int) -> None:
    """The lift of 2 is a (p - 1)-st root of unity congruent to 2 mod p."""
    # Arrange + Act: lift 2 at several precisions.
    lift = teichmuller(2, 5, level)

    # Assert: fourth power is 1 and the residue is unchanged.
    assert (lift**4).value == 1
    assert lift.value % 5 == 2


def test_teichmuller_level_two_is_seven() -> None:
    """2* mod 25 is 7."""
    # Act + Assert
    assert teichmuller(2, 5, 2).value == 7


def test_teichmuller_rejects_multiple_of_p() -> None:
    """A multiple of p has no Teichmuller lift."""
    # Act + Assert
    with pytest.raises(DomainError, match="divisible"):
        teichmuller(10, 5, 3)


def test_residue_add_takes_lower_level() -> None:
    """Mixing precisions truncates to the smaller one."""
    # Arrange
    high = Residue(7, 5, 3)
    low = Residue(24, 5, 2)

    # Act
    total = high + low

    # Assert
    assert total.level == 2
    assert total.value == (7 + 24) % 25


def test_residue_add_rejects_mismatched_p() -> None:
    """Residues over different primes cannot be combined."""
    # Act + Assert
    with pytest.raises(DomainError, match="cannot combine"):
        Residue(1, 5, 2) + Residue(1, 7, 2)


def test_residue_inverse_rejects_non_unit() -> None:
    """Multiples of p are not invertible."""
    # Act + Assert
    with pytest.raises(DomainError, match="not a unit"):
        Residue(10, 5, 3).inverse()


def test_valuation_of_zero_is_level() -> None:
    """Zero mod p^level has valuation level; p^2 * unit has valuation 2."""
    # Act + Assert
    assert valuation(0, 5, 6) == 6
    assert valuation(75, 5, 6) == 2


def test_check_precision_rejects_overflow() -> None:
    """5^28 does not fit in a signed 64-bit word while 5^27 does."""
    # Act + Assert
    check_precision(5, 27)
    with pytest.raises(UnsupportedConfigurationError, match="64 bits"):
        check_precision(5, 28)


def test_check_precision_rejects_small_prime() -> None:
    """p = 3 is outside the supported range."""
    # Act + Assert
    with pytest.raises(UnsupportedConfigurationError, match="prime >= 5"):
        check_precision(3, 2)


def test_gl2_order_matches_formula() -> None:
    """|GL2(F_5)| = 480 and each extra level multiplies by p^4."""
    # Act + Assert
    assert gl2_order(5, 1) == 480
    assert gl2_order(5, 2) == 480 * 5**4


def test_mat2_inverse_raises_on_singular() -> None:
    """A determinant divisible by p is not invertible."""
    # Arrange
    singular = Mat2(5, 0, 0, 1, 5, 2)

    # Act + Assert
    with pytest.raises(SingularMatrixError):
        singular.inverse()


def test_mat2_inverse_is_two_sided() -> None:
    """m @ m^-1 is the identity."""
    # Arrange
    m = Mat2(3, 5, 10, 2, 5, 4)

    # Act
    product = m @ m.inverse()

    # Assert
    assert product.is_identity()


def test_mat2_pow_negative_uses_inverse() -> None:
    """m^-2 @ m^2 is the identity."""
    # Arrange
    m = Mat2(2, 1, 0, 3, 5, 3)

    # Act + Assert
    assert ((m**-2) @ (m**2)).is_identity()


def test_hensel_diagonalize_conjugates_to_diagonal() -> None:
    """C m C^-1 = D with C = I mod p and D diagonal."""
    # Arrange
    m = Mat2(17, 5, 10, 21, 5, 4)

    # Act
    conjugator, diagonal = hensel_diagonalize(m)

    # Assert
    assert diagonal.is_diagonal()
    assert m.conjugate(conjugator).entries == diagonal.entries
    assert conjugator.reduce(1).is_identity()
    assert diagonal.det().value == m.det().value


def test_hensel_diagonalize_keeps_diagonal_input() -> None:
    """An already diagonal matrix is returned with the identity conjugator."""
    # Arrange
    m = Mat2.diag(7, 1, 5, 3)

    # Act
    conjugator, diagonal = hensel_diagonalize(m)

    # Assert
    assert conjugator.is_identity()
    assert diagonal == m


def test_hensel_diagonalize_rejects_repeated_eigenvalues() -> None:
    """Eigenvalues equal mod p are outside the Hensel hypotheses."""
    # Act + Assert
    with pytest.raises(PreconditionError, match="repeated eigenvalues"):
        hensel_diagonalize(Mat2.diag(2, 7, 5, 2))


def test_hensel_diagonalize_rejects_non_diagonal_residue() -> None:
    """The matrix has to be diagonal mod p."""
    # Act + Assert
    with pytest.raises(PreconditionError, match="not diagonal"):
        hensel_diagonalize(Mat2(2, 1, 0, 1, 5, 2))


def test_mat2_random_inverses_mod_125() -> None:
    """m @ m^-1 and m^-1 @ m are the identity for random invertible m mod 5^3."""
    # Arrange
    rng = np.random.default_rng(7)
    checked = 0

    while checked < 100:
        entries = [int(value) for value in rng.integers(0, 125, size=4)]
        m = Mat2(*entries, 5, 3)
        if m.det().value % 5 == 0:
            continue

        # Act
        inverse = m.inverse()

        # Assert
        assert (m @ inverse).is_identity()
        assert (inverse @ m).is_identity()
        assert (Mat2.identity(5, 3) @ m) == m
        checked += 1


def test_mat2_det_of_diagonal() -> None:
    """det(diag(7, 1)) mod 25 is 7 and the trace is 8."""
    # Arrange
    m = Mat2.diag(7, 1, 5, 2)

    # Act + Assert
    assert m.det().value == 7
    assert m.trace().value == 8
