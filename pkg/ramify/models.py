from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .zmod import teichmuller

Variant = Literal["uncond", "grh"]
Restriction = tuple[int, int]


class PlaceDescriptor(BaseModel):
    """A place of the base set together with the data its cohomology needs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["tame_l", "multiplicative_v", "ordinary_p"]
    p: int = 5
    l: Optional[int] = None
    v: Optional[int] = None
    star_nontrivial: bool = True
    psi_order: Optional[int] = None


class GlobalClass(BaseModel):
    """A global cohomology class, known only through its restrictions.

    `restrictions` maps a prime name to coordinates (a, b) in the (r, s)
    basis of local H1 there; primes that are absent restrict trivially.
    `at_p` holds coordinates of the restriction at p (grh models only).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    origin_stage: int = Field(ge=0)
    restrictions: dict[str, Restriction] = Field(default_factory=dict)
    at_p: list[int] = Field(default_factory=list)

    def restriction(self, prime: str) -> Restriction:
        return self.restrictions.get(prime, (0, 0))


class PrimeSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    l_shift: int = Field(default=0, ge=0)
    l: Optional[int] = None
    repair_class: str
    introduction_class: Optional[str] = None


class StageSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    stage: int = Field(ge=1)
    primes: list[PrimeSpec] = Field(min_length=1, max_length=2)

    @property
    def two_prime(self) -> bool:
        return len(self.primes) == 2


class OrdinaryData(BaseModel):
    """Local-at-p bookkeeping: W is the ordinary subspace of local H1 at p.

    The complementary subspace U is spanned by the restrictions at p of the
    base classes.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    ambient_dim: int = Field(ge=1)
    w_basis: list[list[int]]


class GlobalModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    schema_version: str = "1"
    p: int
    N: int
    variant: Variant
    seed: int = 0
    base_h1_dim: int = 2
    ordinary: Optional[OrdinaryData] = None
    classes: list[GlobalClass]
    stages: list[StageSpec] = Field(default_factory=list)

    def class_by_name(self, name: str) -> GlobalClass | None:
        return next((item for item in self.classes if item.name == name), None)

    def base_classes(self) -> list[GlobalClass]:
        return [item for item in self.classes if item.origin_stage == 0]

    def prime_entries(self) -> list[tuple[int, PrimeSpec]]:
        return [(stage.stage, prime) for stage in self.stages for prime in stage.primes]

    def prime_l(self, stage: int, prime: PrimeSpec) -> int:
        """l = 2* (1 + p^(stage+1) l_shift) mod p^N unless l is given."""
        modulus = self.p**self.N
        if prime.l is not None:
            return prime.l % modulus
        two_star = teichmuller(2, self.p, self.N).value
        return (two_star * (1 + self.p ** (stage + 1) * prime.l_shift)) % modulus
