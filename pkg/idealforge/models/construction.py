from pydantic import BaseModel, ConfigDict, Field, model_validator

from idealforge.models.family import FiniteSet
from idealforge.models.numeric import Nat


class SqrtDecomposition(BaseModel):
    """k = 2^{3q^2} + gamma * 2^{q^2} + beta with 2^{3q^2} <= k < 2^{3(q+1)^2} and beta < 2^{q^2}."""

    model_config = ConfigDict(frozen=True)

    q: int = Field(ge=1)
    gamma: Nat
    beta: Nat

    @model_validator(mode="after")
    def _in_range(self) -> "SqrtDecomposition":
        if self.beta >= 1 << (self.q * self.q):
            raise ValueError("beta must be below 2^(q^2)")
        if self.value >= 1 << (3 * (self.q + 1) ** 2):
            raise ValueError("k must be below 2^(3(q+1)^2)")
        return self

    @property
    def value(self) -> int:
        q2 = self.q * self.q
        return (1 << (3 * q2)) + (self.gamma << q2) + self.beta


class BaseCasePlan(BaseModel):
    """Every intermediate of the 2^{3q^2} + beta construction, kept for audit."""

    model_config = ConfigDict(frozen=True)

    q: int = Field(ge=2)
    beta: Nat
    # f_grid[i][j] is F_ij.
    f_grid: tuple[tuple[FiniteSet, ...], ...]
    s_sets: tuple[FiniteSet, ...]
    t_sets: tuple[FiniteSet, ...]
    # a_0 .. a_q with t2 = 2^{3q^2-1} - sum a_j 2^{jq}.
    a: tuple[int, ...]
    system_count: Nat
    correction: Nat
    t1: Nat
    t2: Nat

    @property
    def target(self) -> int:
        return (1 << (3 * self.q * self.q)) + self.beta
