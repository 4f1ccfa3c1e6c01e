"""Pydantic schema of the JSON model configuration.

    {"lambda": 3, "fock_dimension": 30, "tolerance": 1e-9,
     "structure_function": {"kind": "oscillator"},
     "f": [{"kind": "poly", "coeffs": [[1, 0]]}, ...]}

Complex numbers are [re, im] pairs; polynomial coefficients are ascending.
"""
from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from Fssqm.models import (
    ComponentFunction,
    ComponentKind,
    StructureFunctionSpec,
    StructureKind,
)

ComplexPair = tuple[float, float]


class StructureFunctionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    kind: StructureKind
    alpha: list[float] = Field(default_factory=list)
    values: list[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_kind_fields(self):
        if self.kind == StructureKind.C_LAMBDA_EXTENDED and not self.alpha:
            raise ValueError("c_lambda_extended needs 'alpha'")
        if self.kind == StructureKind.TABLE and not self.values:
            raise ValueError("table structure function needs 'values'")
        return self

    def to_spec(self, lam: int) -> StructureFunctionSpec:
        if self.kind == StructureKind.C_LAMBDA_EXTENDED:
            return StructureFunctionSpec(self.kind, lam=lam, alpha=tuple(self.alpha))
        if self.kind == StructureKind.TABLE:
            return StructureFunctionSpec(self.kind, values=tuple(self.values))
        return StructureFunctionSpec(self.kind)


class ComponentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: ComponentKind
    coeffs: list[ComplexPair] = Field(default_factory=list)
    values: list[ComplexPair] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_kind_fields(self):
        if self.kind == ComponentKind.POLY:
            if not self.coeffs:
                raise ValueError("poly component needs 'coeffs'")
            if len(self.coeffs) - 1 > ComponentFunction.MAX_DEGREE:
                raise ValueError(
                    f"poly degree must be <= {ComponentFunction.MAX_DEGREE}, "
                    f"got {len(self.coeffs) - 1}"
                )
        elif not self.values:
            raise ValueError("table component needs 'values'")
        return self

    def to_component(self) -> ComponentFunction:
        if self.kind == ComponentKind.POLY:
            return ComponentFunction(self.kind, coeffs=tuple(complex(*c) for c in self.coeffs))
        return ComponentFunction(self.kind, values=tuple(complex(*v) for v in self.values))


class ModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    lam: int = Field(alias="lambda", ge=2)
    fock_dimension: int
    tolerance: Optional[float] = Field(default=None, gt=0)
    structure_function: StructureFunctionConfig
    f: list[ComponentConfig]

    @model_validator(mode="after")
    def _check_sizes(self):
        if self.fock_dimension < 4 * self.lam:
            raise ValueError(
                f"fock_dimension must be >= 4*lambda = {4 * self.lam}, got {self.fock_dimension}"
            )
        if len(self.f) != self.lam:
            raise ValueError(f"'f' must list lambda = {self.lam} components, got {len(self.f)}")
        sf = self.structure_function
        if sf.kind == StructureKind.C_LAMBDA_EXTENDED and len(sf.alpha) != self.lam:
            raise ValueError(f"'alpha' must have lambda = {self.lam} entries, got {len(sf.alpha)}")
        if sf.kind == StructureKind.TABLE and len(sf.values) < self.fock_dimension + 1:
            raise ValueError(
                f"table 'values' must cover F(0..{self.fock_dimension}), got {len(sf.values)}"
            )
        for i, comp in enumerate(self.f, start=1):
            if comp.kind == ComponentKind.TABLE and len(comp.values) < self.fock_dimension + 1:
                raise ValueError(
                    f"f_{i} table must cover n = 0..{self.fock_dimension}, got {len(comp.values)}"
                )
        return self

    def to_spec(self) -> StructureFunctionSpec:
        return self.structure_function.to_spec(self.lam)

    def components(self) -> list[ComponentFunction]:
        return [c.to_component() for c in self.f]
