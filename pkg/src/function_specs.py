"""Function-spec documents: the JSON wire format for analytic functions."""

from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator

from src.funcspace import (
    AnalyticFn,
    GznFamily,
    LinearCombo,
    LogExtremal,
    MobiusAtom,
    Polynomial,
    Precomposed,
)


# [re, im]
ComplexPair = tuple[float, float]


def _inside_disk(value: ComplexPair) -> ComplexPair:
    if abs(complex(*value)) >= 1.0:
        raise ValueError(f"{list(value)} must lie in the open unit disk")
    return value


class _SpecModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class PolynomialSpec(_SpecModel):
    type: Literal["polynomial"]
    coeffs: list[ComplexPair] = Field(min_length=1)

    def build(self) -> AnalyticFn:
        return Polynomial(tuple(complex(*c) for c in self.coeffs))


class MobiusSpec(_SpecModel):
    type: Literal["mobius"]
    lam: ComplexPair = Field(alias="lambda")

    @field_validator("lam")
    @classmethod
    def lambda_in_disk(cls, value: ComplexPair) -> ComplexPair:
        return _inside_disk(value)

    def build(self) -> AnalyticFn:
        return MobiusAtom(complex(*self.lam))


class LogExtremalSpec(_SpecModel):
    type: Literal["log_extremal"]

    def build(self) -> AnalyticFn:
        return LogExtremal()


class GznSpec(_SpecModel):
    type: Literal["gzn"]
    n: int = Field(ge=0, le=99_999)
    base: ComplexPair

    @field_validator("base")
    @classmethod
    def base_in_disk(cls, value: ComplexPair) -> ComplexPair:
        return _inside_disk(value)

    def build(self) -> AnalyticFn:
        return GznFamily(self.n, complex(*self.base))


class ComboTerm(_SpecModel):
    coef: ComplexPair
    fn: "FunctionSpec"


class ComboSpec(_SpecModel):
    type: Literal["combo"]
    terms: list[ComboTerm] = Field(min_length=1)

    def build(self) -> AnalyticFn:
        return LinearCombo(tuple((complex(*t.coef), t.fn.build()) for t in self.terms))


class ComposedSpec(_SpecModel):
    """outer(e^{i theta} phi_lambda(z))."""
    type: Literal["composed"]
    outer: "FunctionSpec"
    lam: ComplexPair = Field(default=(0.0, 0.0), alias="lambda")
    theta: float = 0.0

    @field_validator("lam")
    @classmethod
    def lambda_in_disk(cls, value: ComplexPair) -> ComplexPair:
        return _inside_disk(value)

    def build(self) -> AnalyticFn:
        return Precomposed(self.outer.build(), complex(*self.lam), self.theta)


FunctionSpec = Annotated[
    Union[PolynomialSpec, MobiusSpec, LogExtremalSpec, GznSpec, ComboSpec, ComposedSpec],
    Field(discriminator="type"),
]

ComboTerm.model_rebuild()
ComboSpec.model_rebuild()
ComposedSpec.model_rebuild()

_adapter = TypeAdapter(FunctionSpec)


def parse_function_spec(document: dict) -> AnalyticFn:
    """Validate a decoded spec document and build its function; raises pydantic ValidationError."""
    return _adapter.validate_python(document).build()


def load_function_spec(path: str | Path) -> AnalyticFn:
    """Read and build a spec from a JSON file."""
    return _adapter.validate_json(Path(path).read_text(encoding="utf-8")).build()


def _pair(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


def to_spec(f: AnalyticFn) -> dict:
    """Encode a function as a spec document."""
    if isinstance(f, Polynomial):
        return {"type": "polynomial", "coeffs": [_pair(c) for c in f.coeffs]}
    if isinstance(f, MobiusAtom):
        return {"type": "mobius", "lambda": _pair(f.lam)}
    if isinstance(f, LogExtremal):
        return {"type": "log_extremal"}
    if isinstance(f, GznFamily):
        return {"type": "gzn", "n": f.n, "base": _pair(f.base)}
    if isinstance(f, LinearCombo):
        return {
            "type": "combo",
            "terms": [{"coef": _pair(c), "fn": to_spec(g)} for c, g in f.terms],
        }
    if isinstance(f, Precomposed):
        return {
            "type": "composed",
            "outer": to_spec(f.outer),
            "lambda": _pair(f.lam),
            "theta": f.theta,
        }
    raise TypeError(f"No spec encoding for {type(f).__name__}")
