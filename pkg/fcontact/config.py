"""
JSON documents describing structures and pipelines.

The schemas are pydantic models; every validation failure surfaces as a
ConfigError, every malformed expression as a ParseError naming the tensor
component it came from.
"""
import json
import logging
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .chart import Chart
from .exceptions import ConfigError, ParseError
from .expr import parse
from .fields import Metric, OneForm, Tensor11, VectorField
from .structures import FStructure

_logger = logging.getLogger(__name__)

Expression = Union[str, float]


def expression_text(value):
    return value if isinstance(value, str) else repr(float(value))


def parse_component(value, chart, params, where):
    text = expression_text(value)
    try:
        return parse(text, chart, params)
    except ParseError as e:
        raise type(e)(f"{e.message} in {where}", e.text, e.offset) from e


def parse_rows(rows, chart, params, name):
    return [[parse_component(value, chart, params, f"{name}[{a}][{b}]") for b, value in enumerate(row)]
            for a, row in enumerate(rows)]


class _Model(BaseModel):
    model_config = ConfigDict(extra='forbid')


class ChartConfig(_Model):
    dim: int = Field(..., ge=1)
    coords: List[str]
    box: Optional[List[Tuple[float, float]]] = None

    @model_validator(mode='after')
    def _check_sizes(self):
        if len(self.coords) != self.dim:
            raise ValueError(f"chart.dim is {self.dim} but {len(self.coords)} coordinates are named")
        if self.box is not None and len(self.box) != self.dim:
            raise ValueError(f"chart.box has {len(self.box)} intervals for dimension {self.dim}")
        return self

    def build(self):
        return Chart(self.coords, self.box)


class StructureConfig(_Model):
    chart: ChartConfig
    n: int = Field(..., ge=0)
    s: int = Field(..., ge=1)
    f: List[List[Expression]]
    xi: List[List[Expression]]
    eta: List[List[Expression]]
    g: List[List[Expression]]
    params: Dict[str, float] = Field(default_factory=dict)
    label: str = ''

    @model_validator(mode='after')
    def _check_shapes(self):
        N = self.chart.dim
        if N != 2 * self.n + self.s:
            raise ValueError(f"chart.dim {N} is not 2n+s = {2 * self.n + self.s}")
        if len(self.f) != N or any(len(row) != N for row in self.f):
            raise ValueError(f"f must be a {N}x{N} array of expressions")
        for name in ('xi', 'eta'):
            rows = getattr(self, name)
            if len(rows) != self.s or any(len(row) != N for row in rows):
                raise ValueError(f"{name} must hold {self.s} rows of {N} expressions")
        if len(self.g) != N or any(len(row) not in (N, N - a) for a, row in enumerate(self.g)):
            raise ValueError(f"g must be {N} full rows or the {N} rows of its upper triangle")
        return self

    def build(self):
        chart = self.chart.build()
        f = parse_rows(self.f, chart, self.params, 'f')
        xi = parse_rows(self.xi, chart, self.params, 'xi')
        eta = parse_rows(self.eta, chart, self.params, 'eta')
        g = parse_rows(self.g, chart, self.params, 'g')
        return FStructure(
            self.n, self.s, chart,
            Tensor11.from_exprs(chart, f, label='f'),
            tuple(VectorField.from_exprs(chart, row, label=f"xi{i + 1}") for i, row in enumerate(xi)),
            tuple(OneForm.from_exprs(chart, row, label=f"eta{i + 1}") for i, row in enumerate(eta)),
            Metric.from_upper(chart, g, label='g'),
            label=self.label or 'structure')


class CatalogSource(_Model):
    catalog: str
    params: Dict[str, int] = Field(default_factory=dict)


class InlineSource(_Model):
    structure: StructureConfig


class MapConfig(_Model):
    map: List[Expression]
    inverse: Optional[List[Expression]] = None
    params: Dict[str, float] = Field(default_factory=dict)
    label: Optional[str] = None


class VerifyStep(_Model):
    op: Literal['verify']
    level: str = 'S'


class RotateStep(_Model):
    op: Literal['rotate', 'antirotate']
    A: List[List[float]]


class Type2Step(_Model):
    op: Literal['type2']
    theta: List[List[Expression]]
    params: Dict[str, float] = Field(default_factory=dict)


class LiftStep(_Model):
    op: Literal['lift', 'slice']


class CheckDeckStep(_Model):
    op: Literal['check-deck']
    phi: MapConfig
    t0: float
    tol: float = Field(1e-10, gt=0)


class CheckAutomorphismStep(_Model):
    op: Literal['check-automorphism']
    phi: MapConfig
    tol: float = Field(1e-10, gt=0)


class SearchRotationStep(_Model):
    op: Literal['search-rotation']
    target: List[float]


class CompareStep(_Model):
    op: Literal['compare']
    to: Union[Literal['input'], int] = 'input'
    tol: float = Field(1e-10, gt=0)


Step = Annotated[
    Union[VerifyStep, RotateStep, Type2Step, LiftStep, CheckDeckStep, CheckAutomorphismStep,
          SearchRotationStep, CompareStep],
    Field(discriminator='op')]


class SamplingConfig(_Model):
    count: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = None


class PipelineConfig(_Model):
    input: Union[CatalogSource, InlineSource]
    steps: List[Step] = Field(..., min_length=1)
    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    tolerance: Optional[float] = Field(None, gt=0)
    fd_check: bool = False


def load_json(path):
    try:
        with open(path, encoding='utf-8') as handle:
            return json.load(handle)
    except OSError as e:
        raise ConfigError(f"Cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e


def _validated(model, data, source):
    try:
        return model.model_validate(data)
    except ValidationError as e:
        _logger.error(f"Invalid {source}")
        raise ConfigError(f"Invalid {source}: {e}") from e


def structure_config(data):
    """A StructureConfig from a parsed JSON document or a path to one."""
    if isinstance(data, StructureConfig):
        return data
    if not isinstance(data, dict):
        data = load_json(data)
    return _validated(StructureConfig, data, 'structure config')


def load_structure(data):
    return structure_config(data).build()


def pipeline_config(data):
    if isinstance(data, PipelineConfig):
        return data
    if not isinstance(data, dict):
        data = load_json(data)
    return _validated(PipelineConfig, data, 'pipeline config')
