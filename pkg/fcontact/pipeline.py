"""
Sequential pipelines over one structure.

A pipeline is checked completely before its first step runs: charts are
traced through every lift and slice, so that one-forms and maps given for a
later step are parsed against the chart that step will see.
"""
import json
import logging
import math
from dataclasses import dataclass

from . import catalog
from .chart import sample_points
from .config import parse_rows, pipeline_config
from .helpers import get_sample_count, get_seed, get_tolerance
from .deformations import RotationMatrix, antirotate, rotate, type2
from .exceptions import ChartError, ConfigError, ConvergenceError, DimensionError, DomainError, \
    PreconditionError
from .fields import OneForm
from .mapping_torus import AutomorphismMap, check_automorphism, check_deck_invariance, lift, \
    lifted_chart, slice, sliced_chart
from .rotation_search import TargetVector, solve_rotation
from .structures import Level, compare_structures, verify

_logger = logging.getLogger(__name__)

_TRANSFORMS = ('rotate', 'antirotate', 'type2', 'lift', 'slice')


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


def to_json_line(record):
    """One report object as a line of JSON with sorted keys."""
    return json.dumps(_jsonable(record), sort_keys=True, allow_nan=False)


@dataclass(frozen=True)
class _Shape:
    chart: object
    n: int
    s: int


def _map(step_phi, chart, where):
    try:
        return AutomorphismMap.parse(chart, [_text(v) for v in step_phi.map],
                                     [_text(v) for v in step_phi.inverse] if step_phi.inverse is not None else None,
                                     params=step_phi.params, label=step_phi.label or where)
    except DimensionError as e:
        raise ConfigError(f"{where}: {e}") from e


def _text(value):
    return value if isinstance(value, str) else repr(float(value))


class Pipeline:
    def __init__(self, config, samples=None, seed=None, tol=None, fd_check=False):
        self.config = pipeline_config(config)
        self.samples = get_sample_count(samples if samples is not None else self.config.sampling.count)
        self.seed = get_seed(seed if seed is not None else self.config.sampling.seed)
        self.tol = get_tolerance(tol if tol is not None else self.config.tolerance)
        self.fd_check = bool(fd_check or self.config.fd_check)
        self.passed = True
        self._points = {}
        self.input = self._load_input()
        self._prepared = self._prepare()

    def _load_input(self):
        source = self.config.input
        if hasattr(source, 'catalog'):
            return catalog.get(source.catalog, source.params).structure
        return source.structure.build()

    def _prepare(self):
        shape = _Shape(self.input.chart, self.input.n, self.input.s)
        shapes = []
        prepared = []
        for index, step in enumerate(self.config.steps):
            where = f"step {index} ({step.op})"
            payload = None
            try:
                if step.op == 'verify':
                    payload = Level.parse(step.level)
                elif step.op in ('rotate', 'antirotate'):
                    payload = RotationMatrix(step.A)
                    if payload.s != shape.s:
                        raise ConfigError(f"{where}: A is {payload.s}x{payload.s} but s={shape.s}")
                elif step.op == 'type2':
                    if len(step.theta) != shape.s or any(len(row) != shape.chart.dim for row in step.theta):
                        raise ConfigError(f"{where}: theta must hold {shape.s} rows of {shape.chart.dim} "
                                          f"expressions")
                    rows = parse_rows(step.theta, shape.chart, step.params, 'theta')
                    payload = tuple(OneForm.from_exprs(shape.chart, row, label=f"theta{i + 1}")
                                    for i, row in enumerate(rows))
                elif step.op == 'lift':
                    shape = _Shape(lifted_chart(shape.chart), shape.n, shape.s + 1)
                elif step.op == 'slice':
                    if shape.s < 2:
                        raise ConfigError(f"{where}: slicing needs s >= 2, the structure has s={shape.s}")
                    shape = _Shape(sliced_chart(shape.chart), shape.n, shape.s - 1)
                elif step.op == 'check-deck':
                    if step.t0 == 0:
                        raise ConfigError(f"{where}: t0 must be nonzero")
                    payload = _map(step.phi, sliced_chart(shape.chart), where)
                elif step.op == 'check-automorphism':
                    payload = _map(step.phi, shape.chart, where)
                elif step.op == 'search-rotation':
                    payload = TargetVector(tuple(step.target))
                elif step.op == 'compare':
                    payload = self._compare_target(step.to, index, shapes, shape, where)
            except (ValueError, ChartError, DimensionError, PreconditionError) as e:
                raise ConfigError(f"{where}: {e}") from e
            shapes.append(shape)
            prepared.append((step, payload))
        _logger.info(f"Pipeline of {len(prepared)} steps validated")
        return prepared

    def _compare_target(self, to, index, shapes, shape, where):
        if to == 'input':
            other = _Shape(self.input.chart, self.input.n, self.input.s)
        else:
            if not 0 <= to < index:
                raise ConfigError(f"{where}: can only compare with an earlier step, got {to}")
            other = shapes[to]
        if other.chart.dim != shape.chart.dim or other.s != shape.s:
            raise ConfigError(f"{where}: structures of dimension {shape.chart.dim} (s={shape.s}) and "
                              f"{other.chart.dim} (s={other.s}) cannot be compared")
        return to

    def points(self, chart):
        if chart not in self._points:
            self._points[chart] = sample_points(chart, self.samples, self.seed)
        return self._points[chart]

    def run(self):
        """Execute the steps, yielding one report per step; stops at the first step that cannot run."""
        current = self.input
        history = []
        for index, (step, payload) in enumerate(self._prepared):
            record = {'step': index, 'op': step.op}
            try:
                current, result = self._execute(step, payload, current, history)
            except (PreconditionError, DomainError, DimensionError, ChartError) as e:
                _logger.error(f"Step {index} ({step.op}) failed: {e}")
                record.update({'error': str(e), 'passed': False})
                self.passed = False
                yield record
                return
            record.update(result)
            if not record.get('passed', True):
                self.passed = False
            history.append(current)
            yield record

    def _execute(self, step, payload, current, history):
        op = step.op
        if op in _TRANSFORMS:
            if op == 'rotate':
                current = rotate(current, payload)
            elif op == 'antirotate':
                current = antirotate(current, payload)
            elif op == 'type2':
                current = type2(current, payload, samples=self.points(current.chart), tol=self.tol)
            elif op == 'lift':
                current = lift(current)
            else:
                current = slice(current, samples=self.points(sliced_chart(current.chart)))
            return current, {'structure': current.label, 'dim': current.dim, 's': current.s,
                             'coords': list(current.chart.coord_names), 'passed': True}
        if op == 'verify':
            report = verify(current, payload, samples=self.points(current.chart), tol=self.tol,
                            fd_check=self.fd_check)
            return current, report.to_dict()
        if op == 'check-deck':
            report = check_deck_invariance(current, payload, step.t0, samples=self.points(current.chart),
                                           tol=step.tol)
            return current, report.to_dict()
        if op == 'check-automorphism':
            report = check_automorphism(current, payload, samples=self.points(current.chart), tol=step.tol)
            return current, report.to_dict()
        if op == 'search-rotation':
            try:
                solution = solve_rotation(payload, seed=self.seed)
            except ConvergenceError as e:
                return current, {'error': str(e), 'best_residual': e.best_residual, 'passed': False}
            return current, {**solution.to_dict(), 'target': list(payload.u), 'passed': True}
        other = self.input if payload == 'input' else history[payload]
        differences = compare_structures(current, other, self.points(current.chart))
        worst = max(differences.values())
        return current, {'to': payload, 'differences': differences, 'max_difference': worst,
                         'tolerance': step.tol, 'passed': worst <= step.tol}


def run_pipeline(config, samples=None, seed=None, tol=None, fd_check=False):
    """Validate and run a pipeline; returns (records, passed)."""
    pipeline = Pipeline(config, samples, seed, tol, fd_check)
    records = list(pipeline.run())
    return records, pipeline.passed

