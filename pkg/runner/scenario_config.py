# runner/scenario_config.py - Scenario file parsing, validation and sweep plans
"""
A scenario file is INI text with the sections

    [scenario]  kind, id
    [params]    parameters of the kind (see runner/scenario_params.py)
    [sweep]     optional: param plus either (start, stop, steps, spacing) or values
    [output]    optional: dir, prefix, plot, logy

Values may carry unit suffixes; unknown keys and sections are rejected with
the line they appear on.
"""
import os
import re
import logging
import configparser
from typing import Dict, List, Literal, Optional, Tuple, Type, get_args, get_origin, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from runner.scenario_params import PARAMS_BY_KIND, ParamsBlock, field_unit
from utils.errors import ConfigError, UnitError
from utils.units import parse_quantity

logger = logging.getLogger(__name__)

KINDS = tuple(PARAMS_BY_KIND)

_SECTIONS = ("scenario", "params", "sweep", "output")
_SECTION_KEYS = {
    "scenario": ("kind", "id"),
    "sweep": ("param", "start", "stop", "steps", "spacing", "values"),
    "output": ("dir", "prefix", "plot", "logy"),
}
_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:#;\s\[][^=:]*?)\s*[=:]")
_TRUE = {"1", "yes", "true", "on"}
_FALSE = {"0", "no", "false", "off"}


class SweepSpec(BaseModel):
    """One swept parameter; values in the parameter's internal unit"""
    model_config = ConfigDict(frozen=True)

    param: str
    start: Optional[float] = None
    stop: Optional[float] = None
    steps: Optional[int] = Field(None, ge=1)
    spacing: Literal["linear", "log"] = "linear"
    values: Optional[Tuple[float, ...]] = None

    @model_validator(mode="after")
    def _complete(self):
        ranged = (self.start, self.stop, self.steps)
        if self.values is not None:
            if any(v is not None for v in ranged):
                raise ValueError("give either values or start/stop/steps")
            if not self.values:
                raise ValueError("values must not be empty")
            return self
        if any(v is None for v in ranged):
            raise ValueError("sweep needs start, stop and steps (or values)")
        if self.spacing == "log" and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log sweep needs positive start and stop")
        return self

    def points(self) -> np.ndarray:
        if self.values is not None:
            return np.array(self.values, dtype=float)
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)


class OutputSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    dir: Optional[str] = None
    prefix: Optional[str] = None
    plot: bool = False
    logy: bool = False


class ScenarioConfig(BaseModel):
    """Validated scenario: kind, typed parameters, optional sweep and output options"""
    model_config = ConfigDict(frozen=True)

    kind: str
    id: str
    params: ParamsBlock
    sweep: Optional[SweepSpec] = None
    output: OutputSpec = OutputSpec()

    @property
    def prefix(self) -> str:
        return self.output.prefix or self.id

    def plan(self) -> List[Tuple[int, Optional[float], ParamsBlock]]:
        """
        Expand the sweep into independent points

        Returns:
            List of (index, swept value or None, parameter block)
        """
        if self.sweep is None:
            return [(0, None, self.params)]
        model = type(self.params)
        base = self.params.model_dump()
        points = []
        for index, value in enumerate(self.sweep.points()):
            value = float(value)
            if model.model_fields[self.sweep.param].annotation is int:
                value = int(round(value))
            try:
                points.append((index, value, model.model_validate({**base, self.sweep.param: value})))
            except ValidationError as e:
                raise ConfigError(f"sweep point {index} ({self.sweep.param}={value:g}) is invalid: "
                                  f"{_first_message(e)}") from e
        return points

    def to_ini(self) -> str:
        """Serialize back to scenario text in internal units"""
        lines = ["[scenario]", f"kind = {self.kind}", f"id = {self.id}", "", "[params]"]
        model = type(self.params)
        for name in model.model_fields:
            if name not in self.params.model_fields_set:
                continue
            lines.append(f"{name} = {_format_value(getattr(self.params, name), field_unit(model, name))}")
        if self.sweep is not None:
            unit = field_unit(model, self.sweep.param)
            lines += ["", "[sweep]", f"param = {self.sweep.param}"]
            if self.sweep.values is not None:
                lines.append(f"values = {_format_value(self.sweep.values, unit)}")
            else:
                lines += [f"start = {_format_value(self.sweep.start, unit)}",
                          f"stop = {_format_value(self.sweep.stop, unit)}",
                          f"steps = {self.sweep.steps}", f"spacing = {self.sweep.spacing}"]
        output = self.output.model_dump(exclude_defaults=True)
        if output:
            lines += ["", "[output]"] + [f"{k} = {_format_value(v, None)}" for k, v in output.items()]
        return "\n".join(lines) + "\n"


def _format_value(value, unit: Optional[str]) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return ", ".join(_format_value(v, unit) for v in value)
    if isinstance(value, float):
        text = repr(value)
        return f"{text} {unit}" if unit else text
    return str(value)


def _first_message(e: ValidationError) -> str:
    err = e.errors()[0]
    loc = ".".join(str(part) for part in err.get("loc", ()))
    return f"{loc}: {err['msg']}" if loc else err["msg"]


def _line_index(text: str) -> Dict[Tuple[str, Optional[str]], int]:
    """(section, key) -> 1-based line; (section, None) for headers"""
    index: Dict[Tuple[str, Optional[str]], int] = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        header = _SECTION_RE.match(line)
        if header:
            section = header.group(1).strip().lower()
            index.setdefault((section, None), lineno)
            continue
        key = _KEY_RE.match(line)
        if key and section is not None:
            index.setdefault((section, key.group(1).strip().lower()), lineno)
    return index


def _annotation_base(annotation):
    """Strip Optional[...] from a field annotation"""
    if get_origin(annotation) is Union:
        args = [a for a in get_args(annotation) if a is not type(None)]
        if len(args) == 1:
            return args[0]
    return annotation


def _convert_value(raw: str, annotation, unit: Optional[str]):
    base = _annotation_base(annotation)
    text = raw.strip()
    if base is bool:
        lowered = text.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ValueError(f"expected a boolean, got '{raw}'")
    if base is int:
        value = parse_quantity(text, None)
        if value != int(value):
            raise ValueError(f"expected an integer, got '{raw}'")
        return int(value)
    if base is float:
        return parse_quantity(text, unit)
    if get_origin(base) is tuple:
        return tuple(parse_quantity(part, unit) for part in text.split(",") if part.strip())
    return text


def _read_params(model: Type[ParamsBlock], raw: Dict[str, str], lines) -> ParamsBlock:
    values = {}
    for key, text in raw.items():
        lineno = lines.get(("params", key))
        if key not in model.model_fields:
            raise ConfigError(f"unknown parameter '{key}'", lineno)
        try:
            values[key] = _convert_value(text, model.model_fields[key].annotation, field_unit(model, key))
        except (UnitError, ValueError) as e:
            raise ConfigError(f"parameter '{key}': {e}", lineno) from e
    try:
        return model.model_validate(values)
    except ValidationError as e:
        loc = e.errors()[0].get("loc", ())
        key = str(loc[0]) if loc else None
        lineno = lines.get(("params", key), lines.get(("params", None)))
        raise ConfigError(f"invalid parameters: {_first_message(e)}", lineno) from e


def _read_sweep(model: Type[ParamsBlock], raw: Dict[str, str], lines) -> SweepSpec:
    param = raw.get("param", "").strip()
    if not param:
        raise ConfigError("sweep needs 'param'", lines.get(("sweep", None)))
    if param not in model.model_fields:
        raise ConfigError(f"sweep parameter '{param}' is not a parameter of this kind", lines.get(("sweep", "param")))
    if _annotation_base(model.model_fields[param].annotation) not in (float, int):
        raise ConfigError(f"sweep parameter '{param}' is not numeric", lines.get(("sweep", "param")))
    unit = field_unit(model, param)
    values = {"param": param}
    try:
        for key in ("start", "stop"):
            if key in raw:
                values[key] = parse_quantity(raw[key], unit)
        if "steps" in raw:
            values["steps"] = _convert_value(raw["steps"], int, None)
        if "spacing" in raw:
            values["spacing"] = raw["spacing"].strip().lower()
        if "values" in raw:
            values["values"] = _convert_value(raw["values"], Tuple[float, ...], unit)
    except (UnitError, ValueError) as e:
        raise ConfigError(f"sweep: {e}", lines.get(("sweep", None))) from e
    try:
        return SweepSpec.model_validate(values)
    except ValidationError as e:
        loc = e.errors()[0].get("loc", ())
        lineno = lines.get(("sweep", str(loc[0]) if loc else None), lines.get(("sweep", None)))
        raise ConfigError(f"invalid sweep: {_first_message(e)}", lineno) from e


def parse_config(text: str) -> ScenarioConfig:
    """
    Parse and validate scenario text

    Args:
        text: INI-style scenario

    Returns:
        ScenarioConfig
    """
    lines = _line_index(text)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"malformed scenario file: {e.message}", getattr(e, "lineno", None)) from e

    for section in parser.sections():
        if section.lower() not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]", lines.get((section.lower(), None)))
        for key in parser[section]:
            allowed = _SECTION_KEYS.get(section.lower())
            if allowed is not None and key not in allowed:
                raise ConfigError(f"unknown key '{key}' in [{section}]", lines.get((section.lower(), key)))
    sections = {s.lower(): dict(parser[s]) for s in parser.sections()}

    scenario = sections.get("scenario")
    if scenario is None or "kind" not in scenario:
        raise ConfigError("missing [scenario] kind", lines.get(("scenario", None)))
    kind = scenario["kind"].strip().lower()
    if kind not in PARAMS_BY_KIND:
        raise ConfigError(f"unknown scenario kind '{kind}'; choose from {', '.join(KINDS)}",
                          lines.get(("scenario", "kind")))
    scenario_id = scenario.get("id", kind).strip() or kind
    if not re.fullmatch(r"[A-Za-z0-9_.-]+", scenario_id):
        raise ConfigError(f"scenario id '{scenario_id}' may only use letters, digits, '_', '-' and '.'",
                          lines.get(("scenario", "id")))

    model = PARAMS_BY_KIND[kind]
    params = _read_params(model, sections.get("params", {}), lines)
    sweep = _read_sweep(model, sections["sweep"], lines) if "sweep" in sections else None

    raw_output = sections.get("output", {})
    try:
        output = OutputSpec(**{k: _convert_value(v, OutputSpec.model_fields[k].annotation, None)
                               for k, v in raw_output.items()})
    except (ValueError, ValidationError) as e:
        raise ConfigError(f"invalid output options: {e}", lines.get(("output", None))) from e

    cfg = ScenarioConfig(kind=kind, id=scenario_id, params=params, sweep=sweep, output=output)
    # surface invalid sweep points before anything runs
    points = cfg.plan()
    logger.debug(f"Parsed scenario '{scenario_id}' ({kind}), {len(points)} point(s)")
    return cfg


def load_config(path: str) -> ScenarioConfig:
    """Read and parse a scenario file"""
    if not os.path.exists(path):
        raise ConfigError(f"scenario file not found: {path}")
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read())
