"""
Scenario Files
INI scenario parsing, validation and the spatial/temporal presets
"""
import configparser
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from adjoint_control import METHODS, ControlProblem
from forward_solver import Field
from frac_ops import AlphaContext, TimeGrid, TimeSeries
from spectral import ModalCoefficients, SpectralBasis, project

from .errors import ScenarioError

logger = logging.getLogger(__name__)

_KEY_LINE = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")
_SECTION_LINE = re.compile(r"^\s*\[([^\]]+)\]")

_KNOWN_KEYS = {
    "scenario": {"alpha", "t_final", "length_l", "n_modes", "n_time", "y0"},
    "forcing": {"time", "space"},
    "control": {"n_reg", "z_d_time", "z_d_space", "cg_tol", "max_iter", "method"},
    "output": {"dir"},
}


def _index_lines(text: str) -> Dict[Tuple[str, str], int]:
    """(section, key) -> 1-based line number"""
    index = {}
    section = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        header = _SECTION_LINE.match(line)
        if header:
            section = header.group(1).strip()
            index[(section, "")] = lineno
            continue
        key = _KEY_LINE.match(line)
        if key and section:
            index[(section, key.group(1).strip().lower())] = lineno
    return index


@dataclass(frozen=True)
class ControlSettings:
    n_reg: float
    z_d_time: str = "constant:1"
    z_d_space: str = "zero"
    cg_tol: float = 1e-8
    max_iter: int = 200
    method: str = "cr"


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated contents of one scenario file"""

    alpha: float
    t_final: float = 1.0
    length_l: float = 1.0
    n_modes: int = 16
    n_time: int = 256
    y0_spec: str = "zero"
    forcing_time: str = "zero"
    forcing_space: str = "zero"
    control: Optional[ControlSettings] = None
    output_dir: str = "output"
    path: Optional[str] = None

    def basis(self) -> SpectralBasis:
        return SpectralBasis(length_l=self.length_l, n_modes=self.n_modes)

    def grid(self, n_time: Optional[int] = None) -> TimeGrid:
        return TimeGrid(self.t_final, n_time or self.n_time)

    def ctx(self) -> AlphaContext:
        return AlphaContext(self.alpha)

    def y0(self) -> ModalCoefficients:
        return parse_spatial(self.y0_spec, self.basis(), key="y0", path=self.path)

    def forcing(self, grid: Optional[TimeGrid] = None) -> Optional[Field]:
        """Separable forcing g(t) * profile(x); None when either factor is zero"""
        if self.forcing_time == "zero" or self.forcing_space == "zero":
            return None
        return _separable(self.forcing_time, self.forcing_space, self.basis(), grid or self.grid(),
                          keys=("time", "space"), path=self.path)

    def control_problem(self) -> ControlProblem:
        if self.control is None:
            raise ScenarioError("missing [control] section", key="control", path=self.path)
        basis, grid = self.basis(), self.grid()
        z_d = _separable(self.control.z_d_time, self.control.z_d_space, basis, grid,
                         keys=("z_d_time", "z_d_space"), path=self.path)
        return ControlProblem(
            basis=basis,
            grid=grid,
            ctx=self.ctx(),
            y0=self.y0(),
            z_d=z_d,
            n_reg=self.control.n_reg,
            background_f=self.forcing(grid),
        )


def parse_spatial(spec: str, basis: SpectralBasis, key: str = "space", path: Optional[str] = None) -> ModalCoefficients:
    """
    Spatial grammar: zero | parabola | mode:k | comma-separated modal coefficients.

    A coefficient list shorter than n_modes is padded with zeros.
    """
    text = spec.strip().lower()
    if text == "zero":
        return basis.zeros()
    if text == "parabola":
        length = basis.length_l
        return project(lambda x: x * (length - x), basis)
    if text.startswith("mode:"):
        try:
            k = int(text.split(":", 1)[1])
        except ValueError:
            raise ScenarioError(f"bad mode index in {spec!r}", key=key, path=path)
        if not 1 <= k <= basis.n_modes:
            raise ScenarioError(f"mode index {k} outside 1..{basis.n_modes}", key=key, path=path)
        return basis.unit(k)
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise ScenarioError(f"unrecognised spatial profile {spec!r}", key=key, path=path)
    if not values or len(values) > basis.n_modes or not all(math.isfinite(v) for v in values):
        raise ScenarioError(f"expected 1..{basis.n_modes} finite coefficients, got {spec!r}", key=key, path=path)
    coeffs = np.zeros(basis.n_modes)
    coeffs[:len(values)] = values
    return ModalCoefficients(basis, coeffs)


def parse_time(spec: str, grid: TimeGrid, key: str = "time", path: Optional[str] = None) -> TimeSeries:
    """Time grammar: zero | constant:c | sin:w (meaning sin(w t))"""
    text = spec.strip().lower()
    if text == "zero":
        return TimeSeries.zeros(grid)
    name, _, argument = text.partition(":")
    try:
        value = float(argument)
    except ValueError:
        raise ScenarioError(f"unrecognised time profile {spec!r}", key=key, path=path)
    if not math.isfinite(value):
        raise ScenarioError(f"non-finite parameter in {spec!r}", key=key, path=path)
    if name == "constant":
        return TimeSeries(grid, np.full(grid.n_steps + 1, value))
    if name == "sin":
        return TimeSeries.from_function(grid, lambda t: np.sin(value * t))
    raise ScenarioError(f"unrecognised time profile {spec!r}", key=key, path=path)


def _separable(time_spec: str, space_spec: str, basis: SpectralBasis, grid: TimeGrid,
               keys: Tuple[str, str], path: Optional[str]) -> Field:
    profile = parse_spatial(space_spec, basis, key=keys[1], path=path)
    return Field.separable(profile, parse_time(time_spec, grid, key=keys[0], path=path))


class _Reader:
    """Typed access to a parsed INI file with line-numbered errors"""

    def __init__(self, parser: configparser.ConfigParser, lines: Dict[Tuple[str, str], int], path: str):
        self.parser = parser
        self.lines = lines
        self.path = path

    def error(self, section: str, key: str, message: str) -> ScenarioError:
        lineno = self.lines.get((section, key), self.lines.get((section, "")))
        return ScenarioError(message, key=key, lineno=lineno, path=self.path)

    def has(self, section: str, key: str) -> bool:
        return self.parser.has_option(section, key)

    def get(self, section: str, key: str, default: Optional[str] = None) -> str:
        if not self.has(section, key):
            if default is None:
                raise self.error(section, key, f"missing required key in [{section}]")
            return default
        return self.parser.get(section, key).strip()

    def get_float(self, section: str, key: str, default: Optional[float] = None) -> float:
        raw = self.get(section, key, None if default is None else repr(default))
        try:
            value = float(raw)
        except ValueError:
            raise self.error(section, key, f"expected a number, got {raw!r}")
        if not math.isfinite(value):
            raise self.error(section, key, f"expected a finite number, got {raw!r}")
        return value

    def get_int(self, section: str, key: str, default: Optional[int] = None) -> int:
        raw = self.get(section, key, None if default is None else str(default))
        try:
            return int(raw)
        except ValueError:
            raise self.error(section, key, f"expected an integer, got {raw!r}")


def load_scenario(path) -> ScenarioConfig:
    """
    Read and validate a scenario file.

    Args:
        path: INI file with [scenario], optional [forcing], [control] and [output]

    Returns:
        ScenarioConfig

    Raises:
        ScenarioError: on unreadable files, unknown keys or invalid values
    """
    path = str(path)
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file: {e}", path=path)

    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=path)
    except configparser.Error as e:
        raise ScenarioError(f"malformed scenario file: {e}", lineno=getattr(e, "lineno", None), path=path)

    reader = _Reader(parser, _index_lines(text), path)
    if not parser.has_section("scenario"):
        raise ScenarioError("missing [scenario] section", key="scenario", path=path)
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise reader.error(section, "", f"unknown section [{section}]")
        for key in parser.options(section):
            if key not in _KNOWN_KEYS[section]:
                raise reader.error(section, key, f"unknown key in [{section}]")

    alpha = reader.get_float("scenario", "alpha")
    if not 0.0 < alpha < 1.0:
        raise reader.error("scenario", "alpha", f"alpha must lie in (0, 1), got {alpha}")
    t_final = reader.get_float("scenario", "t_final", 1.0)
    if not t_final > 0:
        raise reader.error("scenario", "t_final", f"t_final must be positive, got {t_final}")
    length_l = reader.get_float("scenario", "length_l", 1.0)
    if not length_l > 0:
        raise reader.error("scenario", "length_l", f"length_l must be positive, got {length_l}")
    n_modes = reader.get_int("scenario", "n_modes", 16)
    if n_modes < 1:
        raise reader.error("scenario", "n_modes", f"n_modes must be >= 1, got {n_modes}")
    n_time = reader.get_int("scenario", "n_time", 256)
    if n_time < 2:
        raise reader.error("scenario", "n_time", f"n_time must be >= 2, got {n_time}")

    control = None
    if parser.has_section("control"):
        n_reg = reader.get_float("control", "n_reg")
        if not n_reg > 0:
            raise reader.error("control", "n_reg", f"n_reg must be positive, got {n_reg}")
        cg_tol = reader.get_float("control", "cg_tol", 1e-8)
        if not cg_tol > 0:
            raise reader.error("control", "cg_tol", f"cg_tol must be positive, got {cg_tol}")
        max_iter = reader.get_int("control", "max_iter", 200)
        if max_iter < 1:
            raise reader.error("control", "max_iter", f"max_iter must be >= 1, got {max_iter}")
        method = reader.get("control", "method", "cr").lower()
        if method not in METHODS:
            raise reader.error("control", "method", f"method must be one of {METHODS}, got {method!r}")
        control = ControlSettings(
            n_reg=n_reg,
            z_d_time=reader.get("control", "z_d_time", "constant:1"),
            z_d_space=reader.get("control", "z_d_space", "zero"),
            cg_tol=cg_tol,
            max_iter=max_iter,
            method=method,
        )

    config = ScenarioConfig(
        alpha=alpha,
        t_final=t_final,
        length_l=length_l,
        n_modes=n_modes,
        n_time=n_time,
        y0_spec=reader.get("scenario", "y0", "zero"),
        forcing_time=reader.get("forcing", "time", "zero") if parser.has_section("forcing") else "zero",
        forcing_space=reader.get("forcing", "space", "zero") if parser.has_section("forcing") else "zero",
        control=control,
        output_dir=reader.get("output", "dir", "output") if parser.has_section("output") else "output",
        path=path,
    )

    # surface grammar errors now, with the line of the offending key
    basis, grid = config.basis(), config.grid()
    for section, key, check in (
        ("scenario", "y0", lambda v: parse_spatial(v, basis)),
        ("forcing", "time", lambda v: parse_time(v, grid)),
        ("forcing", "space", lambda v: parse_spatial(v, basis)),
        ("control", "z_d_time", lambda v: parse_time(v, grid)),
        ("control", "z_d_space", lambda v: parse_spatial(v, basis)),
    ):
        if reader.has(section, key):
            try:
                check(reader.get(section, key))
            except ScenarioError as e:
                raise reader.error(section, key, e.reason)

    logger.info(f"loaded scenario {path}: alpha={alpha}, T={t_final}, modes={n_modes}, steps={n_time}")
    return config
