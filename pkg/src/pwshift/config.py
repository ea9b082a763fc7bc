"""Run configuration: ``key = value`` lines under ``[scenario]``, ``[run]`` and
``[outputs]``, with ``#`` comments.

Physical inputs are in MeV and fm.  The radius is given either directly as
``R`` or as ``r0`` and ``A`` with ``R = r0 * A**(1/3)``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Tuple

from .errors import ConfigError
from .potential import ScatteringScenario
from .pvquad import QuadratureSpec

SECTIONS = ("scenario", "run", "outputs")
KNOWN_FORMATS = ("csv", "png")


@dataclass(frozen=True)
class ScenarioConfig:
    p: float
    V0: float
    R: Optional[float] = None
    r0: Optional[float] = None
    A: Optional[float] = None
    Z_t: int = 0
    Z_p: int = 0
    m_target: Optional[float] = None
    m_projectile: Optional[float] = None
    reduced_mass: Optional[float] = None

    @property
    def radius_fm(self):
        if self.R is not None:
            return self.R
        return self.r0 * self.A ** (1.0 / 3.0)


@dataclass(frozen=True)
class RunSettings:
    l_max: Optional[int] = None  # None: automatic
    epsilon: float = 0.001
    theta_points: int = 600
    rel_tol: float = 1e-8


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "pwshift_out"
    formats: Tuple[str, ...] = ("csv", "png")


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioConfig
    run: RunSettings = field(default_factory=RunSettings)
    outputs: OutputSettings = field(default_factory=OutputSettings)

    def to_scenario(self) -> ScatteringScenario:
        s = self.scenario
        return ScatteringScenario(
            p=s.p,
            V0=s.V0,
            R=s.radius_fm,
            Z_t=s.Z_t,
            Z_p=s.Z_p,
            m_target=s.m_target,
            m_projectile=s.m_projectile,
            reduced_mass=s.reduced_mass,
        )

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(rel_tol=self.run.rel_tol)

    def to_text(self) -> str:
        """Config echo; :func:`parse_config` of the result gives back ``self``."""
        lines = ["[scenario]"]
        for f in fields(ScenarioConfig):
            v = getattr(self.scenario, f.name)
            if v is not None:
                lines.append(f"{f.name} = {v!r}")
        lines += ["", "[run]"]
        lines.append(f"l_max = {'auto' if self.run.l_max is None else self.run.l_max}")
        lines.append(f"epsilon = {self.run.epsilon!r}")
        lines.append(f"theta_points = {self.run.theta_points}")
        lines.append(f"rel_tol = {self.run.rel_tol!r}")
        lines += ["", "[outputs]"]
        lines.append(f"directory = {self.outputs.directory}")
        lines.append(f"formats = {', '.join(self.outputs.formats)}")
        return "\n".join(lines) + "\n"


def _number(section, key, raw, kind=float):
    try:
        val = kind(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected {kind.__name__}, got {raw!r}") from None
    if kind is float and not math.isfinite(val):
        raise ConfigError(f"[{section}] {key}: must be finite")
    return val


def _positive(section, key, val):
    if not val > 0:
        raise ConfigError(f"[{section}] {key}: must be positive, got {val!r}")
    return val


def _take(sec, name, key, kind=float, default=None):
    # case-insensitive lookup, keys are stored lower-cased
    raw = sec.pop(key.lower(), None)
    if raw is None:
        return default
    return _number(name, key, raw, kind)


def _integer(section, key, raw):
    val = _number(section, key, raw, float)
    if val != int(val):
        raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}")
    return int(val)


def parse_config(text: str) -> RunConfig:
    """Parse configuration text, raising :class:`ConfigError` with the field name."""
    cp = configparser.ConfigParser(
        inline_comment_prefixes=("#",), comment_prefixes=("#",), interpolation=None
    )
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    unknown = [s for s in cp.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    if "scenario" not in cp:
        raise ConfigError("missing [scenario] section")

    sc = {k: v.strip() for k, v in cp["scenario"].items()}
    for req in ("p", "v0"):
        if req not in sc:
            raise ConfigError(f"[scenario] {'V0' if req == 'v0' else req}: required")
    p = _positive("scenario", "p", _take(sc, "scenario", "p"))
    V0 = _take(sc, "scenario", "V0")
    R = _take(sc, "scenario", "R")
    r0 = _take(sc, "scenario", "r0")
    A = _take(sc, "scenario", "A")
    if R is not None:
        if r0 is not None or A is not None:
            raise ConfigError("[scenario] give either R or (r0, A), not both")
        _positive("scenario", "R", R)
    else:
        if r0 is None or A is None:
            raise ConfigError("[scenario] R: required (or both r0 and A)")
        _positive("scenario", "r0", r0)
        _positive("scenario", "A", A)
    zt = sc.pop("z_t", "0")
    zp = sc.pop("z_p", "0")
    Z_t = _integer("scenario", "Z_t", zt)
    Z_p = _integer("scenario", "Z_p", zp)
    if Z_t < 0 or Z_p < 0:
        raise ConfigError("[scenario] Z_t, Z_p: charges must be nonnegative")
    mt = _take(sc, "scenario", "m_target")
    mp = _take(sc, "scenario", "m_projectile")
    mu = _take(sc, "scenario", "reduced_mass")
    pair = mt is not None and mp is not None
    if (mt is None) != (mp is None):
        raise ConfigError("[scenario] m_target, m_projectile: give both or neither")
    if pair == (mu is not None):
        raise ConfigError("[scenario] give exactly one of (m_target & m_projectile) or reduced_mass")
    for key, val in (("m_target", mt), ("m_projectile", mp), ("reduced_mass", mu)):
        if val is not None:
            _positive("scenario", key, val)
    if sc:
        raise ConfigError(f"[scenario] unknown key(s): {', '.join(sorted(sc))}")
    scenario = ScenarioConfig(p, V0, R, r0, A, Z_t, Z_p, mt, mp, mu)

    run = RunSettings()
    if "run" in cp:
        rs = {k: v.strip() for k, v in cp["run"].items()}
        l_raw = rs.pop("l_max", "auto")
        if l_raw.lower() == "auto":
            l_max = None
        else:
            l_max = _integer("run", "l_max", l_raw)
            if l_max < 0:
                raise ConfigError("[run] l_max: must be nonnegative or 'auto'")
        eps = _positive("run", "epsilon", _take(rs, "run", "epsilon", default=run.epsilon))
        if eps >= 0.5:
            raise ConfigError("[run] epsilon: must be well below 1")
        npts = rs.pop("theta_points", None)
        npts = run.theta_points if npts is None else _integer("run", "theta_points", npts)
        if npts < 2:
            raise ConfigError("[run] theta_points: need at least 2")
        tol = _positive("run", "rel_tol", _take(rs, "run", "rel_tol", default=run.rel_tol))
        if rs:
            raise ConfigError(f"[run] unknown key(s): {', '.join(sorted(rs))}")
        run = RunSettings(l_max, eps, npts, tol)

    outputs = OutputSettings()
    if "outputs" in cp:
        os_ = {k: v.strip() for k, v in cp["outputs"].items()}
        directory = os_.pop("directory", outputs.directory)
        if not directory:
            raise ConfigError("[outputs] directory: must not be empty")
        fmt_raw = os_.pop("formats", None)
        formats = outputs.formats
        if fmt_raw is not None:
            formats = tuple(f.strip().lower() for f in fmt_raw.split(",") if f.strip())
            bad = [f for f in formats if f not in KNOWN_FORMATS]
            if bad or "csv" not in formats:
                raise ConfigError(
                    f"[outputs] formats: must include csv and only {', '.join(KNOWN_FORMATS)}"
                )
        if os_:
            raise ConfigError(f"[outputs] unknown key(s): {', '.join(sorted(os_))}")
        outputs = OutputSettings(directory, formats)

    return RunConfig(scenario, run, outputs)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    return parse_config(text)


def bundled_config_path(name="proton_he4.cfg") -> Path:
    from importlib.resources import files

    return Path(str(files("pwshift") / "data" / name))
