"""World description for the cell-free downlink: APs, area, radio and link settings.

Scenario files are YAML documents with top-level keys ``aps``, ``area``,
``radio``, ``link`` and ``energy``. Powers are in dBm, distances in meters,
frequencies in Hz. See ``data/default_scenario.yaml`` for the bundled default.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import yaml

__all__ = [
    "PAClass", "APConfig", "Area", "PathLossParams", "Scenario",
    "UELocationPattern", "ScenarioError", "dbm_to_watts", "watts_to_dbm",
    "load_scenario", "load_scenario_file", "default_scenario", "bundled_scenario",
    "generate_pattern", "load_pattern_file",
]

DEFAULT_IBO_DB = 6.0


class ScenarioError(ValueError):
    """Invalid scenario document; the message starts with the field path."""


class PAClass(enum.Enum):
    CLASS_A = "ClassA"
    CLASS_B = "ClassB"
    PERFECT = "Perfect"

    @classmethod
    def parse(cls, name: "str | PAClass") -> "PAClass":
        if isinstance(name, PAClass):
            return name
        key = str(name).strip().lower().replace("_", "").replace("-", "")
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown PA class {name!r} (expected ClassA, ClassB or Perfect)")


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    return 10.0 * math.log10(p_w) + 30.0


@dataclass(frozen=True)
class APConfig:
    id: int
    position: tuple[float, float, float]
    num_antennas: int
    p_max_dbm: float
    pa_class: PAClass = PAClass.CLASS_A
    ibo_db: float = DEFAULT_IBO_DB

    def __post_init__(self):
        if self.id < 0:
            raise ScenarioError(f"aps[id={self.id}].id: must be >= 0")
        if self.num_antennas < 1:
            raise ScenarioError(f"aps[id={self.id}].num_antennas: must be >= 1")
        if not math.isfinite(self.p_max_dbm):
            raise ScenarioError(f"aps[id={self.id}].p_max_dbm: must be finite")
        if not (self.ibo_db >= 0 and math.isfinite(self.ibo_db)):
            raise ScenarioError(f"aps[id={self.id}].ibo_db: must be >= 0")

    @property
    def p_max_w(self) -> float:
        """Aggregate saturation power over all antennas, in watts."""
        return dbm_to_watts(self.p_max_dbm)

    @property
    def p_sat_per_antenna_w(self) -> float:
        return self.p_max_w / self.num_antennas


@dataclass(frozen=True)
class Area:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ScenarioError("area: degenerate rectangle")

    @property
    def centroid(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def contains(self, xy) -> np.ndarray:
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        return ((xy[:, 0] >= self.x_min) & (xy[:, 0] <= self.x_max)
                & (xy[:, 1] >= self.y_min) & (xy[:, 1] <= self.y_max))


@dataclass(frozen=True)
class PathLossParams:
    intercept_db: float = 30.5
    slope_db: float = 36.7
    shadowing_db: float = 7.0


@dataclass(frozen=True)
class Scenario:
    aps: tuple[APConfig, ...]
    area: Area = Area(0.0, 500.0, 0.0, 500.0)
    carrier_hz: float = 3.5e9
    bandwidth_hz: float = 20e6
    noise_figure_db: float = 7.0
    ue_height_m: float = 1.5
    pathloss: PathLossParams = PathLossParams()
    se_max: float = 7.8
    impl_loss: float = 0.75
    slot_duration_s: float = 1e-3
    k_max: int = 16
    circuit_power_w: float = 1.0
    eta_class_a: float = 0.5
    eta_class_b_max: float = math.pi / 4
    idle_pa_draw: bool = False

    def __post_init__(self):
        object.__setattr__(self, "aps", tuple(self.aps))
        if not self.aps:
            raise ScenarioError("aps: at least one AP required")
        ids = [ap.id for ap in self.aps]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise ScenarioError(f"aps: duplicate AP id {dup[0]}")
        if not self.bandwidth_hz > 0:
            raise ScenarioError("radio.bandwidth_hz: must be > 0")
        if not 0 < self.impl_loss <= 1:
            raise ScenarioError("link.impl_loss: must be in (0, 1]")
        if not self.se_max > 0:
            raise ScenarioError("link.se_max: must be > 0")
        if not self.slot_duration_s > 0:
            raise ScenarioError("link.slot_duration_s: must be > 0")
        if self.k_max < 1:
            raise ScenarioError("link.k_max: must be >= 1")
        if self.circuit_power_w < 0:
            raise ScenarioError("energy.circuit_power_w: must be >= 0")
        if not (0 < self.eta_class_a <= 1 and 0 < self.eta_class_b_max <= 1):
            raise ScenarioError("energy: PA efficiencies must be in (0, 1]")

    @property
    def n_ap(self) -> int:
        return len(self.aps)

    @property
    def noise_w(self) -> float:
        """Thermal noise (-174 dBm/Hz) plus noise figure over the bandwidth."""
        return dbm_to_watts(-174.0 + 10.0 * math.log10(self.bandwidth_hz) + self.noise_figure_db)

    def ap_index(self, ap_id: int) -> int:
        for i, ap in enumerate(self.aps):
            if ap.id == ap_id:
                return i
        raise KeyError(ap_id)


@dataclass(frozen=True, eq=False)
class UELocationPattern:
    """Ordered (x, y) positions of the UEs, shape (n_ue, 2)."""

    positions: np.ndarray = field()

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float).reshape(-1, 2)
        if len(pos) == 0:
            raise ValueError("UE location pattern must contain at least one UE")
        if not np.all(np.isfinite(pos)):
            raise ValueError("UE positions must be finite")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    def __len__(self):
        return len(self.positions)

    def __eq__(self, other):
        if not isinstance(other, UELocationPattern):
            return NotImplemented
        return np.array_equal(self.positions, other.positions)

    def check_inside(self, area: Area) -> None:
        inside = area.contains(self.positions)
        if not inside.all():
            k = int(np.flatnonzero(~inside)[0])
            raise ValueError(f"UE {k} at {tuple(self.positions[k])} lies outside the scenario area")


def generate_pattern(seed: int, n_ue: int, area: Area) -> UELocationPattern:
    """Draw ``n_ue`` positions i.i.d. uniform over ``area``."""
    if n_ue < 1:
        raise ValueError("n_ue must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.uniform(area.x_min, area.x_max, n_ue)
    y = rng.uniform(area.y_min, area.y_max, n_ue)
    return UELocationPattern(np.column_stack([x, y]))


def load_pattern_file(path) -> UELocationPattern:
    """Read a pattern from a CSV of ``x,y`` rows (a header line and ``#`` comments allowed)."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except (ValueError, IndexError):
            if lineno == 1 or not rows:
                continue  # header
            raise ValueError(f"{path}:{lineno}: expected 'x,y', got {line!r}") from None
    return UELocationPattern(np.asarray(rows))


# --- document parsing -------------------------------------------------------

def _get(doc: dict, key: str, path: str, default=None, required=False, kind=float):
    if key not in doc or doc[key] is None:
        if required:
            raise ScenarioError(f"{path}.{key}: required field missing")
        return default
    if kind is bool and not isinstance(doc[key], bool):
        raise ScenarioError(f"{path}.{key}: expected true or false, got {doc[key]!r}")
    try:
        return kind(doc[key])
    except (TypeError, ValueError):
        raise ScenarioError(f"{path}.{key}: cannot interpret {doc[key]!r} as {kind.__name__}") from None


def _section(doc: dict, key: str) -> dict:
    sec = doc.get(key) or {}
    if not isinstance(sec, dict):
        raise ScenarioError(f"{key}: expected a mapping")
    return sec


def _parse_ap(item: Any, i: int) -> APConfig:
    path = f"aps[{i}]"
    if not isinstance(item, dict):
        raise ScenarioError(f"{path}: expected a mapping")
    pos = item.get("position")
    if not isinstance(pos, (list, tuple)) or len(pos) not in (2, 3):
        raise ScenarioError(f"{path}.position: expected [x, y] or [x, y, z]")
    try:
        pos = tuple(float(v) for v in pos)
    except (TypeError, ValueError):
        raise ScenarioError(f"{path}.position: non-numeric coordinate") from None
    if len(pos) == 2:
        pos = pos + (10.0,)
    try:
        pa_class = PAClass.parse(item.get("pa_class", "ClassA"))
    except ValueError as exc:
        raise ScenarioError(f"{path}.pa_class: {exc}") from None
    try:
        return APConfig(
            id=_get(item, "id", path, default=i, kind=int),
            position=pos,
            num_antennas=_get(item, "num_antennas", path, required=True, kind=int),
            p_max_dbm=_get(item, "p_max_dbm", path, required=True),
            pa_class=pa_class,
            ibo_db=_get(item, "ibo_db", path, default=DEFAULT_IBO_DB),
        )
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from None


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("<root>: expected a mapping with keys aps, area, radio, link, energy")
    unknown = set(doc) - {"aps", "area", "radio", "link", "energy"}
    if unknown:
        raise ScenarioError(f"<root>: unknown top-level key {sorted(unknown)[0]!r}")
    aps_doc = doc.get("aps") or []
    if not isinstance(aps_doc, list):
        raise ScenarioError("aps: expected a list")
    aps = tuple(_parse_ap(item, i) for i, item in enumerate(aps_doc))

    area_doc = _section(doc, "area")
    radio = _section(doc, "radio")
    pl = radio.get("pathloss") or {}
    link = _section(doc, "link")
    energy = _section(doc, "energy")
    base = Scenario.__dataclass_fields__

    def dflt(name):
        return base[name].default

    area = Area(
        _get(area_doc, "x_min", "area", 0.0),
        _get(area_doc, "x_max", "area", 500.0),
        _get(area_doc, "y_min", "area", 0.0),
        _get(area_doc, "y_max", "area", 500.0),
    )
    return Scenario(
        aps=aps,
        area=area,
        carrier_hz=_get(radio, "carrier_hz", "radio", dflt("carrier_hz")),
        bandwidth_hz=_get(radio, "bandwidth_hz", "radio", dflt("bandwidth_hz")),
        noise_figure_db=_get(radio, "noise_figure_db", "radio", dflt("noise_figure_db")),
        ue_height_m=_get(radio, "ue_height_m", "radio", dflt("ue_height_m")),
        pathloss=PathLossParams(
            _get(pl, "intercept_db", "radio.pathloss", PathLossParams.intercept_db),
            _get(pl, "slope_db", "radio.pathloss", PathLossParams.slope_db),
            _get(pl, "shadowing_db", "radio.pathloss", PathLossParams.shadowing_db),
        ),
        se_max=_get(link, "se_max", "link", dflt("se_max")),
        impl_loss=_get(link, "impl_loss", "link", dflt("impl_loss")),
        slot_duration_s=_get(link, "slot_duration_s", "link", dflt("slot_duration_s")),
        k_max=_get(link, "k_max", "link", dflt("k_max"), kind=int),
        circuit_power_w=_get(energy, "circuit_power_w", "energy", dflt("circuit_power_w")),
        eta_class_a=_get(energy, "eta_class_a", "energy", dflt("eta_class_a")),
        eta_class_b_max=_get(energy, "eta_class_b_max", "energy", dflt("eta_class_b_max")),
        idle_pa_draw=_get(energy, "idle_pa_draw", "energy", dflt("idle_pa_draw"), kind=bool),
    )


def load_scenario(text: str) -> Scenario:
    """Parse and validate a YAML scenario document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"<root>: parse failure: {exc}") from None
    return scenario_from_dict(doc if doc is not None else {})


def load_scenario_file(path) -> Scenario:
    return load_scenario(Path(path).read_text())


BUNDLED = {"default": "default_scenario.yaml", "three_ap": "three_ap_scenario.yaml"}


def bundled_scenario(name: str) -> Scenario:
    """Load one of the scenario files shipped with the package (see ``BUNDLED``)."""
    if name not in BUNDLED:
        raise ScenarioError(f"<root>: no bundled scenario named {name!r}")
    return load_scenario(resources.files("cfrem").joinpath("data", BUNDLED[name]).read_text())


def default_scenario() -> Scenario:
    """1 macro AP (128 antennas, 46 dBm) and 5 micro APs (32 antennas, 30 dBm), 6 dB IBO."""
    return bundled_scenario("default")
