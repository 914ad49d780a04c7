"""Radio Environment Map: per-pattern, per-cluster-size energy-efficiency statistics.

Entries are keyed by a quantized, order-free view of the UE location pattern.
For every key the store accumulates, per action (number of serving APs),
the delivered bits and consumed energy; the EE estimate is their ratio.
A hardware repository records the PA fitted at each AP.

Store file format (line oriented, comma separated)::

    cfrem-rem-store,1
    [hardware]
    ap_id,pa_class,p_max_dbm,ibo_db
    0,ClassA,46.0,6.0
    [entries]
    grid_m,cells,no_ap,count,total_bits,total_energy_j,mean_ee
    5.0,10:3;12:40,1,4,123.0,7.5,16.4

``cells`` lists the sorted grid cells as ``ix:iy`` joined by ``;``. A section
is omitted when it is empty, so an empty store is the header line alone.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .scenario import PAClass, Scenario, UELocationPattern
from .simulator import DropResult

__all__ = [
    "PatternKey", "ActionStats", "REMEntry", "HardwareRecord", "REMStore",
    "ColdStartError", "StoreFormatError", "pattern_key", "update_entry",
    "best_action", "select_action", "export_store", "import_store",
]

DEFAULT_GRID_M = 5.0
HEADER = "cfrem-rem-store,1"
HW_COLUMNS = "ap_id,pa_class,p_max_dbm,ibo_db"
ENTRY_COLUMNS = "grid_m,cells,no_ap,count,total_bits,total_energy_j,mean_ee"


class ColdStartError(KeyError):
    """No REM entry exists yet for the requested pattern."""


class StoreFormatError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class PatternKey:
    cells: tuple
    grid_m: float = DEFAULT_GRID_M

    def __str__(self):
        return f"{self.grid_m!r}|{_cells_str(self.cells)}"


def _cells_str(cells) -> str:
    return ";".join(f"{x}:{y}" for x, y in cells)


def pattern_key(pattern: UELocationPattern, grid_m: float = DEFAULT_GRID_M) -> PatternKey:
    if not grid_m > 0:
        raise ValueError("grid_m must be > 0")
    if len(pattern) == 0:
        raise ValueError("empty pattern")
    cells = np.floor(pattern.positions / grid_m).astype(np.int64)
    return PatternKey(tuple(sorted((int(x), int(y)) for x, y in cells)), float(grid_m))


@dataclass
class ActionStats:
    count: int = 0
    total_bits: float = 0.0
    total_energy_j: float = 0.0

    @property
    def mean_ee(self) -> float:
        return self.total_bits / self.total_energy_j if self.total_energy_j > 0 else 0.0


@dataclass
class REMEntry:
    key: PatternKey
    stats: dict = field(default_factory=dict)   # no_ap -> ActionStats


@dataclass(frozen=True)
class HardwareRecord:
    pa_class: PAClass
    p_max_dbm: float
    ibo_db: float


@dataclass
class REMStore:
    entries: dict = field(default_factory=dict)    # PatternKey -> REMEntry
    hardware: dict = field(default_factory=dict)   # AP id -> HardwareRecord

    @classmethod
    def for_scenario(cls, scenario: Scenario) -> "REMStore":
        hw = {ap.id: HardwareRecord(ap.pa_class, ap.p_max_dbm, ap.ibo_db) for ap in scenario.aps}
        return cls(hardware=hw)

    def __contains__(self, key):
        return key in self.entries

    def __len__(self):
        return len(self.entries)


def update_entry(store: REMStore, key: PatternKey, action: int, result: DropResult) -> REMStore:
    """Fold one drop into the stats of ``(key, action)``."""
    if result.no_ap != action:
        raise ValueError(f"result was produced with no_ap={result.no_ap}, not action {action}")
    entry = store.entries.setdefault(key, REMEntry(key))
    st = entry.stats.setdefault(action, ActionStats())
    st.count += 1
    st.total_bits += result.total_bits
    st.total_energy_j += result.total_energy_j
    return store


def best_action(store: REMStore, key: PatternKey) -> int:
    """Action with the highest EE; ties go to the smaller cluster."""
    entry = store.entries.get(key)
    if entry is None or not entry.stats:
        raise ColdStartError(f"no REM entry for pattern {key}")
    return min(entry.stats, key=lambda a: (-entry.stats[a].mean_ee, a))


def select_action(store: REMStore, key: PatternKey, epsilon: float, action_space,
                  rng=None) -> int:
    """Epsilon-greedy choice, after trying every action of ``action_space`` once.

    ``rng`` is a seed or a ``numpy.random.Generator``.
    """
    actions = list(action_space)
    if not actions:
        raise ValueError("empty action space")
    entry = store.entries.get(key)
    tried = entry.stats if entry is not None else {}
    for a in actions:
        if a not in tried:
            return a
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    if rng.random() < epsilon:
        return actions[int(rng.integers(len(actions)))]
    return best_action(store, key)


# --- persistence ------------------------------------------------------------

def _store_lines(store: REMStore) -> list[str]:
    lines = [HEADER]
    if store.hardware:
        lines += ["[hardware]", HW_COLUMNS]
        for ap_id in sorted(store.hardware):
            hw = store.hardware[ap_id]
            lines.append(f"{ap_id},{hw.pa_class.value},{hw.p_max_dbm!r},{hw.ibo_db!r}")
    rows = [(key, a, st) for key in sorted(store.entries)
            for a, st in sorted(store.entries[key].stats.items())]
    if rows:
        lines += ["[entries]", ENTRY_COLUMNS]
        for key, a, st in rows:
            lines.append(f"{key.grid_m!r},{_cells_str(key.cells)},{a},{st.count},"
                         f"{st.total_bits!r},{st.total_energy_j!r},{st.mean_ee!r}")
    return lines


def export_store(store: REMStore, path) -> None:
    """Write ``store`` to ``path`` atomically."""
    path = Path(path)
    text = "\n".join(_store_lines(store)) + "\n"
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_cells(text: str) -> tuple:
    if not text:
        raise ValueError("empty cell list")
    cells = []
    for tok in text.split(";"):
        x, y = tok.split(":")
        cells.append((int(x), int(y)))
    return tuple(cells)


def import_store(path) -> REMStore:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise StoreFormatError(f"{path}:1: expected header {HEADER!r}")
    store = REMStore()
    section = None
    expect_columns = None
    for lineno, raw in enumerate(lines[1:], 2):
        line = raw.strip()
        if not line:
            continue
        if line in ("[hardware]", "[entries]"):
            section = line[1:-1]
            expect_columns = HW_COLUMNS if section == "hardware" else ENTRY_COLUMNS
            continue
        if expect_columns is not None:
            if line != expect_columns:
                raise StoreFormatError(f"{path}:{lineno}: expected column line {expect_columns!r}")
            expect_columns = None
            continue
        parts = line.split(",")
        try:
            if section == "hardware":
                if len(parts) != 4:
                    raise ValueError(f"expected 4 fields, got {len(parts)}")
                store.hardware[int(parts[0])] = HardwareRecord(
                    PAClass.parse(parts[1]), float(parts[2]), float(parts[3]))
            elif section == "entries":
                if len(parts) != 7:
                    raise ValueError(f"expected 7 fields, got {len(parts)}")
                key = PatternKey(_parse_cells(parts[1]), float(parts[0]))
                st = ActionStats(int(parts[3]), float(parts[4]), float(parts[5]))
                if st.count < 1 or not st.total_energy_j > 0:
                    raise ValueError("count must be >= 1 and energy > 0")
                mean_ee = float(parts[6])
                if not math.isclose(mean_ee, st.mean_ee, rel_tol=1e-12):
                    raise ValueError("mean_ee disagrees with total_bits / total_energy_j")
                entry = store.entries.setdefault(key, REMEntry(key))
                if int(parts[2]) in entry.stats:
                    raise ValueError(f"duplicate action {parts[2]}")
                entry.stats[int(parts[2])] = st
            else:
                raise ValueError("record outside of any section")
        except ValueError as exc:
            raise StoreFormatError(f"{path}:{lineno}: malformed record: {exc}") from None
    if expect_columns is not None:
        raise StoreFormatError(f"{path}:{len(lines)}: section without column line")
    return store
