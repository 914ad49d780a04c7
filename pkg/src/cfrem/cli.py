"""Command-line front end: ``cfrem sweep``, ``cfrem rl`` and ``cfrem cdf``.

Every command writes CSV with a leading ``# config:`` comment echoing all
settings. Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .rem import (REMStore, export_store, import_store, pattern_key, select_action,
                  update_entry, DEFAULT_GRID_M)
from .scenario import (BUNDLED, PAClass, bundled_scenario, generate_pattern, load_pattern_file,
                       load_scenario_file)
from .simulator import run_drop

EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("values must be positive integers")
    return vals


def _pa_list(text: str) -> list[PAClass]:
    try:
        return [PAClass.parse(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _load_scenario(name: str):
    return bundled_scenario(name) if name in BUNDLED else load_scenario_file(name)


def _pattern(args, scenario):
    if args.pattern_file:
        pattern = load_pattern_file(args.pattern_file)
    else:
        pattern = generate_pattern(args.seed, args.n_ue, scenario.area)
    pattern.check_inside(scenario.area)
    return pattern


def _config_line(args) -> str:
    items = []
    for name in sorted(vars(args)):
        if name in ("func", "out", "store"):
            continue
        val = getattr(args, name)
        if isinstance(val, list):
            val = ";".join(v.value if isinstance(v, PAClass) else str(v) for v in val)
        elif isinstance(val, PAClass):
            val = val.value
        items.append(f"{name}={val}")
    return "# config: " + " ".join(items)


def _atomic_write(path: str, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(args, header, rows) -> str:
    buf = io.StringIO()
    buf.write(_config_line(args) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_sweep(args) -> None:
    scenario = _load_scenario(args.scenario)
    pattern = _pattern(args, scenario)
    rows = []
    for model in args.pa:
        for no_ap in args.actions:
            drops = [run_drop(scenario, pattern, no_ap, model, args.seed + d) for d in range(args.drops)]
            bits = sum(r.total_bits for r in drops)
            energy = sum(r.total_energy_j for r in drops)
            rows.append([model.value, no_ap, _fmt(bits / energy), args.drops])
    _atomic_write(args.out, _csv_text(args, ["pa_model", "no_ap", "mean_ee", "n_drops"], rows))


def cmd_rl(args) -> None:
    scenario = _load_scenario(args.scenario)
    if args.pattern_file:
        patterns = [load_pattern_file(p) for p in args.pattern_file]
    else:
        patterns = [generate_pattern(s, args.n_ue, scenario.area) for s in args.patterns]
    for p in patterns:
        p.check_inside(scenario.area)
    keys = [pattern_key(p, args.grid_m) for p in patterns]

    store_path = Path(args.store)
    existed = store_path.exists()
    store = import_store(store_path) if existed else REMStore.for_scenario(scenario)
    rng = np.random.default_rng(args.seed)
    rows = []
    for ep in range(args.episodes):
        i = ep % len(patterns)
        key = keys[i]
        entry = store.entries.get(key)
        visits = sum(st.count for st in entry.stats.values()) if entry else 0
        eps = min(1.0, args.epsilon0 / max(visits, 1))
        action = select_action(store, key, eps, args.actions, rng)
        drop_seed = args.seed if args.fixed_channel else args.seed + ep
        result = run_drop(scenario, patterns[i], action, args.pa_model, drop_seed)
        update_entry(store, key, action, result)
        rows.append([ep, str(key), action, _fmt(result.ee)])
    _atomic_write(args.out, _csv_text(args, ["episode", "key", "action", "ee"], rows))
    if args.episodes > 0 or not existed:
        export_store(store, store_path)


def cmd_cdf(args) -> None:
    scenario = _load_scenario(args.scenario)
    pattern = _pattern(args, scenario)
    rows = []
    for no_ap in args.actions:
        thr = np.zeros(len(pattern))
        for d in range(args.drops):
            thr += run_drop(scenario, pattern, no_ap, args.pa_model, args.seed + d).per_ue_throughput_bps
        thr = np.sort(thr / args.drops)
        n = len(thr)
        rows += [[no_ap, _fmt(t), _fmt((i + 1) / n)] for i, t in enumerate(thr)]
    _atomic_write(args.out, _csv_text(args, ["no_ap", "throughput_bps", "cdf"], rows))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cfrem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--scenario", default="default",
                       help=f"scenario YAML file or bundled name ({', '.join(BUNDLED)})")
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--n-ue", type=int, default=40, help="UEs per generated pattern")
        p.add_argument("--actions", type=_int_list, default=None,
                       help="comma-separated NO AP values (default 1..n_ap)")
        p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="EE for every (PA model, NO AP) combination")
    common(p)
    p.add_argument("--pattern-file")
    p.add_argument("--pa", type=_pa_list, default=list(PAClass))
    p.add_argument("--drops", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rl", help="epsilon-greedy REM learning loop")
    common(p)
    p.add_argument("--pattern-file", action="append", help="pattern CSV (repeatable)")
    p.add_argument("--patterns", type=_int_list, default=[1],
                   help="seeds of generated patterns, visited round-robin")
    p.add_argument("--pa", dest="pa_model", type=PAClass.parse, default=PAClass.PERFECT)
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--epsilon0", type=float, default=1.0,
                   help="exploration rate is epsilon0 / visits of the pattern")
    p.add_argument("--grid-m", type=float, default=DEFAULT_GRID_M)
    p.add_argument("--fixed-channel", action="store_true",
                   help="reuse one channel realization in every episode")
    p.add_argument("--store", required=True)
    p.set_defaults(func=cmd_rl)

    p = sub.add_parser("cdf", help="empirical CDF of per-UE throughput")
    common(p)
    p.add_argument("--pattern-file")
    p.add_argument("--pa", dest="pa_model", type=PAClass.parse, default=PAClass.PERFECT)
    p.add_argument("--drops", type=int, default=1)
    p.set_defaults(func=cmd_cdf)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "drops", 1) < 1:
            raise UsageError("--drops must be >= 1")
        if getattr(args, "episodes", 0) < 0:
            raise UsageError("--episodes must be >= 0")
        if args.n_ue < 1:
            raise UsageError("--n-ue must be >= 1")
    except UsageError as exc:
        print(f"cfrem: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.actions is None:
            args.actions = list(range(1, _load_scenario(args.scenario).n_ap + 1))
        args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"cfrem: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
