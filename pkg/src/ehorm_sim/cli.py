"""Command-line entry point: config parsing, runs, and CSV/JSON output.

Config files are flat ``key = value`` text (``#`` starts a comment).
Every key can also be given as ``--key=value``; flags win over the file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .engine import SimConfig, SimResult, lifetime_medians, run_many
from .errors import ConfigError

KDT_LEVELS = (10, 50, 100)
CSV_HEADER = ["round", "alive", "sleeping", "heads", "e_th_joules", "consumed_joules", "residual_joules"]


def _on_off(text):
    low = text.strip().lower()
    if low not in ("on", "off"):
        raise ValueError("expected on or off")
    return low == "on"


def _protocol(text):
    low = text.strip().lower()
    if low not in ("leach", "sep", "deec"):
        raise ValueError("expected leach, sep or deec")
    return low


# key -> (SimConfig field, parser, range check, range description)
KEYS = {
    "n": ("n", int, lambda v: v >= 1, ">= 1"),
    "width_m": ("width", float, lambda v: v > 0, "> 0"),
    "height_m": ("height", float, lambda v: v > 0, "> 0"),
    "e0_j": ("e0", float, lambda v: v > 0, "> 0"),
    "p": ("p", float, lambda v: 0 < v < 1, "in (0, 1)"),
    "hetero_m": ("hetero_m", float, lambda v: 0 <= v <= 1, "in [0, 1]"),
    "hetero_a": ("hetero_a", float, lambda v: v >= 0, ">= 0"),
    "packet_bits": ("packet_bits", int, lambda v: v >= 0, ">= 0"),
    "protocol": ("protocol", _protocol, None, None),
    "ehorm": ("ehorm", _on_off, None, None),
    "ns_cap": ("ns_cap", int, lambda v: v >= 0, ">= 0"),
    "max_rounds": ("max_rounds", int, lambda v: v >= 1, ">= 1"),
    "seed": ("seed", int, lambda v: v >= 0, ">= 0"),
}


@dataclass(frozen=True)
class RunSpec:
    config: SimConfig = field(default_factory=SimConfig)
    out_dir: Path = Path("out")
    compare: bool = False
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("seeds: seed list must be non-empty")


def _convert(key, raw, where):
    if key not in KEYS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    attr, parse, check, desc = KEYS[key]
    try:
        value = parse(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: {key}: cannot parse {raw!r} ({exc})") from None
    if check is not None and not check(value):
        raise ConfigError(f"{where}: {key}: value {value} out of range, must be {desc}")
    return attr, value


def read_config_file(path) -> dict:
    """Parse a key = value file into SimConfig keyword arguments."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{path}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        attr, value = _convert(key, raw, where)
        values[attr] = value
    return values


def parse_seeds(text: str) -> tuple[int, ...]:
    """``"3"``, ``"1,2,5"`` or a half-open range ``"0:20"``."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":", 1))
            seeds = tuple(range(lo, hi))
        else:
            seeds = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"seeds: cannot parse {text!r}") from None
    if not seeds:
        raise ConfigError(f"seeds: {text!r} names no seeds")
    if min(seeds) < 0:
        raise ConfigError("seeds: seeds must be >= 0")
    return seeds


def parse_config(path=None, overrides=(), out_dir="out", compare=False, seeds=None) -> RunSpec:
    """Resolve a RunSpec from an optional file plus ``--key=value`` overrides.

    ``overrides`` is either a mapping of config keys to raw strings or a
    sequence of ``--key=value`` tokens.
    """
    values = read_config_file(path) if path is not None else {}
    if isinstance(overrides, dict):
        items = list(overrides.items())
    else:
        items = []
        for token in overrides:
            if not token.startswith("--") or "=" not in token:
                raise ConfigError(f"flag {token!r}: expected --key=value")
            key, raw = token[2:].split("=", 1)
            items.append((key, raw))
    for key, raw in items:
        key = key.replace("-", "_")
        attr, value = _convert(key, str(raw), "command line")
        values[attr] = value
    cfg = SimConfig(**values)
    seed_list = (cfg.seed,) if seeds is None else tuple(seeds)
    return RunSpec(config=cfg, out_dir=Path(out_dir), compare=compare, seeds=seed_list)


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def series_csv(result: SimResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in result.records:
        writer.writerow([
            rec.round, rec.alive, rec.sleeping, rec.heads,
            _fmt(rec.e_th), _fmt(rec.consumed), _fmt(rec.residual),
        ])
    return buf.getvalue()


def summary(result: SimResult) -> dict:
    out = {
        "variant": result.config.variant_name,
        "seed": result.seed,
        "rounds": result.rounds,
        "fnd": result.fnd,
        "hnd": result.hnd,
        "and": result.and_,
        "kdt": {str(k): result.kdt(k) for k in KDT_LEVELS},
        "total_energy_saved_j": result.total_saved,
        "config": result.config.as_dict(),
    }
    if result.lifetime_estimate is not None:
        out["deec_lifetime_estimate_rounds"] = result.lifetime_estimate
    return out


def _diff(a, b):
    return None if a is None or b is None else b - a


def delta(baseline: SimResult, variant: SimResult) -> dict:
    base, var = summary(baseline), summary(variant)
    return {
        "baseline": base,
        "ehorm": var,
        "delta": {"fnd": _diff(base["fnd"], var["fnd"]), "and": _diff(base["and"], var["and"])},
    }


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


class _Writer:
    """Writes files atomically; on failure removes everything it wrote."""

    def __init__(self):
        self.written: list[Path] = []

    def write(self, path: Path, text: str):
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        try:
            tmp.write_text(text)
            os.replace(tmp, path)
        finally:
            if tmp.exists():
                tmp.unlink()
        self.written.append(path)

    def rollback(self):
        for path in reversed(self.written):
            try:
                path.unlink()
            except OSError:
                pass


def _emit_seed(writer: _Writer, out: Path, results: list[SimResult]):
    if len(results) == 1:
        writer.write(out / "alive.csv", series_csv(results[0]))
        writer.write(out / "summary.json", _json(summary(results[0])))
    else:
        base, var = results
        for res in results:
            writer.write(out / f"alive_{res.config.variant_name.lower()}.csv", series_csv(res))
        writer.write(out / "delta.json", _json(delta(base, var)))


def emit(results_by_seed: dict, out_dir) -> list[Path]:
    """Write outputs for ``{seed: [result]}`` or ``{seed: [baseline, ehorm]}``.

    A single seed writes straight into ``out_dir``; several seeds get one
    ``seed_<s>`` subdirectory each plus ``medians.json``.
    """
    out_dir = Path(out_dir)
    writer = _Writer()
    try:
        if len(results_by_seed) == 1:
            (results,) = results_by_seed.values()
            _emit_seed(writer, out_dir, results)
        else:
            for seed, results in results_by_seed.items():
                _emit_seed(writer, out_dir / f"seed_{seed}", results)
            variants = len(next(iter(results_by_seed.values())))
            medians = {}
            for k in range(variants):
                group = [res[k] for res in results_by_seed.values()]
                medians[group[0].config.variant_name] = lifetime_medians(group)
            medians["seeds"] = list(results_by_seed)
            writer.write(out_dir / "medians.json", _json(medians))
    except BaseException:
        writer.rollback()
        raise
    return writer.written


def execute(run_spec: RunSpec, jobs: int = 1) -> dict:
    configs = []
    for seed in run_spec.seeds:
        cfg = run_spec.config.replace(seed=seed)
        if run_spec.compare:
            configs += [cfg.replace(ehorm=False), cfg.replace(ehorm=True)]
        else:
            configs.append(cfg)
    results = run_many(configs, jobs=jobs)
    width = 2 if run_spec.compare else 1
    return {seed: results[i * width:(i + 1) * width] for i, seed in enumerate(run_spec.seeds)}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ehorm-sim",
        description="Round-based WSN lifetime simulator (LEACH/SEP/DEEC, optional threshold sleep scheduling).",
        epilog="Config keys (also accepted as --key=value): " + ", ".join(KEYS),
    )
    ap.add_argument("--config", help="flat key = value config file")
    ap.add_argument("--out", default="out", help="output directory (default: out)")
    ap.add_argument("--compare", action="store_true", help="run baseline and sleep-scheduled variant per seed")
    ap.add_argument("--seeds", help="ensemble seeds: 1,2,3 or a range lo:hi (hi excluded)")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for ensembles")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args, rest = ap.parse_known_args(argv)
    try:
        seeds = parse_seeds(args.seeds) if args.seeds else None
        run_spec = parse_config(args.config, rest, out_dir=args.out, compare=args.compare, seeds=seeds)
    except ConfigError as exc:
        print(f"ehorm-sim: configuration error: {exc}", file=sys.stderr)
        return 2
    by_seed = execute(run_spec, jobs=args.jobs)
    try:
        emit(by_seed, run_spec.out_dir)
    except OSError as exc:
        print(f"ehorm-sim: I/O error: {exc}", file=sys.stderr)
        return 1
    for seed, results in by_seed.items():
        for res in results:
            print(f"{res.config.variant_name:7s} seed={seed} rounds={res.rounds} fnd={res.fnd} hnd={res.hnd} and={res.and_}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
