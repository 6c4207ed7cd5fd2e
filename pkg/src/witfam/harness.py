"""Monte Carlo sweeps over true states, histogram reports and their files.

A sweep draws ``num_states`` true states, runs one detection per state and
bins the runs by the number of families needed. Runs that reach the
tomography fallback go to the ``tomo`` bin and runs that raise go to
``flagged``; a sweep never aborts on a single failure.

Every run gets its own generator seeded by :func:`run_seed`, so results do
not depend on execution order and a sweep can be split across processes.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .exceptions import ConfigError, WitfamError
from .qcore import classical_fidelity
from .schemes import DetectionRecord, SchemeId, Via, run_detection
from .states import STATE_KINDS, StateClass, draw_true_state

BINS = ("1", "2", "3", "4", "5", "6", "tomo", "flagged")
BOOTSTRAP_RESAMPLES = 100
CSV_COLUMNS = ("scheme", "state_class", "n_or_tomo", "count", "percent", "cumulative_percent", "stderr")

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def run_seed(seed: int, index: int) -> int:
    """64-bit seed of run `index` in a sweep with master `seed`."""
    return _splitmix64((seed & _MASK64) ^ _splitmix64(index))


def run_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(run_seed(seed, index))


@dataclass
class ExperimentConfig:
    scheme: str = "C"
    state_class: str = "ginibre-pure"
    param: float | None = None
    num_states: int = 100
    pairs_per_family: int = 10_000
    seed: int = 0
    noise: float = 1.0
    delta_margin: float = 1.0
    output: str | None = None
    format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        try:
            self.scheme = SchemeId.parse(self.scheme).value
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.state_class not in STATE_KINDS:
            raise ConfigError(f"state_class must be one of {', '.join(STATE_KINDS)}")
        if self.num_states < 1 or self.pairs_per_family < 1:
            raise ConfigError("num_states and pairs_per_family must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.delta_margin < 0:
            raise ConfigError("delta_margin must be non-negative")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        try:
            self.state()
        except WitfamError as exc:
            raise ConfigError(str(exc)) from None

    def state(self) -> StateClass:
        return StateClass(self.state_class, self.param, self.noise)

    @property
    def class_label(self) -> str:
        return self.state_class if self.param is None else f"{self.state_class}({self.param:g})"

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        """Build from string or typed values, e.g. a parsed config file."""
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            key = key.strip().replace("-", "_")
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _convert(key, raw, types[key])
        return cls(**kwargs)


def _convert(key, raw, typ):
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    try:
        if "int" in typ:
            return int(raw, 0)
        if "float" in typ:
            return None if raw.lower() in ("", "none") else float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None
    return None if typ.endswith("None") and raw.lower() in ("", "none") else raw


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        out[key.strip()] = val.strip()
    return out


def load_config(path, overrides=None) -> ExperimentConfig:
    """Read a config file; entries of `overrides` replace file values."""
    values = parse_config_text(Path(path).read_text())
    values.update(overrides or {})
    return ExperimentConfig.from_mapping(values)


def bin_of(rec: DetectionRecord) -> str:
    if rec.flagged:
        return "flagged"
    if rec.via is Via.TOMOGRAPHY:
        return "tomo"
    return str(rec.n_families)


def simulate_run(cfg: ExperimentConfig, index: int):
    """One run of a sweep: ``(bin, record or None)``."""
    rng = run_rng(cfg.seed, index)
    try:
        rho = draw_true_state(cfg.state(), rng)
        rec = run_detection(cfg.scheme, rho, cfg.pairs_per_family, rng, delta=cfg.delta_margin)
    except WitfamError:
        return "flagged", None
    return bin_of(rec), rec


def _run_chunk(args):
    cfg, indices = args
    return [(i, *simulate_run(cfg, i)) for i in indices]


@dataclass
class HistogramReport:
    """Binned outcome of a sweep.

    Attributes
    ----------
    outcomes : tuple
        Bin of every run, in run order.
    via : dict
        Run counts per detection route.
    config : dict
        Echo of the sweep configuration, including the seed.
    """

    scheme: str
    state_class: str
    outcomes: tuple
    via: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def num_states(self) -> int:
        return len(self.outcomes)

    @property
    def counts(self) -> dict:
        c = dict.fromkeys(BINS, 0)
        for b in self.outcomes:
            c[b] += 1
        return c

    @property
    def percent(self) -> dict:
        return {b: 100.0 * k / self.num_states for b, k in self.counts.items()}

    @property
    def cumulative_percent(self) -> dict:
        acc, out = 0.0, {}
        for b in BINS:
            acc += self.percent[b]
            out[b] = acc
        return out

    @property
    def mean_n(self) -> float:
        """Mean number of families over runs detected without tomography."""
        ns = [int(b) for b in self.outcomes if b.isdigit()]
        return float(np.mean(ns)) if ns else float("nan")

    def stderr(self, resamples=BOOTSTRAP_RESAMPLES, seed=None) -> dict:
        """Bootstrap standard error of each bin percentage."""
        seed = self.config.get("seed", 0) if seed is None else seed
        rng = np.random.default_rng(run_seed(seed, -1))
        idx = np.array([BINS.index(b) for b in self.outcomes])
        draws = rng.integers(0, len(idx), size=(resamples, len(idx)))
        pct = np.stack([np.bincount(idx[d], minlength=len(BINS)) for d in draws]) * 100.0 / len(idx)
        return dict(zip(BINS, pct.std(axis=0, ddof=1)))

    def distribution(self) -> np.ndarray:
        return np.array([self.counts[b] for b in BINS], dtype=float) / self.num_states

    def fidelity(self, other) -> float:
        """Classical fidelity ``sum_j sqrt(p_j q_j)`` between two histograms."""
        q = other.distribution() if isinstance(other, HistogramReport) else np.asarray(other, dtype=float)
        return classical_fidelity(self.distribution(), q)

    def rows(self) -> list:
        se, pct, cum, cnt = self.stderr(), self.percent, self.cumulative_percent, self.counts
        return [
            {
                "scheme": self.scheme,
                "state_class": self.state_class,
                "n_or_tomo": b,
                "count": cnt[b],
                "percent": pct[b],
                "cumulative_percent": cum[b],
                "stderr": se[b],
            }
            for b in BINS
        ]

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "state_class": self.state_class,
            "num_states": self.num_states,
            "mean_n": self.mean_n,
            "bins": self.rows(),
            "via": self.via,
            "config": self.config,
        }


def run_experiment(cfg: ExperimentConfig, keep_records=False):
    """Run a sweep and aggregate it into a :class:`HistogramReport`.

    With ``cfg.workers > 1`` runs are spread over processes; the report is
    identical to a serial sweep. With `keep_records` the per-run
    :class:`DetectionRecord` list (``None`` for flagged runs) is returned too.
    """
    indices = list(range(cfg.num_states))
    if cfg.workers == 1:
        results = _run_chunk((cfg, indices))
    else:
        chunks = [(cfg, indices[k :: cfg.workers]) for k in range(cfg.workers)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = [r for part in pool.map(_run_chunk, chunks) for r in part]
        results.sort(key=lambda r: r[0])
    outcomes = tuple(b for _, b, _ in results)
    via = {}
    for _, b, rec in results:
        key = "flagged" if rec is None else rec.via.value
        via[key] = via.get(key, 0) + 1
    echo = asdict(cfg)
    report = HistogramReport(cfg.scheme, cfg.class_label, outcomes, dict(sorted(via.items())), echo)
    if keep_records:
        return report, [rec for _, _, rec in results]
    return report


def format_csv(r: HistogramReport) -> str:
    buf = io.StringIO()
    for key, val in r.config.items():
        buf.write(f"# {key} = {val}\n")
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in r.rows():
        w.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def parse_csv_counts(text: str) -> dict:
    """Bin counts from a CSV report."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return {row["n_or_tomo"]: int(row["count"]) for row in csv.DictReader(lines)}


def write_report(r: HistogramReport, fmt="csv", path=None) -> str:
    """Serialize a report as CSV or JSON; write it to `path` when given.

    Raises
    ------
    OSError
        If the file cannot be written.
    """
    if fmt == "csv":
        text = format_csv(r)
    elif fmt == "json":
        text = json.dumps(r.to_dict(), indent=2) + "\n"
    else:
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
