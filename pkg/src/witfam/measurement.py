"""Born-rule probabilities, finite-sample counts, datasets and bootstrap."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .exceptions import InvalidDistribution, WitfamError
from .witness import WitnessFamily, criterion_s, family_unitary

DEFAULT_PAIRS = 10_000


def born_probabilities(rho, fam: WitnessFamily) -> np.ndarray:
    """Outcome probabilities ``tr(rho (U1 x U2)^dag Pi_j (U1 x U2))``."""
    e = fam.kets
    p = np.einsum("ji,ik,jk->j", e.conj(), np.asarray(rho, dtype=complex), e).real
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def sample_counts(p, n, rng) -> np.ndarray:
    """Multinomial counts of `n` trials over the outcome distribution `p`."""
    p = np.asarray(p, dtype=float)
    if np.any(p < -1e-12) or abs(p.sum() - 1) > 1e-9:
        raise InvalidDistribution(f"not a probability distribution: {p}")
    if n < 1:
        raise ValueError("need at least one trial")
    p = np.clip(p, 0.0, None)
    return rng.multinomial(int(n), p / p.sum())


@dataclass(frozen=True, eq=False)
class FamilyRecord:
    family: WitnessFamily
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (4,) or np.any(c < 0) or c.sum() <= 0:
            raise ValueError(f"bad counts {self.counts!r}")
        object.__setattr__(self, "counts", c)

    @property
    def n_total(self) -> int:
        return int(self.counts.sum())

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.n_total

    @property
    def label(self):
        return self.family.label

    def s_value(self) -> float:
        return criterion_s(self.frequencies).s_value


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered, immutable collection of family records."""

    records: tuple = ()
    allow_remeasure: bool = False

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if not self.allow_remeasure:
            labels = [r.label for r in self.records if not r.family.is_custom]
            if len(labels) != len(set(labels)):
                raise WitfamError("family measured twice in one dataset")

    def append(self, record: FamilyRecord) -> "Dataset":
        return Dataset(self.records + (record,), self.allow_remeasure)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def labels(self) -> list:
        return [r.label for r in self.records]

    @property
    def fixed_labels(self) -> set:
        return {r.label for r in self.records if not r.family.is_custom}

    @cached_property
    def kets(self) -> np.ndarray:
        """All outcome kets stacked, shape ``(4 * len(self), 4)``."""
        if not self.records:
            return np.zeros((0, 4), dtype=complex)
        return np.concatenate([r.family.kets for r in self.records])

    @cached_property
    def counts(self) -> np.ndarray:
        if not self.records:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([r.counts for r in self.records])

    @property
    def n_total(self) -> int:
        return int(self.counts.sum())

    def probabilities(self, rho) -> np.ndarray:
        """Born probabilities of every outcome of every record."""
        e = self.kets
        return np.einsum("ji,ik,jk->j", e.conj(), rho, e).real


def measure(rho, fam: WitnessFamily, n, rng) -> FamilyRecord:
    return FamilyRecord(fam, sample_counts(born_probabilities(rho, fam), n, rng))


def exact_record(rho, fam: WitnessFamily, n) -> FamilyRecord:
    """Record with counts ``round(n * p_j)`` instead of sampled ones."""
    return FamilyRecord(fam, np.rint(n * born_probabilities(rho, fam)).astype(np.int64))


def bootstrap_resample(d: Dataset, rng) -> Dataset:
    """Redraw every record multinomially from its own empirical frequencies."""
    out = [FamilyRecord(r.family, rng.multinomial(r.n_total, r.frequencies)) for r in d]
    return Dataset(out, d.allow_remeasure)


# -- text formats -----------------------------------------------------------


def format_family_label(fam: WitnessFamily) -> str:
    """``1``..``6`` or ``custom:`` followed by the 8 entries of U1 then U2."""
    if not fam.is_custom:
        return str(fam.label)
    entries = np.concatenate([fam.u1.ravel(), fam.u2.ravel()])
    return "custom:" + ";".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in entries)


def parse_family_label(text: str) -> WitnessFamily:
    text = text.strip()
    if text.startswith("custom:"):
        parts = text[len("custom:"):].split(";")
        if len(parts) != 8:
            raise ValueError(f"custom family needs 8 entries, got {len(parts)}")
        z = np.array([complex(p) for p in parts])
        return WitnessFamily(z[:4].reshape(2, 2), z[4:].reshape(2, 2), "custom")
    return family_unitary(int(text))


def format_dataset(d: Dataset) -> str:
    lines = ["# family_label,n1,n2,n3,n4"]
    for r in d:
        lines.append(",".join([format_family_label(r.family), *map(str, r.counts)]))
    return "\n".join(lines) + "\n"


def parse_dataset(text: str) -> Dataset:
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        label, *counts = line.rsplit(",", 4)
        if len(counts) != 4:
            raise ValueError(f"line {lineno}: expected label and four counts")
        records.append(FamilyRecord(parse_family_label(label), [int(c) for c in counts]))
    return Dataset(records)


def write_dataset(d: Dataset, path) -> None:
    Path(path).write_text(format_dataset(d))


def read_dataset(path) -> Dataset:
    return parse_dataset(Path(path).read_text())
