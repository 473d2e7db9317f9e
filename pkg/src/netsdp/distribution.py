"""Dense conditional probability tables ``p(o_1 ... o_n | i_1 ... i_n)``."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DistributionError(ValueError):
    pass


@dataclass(frozen=True)
class DistributionTable:
    """Probability table stored as an array of shape ``inputs + outputs``."""

    inputs: tuple
    outputs: tuple
    p: np.ndarray

    def __post_init__(self):
        shape = tuple(self.inputs) + tuple(self.outputs)
        if self.p.shape != shape:
            raise DistributionError(f"table shape {self.p.shape} does not match {shape}")

    @property
    def n_parties(self) -> int:
        return len(self.inputs)

    def __call__(self, outs, ins) -> float:
        return float(self.p[tuple(ins) + tuple(outs)])

    def context_sums(self) -> np.ndarray:
        n = self.n_parties
        return self.p.sum(axis=tuple(range(n, 2 * n)))

    def signaling(self) -> float:
        """Largest change of any marginal under a change of the discarded parties' inputs."""
        n = self.n_parties
        worst = 0.0
        for r in range(1, n):
            for keep in itertools.combinations(range(n), r):
                drop = [k for k in range(n) if k not in keep]
                marg = self.p.sum(axis=tuple(n + k for k in drop))
                # marg has axes: inputs (n) + kept outputs
                for k in drop:
                    spread = marg.max(axis=k) - marg.min(axis=k)
                    worst = max(worst, float(spread.max()))
        return worst

    def validate(self, norm_tol: float = 1e-9, nosig_tol: float = 1e-9) -> list:
        errors = []
        if not np.all(np.isfinite(self.p)):
            errors.append("non-finite probabilities")
        if (self.p < -norm_tol).any():
            errors.append("negative probabilities")
        dev = np.abs(self.context_sums() - 1.0).max()
        if dev > norm_tol:
            errors.append(f"input contexts not normalized (max deviation {dev:.3g})")
        sig = self.signaling()
        if sig > nosig_tol:
            errors.append(f"signaling distribution (max marginal drift {sig:.3g})")
        return errors

    def mix(self, other: "DistributionTable", v: float) -> "DistributionTable":
        return DistributionTable(self.inputs, self.outputs, v * self.p + (1 - v) * other.p)

    # -- JSON ------------------------------------------------------------------

    def to_dict(self) -> dict:
        n = self.n_parties
        records = []
        for idx in itertools.product(*(range(k) for k in self.p.shape)):
            v = float(self.p[idx])
            if v != 0.0:
                records.append({"i": list(idx[:n]), "o": list(idx[n:]), "v": v})
        return {"inputs": list(self.inputs), "outputs": list(self.outputs), "p": records}

    @classmethod
    def from_dict(cls, data: dict, norm_tol: float = 1e-9) -> "DistributionTable":
        try:
            inputs = tuple(int(k) for k in data["inputs"])
            outputs = tuple(int(k) for k in data["outputs"])
            p = np.zeros(inputs + outputs)
            for rec in data["p"]:
                p[tuple(rec["i"]) + tuple(rec["o"])] = float(rec["v"])
        except (KeyError, TypeError, IndexError) as exc:
            raise DistributionError(f"malformed distribution: {exc!r}") from exc
        table = cls(inputs, outputs, p)
        dev = np.abs(table.context_sums() - 1.0).max()
        if dev > norm_tol:
            raise DistributionError(f"input contexts not normalized (max deviation {dev:.3g})")
        return table

    @classmethod
    def load(cls, path) -> "DistributionTable":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")


def uniform(inputs, outputs) -> DistributionTable:
    shape = tuple(inputs) + tuple(outputs)
    return DistributionTable(tuple(inputs), tuple(outputs),
                             np.full(shape, 1.0 / np.prod(outputs)))
