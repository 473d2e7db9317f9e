"""Scalar-extended moment matrices: symbolic assembly and instantiation.

Identical entry keys share one variable; this pooling is the only mechanism
that imposes the linear (including factorization) constraints.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from netsdp.algebra import canonical_entry_key, key_class, uses_one_input_per_party
from netsdp.distribution import DistributionError, DistributionTable
from netsdp.scenario import Scenario

log = logging.getLogger(__name__)

ZERO = -1
CONSISTENCY_WARN = 1e-9
CONSISTENCY_FAIL = 1e-6


@dataclass
class SymbolicMomentMatrix:
    generators: list
    entries: np.ndarray  # (n, n) int class ids, ZERO for structural zeros; symmetric
    classes: list  # class id -> key (sorted tuple of symbol words)
    scenario: Scenario
    _split: list = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.generators)

    def class_of(self, i: int, j: int):
        c = self.entries[i, j]
        return None if c == ZERO else self.classes[c]

    def split(self):
        """Per class: (known symbol words, unknown sub-key or None)."""
        if self._split is None:
            out = []
            for key in self.classes:
                known = tuple(w for w in key if uses_one_input_per_party(w))
                rest = [w for w in key if not uses_one_input_per_party(w)]
                out.append((known, key_class(rest, self.scenario.mode) if rest else None))
            self._split = out
        return self._split


def assemble(generators, scenario: Scenario) -> SymbolicMomentMatrix:
    """Build the symbolic matrix over ``generators`` (identity first)."""
    if not generators or generators[0].word or generators[0].tags:
        raise ValueError("generator list must start with the identity")
    mode, structure = scenario.mode, scenario.structure
    n = len(generators)
    entries = np.full((n, n), ZERO, dtype=np.int64)
    index = {}
    classes = []
    for i in range(n):
        gi = generators[i]
        for j in range(i, n):
            key = canonical_entry_key(gi, generators[j], mode, structure)
            if key is None:
                continue
            c = index.get(key)
            if c is None:
                c = index[key] = len(classes)
                classes.append(key)
            entries[i, j] = entries[j, i] = c
    return SymbolicMomentMatrix(list(generators), entries, classes, scenario)


def _letter_vector(letter, n_out):
    f = np.zeros(n_out)
    if letter.outcome < 0:
        f[0], f[1] = 1.0, -1.0
    else:
        f[letter.outcome] = 1.0
    return f


def symbol_value(word, dist: DistributionTable) -> float:
    """Expectation of a one-input-per-party word under ``dist``.

    Absent parties are marginalized and their inputs averaged over; a
    dependence on those inputs (signaling) warns above 1e-9 and fails above 1e-6.
    """
    n = dist.n_parties
    by_party = {}
    for l in word:
        by_party.setdefault(l.party, []).append(l)
    idx = []
    for k in range(n):
        ls = by_party.get(k)
        idx.append(ls[0].input if ls else slice(None))
    sub = dist.p[tuple(idx)]
    # remaining axes: inputs of absent parties, then all outputs
    absent = [k for k in range(n) if k not in by_party]
    n_abs = len(absent)
    out_axes_absent = tuple(n_abs + k for k in absent)
    marg = sub.sum(axis=out_axes_absent) if out_axes_absent else sub
    # contract present outputs with the letter functions
    for k in sorted(by_party, reverse=True):
        f = np.ones(dist.outputs[k])
        for l in by_party[k]:
            f = f * _letter_vector(l, dist.outputs[k])
        pos = n_abs + sorted(by_party).index(k)
        marg = np.tensordot(marg, f, axes=([pos], [0]))
    vals = np.asarray(marg, dtype=float)
    if n_abs:
        spread = float(vals.max() - vals.min())
        if spread > CONSISTENCY_FAIL:
            raise DistributionError(
                f"marginal depends on absent parties' inputs by {spread:.3g}: signaling distribution")
        if spread > CONSISTENCY_WARN:
            log.warning("marginal inconsistency %.3g across absent inputs", spread)
        return float(vals.mean())
    return float(vals)


def known_value(symbol_class, dist: DistributionTable):
    """Value of a symbol multiset when every symbol is observable, else ``None``."""
    total = 1.0
    for w in symbol_class:
        if not uses_one_input_per_party(w):
            return None
        total *= symbol_value(w, dist)
    return total


@dataclass
class InstantiatedProblem:
    n: int
    constant: np.ndarray
    variables: list  # (key, rows, cols, coefs): upper-triangular positions
    maximize_min_eig: bool = True

    @property
    def m(self) -> int:
        return len(self.variables)


def instantiate(symbolic: SymbolicMomentMatrix, dist: DistributionTable,
                coef_tol: float = 0.0) -> InstantiatedProblem:
    """Substitute known values; unknown parts of each entry become pooled variables.

    An entry whose key mixes known and unknown symbols becomes ``c * x_K`` with
    ``c`` the product of the known values and ``K`` the unknown sub-key.
    """
    scen = symbolic.scenario
    if tuple(dist.inputs) != scen.inputs or any(
            o < so for o, so in zip(dist.outputs, scen.outputs)) or len(dist.outputs) != len(scen.outputs):
        raise DistributionError("distribution arities do not match the scenario")
    n = symbolic.n
    cache = {}

    def value(w):
        v = cache.get(w)
        if v is None:
            v = cache[w] = symbol_value(w, dist)
        return v

    split = symbolic.split()
    cls_coef = np.empty(len(split))
    var_of_class = np.full(len(split), -1, dtype=np.int64)
    var_keys, var_index = [], {}
    for c, (known, rest) in enumerate(split):
        coef = 1.0
        for w in known:
            coef *= value(w)
        cls_coef[c] = coef
        if rest is not None:
            v = var_index.get(rest)
            if v is None:
                v = var_index[rest] = len(var_keys)
                var_keys.append(rest)
            var_of_class[c] = v

    iu, ju = np.triu_indices(n)
    cls = symbolic.entries[iu, ju]
    nz = cls != ZERO
    iu, ju, cls = iu[nz], ju[nz], cls[nz]
    coefs = cls_coef[cls]
    vars_ = var_of_class[cls]
    constant = np.zeros((n, n))
    const = vars_ < 0
    constant[iu[const], ju[const]] = coefs[const]
    constant[ju[const], iu[const]] = coefs[const]

    live = (~const) & (np.abs(coefs) > coef_tol)
    iu, ju, coefs, vars_ = iu[live], ju[live], coefs[live], vars_[live]
    order = np.argsort(vars_, kind="stable")
    iu, ju, coefs, vars_ = iu[order], ju[order], coefs[order], vars_[order]
    bounds = np.searchsorted(vars_, np.arange(len(var_keys) + 1))
    variables = []
    for v, key in enumerate(var_keys):
        a, b = bounds[v], bounds[v + 1]
        if a == b:
            continue
        variables.append((key, iu[a:b], ju[a:b], coefs[a:b]))
    return InstantiatedProblem(n, constant, variables)


def problem_stats(symbolic: SymbolicMomentMatrix) -> tuple:
    """(dimension, unknown-class count, structural zeros in the upper triangle)."""
    n = symbolic.n
    iu, ju = np.triu_indices(n)
    cls = symbolic.entries[iu, ju]
    zeros = int((cls == ZERO).sum())
    unknown = {rest for known, rest in symbolic.split() if rest is not None}
    return n, len(unknown), zeros
