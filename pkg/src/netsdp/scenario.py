"""Network scenarios, word syntax and generating sets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from netsdp.algebra import (
    CLASSICAL,
    IDENTITY,
    MODES,
    QUANTUM,
    IndependenceStructure,
    Letter,
    canonicalize,
    split_symbols,
)


class ScenarioError(ValueError):
    """Raised for malformed scenarios, level specs or word texts."""


@dataclass(frozen=True)
class Party:
    name: str
    inputs: int
    outputs: tuple

    def n_outputs(self, x: int) -> int:
        return self.outputs[x]


@dataclass(frozen=True)
class Scenario:
    parties: tuple
    sources: tuple  # tuple of tuples of party names
    mode: str = QUANTUM

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        try:
            parties = []
            for p in data["parties"]:
                outs = p["outputs"]
                if isinstance(outs, int):
                    outs = [outs] * int(p["inputs"])
                parties.append(Party(str(p["name"]), int(p["inputs"]), tuple(int(o) for o in outs)))
            sources = tuple(tuple(str(n) for n in s) for s in data["sources"])
            mode = data.get("mode", QUANTUM)
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"malformed scenario: {exc!r}") from exc
        scenario = cls(tuple(parties), sources, mode)
        errors = validate(scenario)
        if errors:
            raise ScenarioError("; ".join(errors))
        return scenario

    @classmethod
    def load(cls, path) -> "Scenario":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "parties": [{"name": p.name, "inputs": p.inputs, "outputs": list(p.outputs)}
                        for p in self.parties],
            "sources": [list(s) for s in self.sources],
            "mode": self.mode,
        }

    def with_mode(self, mode: str) -> "Scenario":
        return Scenario(self.parties, self.sources, mode)

    @property
    def names(self) -> list:
        return [p.name for p in self.parties]

    def party_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ScenarioError(f"unknown party {name!r}") from None

    @property
    def structure(self) -> IndependenceStructure:
        idx = {n: i for i, n in enumerate(self.names)}
        return IndependenceStructure(
            [[idx[n] for n in s] for s in self.sources], n_parties=len(self.parties))

    @property
    def inputs(self) -> tuple:
        return tuple(p.inputs for p in self.parties)

    @property
    def outputs(self) -> tuple:
        return tuple(max(p.outputs) for p in self.parties)


def validate(scenario: Scenario) -> list:
    """Every invariant violation of ``scenario``, as messages; empty when valid."""
    errors = []
    names = [p.name for p in scenario.parties]
    if not names:
        errors.append("scenario has no parties")
    if len(set(names)) != len(names):
        errors.append("party names are not unique")
    for p in scenario.parties:
        if p.inputs < 1:
            errors.append(f"party {p.name}: inputs < 1")
        if len(p.outputs) != p.inputs:
            errors.append(f"party {p.name}: {len(p.outputs)} output counts for {p.inputs} inputs")
        if any(o < 2 for o in p.outputs):
            errors.append(f"party {p.name}: outputs < 2")
    for s in scenario.sources:
        if not s:
            errors.append("empty source")
        for n in s:
            if n not in names:
                errors.append(f"source references undeclared party {n!r}")
    if scenario.mode not in MODES:
        errors.append(f"unknown mode {scenario.mode!r}")
    return errors


def letters(scenario: Scenario) -> list:
    """Operator letters: one observable per binary input, else outcomes-1 projectors."""
    out = []
    for i, p in enumerate(scenario.parties):
        for x in range(p.inputs):
            if p.outputs[x] == 2:
                out.append(Letter(i, x, -1))
            else:
                out.extend(Letter(i, x, o) for o in range(p.outputs[x] - 1))
    return out


def word_order(word):
    return (len(word), word)


def _closure(alphabet, max_len, mode):
    """All canonical non-zero words of length <= max_len over ``alphabet``."""
    found = {IDENTITY}
    frontier = {IDENTITY}
    for _ in range(max_len):
        nxt = set()
        for w in frontier:
            for l in alphabet:
                c = canonicalize(w + (l,), mode)
                if c is not None and c not in found:
                    nxt.add(c)
        found |= nxt
        frontier = {w for w in nxt if len(w) <= max_len}
    return {w for w in found if len(w) <= max_len}


def npa_words(scenario: Scenario, level: int) -> list:
    """Canonical words of length <= level, identity first, ordered by length then letters."""
    if level < 1:
        raise ScenarioError("NPA level must be >= 1")
    base = sorted(_closure(letters(scenario), level, QUANTUM), key=word_order)
    if scenario.mode == QUANTUM:
        return base
    out, seen = [], set()
    for w in base:
        c = canonicalize(w, CLASSICAL)
        if c is not None and c not in seen:
            seen.add(c)
            out.append(c)
    return sorted(out, key=word_order)


# -- word text syntax -------------------------------------------------------

def parse_word(text: str, scenario: Scenario) -> tuple:
    """Parse ``"A:0 A:1"`` / ``"C:0:1 C:1:0"`` / ``"1"`` into a canonical word."""
    tokens = text.split()
    if tokens == ["1"]:
        return IDENTITY
    if not tokens:
        raise ScenarioError("empty word text")
    raw = []
    for tok in tokens:
        parts = tok.split(":")
        if len(parts) not in (2, 3):
            raise ScenarioError(f"bad letter {tok!r}")
        pi = scenario.party_index(parts[0])
        party = scenario.parties[pi]
        try:
            x = int(parts[1])
            o = int(parts[2]) if len(parts) == 3 else -1
        except ValueError:
            raise ScenarioError(f"bad letter {tok!r}") from None
        if not 0 <= x < party.inputs:
            raise ScenarioError(f"{tok!r}: input out of range")
        n_out = party.outputs[x]
        if o < 0:
            if n_out != 2:
                raise ScenarioError(f"{tok!r}: observable syntax on a {n_out}-outcome input"
                                    " (projector letters need an outcome)")
        else:
            if n_out == 2:
                raise ScenarioError(f"{tok!r}: binary inputs use observable letters")
            if not o < n_out - 1:
                raise ScenarioError(f"{tok!r}: outcome {o} out of range"
                                    f" (last outcome {n_out - 1} is eliminated)")
        raw.append(Letter(pi, x, o))
    w = canonicalize(raw, scenario.mode)
    if w is None:
        raise ScenarioError(f"word {text!r} is zero")
    return w


def format_word(word, scenario: Scenario) -> str:
    if not word:
        return "1"
    names = scenario.names
    return " ".join(f"{names[l.party]}:{l.input}" if l.outcome < 0
                    else f"{names[l.party]}:{l.input}:{l.outcome}" for l in word)


def format_key(key, scenario: Scenario) -> str:
    if not key:
        return "1"
    return "".join(f"<{format_word(w, scenario)}>" for w in key)


# -- generating sets ----------------------------------------------------------

class ExtendedGenerator(NamedTuple):
    word: tuple
    tags: tuple = ()


@dataclass
class LevelSpec:
    npa_level: int = 1
    extra_words: list = field(default_factory=list)
    scalar_symbols: list = field(default_factory=list)
    presets: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: dict) -> "LevelSpec":
        unknown = set(data) - {"npa_level", "extra_words", "scalar_symbols", "presets"}
        if unknown:
            raise ScenarioError(f"unknown level-spec fields {sorted(unknown)}")
        spec = cls(int(data.get("npa_level", 1)), list(data.get("extra_words", [])),
                   list(data.get("scalar_symbols", [])), list(data.get("presets", [])))
        if spec.npa_level < 1:
            raise ScenarioError("npa_level must be >= 1")
        return spec

    @classmethod
    def load(cls, path) -> "LevelSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {"npa_level": self.npa_level, "extra_words": list(self.extra_words),
                "scalar_symbols": list(self.scalar_symbols), "presets": list(self.presets)}


def a_words(scenario: Scenario, party: str, min_len: int, max_len: int) -> list:
    """All canonical words over one party's letters with length in [min_len, max_len]."""
    pi = scenario.party_index(party)
    alphabet = [l for l in letters(scenario) if l.party == pi]
    words = _closure(alphabet, max_len, scenario.mode)
    return sorted((w for w in words if min_len <= len(w) <= max_len and w), key=word_order)


def outcome_pairs(scenario: Scenario, party: str) -> list:
    """Products ``Π_{c1|0} Π_{c2|1}`` over the non-eliminated outcomes of inputs 0 and 1."""
    pi = scenario.party_index(party)
    p = scenario.parties[pi]
    if p.inputs < 2 or p.outputs[0] == 2 or p.outputs[1] == 2:
        raise ScenarioError(f"outcome_pairs needs two projector-type inputs on party {party}")
    out = []
    for c1 in range(p.outputs[0] - 1):
        for c2 in range(p.outputs[1] - 1):
            w = canonicalize([Letter(pi, 0, c1), Letter(pi, 1, c2)], scenario.mode)
            out.append(w)
    return out


def symbol_words(scenario: Scenario, spec: LevelSpec) -> list:
    """Scalar-extension symbols requested by ``spec``, deduplicated in order."""
    words = [parse_word(t, scenario) for t in spec.scalar_symbols]
    for preset in spec.presets:
        if "a_words" in preset:
            a = preset["a_words"]
            words += a_words(scenario, a["party"], int(a["min"]), int(a["max"]))
        elif "outcome_pairs" in preset:
            words += outcome_pairs(scenario, preset["outcome_pairs"])
        else:
            raise ScenarioError(f"unknown preset {preset!r}")
    out, seen = [], set()
    for w in words:
        if not w:
            raise ScenarioError("scalar symbol reduces to the identity")
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def extend_with_scalars(generators, symbols, scenario: Scenario) -> list:
    """Base generators (no tags) followed by one ``<S> 1`` generator per symbol."""
    structure = scenario.structure
    out = [ExtendedGenerator(tuple(w), ()) for w in generators]
    seen = set()
    for s in symbols:
        if s is None:
            raise ScenarioError("scalar symbol reduces to zero")
        if not s:
            raise ScenarioError("scalar symbol reduces to the identity")
        if s in seen:
            continue
        seen.add(s)
        out.append(ExtendedGenerator(IDENTITY, tuple(split_symbols([s], structure))))
    return out


def build_generators(scenario: Scenario, spec: LevelSpec) -> list:
    """Full extended generating set for a scenario and level spec."""
    base = npa_words(scenario, spec.npa_level)
    seen = set(base)
    for t in spec.extra_words:
        w = parse_word(t, scenario)
        if w not in seen:
            seen.add(w)
            base.append(w)
    return extend_with_scalars(base, symbol_words(scenario, spec), scenario)
