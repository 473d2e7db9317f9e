"""Noncommutative measurement-operator algebra.

Letters are ``(party, input, outcome)`` triples of integers; ``outcome == -1``
marks a dichotomic observable ``Π_0 - Π_1``. A word is a tuple of letters,
the empty tuple being the identity. Canonical words are what every other
module hashes and compares, so all constructors go through
:func:`canonicalize`.

Expectation symbols are canonical words; a product of expectations is a
sorted tuple of symbols (a *key*). Conjugating an expectation replaces the
word by its adjoint.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Optional, Sequence

try:
    from netsdp._ckernels import reduce_word as _reduce_word
    HAVE_EXTENSION = True
except ImportError:  # pragma: no cover - depends on build
    from netsdp._kernels_py import reduce_word as _reduce_word
    HAVE_EXTENSION = False

QUANTUM = "quantum"
CLASSICAL = "classical"
MODES = (QUANTUM, CLASSICAL)

IDENTITY: tuple = ()


class Letter(NamedTuple):
    party: int
    input: int
    outcome: int = -1

    @property
    def is_observable(self) -> bool:
        return self.outcome < 0


Word = tuple  # tuple[Letter, ...]
Key = tuple  # tuple[Word, ...], sorted


def _check_mode(mode: str) -> bool:
    if mode not in MODES:
        raise ValueError(f"unknown algebra mode {mode!r}")
    return mode == CLASSICAL


def canonicalize(word: Iterable, mode: str = QUANTUM) -> Optional[Word]:
    """Reduce a word to canonical form; ``None`` stands for the zero operator.

    Rules: letters of different parties commute and are grouped in party
    order; ``Π Π -> Π``; ``Π_o Π_o' -> 0`` on the same input; ``O O -> 1``.
    In classical mode all letters commute and are sorted within a party.
    """
    classical = _check_mode(mode)
    reduced = _reduce_word(tuple(tuple(l) for l in word), classical)
    if reduced is None:
        return None
    return tuple(Letter(*l) for l in reduced)


def adjoint(word: Word, mode: str = QUANTUM) -> Word:
    """Adjoint of a canonical word (letters are Hermitian, so just reversal)."""
    out = canonicalize(reversed(word), mode)
    # reversal of a non-zero canonical word cannot vanish
    assert out is not None
    return out


def concat(w1: Word, w2: Word, mode: str = QUANTUM) -> Optional[Word]:
    return canonicalize(tuple(w1) + tuple(w2), mode)


class IndependenceStructure:
    """Sources of a network, each a set of party indices it feeds."""

    def __init__(self, sources: Iterable[Iterable[int]], n_parties: Optional[int] = None):
        self.sources = tuple(frozenset(s) for s in sources)
        if any(not s for s in self.sources):
            raise ValueError("sources must be non-empty")
        covered = set().union(*self.sources) if self.sources else set()
        if n_parties is not None:
            missing = set(range(n_parties)) - covered
            # isolated parties get a private source
            self.sources += tuple(frozenset([p]) for p in sorted(missing))
            covered |= missing
        self.parties = frozenset(covered)
        self._neighbours = {p: set() for p in covered}
        for s in self.sources:
            for p in s:
                self._neighbours[p] |= s

    def __repr__(self):
        return f"IndependenceStructure({[sorted(s) for s in self.sources]})"

    def components(self, parties: Iterable[int]) -> list:
        """Connected components (sorted party lists) of the induced subgraph."""
        todo = sorted(set(parties))
        for p in todo:
            if p not in self._neighbours:
                raise ValueError(f"party {p} is not part of the independence structure")
        present = set(todo)
        seen = set()
        comps = []
        for p in todo:
            if p in seen:
                continue
            comp, stack = [], [p]
            seen.add(p)
            while stack:
                q = stack.pop()
                comp.append(q)
                for r in self._neighbours[q]:
                    if r in present and r not in seen:
                        seen.add(r)
                        stack.append(r)
            comps.append(sorted(comp))
        comps.sort()
        return comps


def independence_components(word: Word, structure: IndependenceStructure) -> list:
    """Split a canonical word into sub-words whose expectations factorize."""
    if not word:
        return [IDENTITY]
    comps = structure.components(l.party for l in word)
    if len(comps) == 1:
        return [tuple(word)]
    out = []
    for comp in comps:
        members = set(comp)
        out.append(tuple(l for l in word if l.party in members))
    return out


def split_symbols(words: Iterable[Word], structure: IndependenceStructure) -> list:
    """Factorize every word and drop identities."""
    out = []
    for w in words:
        for sub in independence_components(w, structure):
            if sub:
                out.append(sub)
    return out


def flip_key(key: Sequence[Word], mode: str = QUANTUM) -> Key:
    """Elementwise adjoint of a symbol multiset (complex conjugation)."""
    return tuple(sorted(adjoint(w, mode) for w in key))


def key_class(symbols: Iterable[Word], mode: str = QUANTUM) -> Key:
    """Representative of ``{K, K^dagger}``: the smaller of the two sorted tuples."""
    key = tuple(sorted(symbols))
    flipped = flip_key(key, mode)
    return min(key, flipped)


def canonical_entry_key(row, col, mode: str, structure: IndependenceStructure) -> Optional[Key]:
    """Key of the moment-matrix entry ``<row^dagger col>`` between extended generators.

    ``row`` and ``col`` carry ``.word`` and ``.tags`` (a tuple of symbol words).
    Row tags enter conjugated. Returns ``None`` for a structural zero.
    """
    w = concat(adjoint(row.word, mode), col.word, mode)
    if w is None:
        return None
    symbols = split_symbols([w], structure)
    symbols += split_symbols((adjoint(t, mode) for t in row.tags), structure)
    symbols += split_symbols(col.tags, structure)
    return key_class(symbols, mode)


def uses_one_input_per_party(word: Word) -> bool:
    seen = {}
    for l in word:
        if seen.setdefault(l.party, l.input) != l.input:
            return False
    return True
