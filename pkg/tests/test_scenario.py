import pytest
from hypothesis import given
from hypothesis import strategies as st

from netsdp.algebra import IDENTITY, Letter, canonicalize
from netsdp.scenario import (
    LevelSpec,
    Scenario,
    ScenarioError,
    a_words,
    build_generators,
    extend_with_scalars,
    format_word,
    letters,
    npa_words,
    outcome_pairs,
    parse_word,
    symbol_words,
    validate,
)

from conftest import EFFICIENCY, LINE
from oracles import brute_force_npa


def test_validate_ok(line):
    assert validate(line) == []


def test_validate_reports_every_problem():
    bad = Scenario(
        parties=(Scenario.from_dict(LINE).parties[0],
                 type(Scenario.from_dict(LINE).parties[0])("B", 1, (1,))),
        sources=(("A", "Q"),),
    )
    errors = validate(bad)
    assert any("outputs < 2" in e for e in errors)
    assert any("undeclared" in e for e in errors)
    with pytest.raises(ScenarioError):
        Scenario.from_dict({**LINE, "sources": [["A", "Z"]]})


def test_letters(line, efficiency):
    assert len(letters(line)) == 6
    assert all(l.outcome == -1 for l in letters(line))
    eff = letters(efficiency)
    assert len(eff) == 11
    assert [sum(l.party == p for l in eff) for p in range(3)] == [4, 3, 4]
    one = Scenario.from_dict({"parties": [{"name": "A", "inputs": 1, "outputs": [2]}],
                              "sources": [["A"]]})
    assert letters(one) == [Letter(0, 0, -1)]


def test_npa_word_counts(line, line_classical):
    lvl1 = npa_words(line, 1)
    assert len(lvl1) == 7 and lvl1[0] == IDENTITY
    assert len(npa_words(line, 2)) == 25
    assert len(npa_words(line_classical, 2)) == 22


@pytest.mark.parametrize("data", [LINE, {**LINE, "mode": "classical"}, EFFICIENCY,
                                  {**EFFICIENCY, "mode": "quantum"}])
@pytest.mark.parametrize("level", [1, 2, 3])
def test_npa_words_match_brute_force(data, level):
    sc = Scenario.from_dict(data)
    got = npa_words(sc, level)
    assert len(set(got)) == len(got)
    if len(letters(sc)) ** level > 2000:
        pytest.skip("brute force too large")
    want = brute_force_npa(letters(sc), level, lambda w: canonicalize(w, sc.mode))
    assert set(got) == want


@pytest.mark.parametrize("data", [LINE, {**LINE, "mode": "classical"}, EFFICIENCY])
def test_npa_levels_nested(data):
    sc = Scenario.from_dict(data)
    for lvl in (1, 2, 3):
        assert set(npa_words(sc, lvl)) <= set(npa_words(sc, lvl + 1))


def test_a_words_preset(line, line_classical):
    words = a_words(line, "A", 2, 5)
    assert len(words) == 8
    assert {len(w) for w in words} == {2, 3, 4, 5}
    assert len(a_words(line_classical, "A", 2, 5)) == 1


def test_outcome_pairs(efficiency, line):
    pairs = outcome_pairs(efficiency, "C")
    assert len(pairs) == 4
    assert all(len(w) == 2 and w[0].input == 0 and w[1].input == 1 for w in pairs)
    with pytest.raises(ScenarioError):
        outcome_pairs(line, "C")


def test_extend_with_scalars_tagged(line):
    base = [IDENTITY, parse_word("A:0 A:1", line), parse_word("C:0 C:1", line)]
    gens = extend_with_scalars(base, [parse_word("A:0 A:1", line)] * 2, line)
    assert len(gens) == 4
    assert gens[3].word == IDENTITY and gens[3].tags == (parse_word("A:0 A:1", line),)


def test_extend_rejects_identity_symbol(line):
    with pytest.raises(ScenarioError):
        extend_with_scalars([IDENTITY], [IDENTITY], line)
    with pytest.raises(ScenarioError):
        symbol_words(line, LevelSpec(1, scalar_symbols=["A:0 A:0"]))


def test_generators_start_with_identity(line, efficiency):
    for sc, spec in [(line, LevelSpec(2, scalar_symbols=["A:0 A:1"])),
                     (efficiency, LevelSpec(1, presets=[{"outcome_pairs": "C"}]))]:
        gens = build_generators(sc, spec)
        assert gens[0].word == IDENTITY and gens[0].tags == ()


def test_parse_word(line, efficiency):
    assert parse_word("A:0 A:1", line) == (Letter(0, 0), Letter(0, 1))
    assert parse_word("1", line) == IDENTITY
    with pytest.raises(ScenarioError):
        parse_word("C:0:2", efficiency)
    for bad in ["Q:0", "A:2", "A:0:0", "C:0", "A:x"]:
        with pytest.raises(ScenarioError):
            parse_word(bad, line if bad != "C:0" else efficiency)


@given(st.lists(st.sampled_from(["A:0", "A:1", "B:0", "B:1", "C:0", "C:1"]), max_size=6))
def test_word_text_round_trip(tokens):
    line = Scenario.from_dict(LINE)
    text = " ".join(tokens) or "1"
    w = parse_word(text, line)
    assert parse_word(format_word(w, line), line) == w
    assert format_word(parse_word(format_word(w, line), line), line) == format_word(w, line)


def test_level_spec_json_round_trip():
    spec = LevelSpec.from_dict({"npa_level": 3, "extra_words": ["A:0 B:0"],
                                "scalar_symbols": ["A:0 A:1"],
                                "presets": [{"a_words": {"party": "A", "min": 2, "max": 5}},
                                            {"outcome_pairs": "C"}]})
    assert LevelSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(ScenarioError):
        LevelSpec.from_dict({"npa_level": 0})
