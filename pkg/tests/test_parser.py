"""Grammar coverage, positioned errors, canonical round trips, lint."""

from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmsim.core import Multiset, Rule, RuleForm, structurally_equal
from mmsim.parser import KEYWORDS, Model, ParseError, lint, parse_model, rule_text, serialize_model

CORPUS = Path(__file__).parent / "corpus"


class TestParse:
    def test_membrane_with_child(self):
        model = parse_model("[skin: [T: c*10] ]")
        skin = model.config.skin
        assert skin.label == "skin" and not skin.contents
        (child,) = skin.children
        assert child.label == "T" and child.contents == Multiset({"c": 10})

    def test_rule_over_empty_skin(self):
        model = parse_model("[skin: ] rule r1: in skin: a -> b")
        assert len(model.rules) == 1
        rule = model.rules[0]
        assert rule.form is RuleForm.REWRITE and rule.subject == "skin"

    def test_zero_count_rejected(self):
        with pytest.raises(ParseError) as err:
            parse_model("[skin: c*0]")
        assert err.value.line == 1

    def test_preorder_ids_from_zero(self):
        model = parse_model("[skin: [a: [b: ]] [c: ]]")
        ids = {m.label: m.id for m in model.config.by_id.values()}
        assert ids == {"skin": 0, "a": 1, "b": 2, "c": 3}

    def test_bare_symbol_means_one(self):
        model = parse_model("[skin: a, b*2, a]")
        assert model.config.skin.contents == Multiset({"a": 2, "b": 2})

    def test_all_rule_forms(self):
        text = """
        [skin: [V: ] [T: ]]
        rule a: in T: x -> y
        rule b: endo V into T: x -> ()
        rule c: exo V from T: x*2 -> x
        rule d: send-in V: x -> y if p
        rule e: send-out V: x, y -> z if p*2, q
        """
        model = parse_model(text)
        forms = [r.form for r in model.rules]
        assert forms == [RuleForm.REWRITE, RuleForm.ENDO, RuleForm.EXO,
                         RuleForm.SEND_IN, RuleForm.SEND_OUT]
        assert model.rules[1].produced == Multiset()
        assert model.rules[3].promoter == Multiset({"p": 1})
        assert model.rules[4].promoter == Multiset({"p": 2, "q": 1})

    def test_comments_and_whitespace_insignificant(self):
        a = parse_model("[skin:a*2,b[T:c]]rule r:in T:c->d")
        b = parse_model("# hi\n[skin: a*2, b\n  [T: c]  # inner\n]\nrule r: in T: c -> d\n")
        assert serialize_model(a) == serialize_model(b)

    def test_keyword_cannot_label_membrane(self):
        with pytest.raises(ParseError):
            parse_model("[from: x]")

    def test_duplicate_rule_id_positioned(self):
        with pytest.raises(ParseError) as err:
            parse_model("[skin: ]\nrule r: in skin: a -> b\nrule r: in skin: b -> a\n")
        assert err.value.line == 3

    def test_invalid_utf8_is_positioned_error(self):
        with pytest.raises(ParseError):
            parse_model(b"[skin: ]\n\xff\xfe")

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_model("[skin: ] 17")


class TestSerialize:
    def test_empty_skin(self):
        model = parse_model("[skin: ]")
        assert serialize_model(model) == "[skin: ]\n"

    def test_lexicographic_contents(self):
        model = parse_model("[skin: b, a*2]")
        assert serialize_model(model) == "[skin: a*2, b]\n"

    def test_rule_text_promoter(self):
        (rule,) = parse_model("[skin: ] rule w: send-in skin: a -> () if p").rules
        assert rule_text(rule) == "rule w: send-in skin: a -> () if p"

    def test_corpus_round_trip(self, corpus_valid):
        for path in corpus_valid:
            first = parse_model(path.read_bytes())
            text = serialize_model(first)
            second = parse_model(text)
            assert structurally_equal(first.config, second.config), path.name
            assert first.rules == second.rules, path.name
            assert serialize_model(second) == text, path.name

    def test_corpus_error_lines(self, corpus_invalid):
        expected_lines = {
            "zero_count.mm": 3,
            "unclosed.mm": 3,
            "bad_token.mm": 1,
            "dup_rule.mm": 3,
            "missing_arrow.mm": 2,
            "empty.mm": 1,
            "keyword_label.mm": 1,
        }
        assert {p.name for p in corpus_invalid} == set(expected_lines)
        for path in corpus_invalid:
            with pytest.raises(ParseError) as err:
                parse_model(path.read_bytes())
            assert err.value.line == expected_lines[path.name], path.name


# Random structurally valid models, for the round-trip law.
names = st.from_regex(r"_?[a-zA-Z][a-zA-Z0-9_]{0,4}", fullmatch=True).filter(
    lambda s: s not in KEYWORDS)
contents = st.dictionaries(names, st.integers(1, 9), max_size=3).map(Multiset)
trees = st.recursive(
    st.tuples(names, contents, st.just(())),
    lambda kids: st.tuples(names, contents, st.lists(kids, max_size=3).map(tuple)),
    max_leaves=5,
)


@st.composite
def models(draw) -> Model:
    from mmsim.core import build_configuration

    config = build_configuration(draw(trees))
    forms = draw(st.lists(st.sampled_from(list(RuleForm)), max_size=4))
    rules = []
    for i, form in enumerate(forms):
        host = draw(names) if form in (RuleForm.ENDO, RuleForm.EXO) else None
        promoter = draw(st.one_of(st.none(), contents.filter(bool)))
        rules.append(Rule(f"r{i}", form, draw(names),
                          draw(contents.filter(bool)), draw(contents),
                          host=host, promoter=promoter))
    return Model(config, tuple(rules))


@settings(max_examples=60, deadline=None)
@given(models())
def test_random_model_round_trip(model):
    text = serialize_model(model)
    back = parse_model(text)
    assert structurally_equal(model.config, back.config)
    assert back.rules == model.rules
    assert serialize_model(back) == text


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=60))
def test_fuzz_bytes_never_crash(data):
    try:
        model = parse_model(data)
    except ParseError as err:
        assert err.line >= 1 and err.column >= 1
    else:
        assert isinstance(model, Model)


class TestLint:
    def test_bone_model_is_clean(self):
        from mmsim.bone import BoneParams, build_bone_model

        assert lint(build_bone_model(BoneParams(oc=3, ob=1, cycles=2, units=2))) == []

    def test_self_entry_warning(self):
        model = parse_model("[skin: [V: p]] rule x: endo V into V: p -> p")
        assert any(w.startswith("self-entry") for w in lint(model))

    def test_absent_label_warning(self):
        model = parse_model("[skin: ] rule x: in Q: a -> a")
        assert any(w.startswith("absent-label") for w in lint(model))

    def test_dead_symbol_warning(self):
        model = parse_model("[skin: x] rule s: in skin: x -> z")
        warnings = lint(model)
        assert any(w.startswith("dead-symbol") and "'z'" in w for w in warnings)

    def test_warn_fixture_has_all_three(self):
        model = parse_model((CORPUS / "valid" / "warn.mm").read_bytes())
        codes = {w.split(":")[0] for w in lint(model)}
        assert codes == {"absent-label", "self-entry", "dead-symbol"}
