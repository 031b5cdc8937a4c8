import httpx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aqg.corpus import Document
from aqg.errors import BackendError, CorpusError, PatternError
from aqg.postag import (
    HttpTagger,
    PosTag,
    Quant,
    RuleTagger,
    build_matrix,
    default_lexicon,
    load_lexicon,
    match_candidates,
    parse_pattern,
    rule_tag,
)
from aqg.textnorm import Token, TokenKind, tokenize

from oracles import oracle_matches

TAG_NAMES = [t.name for t in PosTag]


def tags_of(text: str) -> list[PosTag]:
    return [tag for _, tag in rule_tag(tokenize(text), default_lexicon())]


class TestRuleTag:
    def test_pron_noun_adj(self):
        assert tags_of("هي العناصر الأساسية") == [PosTag.PRON, PosTag.NOUN, PosTag.ADJ]

    def test_bare_adjective_stays_noun(self):
        assert tags_of("عناصر أساسية") == [PosTag.NOUN, PosTag.NOUN]

    def test_punct(self):
        assert tags_of("؟") == [PosTag.PUNCT]

    def test_num_kind(self):
        assert tags_of("92") == [PosTag.NUM]

    def test_lexicon_beats_al_heuristic(self):
        # relative pronoun starts with "ال" but is a lexicon hit
        assert tags_of("الكتاب الذي") == [PosTag.NOUN, PosTag.PRON]

    def test_al_after_punct_looks_through(self):
        # PUNCT is skipped when looking back for the previous tag
        assert tags_of("الدم ، الاحمر") == [PosTag.NOUN, PosTag.PUNCT, PosTag.ADJ]

    def test_deterministic(self):
        tokens = tokenize("في الدم خلايا حمراء والدم سائل")
        first = rule_tag(tokens, default_lexicon())
        second = rule_tag(tokens, default_lexicon())
        assert first == second


class TestLexicon:
    def test_default_has_closed_classes(self):
        lex = default_lexicon()
        assert lex["في"] is PosTag.PART
        assert lex["هي"] is PosTag.PRON
        assert len(lex) >= 60

    def test_load_rejects_bad_tag(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("في\tNOUN\n", encoding="utf-8")
        with pytest.raises(CorpusError):
            load_lexicon(path)

    def test_load_rejects_bad_format(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("في PART\n", encoding="utf-8")
        with pytest.raises(CorpusError):
            load_lexicon(path)


class TestParsePattern:
    def test_noun_plus_adj_star(self):
        pattern = parse_pattern("NOUN+ ADJ*")
        assert [(t.tag, t.quant) for t in pattern.terms] == [
            (PosTag.NOUN, Quant.PLUS),
            (PosTag.ADJ, Quant.STAR),
        ]

    def test_adj_star_noun_plus(self):
        pattern = parse_pattern("ADJ* NOUN+")
        assert [(t.tag, t.quant) for t in pattern.terms] == [
            (PosTag.ADJ, Quant.STAR),
            (PosTag.NOUN, Quant.PLUS),
        ]

    def test_wildcard_and_opt(self):
        pattern = parse_pattern(". NOUN?")
        assert pattern.terms[0].tag is None
        assert pattern.terms[1].quant is Quant.OPT

    def test_unknown_tag(self):
        with pytest.raises(PatternError, match="FOO"):
            parse_pattern("FOO+")

    def test_empty_pattern(self):
        with pytest.raises(PatternError, match="empty"):
            parse_pattern("   ")

    def test_dangling_quantifier(self):
        with pytest.raises(PatternError, match="dangling"):
            parse_pattern("NOUN +")

    def test_canonical_round_trip(self):
        for source in ("NOUN+ ADJ*", "ADJ*  NOUN+", ". NOUN? NUM"):
            pattern = parse_pattern(source)
            again = parse_pattern(pattern.canonical())
            assert again.terms == pattern.terms
            assert again.canonical() == pattern.canonical()


def _tagged(names: list[str]) -> list[tuple[Token, PosTag]]:
    tokens = [Token(f"t{i}", f"t{i}", i * 3, i * 3 + 2, TokenKind.WORD) for i in range(len(names))]
    return [(tok, PosTag[name]) for tok, name in zip(tokens, names)]


class TestMatchCandidates:
    def test_noun_adj_phrase(self):
        tagged = rule_tag(tokenize("هي العناصر الأساسية"), default_lexicon())
        cands = match_candidates(tagged, [parse_pattern("NOUN+ ADJ*")])
        assert len(cands) == 1
        assert cands[0].text == "العناصر الاساسية"
        assert cands[0].token_span == (1, 2)

    def test_no_nouns_no_candidates(self):
        tagged = _tagged(["PART", "PART", "PART"])
        assert match_candidates(tagged, [parse_pattern("NOUN+ ADJ*")]) == []

    def test_greedy_maximal_run(self):
        tagged = _tagged(["NOUN", "NOUN", "NOUN"])
        cands = match_candidates(tagged, [parse_pattern("NOUN+")])
        assert len(cands) == 1
        assert cands[0].token_span == (0, 2)

    def test_matches_never_overlap(self):
        tagged = _tagged(["NOUN", "ADJ", "NOUN", "NOUN", "PART", "NOUN"])
        cands = match_candidates(tagged, [parse_pattern("NOUN+ ADJ*")])
        spans = [c.token_span for c in cands]
        for (_, end), (start, _) in zip(spans, spans[1:]):
            assert end < start

    def test_pattern_order_breaks_length_ties(self):
        # both patterns match the same longest span; output is one candidate
        tagged = _tagged(["NOUN", "NOUN"])
        cands = match_candidates(
            tagged, [parse_pattern("NOUN+"), parse_pattern("NOUN NOUN")]
        )
        assert [c.token_span for c in cands] == [(0, 1)]

    @given(
        st.lists(st.sampled_from(TAG_NAMES), max_size=12),
        st.lists(
            st.sampled_from(
                ["NOUN+ ADJ*", "ADJ* NOUN+", "NOUN+", ". NOUN?", "NOUN .? ADJ+", "X* NUM"]
            ),
            min_size=1,
            max_size=3,
        ),
    )
    def test_matches_equal_regex_oracle(self, names, sources):
        tagged = _tagged(names)
        got = match_candidates(tagged, [parse_pattern(s) for s in sources])
        spans = [(c.token_span[0], c.token_span[1] + 1) for c in got]
        assert spans == oracle_matches(names, sources)


class TestBuildMatrix:
    PATTERNS = [parse_pattern("NOUN+ ADJ*")]

    def test_phrase_counted_per_document(self):
        docs = [
            Document("d1", "t", "s", "في الدم ، من الدم"),
            Document("d2", "t", "s", "عن الدم ثم إلى الدم"),
        ]
        matrix = build_matrix(docs, self.PATTERNS, RuleTagger())
        col = matrix.phrases.index("الدم")
        assert [row[col] for row in matrix.counts] == [2, 2]

    def test_no_matches_anywhere(self):
        docs = [Document("d1", "t", "s", "في من إلى"), Document("d2", "t", "s", "هل ثم")]
        matrix = build_matrix(docs, self.PATTERNS, RuleTagger())
        assert matrix.phrases == []
        assert matrix.counts == [[], []]

    def test_row_sum_equals_match_count(self):
        doc = Document("d1", "t", "s", "ينقل الدم الغذاء إلى الخلايا الحمراء")
        matrix = build_matrix([doc], self.PATTERNS, RuleTagger())
        tagged = RuleTagger().tag(tokenize(doc.text))
        assert sum(matrix.counts[0]) == len(match_candidates(tagged, self.PATTERNS))

    def test_phrases_ordered_by_first_appearance(self):
        docs = [
            Document("d1", "t", "s", "في الدم"),
            Document("d2", "t", "s", "في خلية ، في الدم"),
        ]
        matrix = build_matrix(docs, self.PATTERNS, RuleTagger())
        assert matrix.phrases == ["الدم", "خلية"]

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            build_matrix([], self.PATTERNS, RuleTagger())


class TestHttpTagger:
    def _client(self, handler):
        return httpx.Client(transport=httpx.MockTransport(handler))

    def test_round_trip(self):
        def handler(request):
            import json

            tokens = json.loads(request.content)["tokens"]
            return httpx.Response(200, json={"tags": ["NOUN"] * len(tokens)})

        tagger = HttpTagger("http://tagger.test", client=self._client(handler))
        tagged = tagger.tag(tokenize("الدم سائل"))
        assert [tag for _, tag in tagged] == [PosTag.NOUN, PosTag.NOUN]

    def test_count_mismatch(self):
        def handler(request):
            return httpx.Response(200, json={"tags": ["NOUN"]})

        tagger = HttpTagger("http://tagger.test", client=self._client(handler))
        with pytest.raises(BackendError):
            tagger.tag(tokenize("الدم سائل"))

    def test_unknown_tag_rejected(self):
        def handler(request):
            return httpx.Response(200, json={"tags": ["NOUN", "GERUND"]})

        tagger = HttpTagger("http://tagger.test", client=self._client(handler))
        with pytest.raises(BackendError, match="GERUND"):
            tagger.tag(tokenize("الدم سائل"))
