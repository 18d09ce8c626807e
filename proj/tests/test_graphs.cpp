#include "pqgcn/graphs.hpp"

#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"

using namespace pqgcn;
using namespace pqgcn::graphs;

namespace {

corpus::Corpus two_question_corpus() {
    corpus::Corpus c;
    c.labels.add_or_get("A");
    c.labels.add_or_get("B");
    c.questions.push_back(corpus::make_question(0, "discuss the main objective today", 0));
    c.questions.push_back(corpus::make_question(1, "the main objective is good", 1));
    return c;
}

}  // namespace

TEST_CASE("build_word_graph matches the ppmi oracle and keeps corpus order") {
    corpus::Corpus c = two_question_corpus();
    ViewGraph g = build_word_graph(c, 5, nullptr);
    CHECK(g.vocab[0] == "discuss");
    CHECK(g.vocab[1] == "the");

    auto oracle = testutil::oracle_ppmi(word_sequences(c), 5);
    REQUIRE(g.edges.size() == oracle.size());
    for (size_t k = 0; k < g.edges.size(); ++k) {
        CHECK(g.vocab[static_cast<size_t>(g.edges[k].i)] == oracle[k].a);
        CHECK(g.vocab[static_cast<size_t>(g.edges[k].j)] == oracle[k].b);
        CHECK(g.edges[k].v == doctest::Approx(oracle[k].w).epsilon(1e-12));
        CHECK(g.edges[k].v > 0);
    }
    CHECK(!g.pretrained.has_value());
}

TEST_CASE("phrase and phrase-pos vocabularies from the worked example") {
    corpus::Corpus c = two_question_corpus();
    nlp::HeuristicTagger tagger;
    nlp::PatternSet jn;
    jn.entries.push_back({nlp::PhraseKind::NounPhrase, nlp::TagRegex::compile("JN")});

    ViewGraph phrase = build_phrase_graph(c, tagger, jn, nullptr, nullptr);
    REQUIRE(phrase.vocab.size() == 1);
    CHECK(phrase.vocab[0] == "main objective");

    ViewGraph ppos = build_phrase_pos_graph(c, tagger, jn);
    REQUIRE(ppos.vocab.size() == 1);
    CHECK(ppos.vocab[0] == "ADJ_NOUN");
}

TEST_CASE("empty view vocabulary raises the documented error") {
    corpus::Corpus c;
    c.labels.add_or_get("A");
    c.questions.push_back(corpus::make_question(0, "the of and", 0));
    nlp::HeuristicTagger tagger;
    nlp::PatternSet jn;
    jn.entries.push_back({nlp::PhraseKind::NounPhrase, nlp::TagRegex::compile("JN")});
    CHECK_THROWS_WITH_AS(build_phrase_graph(c, tagger, jn, nullptr, nullptr),
                         doctest::Contains("disable"), std::runtime_error);
}

TEST_CASE("entity graph weights are clamped cosines") {
    corpus::Corpus c;
    c.labels.add_or_get("A");
    c.questions.push_back(corpus::make_question(0, "tell me about alpha and beta corp", 0));
    c.questions.push_back(corpus::make_question(1, "alpha against gamma llc", 0));
    c.questions.push_back(corpus::make_question(2, "ghost entity here", 0));

    nlp::EntityLexicon lex;
    lex.add("alpha");
    lex.add("beta corp");
    lex.add("gamma llc");
    lex.add("ghost entity");

    emb::EmbeddingTable vec;
    vec.kind = emb::TableKind::Entity;
    vec.dim = 2;
    vec.vectors["alpha"] = {1, 0};
    vec.vectors["beta corp"] = {1, 1};
    vec.vectors["gamma llc"] = {-1, 0};  // negative cosine with alpha -> clamped away
    // "ghost entity" deliberately missing

    ViewGraph g = build_entity_graph(c, lex, vec);
    CHECK(g.vocab == std::vector<std::string>{"alpha", "beta corp", "gamma llc"});
    REQUIRE(g.pretrained.has_value());
    CHECK(g.pretrained->rows() == 3);

    // expected edges: (alpha, beta) = cos = 1/sqrt(2); (beta, gamma) = -1/sqrt(2) clamped;
    // (alpha, gamma) = -1 clamped
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].i == 0);
    CHECK(g.edges[0].j == 1);
    CHECK(g.edges[0].v == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    // identical vectors give weight 1
    emb::EmbeddingTable same;
    same.dim = 2;
    same.vectors["alpha"] = {2, 1};
    same.vectors["beta corp"] = {2, 1};
    same.vectors["gamma llc"] = {0.5, -3};
    ViewGraph g2 = build_entity_graph(c, lex, same);
    CHECK(g2.edges[0].v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("incidence rows are count-normalized") {
    std::vector<std::vector<std::string>> seqs = {{"a", "b", "a"}, {}, {"b"}};
    IncidenceMatrix inc = build_incidence(seqs, {"a", "b"});
    nn::Tensor d = inc.to_dense();
    CHECK(d.at(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(d.at(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(d.at(1, 0) == 0.0);  // empty question: zero row
    CHECK(d.at(1, 1) == 0.0);
    CHECK(d.at(2, 1) == 1.0);

    // nonzero rows sum to 1
    for (int r = 0; r < d.rows(); ++r) {
        double sum = 0;
        for (int c = 0; c < d.cols(); ++c) sum += d.at(r, c);
        if (sum != 0.0) CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("normalize_adjacency") {
    ViewGraph single;
    single.view = ViewKind::Word;
    single.vocab = {"only"};
    nn::Tensor d1 = normalize_adjacency(single).to_dense();
    CHECK(d1.at(0, 0) == 1.0);

    ViewGraph pair;
    pair.view = ViewKind::Word;
    pair.vocab = {"a", "b"};
    pair.edges = {{0, 1, 1.0}};
    nn::Tensor d2 = normalize_adjacency(pair).to_dense();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) CHECK(d2.at(i, j) == doctest::Approx(0.5).epsilon(1e-15));
    }

    ViewGraph mixed;
    mixed.view = ViewKind::Word;
    mixed.vocab = {"a", "b", "iso"};
    mixed.edges = {{0, 1, 2.0}};
    nn::Tensor d3 = normalize_adjacency(mixed).to_dense();
    CHECK(d3.at(2, 2) == 1.0);  // isolated node row = e_i
    CHECK(d3.at(2, 0) == 0.0);
    CHECK(d3.at(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(d3.at(0, 1) == d3.at(1, 0));
}

TEST_CASE("bundle build, save, load round-trip and byte-identical re-save") {
    testutil::TempDir dir("pqgcn-bundle");
    testutil::write_toy_fixtures(dir);

    corpus::Corpus c = corpus::load_corpus(dir.file("corpus.tsv"), corpus::CorpusFormat::Tsv);
    corpus::DatasetSplit split = corpus::split_corpus(c.questions, 0.34, 11);

    nlp::HeuristicTagger tagger;
    nlp::PatternSet patterns = nlp::PatternSet::defaults();
    nlp::EntityLexicon lexicon = nlp::EntityLexicon::load(dir.file("entities.txt"));
    emb::EmbeddingTable words = emb::load_vectors(dir.file("words.vec"), emb::TableKind::Word);
    emb::EmbeddingTable phrases =
        emb::load_vectors(dir.file("phrases.vec"), emb::TableKind::Phrase);
    emb::EmbeddingTable entities =
        emb::load_vectors(dir.file("entities.vec"), emb::TableKind::Entity);

    BuildOptions options;
    options.enabled = {ViewKind::Word, ViewKind::WordPos, ViewKind::Phrase,
                       ViewKind::PhrasePos, ViewKind::Entity};
    options.tagger = &tagger;
    options.patterns = &patterns;
    options.lexicon = &lexicon;
    options.word_vectors = &words;
    options.phrase_vectors = &phrases;
    options.entity_vectors = &entities;

    GraphBundle bundle = build_bundle(c, split, options, nlohmann::json{{"test", true}});
    CHECK(bundle.views.size() == 5);
    CHECK(bundle.num_questions() == 6);
    for (const auto& g : bundle.views) {
        CHECK(g.vocab.size() <= 10);
        for (const auto& e : g.edges) {
            CHECK(e.v > 0);
            CHECK(e.i < e.j);
        }
    }

    // determinism: building twice gives equal bundles
    GraphBundle again = build_bundle(c, split, options, nlohmann::json{{"test", true}});
    CHECK(bundle_equal(bundle, again));
    CHECK(bundle.config_hash == again.config_hash);

    std::string b1 = dir.file("b1");
    std::string b2 = dir.file("b2");
    save_bundle(bundle, b1);
    GraphBundle loaded = load_bundle(b1);
    CHECK(bundle_equal(bundle, loaded));

    save_bundle(loaded, b2);
    // byte-identical re-save
    for (const auto& entry : std::filesystem::recursive_directory_iterator(b1)) {
        if (!entry.is_regular_file()) continue;
        auto rel = std::filesystem::relative(entry.path(), b1);
        std::string first = read_text_file(entry.path().string());
        std::string second = read_text_file((std::filesystem::path(b2) / rel).string());
        CHECK(first == second);
    }

    // removing a member file fails the load naming the file
    std::filesystem::remove(std::filesystem::path(b1) / "word" / "edges.tsv");
    CHECK_THROWS_WITH_AS(load_bundle(b1), doctest::Contains("edges.tsv"), std::runtime_error);
}
