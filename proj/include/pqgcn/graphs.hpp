#ifndef PQGCN_GRAPHS_HPP
#define PQGCN_GRAPHS_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqgcn/corpus.hpp"
#include "pqgcn/embeddings.hpp"
#include "pqgcn/nlp.hpp"
#include "pqgcn/stats.hpp"
#include "pqgcn/tensor.hpp"

namespace pqgcn::graphs {

enum class ViewKind { Word, WordPos, Phrase, PhrasePos, Entity };
constexpr int kViewCount = 5;
constexpr ViewKind kAllViews[kViewCount] = {ViewKind::Word, ViewKind::WordPos,
                                            ViewKind::Phrase, ViewKind::PhrasePos,
                                            ViewKind::Entity};

const char* view_name(ViewKind view);
std::optional<ViewKind> view_from_name(std::string_view name);

struct ViewGraph {
    ViewKind view = ViewKind::Word;
    std::vector<std::string> vocab;        // first-appearance order
    std::vector<nn::Triplet> edges;        // i < j, weight > 0
    std::optional<nn::Tensor> pretrained;  // |vocab| x dim node features
};

// rows = questions, cols = view vocab; nonzero rows sum to 1
using IncidenceMatrix = nn::SparseMatrix;

struct GraphBundle {
    std::vector<ViewGraph> views;            // canonical view order
    std::vector<IncidenceMatrix> incidence;  // parallel to views
    std::vector<int> question_ids;
    std::vector<std::optional<int>> labels;  // parallel to question_ids
    std::vector<std::string> label_names;
    corpus::DatasetSplit split;
    std::string config_hash;
    nlohmann::json config_snapshot;

    int num_questions() const { return static_cast<int>(question_ids.size()); }
    const ViewGraph* find_view(ViewKind view) const;
    const IncidenceMatrix* find_incidence(ViewKind view) const;
};

// Per-question key sequences for one view (index = question position in the
// corpus). These feed both the PPMI edges and the incidence counts.
std::vector<std::vector<std::string>> word_sequences(const corpus::Corpus& c);
std::vector<std::vector<std::string>> word_pos_sequences(const corpus::Corpus& c,
                                                         const nlp::Tagger& tagger);
std::vector<std::vector<std::string>> phrase_sequences(const corpus::Corpus& c,
                                                       const nlp::Tagger& tagger,
                                                       const nlp::PatternSet& patterns);
std::vector<std::vector<std::string>> phrase_pos_sequences(const corpus::Corpus& c,
                                                           const nlp::Tagger& tagger,
                                                           const nlp::PatternSet& patterns);
std::vector<std::vector<std::string>> entity_sequences(const corpus::Corpus& c,
                                                       const nlp::EntityLexicon& lexicon);

// PPMI-weighted view over the given sequences; vocab = first-appearance order.
// Throws when the vocabulary comes out empty (advises disabling the view).
ViewGraph build_ppmi_view(ViewKind view,
                          const std::vector<std::vector<std::string>>& sequences,
                          int window);

ViewGraph build_word_graph(const corpus::Corpus& c, int window,
                           const emb::EmbeddingTable* word_vectors);
ViewGraph build_word_pos_graph(const corpus::Corpus& c, const nlp::Tagger& tagger);
ViewGraph build_phrase_graph(const corpus::Corpus& c, const nlp::Tagger& tagger,
                             const nlp::PatternSet& patterns,
                             const emb::EmbeddingTable* word_vectors,
                             const emb::EmbeddingTable* phrase_vectors);
ViewGraph build_phrase_pos_graph(const corpus::Corpus& c, const nlp::Tagger& tagger,
                                 const nlp::PatternSet& patterns);
// Edges are clamped cosine similarities between entity embeddings; matched
// entities missing from the table are dropped with a warning.
ViewGraph build_entity_graph(const corpus::Corpus& c, const nlp::EntityLexicon& lexicon,
                             const emb::EmbeddingTable& entity_vectors);

IncidenceMatrix build_incidence(const std::vector<std::vector<std::string>>& sequences,
                                const std::vector<std::string>& vocab);

// A_hat = D^-1/2 (A + I) D^-1/2 with A symmetric from the edge list.
nn::SparseMatrix normalize_adjacency(const ViewGraph& graph);

struct BuildOptions {
    std::vector<ViewKind> enabled;  // canonicalized to kAllViews order
    int word_window = 5;
    const nlp::Tagger* tagger = nullptr;
    const nlp::PatternSet* patterns = nullptr;  // defaults when null
    const nlp::EntityLexicon* lexicon = nullptr;
    const emb::EmbeddingTable* word_vectors = nullptr;
    const emb::EmbeddingTable* phrase_vectors = nullptr;
    const emb::EmbeddingTable* entity_vectors = nullptr;
};

GraphBundle build_bundle(const corpus::Corpus& c, const corpus::DatasetSplit& split,
                         const BuildOptions& options,
                         const nlohmann::json& config_snapshot);

// Directory layout: manifest.json, questions.tsv, split.tsv, one directory per
// view holding nodes.tsv / edges.tsv / incidence.tsv / pretrained.tsv.
// Serialization is canonical: save(load(dir)) rewrites identical bytes.
void save_bundle(const GraphBundle& bundle, const std::string& dir);
GraphBundle load_bundle(const std::string& dir);

bool bundle_equal(const GraphBundle& a, const GraphBundle& b);

}  // namespace pqgcn::graphs

#endif
