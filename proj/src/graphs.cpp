#include "pqgcn/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

namespace pqgcn::graphs {

namespace fs = std::filesystem;

const char* view_name(ViewKind view) {
    switch (view) {
        case ViewKind::Word: return "word";
        case ViewKind::WordPos: return "word_pos";
        case ViewKind::Phrase: return "phrase";
        case ViewKind::PhrasePos: return "phrase_pos";
        case ViewKind::Entity: return "entity";
    }
    return "?";
}

std::optional<ViewKind> view_from_name(std::string_view name) {
    for (ViewKind v : kAllViews) {
        if (name == view_name(v)) return v;
    }
    return std::nullopt;
}

const ViewGraph* GraphBundle::find_view(ViewKind view) const {
    for (const auto& g : views) {
        if (g.view == view) return &g;
    }
    return nullptr;
}

const IncidenceMatrix* GraphBundle::find_incidence(ViewKind view) const {
    for (size_t k = 0; k < views.size(); ++k) {
        if (views[k].view == view) return &incidence[k];
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// sequences
// ---------------------------------------------------------------------------

std::vector<std::vector<std::string>> word_sequences(const corpus::Corpus& c) {
    std::vector<std::vector<std::string>> out;
    out.reserve(c.questions.size());
    for (const auto& q : c.questions) out.push_back(q.tokens);
    return out;
}

std::vector<std::vector<std::string>> word_pos_sequences(const corpus::Corpus& c,
                                                         const nlp::Tagger& tagger) {
    std::vector<std::vector<std::string>> out;
    out.reserve(c.questions.size());
    for (const auto& q : c.questions) {
        std::vector<std::string> seq;
        for (nlp::Tag tag : tagger.tag(q.tokens)) seq.push_back(nlp::tag_name(tag));
        out.push_back(std::move(seq));
    }
    return out;
}

namespace {

std::vector<std::vector<nlp::PhraseMatch>> phrase_matches(const corpus::Corpus& c,
                                                          const nlp::Tagger& tagger,
                                                          const nlp::PatternSet& patterns) {
    std::vector<std::vector<nlp::PhraseMatch>> out;
    out.reserve(c.questions.size());
    for (const auto& q : c.questions) {
        out.push_back(nlp::extract_phrases(nlp::tag_tokens(q.tokens, tagger), patterns));
    }
    return out;
}

}  // namespace

std::vector<std::vector<std::string>> phrase_sequences(const corpus::Corpus& c,
                                                       const nlp::Tagger& tagger,
                                                       const nlp::PatternSet& patterns) {
    std::vector<std::vector<std::string>> out;
    for (const auto& matches : phrase_matches(c, tagger, patterns)) {
        std::vector<std::string> seq;
        for (const auto& m : matches) seq.push_back(m.text);
        out.push_back(std::move(seq));
    }
    return out;
}

std::vector<std::vector<std::string>> phrase_pos_sequences(const corpus::Corpus& c,
                                                           const nlp::Tagger& tagger,
                                                           const nlp::PatternSet& patterns) {
    std::vector<std::vector<std::string>> out;
    for (const auto& matches : phrase_matches(c, tagger, patterns)) {
        std::vector<std::string> seq;
        for (const auto& m : matches) seq.push_back(m.phrase_tag);
        out.push_back(std::move(seq));
    }
    return out;
}

std::vector<std::vector<std::string>> entity_sequences(const corpus::Corpus& c,
                                                       const nlp::EntityLexicon& lexicon) {
    std::vector<std::vector<std::string>> out;
    out.reserve(c.questions.size());
    for (const auto& q : c.questions) {
        std::vector<std::string> seq;
        for (auto& m : nlp::match_entities(q.clean_text, lexicon)) {
            seq.push_back(std::move(m.surface));
        }
        out.push_back(std::move(seq));
    }
    return out;
}

// ---------------------------------------------------------------------------
// view builders
// ---------------------------------------------------------------------------

ViewGraph build_ppmi_view(ViewKind view,
                          const std::vector<std::vector<std::string>>& sequences,
                          int window) {
    stats::CooccurrenceCounts counts = stats::count_cooccurrence(sequences, window);
    if (counts.keys.empty()) {
        throw std::runtime_error(std::string("graphs: view '") + view_name(view) +
                                 "' has an empty vocabulary; disable this view for this corpus");
    }
    ViewGraph g;
    g.view = view;
    g.vocab = counts.keys;
    for (const auto& e : stats::ppmi(counts)) g.edges.push_back({e.i, e.j, e.weight});
    return g;
}

namespace {

nn::Tensor stack_rows(const std::vector<std::vector<double>>& rows, int dim) {
    nn::Tensor t(static_cast<int>(rows.size()), dim);
    for (size_t r = 0; r < rows.size(); ++r) {
        for (int c = 0; c < dim; ++c) t.at(static_cast<int>(r), c) = rows[r][static_cast<size_t>(c)];
    }
    return t;
}

}  // namespace

ViewGraph build_word_graph(const corpus::Corpus& c, int window,
                           const emb::EmbeddingTable* word_vectors) {
    ViewGraph g = build_ppmi_view(ViewKind::Word, word_sequences(c), window);
    if (word_vectors) {
        std::vector<std::vector<double>> rows;
        rows.reserve(g.vocab.size());
        for (const auto& w : g.vocab) {
            rows.push_back(emb::lookup(*word_vectors, w, emb::OovPolicy::Zero));
        }
        g.pretrained = stack_rows(rows, word_vectors->dim);
    }
    return g;
}

ViewGraph build_word_pos_graph(const corpus::Corpus& c, const nlp::Tagger& tagger) {
    return build_ppmi_view(ViewKind::WordPos, word_pos_sequences(c, tagger),
                           stats::kWholeSequenceWindow);
}

ViewGraph build_phrase_graph(const corpus::Corpus& c, const nlp::Tagger& tagger,
                             const nlp::PatternSet& patterns,
                             const emb::EmbeddingTable* word_vectors,
                             const emb::EmbeddingTable* phrase_vectors) {
    ViewGraph g = build_ppmi_view(ViewKind::Phrase, phrase_sequences(c, tagger, patterns),
                                  stats::kWholeSequenceWindow);
    if (word_vectors || phrase_vectors) {
        int dim = phrase_vectors ? phrase_vectors->dim : word_vectors->dim;
        std::vector<std::vector<double>> rows;
        rows.reserve(g.vocab.size());
        for (const auto& p : g.vocab) {
            rows.push_back(emb::phrase_vector(p, word_vectors, phrase_vectors));
        }
        g.pretrained = stack_rows(rows, dim);
    }
    return g;
}

ViewGraph build_phrase_pos_graph(const corpus::Corpus& c, const nlp::Tagger& tagger,
                                 const nlp::PatternSet& patterns) {
    return build_ppmi_view(ViewKind::PhrasePos, phrase_pos_sequences(c, tagger, patterns),
                           stats::kWholeSequenceWindow);
}

ViewGraph build_entity_graph(const corpus::Corpus& c, const nlp::EntityLexicon& lexicon,
                             const emb::EmbeddingTable& entity_vectors) {
    // vocab: corpus first-appearance order, restricted to entities with vectors
    std::vector<std::string> vocab;
    std::set<std::string> seen;
    for (const auto& seq : entity_sequences(c, lexicon)) {
        for (const auto& surface : seq) {
            if (seen.count(surface)) continue;
            seen.insert(surface);
            if (!entity_vectors.contains(surface)) {
                warn("graphs: entity '" + surface + "' has no embedding; excluded");
                continue;
            }
            vocab.push_back(surface);
        }
    }
    if (vocab.empty()) {
        throw std::runtime_error(
            "graphs: view 'entity' has an empty vocabulary; "
            "disable this view for this corpus");
    }
    ViewGraph g;
    g.view = ViewKind::Entity;
    g.vocab = vocab;
    std::vector<std::vector<double>> rows;
    for (const auto& surface : vocab) {
        rows.push_back(emb::lookup(entity_vectors, surface, emb::OovPolicy::Error));
    }
    g.pretrained = stack_rows(rows, entity_vectors.dim);
    for (size_t i = 0; i < vocab.size(); ++i) {
        for (size_t j = i + 1; j < vocab.size(); ++j) {
            double w = stats::cosine(rows[i], rows[j]);
            if (w > 0.0) {
                g.edges.push_back({static_cast<int>(i), static_cast<int>(j), w});
            }
        }
    }
    return g;
}

IncidenceMatrix build_incidence(const std::vector<std::vector<std::string>>& sequences,
                                const std::vector<std::string>& vocab) {
    std::unordered_map<std::string, int> index;
    for (size_t k = 0; k < vocab.size(); ++k) index.emplace(vocab[k], static_cast<int>(k));

    std::vector<nn::Triplet> triplets;
    for (size_t q = 0; q < sequences.size(); ++q) {
        std::unordered_map<int, int> counts;
        int total = 0;
        for (const auto& key : sequences[q]) {
            auto it = index.find(key);
            if (it == index.end()) continue;  // e.g. entity without an embedding
            counts[it->second] += 1;
            ++total;
        }
        if (total == 0) continue;  // zero row: question has no keys in this view
        std::vector<std::pair<int, int>> ordered(counts.begin(), counts.end());
        std::sort(ordered.begin(), ordered.end());
        for (const auto& [k, n] : ordered) {
            triplets.push_back({static_cast<int>(q), k,
                                static_cast<double>(n) / static_cast<double>(total)});
        }
    }
    return nn::SparseMatrix::from_triplets(static_cast<int>(sequences.size()),
                                           static_cast<int>(vocab.size()), triplets);
}

nn::SparseMatrix normalize_adjacency(const ViewGraph& graph) {
    int n = static_cast<int>(graph.vocab.size());
    std::vector<double> degree(static_cast<size_t>(n), 1.0);  // self-loop weight
    for (const auto& e : graph.edges) {
        degree[static_cast<size_t>(e.i)] += e.v;
        degree[static_cast<size_t>(e.j)] += e.v;
    }
    std::vector<double> inv_sqrt(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) inv_sqrt[static_cast<size_t>(i)] = 1.0 / std::sqrt(degree[static_cast<size_t>(i)]);

    std::vector<nn::Triplet> triplets;
    triplets.reserve(graph.edges.size() * 2 + static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        triplets.push_back({i, i, inv_sqrt[static_cast<size_t>(i)] * inv_sqrt[static_cast<size_t>(i)]});
    }
    for (const auto& e : graph.edges) {
        double w = e.v * inv_sqrt[static_cast<size_t>(e.i)] * inv_sqrt[static_cast<size_t>(e.j)];
        triplets.push_back({e.i, e.j, w});
        triplets.push_back({e.j, e.i, w});
    }
    return nn::SparseMatrix::from_triplets(n, n, triplets);
}

// ---------------------------------------------------------------------------
// bundle assembly
// ---------------------------------------------------------------------------

namespace {

std::string content_hash(const GraphBundle& bundle) {
    std::string blob;
    blob += "labels:" + join(bundle.label_names, ",") + "\n";
    blob += "questions:" + std::to_string(bundle.question_ids.size()) + "\n";
    blob += "train:";
    for (int id : bundle.split.train_ids) blob += std::to_string(id) + ",";
    blob += "\ntest:";
    for (int id : bundle.split.test_ids) blob += std::to_string(id) + ",";
    blob += "\n";
    for (size_t k = 0; k < bundle.views.size(); ++k) {
        const auto& g = bundle.views[k];
        blob += std::string("view:") + view_name(g.view) + ";";
        blob += "vocab:" + join(g.vocab, "\x1f") + ";";
        blob += "edges:" + std::to_string(g.edges.size()) + ";";
        blob += "dim:" + std::to_string(g.pretrained ? g.pretrained->cols() : 0) + "\n";
    }
    return hex64(fnv1a64(blob));
}

}  // namespace

GraphBundle build_bundle(const corpus::Corpus& c, const corpus::DatasetSplit& split,
                         const BuildOptions& options,
                         const nlohmann::json& config_snapshot) {
    std::vector<ViewKind> enabled;
    for (ViewKind v : kAllViews) {
        if (std::find(options.enabled.begin(), options.enabled.end(), v) !=
            options.enabled.end()) {
            enabled.push_back(v);
        }
    }
    if (enabled.empty()) throw config_error("graphs: no views enabled");

    bool needs_tagger = false, needs_phrases = false;
    for (ViewKind v : enabled) {
        if (v == ViewKind::WordPos || v == ViewKind::Phrase || v == ViewKind::PhrasePos) {
            needs_tagger = true;
        }
        if (v == ViewKind::Phrase || v == ViewKind::PhrasePos) needs_phrases = true;
    }
    if (needs_tagger && !options.tagger) {
        throw config_error("graphs: enabled views need a tagger");
    }

    nlp::PatternSet default_patterns;
    const nlp::PatternSet* patterns = options.patterns;
    if (needs_phrases && !patterns) {
        default_patterns = nlp::PatternSet::defaults();
        patterns = &default_patterns;
    }

    GraphBundle bundle;
    bundle.split = split;
    bundle.label_names = c.labels.names;
    for (const auto& q : c.questions) {
        bundle.question_ids.push_back(q.id);
        bundle.labels.push_back(q.label);
    }
    bundle.config_snapshot = config_snapshot;

    // phrase matches are shared between the phrase and phrase-POS views
    std::vector<std::vector<std::string>> phrase_seq, phrase_pos_seq;
    if (needs_phrases) {
        for (const auto& matches : phrase_matches(c, *options.tagger, *patterns)) {
            std::vector<std::string> texts, tags;
            for (const auto& m : matches) {
                texts.push_back(m.text);
                tags.push_back(m.phrase_tag);
            }
            phrase_seq.push_back(std::move(texts));
            phrase_pos_seq.push_back(std::move(tags));
        }
    }

    for (ViewKind v : enabled) {
        ViewGraph g;
        std::vector<std::vector<std::string>> seqs;
        switch (v) {
            case ViewKind::Word:
                seqs = word_sequences(c);
                g = build_ppmi_view(v, seqs, options.word_window);
                if (options.word_vectors) {
                    std::vector<std::vector<double>> rows;
                    for (const auto& w : g.vocab) {
                        rows.push_back(emb::lookup(*options.word_vectors, w,
                                                   emb::OovPolicy::Zero));
                    }
                    g.pretrained = stack_rows(rows, options.word_vectors->dim);
                }
                break;
            case ViewKind::WordPos:
                seqs = word_pos_sequences(c, *options.tagger);
                g = build_ppmi_view(v, seqs, stats::kWholeSequenceWindow);
                break;
            case ViewKind::Phrase:
                seqs = phrase_seq;
                g = build_ppmi_view(v, seqs, stats::kWholeSequenceWindow);
                if (options.word_vectors || options.phrase_vectors) {
                    int dim = options.phrase_vectors ? options.phrase_vectors->dim
                                                     : options.word_vectors->dim;
                    std::vector<std::vector<double>> rows;
                    for (const auto& p : g.vocab) {
                        rows.push_back(emb::phrase_vector(p, options.word_vectors,
                                                          options.phrase_vectors));
                    }
                    g.pretrained = stack_rows(rows, dim);
                }
                break;
            case ViewKind::PhrasePos:
                seqs = phrase_pos_seq;
                g = build_ppmi_view(v, seqs, stats::kWholeSequenceWindow);
                break;
            case ViewKind::Entity: {
                if (!options.lexicon || !options.entity_vectors) {
                    throw config_error(
                        "graphs: the entity view needs an entity lexicon and entity vectors");
                }
                seqs = entity_sequences(c, *options.lexicon);
                g = build_entity_graph(c, *options.lexicon, *options.entity_vectors);
                break;
            }
        }
        bundle.incidence.push_back(build_incidence(seqs, g.vocab));
        bundle.views.push_back(std::move(g));
    }

    bundle.config_hash = content_hash(bundle);
    return bundle;
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

void save_bundle(const GraphBundle& bundle, const std::string& dir) {
    fs::create_directories(dir);

    nlohmann::json manifest;
    manifest["format_version"] = 1;
    manifest["config_hash"] = bundle.config_hash;
    manifest["config"] = bundle.config_snapshot;
    manifest["num_questions"] = bundle.question_ids.size();
    manifest["labels"] = bundle.label_names;
    manifest["split_seed"] = bundle.split.seed;
    nlohmann::json views = nlohmann::json::array();
    for (const auto& g : bundle.views) {
        views.push_back({{"name", view_name(g.view)},
                         {"nodes", g.vocab.size()},
                         {"edges", g.edges.size()},
                         {"pretrained_dim", g.pretrained ? g.pretrained->cols() : 0}});
    }
    manifest["views"] = views;
    write_text_file(dir + "/manifest.json", manifest.dump(2) + "\n");

    std::string questions;
    for (size_t k = 0; k < bundle.question_ids.size(); ++k) {
        int id = bundle.question_ids[k];
        questions += std::to_string(id);
        questions += '\t';
        questions += bundle.labels[k] ? bundle.label_names[static_cast<size_t>(*bundle.labels[k])]
                                      : std::string("-");
        questions += '\t';
        questions += corpus::is_train(bundle.split, id) ? "train" : "test";
        questions += '\n';
    }
    write_text_file(dir + "/questions.tsv", questions);
    corpus::write_split_tsv(bundle.split, dir + "/split.tsv");

    for (size_t k = 0; k < bundle.views.size(); ++k) {
        const auto& g = bundle.views[k];
        std::string vdir = dir + "/" + view_name(g.view);
        fs::create_directories(vdir);

        std::string nodes;
        for (size_t i = 0; i < g.vocab.size(); ++i) {
            nodes += std::to_string(i) + "\t" + g.vocab[i] + "\n";
        }
        write_text_file(vdir + "/nodes.tsv", nodes);

        std::string edges;
        for (const auto& e : g.edges) {
            edges += std::to_string(e.i) + "\t" + std::to_string(e.j) + "\t" +
                     format_double(e.v) + "\n";
        }
        write_text_file(vdir + "/edges.tsv", edges);

        std::string inc;
        for (const auto& e : bundle.incidence[k].triplets()) {
            inc += std::to_string(e.i) + "\t" + std::to_string(e.j) + "\t" +
                   format_double(e.v) + "\n";
        }
        write_text_file(vdir + "/incidence.tsv", inc);

        if (g.pretrained) {
            std::string pre;
            for (int r = 0; r < g.pretrained->rows(); ++r) {
                pre += std::to_string(r);
                for (int c2 = 0; c2 < g.pretrained->cols(); ++c2) {
                    pre += '\t';
                    pre += format_double(g.pretrained->at(r, c2));
                }
                pre += '\n';
            }
            write_text_file(vdir + "/pretrained.tsv", pre);
        }
    }
}

namespace {

std::string require_file(const std::string& path) {
    if (!fs::exists(path)) {
        throw std::runtime_error("graphs: bundle member missing: " + path);
    }
    return read_text_file(path);
}

std::vector<std::vector<std::string>> read_tsv(const std::string& path, size_t min_cols) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(require_file(path));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_char(line, '\t');
        if (fields.size() < min_cols) {
            throw std::runtime_error("graphs: " + path + ":" + std::to_string(line_no) +
                                     ": expected at least " + std::to_string(min_cols) +
                                     " columns");
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

GraphBundle load_bundle(const std::string& dir) {
    GraphBundle bundle;
    nlohmann::json manifest = nlohmann::json::parse(require_file(dir + "/manifest.json"));
    bundle.config_hash = manifest.at("config_hash").get<std::string>();
    bundle.config_snapshot = manifest.at("config");
    bundle.label_names = manifest.at("labels").get<std::vector<std::string>>();
    bundle.split.seed = manifest.at("split_seed").get<uint64_t>();

    std::unordered_map<std::string, int> label_index;
    for (size_t k = 0; k < bundle.label_names.size(); ++k) {
        label_index.emplace(bundle.label_names[k], static_cast<int>(k));
    }

    for (const auto& row : read_tsv(dir + "/questions.tsv", 3)) {
        int id = static_cast<int>(parse_int(row[0], dir + "/questions.tsv"));
        bundle.question_ids.push_back(id);
        if (row[1] == "-") {
            bundle.labels.push_back(std::nullopt);
        } else {
            auto it = label_index.find(row[1]);
            if (it == label_index.end()) {
                throw std::runtime_error("graphs: " + dir + "/questions.tsv: unknown label '" +
                                         row[1] + "'");
            }
            bundle.labels.push_back(it->second);
        }
        if (row[2] == "train") bundle.split.train_ids.push_back(id);
        else if (row[2] == "test") bundle.split.test_ids.push_back(id);
        else {
            throw std::runtime_error("graphs: " + dir + "/questions.tsv: bad split '" + row[2] +
                                     "'");
        }
    }
    std::sort(bundle.split.train_ids.begin(), bundle.split.train_ids.end());
    std::sort(bundle.split.test_ids.begin(), bundle.split.test_ids.end());

    int n_questions = static_cast<int>(bundle.question_ids.size());
    for (const auto& view_entry : manifest.at("views")) {
        std::string name = view_entry.at("name").get<std::string>();
        auto kind = view_from_name(name);
        if (!kind) throw std::runtime_error("graphs: manifest names unknown view '" + name + "'");
        std::string vdir = dir + "/" + name;

        ViewGraph g;
        g.view = *kind;
        for (const auto& row : read_tsv(vdir + "/nodes.tsv", 2)) {
            g.vocab.push_back(row[1]);
        }
        if (g.vocab.size() != view_entry.at("nodes").get<size_t>()) {
            throw std::runtime_error("graphs: " + vdir + "/nodes.tsv: node count mismatch");
        }
        if (fs::exists(vdir + "/edges.tsv")) {
            for (const auto& row : read_tsv(vdir + "/edges.tsv", 3)) {
                g.edges.push_back({static_cast<int>(parse_int(row[0], vdir + "/edges.tsv")),
                                   static_cast<int>(parse_int(row[1], vdir + "/edges.tsv")),
                                   parse_double(row[2], vdir + "/edges.tsv")});
            }
        } else {
            throw std::runtime_error("graphs: bundle member missing: " + vdir + "/edges.tsv");
        }
        int pretrained_dim = view_entry.at("pretrained_dim").get<int>();
        if (pretrained_dim > 0) {
            nn::Tensor pre(static_cast<int>(g.vocab.size()), pretrained_dim);
            auto rows = read_tsv(vdir + "/pretrained.tsv", static_cast<size_t>(pretrained_dim) + 1);
            if (rows.size() != g.vocab.size()) {
                throw std::runtime_error("graphs: " + vdir + "/pretrained.tsv: row count mismatch");
            }
            for (const auto& row : rows) {
                int r = static_cast<int>(parse_int(row[0], vdir + "/pretrained.tsv"));
                for (int c2 = 0; c2 < pretrained_dim; ++c2) {
                    pre.at(r, c2) = parse_double(row[static_cast<size_t>(c2) + 1],
                                                 vdir + "/pretrained.tsv");
                }
            }
            g.pretrained = std::move(pre);
        }

        std::vector<nn::Triplet> inc;
        for (const auto& row : read_tsv(vdir + "/incidence.tsv", 3)) {
            inc.push_back({static_cast<int>(parse_int(row[0], vdir + "/incidence.tsv")),
                           static_cast<int>(parse_int(row[1], vdir + "/incidence.tsv")),
                           parse_double(row[2], vdir + "/incidence.tsv")});
        }
        bundle.incidence.push_back(nn::SparseMatrix::from_triplets(
            n_questions, static_cast<int>(g.vocab.size()), inc));
        bundle.views.push_back(std::move(g));
    }
    return bundle;
}

bool bundle_equal(const GraphBundle& a, const GraphBundle& b) {
    if (a.config_hash != b.config_hash || a.label_names != b.label_names ||
        a.question_ids != b.question_ids || a.labels != b.labels ||
        a.split.train_ids != b.split.train_ids || a.split.test_ids != b.split.test_ids ||
        a.views.size() != b.views.size()) {
        return false;
    }
    for (size_t k = 0; k < a.views.size(); ++k) {
        const auto& ga = a.views[k];
        const auto& gb = b.views[k];
        if (ga.view != gb.view || ga.vocab != gb.vocab ||
            ga.edges.size() != gb.edges.size()) {
            return false;
        }
        for (size_t e = 0; e < ga.edges.size(); ++e) {
            if (ga.edges[e].i != gb.edges[e].i || ga.edges[e].j != gb.edges[e].j ||
                ga.edges[e].v != gb.edges[e].v) {
                return false;
            }
        }
        bool pa = ga.pretrained.has_value(), pb = gb.pretrained.has_value();
        if (pa != pb) return false;
        if (pa) {
            if (!ga.pretrained->same_shape(*gb.pretrained)) return false;
            for (size_t x = 0; x < ga.pretrained->size(); ++x) {
                if (ga.pretrained->data()[x] != gb.pretrained->data()[x]) return false;
            }
        }
        const auto& ia = a.incidence[k].triplets();
        const auto& ib = b.incidence[k].triplets();
        if (ia.size() != ib.size()) return false;
        for (size_t x = 0; x < ia.size(); ++x) {
            if (ia[x].i != ib[x].i || ia[x].j != ib[x].j || ia[x].v != ib[x].v) return false;
        }
    }
    return true;
}

}  // namespace pqgcn::graphs
