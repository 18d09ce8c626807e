#include "pqgcn/embeddings.hpp"

#include <zlib.h>

#include <cmath>
#include <sstream>

namespace pqgcn::emb {

namespace {

std::string read_maybe_gz(const std::string& path) {
    if (!ends_with(path, ".gz")) return read_text_file(path);
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw config_error("embeddings: cannot open file: " + path);
    std::string out;
    char buf[1 << 16];
    int n = 0;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<size_t>(n));
    bool bad = n < 0;
    gzclose(f);
    if (bad) throw config_error("embeddings: gzip read failed: " + path);
    return out;
}

bool looks_like_header(const std::vector<std::string>& fields) {
    if (fields.size() != 2) return false;
    for (const auto& f : fields) {
        if (f.empty()) return false;
        for (char c : f) {
            if (c < '0' || c > '9') return false;
        }
    }
    return true;
}

}  // namespace

EmbeddingTable load_vectors(const std::string& path, TableKind kind) {
    EmbeddingTable table;
    table.kind = kind;

    std::string content = read_maybe_gz(path);
    std::istringstream in(content);
    std::string line;
    int line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::string where = "embeddings: " + path + ":" + std::to_string(line_no);

        std::string key;
        std::vector<std::string> value_fields;
        size_t tab = line.find('\t');
        if (tab != std::string::npos) {
            key = line.substr(0, tab);
            value_fields = split_ws(std::string_view(line).substr(tab + 1));
        } else {
            auto fields = split_ws(line);
            if (first && looks_like_header(fields)) {
                first = false;
                continue;
            }
            if (fields.size() < 2) throw config_error(where + ": expected `key v1 ... vdim`");
            key = fields[0];
            value_fields.assign(fields.begin() + 1, fields.end());
        }
        first = false;

        if (key.empty()) throw config_error(where + ": empty key");
        if (table.dim == 0) {
            table.dim = static_cast<int>(value_fields.size());
            if (table.dim == 0) throw config_error(where + ": vector has no components");
        } else if (static_cast<int>(value_fields.size()) != table.dim) {
            throw config_error(where + ": expected " + std::to_string(table.dim) +
                               " components, got " + std::to_string(value_fields.size()));
        }
        std::vector<double> vec(value_fields.size());
        for (size_t i = 0; i < value_fields.size(); ++i) {
            vec[i] = parse_double(value_fields[i], where);
            if (!std::isfinite(vec[i])) throw config_error(where + ": non-finite component");
        }
        if (table.vectors.count(key)) {
            warn("embeddings: " + path + ":" + std::to_string(line_no) + ": duplicate key '" +
                 key + "' (last wins)");
        }
        table.vectors[key] = std::move(vec);
    }
    if (table.vectors.empty()) {
        throw config_error("embeddings: " + path + ": no vectors found");
    }
    return table;
}

std::vector<double> lookup(const EmbeddingTable& table, const std::string& key,
                           OovPolicy policy) {
    auto it = table.vectors.find(key);
    if (it != table.vectors.end()) return it->second;
    if (policy == OovPolicy::Error) {
        throw std::runtime_error("embeddings: key not found: '" + key + "'");
    }
    return std::vector<double>(static_cast<size_t>(table.dim), 0.0);
}

std::vector<double> phrase_vector(std::string_view phrase_text,
                                  const EmbeddingTable* word_table,
                                  const EmbeddingTable* phrase_table) {
    std::string text(phrase_text);
    if (phrase_table) {
        if (auto it = phrase_table->vectors.find(text); it != phrase_table->vectors.end()) {
            return it->second;
        }
        if (word_table && word_table->dim != phrase_table->dim) {
            // mixing dims inside one node-feature matrix is not representable
            static bool warned = false;
            if (!warned) {
                warn("embeddings: word/phrase vector dims differ (" +
                     std::to_string(word_table->dim) + " vs " +
                     std::to_string(phrase_table->dim) +
                     "); phrases missing from the phrase table get zero vectors");
                warned = true;
            }
            return std::vector<double>(static_cast<size_t>(phrase_table->dim), 0.0);
        }
        if (!word_table) {
            return std::vector<double>(static_cast<size_t>(phrase_table->dim), 0.0);
        }
    }
    if (!word_table) return {};

    std::vector<double> acc(static_cast<size_t>(word_table->dim), 0.0);
    int used = 0;
    for (const auto& tok : split_ws(text)) {
        std::vector<double> v = lookup(*word_table, tok, OovPolicy::Zero);
        bool all_zero = true;
        for (double x : v) {
            if (x != 0.0) {
                all_zero = false;
                break;
            }
        }
        if (all_zero) continue;
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
        ++used;
    }
    if (used > 0) {
        for (double& x : acc) x /= used;
    }
    return acc;
}

}  // namespace pqgcn::emb
