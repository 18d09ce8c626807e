#ifndef PQGCN_EMBEDDINGS_HPP
#define PQGCN_EMBEDDINGS_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "pqgcn/common.hpp"

namespace pqgcn::emb {

enum class TableKind { Word, Phrase, Entity };
enum class OovPolicy { Zero, Error };

struct EmbeddingTable {
    int dim = 0;
    TableKind kind = TableKind::Word;
    std::unordered_map<std::string, std::vector<double>> vectors;

    bool contains(const std::string& key) const { return vectors.count(key) > 0; }
    size_t size() const { return vectors.size(); }
};

// Text format: optional `count dim` header, then `key v1 ... vdim` rows; keys
// containing spaces separate key from vector with a TAB. Files ending in .gz
// are transparently decompressed. Duplicate keys: last wins, with a warning.
EmbeddingTable load_vectors(const std::string& path, TableKind kind);

// Zero policy serves an all-zeros vector for missing keys; Error throws.
std::vector<double> lookup(const EmbeddingTable& table, const std::string& key,
                           OovPolicy policy);

// Exact phrase-table hit wins; otherwise the component-wise mean of the word
// vectors of the phrase's tokens, excluding all-zero (OOV) lookups. All-OOV
// phrases get a zero vector.
std::vector<double> phrase_vector(std::string_view phrase_text,
                                  const EmbeddingTable* word_table,
                                  const EmbeddingTable* phrase_table);

}  // namespace pqgcn::emb

#endif
