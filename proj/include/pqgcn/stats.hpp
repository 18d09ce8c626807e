#ifndef PQGCN_STATS_HPP
#define PQGCN_STATS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pqgcn/common.hpp"

namespace pqgcn::stats {

// sentinel meaning "one window per sequence"
constexpr int kWholeSequenceWindow = -1;

struct CooccurrenceCounts {
    std::vector<std::string> keys;                     // first-appearance order
    std::unordered_map<std::string, int> key_index;
    std::vector<int64_t> unit_count;                   // N(i): windows containing key i
    std::unordered_map<uint64_t, int64_t> pair_count;  // packed (i<<32)|j with i<j
    int64_t window_total = 0;                          // W

    int64_t n(std::string_view key) const;
    int64_t n(std::string_view a, std::string_view b) const;
};

// Sliding windows of the given width; sequences shorter than the window give
// one truncated window; kWholeSequenceWindow gives one window per sequence.
// Membership is set-based: a key counts once per window. Empty sequences
// contribute no windows.
CooccurrenceCounts count_cooccurrence(const std::vector<std::vector<std::string>>& sequences,
                                      int window);

struct PpmiEdge {
    int i, j;       // indices into counts.keys, i < j
    double weight;  // > 0
};

// weight = max(0, ln(N(i,j)*W / (N(i)*N(j)))); zero-weight pairs omitted.
// Output sorted by (i, j).
std::vector<PpmiEdge> ppmi(const CooccurrenceCounts& counts);

// dot(u,v)/(|u||v|); 0 when either norm is below 1e-12.
double cosine(std::span<const double> u, std::span<const double> v);

// debugging aid: `unit<TAB>key<TAB>N(i)` and `pair<TAB>key_i<TAB>key_j<TAB>N(i,j)`
// rows plus a `windows` header, deterministic order
std::string dump_counts_tsv(const CooccurrenceCounts& counts);

}  // namespace pqgcn::stats

#endif
