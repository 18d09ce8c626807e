#include "pqgcn/stats.hpp"

#include <algorithm>
#include <cmath>

namespace pqgcn::stats {

namespace {

uint64_t pack_pair(int i, int j) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(i)) << 32) |
           static_cast<uint32_t>(j);
}

}  // namespace

int64_t CooccurrenceCounts::n(std::string_view key) const {
    auto it = key_index.find(std::string(key));
    return it == key_index.end() ? 0 : unit_count[static_cast<size_t>(it->second)];
}

int64_t CooccurrenceCounts::n(std::string_view a, std::string_view b) const {
    auto ia = key_index.find(std::string(a));
    auto ib = key_index.find(std::string(b));
    if (ia == key_index.end() || ib == key_index.end()) return 0;
    int i = ia->second, j = ib->second;
    if (i == j) return 0;
    if (i > j) std::swap(i, j);
    auto it = pair_count.find(pack_pair(i, j));
    return it == pair_count.end() ? 0 : it->second;
}

CooccurrenceCounts count_cooccurrence(const std::vector<std::vector<std::string>>& sequences,
                                      int window) {
    if (window == 0 || (window < 0 && window != kWholeSequenceWindow)) {
        throw config_error("stats: window must be positive (or the whole-sequence sentinel)");
    }
    CooccurrenceCounts c;
    auto key_id = [&c](const std::string& key) {
        auto it = c.key_index.find(key);
        if (it != c.key_index.end()) return it->second;
        int id = static_cast<int>(c.keys.size());
        c.keys.push_back(key);
        c.key_index.emplace(key, id);
        c.unit_count.push_back(0);
        return id;
    };

    std::vector<int> members;
    auto count_window = [&](const std::vector<std::string>& seq, size_t begin, size_t end) {
        members.clear();
        for (size_t k = begin; k < end; ++k) members.push_back(key_id(seq[k]));
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        for (size_t a = 0; a < members.size(); ++a) {
            c.unit_count[static_cast<size_t>(members[a])] += 1;
            for (size_t b = a + 1; b < members.size(); ++b) {
                c.pair_count[pack_pair(members[a], members[b])] += 1;
            }
        }
        c.window_total += 1;
    };

    for (const auto& seq : sequences) {
        if (seq.empty()) continue;
        if (window == kWholeSequenceWindow ||
            seq.size() <= static_cast<size_t>(window)) {
            count_window(seq, 0, seq.size());
        } else {
            size_t w = static_cast<size_t>(window);
            for (size_t begin = 0; begin + w <= seq.size(); ++begin) {
                count_window(seq, begin, begin + w);
            }
        }
    }
    return c;
}

std::vector<PpmiEdge> ppmi(const CooccurrenceCounts& counts) {
    if (counts.window_total <= 0) {
        throw std::runtime_error("stats: ppmi requires a nonzero window total");
    }
    std::vector<PpmiEdge> edges;
    edges.reserve(counts.pair_count.size());
    double w_total = static_cast<double>(counts.window_total);
    for (const auto& [packed, nij] : counts.pair_count) {
        int i = static_cast<int>(packed >> 32);
        int j = static_cast<int>(packed & 0xffffffffu);
        double ni = static_cast<double>(counts.unit_count[static_cast<size_t>(i)]);
        double nj = static_cast<double>(counts.unit_count[static_cast<size_t>(j)]);
        double value = std::log(static_cast<double>(nij) * w_total / (ni * nj));
        if (value > 0.0) edges.push_back({i, j, value});
    }
    std::sort(edges.begin(), edges.end(), [](const PpmiEdge& a, const PpmiEdge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    return edges;
}

std::string dump_counts_tsv(const CooccurrenceCounts& counts) {
    std::string out = "windows\t" + std::to_string(counts.window_total) + "\n";
    for (size_t k = 0; k < counts.keys.size(); ++k) {
        out += "unit\t" + counts.keys[k] + "\t" + std::to_string(counts.unit_count[k]) + "\n";
    }
    std::vector<std::pair<uint64_t, int64_t>> pairs(counts.pair_count.begin(),
                                                    counts.pair_count.end());
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [packed, n] : pairs) {
        size_t i = packed >> 32;
        size_t j = packed & 0xffffffffu;
        out += "pair\t" + counts.keys[i] + "\t" + counts.keys[j] + "\t" + std::to_string(n) +
               "\n";
    }
    return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw std::runtime_error("stats: cosine length mismatch (" + std::to_string(u.size()) +
                                 " vs " + std::to_string(v.size()) + ")");
    }
    double dot = 0, nu = 0, nv = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    nu = std::sqrt(nu);
    nv = std::sqrt(nv);
    if (nu < 1e-12 || nv < 1e-12) return 0.0;
    return dot / (nu * nv);
}

}  // namespace pqgcn::stats
