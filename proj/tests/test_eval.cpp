#include "pqgcn/eval.hpp"

#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"

using namespace pqgcn;
using namespace pqgcn::eval;

namespace {

// independent per-class loop over the raw samples
MetricsReport naive_oracle(const std::vector<int>& gold, const std::vector<int>& pred, int c) {
    MetricsReport r;
    r.num_classes = c;
    r.n = static_cast<int64_t>(gold.size());
    int64_t hits = 0;
    for (size_t k = 0; k < gold.size(); ++k) hits += gold[k] == pred[k];
    r.accuracy = static_cast<double>(hits) / static_cast<double>(gold.size());
    for (int cls = 0; cls < c; ++cls) {
        int64_t tp = 0, predicted = 0, actual = 0;
        for (size_t k = 0; k < gold.size(); ++k) {
            if (pred[k] == cls) ++predicted;
            if (gold[k] == cls) ++actual;
            if (pred[k] == cls && gold[k] == cls) ++tp;
        }
        double p = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
        double rec = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
        double f1 = (p + rec) > 0 ? 2 * p * rec / (p + rec) : 0.0;
        r.precision.push_back(p);
        r.recall.push_back(rec);
        r.f1.push_back(f1);
        r.macro_precision += p / c;
        r.macro_recall += rec / c;
        r.macro_f1 += f1 / c;
    }
    return r;
}

}  // namespace

TEST_CASE("macro_prf hand examples") {
    MetricsReport perfect = macro_prf({0, 1, 2, 0}, {0, 1, 2, 0}, 3);
    CHECK(perfect.macro_precision == 1.0);
    CHECK(perfect.macro_recall == 1.0);
    CHECK(perfect.macro_f1 == 1.0);
    CHECK(perfect.accuracy == 1.0);

    MetricsReport r = macro_prf({0, 0, 1, 1}, {0, 1, 1, 1}, 2);
    CHECK(r.precision[0] == 1.0);
    CHECK(r.recall[0] == 0.5);
    CHECK(r.f1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(r.precision[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(r.recall[1] == 1.0);
    CHECK(r.f1[1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(r.macro_f1 == doctest::Approx(11.0 / 15.0).epsilon(1e-15));
    CHECK(r.accuracy == 0.75);
    CHECK(r.confusion[0][1] == 1);
    CHECK(r.confusion[1][1] == 2);

    // class absent from both gold and pred contributes zero but still divides
    MetricsReport absent = macro_prf({0, 0}, {0, 0}, 3);
    CHECK(absent.macro_f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    CHECK_THROWS_AS(macro_prf({0}, {0, 1}, 2), std::runtime_error);
    CHECK_THROWS_AS(macro_prf({}, {}, 2), std::runtime_error);
    CHECK_THROWS_AS(macro_prf({5}, {0}, 2), std::runtime_error);
}

TEST_CASE("macro_prf equals the naive loop oracle on fuzzed labels") {
    Rng rng(77);
    for (int iter = 0; iter < 100; ++iter) {
        int c = 2 + static_cast<int>(rng.below(6));
        size_t n = 1 + rng.below(200);
        std::vector<int> gold(n), pred(n);
        for (size_t k = 0; k < n; ++k) {
            gold[k] = static_cast<int>(rng.below(static_cast<uint64_t>(c)));
            pred[k] = static_cast<int>(rng.below(static_cast<uint64_t>(c)));
        }
        MetricsReport a = macro_prf(gold, pred, c);
        MetricsReport b = naive_oracle(gold, pred, c);
        CHECK(a.accuracy == doctest::Approx(b.accuracy).epsilon(1e-12));
        CHECK(a.macro_precision == doctest::Approx(b.macro_precision).epsilon(1e-12));
        CHECK(a.macro_recall == doctest::Approx(b.macro_recall).epsilon(1e-12));
        CHECK(a.macro_f1 == doctest::Approx(b.macro_f1).epsilon(1e-12));
        for (int cls = 0; cls < c; ++cls) {
            CHECK(a.f1[static_cast<size_t>(cls)] ==
                  doctest::Approx(b.f1[static_cast<size_t>(cls)]).epsilon(1e-12));
        }

        // micro accuracy equals trace(confusion)/n
        int64_t trace = 0;
        for (int cls = 0; cls < c; ++cls) trace += a.confusion[static_cast<size_t>(cls)][static_cast<size_t>(cls)];
        CHECK(a.accuracy == doctest::Approx(static_cast<double>(trace) / static_cast<double>(n)));

        // joint permutation leaves metrics unchanged
        std::vector<size_t> perm(n);
        for (size_t k = 0; k < n; ++k) perm[k] = k;
        rng.shuffle(perm);
        std::vector<int> gold_p(n), pred_p(n);
        for (size_t k = 0; k < n; ++k) {
            gold_p[k] = gold[perm[k]];
            pred_p[k] = pred[perm[k]];
        }
        MetricsReport p = macro_prf(gold_p, pred_p, c);
        CHECK(p.macro_f1 == a.macro_f1);
        CHECK(p.accuracy == a.accuracy);
    }
}

TEST_CASE("report writing round-trips and is deterministic") {
    MetricsReport r = macro_prf({0, 0, 1, 1}, {0, 1, 1, 1}, 2);
    testutil::TempDir dir("pqgcn-eval");

    write_report(r, dir.file("m1.tsv"), ReportFormat::Tsv);
    write_report(r, dir.file("m2.tsv"), ReportFormat::Tsv);
    CHECK(read_text_file(dir.file("m1.tsv")) == read_text_file(dir.file("m2.tsv")));

    MetricsReport back = read_report_tsv(dir.file("m1.tsv"));
    CHECK(back.n == r.n);
    CHECK(back.num_classes == r.num_classes);
    CHECK(back.macro_f1 == r.macro_f1);  // full-precision round trip
    CHECK(back.precision == r.precision);
    CHECK(back.confusion == r.confusion);

    std::vector<std::string> names{"yes", "no"};
    write_report(r, dir.file("m.md"), ReportFormat::Markdown, &names);
    std::string md = read_text_file(dir.file("m.md"));
    CHECK(md.find("| macro |") != std::string::npos);
    CHECK(md.find("| yes |") != std::string::npos);
    CHECK(md.find("0.7333") != std::string::npos);
}
