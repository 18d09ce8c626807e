#ifndef PQGCN_EVAL_HPP
#define PQGCN_EVAL_HPP

#include <string>
#include <vector>

#include "pqgcn/common.hpp"

namespace pqgcn::eval {

struct MetricsReport {
    int num_classes = 0;
    int64_t n = 0;
    std::vector<double> precision, recall, f1;      // per class
    double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
    double accuracy = 0;
    std::vector<std::vector<int64_t>> confusion;    // [gold][pred]
};

// Per-class P/R/F1 with the 0/0 -> 0 convention; macro scores are unweighted
// means over all `num_classes` classes (absent classes count in the mean).
MetricsReport macro_prf(const std::vector<int>& gold, const std::vector<int>& pred,
                        int num_classes);

enum class ReportFormat { Tsv, Markdown };

// TSV keeps full precision and parses back with read_report_tsv; markdown is
// rounded to 4 decimals for reading.
void write_report(const MetricsReport& report, const std::string& path, ReportFormat format,
                  const std::vector<std::string>* class_names = nullptr);
MetricsReport read_report_tsv(const std::string& path);

std::string report_to_tsv(const MetricsReport& report);
std::string report_to_markdown(const MetricsReport& report,
                               const std::vector<std::string>* class_names = nullptr);

}  // namespace pqgcn::eval

#endif
