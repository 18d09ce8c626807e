#include "pqgcn/eval.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace pqgcn::eval {

MetricsReport macro_prf(const std::vector<int>& gold, const std::vector<int>& pred,
                        int num_classes) {
    if (gold.size() != pred.size()) {
        throw std::runtime_error("eval: gold/pred length mismatch (" +
                                 std::to_string(gold.size()) + " vs " +
                                 std::to_string(pred.size()) + ")");
    }
    if (gold.empty()) throw std::runtime_error("eval: empty label vectors");
    if (num_classes < 1) throw std::runtime_error("eval: num_classes must be positive");

    MetricsReport r;
    r.num_classes = num_classes;
    r.n = static_cast<int64_t>(gold.size());
    r.confusion.assign(static_cast<size_t>(num_classes),
                       std::vector<int64_t>(static_cast<size_t>(num_classes), 0));
    for (size_t k = 0; k < gold.size(); ++k) {
        if (gold[k] < 0 || gold[k] >= num_classes || pred[k] < 0 || pred[k] >= num_classes) {
            throw std::runtime_error("eval: label outside [0," + std::to_string(num_classes) +
                                     ") at position " + std::to_string(k));
        }
        r.confusion[static_cast<size_t>(gold[k])][static_cast<size_t>(pred[k])]++;
    }

    int64_t correct = 0;
    for (int c = 0; c < num_classes; ++c) correct += r.confusion[static_cast<size_t>(c)][static_cast<size_t>(c)];
    r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);

    for (int c = 0; c < num_classes; ++c) {
        int64_t tp = r.confusion[static_cast<size_t>(c)][static_cast<size_t>(c)];
        int64_t fp = 0, fn = 0;
        for (int o = 0; o < num_classes; ++o) {
            if (o == c) continue;
            fp += r.confusion[static_cast<size_t>(o)][static_cast<size_t>(c)];
            fn += r.confusion[static_cast<size_t>(c)][static_cast<size_t>(o)];
        }
        double p = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        double rec = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        double f1 = (p + rec) > 0 ? 2.0 * p * rec / (p + rec) : 0.0;
        r.precision.push_back(p);
        r.recall.push_back(rec);
        r.f1.push_back(f1);
        r.macro_precision += p;
        r.macro_recall += rec;
        r.macro_f1 += f1;
    }
    r.macro_precision /= num_classes;
    r.macro_recall /= num_classes;
    r.macro_f1 /= num_classes;
    return r;
}

std::string report_to_tsv(const MetricsReport& r) {
    std::string out;
    out += "n\t" + std::to_string(r.n) + "\n";
    out += "num_classes\t" + std::to_string(r.num_classes) + "\n";
    out += "accuracy\t" + format_double(r.accuracy) + "\n";
    out += "macro_precision\t" + format_double(r.macro_precision) + "\n";
    out += "macro_recall\t" + format_double(r.macro_recall) + "\n";
    out += "macro_f1\t" + format_double(r.macro_f1) + "\n";
    for (int c = 0; c < r.num_classes; ++c) {
        out += "class\t" + std::to_string(c) + "\t" +
               format_double(r.precision[static_cast<size_t>(c)]) + "\t" +
               format_double(r.recall[static_cast<size_t>(c)]) + "\t" +
               format_double(r.f1[static_cast<size_t>(c)]) + "\n";
    }
    for (int g = 0; g < r.num_classes; ++g) {
        for (int p = 0; p < r.num_classes; ++p) {
            int64_t v = r.confusion[static_cast<size_t>(g)][static_cast<size_t>(p)];
            if (v == 0) continue;
            out += "confusion\t" + std::to_string(g) + "\t" + std::to_string(p) + "\t" +
                   std::to_string(v) + "\n";
        }
    }
    return out;
}

namespace {

std::string rounded4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
}

}  // namespace

std::string report_to_markdown(const MetricsReport& r,
                               const std::vector<std::string>* class_names) {
    std::string out;
    out += "| class | precision | recall | f1 |\n";
    out += "|---|---|---|---|\n";
    for (int c = 0; c < r.num_classes; ++c) {
        std::string name = (class_names && c < static_cast<int>(class_names->size()))
                               ? (*class_names)[static_cast<size_t>(c)]
                               : std::to_string(c);
        out += "| " + name + " | " + rounded4(r.precision[static_cast<size_t>(c)]) + " | " +
               rounded4(r.recall[static_cast<size_t>(c)]) + " | " +
               rounded4(r.f1[static_cast<size_t>(c)]) + " |\n";
    }
    out += "| macro | " + rounded4(r.macro_precision) + " | " + rounded4(r.macro_recall) +
           " | " + rounded4(r.macro_f1) + " |\n";
    out += "\naccuracy: " + rounded4(r.accuracy) + " (n = " + std::to_string(r.n) + ")\n";
    return out;
}

void write_report(const MetricsReport& report, const std::string& path, ReportFormat format,
                  const std::vector<std::string>* class_names) {
    write_text_file(path, format == ReportFormat::Tsv
                              ? report_to_tsv(report)
                              : report_to_markdown(report, class_names));
}

MetricsReport read_report_tsv(const std::string& path) {
    MetricsReport r;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_char(line, '\t');
        const std::string& key = f[0];
        if (key == "n") r.n = parse_int(f.at(1), path);
        else if (key == "num_classes") {
            r.num_classes = static_cast<int>(parse_int(f.at(1), path));
            r.precision.assign(static_cast<size_t>(r.num_classes), 0.0);
            r.recall.assign(static_cast<size_t>(r.num_classes), 0.0);
            r.f1.assign(static_cast<size_t>(r.num_classes), 0.0);
            r.confusion.assign(static_cast<size_t>(r.num_classes),
                               std::vector<int64_t>(static_cast<size_t>(r.num_classes), 0));
        } else if (key == "accuracy") r.accuracy = parse_double(f.at(1), path);
        else if (key == "macro_precision") r.macro_precision = parse_double(f.at(1), path);
        else if (key == "macro_recall") r.macro_recall = parse_double(f.at(1), path);
        else if (key == "macro_f1") r.macro_f1 = parse_double(f.at(1), path);
        else if (key == "class") {
            size_t c = static_cast<size_t>(parse_int(f.at(1), path));
            r.precision.at(c) = parse_double(f.at(2), path);
            r.recall.at(c) = parse_double(f.at(3), path);
            r.f1.at(c) = parse_double(f.at(4), path);
        } else if (key == "confusion") {
            size_t g = static_cast<size_t>(parse_int(f.at(1), path));
            size_t p = static_cast<size_t>(parse_int(f.at(2), path));
            r.confusion.at(g).at(p) = parse_int(f.at(3), path);
        } else {
            throw std::runtime_error("eval: " + path + ": unknown row '" + key + "'");
        }
    }
    return r;
}

}  // namespace pqgcn::eval
