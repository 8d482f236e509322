#include "bprds/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace bprds {

namespace {

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void require_nonempty(const ConfusionMatrix& m) {
    if (m.total() <= 0)
        throw EvaluationError("confusion matrix is empty");
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(FramePtr frame) : frame_(std::move(frame)) {
    const auto k = static_cast<Eigen::Index>(frame_->size());
    counts_ = CountMatrix::Zero(k, k);
}

ConfusionMatrix::ConfusionMatrix(FramePtr frame, CountMatrix counts)
    : frame_(std::move(frame)), counts_(std::move(counts)) {
    const auto k = static_cast<Eigen::Index>(frame_->size());
    if (counts_.rows() != k || counts_.cols() != k)
        throw EvaluationError("confusion matrix must be K x K for its frame");
    if ((counts_.array() < 0).any())
        throw EvaluationError("confusion matrix counts must be nonnegative");
}

void ConfusionMatrix::accumulate(std::size_t truth, std::size_t prediction) {
    if (truth >= frame_->size() || prediction >= frame_->size())
        throw EvaluationError("label index outside the frame");
    ++counts_(static_cast<Eigen::Index>(truth), static_cast<Eigen::Index>(prediction));
}

void ConfusionMatrix::accumulate(std::string_view truth, std::string_view prediction) {
    try {
        accumulate(frame_->index_of(truth), frame_->index_of(prediction));
    } catch (const std::out_of_range& e) {
        throw EvaluationError(e.what());
    }
}

ConfusionMatrix& ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (!(*frame_ == *other.frame_))
        throw EvaluationError("cannot merge confusion matrices over different frames");
    counts_ += other.counts_;
    return *this;
}

double accuracy(const ConfusionMatrix& matrix) {
    require_nonempty(matrix);
    return static_cast<double>(matrix.counts().trace()) / static_cast<double>(matrix.total());
}

double f_score(const ConfusionMatrix& matrix, std::size_t class_index) {
    if (class_index >= matrix.frame().size())
        throw EvaluationError("class index outside the frame");
    return f_score(matrix, FocalSet::singleton(class_index));
}

double f_score(const ConfusionMatrix& matrix, FocalSet subset) {
    require_nonempty(matrix);
    if (!matrix.frame().owns(subset))
        throw EvaluationError("subset lies outside the frame");
    const auto& c = matrix.counts();
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const bool truth_in = subset.contains(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            const bool pred_in = subset.contains(static_cast<std::size_t>(j));
            if (truth_in && pred_in)
                tp += c(i, j);
            else if (pred_in)
                fp += c(i, j);
            else if (truth_in)
                fn += c(i, j);
        }
    }
    if (tp == 0)
        return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

EvalReport make_report(ConfusionMatrix matrix, std::size_t rejected, KernelType kernel, FusionRule rule,
                       bool discounting, std::uint64_t seed) {
    const std::size_t k = matrix.frame().size();
    const auto total = static_cast<double>(matrix.total()) + static_cast<double>(rejected);
    if (total <= 0)
        throw EvaluationError("nothing was evaluated");
    std::vector<double> per_class(k, 0.0);
    if (matrix.total() > 0)
        for (std::size_t i = 0; i < k; ++i)
            per_class[i] = f_score(matrix, i);
    double macro = 0.0;
    for (double f : per_class)
        macro += f;
    macro /= static_cast<double>(k);
    const double acc = static_cast<double>(matrix.counts().trace()) / total;
    return EvalReport{acc, std::move(per_class), macro, std::move(matrix), rejected, kernel, rule, discounting, seed};
}

std::string format_report(const EvalReport& report) {
    std::ostringstream out;
    const auto& frame = report.matrix.frame();
    out << "kernel: " << to_string(report.kernel) << "\n"
        << "rule: " << to_string(report.rule) << "\n"
        << "discounting: " << (report.discounting ? "on" : "off") << "\n"
        << "seed: " << report.seed << "\n"
        << "records: " << report.matrix.total() + static_cast<std::int64_t>(report.rejected) << "\n"
        << "rejected (total conflict): " << report.rejected << "\n"
        << "accuracy: " << fixed(report.accuracy) << "\n"
        << "macro F1: " << fixed(report.macro_f) << "\n\n";
    out << "class      F1\n";
    for (std::size_t i = 0; i < frame.size(); ++i) {
        std::string name = frame.label(i);
        name.resize(std::max<std::size_t>(name.size(), 10), ' ');
        out << name << ' ' << fixed(report.per_class_f[i]) << "\n";
    }
    out << "\nconfusion matrix (rows = truth, columns = prediction)\n";
    out << "          ";
    for (std::size_t j = 0; j < frame.size(); ++j) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%9s", frame.label(j).c_str());
        out << buf;
    }
    out << "\n";
    for (std::size_t i = 0; i < frame.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%-10s", frame.label(i).c_str());
        out << buf;
        for (std::size_t j = 0; j < frame.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%9lld",
                          static_cast<long long>(report.matrix.counts()(static_cast<Eigen::Index>(i),
                                                                        static_cast<Eigen::Index>(j))));
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

std::string format_report_csv(const EvalReport& report) {
    std::ostringstream out;
    out.precision(17);
    const auto& frame = report.matrix.frame();
    out << "kernel," << to_string(report.kernel) << "\n"
        << "rule," << to_string(report.rule) << "\n"
        << "discounting," << (report.discounting ? 1 : 0) << "\n"
        << "seed," << report.seed << "\n"
        << "rejected," << report.rejected << "\n"
        << "accuracy," << report.accuracy << "\n"
        << "macro_f," << report.macro_f << "\n";
    for (std::size_t i = 0; i < frame.size(); ++i)
        out << "f_" << frame.label(i) << "," << report.per_class_f[i] << "\n";
    out << "truth\\prediction";
    for (std::size_t j = 0; j < frame.size(); ++j)
        out << "," << frame.label(j);
    out << "\n";
    for (std::size_t i = 0; i < frame.size(); ++i) {
        out << frame.label(i);
        for (std::size_t j = 0; j < frame.size(); ++j)
            out << "," << report.matrix.counts()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        out << "\n";
    }
    return out.str();
}

std::vector<SweepEntry> sweep_report(std::vector<SweepEntry> results) {
    if (results.empty())
        throw EvaluationError("sweep produced no results");
    std::stable_sort(results.begin(), results.end(),
                     [](const SweepEntry& a, const SweepEntry& b) { return a.accuracy > b.accuracy; });
    return results;
}

std::string format_sweep_table(const std::vector<SweepEntry>& rows) {
    std::ostringstream out;
    out << "rank  kernel        accuracy\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%4zu  %-12s  %s\n", i + 1, std::string(to_string(rows[i].kernel)).c_str(),
                      fixed(rows[i].accuracy).c_str());
        out << buf;
    }
    return out.str();
}

std::string format_sweep_csv(const std::vector<SweepEntry>& rows) {
    std::ostringstream out;
    out.precision(17);
    out << "kernel,accuracy\n";
    for (const auto& row : rows)
        out << to_string(row.kernel) << "," << row.accuracy << "\n";
    return out.str();
}

}  // namespace bprds
