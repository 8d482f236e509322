#ifndef BPRDS_EVALUATION_HPP
#define BPRDS_EVALUATION_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bprds/belief.hpp"
#include "bprds/density.hpp"

namespace bprds {

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Rows are the true class, columns the predicted class, both in frame order.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(FramePtr frame);
    ConfusionMatrix(FramePtr frame, CountMatrix counts);

    void accumulate(std::size_t truth, std::size_t prediction);
    void accumulate(std::string_view truth, std::string_view prediction);
    /// Cell-wise sum; frames must match.
    ConfusionMatrix& merge(const ConfusionMatrix& other);

    const Frame& frame() const { return *frame_; }
    const FramePtr& frame_ptr() const { return frame_; }
    const CountMatrix& counts() const { return counts_; }
    std::int64_t total() const { return counts_.sum(); }

    friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
        return *a.frame_ == *b.frame_ && a.counts_ == b.counts_;
    }

private:
    FramePtr frame_;
    CountMatrix counts_;
};

double accuracy(const ConfusionMatrix& matrix);
/// F1 of one class; 0 when precision + recall is 0.
double f_score(const ConfusionMatrix& matrix, std::size_t class_index);
/// F1 of "truth in A" against "prediction in A" on the collapsed 2x2 table.
double f_score(const ConfusionMatrix& matrix, FocalSet subset);

struct EvalReport {
    double accuracy = 0.0;
    std::vector<double> per_class_f;
    double macro_f = 0.0;
    ConfusionMatrix matrix;
    /// Records the fusion could not classify (total conflict); counted as errors.
    std::size_t rejected = 0;
    KernelType kernel = KernelType::Normal;
    FusionRule rule = FusionRule::Dempster;
    bool discounting = true;
    std::uint64_t seed = 0;
};

EvalReport make_report(ConfusionMatrix matrix, std::size_t rejected, KernelType kernel, FusionRule rule,
                       bool discounting, std::uint64_t seed);
std::string format_report(const EvalReport& report);
/// "key,value" lines followed by the matrix rows.
std::string format_report_csv(const EvalReport& report);

struct SweepEntry {
    KernelType kernel;
    double accuracy;
};

/// Sorted by accuracy, descending; equal accuracies keep input order.
std::vector<SweepEntry> sweep_report(std::vector<SweepEntry> results);
std::string format_sweep_table(const std::vector<SweepEntry>& rows);
/// Two-column "kernel,accuracy" data for plotting.
std::string format_sweep_csv(const std::vector<SweepEntry>& rows);

}  // namespace bprds

#endif  // BPRDS_EVALUATION_HPP
