#include "bprds/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bprds/classifier.hpp"
#include "bprds/evaluation.hpp"
#include "bprds/model_io.hpp"
#include "bprds/nslkdd.hpp"

#ifndef BPRDS_DEFAULT_MAPPING_FILE
#define BPRDS_DEFAULT_MAPPING_FILE ""
#endif

namespace bprds::cli {

namespace {

constexpr const char* kMappingEnv = "BPRDS_MAPPING_FILE";

struct CommonOptions {
    std::string mapping_file;
    std::string labels = "five";
    bool machine_readable = false;
};

struct TrainOptions {
    std::vector<std::string> kernels;
    std::vector<std::string> rules;
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    bool no_discounting = false;
    double subsample = 1.0;
    std::size_t cap = 20000;
    double bandwidth = 0.0;
    bool minmax = false;
};

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width)
        s.resize(width, ' ');
    return s;
}

AttackMapping resolve_mapping(const CommonOptions& common) {
    std::string path = common.mapping_file;
    if (path.empty())
        if (const char* env = std::getenv(kMappingEnv); env && *env)
            path = env;
    if (path.empty())
        path = BPRDS_DEFAULT_MAPPING_FILE;
    if (path.empty())
        throw ParseError(0, "no attack mapping file: pass --mapping-file or set " + std::string(kMappingEnv));
    return AttackMapping::load(path);
}

Dataset load_labeled(const std::string& path, const CommonOptions& common, LabelScheme scheme) {
    Dataset data = parse_file(path);
    assign_labels(data, resolve_mapping(common), scheme);
    return data;
}

TrainConfig make_config(const TrainOptions& options, LabelScheme scheme) {
    TrainConfig config;
    if (!options.kernels.empty()) {
        config.kernels.clear();
        for (const auto& k : options.kernels)
            config.kernels.push_back(parse_kernel(k));
    }
    if (!options.rules.empty()) {
        config.rules.clear();
        for (const auto& r : options.rules)
            config.rules.push_back(parse_fusion_rule(r));
    }
    config.folds = options.folds;
    config.seed = options.seed;
    config.discounting = !options.no_discounting;
    config.scheme = scheme;
    config.subsample_fraction = options.subsample;
    config.subsample_cap = options.cap;
    if (options.bandwidth > 0.0)
        config.bandwidth = options.bandwidth;
    config.minmax = options.minmax;
    config.validate();
    return config;
}

Dataset prepare_training_data(const std::string& path, const CommonOptions& common, const TrainConfig& config,
                              std::ostream& err) {
    Dataset data = load_labeled(path, common, config.scheme);
    if (config.subsample_fraction < 1.0)
        data = subsample(data, config.subsample_fraction, config.seed);
    for (const auto& warning : stratified_folds(data, config.folds, config.seed).warnings)
        err << "warning: " << warning << "\n";
    return data;
}

void add_train_flags(CLI::App* cmd, TrainOptions& options) {
    cmd->add_option("--kernels,--kernel", options.kernels, "Kernel grid (comma separated)")->delimiter(',');
    cmd->add_option("--rules,--rule", options.rules, "Fusion rule grid: dempster, conjunctive, yager, dubois-prade")
        ->delimiter(',');
    cmd->add_option("--folds", options.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
    cmd->add_option("--seed", options.seed, "Seed for subsampling and fold assignment");
    cmd->add_flag("--no-discounting", options.no_discounting, "Skip contextual discounting (all coefficients 1)");
    cmd->add_option("--subsample", options.subsample, "Stratified fraction of the training file to keep")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--cap", options.cap, "Max training values per class-attribute density");
    cmd->add_option("--bandwidth", options.bandwidth, "Fixed bandwidth instead of Silverman's rule");
    cmd->add_flag("--minmax", options.minmax, "Min-max scale numeric attributes");
}

void print_counts(std::ostream& out, const Dataset& data, const std::string& path, bool machine) {
    const auto counts = class_counts(data);
    std::size_t total = 0;
    for (auto c : counts)
        total += c;
    if (machine) {
        out << "class,count\n";
        for (std::size_t k = 0; k < counts.size(); ++k)
            out << data.frame->label(k) << "," << counts[k] << "\n";
        out << "total," << total << "\n";
        return;
    }
    out << "file: " << path << "\n";
    out << pad("class", 10) << "count\n";
    for (std::size_t k = 0; k < counts.size(); ++k)
        out << pad(data.frame->label(k), 10) << counts[k] << "\n";
    out << pad("total", 10) << total << "\n";
}

void print_training_summary(std::ostream& out, const TrainedModel& model) {
    out << "grid (mean cross-validated accuracy, no discounting)\n";
    for (const auto& cell : model.metadata.grid) {
        out << "  " << pad(std::string(to_string(cell.kernel)), 13) << pad(std::string(to_string(cell.rule)), 13)
            << (cell.failed ? std::string("failed") : fixed(cell.accuracy)) << "\n";
    }
    out << "selected kernel: " << to_string(model.kernel) << "\n";
    out << "selected rule: " << to_string(model.rule) << "\n";
    out << "discounting: " << (model.metadata.discounting ? "on" : "off") << " (" << model.discounts.size()
        << " coefficients)\n";
    out << "training records: " << model.metadata.training_records << "\n";
}

void print_discount_summary(std::ostream& out, const TrainedModel& model, bool machine) {
    const Frame& frame = *model.frame;
    if (machine) {
        out << "attribute,subset,alpha\n";
        for (std::size_t p = 0; p < model.discounts.attribute_count(); ++p)
            for (const auto& [set, alpha] : model.discounts.row(p)) {
                std::string subset = frame.format(set);
                for (char& c : subset)
                    if (c == ',')
                        c = ' ';
                out << model.schema[p].name << "," << subset << "," << alpha << "\n";
            }
        return;
    }
    out << "discount table: " << model.discounts.size() << " coefficients over "
        << model.discounts.attribute_count() << " attributes\n";
    out << pad("attribute", 30) << pad("min", 8) << pad("mean", 8);
    for (const auto& label : frame.labels())
        out << pad(label, 8);
    out << "\n";
    for (std::size_t p = 0; p < model.discounts.attribute_count(); ++p) {
        const auto& row = model.discounts.row(p);
        double lo = 1.0, sum = 0.0;
        for (const auto& [set, alpha] : row) {
            lo = std::min(lo, alpha);
            sum += alpha;
        }
        out << pad(p < model.schema.size() ? model.schema[p].name : std::to_string(p), 30) << pad(fixed(lo, 3), 8)
            << pad(fixed(row.empty() ? 1.0 : sum / static_cast<double>(row.size()), 3), 8);
        for (std::size_t k = 0; k < frame.size(); ++k)
            out << pad(fixed(model.discounts.coefficient(p, FocalSet::singleton(k)), 3), 8);
        out << "\n";
    }
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        fn();
        return kOk;
    } catch (const UnknownLabelError& e) {
        err << "error: " << e.what() << "\n";
        return kParseFailure;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kParseFailure;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << "\n";
        return kSchemaFailure;
    } catch (const ModelFormatError& e) {
        err << "model file error: " << e.what() << "\n";
        return kModelFileFailure;
    } catch (const TrainingError& e) {
        err << "training error: " << e.what() << "\n";
        return kTrainingFailure;
    } catch (const DensityError& e) {
        err << "training error (density): " << e.what() << "\n";
        return kTrainingFailure;
    } catch (const BeliefError& e) {
        err << "training error (belief): " << e.what() << "\n";
        return kTrainingFailure;
    } catch (const FusionConflictError& e) {
        err << "classification error: " << e.what() << "\n";
        return kTrainingFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evidential (Dempster-Shafer) intrusion detection on NSL-KDD data"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file; command-line flags take precedence");

    CommonOptions common;
    app.add_option("--mapping-file", common.mapping_file,
                   "Attack name to category table (default: $" + std::string(kMappingEnv) + " or the bundled file)");
    auto* labels_option = app.add_option("--labels", common.labels, "Label scheme: five or binary");
    app.add_flag("--machine-readable", common.machine_readable, "Emit comma-separated output");

    std::string data_path, train_path, test_path, model_path;
    TrainOptions train_options;
    double test_subsample = 1.0;

    auto* stats = app.add_subcommand("stats", "Per-category record counts of a data file");
    stats->add_option("data", data_path, "NSL-KDD file")->required();

    auto* train_cmd = app.add_subcommand("train", "Fit a model (kernel/rule selection, discounting, densities)");
    train_cmd->add_option("train", train_path, "Training file")->required();
    train_cmd->add_option("--model", model_path, "Output model file")->required();
    add_train_flags(train_cmd, train_options);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Accuracy, F-scores and confusion matrix on a labeled file");
    evaluate_cmd->add_option("test", test_path, "Labeled test file")->required();
    evaluate_cmd->add_option("--model", model_path, "Model file")->required();
    evaluate_cmd->add_option("--subsample", test_subsample, "Stratified fraction of the test file")
        ->check(CLI::Range(0.0, 1.0));
    evaluate_cmd->add_option("--seed", train_options.seed, "Seed for test subsampling");

    auto* predict_cmd = app.add_subcommand("predict", "Per-record label and pignistic probabilities");
    predict_cmd->add_option("data", data_path, "Input file, labeled or not")->required();
    predict_cmd->add_option("--model", model_path, "Model file")->required();

    auto* sweep_cmd = app.add_subcommand("sweep-kernels", "Train and evaluate once per kernel, rank by accuracy");
    sweep_cmd->add_option("train", train_path, "Training file")->required();
    sweep_cmd->add_option("test", test_path, "Labeled test file")->required();
    sweep_cmd->add_option("--test-subsample", test_subsample, "Stratified fraction of the test file")
        ->check(CLI::Range(0.0, 1.0));
    add_train_flags(sweep_cmd, train_options);

    auto* inspect_cmd = app.add_subcommand("inspect-model", "Print kernel, rule and discount-table summary");
    inspect_cmd->add_option("--model", model_path, "Model file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    LabelScheme scheme;
    try {
        scheme = parse_label_scheme(common.labels);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    if (stats->parsed()) {
        return guarded(err, [&] {
            const Dataset data = load_labeled(data_path, common, scheme);
            print_counts(out, data, data_path, common.machine_readable);
        });
    }

    if (train_cmd->parsed()) {
        return guarded(err, [&] {
            const TrainConfig config = make_config(train_options, scheme);
            const Dataset data = prepare_training_data(train_path, common, config, err);
            const TrainedModel model = bprds::train(data, config);
            save_model(model_path, model);
            print_training_summary(out, model);
            out << "model written to " << model_path << "\n";
        });
    }

    if (evaluate_cmd->parsed()) {
        return guarded(err, [&] {
            const TrainedModel model = load_model(model_path);
            if (labels_option->count() > 0 && scheme != model.scheme)
                throw SchemaError("--labels " + common.labels + " does not match the model's " +
                                  std::string(to_string(model.scheme)) + " scheme");
            Dataset test = load_labeled(test_path, common, model.scheme);
            if (test_subsample < 1.0)
                test = subsample(test, test_subsample, train_options.seed);
            const auto result = bprds::evaluate(model, test);
            out << (common.machine_readable ? format_report_csv(result.report) : format_report(result.report));
        });
    }

    if (predict_cmd->parsed()) {
        return guarded(err, [&] {
            const TrainedModel model = load_model(model_path);
            const Dataset data = parse_file(data_path);
            check_schema(model, data);
            const std::size_t k = model.frame->size();
            char buf[40];
            for (std::size_t i = 0; i < data.size(); ++i) {
                out << i;
                try {
                    const auto prediction = classify(data.records[i], model);
                    out << "," << prediction.label;
                    for (Eigen::Index j = 0; j < prediction.pignistic.size(); ++j) {
                        std::snprintf(buf, sizeof buf, "%.9g", prediction.pignistic[j]);
                        out << "," << buf;
                    }
                } catch (const FusionConflictError& e) {
                    out << ",rejected";
                    for (std::size_t j = 0; j < k; ++j)
                        out << ",nan";
                    err << "record " << i << ": " << e.what() << "\n";
                }
                out << "\n";
            }
        });
    }

    if (sweep_cmd->parsed()) {
        return guarded(err, [&] {
            TrainConfig config = make_config(train_options, scheme);
            const Dataset train_data = prepare_training_data(train_path, common, config, err);
            Dataset test = load_labeled(test_path, common, scheme);
            if (test_subsample < 1.0)
                test = subsample(test, test_subsample, config.seed);
            const auto kernels = config.kernels;
            std::vector<SweepEntry> entries;
            for (KernelType kernel : kernels) {
                config.kernels = {kernel};
                try {
                    const TrainedModel model = bprds::train(train_data, config);
                    const auto result = bprds::evaluate(model, test);
                    err << "kernel " << to_string(kernel) << ": rule " << to_string(model.rule) << ", accuracy "
                        << fixed(result.report.accuracy) << "\n";
                    entries.push_back({kernel, result.report.accuracy});
                } catch (const std::exception& e) {
                    err << "kernel " << to_string(kernel) << " failed: " << e.what() << "\n";
                }
            }
            if (entries.empty())
                throw TrainingError("every kernel in the sweep failed");
            const auto rows = sweep_report(std::move(entries));
            out << (common.machine_readable ? format_sweep_csv(rows) : format_sweep_table(rows));
        });
    }

    if (inspect_cmd->parsed()) {
        return guarded(err, [&] {
            const TrainedModel model = load_model(model_path);
            if (!common.machine_readable) {
                out << "classes:";
                for (const auto& label : model.frame->labels())
                    out << " " << label;
                out << "\nattributes: " << model.schema.size() << "\n";
                out << "kernel: " << to_string(model.kernel) << "\n";
                out << "rule: " << to_string(model.rule) << "\n";
                out << "seed: " << model.metadata.seed << ", folds: " << model.metadata.folds
                    << ", discounting: " << (model.metadata.discounting ? "on" : "off") << "\n";
            }
            print_discount_summary(out, model, common.machine_readable);
        });
    }

    return kUsage;
}

}  // namespace bprds::cli
