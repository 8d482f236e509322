#ifndef BPRDS_TESTS_SYNTHETIC_HPP
#define BPRDS_TESTS_SYNTHETIC_HPP

// Seeded generators for NSL-KDD-shaped text and small custom-schema datasets.
// The official files are not redistributable here; these exercise the same
// code paths with controlled class structure.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bprds/nslkdd.hpp"

namespace synthetic {

struct NslKddSpec {
    /// Records per category: Normal, DoS, Probe, R2L, U2R.
    std::array<std::size_t, 5> counts{200, 150, 60, 30, 10};
    std::uint64_t seed = 7;
    bool with_difficulty = true;
    /// Replaces the label of the first record, e.g. with an unknown attack name.
    std::string first_label_override;
};

inline std::string nslkdd_text(const NslKddSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto rate = [&](double centre, double spread) {
        return std::round(std::clamp(centre + spread * gauss(rng), 0.0, 1.0) * 100.0) / 100.0;
    };
    auto count = [&](double centre, double spread, double hi) {
        return std::round(std::clamp(centre + spread * gauss(rng), 0.0, hi));
    };
    auto pick = [&](const std::vector<std::string>& options, const std::vector<double>& weights) {
        double u = unit(rng), acc = 0.0;
        for (std::size_t i = 0; i < options.size(); ++i) {
            acc += weights[i];
            if (u <= acc)
                return options[i];
        }
        return options.back();
    };

    const std::array<std::vector<std::string>, 5> attacks{{
        {"normal"},
        {"neptune", "smurf", "back"},
        {"satan", "ipsweep", "portsweep"},
        {"guess_passwd", "warezclient"},
        {"buffer_overflow", "rootkit"},
    }};
    const std::vector<std::string> protocols{"tcp", "udp", "icmp"};
    const std::vector<std::string> services{"http", "private", "ftp_data", "smtp", "ecr_i", "telnet", "other"};
    const std::vector<std::string> flags{"SF", "S0", "REJ", "RSTR"};

    std::vector<std::pair<std::size_t, std::string>> rows;
    for (std::size_t c = 0; c < 5; ++c) {
        for (std::size_t n = 0; n < spec.counts[c]; ++n) {
            const double shift = static_cast<double>(c);
            std::ostringstream line;
            line << count(2.0 + 10.0 * (c == 3), 3.0, 5000) << ',';
            line << pick(protocols, c == 2 ? std::vector<double>{0.3, 0.2, 0.5} : std::vector<double>{0.7, 0.2, 0.1})
                 << ',';
            line << pick(services, c == 0 ? std::vector<double>{0.5, 0.05, 0.15, 0.15, 0.05, 0.05, 0.05}
                                   : c == 1 ? std::vector<double>{0.1, 0.6, 0.05, 0.05, 0.1, 0.05, 0.05}
                                            : std::vector<double>{0.15, 0.2, 0.15, 0.1, 0.1, 0.2, 0.1})
                 << ',';
            line << pick(flags, c == 1 ? std::vector<double>{0.2, 0.6, 0.15, 0.05} : std::vector<double>{0.8, 0.05, 0.1, 0.05})
                 << ',';
            line << std::round(std::exp(5.0 + 0.6 * shift + 0.8 * gauss(rng))) << ',';  // src_bytes
            line << std::round(std::exp(6.0 - 0.5 * shift + 0.8 * gauss(rng))) << ',';  // dst_bytes
            line << 0 << ',';                                                           // land
            line << (c == 1 && unit(rng) < 0.1 ? 1 : 0) << ',';                         // wrong_fragment
            line << 0 << ',';                                                           // urgent
            line << count(0.2 + 1.5 * (c >= 3), 0.7, 30) << ',';                        // hot
            line << (c == 3 && unit(rng) < 0.3 ? 1 : 0) << ',';                         // num_failed_logins
            line << (unit(rng) < (c == 0 ? 0.7 : 0.2) ? 1 : 0) << ',';                  // logged_in
            line << count(0.1 + 2.0 * (c == 4), 0.5, 20) << ',';                        // num_compromised
            line << (c == 4 && unit(rng) < 0.5 ? 1 : 0) << ',';                         // root_shell
            line << 0 << ',';                                                           // su_attempted
            line << count(0.1 + 1.0 * (c == 4), 0.5, 20) << ',';                        // num_root
            line << count(0.1, 0.4, 10) << ',';                                         // num_file_creations
            line << 0 << ',';                                                           // num_shells
            line << count(0.1, 0.3, 5) << ',';                                          // num_access_files
            line << 0 << ',';                                                           // num_outbound_cmds
            line << 0 << ',';                                                           // is_host_login
            line << (c == 3 && unit(rng) < 0.4 ? 1 : 0) << ',';                         // is_guest_login
            line << count(10.0 + 80.0 * (c == 1) + 20.0 * (c == 2), 8.0, 511) << ',';   // count
            line << count(8.0 + 5.0 * shift, 6.0, 511) << ',';                          // srv_count
            line << rate(c == 1 ? 0.8 : 0.05, 0.15) << ',';                             // serror_rate
            line << rate(c == 1 ? 0.75 : 0.05, 0.15) << ',';                            // srv_serror_rate
            line << rate(c == 2 ? 0.5 : 0.05, 0.15) << ',';                             // rerror_rate
            line << rate(c == 2 ? 0.45 : 0.05, 0.15) << ',';                            // srv_rerror_rate
            line << rate(c == 0 ? 0.9 : 0.3 + 0.1 * shift, 0.15) << ',';                // same_srv_rate
            line << rate(0.1 + 0.05 * shift, 0.1) << ',';                               // diff_srv_rate
            line << rate(0.1, 0.1) << ',';                                              // srv_diff_host_rate
            line << count(150.0 + 20.0 * shift, 60.0, 255) << ',';                      // dst_host_count
            line << count(200.0 - 35.0 * shift, 50.0, 255) << ',';                      // dst_host_srv_count
            line << rate(0.8 - 0.12 * shift, 0.15) << ',';                              // dst_host_same_srv_rate
            line << rate(0.05 + 0.08 * shift, 0.1) << ',';                              // dst_host_diff_srv_rate
            line << rate(0.1 + 0.1 * (c == 2), 0.1) << ',';                             // dst_host_same_src_port_rate
            line << rate(0.05, 0.05) << ',';                                            // dst_host_srv_diff_host_rate
            line << rate(c == 1 ? 0.8 : 0.05, 0.15) << ',';                             // dst_host_serror_rate
            line << rate(c == 1 ? 0.8 : 0.05, 0.15) << ',';                             // dst_host_srv_serror_rate
            line << rate(c == 2 ? 0.5 : 0.05, 0.15) << ',';                             // dst_host_rerror_rate
            line << rate(c == 2 ? 0.5 : 0.05, 0.15) << ',';                             // dst_host_srv_rerror_rate
            const auto& names = attacks[c];
            line << names[static_cast<std::size_t>(unit(rng) * static_cast<double>(names.size())) % names.size()];
            if (spec.with_difficulty)
                line << ',' << 15 + static_cast<int>(unit(rng) * 7);
            rows.emplace_back(c, line.str());
        }
    }
    // Interleave classes so files do not arrive sorted by label.
    std::shuffle(rows.begin(), rows.end(), rng);
    std::string text;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string row = rows[i].second;
        if (i == 0 && !spec.first_label_override.empty()) {
            const std::size_t label_start = [&] {
                std::size_t pos = 0;
                for (int commas = 0; commas < 41; ++commas)
                    pos = row.find(',', pos) + 1;
                return pos;
            }();
            const std::size_t label_end = row.find(',', label_start);
            row.replace(label_start, label_end == std::string::npos ? std::string::npos : label_end - label_start,
                        spec.first_label_override);
        }
        text += row;
        text += '\n';
    }
    return text;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

inline bprds::AttackMapping bundled_mapping() { return bprds::AttackMapping::load(BPRDS_TEST_MAPPING_FILE); }

inline bprds::Dataset nslkdd_dataset(const NslKddSpec& spec) {
    std::istringstream in(nslkdd_text(spec));
    bprds::Dataset data = bprds::parse_stream(in);
    bprds::assign_labels(data, bundled_mapping(), bprds::LabelScheme::FiveClass);
    return data;
}

/// Labeled dataset over a custom all-numeric schema; `value(class, attribute, rng)` draws each cell.
template <typename Draw>
bprds::Dataset numeric_dataset(const bprds::FramePtr& frame, const std::vector<std::string>& attribute_names,
                               const std::vector<std::size_t>& per_class, std::uint64_t seed, Draw draw) {
    std::vector<std::pair<std::string, bprds::AttributeKind>> columns;
    for (const auto& name : attribute_names)
        columns.emplace_back(name, bprds::AttributeKind::Numeric);
    bprds::Dataset data;
    data.schema = bprds::AttributeSchema(columns);
    data.frame = frame;
    data.columns = attribute_names.size() + 1;
    std::mt19937_64 rng(seed);
    for (std::size_t c = 0; c < per_class.size(); ++c) {
        for (std::size_t n = 0; n < per_class[c]; ++n) {
            bprds::Record record;
            for (std::size_t p = 0; p < attribute_names.size(); ++p)
                record.numeric.push_back(draw(c, p, rng));
            record.label = frame->label(c);
            data.records.push_back(std::move(record));
            data.targets.push_back(c);
        }
    }
    return data;
}

}  // namespace synthetic

#endif  // BPRDS_TESTS_SYNTHETIC_HPP
