#include <doctest.h>

#include <random>

#include "bprds/evaluation.hpp"
#include "support/oracles.hpp"

using namespace bprds;

namespace {

const FramePtr& abc() {
    static const FramePtr f = make_frame({"a", "b", "c"});
    return f;
}

ConfusionMatrix example() {
    CountMatrix m(3, 3);
    m << 8, 1, 1, 2, 6, 2, 0, 2, 8;
    return ConfusionMatrix(abc(), m);
}

}  // namespace

TEST_CASE("accumulate") {
    ConfusionMatrix m(abc());
    m.accumulate(0, 0);
    CHECK(m.counts()(0, 0) == 1);
    m.accumulate("a", "b");
    CHECK(m.counts()(0, 1) == 1);
    CHECK(m.total() == 2);
    CHECK_THROWS(m.accumulate(3, 0));
    CHECK_THROWS(m.accumulate("a", "z"));
    CountMatrix negative = CountMatrix::Zero(3, 3);
    negative(1, 1) = -1;
    CHECK_THROWS_AS(ConfusionMatrix(abc(), negative), EvaluationError);
}

TEST_CASE("accuracy examples") {
    CHECK(accuracy(example()) == doctest::Approx(22.0 / 30));
    CHECK(accuracy(ConfusionMatrix(abc(), CountMatrix::Identity(3, 3) * 4)) == 1.0);
    CountMatrix off = CountMatrix::Ones(3, 3) - CountMatrix::Identity(3, 3);
    CHECK(accuracy(ConfusionMatrix(abc(), off)) == 0.0);
    CHECK_THROWS_AS(accuracy(ConfusionMatrix(abc())), EvaluationError);
}

TEST_CASE("f-score examples") {
    const auto m = example();
    CHECK(f_score(m, 0) == doctest::Approx(0.8));
    CHECK(f_score(m, abc()->subset({"b", "c"})) == doctest::Approx(0.9));
    CHECK(f_score(ConfusionMatrix(abc(), CountMatrix::Identity(3, 3)), 2) == 1.0);
    CountMatrix never_c = CountMatrix::Zero(3, 3);
    never_c(2, 0) = 5;
    never_c(0, 0) = 5;
    CHECK(f_score(ConfusionMatrix(abc(), never_c), 2) == 0.0);
    CHECK_THROWS_AS(f_score(ConfusionMatrix(abc()), 0), EvaluationError);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(f_score(m, FocalSet::singleton(i)) == f_score(m, i));
}

TEST_CASE("f-scores match the pair-stream oracle") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> pick(0, 2);
    for (int trial = 0; trial < 200; ++trial) {
        ConfusionMatrix m(abc());
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        const std::size_t n = 1 + trial % 40;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t t = pick(rng), p = pick(rng) == 0 ? t : pick(rng);
            pairs.emplace_back(t, p);
            m.accumulate(t, p);
        }
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(f_score(m, c) == oracle::pair_stream_f1(pairs, c));
    }
}

TEST_CASE("accuracy is invariant under a simultaneous permutation") {
    const auto m = example();
    const std::vector<int> perm{2, 0, 1};
    CountMatrix p(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            p(perm[i], perm[j]) = m.counts()(i, j);
    CHECK(accuracy(ConfusionMatrix(abc(), p)) == accuracy(m));
}

TEST_CASE("merge") {
    auto m = example();
    m.merge(example());
    CHECK(m.total() == 60);
    CHECK(accuracy(m) == doctest::Approx(22.0 / 30));
    CHECK_THROWS(m.merge(ConfusionMatrix(make_frame({"a", "b"}))));
}

TEST_CASE("report") {
    const auto r = make_report(example(), 0, KernelType::Box, FusionRule::Yager, true, 42);
    CHECK(r.accuracy == doctest::Approx(22.0 / 30));
    CHECK(r.per_class_f.size() == 3);
    CHECK(r.macro_f == doctest::Approx((r.per_class_f[0] + r.per_class_f[1] + r.per_class_f[2]) / 3));
    const auto text = format_report(r);
    CHECK(text.find("box") != std::string::npos);
    CHECK(text.find("yager") != std::string::npos);
    CHECK(format_report_csv(r).find("accuracy,") != std::string::npos);
    CHECK(format_report(r) == text);

    // Rejected records count against accuracy.
    const auto rejected = make_report(example(), 10, KernelType::Box, FusionRule::Dempster, true, 42);
    CHECK(rejected.accuracy == doctest::Approx(22.0 / 40));
}

TEST_CASE("sweep report") {
    const auto one = sweep_report({{KernelType::Box, 0.5}});
    CHECK(one.size() == 1);
    const auto rows = sweep_report({{KernelType::Box, 0.5},
                                    {KernelType::Normal, 0.7},
                                    {KernelType::Triangle, 0.5},
                                    {KernelType::Logistic, 0.9}});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].kernel == KernelType::Logistic);
    CHECK(rows[1].kernel == KernelType::Normal);
    CHECK(rows[2].kernel == KernelType::Box);
    CHECK(rows[3].kernel == KernelType::Triangle);
    CHECK(format_sweep_csv(rows).rfind("kernel,accuracy\nlogistic,", 0) == 0);
    const auto table = format_sweep_table(rows);
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);
    CHECK_THROWS(sweep_report({}));
}
