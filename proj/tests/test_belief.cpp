#include <doctest.h>

#include <random>

#include "bprds/belief.hpp"
#include "support/oracles.hpp"

using namespace bprds;

namespace {

const FramePtr& ab() {
    static const FramePtr f = make_frame({"a", "b"});
    return f;
}
const FramePtr& abc() {
    static const FramePtr f = make_frame({"a", "b", "c"});
    return f;
}

MassFunction m_a06() { return MassFunction(ab(), {{ab()->subset({"a"}), 0.6}, {ab()->omega(), 0.4}}); }
MassFunction m_b05() { return MassFunction(ab(), {{ab()->subset({"b"}), 0.5}, {ab()->omega(), 0.5}}); }
MassFunction m_chain() {
    const auto& f = abc();
    return MassFunction(f, {{f->subset({"c"}), 0.5}, {f->subset({"b", "c"}), 1.0 / 3}, {f->omega(), 1.0 / 6}});
}

}  // namespace

TEST_CASE("frame validation") {
    CHECK_THROWS_AS(make_frame({}), BeliefError);
    CHECK_THROWS_AS(make_frame({"a", "a"}), BeliefError);
    std::vector<std::string> many;
    for (int i = 0; i < 17; ++i)
        many.push_back("c" + std::to_string(i));
    CHECK_THROWS_AS(make_frame(many), BeliefError);
    many.pop_back();
    const Frame sixteen(many);
    CHECK(sixteen.omega().bits == 0xFFFFu);
    CHECK(sixteen.power_set_size() == 65536);
}

TEST_CASE("mass function invariants are enforced") {
    CHECK_THROWS_AS(MassFunction(ab(), {{ab()->omega(), 0.5}}), BeliefError);
    CHECK_THROWS_AS(MassFunction(ab(), {{FocalSet::empty(), 0.2}, {ab()->omega(), 0.8}}), BeliefError);
    CHECK_NOTHROW(MassFunction(ab(), {{FocalSet::empty(), 0.2}, {ab()->omega(), 0.8}}, true));
    CHECK_THROWS_AS(MassFunction(ab(), {{FocalSet{4}, 1.0}}), BeliefError);
    CHECK_THROWS_AS(MassFunction(ab(), {{ab()->omega(), -0.1}, {FocalSet{1}, 1.1}}), BeliefError);

    const MassFunction m(ab(), {{FocalSet{1}, 0.3}, {FocalSet{1}, 0.3}, {ab()->omega(), 0.4}, {FocalSet{2}, 0.0}});
    REQUIRE(m.entries().size() == 2);
    CHECK(m.mass(FocalSet{1}) == doctest::Approx(0.6));
    CHECK(m.mass(FocalSet{2}) == 0.0);
}

TEST_CASE("vacuous") {
    const auto v = vacuous(ab());
    REQUIRE(v.entries().size() == 1);
    CHECK(v.mass(ab()->omega()) == 1.0);
    CHECK(vacuous(make_frame({"a"})).mass(FocalSet{1}) == 1.0);
    const auto bet = pignistic(vacuous(abc()));
    for (int i = 0; i < 3; ++i)
        CHECK(bet[i] == doctest::Approx(1.0 / 3));
}

TEST_CASE("plausibility and credibility examples") {
    CHECK(plausibility(vacuous(ab()), FocalSet{1}) == 1.0);
    CHECK(plausibility(m_a06(), ab()->subset({"b"})) == doctest::Approx(0.4));
    CHECK(plausibility(m_a06(), FocalSet::empty()) == 0.0);

    CHECK(credibility(m_a06(), ab()->subset({"a"})) == doctest::Approx(0.6));
    CHECK(credibility(vacuous(ab()), ab()->subset({"a"})) == 0.0);
    CHECK(credibility(m_a06(), ab()->omega()) == doctest::Approx(1.0));

    CHECK_THROWS_AS(plausibility(m_a06(), FocalSet{4}), FrameMismatchError);
    CHECK_THROWS_AS(credibility(m_a06(), FocalSet{8}), FrameMismatchError);
}

TEST_CASE("combination examples") {
    const auto d = combine(m_a06(), m_b05(), FusionRule::Dempster);
    CHECK(d.mass(ab()->subset({"a"})) == doctest::Approx(3.0 / 7).epsilon(1e-12));
    CHECK(d.mass(ab()->subset({"b"})) == doctest::Approx(2.0 / 7).epsilon(1e-12));
    CHECK(d.mass(ab()->omega()) == doctest::Approx(2.0 / 7).epsilon(1e-12));

    const auto y = combine(m_a06(), m_b05(), FusionRule::Yager);
    CHECK(y.mass(ab()->subset({"a"})) == doctest::Approx(0.3));
    CHECK(y.mass(ab()->subset({"b"})) == doctest::Approx(0.2));
    CHECK(y.mass(ab()->omega()) == doctest::Approx(0.5));

    const auto c = combine(m_a06(), m_b05(), FusionRule::Conjunctive);
    CHECK(c.allows_empty());
    CHECK(c.mass(FocalSet::empty()) == doctest::Approx(0.3));

    const auto dp = combine(m_a06(), m_b05(), FusionRule::DuboisPrade);
    CHECK(dp.mass(ab()->omega()) == doctest::Approx(0.5));

    for (FusionRule rule : all_fusion_rules()) {
        const auto r = combine(m_chain(), vacuous(abc()), rule);
        CHECK(r.entries() == m_chain().entries());
    }
}

TEST_CASE("total conflict under Dempster is an error") {
    const MassFunction a(ab(), {{FocalSet{1}, 1.0}});
    const MassFunction b(ab(), {{FocalSet{2}, 1.0}});
    CHECK(conflict_degree(a, b) == 1.0);
    CHECK_THROWS_AS(combine(a, b, FusionRule::Dempster), TotalConflictError);
    CHECK(combine(a, b, FusionRule::Yager).mass(ab()->omega()) == 1.0);
    CHECK(combine(a, b, FusionRule::Conjunctive).mass(FocalSet::empty()) == 1.0);
    CHECK(combine(a, b, FusionRule::DuboisPrade).mass(ab()->omega()) == 1.0);
}

TEST_CASE("conflict degree examples") {
    CHECK(conflict_degree(m_a06(), vacuous(ab())) == 0.0);
    CHECK(conflict_degree(m_a06(), m_b05()) == doctest::Approx(0.3));
    CHECK_THROWS_AS(conflict_degree(m_a06(), vacuous(abc())), FrameMismatchError);
}

TEST_CASE("classical discounting") {
    const MassFunction m(ab(), {{FocalSet{1}, 0.5}, {ab()->omega(), 0.5}});
    CHECK(discount_classical(m, 1.0).entries() == m.entries());
    CHECK(discount_classical(m, 0.0).entries() == vacuous(ab()).entries());
    const auto d = discount_classical(m, 0.8);
    CHECK(d.mass(FocalSet{1}) == doctest::Approx(0.4));
    CHECK(d.mass(ab()->omega()) == doctest::Approx(0.6));
    CHECK_THROWS_AS(discount_classical(m, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(discount_classical(m, -0.1), std::invalid_argument);
}

TEST_CASE("contextual discounting") {
    const auto& f = abc();
    const auto m = m_chain();
    CHECK(discount_contextual(m, {}).entries() == m.entries());
    ContextualCoefficients zeros{{f->subset({"c"}), 0.0}, {f->subset({"b", "c"}), 0.0}};
    CHECK(discount_contextual(m, zeros).entries() == vacuous(f).entries());

    ContextualCoefficients alphas{{f->subset({"c"}), 0.9}, {f->subset({"b", "c"}), 0.5}};
    const auto d = discount_contextual(m, alphas);
    CHECK(d.mass(f->subset({"c"})) == doctest::Approx(0.45));
    CHECK(d.mass(f->subset({"b", "c"})) == doctest::Approx(1.0 / 6));
    CHECK(d.mass(f->omega()) == doctest::Approx(1.0 / 6 + 0.05 + 1.0 / 6));
    CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));

    ContextualCoefficients bad{{f->subset({"c"}), 1.2}};
    CHECK_THROWS_AS(discount_contextual(m, bad), std::invalid_argument);
}

TEST_CASE("pignistic and decision examples") {
    const auto bet_v = pignistic(vacuous(ab()));
    CHECK(bet_v[0] == 0.5);
    CHECK(bet_v[1] == 0.5);

    const MassFunction m(ab(), {{FocalSet{1}, 0.5}, {ab()->omega(), 0.5}});
    CHECK(pignistic(m)[0] == doctest::Approx(0.75));
    CHECK(pignistic(m)[1] == doctest::Approx(0.25));

    const auto bet = pignistic(m_chain());
    CHECK(bet[0] == doctest::Approx(1.0 / 18));
    CHECK(bet[1] == doctest::Approx(1.0 / 18 + 1.0 / 6));
    CHECK(bet[2] == doctest::Approx(0.5 + 1.0 / 6 + 1.0 / 18));

    CHECK(decide(m_chain()) == "c");
    CHECK(decide(vacuous(ab())) == "a");
    CHECK(decide(MassFunction(ab(), {{FocalSet{2}, 1.0}})) == "b");
}

TEST_CASE("pignistic renormalizes away mass on the empty set") {
    const MassFunction m(ab(), {{FocalSet::empty(), 0.5}, {FocalSet{1}, 0.25}, {ab()->omega(), 0.25}}, true);
    const auto bet = pignistic(m);
    CHECK(bet[0] == doctest::Approx(0.75));
    CHECK(bet[1] == doctest::Approx(0.25));
    const MassFunction all_empty(ab(), {{FocalSet::empty(), 1.0}}, true);
    CHECK(pignistic(all_empty)[0] == 0.5);
}

TEST_CASE("tiny masses are dropped and the rest renormalized") {
    const MassFunction m = make_normalized(ab(), {{FocalSet{1}, 1e-14}, {ab()->omega(), 1.0}});
    CHECK(m.entries().size() == 1);
    CHECK(m.mass(ab()->omega()) == 1.0);
}

TEST_CASE("combination matches the dense enumeration oracle") {
    std::mt19937_64 rng(11);
    for (std::size_t k = 2; k <= 4; ++k) {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < k; ++i)
            labels.push_back(std::string(1, static_cast<char>('a' + i)));
        const auto frame = make_frame(labels);
        for (int trial = 0; trial < 100; ++trial) {
            const auto m1 = oracle::random_mass(rng, frame);
            const auto m2 = oracle::random_mass(rng, frame);
            for (FusionRule rule : all_fusion_rules()) {
                if (rule == FusionRule::Dempster && conflict_degree(m1, m2) >= 1.0)
                    continue;
                const auto expected = oracle::combine(oracle::to_dense(m1), oracle::to_dense(m2), rule);
                const auto got = oracle::to_dense(combine(m1, m2, rule));
                for (std::size_t s = 0; s < expected.size(); ++s)
                    CHECK(std::abs(got[s] - expected[s]) < 1e-12);
            }
        }
    }
}

TEST_CASE("Pl/Cr duality and singleton-probability special case") {
    std::mt19937_64 rng(5);
    const auto& f = abc();
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = oracle::random_mass(rng, f);
        for (std::uint32_t a = 0; a < 8; ++a)
            CHECK(plausibility(m, FocalSet{a}) + credibility(m, f->complement(FocalSet{a})) ==
                  doctest::Approx(1.0).epsilon(1e-9));
    }
    const MassFunction p(f, {{FocalSet{1}, 0.2}, {FocalSet{2}, 0.3}, {FocalSet{4}, 0.5}});
    const auto bet = pignistic(p);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(plausibility(p, FocalSet::singleton(i)) == doctest::Approx(bet[static_cast<Eigen::Index>(i)]));
        CHECK(credibility(p, FocalSet::singleton(i)) == doctest::Approx(bet[static_cast<Eigen::Index>(i)]));
    }
}

TEST_CASE("rule names round-trip") {
    for (FusionRule rule : all_fusion_rules())
        CHECK(parse_fusion_rule(to_string(rule)) == rule);
    CHECK_THROWS_AS(parse_fusion_rule("murphy"), std::invalid_argument);
}
