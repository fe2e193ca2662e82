#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "secrecy/channel.hpp"
#include "secrecy/errors.hpp"
#include "secrecy/pmf.hpp"
#include "secrecy/policy.hpp"

using namespace secrecy;

namespace {
const double kH14 = 2.0 - 0.75 * std::log2(3.0);  // binary entropy of 1/4

Pmf xor_uniform_joint() { return joint_from_policy(builtin_xor(), InputPolicy::iid_binary(0.5, 0.5)); }
}  // namespace

TEST_CASE("entropy basics") {
    Pmf bern_half({{"X", 2}}, {0.5, 0.5});
    CHECK(bern_half.entropy({"X"}) == doctest::Approx(1.0).epsilon(1e-15));

    Pmf bern_quarter({{"X", 2}}, {0.75, 0.25});
    CHECK(std::abs(bern_quarter.entropy({"X"}) - kH14) < 1e-12);

    Pmf point({{"X", 3}}, {0.0, 1.0, 0.0});
    CHECK(point.entropy({"X"}) == 0.0);
}

TEST_CASE("pmf validation") {
    CHECK_THROWS_AS(Pmf({{"X", 2}}, {0.6, 0.6}), ValidationError);
    CHECK_THROWS_AS(Pmf({{"X", 2}}, {1.5, -0.5}), ValidationError);
    CHECK_THROWS_AS(Pmf({{"X", 2}, {"X", 2}}, {0.25, 0.25, 0.25, 0.25}), ValidationError);
    CHECK_THROWS_AS(Pmf({{"X", 2}}, {0.25, 0.25, 0.5}), ValidationError);

    Pmf p({{"X", 2}, {"Y", 2}}, {0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS_AS(p.entropy({"Z"}), UnknownVariable);
    CHECK_THROWS_AS(p.mutual_info({"X"}, {"X"}), OverlappingSets);
    CHECK_THROWS_AS(p.mutual_info({"X"}, {"Y"}, {"Y"}), OverlappingSets);
}

TEST_CASE("conditional entropy examples") {
    const Pmf j = xor_uniform_joint();
    CHECK(j.conditional_entropy({"X1"}, {"Z"}) == doctest::Approx(1.0).epsilon(1e-12));
    // conditioning on a superset leaves zero uncertainty
    CHECK(j.conditional_entropy({"X1"}, {"X1", "Z"}) == 0.0);

    const Pmf a = joint_from_policy(builtin_adder(), InputPolicy::iid_binary(0.5, 0.5));
    CHECK(a.conditional_entropy({"X1"}, {"Z"}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mutual information examples") {
    Pmf copy({{"X", 2}, {"Y", 2}}, {0.5, 0.0, 0.0, 0.5});
    CHECK(copy.mutual_info({"X"}, {"Y"}) == doctest::Approx(1.0).epsilon(1e-12));

    const Pmf j = xor_uniform_joint();
    CHECK(j.mutual_info({"U1"}, {"Z"}) == 0.0);

    const Pmf b = joint_from_policy(builtin_bmc(), InputPolicy::iid_binary(0.5, 0.5));
    CHECK(std::abs(b.mutual_info({"U1", "U2"}, {"Z"}) - kH14) < 1e-12);
}

TEST_CASE("joint_from_policy examples") {
    const Pmf j = xor_uniform_joint();
    const Pmf z = j.marginal({"Z"});
    CHECK(z.table()[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(z.table()[1] == doctest::Approx(0.5).epsilon(1e-15));

    const Pmf b = joint_from_policy(builtin_bmc(), InputPolicy::iid_binary(0.5, 0.5));
    CHECK(b.marginal({"Z"}).table()[1] == doctest::Approx(0.25).epsilon(1e-15));

    // deterministic policy puts all mass on the all-zero outcome
    const Pmf d = joint_from_policy(builtin_bmc(), InputPolicy::iid_binary(0.0, 0.0));
    CHECK(d.entropy({"Q", "U1", "U2", "X1", "X2", "Y1", "Y2", "Z"}) == 0.0);

    // marginal over (X1, X2, Z) reproduces the weighted channel law
    const Pmf m = j.marginal({"X1", "X2", "Z"});
    CHECK(m.table()[0 * 4 + 0 * 2 + 0] == doctest::Approx(0.25));  // (0,0)->z=0
    CHECK(m.table()[0 * 4 + 1 * 2 + 1] == doctest::Approx(0.25));  // (0,1)->z=1

    CHECK_THROWS_AS(
        joint_from_policy(builtin_xor(), InputPolicy::iid({1.0}, {0.5, 0.5})),
        DimensionMismatch);
}

TEST_CASE("chain rule on random pmfs") {
    Rng rng(101);
    for (int it = 0; it < 200; ++it) {
        const Pmf p = oracles::random_pmf3(rng, 2 + static_cast<int>(rng.below(2)),
                                           2 + static_cast<int>(rng.below(2)),
                                           2 + static_cast<int>(rng.below(2)));
        const double lhs = p.mutual_info({"A", "B"}, {"C"});
        const double rhs = p.mutual_info({"A"}, {"C"}) + p.mutual_info({"B"}, {"C"}, {"A"});
        CHECK(std::abs(lhs - rhs) < 1e-10);
        CHECK(p.entropy({"A", "B", "C"}) >= 0.0);
        CHECK(p.mutual_info({"A"}, {"B"}) >= 0.0);
    }
}

TEST_CASE("mutual information matches the definition oracle") {
    Rng rng(202);
    for (int it = 0; it < 100; ++it) {
        const int ca = 2 + static_cast<int>(rng.below(3));
        const int cb = 2 + static_cast<int>(rng.below(3));
        const int cc = 2 + static_cast<int>(rng.below(2));
        const Pmf p = oracles::random_pmf3(rng, ca, cb, cc);
        const double lib = p.mutual_info({"A"}, {"B"});
        const double ref = oracles::mi_definition(p.table(), ca, cb, cc);
        CHECK(std::abs(lib - ref) < 1e-12);
    }
}

TEST_CASE("entropy maximized by the uniform law") {
    Pmf u({{"A", 2}, {"B", 3}}, std::vector<double>(6, 1.0 / 6.0));
    CHECK(u.entropy({"A", "B"}) == doctest::Approx(std::log2(6.0)).epsilon(1e-12));

    Rng rng(303);
    for (int it = 0; it < 50; ++it) {
        const Pmf p = oracles::random_pmf3(rng, 2, 3, 2);
        CHECK(p.entropy({"A", "B", "C"}) <= std::log2(12.0) + 1e-12);
    }
}

TEST_CASE("deterministic channels leave no output uncertainty given inputs") {
    Rng rng(404);
    for (const auto& ch : {builtin_bmc(), builtin_xor(), builtin_adder()}) {
        for (int it = 0; it < 20; ++it) {
            const InputPolicy pol = oracles::random_policy(
                rng, ch, 1 + static_cast<int>(rng.below(2)), rng.below(2) == 0);
            const Pmf j = joint_from_policy(ch, pol);
            CHECK(j.conditional_entropy({"Z"}, {"X1", "X2"}) < 1e-10);
        }
    }
}
