#include <doctest.h>

#include <cstring>

#include "secrecy/channel.hpp"
#include "secrecy/errors.hpp"

using namespace secrecy;

TEST_CASE("builtin transition tables") {
    const TwoWayChannel bmc = builtin_bmc();
    CHECK(bmc.p(1, 1, 1, 1, 1) == 1.0);
    CHECK(bmc.p(0, 1, 0, 0, 0) == 1.0);
    CHECK(bmc.p(0, 1, 1, 1, 1) == 0.0);

    const TwoWayChannel x = builtin_xor();
    CHECK(x.p(1, 0, 1, 1, 1) == 1.0);
    CHECK(x.p(1, 1, 0, 0, 0) == 1.0);
    CHECK(x.p(0, 0, 0, 0, 0) == 1.0);

    const TwoWayChannel a = builtin_adder();
    CHECK(a.z_size == 3);
    CHECK(a.p(1, 1, 2, 2, 2) == 1.0);
    CHECK(a.p(0, 1, 1, 1, 1) == 1.0);
    CHECK(a.p(0, 0, 0, 0, 0) == 1.0);
}

TEST_CASE("builtins are deterministic and pass validation") {
    for (const auto& ch : {builtin_bmc(), builtin_xor(), builtin_adder()}) {
        CHECK_NOTHROW(ch.validate());
        CHECK(ch.deterministic());
        // each input pair has exactly one unit entry
        for (int x1 = 0; x1 < ch.x1_size; ++x1)
            for (int x2 = 0; x2 < ch.x2_size; ++x2) {
                int ones = 0;
                for (std::size_t k = 0; k < ch.out_size(); ++k)
                    if (ch.transitions[ch.idx(x1, x2, 0, 0, 0) + k] == 1.0) ++ones;
                CHECK(ones == 1);
            }
    }
}

TEST_CASE("has_common_output") {
    CHECK(has_common_output(builtin_bmc()));
    CHECK(has_common_output(builtin_xor()));
    CHECK(has_common_output(builtin_adder()));

    // z is an independent uniform bit: outputs no longer coincide
    TwoWayChannel ch;
    ch.name = "split";
    ch.x1_size = ch.x2_size = 2;
    ch.y1_size = ch.y2_size = ch.z_size = 2;
    ch.transitions.assign(4 * ch.out_size(), 0.0);
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2) {
            const int y = x1 ^ x2;
            ch.transitions[ch.idx(x1, x2, y, y, 0)] = 0.5;
            ch.transitions[ch.idx(x1, x2, y, y, 1)] = 0.5;
        }
    ch.validate();
    CHECK_FALSE(has_common_output(ch));
}

TEST_CASE("serialization round-trip is bit exact") {
    for (const auto& ch : {builtin_bmc(), builtin_xor(), builtin_adder()}) {
        const TwoWayChannel back = load_channel(channel_to_json(ch));
        CHECK(back.x1_size == ch.x1_size);
        CHECK(back.z_size == ch.z_size);
        REQUIRE(back.transitions.size() == ch.transitions.size());
        CHECK(std::memcmp(back.transitions.data(), ch.transitions.data(),
                          ch.transitions.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("schema and validation failures") {
    nlohmann::json good = channel_to_json(builtin_xor());

    nlohmann::json bad_sum = good;
    bad_sum["rows"][0][0] = 0.98;
    CHECK_THROWS_AS(load_channel(bad_sum), ValidationError);

    // claims z_size=3 but rows keep binary-z length
    nlohmann::json bad_shape = good;
    bad_shape["z_size"] = 3;
    CHECK_THROWS_AS(load_channel(bad_shape), SchemaError);

    nlohmann::json missing = good;
    missing.erase("rows");
    CHECK_THROWS_AS(load_channel(missing), SchemaError);

    CHECK_THROWS_AS(load_channel(nlohmann::json::array()), SchemaError);

    nlohmann::json negative = good;
    negative["rows"][0][0] = -0.25;
    negative["rows"][0][1] = 1.25;
    CHECK_THROWS_AS(load_channel(negative), ValidationError);
}

TEST_CASE("builtin lookup") {
    CHECK(builtin_channel("xor").name == "xor");
    CHECK_THROWS_AS(builtin_channel("nope"), ValidationError);
}
