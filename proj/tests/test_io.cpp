#include "fewzeros/io.hpp"

#include <gtest/gtest.h>

using namespace fewzeros;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_spec(text);
    } catch (const SpecError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(SpecJson, ModesFromLiterals) {
    const auto ints = parse_spec(R"({"n":1,"equations":[{"support":[[0],[2]],"variances":[1,3]}]})");
    EXPECT_EQ(ints.mode, GeometryMode::exact);
    const auto rat = parse_spec(R"({"n":1,"equations":[{"support":[[0],["1/3"],["0.25"]],"variances":[1,"1/2",2]}]})");
    EXPECT_EQ(rat.mode, GeometryMode::exact);
    EXPECT_EQ(rat.equations[0].support[1][0], Rational(1, 3));
    EXPECT_EQ(rat.equations[0].support[2][0], Rational(1, 4));
    const auto flt = parse_spec(R"({"n":1,"equations":[{"support":[[0],[0.5]],"variances":[1,1]}]})");
    EXPECT_EQ(flt.mode, GeometryMode::floating);
    const auto forced = parse_spec(R"({"n":1,"mode":"float","equations":[{"support":[[0],[1]],"variances":[1,1]}]})");
    EXPECT_EQ(forced.mode, GeometryMode::floating);
}

TEST(SpecJson, FieldPathDiagnostics) {
    EXPECT_NE(error_of(R"({"n":1})").find("equations"), std::string::npos);
    EXPECT_NE(error_of(R"({"n":0,"equations":[]})").find("n:"), std::string::npos);
    EXPECT_NE(error_of(R"({"n":1,"equations":[{"support":[[0],["x"]],"variances":[1,1]}]})").find("equations[0].support[1][0]"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"n":1,"equations":[{"support":[[0],[1]],"variances":[1,-1]}]})").find("variances[1]"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"n":1,"equations":[{"support":[[0],[0]],"variances":[1,1]}]})").find("duplicate"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"n":1,"equations":[{"support":[[0],[true]],"variances":[1,1]}]})").find("boolean"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"n":1,"equations":[{"support":[[0]],"variances":[1,1]}]})").find("one entry per exponent"),
              std::string::npos);
    EXPECT_NE(error_of("{\"n\":1,\n\"equations\": [").find("line 2"), std::string::npos);
}

TEST(SpecJson, RoundTripIsExact) {
    for (const char* text : {
             R"({"n":2,"equations":[{"support":[[0,0],["1/2",0],[0,"3/2"],["0.75","1/3"]],"variances":[1,"2","1/4",1]},
                                    {"support":[[0,0],[1,0],[0,1]],"variances":[1,1,1]}]})",
             R"({"n":1,"equations":[{"support":[[0],[0.1],[2.25]],"variances":[1,0.3,2.0]}]})",
             R"({"n":1,"equations":[{"support":[[0],[123456789012345678901234567890]],"variances":[1,1]}]})"}) {
        const auto spec = parse_spec(text);
        const auto again = parse_spec(spec_to_json(spec).dump());
        EXPECT_EQ(again, spec);
        EXPECT_EQ(spec_to_json(again).dump(), spec_to_json(spec).dump());
    }
}

TEST(SystemJson, RoundTrip) {
    const auto spec = parse_spec(R"({"n":1,"equations":[{"support":[[0],[3]],"variances":[1,2]}]})");
    const auto sys = FewnomialSystem::make(spec, {{0.25, -1.5}});
    const auto back = system_from_json(Json::parse(system_to_json(sys).dump()));
    EXPECT_EQ(back.spec, sys.spec);
    EXPECT_EQ(back.coefficients, sys.coefficients);
}

TEST(BoundsJson, Fields) {
    const auto spec = parse_spec(R"({"n":1,"equations":[{"support":[[0],[1],[2]],"variances":[1,1,1]}]})");
    const auto j = bounds_to_json(compute_bounds(spec));
    EXPECT_DOUBLE_EQ(j["lifted"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(j["kushnirenko"].get<double>(), 1.5);
    EXPECT_TRUE(j["notes"].is_array());
    EXPECT_TRUE(j.contains("polytope"));
    EXPECT_TRUE(j.contains("unmixed"));
}

TEST(CellsJson, BinomialPairAndSinglePoints) {
    RngStream s(1, 0);
    const auto pair = parse_spec(R"({"n":2,"equations":[{"support":[[0,0],[1,0]],"variances":[1,1]},
                                                         {"support":[[0,0],[0,1]],"variances":[1,1]}]})");
    const auto j = cells_report(pair, s);
    EXPECT_EQ(j["vertex_count"], 4);
    EXPECT_EQ(j["cells"].size(), 4u);
    EXPECT_TRUE(j["cover_check"]["ok"].get<bool>());

    const auto pts = parse_spec(R"({"n":2,"equations":[{"support":[[1,1]],"variances":[1]},
                                                        {"support":[[0,2]],"variances":[3]}]})");
    const auto p = cells_report(pts, s);
    EXPECT_EQ(p["vertex_count"], 1);
    EXPECT_TRUE(p["cells"][0]["inequalities"].empty());

    const auto unmixed = parse_spec(R"({"n":2,"equations":[{"support":[[0,0],[1,0],[0,1],[2,2]],"variances":[1,2,3,1]},
                                                            {"support":[[0,0],[1,0],[0,1],[2,2]],"variances":[1,2,3,1]}]})");
    const auto u = cells_report(unmixed, s);
    for (const auto& c : u["cells"]) EXPECT_TRUE(c["diagonal"].get<bool>());
    EXPECT_TRUE(u["cover_check"]["ok"].get<bool>());
}
