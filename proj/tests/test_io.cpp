#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "support.hpp"
#include "vexmax/error.hpp"
#include "vexmax/io.hpp"

using namespace vexmax;

TEST_CASE("space files") {
    const auto j = Json::parse(R"({"points":["a","b","c"],"coords":[0,0.5,1],"metric":"euclidean","mass":[1,1,1]})");
    const auto spec = space_spec_from_json(j);
    const auto s = spec.build();
    CHECK(s.size() == 3);
    CHECK(s.dist(0, 2) == 1.0);
    CHECK(s.a0() == 1.0);
    const auto back = space_spec_from_json(space_spec_to_json(spec));
    CHECK(back.points == spec.points);
    CHECK(back.coords == spec.coords);

    const auto d = Json::parse(R"({"points":[0,1],"dist":[[0,1],[1,0]],"mass":[1,1]})");
    const auto two = space_spec_from_json(d).build();
    CHECK(two.c_mu() == 2.0);
    CHECK(space_spec_to_json(space_spec_from_json(d)) == d);

    const auto plane = Json::parse(R"({"coords":[[0,0],[3,4]],"mass":[1,2]})");
    CHECK(space_spec_from_json(plane).build().dist(0, 1) == 5.0);

    CHECK_THROWS_AS(space_spec_from_json(Json::parse(R"({"coords":[0,1]})")), ValidationError);
    CHECK_THROWS_AS(space_spec_from_json(Json::parse(R"({"mass":[1,1]})")), ValidationError);
    CHECK_THROWS_AS(space_spec_from_json(Json::parse(R"({"coords":[0,1],"metric":"taxicab","mass":[1,1]})")),
                    ValidationError);
    CHECK_THROWS_AS((void)space_spec_from_json(Json::parse(R"({"dist":[[0,1],[2,0]],"mass":[1,1]})")).build(),
                    ValidationError);
    CHECK_THROWS_AS(space_spec_from_json(Json::parse(R"({"dist":[[0,1]],"mass":[1,1]})")), ValidationError);
    CHECK_THROWS_AS(space_spec_from_json(Json::parse(R"({"coords":[0,"x"],"mass":[1,1]})")), ValidationError);
}

TEST_CASE("exponent files") {
    const auto s = vt::line(16);
    CHECK(exponent_from_json(Json::parse(R"({"type":"constant","value":3})"), s).is_constant());
    const auto v = exponent_from_json(Json::parse(R"({"type":"values","values":[1,2]})"),
                                      build_space({0, 1, 1, 0}, {1, 1}));
    CHECK(v[1] == 2.0);
    const auto lh = exponent_from_json(
        Json::parse(R"({"type":"log-holder","p_inf":2,"amplitude":1,"base_point":3})"), s);
    const auto ref = vt::lh_exponent(s, 2.0, 1.0, 3);
    for (std::size_t x = 0; x < 16; ++x) CHECK(lh[x] == ref[x]);
    CHECK(lh.p_inf() == 2.0);
    CHECK_THROWS_AS(exponent_from_json(Json::parse(R"({"type":"values","values":[1,2]})"), s), ValidationError);
    CHECK_THROWS_AS(exponent_from_json(Json::parse(R"({"type":"spline"})"), s), ValidationError);
    CHECK_THROWS_AS(exponent_from_json(Json::parse(R"({"value":2})"), s), ValidationError);
    CHECK_THROWS_AS(
        exponent_from_json(Json::parse(R"({"type":"log-holder","p_inf":2,"amplitude":1,"base_point":16})"), s),
        ValidationError);
}

TEST_CASE("weight files") {
    const auto s = vt::line(8);
    CHECK(weight_from_json(Json::parse(R"({"type":"constant"})"), s) == PointFn(8, 1.0));
    CHECK(weight_from_json(Json::parse(R"({"type":"power","a":0,"base_point":2})"), s) == PointFn(8, 1.0));
    const auto w = weight_from_json(Json::parse(R"({"type":"power","a":-1,"base_point":0})"), s);
    CHECK(w[0] == 8.0);
    CHECK(w[1] == 8.0);
    CHECK(w[4] == 2.0);
    const auto wd = weight_from_json(Json::parse(R"({"type":"power","a":1,"base_point":0,"d_min":0.5})"), s);
    CHECK(wd[1] == 0.5);
    CHECK(wd[7] == 0.875);
    CHECK_THROWS_AS(weight_from_json(Json::parse(R"({"type":"values","values":[1,1,1,1,1,1,1,0]})"), s),
                    ValidationError);
    CHECK_THROWS_AS(weight_from_json(Json::parse(R"({"type":"power","a":1,"d_min":0})"), s), ValidationError);
}

TEST_CASE("function files") {
    CHECK(function_from_json(Json::parse("[1,2,3]"), 3) == PointFn{1, 2, 3});
    CHECK(function_from_json(Json::parse(R"({"values":[0.5]})"), 1) == PointFn{0.5});
    CHECK_THROWS_AS(function_from_json(Json::parse("[1,2]"), 3), ValidationError);
}

TEST_CASE("fnv1a hashes") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("file round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "vexmax_io_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "s.json").string();
    write_text_file(path, R"({"coords":[0,1],"mass":[1,1]})");
    CHECK(read_json_file(path)["mass"].size() == 2);
    write_text_file(path, "{not json");
    CHECK_THROWS_AS(read_json_file(path), ValidationError);
    CHECK_THROWS_AS(read_text_file((dir / "missing.json").string()), ValidationError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("dumps") {
    const auto s = vt::line(8);
    const auto g = build_grid(s);
    const auto gj = grid_to_json(g);
    CHECK(gj["generations"].size() == 4);
    CHECK(gj["generations"][1]["cubes"][1]["members"] == Json::parse("[4,5,6,7]"));

    PointFn f(8, 0.0);
    f[3] = 1.0;
    const PointFn one(8, 1.0);
    const auto dj = decomposition_to_json(g, cz_decompose(g, s, 0.0, one, f, 0.4));
    CHECK(dj["cubes"].size() == 1);
    CHECK(dj["cubes"][0]["members"] == Json::parse("[2,3]"));
    CHECK(dj["cubes"][0]["average"] == 0.5);

    const auto sj = stack_to_json(g, cz_stack(g, s, 0.0, one, f, 4.0));
    CHECK(sj["k0"] == -1);
    CHECK(sj["levels"][0]["cubes"][0]["core"] == Json::parse("[2,3]"));

    const auto m = fractional_maximal(s, 0.0, f);
    CHECK(maximal_to_json(m)["points"].size() == 8);
    CHECK(maximal_to_csv(m).rfind("point,value,witness\n", 0) == 0);
    CHECK(ball_to_json(s, m.witness[3])["members"] == Json::parse("[3]"));
}
