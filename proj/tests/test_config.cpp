#include <filesystem>

#include "doctest.h"
#include "fractube/config.hpp"

using namespace fractube;
using doctest::Approx;

namespace {

const char* kCantor = R"(# comment
label = "cantor"
dimension = 1

[[map]]
ratio = "1/3"
translation = [0.0]

[[map]]
ratio = "1/3"   # trailing comment
translation = ["2/3"]

[evaluation]
n_max = 500
eps_max = "1/6"
)";

std::string message(const std::string& text) {
    try {
        parse_config(text, "t.cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("expressions") {
    CHECK(evaluate_expression("1/3") == Approx(1.0 / 3));
    CHECK(evaluate_expression("-2^2") == Approx(-4.0));
    CHECK(evaluate_expression("2^3^2") == Approx(512.0));
    CHECK(evaluate_expression("(3 - sqrt(5)) / 2") == Approx((3 - std::sqrt(5.0)) / 2));
    CHECK(evaluate_expression("cos(pi)") == Approx(-1.0));
    CHECK(evaluate_expression("atan2(1, 1)") == Approx(kPi / 4));
    CHECK(evaluate_expression("1e-3 * 2") == Approx(2e-3));
    CHECK_THROWS_AS(evaluate_expression("1 +"), ConfigError);
    CHECK_THROWS_AS(evaluate_expression("foo(2)"), ConfigError);
}

TEST_CASE("parse and convert") {
    const auto cfg = parse_config(kCantor);
    CHECK(cfg.label == "cantor");
    CHECK(cfg.dimension == 1);
    REQUIRE(cfg.maps.size() == 2);
    CHECK(cfg.maps[1].translation[0] == Approx(2.0 / 3));
    CHECK(cfg.evaluation.n_max == 500);
    CHECK(cfg.evaluation.grid_points == 50);
    CHECK(*cfg.evaluation.eps_max == Approx(1.0 / 6));
    const auto sys = cfg.system();
    CHECK(sys.ratios()[0] == Approx(1.0 / 3));
}

TEST_CASE("round trip") {
    const auto cfg = parse_config(kCantor);
    const auto again = parse_config(serialize_config(cfg));
    CHECK(again == cfg);
    CHECK(serialize_config(again) == serialize_config(cfg));
    const auto dir = std::filesystem::path(FRACTUBE_CONFIG_DIR);
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".cfg") continue;
        const auto c = load_config(entry.path().string());
        CHECK(parse_config(serialize_config(c)) == c);
        ++seen;
    }
    CHECK(seen >= 6);
}

TEST_CASE("strict mode: errors carry line and column") {
    CHECK(message("dimension = 1\nbogus = 2\n") == "t.cfg:2:1: unknown key 'bogus' in the top level");
    CHECK(message("dimension = 1\n[[map]]\nratio = 0.5\nratio = 0.4\n") == "t.cfg:4:1: duplicate key 'ratio'");
    CHECK(message("dimension = 1\n[[map]]\nratio = \"1/\"\ntranslation=[0]\n").rfind("t.cfg:3:9:", 0) == 0);
    CHECK(message("dimension = 3\n") == "t.cfg:1:13: dimension must be 1 or 2");
    CHECK(message("dimension = 1\n[[map]]\nratio = 1.5\ntranslation = [0]\n") == "t.cfg:3:9: ratio must lie in (0, 1)");
    CHECK(message("dimension = 2\n[[map]]\nratio = 0.5\ntranslation = [0]\n") ==
          "t.cfg:4:15: translation needs one entry per coordinate");
    CHECK(message("dimension = 1\n[tables]\n") == "t.cfg:2:9: unknown table [tables]");
    CHECK(message("dimension = 1\n[[map]]\nratio = 0.5\ntranslation = [0]\n[evaluation]\nn_max = 2.5\n") ==
          "t.cfg:6:9: 'n_max' must be an integer");
    CHECK(message("label = \"x\"\n").find("missing required key 'dimension'") != std::string::npos);
    CHECK(message("dimension = 1 junk\n") == "t.cfg:1:15: unexpected trailing characters");
}

TEST_CASE("Koch family parameter") {
    const auto cfg = parse_config("dimension = 2\nkoch_xi = [0.55, 0.22]\n");
    const auto sys = cfg.system();
    CHECK(sys.ratios()[0] == Approx(std::abs(cplx(0.55, 0.22))));
    CHECK(sys.ratios()[1] == Approx(std::abs(cplx(0.45, -0.22))));
    CHECK(message("dimension = 2\nkoch_xi = [0.9, 0.5]\n") ==
          "t.cfg:2:11: koch_xi must satisfy |xi|^2 + |1 - xi|^2 < 1");
}

TEST_CASE("one-dimensional reflection is a half-turn") {
    const auto cfg =
        parse_config("dimension = 1\n[[map]]\nratio = 0.25\nreflect = true\ntranslation = [0.25]\n"
                     "[[map]]\nratio = 0.25\ntranslation = [0.75]\n");
    const auto sys = cfg.system();
    CHECK(sys.map(0).apply({1.0, 0.0}).x == Approx(0.0));
    CHECK(sys.map(0).apply({0.0, 0.0}).x == Approx(0.25));
}
