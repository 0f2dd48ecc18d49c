#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>

#include "pollsys/config.hpp"
#include "pollsys/errors.hpp"
#include "pollsys/io.hpp"
#include "table_configs.hpp"

using namespace pollsys;

#ifndef FIXTURE_DIR
#define FIXTURE_DIR "fixtures"
#endif

namespace {

std::string fixture_path(const std::string& rel) {
    return std::string(FIXTURE_DIR) + "/" + rel;
}

// Returns the message of the validation_error raised by parsing, or an
// empty string when parsing unexpectedly succeeds.
std::string parse_failure(const std::string& text) {
    try {
        parse_config(text);
    } catch (const validation_error& e) {
        return e.what();
    }
    return {};
}

bool mentions(const std::string& message, const std::string& needle) {
    return message.find(needle) != std::string::npos;
}

const char* minimal_station = R"({
  "lambda": 0.5, "nu": 2.0,
  "service": {"kind": "exponential", "mean": 0.4},
  "switchover": {"kind": "deterministic", "value": 1.0},
  "glue": {"kind": "gamma", "shape": 2.0, "scale": 0.25}
})";

std::string one_station_doc() {
    return std::string("{\"stations\": [") + minimal_station + "]}";
}

} // namespace

TEST_CASE("a minimal document parses into the expected system") {
    SystemConfig cfg = parse_config(one_station_doc());
    REQUIRE(cfg.size() == 1);
    const StationParams& st = cfg.stations[0];
    CHECK(st.lambda == 0.5);
    CHECK(st.nu == 2.0);
    CHECK(st.weight == 1.0);
    CHECK(st.service == DistributionSpec::exponential(0.4));
    CHECK(st.switchover == DistributionSpec::deterministic(1.0));
    CHECK(st.glue == DistributionSpec::gamma(2.0, 0.25));
}

TEST_CASE("fixture documents match the benchmark systems") {
    SUBCASE("two-station deterministic-glue benchmark, first row") {
        SystemConfig cfg = load_config(fixture_path("configs/table1_row1.json"));
        CHECK(cfg == testcfg::det_glue_config(0));
        CHECK(utilizations(cfg).total == doctest::Approx(0.9).epsilon(1e-12));
    }

    SUBCASE("three-station exponential-glue benchmark, second row") {
        SystemConfig cfg = load_config(fixture_path("configs/table2_row2.json"));
        CHECK(cfg == testcfg::exp_glue_config(1));
    }

    SUBCASE("five-station gamma benchmark, fourth case") {
        SystemConfig cfg = load_config(fixture_path("configs/table4_case4.json"));
        CHECK(cfg == testcfg::gamma_glue_config(3));
    }

    SUBCASE("five-station sweep example") {
        SystemConfig cfg = load_config(fixture_path("configs/example1.json"));
        CHECK(cfg == testcfg::sweep_example_config(1.0));
        CHECK(cfg.size() == 5);
        CHECK(utilizations(cfg).total == doctest::Approx(0.775).epsilon(1e-12));
    }
}

TEST_CASE("configs round-trip through the serializer exactly") {
    SUBCASE("mixed distribution kinds and weights") {
        SystemConfig cfg = testcfg::gamma_glue_config(3);
        cfg.stations[1].weight = 2.5;
        cfg.stations[4].weight = 0.125;
        CHECK(parse_config(format_config(cfg)) == cfg);
    }

    SUBCASE("awkward double values survive") {
        SystemConfig cfg = testcfg::det_glue_config(4);
        cfg.stations[0].lambda = 0.1 + 0.2;   // 0.30000000000000004
        cfg.stations[1].nu = 1.0 / 3.0;
        CHECK(parse_config(format_config(cfg)) == cfg);
    }

    SUBCASE("through a file on disk") {
        SystemConfig cfg = testcfg::exp_glue_config(6);
        const std::string path = "/tmp/pollsys_io_roundtrip.json";
        save_config(cfg, path);
        CHECK(load_config(path) == cfg);
        std::remove(path.c_str());
    }
}

TEST_CASE("unknown and missing fields are rejected with their location") {
    SUBCASE("unknown top-level field") {
        std::string doc = "{\"stations\": [" + std::string(minimal_station) +
                          "], \"notes\": 1}";
        std::string msg = parse_failure(doc);
        CHECK(mentions(msg, "unknown field \"notes\""));
    }

    SUBCASE("missing retrial rate names the station index") {
        std::string doc = R"({"stations": [{
          "lambda": 0.5,
          "service": {"kind": "exponential", "mean": 0.4},
          "switchover": {"kind": "deterministic", "value": 1.0},
          "glue": {"kind": "deterministic", "value": 0.5}
        }]})";
        std::string msg = parse_failure(doc);
        CHECK(mentions(msg, "stations[0]"));
        CHECK(mentions(msg, "missing field \"nu\""));
    }

    SUBCASE("unknown distribution parameter") {
        std::string doc = one_station_doc();
        auto pos = doc.find("\"mean\"");
        doc.replace(pos, 6, "\"rate\"");
        std::string msg = parse_failure(doc);
        CHECK(mentions(msg, "stations[0].service"));
        CHECK(mentions(msg, "unknown field \"rate\""));
    }

    SUBCASE("gamma without a scale") {
        std::string doc = one_station_doc();
        auto pos = doc.find(", \"scale\": 0.25");
        doc.erase(pos, std::string(", \"scale\": 0.25").size());
        std::string msg = parse_failure(doc);
        CHECK(mentions(msg, "stations[0].glue"));
        CHECK(mentions(msg, "missing field \"scale\""));
    }

    SUBCASE("unsupported distribution kind") {
        std::string doc = one_station_doc();
        auto pos = doc.find("exponential");
        doc.replace(pos, std::string("exponential").size(), "uniform");
        std::string msg = parse_failure(doc);
        CHECK(mentions(msg, "unknown distribution kind \"uniform\""));
    }

    SUBCASE("non-numeric parameter") {
        std::string doc = one_station_doc();
        auto pos = doc.find("0.5");
        doc.replace(pos, 3, "\"x\"");
        std::string msg = parse_failure(doc);
        CHECK(mentions(msg, "stations[0].lambda"));
        CHECK(mentions(msg, "expected a number"));
    }

    SUBCASE("stations must be an array") {
        std::string msg = parse_failure("{\"stations\": 3}");
        CHECK(mentions(msg, "stations"));
        CHECK(mentions(msg, "expected an array"));
    }
}

TEST_CASE("malformed documents report the failure position") {
    std::string msg = parse_failure("{\n  \"stations\": [,\n}");
    CHECK(mentions(msg, "parse error at line 2"));
}

TEST_CASE("semantic validation runs at load time") {
    SUBCASE("unstable system") {
        std::string doc = one_station_doc();
        auto pos = doc.find("\"lambda\": 0.5");
        doc.replace(pos, std::string("\"lambda\": 0.5").size(),
                    "\"lambda\": 3.0");
        CHECK_THROWS_AS(parse_config(doc), validation_error);
    }

    SUBCASE("nonpositive distribution parameter carries its location") {
        std::string doc = one_station_doc();
        auto pos = doc.find("\"mean\": 0.4");
        doc.replace(pos, std::string("\"mean\": 0.4").size(),
                    "\"mean\": -0.4");
        std::string msg = parse_failure(doc);
        CHECK(mentions(msg, "stations[0].service"));
        CHECK(mentions(msg, "mean must be > 0"));
    }
}

TEST_CASE("missing files fail cleanly") {
    try {
        load_config("/nonexistent/dir/config.json");
        CHECK(false);
    } catch (const validation_error& e) {
        CHECK(mentions(e.what(), "/nonexistent/dir/config.json"));
    }
}
