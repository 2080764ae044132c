#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "siq/errors.hpp"
#include "siq/io.hpp"
#include "siq/scenario.hpp"

using namespace siq;

namespace {

const std::string kData = SIQ_DATA_DIR;

CsvTable round_trip(const CsvTable& t) {
    std::stringstream ss;
    write_csv(ss, t);
    return read_csv(ss);
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333");
    CHECK(format_number(123456789.123) == "123456789");
    CHECK(format_number(2.5e-12) == "2.5e-12");
    CHECK(format_number(HUGE_VAL) == "inf");
    CHECK(parse_number("0.333333333").value() == 0.333333333);
    CHECK(parse_number(" 2.5 ").value() == 2.5);
    CHECK(std::isinf(parse_number("inf").value()));
    CHECK_FALSE(parse_number("2.5x").has_value());
    CHECK_FALSE(parse_number("").has_value());
    CHECK_FALSE(parse_number("1,5").has_value());
}

TEST_CASE("csv round trip") {
    CsvTable t;
    t.add_meta("r", 2.5);
    t.add_meta("note", "a, b");
    t.header = {"name", "x"};
    t.rows.push_back({"with, comma", "1.5"});
    t.rows.push_back({"quote \"q\"", "2"});
    const CsvTable u = round_trip(t);
    CHECK(u.meta == t.meta);
    CHECK(u.header == t.header);
    CHECK(u.rows == t.rows);
    CHECK(u.column("x") == std::vector<double>{1.5, 2.0});
    CHECK(u.meta_value("r").value() == "2.5");
    CHECK_FALSE(u.meta_value("missing").has_value());
    CHECK_THROWS_AS(u.column("nope"), FileParse);
    CHECK_THROWS_AS(u.column("name"), FileParse);
    std::stringstream bad("a,b\n1\n");
    CHECK_THROWS_AS(read_csv(bad), FileParse);
    std::stringstream empty("# only = meta\n");
    CHECK_THROWS_AS(read_csv(empty), FileParse);
}

TEST_CASE("scenario config") {
    std::stringstream ss("# outbreak\nr = 2.5\np=0.5\ntau = 0.5  # days\nkappa = 15\ni0 = 0.01\nt_end = 400\nout = x.csv\n");
    const ScenarioConfig c = parse_config(ss);
    CHECK(c.params.r == 2.5);
    CHECK(c.params.p == 0.5);
    CHECK(c.params.tau == 0.5);
    CHECK(c.params.kappa == 15.0);
    CHECK(c.i0 == 0.01);
    CHECK(c.t_end == 400.0);
    CHECK(c.out == "x.csv");
    CHECK(c.step == kDefaultStep);
    std::stringstream unknown("r = 2\nbeta = 0.3\n");
    try {
        parse_config(unknown);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("beta") != std::string::npos);
    }
    std::stringstream twice("r = 2\nr = 3\n");
    CHECK_THROWS_AS(parse_config(twice), ConfigError);
    std::stringstream bad_value("p = half\n");
    CHECK_THROWS_AS(parse_config(bad_value), ConfigError);
    std::stringstream no_eq("r 2\n");
    CHECK_THROWS_AS(parse_config(no_eq), ConfigError);
    CHECK_THROWS_AS(parse_config_file("/nonexistent.cfg"), ConfigError);
}

TEST_CASE("shipped disease table") {
    const auto d = read_disease_table(kData + "/diseases.csv");
    REQUIRE(d.size() == 9);
    CHECK(d[2].name == "Ebola Sierra Leone");
    CHECK(d[2].r == 2.5);
    CHECK(d[7].infectious_period_days == 68.5);
    const auto refs = read_reference_table(kData + "/diseases_reference.csv");
    CHECK(refs.size() == 9);
    CHECK(refs.at("Smallpox").T_c_days == 0.26);
    std::ofstream(std::string("/tmp/siq_bad_table.csv")) << "name,r,infectious_period_days,source\nX,-1,3,y\n";
    CHECK_THROWS_AS(read_disease_table("/tmp/siq_bad_table.csv"), FileParse);
    std::ofstream(std::string("/tmp/siq_bad_header.csv")) << "name,r,source\nX,1,y\n";
    CHECK_THROWS_AS(read_disease_table("/tmp/siq_bad_header.csv"), FileParse);
}

TEST_CASE("critical table rows") {
    const auto d = read_disease_table(kData + "/diseases.csv");
    const auto refs = read_reference_table(kData + "/diseases_reference.csv");
    const auto rows = critical_rows(d, refs, 0.8);
    for (const auto& r : rows) {
        const bool expect = r.disease.name == "Influenza A" || r.disease.name == "SARS" || r.disease.name == "Smallpox";
        CHECK_MESSAGE(r.reference_mismatch == expect, r.disease.name);
    }
    CHECK(rows[2].T_c_days.value() == doctest::Approx(3.45).epsilon(1e-3));
    CHECK(rows[7].p_c == doctest::Approx(0.789).epsilon(1e-3));
    CHECK(rows[8].T_c_days.value() == doctest::Approx(0.225).epsilon(1e-3));
    const auto low = critical_rows(d, refs, 0.5);
    CHECK(low[2].uncontrollable);
    CHECK(low[2].flag() == "uncontrollable");
    CHECK_FALSE(low[2].T_c_days.has_value());
    CHECK_FALSE(low[0].reference.has_value());
    const CsvTable t = round_trip(critical_table(rows, 0.8));
    CHECK(t.header == std::vector<std::string>{"name", "p_c", "tau_c", "T_c_days", "flag"});
    CHECK(t.rows.size() == 9);
    CHECK(t.meta_value("version").value() == kToolVersion);
}

TEST_CASE("simulate table metadata") {
    ScenarioConfig cfg;
    cfg.params = {2.5, 0.5, 0.5, 0.5, 0.0};
    cfg.i0 = 0.001;
    cfg.t_end = 20.0;
    const CsvTable t = round_trip(simulate_table(cfg, ModelKind::SIQ, 1.0));
    CHECK(t.header == std::vector<std::string>{"t", "S", "I", "Q"});
    CHECK(t.rows.size() == 21);
    for (const char* key : {"version", "r", "p", "tau", "kappa", "sigma", "step", "H_initial", "leaf_q", "predicted_I"}) {
        CHECK_MESSAGE(t.meta_value(key).has_value(), key);
    }
    CHECK(parse_number(t.meta_value("H_initial").value()).value() == doctest::Approx(0.001));
    ScenarioConfig s = cfg;
    s.params.sigma = 1.0;
    const CsvTable u = simulate_table(s, ModelKind::SEIQ, 2.0);
    CHECK(u.header.back() == "E");
    CHECK(u.meta_value("H2_initial").has_value());
    CHECK_THROWS_AS(simulate_table(s, ModelKind::SIQ, 1.0), InvalidParams);
}

TEST_CASE("peak detection") {
    // Subcritical: I only decreases, so the peak is the initial value.
    const auto sub = ipeak_scan(ModelParams{2.5, 0.9, 0.0, 0.0, 0.0}, 0.001, 0.0, {0.0, 3.0}, 100.0, kDefaultStep);
    for (const auto& p : sub) {
        CHECK(p.I_peak == doctest::Approx(0.001).epsilon(1e-12));
        CHECK(p.t_peak == 0.0);
    }
    CHECK_THROWS_AS(ipeak_scan(ModelParams{2.5, 0.5, 0.5, 0.0, 0.0}, 0.001, 0.0, {1.0}, 30.0, kDefaultStep),
                    HorizonTooShort);
    const auto inf = ipeak_scan(ModelParams{2.5, 0.5, 0.5, 0.0, 0.0}, 0.001, 0.0, {2.0, HUGE_VAL}, 200.0, kDefaultStep);
    CHECK(inf[0].I_peak >= inf[1].I_peak);
    CHECK(std::isinf(inf[1].kappa));
    const CsvTable t = round_trip(ipeak_table(ModelParams{2.5, 0.5, 0.5, 0.0, 0.0}, 0.001, 0.0, inf, 200.0, kDefaultStep));
    CHECK(std::isinf(t.column("kappa")[1]));
}

TEST_CASE("endemic and spectrum wrappers") {
    const ModelParams mp{2.5, 0.5, 0.0, 1.0, 0.0};
    const CsvTable e = endemic_table(mp, endemic_point(mp, 0.0), "given");
    CHECK(e.column("v_I")[0] == doctest::Approx(0.1));
    CHECK(e.rows[0][5] == "true");
    const ModelParams sp{2.5, 0.8, 0.1, 0.0, 0.0};
    const CharEq ce = disease_free_chareq(sp, 0.0);
    CHECK(sp.eps() > 1.0 - 1.0 / sp.r);
    const SpectralReport rep = count_unstable(ce);
    CHECK(rep.unstable_count == 0);
    const CsvTable s = round_trip(spectrum_table(ce, rep, "disease-free"));
    CHECK(s.meta_value("classification").value() == "stable");
    CHECK(s.rows.empty());
}
