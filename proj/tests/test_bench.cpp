#include <gtest/gtest.h>

#include <cstdlib>
#include <regex>
#include <sstream>

#include <pepbound/bench.hpp>

#include "support.hpp"

using namespace pepbound;

namespace {

ExperimentConfig small_config(LinearizationLabel label, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.poly.kind = PolyKind::P1;
    cfg.poly.n = 4;
    cfg.poly.d = label == LinearizationLabel::L1 ? 3 : 5;
    cfg.linearization = label;
    cfg.seed = seed;
    return cfg;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    for (std::string f; std::getline(is, f, ',');) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

const ExperimentReport& default_report() {
    static const ExperimentReport rep = [] {
        ExperimentConfig cfg;
        cfg.seed = 7;
        return run_experiment(cfg);
    }();
    return rep;
}

}  // namespace

TEST(Csv, HeaderOnlyForEmptyReport) {
    const auto lines = lines_of(to_csv(ExperimentReport{}));
    ASSERT_EQ(lines.size(), 1u);
    EXPECT_EQ(lines[0], kCsvHeader);
}

TEST(Csv, OneLinePerEigenvector) {
    const auto& rep = default_report();
    ASSERT_EQ(rep.rows.size(), 50u);
    const auto lines = lines_of(to_csv(rep));
    ASSERT_EQ(lines.size(), 51u);
    for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_EQ(fields_of(lines[i]).size(), 11u) << lines[i];
}

TEST(Csv, ColumnsParseBackExactly) {
    const auto& rep = default_report();
    const auto lines = lines_of(to_csv(rep));
    double prev = 0.0;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto f = fields_of(lines[i + 1]);
        const auto& r = rep.rows[i];
        EXPECT_EQ(std::stoul(f[0]), i + 1);
        EXPECT_EQ(std::strtod(f[1].c_str(), nullptr), r.lambdaComputed.real());
        EXPECT_EQ(std::strtod(f[6].c_str(), nullptr), r.sinAngle);
        EXPECT_EQ(std::strtod(f[7].c_str(), nullptr), r.boundKron);
        EXPECT_EQ(std::strtod(f[9].c_str(), nullptr), r.boundKron / r.boundFrob);
        const double a = std::strtod(f[3].c_str(), nullptr);
        EXPECT_GE(a, prev);
        prev = a;
    }
}

TEST(Csv, FlagsColumn) {
    EXPECT_EQ(flags_to_string(0), "");
    EXPECT_EQ(flags_to_string(row_flags::ambiguous_pairing | row_flags::oracle_unconverged),
              "ambiguous_pairing|oracle_unconverged");
    ExperimentReport rep;
    BoundRow r;
    r.index = 1;
    r.lambdaComputed = 1.0;
    r.boundKron = r.boundFrob = 1.0;
    r.flags = row_flags::sep_zero;
    rep.rows.push_back(r);
    EXPECT_EQ(fields_of(lines_of(to_csv(rep))[1]).back(), "sep_zero");
}

TEST(Experiment, DeterministicOutput) {
    auto cfg = small_config(LinearizationLabel::L1, 11);
    const auto a = run_experiment(cfg);
    cfg.parallel = false;
    const auto b = run_experiment(cfg);
    EXPECT_EQ(to_csv(a), to_csv(b));
    EXPECT_EQ(to_svg(a), to_svg(b));
}

TEST(Experiment, BoundsHoldOnSmallInstances) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto rep = run_experiment(small_config(LinearizationLabel::L1, seed));
        EXPECT_EQ(rep.rows.size(), 12u);
        EXPECT_EQ(bound_violations(rep.rows), 0u) << seed;
        for (const auto& r : rep.rows) {
            EXPECT_GE(r.boundKron / r.boundFrob, 1.0 - 1e-12);
            EXPECT_LE(r.boundKron / r.boundFrob, std::sqrt(3.0) + 1e-12);
        }
    }
}

TEST(Experiment, MetadataAndRejections) {
    const auto rep = run_experiment(small_config(LinearizationLabel::L2, 2));
    EXPECT_EQ(rep.metadata.eps, 3u);
    EXPECT_EQ(rep.metadata.eta, 1u);
    EXPECT_EQ(rep.metadata.linearization, "L2");
    EXPECT_EQ(rep.metadata.version, kVersion);
    auto cfg = small_config(LinearizationLabel::L3, 2);
    cfg.poly.d = 3;
    EXPECT_THROW(run_experiment(cfg), DomainError);
}

TEST(Tightness, MedianAndViolations) {
    std::vector<BoundRow> rows(3);
    rows[0].sinAngle = 1e-10, rows[0].boundKron = 2e-10;
    rows[1].sinAngle = 1e-10, rows[1].boundKron = 8e-10;
    rows[2].sinAngle = 1e-10, rows[2].boundKron = 4e-10;
    EXPECT_DOUBLE_EQ(*median_tightness(rows), 4.0);
    rows[2].flags = row_flags::ambiguous_pairing;
    EXPECT_DOUBLE_EQ(*median_tightness(rows), 5.0);
    EXPECT_EQ(bound_violations(rows), 0u);
    rows[0].boundKron = 1e-11;
    EXPECT_EQ(bound_violations(rows), 1u);
    EXPECT_FALSE(median_tightness({}).has_value());
}

TEST(Svg, MarkersPerRow) {
    ExperimentReport rep;
    BoundRow r;
    r.index = 1;
    r.sinAngle = 1e-12;
    r.boundKron = 1e-9;
    rep.rows.push_back(r);
    const std::string svg = to_svg(rep);
    const std::regex bound(R"re(class="bound" data-index="1" cx="([0-9.]+)" cy="([0-9.]+)")re");
    const std::regex error(R"re(class="error" data-index="1" cx="([0-9.]+)" cy="([0-9.]+)")re");
    std::smatch mb, me;
    ASSERT_TRUE(std::regex_search(svg, mb, bound));
    ASSERT_TRUE(std::regex_search(svg, me, error));
    // the bound sits higher on the page (smaller y) than the error
    EXPECT_LE(std::stod(mb[2]), std::stod(me[2]));
    EXPECT_EQ(mb[1], me[1]);
    EXPECT_THROW(to_svg(ExperimentReport{}), DomainError);
}

TEST(Svg, OneMarkerPairPerEigenvector) {
    const std::string svg = to_svg(default_report());
    std::size_t bounds = 0, errors = 0;
    for (std::size_t pos = 0; (pos = svg.find("class=\"bound\"", pos)) != std::string::npos; ++pos) ++bounds;
    for (std::size_t pos = 0; (pos = svg.find("class=\"error\"", pos)) != std::string::npos; ++pos) ++errors;
    EXPECT_EQ(bounds, 50u);
    EXPECT_EQ(errors, 50u);
}

TEST(InvariantSuite, AllChecksPass) {
    for (const auto& c : run_invariant_suite(1, 3, 3)) EXPECT_TRUE(c.pass) << c.name << " " << c.detail;
}
