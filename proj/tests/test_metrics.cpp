#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "nae/errors.hpp"
#include "nae/eval/metrics.hpp"
#include "nae/rng.hpp"

#include "support.hpp"

using nae::MatchMode;
using nae::PointSet;
using nae::Vec2;

namespace {

PointSet pset(std::vector<Vec2> pts) { return PointSet::with_distances(std::move(pts)); }

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("indexed errors are per-index distances") {
    const PointSet ann = pset({{0.0, 0.0}, {10.0, 0.0}});
    const PointSet tru = pset({{3.0, 4.0}, {10.0, 0.0}});
    const auto errs = nae::point_errors(ann, tru, MatchMode::indexed);
    REQUIRE(errs.size() == 2);
    CHECK(errs[0] == 5.0);
    CHECK(errs[1] == 0.0);
}

TEST_CASE("indexed mode rejects size mismatches") {
    const PointSet ann = pset({{0.0, 0.0}, {1.0, 1.0}});
    const PointSet tru = pset({{0.0, 0.0}});
    CHECK_THROWS_AS(nae::point_errors(ann, tru, MatchMode::indexed), nae::ShapeError);
}

TEST_CASE("greedy matching scores permuted identical sets as exact") {
    const std::vector<Vec2> base = {{2.0, 3.0}, {30.0, 8.0}, {14.0, 25.0}, {40.0, 40.0}};
    std::vector<Vec2> permuted = {base[2], base[0], base[3], base[1]};
    const auto errs =
        nae::point_errors(pset(permuted), pset(base), MatchMode::nn_match);
    REQUIRE(errs.size() == 4);
    for (const double e : errs) CHECK(e == 0.0);
}

TEST_CASE("greedy matching consumes each truth point at most once") {
    // Two annotations near one truth point: the first takes it, the second
    // must settle for the distant one.
    const PointSet ann = pset({{0.0, 0.0}, {0.5, 0.0}});
    const PointSet tru = pset({{0.0, 0.0}, {100.0, 0.0}});
    const auto errs = nae::point_errors(ann, tru, MatchMode::nn_match);
    REQUIRE(errs.size() == 2);
    CHECK(errs[0] == 0.0);
    CHECK(errs[1] == doctest::Approx(99.5).epsilon(1e-12));
}

TEST_CASE("greedy matching stops when either side is exhausted") {
    const PointSet ann3 = pset({{0.0, 0.0}, {5.0, 0.0}, {9.0, 2.0}});
    const PointSet tru2 = pset({{0.0, 0.0}, {5.0, 0.0}});
    CHECK(nae::point_errors(ann3, tru2, MatchMode::nn_match).size() == 2);
    CHECK(nae::point_errors(tru2, ann3, MatchMode::nn_match).size() == 2);
}

TEST_CASE("greedy matching is optimal when truth is well separated") {
    // With jitter well under half the separation, greedy agrees with the
    // exhaustive best assignment: every annotation finds its own source.
    nae::Rng rng(44);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vec2> truth;
        while (truth.size() < 6) {
            const Vec2 c{rng.uniform(0.0, 120.0), rng.uniform(0.0, 90.0)};
            bool clear = true;
            for (const Vec2& o : truth) clear &= nae::distance(c, o) >= 12.0;
            if (clear) truth.push_back(c);
        }
        std::vector<Vec2> ann = truth;
        for (Vec2& p : ann) {
            const double a = rng.angle();
            const double m = rng.uniform(0.0, 5.0);  // < 12 / 2
            p.x += m * std::cos(a);
            p.y += m * std::sin(a);
        }
        // Shuffle so index order carries no information.
        for (size_t i = ann.size(); i > 1; --i) {
            std::swap(ann[i - 1], ann[rng.uniform_int(0, static_cast<int64_t>(i) - 1)]);
        }
        const auto errs = nae::point_errors(pset(ann), pset(truth), MatchMode::nn_match);
        double total = 0.0;
        for (const double e : errs) total += e;
        const double best = testutil::brute_best_assignment(ann, truth);
        CHECK(total == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("quantile interpolates linearly") {
    const std::vector<double> v = {4.0, 1.0, 3.0, 2.0};  // sorted: 1 2 3 4
    CHECK(nae::quantile(v, 0.0) == 1.0);
    CHECK(nae::quantile(v, 1.0) == 4.0);
    CHECK(nae::quantile(v, 0.5) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(nae::quantile(v, 1.0 / 3.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(nae::quantile({7.5}, 0.9) == 7.5);
}

TEST_CASE("quantile rejects bad inputs") {
    CHECK_THROWS_AS(nae::quantile({}, 0.5), nae::ShapeError);
    CHECK_THROWS_AS(nae::quantile({1.0}, -0.1), nae::ConfigError);
    CHECK_THROWS_AS(nae::quantile({1.0}, 1.5), nae::ConfigError);
}

TEST_CASE("metrics aggregate pooled errors") {
    const std::vector<double> before = {4.0, 6.0};
    const std::vector<double> after = {1.0, 3.0};
    const auto m = nae::restoration_metrics(before, after, MatchMode::indexed);
    CHECK(m.mean_err_before == 5.0);
    CHECK(m.mean_err_after == 2.0);
    CHECK(m.improvement_ratio == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(m.p50 == 2.0);
    CHECK(m.p90 == doctest::Approx(2.8).epsilon(1e-12));
    CHECK(m.n_points == 2);
    CHECK(m.mode == MatchMode::indexed);
}

TEST_CASE("improvement ratio edge cases") {
    const auto both_zero =
        nae::restoration_metrics(std::vector<double>{0.0}, std::vector<double>{0.0},
                                 MatchMode::indexed);
    CHECK(both_zero.improvement_ratio == 0.0);

    const auto degraded =
        nae::restoration_metrics(std::vector<double>{0.0}, std::vector<double>{1.0},
                                 MatchMode::indexed);
    CHECK(std::isnan(degraded.improvement_ratio));

    const auto worse =
        nae::restoration_metrics(std::vector<double>{2.0}, std::vector<double>{3.0},
                                 MatchMode::indexed);
    CHECK(worse.improvement_ratio == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("metrics require matching non-empty error lists") {
    CHECK_THROWS_AS(nae::restoration_metrics({}, {}, MatchMode::indexed), nae::ShapeError);
    CHECK_THROWS_AS(nae::restoration_metrics(std::vector<double>{1.0},
                                             std::vector<double>{1.0, 2.0},
                                             MatchMode::indexed),
                    nae::ShapeError);
}

TEST_CASE("metrics are internally consistent on random data") {
    nae::Rng rng(45);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(1, 60));
        std::vector<double> before(n), after(n);
        for (int i = 0; i < n; ++i) {
            before[i] = rng.uniform(0.1, 10.0);
            after[i] = rng.uniform(0.0, 10.0);
        }
        const auto m = nae::restoration_metrics(before, after, MatchMode::nn_match);
        double bsum = 0.0, asum = 0.0;
        for (int i = 0; i < n; ++i) {
            bsum += before[i];
            asum += after[i];
        }
        CHECK(m.mean_err_before == doctest::Approx(bsum / n).epsilon(1e-9));
        CHECK(m.mean_err_after == doctest::Approx(asum / n).epsilon(1e-9));
        CHECK(m.improvement_ratio ==
              doctest::Approx(1.0 - m.mean_err_after / m.mean_err_before).epsilon(1e-9));
        CHECK(m.p50 <= m.p90);
        CHECK(m.n_points == static_cast<size_t>(n));
    }
}

TEST_CASE("csv report matches the frozen golden string") {
    nae::ReportRow row;
    row.beta = 0.4;
    row.alpha = 0.5;
    row.metrics.mean_err_before = 2.0;
    row.metrics.mean_err_after = 0.5;
    row.metrics.improvement_ratio = 0.75;
    row.metrics.p50 = 0.5;
    row.metrics.p90 = 1.25;
    row.metrics.n_points = 640;
    nae::ReportRow flagged = row;
    flagged.beta = 0.8;
    flagged.flag = "diverged";

    const std::string csv = nae::write_report_csv(std::vector<nae::ReportRow>{row, flagged});
    CHECK(csv ==
          "beta,alpha,mean_err_before,mean_err_after,improvement_ratio,p50,p90,n_points,flag\n"
          "0.4,0.5,2,0.5,0.75,0.5,1.25,640,\n"
          "0.8,0.5,2,0.5,0.75,0.5,1.25,640,diverged\n");
}

TEST_CASE("json report carries the same fields and nulls out NaN") {
    nae::ReportRow row;
    row.beta = 0.2;
    row.alpha = 0.4;
    row.metrics.mean_err_before = 0.0;
    row.metrics.mean_err_after = 1.0;
    row.metrics.improvement_ratio = std::nan("");
    row.metrics.p50 = 1.0;
    row.metrics.p90 = 1.0;
    row.metrics.n_points = 3;

    const std::string json = nae::write_report_json(std::vector<nae::ReportRow>{row});
    CHECK(json.find("\"improvement_ratio\": null") != std::string::npos);
    CHECK(json.find("\"beta\": 0.2") != std::string::npos);
    CHECK(json.find("\"n_points\": 3") != std::string::npos);
    CHECK(json.find("\"flag\": \"\"") != std::string::npos);
}

TEST_CASE("report files land on disk") {
    testutil::TempDir dir("report");
    nae::ReportRow row;
    row.metrics.n_points = 1;
    const auto csv_path = (dir.path() / "r.csv").string();
    const auto json_path = (dir.path() / "r.json").string();
    nae::write_report_files(std::vector<nae::ReportRow>{row}, csv_path, json_path);
    const std::string csv = testutil::slurp(csv_path);
    CHECK(csv.starts_with("beta,alpha,"));
    const std::string json = testutil::slurp(json_path);
    CHECK(json.front() == '[');
}

TEST_CASE("mode strings round trip") {
    CHECK(nae::match_mode_from_string("indexed") == MatchMode::indexed);
    CHECK(nae::match_mode_from_string("nn_match") == MatchMode::nn_match);
    CHECK(nae::to_string(MatchMode::indexed) == "indexed");
    CHECK(nae::to_string(MatchMode::nn_match) == "nn_match");
    CHECK_THROWS_AS(nae::match_mode_from_string("hungarian"), nae::ConfigError);
}

TEST_SUITE_END();
