#include "nae/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nae/errors.hpp"
#include "nae/text.hpp"

namespace nae {

MatchMode match_mode_from_string(const std::string& s) {
    if (s == "indexed") return MatchMode::indexed;
    if (s == "nn_match") return MatchMode::nn_match;
    throw ConfigError("unknown match mode '" + s + "' (expected indexed or nn_match)");
}

std::string to_string(MatchMode mode) {
    return mode == MatchMode::indexed ? "indexed" : "nn_match";
}

std::vector<double> point_errors(const PointSet& annotations, const PointSet& truth,
                                 MatchMode mode) {
    if (mode == MatchMode::indexed) {
        if (annotations.size() != truth.size()) {
            throw ShapeError("indexed matching requires equal point counts, got " +
                             std::to_string(annotations.size()) + " vs " +
                             std::to_string(truth.size()));
        }
        std::vector<double> errors(annotations.size());
        for (size_t i = 0; i < annotations.size(); ++i) {
            errors[i] = distance(annotations.points[i], truth.points[i]);
        }
        return errors;
    }

    std::vector<double> errors;
    errors.reserve(std::min(annotations.size(), truth.size()));
    std::vector<bool> used(truth.size(), false);
    for (const Vec2& a : annotations.points) {
        int best = -1;
        double best_sq = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < truth.size(); ++j) {
            if (used[j]) continue;
            const double sq = squared_distance(a, truth.points[j]);
            if (sq < best_sq) {
                best_sq = sq;
                best = static_cast<int>(j);
            }
        }
        if (best < 0) break;  // truth exhausted
        used[best] = true;
        errors.push_back(std::sqrt(best_sq));
    }
    return errors;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ShapeError("quantile of an empty sample");
    if (q < 0.0 || q > 1.0) throw ConfigError("quantile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

RestorationMetrics restoration_metrics(std::span<const double> errors_before,
                                       std::span<const double> errors_after, MatchMode mode) {
    if (errors_before.size() != errors_after.size() || errors_before.empty()) {
        throw ShapeError("metric inputs must be non-empty and equally sized");
    }
    RestorationMetrics m;
    m.mode = mode;
    m.n_points = errors_before.size();
    double sum_before = 0.0, sum_after = 0.0;
    for (const double e : errors_before) sum_before += e;
    for (const double e : errors_after) sum_after += e;
    m.mean_err_before = sum_before / static_cast<double>(m.n_points);
    m.mean_err_after = sum_after / static_cast<double>(m.n_points);
    if (m.mean_err_before > 0.0) {
        m.improvement_ratio = 1.0 - m.mean_err_after / m.mean_err_before;
    } else if (m.mean_err_after == 0.0) {
        m.improvement_ratio = 0.0;
    } else {
        m.improvement_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    std::vector<double> after(errors_after.begin(), errors_after.end());
    m.p50 = quantile(after, 0.5);
    m.p90 = quantile(std::move(after), 0.9);
    return m;
}

std::string write_report_csv(std::span<const ReportRow> rows) {
    std::ostringstream out;
    out << "beta,alpha,mean_err_before,mean_err_after,improvement_ratio,p50,p90,n_points,flag\n";
    for (const ReportRow& r : rows) {
        out << format_double(r.beta) << "," << format_double(r.alpha) << ","
            << format_double(r.metrics.mean_err_before) << ","
            << format_double(r.metrics.mean_err_after) << ","
            << format_double(r.metrics.improvement_ratio) << ","
            << format_double(r.metrics.p50) << "," << format_double(r.metrics.p90) << ","
            << r.metrics.n_points << "," << r.flag << "\n";
    }
    return out.str();
}

std::string write_report_json(std::span<const ReportRow> rows) {
    // Assembled by hand so numbers use the same shortest round-trip form as
    // the CSV. NaN (allowed for a degenerate ratio) becomes null, which is
    // valid JSON where "nan" is not.
    auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("null"); };
    std::ostringstream out;
    out << "[\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        const ReportRow& r = rows[i];
        out << "  {\"beta\": " << num(r.beta) << ", \"alpha\": " << num(r.alpha)
            << ", \"mean_err_before\": " << num(r.metrics.mean_err_before)
            << ", \"mean_err_after\": " << num(r.metrics.mean_err_after)
            << ", \"improvement_ratio\": " << num(r.metrics.improvement_ratio)
            << ", \"p50\": " << num(r.metrics.p50) << ", \"p90\": " << num(r.metrics.p90)
            << ", \"n_points\": " << r.metrics.n_points << ", \"flag\": \"" << r.flag << "\"}"
            << (i + 1 < rows.size() ? "," : "") << "\n";
    }
    out << "]\n";
    return out.str();
}

void write_report_files(std::span<const ReportRow> rows, const std::string& csv_path,
                        const std::string& json_path) {
    auto write = [](const std::string& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(path, "cannot open for writing");
        out << text;
        if (!out) throw IoError(path, "write failed");
    };
    write(csv_path, write_report_csv(rows));
    write(json_path, write_report_json(rows));
}

}  // namespace nae
