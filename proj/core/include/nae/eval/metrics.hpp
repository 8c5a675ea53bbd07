#pragma once

#include <span>
#include <string>
#include <vector>

#include "nae/geometry.hpp"

namespace nae {

enum class MatchMode {
    indexed,   // annotation i is compared to truth i (the synthetic pipeline)
    nn_match,  // greedy fallback: each annotation takes its nearest unmatched truth
};

MatchMode match_mode_from_string(const std::string& s);
std::string to_string(MatchMode mode);

/// Per-point Euclidean errors between annotations and truth. indexed mode
/// requires equal sizes; nn_match matches greedily in annotation order and
/// stops when either side runs out.
std::vector<double> point_errors(const PointSet& annotations, const PointSet& truth,
                                 MatchMode mode);

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

struct RestorationMetrics {
    double mean_err_before = 0.0;
    double mean_err_after = 0.0;
    // 1 - after/before. Zero pre-restoration error makes the ratio
    // undefined: 0 when the restoration is also perfect, NaN otherwise.
    double improvement_ratio = 0.0;
    double p50 = 0.0;  // quantiles of the post-restoration errors
    double p90 = 0.0;
    size_t n_points = 0;
    MatchMode mode = MatchMode::indexed;
};

/// Aggregates pooled per-point errors (possibly from many images).
RestorationMetrics restoration_metrics(std::span<const double> errors_before,
                                       std::span<const double> errors_after, MatchMode mode);

/// One report line. beta/alpha identify the sweep configuration; flag is ""
/// normally, or a marker like "diverged" when training failed but the sweep
/// carried on.
struct ReportRow {
    double beta = 0.0;
    double alpha = 0.0;
    RestorationMetrics metrics;
    std::string flag;
};

/// CSV with the exact header
/// beta,alpha,mean_err_before,mean_err_after,improvement_ratio,p50,p90,n_points,flag
std::string write_report_csv(std::span<const ReportRow> rows);

/// JSON mirror: array of objects with identical field names.
std::string write_report_json(std::span<const ReportRow> rows);

void write_report_files(std::span<const ReportRow> rows, const std::string& csv_path,
                        const std::string& json_path);

}  // namespace nae
