#pragma once

// Shared helpers for the test binaries: scratch directories, file snapshots,
// a CLI subprocess runner, and the brute-force reference implementations the
// fast paths are checked against.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nae/geometry.hpp"

namespace testutil {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string& tag)
        : path_(fs::temp_directory_path() / ("nae_test_" + tag)) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

/// Byte-compares every regular file under two directories (same relative
/// names required). Returns a description of the first difference, or "".
inline std::string dir_diff(const fs::path& a, const fs::path& b) {
    std::vector<std::string> names_a, names_b;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.is_regular_file()) names_a.push_back(fs::relative(e.path(), a).string());
    }
    for (const auto& e : fs::recursive_directory_iterator(b)) {
        if (e.is_regular_file()) names_b.push_back(fs::relative(e.path(), b).string());
    }
    std::sort(names_a.begin(), names_a.end());
    std::sort(names_b.begin(), names_b.end());
    if (names_a != names_b) return "file lists differ";
    for (const std::string& name : names_a) {
        if (slurp((a / name).string()) != slurp((b / name).string())) return "differs: " + name;
    }
    return "";
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the installed CLI binary with the given argument string, capturing
/// stdout/stderr through scratch files.
inline CliResult run_cli(const std::string& args, const TempDir& scratch) {
    const std::string out_path = scratch.file("cli_stdout.txt");
    const std::string err_path = scratch.file("cli_stderr.txt");
    const std::string cmd = std::string(NAE_CLI_PATH) + " " + args + " >" + out_path + " 2>" +
                            err_path;
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

/// O(N^2) nearest-neighbor distances; the production grid index must agree
/// exactly (both compare exact squared distances before the sqrt).
inline std::vector<double> brute_nn_distances(std::span<const nae::Vec2> points) {
    std::vector<double> d(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < points.size(); ++j) {
            if (i == j) continue;
            best = std::min(best, nae::squared_distance(points[i], points[j]));
        }
        d[i] = std::sqrt(best);
    }
    return d;
}

/// Per-row reference for the sliding-window cap: scan every point for every
/// row, window (i - win, i + win], empty window inherits the row below,
/// running min keeps the output non-increasing upward.
inline std::vector<double> brute_row_cap(std::span<const nae::Vec2> points,
                                         std::span<const double> d, int height) {
    const int win = std::max(1, height / 50);
    std::vector<double> cap(static_cast<size_t>(height) + 1);
    double seed = -std::numeric_limits<double>::infinity();
    for (const double v : d) seed = std::max(seed, v);
    cap[static_cast<size_t>(height)] = seed;
    for (int i = height - 1; i >= 0; --i) {
        double window_max = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (size_t p = 0; p < points.size(); ++p) {
            if (points[p].y > i - win && points[p].y <= i + win) {
                window_max = std::max(window_max, d[p]);
                any = true;
            }
        }
        const double value = any ? window_max : cap[static_cast<size_t>(i) + 1];
        cap[static_cast<size_t>(i)] = std::min(value, cap[static_cast<size_t>(i) + 1]);
    }
    cap.pop_back();
    return cap;
}

/// Exhaustive minimum-total-error assignment between equal-sized sets
/// (N <= 8), used as the matching oracle.
inline double brute_best_assignment(std::span<const nae::Vec2> a, std::span<const nae::Vec2> b) {
    std::vector<int> perm(b.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (size_t i = 0; i < a.size(); ++i) total += nae::distance(a[i], b[perm[i]]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// Chi-square statistic against a uniform expectation over `bins` bins.
inline double chi_square_uniform(std::span<const int> counts, double total) {
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (const int c : counts) {
        const double diff = c - expected;
        stat += diff * diff / expected;
    }
    return stat;
}

// Frozen critical values, chi-square inverse CDF at 0.999.
inline constexpr double kChi2Crit35 = 66.61882884370104;  // 36 bins
inline constexpr double kChi2Crit19 = 43.82019596451753;  // 20 bins

}  // namespace testutil
