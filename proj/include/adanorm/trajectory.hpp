#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adanorm/csv.hpp"

namespace adanorm {

// One row per optimizer step t = 1..T. f and grad_norm_sq are evaluated at
// the pre-step iterate w_t; b fields bracket the accumulator update;
// bias_est / bias_se / is_good are present only at instrumented steps.
struct StepRecord {
    std::int64_t t = 0;
    double f = 0;
    double grad_norm_sq = 0;
    double sgrad_norm_sq = 0;
    std::optional<double> b_sq_before;
    std::optional<double> b_sq_after;
    std::optional<double> eta_t;
    std::optional<double> eta_tilde_t;
    double step_norm_sq = 0;
    std::optional<double> bias_est;
    std::optional<double> bias_se;
    std::optional<bool> is_good;
};

inline constexpr const char* kTrajectoryHeader =
    "t,f,grad_norm_sq,sgrad_norm_sq,b_sq_before,b_sq_after,eta_t,eta_tilde_t,"
    "step_norm_sq,bias_est,bias_se,is_good";

inline void write_trajectory_csv(std::ostream& os, const std::vector<StepRecord>& records) {
    os << kTrajectoryHeader << '\n';
    for (const auto& r : records) {
        os << r.t << ',' << fmt17(r.f) << ',' << fmt17(r.grad_norm_sq) << ','
           << fmt17(r.sgrad_norm_sq) << ',' << fmt_opt(r.b_sq_before) << ','
           << fmt_opt(r.b_sq_after) << ',' << fmt_opt(r.eta_t) << ','
           << fmt_opt(r.eta_tilde_t) << ',' << fmt17(r.step_norm_sq) << ','
           << fmt_opt(r.bias_est) << ',' << fmt_opt(r.bias_se) << ',';
        if (r.is_good) os << (*r.is_good ? '1' : '0');
        os << '\n';
    }
}

inline std::vector<StepRecord> read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("trajectory file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryHeader)
        throw std::runtime_error("trajectory header mismatch: '" + line + "'");
    std::vector<StepRecord> records;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 12)
            throw std::runtime_error("trajectory row has " + std::to_string(cells.size()) +
                                     " cells, expected 12");
        StepRecord r;
        r.t = parse_int(cells[0]);
        r.f = parse_double(cells[1]);
        r.grad_norm_sq = parse_double(cells[2]);
        r.sgrad_norm_sq = parse_double(cells[3]);
        r.b_sq_before = parse_opt_double(cells[4]);
        r.b_sq_after = parse_opt_double(cells[5]);
        r.eta_t = parse_opt_double(cells[6]);
        r.eta_tilde_t = parse_opt_double(cells[7]);
        r.step_norm_sq = parse_double(cells[8]);
        r.bias_est = parse_opt_double(cells[9]);
        r.bias_se = parse_opt_double(cells[10]);
        if (!cells[11].empty()) {
            if (cells[11] != "0" && cells[11] != "1")
                throw std::runtime_error("is_good must be empty, 0, or 1");
            r.is_good = (cells[11] == "1");
        }
        records.push_back(r);
    }
    return records;
}

}  // namespace adanorm
