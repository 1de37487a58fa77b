#pragma once

#include <span>
#include <string>
#include <vector>

#include "bugpred/eval.hpp"

namespace bugpred {

// One structured-text (JSON) document per experiment: descriptor, per-fold
// metrics, aggregates.
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
void write_report_file(const EvalReport& report, const std::string& path);
EvalReport read_report_file(const std::string& path);

// Comparison table over feature modes: one row per classifier, one column
// per mode present, each cell the best mean F across that classifier's
// experiments in that mode (ties resolve to the smaller descriptor key).
// The best embedding configuration is annotated per row.
std::string comparison_table(std::span<const EvalReport> reports);

struct FiveNumber {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// Quartiles by linear interpolation between closest ranks.
FiveNumber five_number(std::vector<double> values);

// Per-classifier five-number summary of mean F over all experiments.
std::string five_number_summary(std::span<const EvalReport> reports);

}  // namespace bugpred
