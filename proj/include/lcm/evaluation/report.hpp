#pragma once

#include "lcm/evaluation/retrieval.hpp"

#include <string>

namespace lcm {

enum class ReportFormat { Table, Json };

// "17.0±0.35": percent mean with one decimal, percent error with two.
std::string format_cell(double mean, double std_error);

/// Table: one row per run with R@K columns, followed by the published
/// fine-tuning results as static reference rows. JSON fields: dataset, split,
/// model, direction, sample_size, pool_size, candidate_pool, seeds, k_values,
/// single_seed, per_k[{k, mean, stderr, per_seed[]}].
std::string render_report(const RecallReport& report, ReportFormat format);

RecallReport report_from_json(const std::string& text);

} // namespace lcm
