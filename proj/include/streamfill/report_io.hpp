#pragma once

// Report serialization: one JSON object per line, or a tab-separated table
// with a header row.

#include <ostream>
#include <string>
#include <vector>

#include "streamfill/bench.hpp"
#include "streamfill/metrics.hpp"

namespace streamfill {

std::string report_json(const BenchReport& report);
void write_reports_jsonl(std::ostream& out, const std::vector<BenchReport>& reports);
/// Summary columns only (per-frame series go to the JSON form).
void write_reports_tsv(std::ostream& out, const std::vector<BenchReport>& reports);

void write_sweep_tsv(std::ostream& out, const SweepResult& sweep);
void write_sweep_jsonl(std::ostream& out, const SweepResult& sweep);

/// One row per frame: frame, then for every curve set its raw, smoothed and
/// difference columns.
void write_curves_tsv(std::ostream& out, const std::vector<CurveSet>& curves);

} // namespace streamfill
