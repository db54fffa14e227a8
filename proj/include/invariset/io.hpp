#pragma once

#include <string>
#include <utility>

#include "invariset/iterate.hpp"
#include "invariset/oracle.hpp"
#include "invariset/types.hpp"

namespace invariset::io {

/// Parses a problem JSON document. Constraints are normalized to right-hand
/// side 1; polynomial constraints of degree <= 2 are folded into the
/// quadratic list. Throws ValidationError on schema or semantic errors.
std::pair<ProblemSpec, RunOptions> parse_problem(const std::string& json_text);

std::pair<ProblemSpec, RunOptions> load_problem(const std::string& path);

/// Serializes a run result (description, certificates, matrix archive, stats).
std::string result_to_json(const RunResult& result);

/// Reloads the description part of a result file; membership-ready.
InvariantSetDescription description_from_json(const std::string& json_text);

InvariantSetDescription load_description(const std::string& path);

void save_text(const std::string& path, const std::string& text);

/// CSV "x1,x2,member" for a 2-D scan; row-major, LF line endings, up to 12
/// significant digits.
std::string scan_to_csv(const oracle::GridScan& scan);

}  // namespace invariset::io
