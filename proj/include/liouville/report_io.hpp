#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "liouville/critical.hpp"
#include "liouville/extension.hpp"
#include "liouville/profiles.hpp"
#include "liouville/reduction.hpp"
#include "liouville/soliton.hpp"

namespace liouville {

using Json = nlohmann::ordered_json;

Json to_json(const HalfPlanePoint& p);
Json to_json(const CriticalPoint& c);
Json to_json(const KappaCriticalPoint& c);
Json to_json(const DegreeReport& r);
Json to_json(const AsymptoticFit& f);
Json to_json(const HypothesisReport& h);
/// Includes phi on its nodes, so the report can be read back.
Json to_json(const SolveReport& r);
Json to_json(const PohozaevReport& p);

/// Inverse of to_json(SolveReport). Throws ValidationError on missing or
/// mistyped fields.
SolveReport solve_report_from_json(const Json& j);

/// Columns of equal length as CSV with a header row, 17 significant digits.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

/// Doubles as text with 17 significant digits.
std::string format_double(double v);

}  // namespace liouville
