#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"

#include "preint/estimate.hpp"

namespace preint {

inline constexpr const char* kCsvHeader = "method,target,x,m,N,L,mean,stderr,seconds";

/// 17 significant digits, enough to round-trip any double.
std::string format_real(double v);

/// Header plus one line per estimate. Wall time is written as 0 unless
/// `with_timing`, so that repeated runs produce identical files.
void write_csv(std::ostream& out, std::span<const Estimate> rows, bool with_timing);

/// One object per estimate with the CSV column names as keys.
nlohmann::json to_json(const Estimate& e, bool with_timing);
nlohmann::json to_json(std::span<const Estimate> rows, bool with_timing);

}  // namespace preint
