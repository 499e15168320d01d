#include "preint/report.hpp"

#include <cstdio>
#include <ostream>

namespace preint {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, std::span<const Estimate> rows, bool with_timing) {
    out << kCsvHeader << '\n';
    for (const auto& e : rows) {
        out << to_string(e.method) << ',' << to_string(e.target.kind) << ',' << format_real(e.target.x)
            << ',' << e.m << ',' << e.n << ',' << e.l << ',' << format_real(e.mean) << ','
            << format_real(e.std_error) << ',' << format_real(with_timing ? e.seconds : 0.0) << '\n';
    }
}

nlohmann::json to_json(const Estimate& e, bool with_timing) {
    return {
        {"method", to_string(e.method)},
        {"target", to_string(e.target.kind)},
        {"x", e.target.x},
        {"m", e.m},
        {"N", e.n},
        {"L", e.l},
        {"mean", e.mean},
        {"stderr", e.std_error},
        {"seconds", with_timing ? e.seconds : 0.0},
    };
}

nlohmann::json to_json(std::span<const Estimate> rows, bool with_timing) {
    auto arr = nlohmann::json::array();
    for (const auto& e : rows) arr.push_back(to_json(e, with_timing));
    return arr;
}

}  // namespace preint
