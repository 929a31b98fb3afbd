#include "chunkforge/bench/report.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chunkforge::bench {

namespace {

constexpr const char* kHeader =
    "run,seconds,bytes_written,throughput_bps,wire_data_bytes,"
    "mean_similarity,allocations_total,pool_hits,aborted";

void append_row(std::ostringstream& out, const std::string& label,
                const RunResult& r) {
    out << label << ',' << r.seconds << ',' << r.bytes_written << ','
        << r.throughput_bps << ',' << r.wire_data_bytes << ','
        << r.mean_similarity << ',' << r.allocations_total << ','
        << r.pool_hits << ',' << (r.aborted ? 1 : 0) << '\n';
}

} // namespace

std::string report_csv(const BenchReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << kHeader << '\n';
    for (const auto& r : report.runs)
        append_row(out, std::to_string(r.run), r);
    append_row(out, "summary", report.summary());
    return out.str();
}

void write_report_csv(const BenchReport& report, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write report to " + path);
    f << report_csv(report);
    if (!f) throw std::runtime_error("write failed for " + path);
}

BenchReport parse_report_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != kHeader)
        throw std::runtime_error("unexpected CSV header");

    BenchReport report;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        const bool is_summary = field == "summary";
        RunResult r;
        if (!is_summary) r.run = static_cast<std::uint32_t>(std::stoul(field));
        std::getline(row, field, ',');
        r.seconds = std::stod(field);
        std::getline(row, field, ',');
        r.bytes_written = std::stoull(field);
        std::getline(row, field, ',');
        r.throughput_bps = std::stod(field);
        std::getline(row, field, ',');
        r.wire_data_bytes = std::stoull(field);
        std::getline(row, field, ',');
        r.mean_similarity = std::stod(field);
        std::getline(row, field, ',');
        r.allocations_total = std::stoull(field);
        std::getline(row, field, ',');
        r.pool_hits = std::stoull(field);
        std::getline(row, field, ',');
        r.aborted = field == "1";
        if (!is_summary) report.runs.push_back(r);
    }
    return report;
}

} // namespace chunkforge::bench
