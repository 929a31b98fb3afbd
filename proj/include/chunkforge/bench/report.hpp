#ifndef CHUNKFORGE_BENCH_REPORT_HPP
#define CHUNKFORGE_BENCH_REPORT_HPP

#include <string>

#include "chunkforge/bench/harness.hpp"

namespace chunkforge::bench {

// CSV columns, in order:
//   run,seconds,bytes_written,throughput_bps,wire_data_bytes,
//   mean_similarity,allocations_total,pool_hits,aborted
// One row per run plus a final "summary" row holding the mean over
// non-aborted runs.
std::string report_csv(const BenchReport& report);
void write_report_csv(const BenchReport& report, const std::string& path);
BenchReport parse_report_csv(const std::string& csv);

} // namespace chunkforge::bench

#endif
