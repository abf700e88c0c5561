#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ortholap {

// Shortest-precision decimal formats used for all emitted text. Every file the
// library writes goes through these helpers so repeated runs are byte-identical.

// 17 significant digits: round-trips any double exactly.
std::string fmt_g17(double v);

// 12 significant digits: CSV/plot output.
std::string fmt_g12(double v);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

// FNV-1a 64-bit content hash, hex-encoded; used by report manifests.
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

// Order-independent deterministic reduction: sums pairwise by halving, so the
// result does not depend on how work was partitioned. May reorder its input.
double pairwise_sum(std::vector<double> values);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ortholap
