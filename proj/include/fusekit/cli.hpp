#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fusekit/fusion.hpp"
#include "fusekit/report_format.hpp"

namespace fusekit::cli {

/// Runs one command line (args exclude the program name). Returns the
/// process exit status: 0 on success, 1 on a library error, 2 on a usage
/// error. Errors are written to `err` as a single line
/// `fusekit: error[<kind>]: <reason>`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One row per single model plus the plain, weighted and majority
/// ensembles, sorted by accuracy.
std::vector<ComparisonRow> build_comparison(const AlignedPanel& panel, const WeightVector& weights,
                                            double threshold = kDefaultThreshold);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace fusekit::cli
