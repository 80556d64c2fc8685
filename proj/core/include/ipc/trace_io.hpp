#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ipc/solvers.hpp"

namespace ipc {

// CSV persistence of run traces. Scalars are printed with 17 significant
// digits, so a parsed trace reproduces every stored double bit-exactly.
// Metadata travels in leading '# key=value' comment lines; the mandatory
// header row and the column order are fixed.

using MetaList = std::vector<std::pair<std::string, std::string>>;

struct ParsedTrace {
  std::vector<IterationRecord> records;
  std::map<std::string, std::string> meta;
};

std::string format_trace_csv(const RunTrace& trace, const MetaList& meta);
void write_trace_csv(const std::string& path, const RunTrace& trace, const MetaList& meta);
ParsedTrace parse_trace_csv(const std::string& content);
ParsedTrace read_trace_csv(const std::string& path);

// Writes via a temporary file in the same directory plus rename, so
// readers never observe a partially written file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// 17-significant-digit formatting used for every double that must
// round-trip through text.
std::string format_double(double v);

}  // namespace ipc
