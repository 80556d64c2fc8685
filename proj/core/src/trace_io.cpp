#include "ipc/trace_io.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ipc/errors.hpp"

namespace ipc {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

constexpr const char* kHeader = "k,f,grad_norm,h_k,alpha_k,r_k,ls_evals,dist_sq";

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const char* field) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw IoError(std::string("trace CSV: bad ") + field + " value '" + s + "'");
  return v;
}

std::optional<double> parse_opt(const std::string& s, const char* field) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, field);
}

}  // namespace

std::string format_trace_csv(const RunTrace& trace, const MetaList& meta) {
  std::ostringstream os;
  for (const auto& [key, value] : meta) os << "# " << key << "=" << value << "\n";
  os << "# status=" << to_string(trace.status) << "\n";
  os << "# iterations=" << trace.iterations << "\n";
  os << "# total_grad_evals=" << trace.total_grad_evals << "\n";
  if (trace.eta_fallbacks > 0) os << "# eta_fallbacks=" << trace.eta_fallbacks << "\n";
  if (!trace.message.empty()) os << "# message=" << trace.message << "\n";
  os << kHeader << "\n";
  for (const auto& rec : trace.records) {
    os << rec.k << ',' << format_double(rec.f) << ',' << format_double(rec.grad_norm)
       << ',' << opt_field(rec.h_k) << ',' << opt_field(rec.alpha_k) << ','
       << opt_field(rec.r_k) << ',' << rec.ls_evals << ',' << opt_field(rec.dist_sq)
       << "\n";
  }
  return os.str();
}

void write_trace_csv(const std::string& path, const RunTrace& trace, const MetaList& meta) {
  atomic_write_file(path, format_trace_csv(trace, meta));
}

ParsedTrace parse_trace_csv(const std::string& content) {
  ParsedTrace out;
  std::istringstream is(content);
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body.front() == ' ') body.erase(0, 1);
      const std::size_t eq = body.find('=');
      if (eq != std::string::npos)
        out.meta[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (!header_seen) {
      if (line != kHeader)
        throw IoError("trace CSV: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 8)
      throw IoError("trace CSV: expected 8 fields, got " + std::to_string(fields.size()));
    IterationRecord rec;
    rec.k = static_cast<long>(parse_double(fields[0], "k"));
    rec.f = parse_double(fields[1], "f");
    rec.grad_norm = parse_double(fields[2], "grad_norm");
    rec.h_k = parse_opt(fields[3], "h_k");
    rec.alpha_k = parse_opt(fields[4], "alpha_k");
    rec.r_k = parse_opt(fields[5], "r_k");
    rec.ls_evals = static_cast<int>(parse_double(fields[6], "ls_evals"));
    rec.dist_sq = parse_opt(fields[7], "dist_sq");
    out.records.push_back(std::move(rec));
  }
  if (!header_seen) throw IoError("trace CSV: missing header row");
  return out;
}

ParsedTrace read_trace_csv(const std::string& path) {
  return parse_trace_csv(read_file(path));
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp + "' for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) {
      std::remove(tmp.c_str());
      throw IoError("write to '" + tmp + "' failed");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace ipc
