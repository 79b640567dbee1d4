#pragma once

#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "tpi/duality.hpp"
#include "tpi/hbt.hpp"
#include "tpi/sampling.hpp"

namespace tpi::report {

enum class Format { csv, json };

inline Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw std::invalid_argument("unknown format: " + std::string(name));
}

/// 15 significant digits, enough for a double to survive a round trip
/// through text at the tolerances used anywhere in the library.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

inline double parse_number(std::string_view field) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw std::runtime_error("malformed numeric field: " + std::string(field));
  }
  return v;
}

/// Writes through a temp file in the same directory plus rename, so a
/// crash mid-write never leaves a truncated file at the target path.
inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp =
      dir / (path.filename().string() + ".tmp-" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open for writing: " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ec2;
    fs::remove(tmp, ec2);
    throw std::runtime_error("rename failed for " + path.string() + ": " +
                             ec.message());
  }
}

// ---------------------------------------------------------------------------
// Fringe patterns
// ---------------------------------------------------------------------------

inline std::string to_csv(const hbt::FringePattern& p) {
  std::string out = "dx,density,corrected\n";
  for (std::size_t i = 0; i < p.separations.size(); ++i) {
    out += format_number(p.separations[i]);
    out += ',';
    out += format_number(p.densities[i]);
    out += ',';
    out += format_number(p.envelope_corrected[i]);
    out += '\n';
  }
  return out;
}

inline std::string to_json(const hbt::FringePattern& p) {
  std::string out = "{\n  \"fringe_period\": ";
  out += format_number(p.fringe_period);
  out += ",\n  \"rows\": [\n";
  for (std::size_t i = 0; i < p.separations.size(); ++i) {
    out += "    {\"dx\": ";
    out += format_number(p.separations[i]);
    out += ", \"density\": ";
    out += format_number(p.densities[i]);
    out += ", \"corrected\": ";
    out += format_number(p.envelope_corrected[i]);
    out += i + 1 < p.separations.size() ? "},\n" : "}\n";
  }
  out += "  ]\n}\n";
  return out;
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace detail

/// Inverse of to_csv for patterns. The period is not stored in the CSV;
/// it is recovered from the separation column span only if the caller
/// needs it, so here it is left at zero.
inline hbt::FringePattern pattern_from_csv(std::string_view csv) {
  hbt::FringePattern p;
  std::size_t start = 0;
  bool header = true;
  while (start < csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string_view::npos) end = csv.size();
    const std::string_view line = csv.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    if (header) {
      if (line != "dx,density,corrected") {
        throw std::runtime_error("pattern CSV: unexpected header");
      }
      header = false;
      continue;
    }
    const auto fields = detail::split(line, ',');
    if (fields.size() != 3) {
      throw std::runtime_error("pattern CSV: expected 3 fields per row");
    }
    p.separations.push_back(parse_number(fields[0]));
    p.densities.push_back(parse_number(fields[1]));
    p.envelope_corrected.push_back(parse_number(fields[2]));
  }
  if (header) throw std::runtime_error("pattern CSV: missing header");
  return p;
}

/// Serializes and writes a pattern. Refuses an empty pattern before
/// touching the filesystem.
inline void emit_pattern(const hbt::FringePattern& p,
                         const std::filesystem::path& path, Format format) {
  if (p.separations.empty()) {
    throw std::invalid_argument("emit_pattern: empty pattern");
  }
  write_file_atomic(path, format == Format::csv ? to_csv(p) : to_json(p));
}

// ---------------------------------------------------------------------------
// Duality records
// ---------------------------------------------------------------------------

inline std::string to_csv(const std::vector<duality::DualityRecord>& records) {
  std::string out = "s,D,V,sum,residual,experiment\n";
  for (const auto& r : records) {
    out += format_number(r.overlap_modulus);
    out += ',';
    out += format_number(r.distinguishability);
    out += ',';
    out += format_number(r.visibility);
    out += ',';
    out += format_number(r.sum);
    out += ',';
    out += format_number(r.residual);
    out += ',';
    out += duality::to_label(r.experiment);
    out += '\n';
  }
  return out;
}

inline std::string to_json(const std::vector<duality::DualityRecord>& records) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out += "  {\"s\": ";
    out += format_number(r.overlap_modulus);
    out += ", \"D\": ";
    out += format_number(r.distinguishability);
    out += ", \"V\": ";
    out += format_number(r.visibility);
    out += ", \"sum\": ";
    out += format_number(r.sum);
    out += ", \"residual\": ";
    out += format_number(r.residual);
    out += ", \"std_error\": ";
    out += format_number(r.std_error);
    out += ", \"experiment\": \"";
    out += duality::to_label(r.experiment);
    out += i + 1 < records.size() ? "\"},\n" : "\"}\n";
  }
  out += "]\n";
  return out;
}

inline void emit_records(const std::vector<duality::DualityRecord>& records,
                         const std::filesystem::path& path, Format format) {
  if (records.empty()) throw std::invalid_argument("emit_records: no records");
  write_file_atomic(path,
                    format == Format::csv ? to_csv(records) : to_json(records));
}

// ---------------------------------------------------------------------------
// Event batches
// ---------------------------------------------------------------------------

inline std::string to_csv(const sampling::EventBatch& batch) {
  std::string out;
  if (batch.kind == sampling::BatchKind::hom) {
    out = "outcome\n";
    for (auto o : batch.outcomes) {
      out += sampling::to_label(o);
      out += '\n';
    }
  } else {
    out = "x1,x2\n";
    for (const auto& [x1, x2] : batch.positions) {
      out += format_number(x1);
      out += ',';
      out += format_number(x2);
      out += '\n';
    }
  }
  return out;
}

inline std::string to_json(const sampling::EventBatch& batch) {
  std::string out = "{\n  \"seed\": " + std::to_string(batch.seed);
  out += ",\n  \"count\": " + std::to_string(batch.count);
  if (batch.kind == sampling::BatchKind::hom) {
    out += ",\n  \"outcomes\": [";
    for (std::size_t i = 0; i < batch.outcomes.size(); ++i) {
      out += '"';
      out += sampling::to_label(batch.outcomes[i]);
      out += '"';
      if (i + 1 < batch.outcomes.size()) out += ", ";
    }
    out += "]\n}\n";
  } else {
    out += ",\n  \"acceptance_rate\": " + format_number(batch.acceptance_rate);
    out += ",\n  \"events\": [\n";
    for (std::size_t i = 0; i < batch.positions.size(); ++i) {
      out += "    [" + format_number(batch.positions[i].first) + ", " +
             format_number(batch.positions[i].second) + "]";
      out += i + 1 < batch.positions.size() ? ",\n" : "\n";
    }
    out += "  ]\n}\n";
  }
  return out;
}

inline void emit_batch(const sampling::EventBatch& batch,
                       const std::filesystem::path& path, Format format) {
  if (batch.count == 0) throw std::invalid_argument("emit_batch: empty batch");
  write_file_atomic(path,
                    format == Format::csv ? to_csv(batch) : to_json(batch));
}

}  // namespace tpi::report
