#pragma once

// Delimited-text ingestion and export.
//
// Records follow the usual quoting convention: a field may be wrapped in
// double quotes, inside which the delimiter and line breaks are literal and a
// doubled quote stands for one quote. CRLF and LF line endings are accepted.
// Numbers use a decimal point regardless of locale.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "vdec/core.hpp"

namespace vdec {

enum class MissingPolicy { reject, as_category };

inline constexpr std::string_view kMissingCode = "(missing)";

struct CsvRecord {
  std::size_t line = 0;  ///< 1-based line where the record starts
  std::vector<std::string> fields;
};

/// Splits a stream into records. Blank lines are skipped.
[[nodiscard]] inline std::vector<CsvRecord> read_records(std::istream& in, char delimiter = ',') {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool record_has_content = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    if (record_has_content) {
      end_field();
      records.push_back(std::move(current));
    }
    current = CsvRecord{};
    field.clear();
    field_quoted = false;
    record_has_content = false;
  };

  char ch = 0;
  while (in.get(ch)) {
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '\r' && in.peek() == '\n') continue;
    if (ch == '\n' || ch == '\r') {
      end_record();
      ++line;
      current.line = line;
      continue;
    }
    record_has_content = true;
    if (ch == delimiter) {
      end_field();
    } else if (ch == '"' && field.empty() && !field_quoted) {
      in_quotes = true;
      field_quoted = true;
    } else {
      field.push_back(ch);
    }
  }
  if (in_quotes) {
    throw DataError("unterminated quoted field starting on line " + std::to_string(current.line));
  }
  end_record();
  return records;
}

/// Strict decimal parse of a whole field (surrounding blanks allowed).
[[nodiscard]] inline std::optional<double> parse_real(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] inline std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

struct LoadOptions {
  std::string target;
  std::optional<std::vector<std::string>> characters;  ///< default: every non-target column
  MissingPolicy missing = MissingPolicy::reject;
  char delimiter = ',';
};

[[nodiscard]] inline Dataset load_csv(std::istream& in, const LoadOptions& opt) {
  const auto records = read_records(in, opt.delimiter);
  if (records.empty()) throw DataError("input has no header row");
  const auto& header = records.front().fields;

  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!column_of.emplace(header[c], c).second) {
      throw DataError("duplicate column '" + header[c] + "' in header");
    }
  }
  auto lookup = [&](const std::string& name) {
    auto it = column_of.find(name);
    if (it == column_of.end()) throw InvalidArgument("unknown column '" + name + "'");
    return it->second;
  };

  const std::size_t target_col = lookup(opt.target);
  std::vector<std::size_t> char_cols;
  std::vector<std::string> char_names;
  if (opt.characters) {
    for (const auto& name : *opt.characters) {
      if (name == opt.target) {
        throw InvalidArgument("column '" + name + "' cannot be both target and character");
      }
      char_cols.push_back(lookup(name));
      char_names.push_back(name);
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == target_col) continue;
      char_cols.push_back(c);
      char_names.push_back(header[c]);
    }
  }

  std::vector<double> target;
  std::vector<std::vector<std::string>> codes(char_cols.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw DataError("line " + std::to_string(rec.line) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(rec.fields.size()));
    }
    const auto value = parse_real(rec.fields[target_col]);
    if (!value) {
      throw DataError("line " + std::to_string(rec.line) + ": target column '" + opt.target +
                      "' is not a finite number: '" + rec.fields[target_col] + "'");
    }
    target.push_back(*value);
    for (std::size_t k = 0; k < char_cols.size(); ++k) {
      std::string code = rec.fields[char_cols[k]];
      if (code.empty()) {
        if (opt.missing == MissingPolicy::reject) {
          throw DataError("line " + std::to_string(rec.line) + ": missing value in column '" +
                          char_names[k] + "'");
        }
        code = kMissingCode;
      }
      codes[k].push_back(std::move(code));
    }
  }
  if (target.empty()) throw DataError("input has a header but no data rows");

  std::vector<CharacterColumn> characters;
  characters.reserve(char_cols.size());
  for (std::size_t k = 0; k < char_cols.size(); ++k) {
    characters.emplace_back(char_names[k], std::move(codes[k]));
  }
  return Dataset(NumericVector(std::move(target)), std::move(characters));
}

[[nodiscard]] inline Dataset load_csv(const std::string& path, const LoadOptions& opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return load_csv(in, opt);
}

[[nodiscard]] inline std::string quote_field(const std::string& field, char delimiter) {
  const bool needs = field.find_first_of(std::string{'"', '\n', '\r', delimiter}) !=
                         std::string::npos ||
                     (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

inline void write_csv(std::ostream& out, const Dataset& d, const std::string& target_name,
                      char delimiter = ',') {
  out << quote_field(target_name, delimiter);
  for (const auto& c : d.characters()) out << delimiter << quote_field(c.name(), delimiter);
  out << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << format_real(d.target()[i]);
    for (const auto& c : d.characters()) out << delimiter << quote_field(c.codes()[i], delimiter);
    out << '\n';
  }
}

/// Keeps the individuals whose target is at most `max_value`.
[[nodiscard]] inline Dataset filter_target_max(const Dataset& d, double max_value) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.target()[i] <= max_value) keep.push_back(i);
  }
  if (keep.empty()) {
    throw DataError("no individual has target <= " + format_real(max_value));
  }
  if (keep.size() == d.size()) return d;
  std::vector<double> target;
  target.reserve(keep.size());
  for (std::size_t i : keep) target.push_back(d.target()[i]);
  std::vector<CharacterColumn> characters;
  for (const auto& c : d.characters()) {
    std::vector<std::string> codes;
    codes.reserve(keep.size());
    for (std::size_t i : keep) codes.push_back(c.codes()[i]);
    characters.emplace_back(c.name(), std::move(codes));
  }
  return Dataset(NumericVector(std::move(target)), std::move(characters));
}

}  // namespace vdec
