#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ph3::kv {

/// Plain-text key/value documents:
///
///     # comment
///     key = value
///     [section]
///     key = value
///
/// Keys before the first header belong to the unnamed section "".
struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  const Entry* find(const std::string& key) const;
  /// Value of a required key; FormatError naming the key otherwise.
  const std::string& require(const std::string& key) const;
  /// FormatError naming the first key not in the allowed list.
  void reject_unknown(const std::vector<std::string>& allowed) const;
};

struct Document {
  std::vector<Section> sections;
  std::string origin;  ///< file name used in diagnostics

  const Section& root() const { return sections.front(); }
  std::vector<const Section*> all(const std::string& name) const;
};

Document parse(const std::string& text, const std::string& origin = "<string>");
Document read_file(const std::string& path);
std::string write(const Document& doc);

double to_double(const Entry& e);
std::int64_t to_int(const Entry& e);
std::uint64_t to_uint(const Entry& e);
std::vector<double> to_doubles(const Entry& e);
std::vector<std::int64_t> to_ints(const Entry& e);
bool to_bool(const Entry& e);
/// Shortest text that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace ph3::kv
