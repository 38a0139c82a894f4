#pragma once

// Minimal RFC 4180-style delimited text reader/writer. Internal to the library.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexsim::csv {

class Reader {
 public:
  Reader(std::istream& in, char delimiter) : in_(in), delim_(delimiter) {}

  /// Next record, or nullopt at end of input. Lines starting with '#' are
  /// skipped, as are blank lines.
  std::optional<std::vector<std::string>> next();
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  char delim_;
  std::size_t line_ = 0;
};

/// Column name -> index lookup for a header row.
class Header {
 public:
  explicit Header(std::vector<std::string> names);
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t require(std::string_view name) const;  // throws SchemaMismatch
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Quotes a field when it contains the delimiter, a quote or a newline.
std::string escape(std::string_view field, char delimiter);

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter);

}  // namespace lexsim::csv
