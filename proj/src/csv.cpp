#include "csv.hpp"

#include "lexsim/error.hpp"

namespace lexsim::csv {

std::optional<std::vector<std::string>> Reader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
      if (i == line.size()) {
        if (quoted) {
          // Embedded newline inside a quoted field.
          std::string more;
          if (!std::getline(in_, more)) {
            throw Error(ErrorCode::SchemaMismatch, "unterminated quoted field at line " + std::to_string(line_));
          }
          ++line_;
          if (!more.empty() && more.back() == '\r') more.pop_back();
          field += '\n';
          line = std::move(more);
          i = 0;
          continue;
        }
        fields.push_back(std::move(field));
        break;
      }
      const char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          quoted = false;
        } else {
          field += c;
        }
      } else if (c == '"' && field.empty()) {
        quoted = true;
      } else if (c == delim_) {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field += c;
      }
      ++i;
    }
    return fields;
  }
  return std::nullopt;
}

Header::Header(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    auto& n = names_[i];
    // Strip a UTF-8 byte order mark on the first column.
    if (i == 0 && n.size() >= 3 && n.compare(0, 3, "\xEF\xBB\xBF") == 0) n.erase(0, 3);
    index_.emplace(n, i);
  }
}

std::optional<std::size_t> Header::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Header::require(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(ErrorCode::SchemaMismatch, "missing column '" + std::string(name) + "'");
}

std::string escape(std::string_view field, char delimiter) {
  if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos &&
      (field.empty() || field[0] != '#')) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << delimiter;
    out << escape(fields[i], delimiter);
  }
  out << '\n';
}

}  // namespace lexsim::csv
