#include "ioforensics/csv.hpp"

namespace iof::csv {

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  malformed_ = false;
  int c = in_.get();
  if (c == std::char_traits<char>::eof()) return false;
  if (records_ == 0 && c == 0xEF) {
    // UTF-8 BOM
    if (in_.peek() == 0xBB) {
      in_.get();
      if (in_.peek() == 0xBF) {
        in_.get();
        c = in_.get();
      }
    }
  }
  ++records_;

  std::string field;
  bool in_quotes = false;
  bool after_quote = false;
  for (;; c = in_.get()) {
    if (c == std::char_traits<char>::eof()) {
      if (in_quotes) malformed_ = true;
      fields.push_back(std::move(field));
      return true;
    }
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == sep_) {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && in_.peek() == '\n') in_.get();
      fields.push_back(std::move(field));
      return true;
    } else if (ch == '"' && field.empty() && !after_quote) {
      in_quotes = true;
    } else {
      if (after_quote) malformed_ = true;
      field.push_back(ch);
    }
  }
}

std::string escape(std::string_view field, char sep) {
  const bool needs = field.find_first_of(std::string{sep, '"', '\n', '\r'}) != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields, char sep) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(sep);
    out << escape(fields[i], sep);
  }
  out.put('\n');
}

}  // namespace iof::csv
