#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace iof::csv {

/// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
/// line breaks. A leading UTF-8 BOM on the first record is dropped.
class Reader {
 public:
  explicit Reader(std::istream& in, char sep = ',') : in_(in), sep_(sep) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// `malformed()` reports an unterminated quote or stray characters after a
  /// closing quote in the record just read.
  bool next(std::vector<std::string>& fields);

  bool malformed() const { return malformed_; }
  /// 1-based index of the record just read (header is record 1).
  std::size_t record_number() const { return records_; }

 private:
  std::istream& in_;
  char sep_;
  bool malformed_ = false;
  std::size_t records_ = 0;
};

std::string escape(std::string_view field, char sep = ',');

void write_row(std::ostream& out, const std::vector<std::string>& fields, char sep = ',');

}  // namespace iof::csv
