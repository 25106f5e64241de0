#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace effilab {

enum class Format { Csv, Json };

/// An ordered list of named fields, emitted as one CSV row or one JSON line.
class Record {
 public:
  using Value = std::variant<double, std::int64_t, std::string, bool>;

  Record& add(std::string name, double value);
  Record& add(std::string name, std::int64_t value);
  Record& add(std::string name, std::size_t value);
  Record& add(std::string name, std::string value);
  Record& add(std::string name, const char* value);
  Record& add(std::string name, bool value);

  const std::vector<std::pair<std::string, Value>>& fields() const { return fields_; }

 private:
  std::vector<std::pair<std::string, Value>> fields_;
};

/// Doubles use 17 significant digits so values round-trip exactly.
std::string format_double(double x);

/// Writes a record stream. CSV gets a header row from the first record and
/// rejects later records with different field names; JSON writes one object
/// per line. Line endings are LF.
class RecordWriter {
 public:
  RecordWriter(std::ostream& os, Format format) : os_(os), format_(format) {}
  void write(const Record& record);

 private:
  std::ostream& os_;
  Format format_;
  std::vector<std::string> header_;
};

}  // namespace effilab
