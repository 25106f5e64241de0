#include "effilab/records.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace effilab {

Record& Record::add(std::string name, double value) {
  fields_.emplace_back(std::move(name), value);
  return *this;
}
Record& Record::add(std::string name, std::int64_t value) {
  fields_.emplace_back(std::move(name), value);
  return *this;
}
Record& Record::add(std::string name, std::size_t value) {
  return add(std::move(name), static_cast<std::int64_t>(value));
}
Record& Record::add(std::string name, std::string value) {
  fields_.emplace_back(std::move(name), std::move(value));
  return *this;
}
Record& Record::add(std::string name, const char* value) {
  return add(std::move(name), std::string(value));
}
Record& Record::add(std::string name, bool value) {
  fields_.emplace_back(std::move(name), value);
  return *this;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string render(const Record::Value& v, Format format) {
  return std::visit(
      [format](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          // JSON has no literal for non-finite numbers.
          if (format == Format::Json && !std::isfinite(x)) return "null";
          return format_double(x);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          return format == Format::Json ? json_escape(x) : csv_escape(x);
        }
      },
      v);
}

}  // namespace

void RecordWriter::write(const Record& record) {
  const auto& fields = record.fields();
  if (format_ == Format::Json) {
    os_ << '{';
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os_ << ',';
      os_ << json_escape(fields[i].first) << ':' << render(fields[i].second, format_);
    }
    os_ << "}\n";
    return;
  }
  std::vector<std::string> names;
  names.reserve(fields.size());
  for (const auto& f : fields) names.push_back(f.first);
  if (header_.empty()) {
    header_ = names;
    for (std::size_t i = 0; i < names.size(); ++i) os_ << (i ? "," : "") << csv_escape(names[i]);
    os_ << '\n';
  } else if (names != header_) {
    throw std::logic_error("RecordWriter: CSV record fields differ from the header");
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    os_ << (i ? "," : "") << render(fields[i].second, format_);
  }
  os_ << '\n';
}

}  // namespace effilab
