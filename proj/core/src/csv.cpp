#include "enclosure/csv.hpp"

#include "enclosure/error.hpp"

#include <charconv>
#include <cmath>

namespace enclosure::csv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Writer::Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
  if (!out_) raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");
}

Writer& Writer::field(std::string_view s) {
  if (!first_) out_ << ',';
  out_ << quote(s);
  first_ = false;
  return *this;
}

Writer& Writer::field(double v) { return field(std::string_view(format_double(v))); }

Writer& Writer::field(long long v) { return field(std::string_view(std::to_string(v))); }

void Writer::end_row() {
  out_ << '\n';
  first_ = true;
  if (!out_) raise(ErrorCode::Io, "CSV write failed");
}

void Writer::header(std::initializer_list<std::string_view> names) {
  for (auto n : names) field(n);
  end_row();
}

}  // namespace enclosure::csv
