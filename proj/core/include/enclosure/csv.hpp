#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>

namespace enclosure::csv {

/// Round-trip-safe rendering: 17 significant digits, '.' separator,
/// independent of the global locale.
std::string format_double(double v);

/// RFC 4180 field quoting.
std::string quote(std::string_view field);

/// CSV writer emitting '\n'-terminated records.
class Writer {
public:
  explicit Writer(const std::filesystem::path& path);

  Writer& field(std::string_view s);
  Writer& field(double v);
  Writer& field(long long v);
  Writer& field(int v) { return field(static_cast<long long>(v)); }
  Writer& field(std::size_t v) { return field(static_cast<long long>(v)); }
  void end_row();

  void header(std::initializer_list<std::string_view> names);

private:
  std::ofstream out_;
  bool first_ = true;
};

}  // namespace enclosure::csv
