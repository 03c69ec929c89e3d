#include "lob/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "lob/error.hpp"

namespace lob {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (const auto& name : header) cell(std::string_view(name));
  end_row();
}

void CsvWriter::separator() {
  if (in_row_ >= columns_) {
    throw Error(ErrorCode::InvalidArgument, "CSV row has more cells than the header");
  }
  if (in_row_ > 0) out_ << ',';
  ++in_row_;
}

CsvWriter& CsvWriter::cell(double value) {
  separator();
  out_ << format_double(value);
  return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::cell(std::uint64_t value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  separator();
  out_ << text;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw Error(ErrorCode::InvalidArgument, "CSV row has fewer cells than the header");
  }
  out_ << '\n';
  in_row_ = 0;
}

}  // namespace lob
