#ifndef ZIPS_IO_HPP
#define ZIPS_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "zips/count_sample.hpp"

namespace zips {

/// Malformed input; the message names the source and line.
class DataFormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Reads either frequency rows `value,count` or one raw count per line.
/// Blank lines and `#` comments are skipped; a leading `value,count` header is allowed.
CountSample parse_dataset(std::istream& in, std::string_view source = "input");
CountSample read_dataset(const std::filesystem::path& path);

/// `value,count` rows in increasing value order, with header.
std::string to_frequency_csv(const CountSample& sample);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// `p,density` rows.
std::string density_csv(std::span<const double> p, std::span<const double> density);

}  // namespace zips

#endif  // ZIPS_IO_HPP
