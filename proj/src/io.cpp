#include "zips/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

namespace zips {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::int64_t parse_int(std::string_view field, std::string_view source, std::size_t line, const char* what) {
  field = trim(field);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataFormatError(std::string(source) + ":" + std::to_string(line) + ": " + what + " '" +
                          std::string(field) + "' is not an integer");
  }
  return value;
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& msg) {
  throw DataFormatError(std::string(source) + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

CountSample parse_dataset(std::istream& in, std::string_view source) {
  CountSample::FrequencyTable freq;
  enum class Form { Unknown, Frequency, Raw } form = Form::Unknown;
  std::string raw;
  std::size_t line = 0;
  bool any = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (!any && comma != std::string_view::npos && trim(text.substr(0, comma)) == "value") {
      form = Form::Frequency;
      continue;
    }
    const Form this_form = comma == std::string_view::npos ? Form::Raw : Form::Frequency;
    if (form == Form::Unknown) form = this_form;
    if (form != this_form) fail(source, line, "mixes raw values and value,count rows");
    if (form == Form::Raw) {
      const auto v = parse_int(text, source, line, "value");
      if (v < 0) fail(source, line, "negative count " + std::to_string(v));
      ++freq[v];
    } else {
      if (text.find(',', comma + 1) != std::string_view::npos) fail(source, line, "expected exactly two fields");
      const auto v = parse_int(text.substr(0, comma), source, line, "value");
      const auto c = parse_int(text.substr(comma + 1), source, line, "frequency");
      if (v < 0) fail(source, line, "negative count value " + std::to_string(v));
      if (c <= 0) fail(source, line, "frequency must be a positive integer, got " + std::to_string(c));
      if (freq.contains(v)) fail(source, line, "value " + std::to_string(v) + " listed twice");
      freq[v] = c;
    }
    any = true;
  }
  if (!any) throw DataFormatError(std::string(source) + ": no data rows");
  return CountSample(std::move(freq));
}

CountSample read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open data file '" + path.string() + "'");
  return parse_dataset(in, path.string());
}

std::string to_frequency_csv(const CountSample& sample) {
  std::ostringstream out;
  out << "value,count\n";
  for (const auto& [v, c] : sample.frequencies()) out << v << ',' << c << '\n';
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string density_csv(std::span<const double> p, std::span<const double> density) {
  if (p.size() != density.size()) throw std::invalid_argument("density grid and values differ in length");
  std::string out = "p,density\n";
  char buf[64];
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", p[i], density[i]);
    out += buf;
  }
  return out;
}

}  // namespace zips
