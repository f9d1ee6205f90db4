#include "chirp/csv_io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace chirp {

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Provenance::header() const {
  std::ostringstream os;
  std::array<char, 17> hex{};
  std::snprintf(hex.data(), hex.size(), "%016llx", static_cast<unsigned long long>(config_hash));
  os << "# config_hash: " << hex.data() << '\n';
  os << "# seed: " << seed << '\n';
  os << "# version: " << version << '\n';
  for (const auto& [k, v] : extra) os << "# " << k << ": " << v << '\n';
  return os.str();
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string fringe_csv(const FringeRecord& rec, const Provenance& prov) {
  std::ostringstream os;
  os << prov.header();
  const bool sigma = !rec.p0_sigma.empty();
  os << (sigma ? "t1_ns,p0,p0_sigma\n" : "t1_ns,p0\n");
  for (std::size_t i = 0; i < rec.size(); ++i) {
    os << format_double(rec.t1_ns[i]) << ',' << format_double(rec.p0[i]);
    if (sigma) os << ',' << format_double(rec.p0_sigma[i]);
    os << '\n';
  }
  return os.str();
}

std::string spectrum_csv(const Spectrum& spec, const Provenance& prov) {
  std::ostringstream os;
  os << prov.header();
  os << "# window: " << to_string(spec.window) << '\n';
  os << "# zero_pad: " << spec.zero_pad << '\n';
  if (!spec.source.empty()) os << "# source: " << spec.source << '\n';
  os << "freq_MHz,re,im,abs\n";
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const auto v = spec.values[k];
    os << format_double(spec.freq_mhz[k]) << ',' << format_double(v.real()) << ','
       << format_double(v.imag()) << ',' << format_double(std::abs(v)) << '\n';
  }
  return os.str();
}

std::string peaks_csv(const PeakList& peaks, const Provenance& prov) {
  std::ostringstream os;
  os << prov.header();
  os << "freq_MHz,abs_amp,class\n";
  for (const Peak& p : peaks) {
    os << format_double(p.freq_mhz) << ',' << format_double(p.abs_amp) << ',' << to_string(p.cls) << '\n';
  }
  return os.str();
}

std::string table_csv(const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows, const Provenance& prov) {
  std::ostringstream os;
  os << prov.header();
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw std::invalid_argument("table_csv: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

void write_fringe_csv(const std::filesystem::path& path, const FringeRecord& rec, const Provenance& prov) {
  write_file_atomic(path, fringe_csv(rec, prov));
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spec, const Provenance& prov) {
  write_file_atomic(path, spectrum_csv(spec, prov));
}

void write_peaks_csv(const std::filesystem::path& path, const PeakList& peaks, const Provenance& prov) {
  write_file_atomic(path, peaks_csv(peaks, prov));
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      t.comments.push_back(line);
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!have_header) {
      t.columns = std::move(fields);
      have_header = true;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

}  // namespace chirp
