#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chirp/ramsey.hpp"
#include "chirp/spectral.hpp"

namespace chirp {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

/// Written as leading `# key: value` lines of every CSV.
struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version = CHIRP_VERSION;
  std::vector<std::pair<std::string, std::string>> extra;

  std::string header() const;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string fringe_csv(const FringeRecord& rec, const Provenance& prov);
std::string spectrum_csv(const Spectrum& spec, const Provenance& prov);
std::string peaks_csv(const PeakList& peaks, const Provenance& prov);
std::string table_csv(const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows, const Provenance& prov);

void write_fringe_csv(const std::filesystem::path& path, const FringeRecord& rec, const Provenance& prov);
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spec, const Provenance& prov);
void write_peaks_csv(const std::filesystem::path& path, const PeakList& peaks, const Provenance& prov);

/// Parsed numeric CSV: comment lines skipped, first remaining line is the header.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace chirp
