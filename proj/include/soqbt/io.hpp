#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "soqbt/loewner.hpp"
#include "soqbt/reduction.hpp"

namespace soqbt::io {

/// Major version written and accepted by every reader.
inline constexpr int kFormatMajor = 1;
inline constexpr const char* kFormatVersion = "1.0";

/// Sample-set file: a general set has left and right samples, a Hermite set
/// only the right samples (the left rule is the negated right rule).
struct SampleFile {
  AssemblyMode mode = AssemblyMode::General;
  DampingSpec damping;
  std::optional<SampleSet> left;
  SampleSet right;
};

std::string system_to_string(const SecondOrderSystem& sys);
SecondOrderSystem system_from_string(const std::string& text);

std::string samples_to_string(const SampleFile& file);
SampleFile samples_from_string(const std::string& text);

std::string rom_to_string(const ReducedSecondOrderModel& rom);
ReducedSecondOrderModel rom_from_string(const std::string& text);

/// File wrappers. Readers throw FormatError for malformed content and
/// VersionMismatch for an unknown major version.
void write_system(const std::filesystem::path& path, const SecondOrderSystem& sys);
SecondOrderSystem read_system(const std::filesystem::path& path);
void write_samples(const std::filesystem::path& path, const SampleFile& file);
SampleFile read_samples(const std::filesystem::path& path);
void write_rom(const std::filesystem::path& path, const ReducedSecondOrderModel& rom);
ReducedSecondOrderModel read_rom(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Comma-separated table with one header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// Adds a row; the length must match the header.
  void add_row(const std::vector<double>& values);
  void write(std::ostream& os) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace soqbt::io
