#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mapuq {

//! Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(std::filesystem::path const &path);

struct FileRecord {
  std::string path;
  std::string sha256;
};

//! \brief Provenance record written next to every command's outputs.
//!
//! `argv` is the exact argument list of the run; replaying it must reproduce
//! every output checksum. Timings are informational and excluded from replay.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::map<std::string, std::string> parameters;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<FileRecord> inputs;
  std::vector<FileRecord> outputs;
  std::map<std::string, double> timings;
  std::map<std::string, std::string> notes;
  std::string version = MAPUQ_VERSION;

  void add_input(std::filesystem::path const &path);
  void add_output(std::filesystem::path const &path);

  void write(std::filesystem::path const &path) const;
  static RunManifest read(std::filesystem::path const &path);
};

} // namespace mapuq
