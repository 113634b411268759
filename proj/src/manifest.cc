#include "mapuq/manifest.h"

#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "mapuq/types.h"

namespace mapuq {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_file(fs::path const &path) {
  std::ifstream in(path, std::ios::binary);
  if(!in)
    throw IoError("cannot open '" + path.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if(!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw IoError("cannot initialise SHA-256");
  std::array<char, 1 << 16> buffer;
  while(in) {
    in.read(buffer.data(), buffer.size());
    if(in.gcount() > 0)
      EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  std::ostringstream hex;
  for(unsigned int i = 0; i < length; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

void RunManifest::add_input(fs::path const &path) {
  inputs.push_back({path.generic_string(), sha256_file(path)});
}

void RunManifest::add_output(fs::path const &path) {
  outputs.push_back({path.generic_string(), sha256_file(path)});
}

namespace {

json records_to_json(std::vector<FileRecord> const &records) {
  json out = json::array();
  for(auto const &r : records)
    out.push_back({{"path", r.path}, {"sha256", r.sha256}});
  return out;
}

std::vector<FileRecord> records_from_json(json const &j) {
  std::vector<FileRecord> out;
  for(auto const &r : j)
    out.push_back({r.at("path").get<std::string>(), r.at("sha256").get<std::string>()});
  return out;
}

} // namespace

void RunManifest::write(fs::path const &path) const {
  json j;
  j["command"] = command;
  j["argv"] = argv;
  j["parameters"] = parameters;
  j["seeds"] = seeds;
  j["inputs"] = records_to_json(inputs);
  j["outputs"] = records_to_json(outputs);
  j["timings_seconds"] = timings;
  j["notes"] = notes;
  j["version"] = version;
  if(path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if(!out)
    throw IoError("cannot write manifest '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

RunManifest RunManifest::read(fs::path const &path) {
  std::ifstream in(path);
  if(!in)
    throw IoError("cannot open manifest '" + path.string() + "'");
  RunManifest m;
  try {
    json const j = json::parse(in);
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.parameters = j.value("parameters", std::map<std::string, std::string>{});
    m.seeds = j.value("seeds", std::map<std::string, std::uint64_t>{});
    m.inputs = records_from_json(j.value("inputs", json::array()));
    m.outputs = records_from_json(j.value("outputs", json::array()));
    m.timings = j.value("timings_seconds", std::map<std::string, double>{});
    m.notes = j.value("notes", std::map<std::string, std::string>{});
    m.version = j.value("version", std::string{});
  } catch(json::exception const &e) {
    throw IoError("malformed manifest '" + path.string() + "': " + e.what());
  }
  return m;
}

} // namespace mapuq
