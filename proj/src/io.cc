#include "mapuq/io.h"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mapuq::io {

namespace fs = std::filesystem;

namespace {

constexpr char grid_magic[] = "UQGRID v1";
constexpr char mask_magic[] = "UQMASK";

std::ifstream open_in(fs::path const &path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if(!in)
    throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(fs::path const &path, std::ios::openmode mode = std::ios::out) {
  if(path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if(!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string trim(std::string const &s) {
  auto const first = s.find_first_not_of(" \t\r\n");
  if(first == std::string::npos)
    return {};
  auto const last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::uint64_t byteswap64(std::uint64_t v) {
  std::uint64_t out = 0;
  for(int i = 0; i < 8; ++i)
    out |= ((v >> (8 * i)) & 0xFF) << (8 * (7 - i));
  return out;
}

Index parse_index(std::string const &text, fs::path const &path) {
  Index value = 0;
  auto const t = trim(text);
  auto const [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if(ec != std::errc() || ptr != t.data() + t.size())
    throw IoError("'" + path.string() + "': expected an integer, got '" + t + "'");
  return value;
}

// Next whitespace-separated PGM header token, skipping '#' comments.
std::string pgm_token(std::istream &in) {
  std::string token;
  char c;
  while(in.get(c)) {
    if(c == '#') {
      std::string ignored;
      std::getline(in, ignored);
      if(!token.empty())
        break;
      continue;
    }
    if(std::isspace(static_cast<unsigned char>(c))) {
      if(!token.empty())
        break;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

ImageGrid read_pgm(fs::path const &path) {
  auto in = open_in(path, std::ios::binary);
  auto const magic = pgm_token(in);
  if(magic != "P5" && magic != "P2")
    throw IoError("'" + path.string() + "' is not a PGM file");
  Index const width = parse_index(pgm_token(in), path);
  Index const height = parse_index(pgm_token(in), path);
  Index const maxval = parse_index(pgm_token(in), path);
  if(width < 1 || height < 1 || maxval < 1 || maxval > 65535)
    throw IoError("'" + path.string() + "' has an invalid PGM header");
  ImageGrid image(height, width);
  for(Index i = 0; i < width * height; ++i) {
    unsigned value = 0;
    if(magic == "P2") {
      value = static_cast<unsigned>(parse_index(pgm_token(in), path));
    } else if(maxval < 256) {
      unsigned char byte;
      if(!in.read(reinterpret_cast<char *>(&byte), 1))
        throw IoError("'" + path.string() + "' is truncated");
      value = byte;
    } else {
      unsigned char bytes[2];
      if(!in.read(reinterpret_cast<char *>(bytes), 2))
        throw IoError("'" + path.string() + "' is truncated");
      value = (unsigned{bytes[0]} << 8) | bytes[1];
    }
    image.values[i] = static_cast<Real>(value) / static_cast<Real>(maxval);
  }
  return image;
}

} // namespace

Grid read_grid(fs::path const &path) {
  auto in = open_in(path, std::ios::binary);
  std::string magic, dims;
  std::getline(in, magic);
  if(trim(magic) != grid_magic)
    throw IoError("'" + path.string() + "' is not a UQGRID v1 file");
  std::getline(in, dims);
  std::istringstream header(dims);
  Grid grid;
  if(!(header >> grid.rows >> grid.cols >> grid.channels) || grid.rows < 1 || grid.cols < 1
     || (grid.channels != 1 && grid.channels != 2))
    throw IoError("'" + path.string() + "' has an invalid UQGRID header");
  auto const count = static_cast<std::size_t>(grid.rows * grid.cols * grid.channels);
  grid.data.resize(count);
  std::vector<std::uint64_t> raw(count);
  if(!in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(count * 8)))
    throw IoError("'" + path.string() + "' is truncated");
  for(std::size_t i = 0; i < count; ++i) {
    auto const bits = std::endian::native == std::endian::little ? raw[i] : byteswap64(raw[i]);
    grid.data[i] = std::bit_cast<double>(bits);
  }
  return grid;
}

void write_grid(fs::path const &path, Grid const &grid) {
  auto const count = static_cast<std::size_t>(grid.rows * grid.cols * grid.channels);
  if(grid.data.size() != count)
    throw DimensionError("grid data length does not match its header");
  auto out = open_out(path, std::ios::binary);
  out << grid_magic << '\n' << grid.rows << ' ' << grid.cols << ' ' << grid.channels << '\n';
  std::vector<std::uint64_t> raw(count);
  for(std::size_t i = 0; i < count; ++i) {
    auto const bits = std::bit_cast<std::uint64_t>(grid.data[i]);
    raw[i] = std::endian::native == std::endian::little ? bits : byteswap64(bits);
  }
  out.write(reinterpret_cast<char const *>(raw.data()), static_cast<std::streamsize>(count * 8));
  if(!out)
    throw IoError("failed writing '" + path.string() + "'");
}

void write_image(fs::path const &path, ImageGrid const &image) {
  write_grid(path, {image.rows, image.cols, 1,
                    std::vector<double>(image.values.data(), image.values.data() + image.size())});
}

ImageGrid read_image(fs::path const &path) {
  std::string magic;
  {
    auto in = open_in(path, std::ios::binary);
    char head[2] = {0, 0};
    in.read(head, 2);
    magic.assign(head, 2);
  }
  if(magic == "P5" || magic == "P2")
    return read_pgm(path);
  auto const grid = read_grid(path);
  if(grid.channels != 1)
    throw IoError("'" + path.string() + "' holds complex data, expected a real image");
  RealVector values = Eigen::Map<RealVector const>(grid.data.data(), grid.rows * grid.cols);
  return ImageGrid(grid.rows, grid.cols, std::move(values));
}

void write_complex(fs::path const &path, ComplexVector const &values) {
  Grid grid{values.size(), 1, 2, {}};
  grid.data.reserve(2 * values.size());
  for(auto const &v : values) {
    grid.data.push_back(v.real());
    grid.data.push_back(v.imag());
  }
  write_grid(path, grid);
}

ComplexVector read_complex(fs::path const &path) {
  auto const grid = read_grid(path);
  if(grid.channels != 2)
    throw IoError("'" + path.string() + "' does not hold complex data");
  ComplexVector out(grid.rows * grid.cols);
  for(Index i = 0; i < out.size(); ++i)
    out[i] = Complex(grid.data[2 * i], grid.data[2 * i + 1]);
  return out;
}

void write_real(fs::path const &path, RealVector const &values) {
  write_grid(path, {values.size(), 1, 1,
                    std::vector<double>(values.data(), values.data() + values.size())});
}

RealVector read_real(fs::path const &path) {
  auto const grid = read_grid(path);
  if(grid.channels != 1)
    throw IoError("'" + path.string() + "' does not hold real data");
  return Eigen::Map<RealVector const>(grid.data.data(), grid.rows * grid.cols);
}

MaskFile read_mask(fs::path const &path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::istringstream header(line);
  std::string magic, version;
  MaskFile mask;
  if(!(header >> magic >> version >> mask.rows >> mask.cols) || magic != mask_magic
     || version != "v1")
    throw IoError("'" + path.string() + "' is not a UQMASK v1 file");
  while(std::getline(in, line)) {
    if(trim(line).empty())
      continue;
    mask.indices.push_back(parse_index(line, path));
  }
  return mask;
}

void write_mask(fs::path const &path, MaskFile const &mask) {
  auto out = open_out(path);
  out << mask_magic << " v1 " << mask.rows << ' ' << mask.cols << '\n';
  for(auto const index : mask.indices)
    out << index << '\n';
  if(!out)
    throw IoError("failed writing '" + path.string() + "'");
}

std::string format_real(double value) {
  char buffer[64];
  auto const [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if(ec != std::errc())
    throw IoError("could not format number");
  return std::string(buffer, ptr);
}

double parse_real(std::string const &text) {
  auto const t = trim(text);
  double value = 0;
  auto const [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if(ec != std::errc() || ptr != t.data() + t.size())
    throw std::invalid_argument("expected a number, got '" + t + "'");
  return value;
}

KeyValueFile KeyValueFile::read(fs::path const &path) {
  auto in = open_in(path);
  KeyValueFile file;
  std::string line;
  int number = 0;
  while(std::getline(in, line)) {
    ++number;
    auto const hash = line.find('#');
    auto const content = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if(content.empty())
      continue;
    auto const eq = content.find('=');
    if(eq == std::string::npos)
      throw IoError("'" + path.string() + "' line " + std::to_string(number)
                    + ": expected 'key = value'");
    file.set(trim(content.substr(0, eq)), trim(content.substr(eq + 1)));
  }
  return file;
}

void KeyValueFile::write(fs::path const &path) const {
  auto out = open_out(path);
  for(auto const &[key, value] : entries_)
    out << key << " = " << value << '\n';
  if(!out)
    throw IoError("failed writing '" + path.string() + "'");
}

void KeyValueFile::set(std::string const &key, std::string value) {
  for(auto &entry : entries_)
    if(entry.first == key) {
      entry.second = std::move(value);
      return;
    }
  entries_.emplace_back(key, std::move(value));
}

bool KeyValueFile::has(std::string const &key) const {
  for(auto const &entry : entries_)
    if(entry.first == key)
      return true;
  return false;
}

std::string const &KeyValueFile::get(std::string const &key) const {
  for(auto const &entry : entries_)
    if(entry.first == key)
      return entry.second;
  throw IoError("missing key '" + key + "'");
}

std::string KeyValueFile::get_or(std::string const &key, std::string fallback) const {
  return has(key) ? get(key) : std::move(fallback);
}

ModelConfig read_model_config(fs::path const &path) {
  auto const file = KeyValueFile::read(path);
  auto const base = path.parent_path();
  auto resolve = [&](std::string const &p) -> fs::path {
    if(p.empty())
      return {};
    fs::path const candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };
  ModelConfig cfg;
  try {
    cfg.rows = parse_index(file.get("rows"), path);
    cfg.cols = parse_index(file.get("cols"), path);
    cfg.op = operator_kind_from_string(file.get_or("operator", "masked_fourier"));
    cfg.mask = resolve(file.get_or("mask", ""));
    cfg.kernel = resolve(file.get_or("kernel", ""));
    cfg.measurement = resolve(file.get("measurement"));
    cfg.sigma = parse_real(file.get("sigma"));
    cfg.dictionary = file.get_or("dictionary", "sara");
    cfg.levels = static_cast<int>(parse_index(file.get_or("levels", "4"), path));
    cfg.prior = prior_form_from_string(file.get_or("prior", "analysis"));
    auto const mu = file.get_or("mu", "auto");
    if(mu != "auto")
      cfg.mu = parse_real(mu);
    if(file.get_or("likelihood_exponent", "2") != "2" || file.get_or("prior_exponent", "1") != "1")
      throw std::invalid_argument("only likelihood_exponent = 2 and prior_exponent = 1 are supported");
  } catch(std::invalid_argument const &e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
  return cfg;
}

void write_model_config(fs::path const &path, ModelConfig const &cfg) {
  auto const base = path.parent_path();
  auto relative = [&](fs::path const &p) -> std::string {
    if(p.empty())
      return {};
    auto const rel = fs::proximate(p, base.empty() ? fs::path(".") : base);
    return rel.generic_string();
  };
  KeyValueFile file;
  file.set("rows", std::to_string(cfg.rows));
  file.set("cols", std::to_string(cfg.cols));
  file.set("operator", to_string(cfg.op));
  if(!cfg.mask.empty())
    file.set("mask", relative(cfg.mask));
  if(!cfg.kernel.empty())
    file.set("kernel", relative(cfg.kernel));
  file.set("measurement", relative(cfg.measurement));
  file.set("sigma", format_real(cfg.sigma));
  file.set("dictionary", cfg.dictionary);
  file.set("levels", std::to_string(cfg.levels));
  file.set("prior", to_string(cfg.prior));
  file.set("mu", cfg.mu ? format_real(*cfg.mu) : "auto");
  file.write(path);
}

ForwardOp load_operator(ModelConfig const &cfg) {
  switch(cfg.op) {
  case OperatorKind::identity: return ForwardOp::identity(cfg.rows, cfg.cols);
  case OperatorKind::masked_fourier: {
    auto const mask = read_mask(cfg.mask);
    if(mask.rows != cfg.rows || mask.cols != cfg.cols)
      throw IoError("mask '" + cfg.mask.string() + "' is for a different grid");
    return ForwardOp::masked_fourier(cfg.rows, cfg.cols, mask.indices);
  }
  case OperatorKind::convolution:
    return ForwardOp::convolution(cfg.rows, cfg.cols, read_image(cfg.kernel));
  }
  throw IoError("unknown operator kind");
}

PosteriorModel load_model(ModelConfig const &cfg, std::optional<Real> mu) {
  MeasurementVector y;
  y.values = read_complex(cfg.measurement);
  y.sigma = cfg.sigma;
  Real const weight = mu ? *mu : cfg.mu.value_or(1.0);
  return PosteriorModel(load_operator(cfg),
                        make_dictionary(cfg.dictionary, cfg.rows, cfg.cols, cfg.levels), cfg.prior,
                        weight, std::move(y));
}

void write_csv(fs::path const &path, std::vector<std::string> const &header,
               std::vector<std::vector<double>> const &rows) {
  auto out = open_out(path);
  for(std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';
  for(auto const &row : rows) {
    for(std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_real(row[i]);
    out << '\n';
  }
  if(!out)
    throw IoError("failed writing '" + path.string() + "'");
}

std::vector<std::vector<double>> read_csv(fs::path const &path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line); // header
  std::vector<std::vector<double>> rows;
  while(std::getline(in, line)) {
    if(trim(line).empty())
      continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while(std::getline(fields, field, ','))
      row.push_back(parse_real(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace mapuq::io
