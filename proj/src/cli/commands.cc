#include "mapuq/cli.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "mapuq/io.h"
#include "mapuq/manifest.h"
#include "mapuq/rng.h"
#include "mapuq/sampler.h"
#include "mapuq/solver.h"
#include "mapuq/uq.h"

namespace mapuq::cli {

namespace fs = std::filesystem;

ImageGrid make_phantom(Index rows, Index cols, PhantomKind kind, std::uint64_t seed, int count) {
  require_dims(rows >= 1 && cols >= 1, "phantom dimensions must be positive");
  CounterRng rng(seed, 7);
  bool const points = kind == PhantomKind::point_sources;
  int const n = count > 0 ? count : (points ? 8 : 5);
  Real const extent = static_cast<Real>(std::min(rows, cols));
  ImageGrid image(rows, cols);
  for(int k = 0; k < n; ++k) {
    Real const cr = static_cast<Real>(rng.below(static_cast<std::uint64_t>(rows)));
    Real const cc = static_cast<Real>(rng.below(static_cast<std::uint64_t>(cols)));
    Real const amplitude = points ? 0.3 + 0.7 * rng.uniform() : 0.4 + 0.6 * rng.uniform();
    Real const width = points ? 0.6 + 1.0 * rng.uniform() : (0.12 + 0.12 * rng.uniform()) * extent;
    for(Index r = 0; r < rows; ++r)
      for(Index c = 0; c < cols; ++c) {
        Real const dr = static_cast<Real>(r) - cr, dc = static_cast<Real>(c) - cc;
        image(r, c) += amplitude * std::exp(-(dr * dr + dc * dc) / (2 * width * width));
      }
  }
  image.values /= image.values.maxCoeff();
  return image;
}

Real reconstruction_snr(ImageGrid const &truth, ImageGrid const &estimate) {
  require_dims(truth.same_shape(estimate), "truth and estimate differ in shape");
  return 20 * std::log10(truth.values.norm() / (truth.values - estimate.values).norm());
}

Real interval_length_error(ImageGrid const &map_length, ImageGrid const &chain_length,
                           ImageGrid const &truth) {
  require_dims(map_length.same_shape(chain_length) && map_length.same_shape(truth),
               "interval maps and truth differ in shape");
  Real const range = truth.values.maxCoeff() - truth.values.minCoeff();
  if(!(range > 0))
    throw std::invalid_argument("truth image has zero dynamic range");
  return (map_length.values - chain_length.values).cwiseAbs().mean() / range;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string scale_tag(Index scale) { return "s" + std::to_string(scale); }

struct Context {
  std::vector<std::string> args;
  std::ostream &out;
  std::ostream &err;
};

RunManifest start_manifest(std::string command, Context const &ctx) {
  RunManifest m;
  m.command = std::move(command);
  m.argv = ctx.args;
  m.notes["working_directory"] = fs::current_path().generic_string();
  return m;
}

void write_interval_outputs(fs::path const &dir, Index scale, CredibleIntervalMap const &map,
                            RunManifest &manifest) {
  auto const tag = scale_tag(scale);
  auto const minus = dir / ("xi_minus_" + tag + ".uqg");
  auto const plus = dir / ("xi_plus_" + tag + ".uqg");
  auto const length = dir / ("length_" + tag + ".uqg");
  auto const table = dir / ("intervals_" + tag + ".csv");
  io::write_image(minus, map.xi_minus);
  io::write_image(plus, map.xi_plus);
  io::write_image(length, map.length());
  std::vector<std::vector<double>> rows;
  auto const &part = map.partition;
  for(Index i = 0; i < part.size(); ++i) {
    auto const &iv = map.intervals[i];
    double const nan = std::nan("");
    rows.push_back({static_cast<double>(i), static_cast<double>(part.region_row(i)),
                    static_cast<double>(part.region_col(i)), iv.empty ? nan : iv.lower,
                    iv.empty ? nan : iv.upper, iv.empty ? nan : iv.length()});
  }
  io::write_csv(table, {"region", "row", "col", "xi_minus", "xi_plus", "length"}, rows);
  for(auto const &p : {minus, plus, length, table})
    manifest.add_output(p);
}

void write_trace(fs::path const &path, std::vector<Real> const &values) {
  std::vector<std::vector<double>> rows;
  rows.reserve(values.size());
  for(std::size_t i = 0; i < values.size(); ++i)
    rows.push_back({static_cast<double>(i), values[i]});
  io::write_csv(path, {"iteration", "value"}, rows);
}

// Accepts either a rows x cols image or the raw model variable (L x 1).
Point load_point(PosteriorModel const &model, fs::path const &path) {
  auto const grid = io::read_grid(path);
  if(grid.channels != 1)
    throw IoError("'" + path.string() + "' must hold real data");
  RealVector values = Eigen::Map<RealVector const>(grid.data.data(), grid.rows * grid.cols);
  if(grid.rows == model.rows() && grid.cols == model.cols())
    return model.point_of(values);
  if(grid.cols == 1 && grid.rows == model.variable_size())
    return model.make_point(std::move(values));
  throw IoError("'" + path.string() + "' matches neither the image grid nor the model variable");
}

int cmd_phantom(Context const &ctx, Index rows, Index cols, std::string const &kind,
                std::uint64_t seed, int count, fs::path const &out_path) {
  auto const start = Clock::now();
  auto manifest = start_manifest("phantom", ctx);
  auto const image = make_phantom(
      rows, cols, kind == "blobs" ? PhantomKind::blobs : PhantomKind::point_sources, seed, count);
  io::write_image(out_path, image);
  manifest.parameters = {{"rows", std::to_string(rows)},
                         {"cols", std::to_string(cols)},
                         {"kind", kind},
                         {"count", std::to_string(count)}};
  manifest.seeds["phantom"] = seed;
  manifest.add_output(out_path);
  manifest.timings["total"] = seconds_since(start);
  manifest.write(fs::path(out_path.string() + ".manifest.json"));
  ctx.out << "wrote " << out_path.generic_string() << '\n';
  return success;
}

struct SimulateArgs {
  fs::path image;
  Real m_fraction = 0.1;
  Real snr = 30;
  std::uint64_t seed = 1;
  std::string dict = "sara";
  std::string prior = "analysis";
  int levels = 4;
  fs::path out_dir;
};

int cmd_simulate(Context const &ctx, SimulateArgs const &a) {
  auto const start = Clock::now();
  auto manifest = start_manifest("simulate", ctx);
  manifest.add_input(a.image);
  auto const x = io::read_image(a.image);
  auto const op = make_masked_fourier(x.rows, x.cols, a.m_fraction, a.seed);
  auto const y = simulate_observation(op, x, a.snr, a.seed);

  fs::create_directories(a.out_dir);
  io::ModelConfig cfg;
  cfg.rows = x.rows;
  cfg.cols = x.cols;
  cfg.op = OperatorKind::masked_fourier;
  cfg.mask = a.out_dir / "mask.txt";
  cfg.measurement = a.out_dir / "y.uqg";
  cfg.sigma = y.sigma;
  cfg.dictionary = a.dict;
  cfg.levels = a.levels;
  cfg.prior = prior_form_from_string(a.prior);
  make_dictionary(cfg.dictionary, cfg.rows, cfg.cols, cfg.levels); // validate early
  io::write_mask(cfg.mask, {x.rows, x.cols, op.mask()});
  io::write_complex(cfg.measurement, y.values);
  auto const cfg_path = a.out_dir / "model.cfg";
  io::write_model_config(cfg_path, cfg);

  manifest.parameters = {{"m_fraction", io::format_real(a.m_fraction)},
                         {"input_snr_db", io::format_real(a.snr)},
                         {"sigma", io::format_real(y.sigma)},
                         {"measurements", std::to_string(op.measurement_size())}};
  manifest.seeds["mask_and_noise"] = a.seed;
  for(auto const &p : {cfg.mask, cfg.measurement, cfg_path})
    manifest.add_output(p);
  manifest.timings["total"] = seconds_since(start);
  manifest.write(a.out_dir / "manifest.json");
  ctx.out << "M = " << op.measurement_size() << ", sigma = " << io::format_real(y.sigma) << '\n';
  return success;
}

struct ReconstructArgs {
  fs::path model;
  std::string dict;
  std::string prior;
  int levels = 0;
  std::string mu = "auto";
  fs::path truth;
  SolverConfig solver;
  fs::path out_dir;
};

void apply_overrides(io::ModelConfig &cfg, std::string const &dict, std::string const &prior,
                     int levels) {
  if(!dict.empty())
    cfg.dictionary = dict;
  if(!prior.empty())
    cfg.prior = prior_form_from_string(prior);
  if(levels > 0)
    cfg.levels = levels;
}

int cmd_reconstruct(Context const &ctx, ReconstructArgs const &a) {
  auto const start = Clock::now();
  auto manifest = start_manifest("reconstruct", ctx);
  auto cfg = io::read_model_config(a.model);
  apply_overrides(cfg, a.dict, a.prior, a.levels);
  manifest.add_input(a.model);
  manifest.add_input(cfg.measurement);
  if(!cfg.mask.empty())
    manifest.add_input(cfg.mask);

  bool const automatic = a.mu == "auto";
  std::optional<Real> fixed_mu;
  if(!automatic)
    fixed_mu = io::parse_real(a.mu);
  auto const base = io::load_model(cfg, fixed_mu.value_or(1.0));

  MapResult result;
  std::vector<Real> mu_trace;
  Real mu;
  if(automatic) {
    auto selection = select_mu(base, a.solver);
    mu = selection.mu;
    result = std::move(selection.result);
    mu_trace = std::move(selection.mu_trace);
  } else {
    mu = *fixed_mu;
    result = solve_map(base, a.solver);
  }
  auto const model = base.with_mu(mu);
  auto const map_image = point_to_image(model, result.point);

  fs::create_directories(a.out_dir);
  auto const image_path = a.out_dir / "map.uqg";
  auto const point_path = a.out_dir / "map_point.uqg";
  auto const objective_path = a.out_dir / "objective_trace.csv";
  io::write_image(image_path, map_image);
  io::write_real(point_path, result.point.values);
  write_trace(objective_path, result.objective_trace);

  cfg.mu = mu;
  auto const cfg_path = a.out_dir / "model.cfg";
  io::write_model_config(cfg_path, cfg);

  io::KeyValueFile summary;
  summary.set("mu", io::format_real(mu));
  summary.set("objective", io::format_real(result.objective_value));
  summary.set("iterations", std::to_string(result.iterations));
  summary.set("converged", result.converged ? "true" : "false");
  summary.set("variable_size", std::to_string(model.variable_size()));
  if(!a.truth.empty()) {
    manifest.add_input(a.truth);
    auto const snr = reconstruction_snr(io::read_image(a.truth), map_image);
    summary.set("reconstruction_snr_db", io::format_real(snr));
    ctx.out << "reconstruction SNR = " << snr << " dB\n";
  }
  auto const summary_path = a.out_dir / "summary.cfg";
  summary.write(summary_path);

  for(auto const &p : {image_path, point_path, objective_path, cfg_path, summary_path})
    manifest.add_output(p);
  if(automatic) {
    auto const mu_path = a.out_dir / "mu_trace.csv";
    write_trace(mu_path, mu_trace);
    manifest.add_output(mu_path);
  }
  manifest.parameters = {{"dictionary", cfg.dictionary},
                         {"prior", to_string(cfg.prior)},
                         {"levels", std::to_string(cfg.levels)},
                         {"mu", a.mu},
                         {"max_iters", std::to_string(a.solver.max_iters)},
                         {"rel_tol", io::format_real(a.solver.rel_tol)},
                         {"mu_select_iters", std::to_string(a.solver.mu_select_iters)}};
  manifest.timings["total"] = seconds_since(start);
  manifest.write(a.out_dir / "manifest.json");
  ctx.out << "mu = " << io::format_real(mu) << ", objective = " << result.objective_value
          << ", iterations = " << result.iterations << '\n';
  return success;
}

struct UqArgs {
  fs::path model;
  fs::path map;
  Real alpha = 0.01;
  std::vector<Index> scales{10, 15};
  Real tol = 0;
  int threads = 1;
  fs::path out_dir;
};

int cmd_uq(Context const &ctx, UqArgs const &a) {
  auto const start = Clock::now();
  auto manifest = start_manifest("uq", ctx);
  auto const cfg = io::read_model_config(a.model);
  if(!cfg.mu)
    throw std::invalid_argument("model config has mu = auto; run reconstruct first");
  manifest.add_input(a.model);
  manifest.add_input(a.map);
  auto const model = io::load_model(cfg);
  MapResult map_res;
  map_res.point = load_point(model, a.map);
  map_res.objective_value = model.objective(map_res.point);
  auto const th = hpd_threshold(model, map_res, a.alpha);
  Real const tol = a.tol > 0 ? a.tol : default_interval_tol(model.image_of(map_res.point));

  fs::create_directories(a.out_dir);
  io::KeyValueFile gamma;
  gamma.set("alpha", io::format_real(th.alpha));
  gamma.set("gamma_prime", io::format_real(th.gamma_prime));
  gamma.set("objective_at_map", io::format_real(th.objective_at_map));
  gamma.set("n_dim", std::to_string(th.n_dim));
  gamma.set("tol", io::format_real(tol));
  auto const gamma_path = a.out_dir / "gamma.cfg";
  gamma.write(gamma_path);
  manifest.add_output(gamma_path);
  ctx.out << "gamma' = " << io::format_real(th.gamma_prime) << '\n';

  bool any_empty = false;
  for(auto const scale : a.scales) {
    auto const region_start = Clock::now();
    auto const part = partition_grid(model.rows(), model.cols(), scale);
    auto const map = credible_map(model, map_res, th, part, tol, a.threads);
    manifest.timings["credible_map_" + scale_tag(scale)] = seconds_since(region_start);
    write_interval_outputs(a.out_dir, scale, map, manifest);
    any_empty = any_empty || !map.empty_regions.empty();
    ctx.out << "scale " << scale << ": mean interval length " << map.mean_length() << '\n';
  }
  manifest.parameters = {{"alpha", io::format_real(a.alpha)},
                         {"tol", io::format_real(tol)},
                         {"threads", std::to_string(a.threads)}};
  manifest.timings["total"] = seconds_since(start);
  manifest.write(a.out_dir / "manifest.json");
  if(any_empty) {
    ctx.err << "some regions have empty credible intervals\n";
    return numerical_failure;
  }
  return success;
}

struct SampleArgs {
  fs::path model;
  fs::path start;
  ChainConfig chain;
  Index burn_in = -1;
  Real alpha = 0.01;
  std::vector<Index> scales{10, 15};
  fs::path out_dir;
};

int cmd_sample(Context const &ctx, SampleArgs a) {
  auto const start = Clock::now();
  auto manifest = start_manifest("sample", ctx);
  auto const cfg = io::read_model_config(a.model);
  if(!cfg.mu)
    throw std::invalid_argument("model config has mu = auto; run reconstruct first");
  manifest.add_input(a.model);
  auto const model = io::load_model(cfg);
  std::optional<Point> initial;
  if(!a.start.empty()) {
    manifest.add_input(a.start);
    initial = load_point(model, a.start);
  }
  a.chain.burn_in = a.burn_in >= 0 ? a.burn_in : a.chain.n_samples / 5;
  Index const stored = (a.chain.n_samples - a.chain.burn_in + a.chain.thin - 1) / std::max<Index>(a.chain.thin, 1);
  if(!a.scales.empty() && stored < static_cast<Index>(std::ceil(50 / a.alpha)))
    throw std::invalid_argument("chain would store " + std::to_string(stored) + " samples; intervals at alpha = "
                                + io::format_real(a.alpha) + " need at least "
                                + std::to_string(static_cast<Index>(std::ceil(50 / a.alpha))));
  auto const chain_start = Clock::now();
  auto const chain = run_pxmala(model, a.chain, initial);
  manifest.timings["chain"] = seconds_since(chain_start);
  for(auto const &w : chain.warnings)
    ctx.err << "warning: " << w << '\n';

  fs::create_directories(a.out_dir);
  auto const trace_path = a.out_dir / "chain.csv";
  {
    std::vector<std::vector<double>> rows;
    rows.reserve(chain.objective_trace.size());
    for(std::size_t i = 0; i < chain.objective_trace.size(); ++i)
      rows.push_back({static_cast<double>(i), chain.objective_trace[i]});
    io::write_csv(trace_path, {"sample", "objective"}, rows);
  }
  ImageGrid mean(model.rows(), model.cols());
  for(auto const &s : chain.samples)
    mean.values += s.values;
  mean.values /= static_cast<Real>(chain.samples.size());
  auto const mean_path = a.out_dir / "posterior_mean.uqg";
  io::write_image(mean_path, mean);
  io::KeyValueFile summary;
  summary.set("acceptance_rate", io::format_real(chain.acceptance_rate));
  summary.set("step_delta", io::format_real(chain.step_delta));
  summary.set("stored_samples", std::to_string(chain.samples.size()));
  auto const summary_path = a.out_dir / "summary.cfg";
  summary.write(summary_path);
  for(auto const &p : {trace_path, mean_path, summary_path})
    manifest.add_output(p);

  for(auto const scale : a.scales) {
    auto const part = partition_grid(model.rows(), model.cols(), scale);
    write_interval_outputs(a.out_dir, scale, intervals_from_chain(chain, part, a.alpha), manifest);
  }
  manifest.parameters = {{"n_samples", std::to_string(a.chain.n_samples)},
                         {"burn_in", std::to_string(a.chain.burn_in)},
                         {"step_delta", io::format_real(a.chain.step_delta)},
                         {"thin", std::to_string(a.chain.thin)},
                         {"alpha", io::format_real(a.alpha)}};
  manifest.seeds["chain"] = a.chain.seed;
  manifest.timings["total"] = seconds_since(start);
  manifest.write(a.out_dir / "manifest.json");
  ctx.out << "acceptance rate " << chain.acceptance_rate << ", " << chain.samples.size()
          << " samples stored\n";
  return success;
}

struct CompareArgs {
  fs::path map_dir;
  fs::path chain_dir;
  fs::path truth;
  std::vector<Index> scales{10, 15};
  fs::path out;
};

int cmd_compare(Context const &ctx, CompareArgs const &a) {
  auto const start = Clock::now();
  auto manifest = start_manifest("compare", ctx);
  manifest.add_input(a.truth);
  auto const truth = io::read_image(a.truth);
  std::vector<std::vector<double>> rows;
  for(auto const scale : a.scales) {
    auto const name = "length_" + scale_tag(scale) + ".uqg";
    manifest.add_input(a.map_dir / name);
    manifest.add_input(a.chain_dir / name);
    auto const error = interval_length_error(io::read_image(a.map_dir / name),
                                             io::read_image(a.chain_dir / name), truth);
    rows.push_back({static_cast<double>(scale), error});
    ctx.out << "scale " << scale << ": relative interval-length error " << error << '\n';
  }
  io::write_csv(a.out, {"scale", "error"}, rows);
  manifest.add_output(a.out);

  // wall-clock comparison from the producing runs, informational only
  auto const map_manifest = a.map_dir / "manifest.json";
  auto const chain_manifest = a.chain_dir / "manifest.json";
  if(fs::exists(map_manifest) && fs::exists(chain_manifest)) {
    auto const map_time = RunManifest::read(map_manifest).timings;
    auto const chain_time = RunManifest::read(chain_manifest).timings;
    if(map_time.contains("total") && chain_time.contains("chain") && map_time.at("total") > 0) {
      double const ratio = chain_time.at("chain") / map_time.at("total");
      manifest.notes["speedup_chain_over_map"] = io::format_real(ratio);
      ctx.out << "Px-MALA / MAP-UQ wall-clock ratio: " << ratio << '\n';
    }
  }
  manifest.timings["total"] = seconds_since(start);
  manifest.write(fs::path(a.out.string() + ".manifest.json"));
  return success;
}

int cmd_replay(Context const &ctx, fs::path const &manifest_path) {
  auto const recorded = RunManifest::read(manifest_path);
  auto const previous = fs::current_path();
  if(recorded.notes.contains("working_directory"))
    fs::current_path(recorded.notes.at("working_directory"));
  int code;
  try {
    code = run(recorded.argv, ctx.out, ctx.err);
  } catch(...) {
    fs::current_path(previous);
    throw;
  }
  bool identical = code == success;
  for(auto const &record : recorded.outputs) {
    auto const now = sha256_file(record.path);
    if(now != record.sha256) {
      identical = false;
      ctx.err << "checksum mismatch: " << record.path << '\n';
    }
  }
  fs::current_path(previous);
  ctx.out << (identical ? "replay reproduced all outputs\n" : "replay differs\n");
  return identical ? success : numerical_failure;
}

} // namespace

int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err) {
  Context ctx{args, out, err};
  CLI::App app{"MAP estimation and uncertainty quantification for linear imaging problems",
               "mapuq"};
  app.require_subcommand(1);
  std::function<int()> action;

  auto *phantom = app.add_subcommand("phantom", "Generate a synthetic test image");
  Index ph_rows = 256, ph_cols = 256;
  std::string ph_kind = "point_sources", ph_out;
  std::uint64_t ph_seed = 1;
  int ph_count = 0;
  phantom->add_option("--rows", ph_rows)->check(CLI::PositiveNumber);
  phantom->add_option("--cols", ph_cols)->check(CLI::PositiveNumber);
  phantom->add_option("--kind", ph_kind)->check(CLI::IsMember({"point_sources", "blobs"}));
  phantom->add_option("--seed", ph_seed);
  phantom->add_option("--count", ph_count, "number of sources/bumps (0 = default)");
  phantom->add_option("--out", ph_out)->required();
  phantom->callback([&] {
    action = [&] { return cmd_phantom(ctx, ph_rows, ph_cols, ph_kind, ph_seed, ph_count, ph_out); };
  });

  SimulateArgs sim;
  std::string sim_image, sim_out;
  auto *simulate = app.add_subcommand("simulate", "Simulate masked-Fourier observations");
  simulate->add_option("--image", sim_image)->required();
  simulate->add_option("--m-fraction", sim.m_fraction)->check(CLI::Range(1e-12, 1.0));
  simulate->add_option("--snr", sim.snr, "input SNR in dB");
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--dict", sim.dict)
      ->check(CLI::IsMember({"db1", "db2", "db3", "db4", "db5", "db6", "db7", "db8", "dirac", "sara"}));
  simulate->add_option("--prior", sim.prior)->check(CLI::IsMember({"analysis", "synthesis"}));
  simulate->add_option("--levels", sim.levels)->check(CLI::PositiveNumber);
  simulate->add_option("--out-dir", sim_out)->required();
  simulate->callback([&] {
    sim.image = sim_image;
    sim.out_dir = sim_out;
    action = [&] { return cmd_simulate(ctx, sim); };
  });

  ReconstructArgs rec;
  std::string rec_model, rec_truth, rec_out;
  auto *reconstruct = app.add_subcommand("reconstruct", "MAP estimate with optional automatic mu");
  reconstruct->add_option("--model", rec_model)->required();
  reconstruct->add_option("--dict", rec.dict)
      ->check(CLI::IsMember({"db1", "db2", "db3", "db4", "db5", "db6", "db7", "db8", "dirac", "sara"}));
  reconstruct->add_option("--prior", rec.prior)->check(CLI::IsMember({"analysis", "synthesis"}));
  reconstruct->add_option("--levels", rec.levels);
  reconstruct->add_option("--mu", rec.mu, "'auto' or a positive value");
  reconstruct->add_option("--truth", rec_truth, "ground-truth image for the SNR report");
  reconstruct->add_option("--max-iters", rec.solver.max_iters);
  reconstruct->add_option("--rel-tol", rec.solver.rel_tol);
  reconstruct->add_option("--inner-iters", rec.solver.inner_iters);
  reconstruct->add_option("--mu-iters", rec.solver.mu_select_iters);
  reconstruct->add_option("--out-dir", rec_out)->required();
  reconstruct->callback([&] {
    rec.model = rec_model;
    rec.truth = rec_truth;
    rec.out_dir = rec_out;
    action = [&] { return cmd_reconstruct(ctx, rec); };
  });

  UqArgs uq;
  std::string uq_model, uq_map, uq_out;
  auto *uq_cmd = app.add_subcommand("uq", "HPD threshold and local credible intervals");
  uq_cmd->add_option("--model", uq_model)->required();
  uq_cmd->add_option("--map", uq_map, "MAP image or MAP variable")->required();
  uq_cmd->add_option("--alpha", uq.alpha)->check(CLI::Range(1e-12, 1.0 - 1e-12));
  uq_cmd->add_option("--scale", uq.scales, "superpixel edge length (repeatable)");
  uq_cmd->add_option("--tol", uq.tol, "bisection tolerance (0 = 1e-4 x dynamic range)");
  uq_cmd->add_option("--threads", uq.threads)->check(CLI::PositiveNumber);
  uq_cmd->add_option("--out-dir", uq_out)->required();
  uq_cmd->callback([&] {
    uq.model = uq_model;
    uq.map = uq_map;
    uq.out_dir = uq_out;
    action = [&] { return cmd_uq(ctx, uq); };
  });

  SampleArgs smp;
  std::string smp_model, smp_start, smp_out;
  auto *sample = app.add_subcommand("sample", "Px-MALA reference chain and its intervals");
  sample->add_option("--model", smp_model)->required();
  sample->add_option("--start", smp_start, "starting point (e.g. the MAP)");
  sample->add_option("--samples", smp.chain.n_samples, "total iterations incl. burn-in");
  sample->add_option("--burn-in", smp.burn_in, "default 20% of --samples");
  sample->add_option("--step", smp.chain.step_delta);
  sample->add_option("--lambda", smp.chain.my_lambda, "Moreau-Yosida parameter (0 = step/2)");
  sample->add_option("--thin", smp.chain.thin);
  sample->add_option("--seed", smp.chain.seed);
  sample->add_option("--prox-iters", smp.chain.prox_iters);
  sample->add_flag("--adapt", smp.chain.adapt_step, "tune the step during burn-in");
  sample->add_option("--alpha", smp.alpha)->check(CLI::Range(1e-12, 1.0 - 1e-12));
  sample->add_option("--scale", smp.scales);
  sample->add_option("--out-dir", smp_out)->required();
  sample->callback([&] {
    smp.model = smp_model;
    smp.start = smp_start;
    smp.out_dir = smp_out;
    action = [&] { return cmd_sample(ctx, smp); };
  });

  CompareArgs cmp;
  std::string cmp_map, cmp_chain, cmp_truth, cmp_out;
  auto *compare = app.add_subcommand("compare", "MAP vs. MCMC interval-length error per scale");
  compare->add_option("--map-dir", cmp_map)->required();
  compare->add_option("--chain-dir", cmp_chain)->required();
  compare->add_option("--truth", cmp_truth)->required();
  compare->add_option("--scale", cmp.scales);
  compare->add_option("--out", cmp_out)->required();
  compare->callback([&] {
    cmp.map_dir = cmp_map;
    cmp.chain_dir = cmp_chain;
    cmp.truth = cmp_truth;
    cmp.out = cmp_out;
    action = [&] { return cmd_compare(ctx, cmp); };
  });

  std::string replay_path;
  auto *replay = app.add_subcommand("replay", "Re-run a manifest and verify output checksums");
  replay->add_option("manifest", replay_path)->required();
  replay->callback([&] { action = [&] { return cmd_replay(ctx, replay_path); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch(CLI::ParseError const &e) {
    int const code = app.exit(e, out, err);
    return code == 0 ? success : usage_error;
  }

  try {
    return action();
  } catch(NumericalError const &e) {
    err << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  } catch(IoError const &e) {
    err << "I/O error: " << e.what() << '\n';
    return io_failure;
  } catch(fs::filesystem_error const &e) {
    err << "I/O error: " << e.what() << '\n';
    return io_failure;
  } catch(std::invalid_argument const &e) {
    err << "usage error: " << e.what() << '\n';
    return usage_error;
  } catch(std::exception const &e) {
    err << "error: " << e.what() << '\n';
    return numerical_failure;
  }
}

} // namespace mapuq::cli
