#include "logtr/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "logtr/tnsr.hpp"

#ifndef LOGTR_VERSION
#define LOGTR_VERSION "0.0.0"
#endif

namespace logtr {

using Json = nlohmann::ordered_json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent streams derived from the experiment seed.
enum class Stream : std::uint64_t { Phantom = 1, NoiseHsi = 2, NoiseMsi = 3 };
std::uint64_t derive_seed(std::uint64_t seed, Stream s) { return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(s))); }

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

double get_number(const Json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

std::size_t get_count(const Json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) bad(key, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::uint64_t get_u64(const Json& v, const std::string& key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    bad(key, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const Json& v, const std::string& key) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const Json& v, const std::string& key) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

// Null clears an optional field.
template <class Get>
auto nullable(const Json& v, const std::string& key, Get get) -> std::optional<decltype(get(v, key))> {
  if (v.is_null()) return std::nullopt;
  return get(v, key);
}

std::optional<double> get_snr(const Json& v, const std::string& key) {
  if (v.is_null()) return std::nullopt;
  return get_number(v, key);
}

Ranks get_ranks(const Json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 3) bad(key, "expected an array of three ranks");
  Ranks r{};
  for (std::size_t i = 0; i < 3; ++i) r[i] = get_count(v[i], key);
  return r;
}

Dims get_dims(const Json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 3) bad(key, "expected an array of three extents");
  Dims d(3);
  for (std::size_t i = 0; i < 3; ++i) d[i] = get_count(v[i], key);
  return d;
}

const char* init_name(InitMethod m) { return m == InitMethod::TrSvd ? "trsvd" : "random"; }
const char* rule_name(ThresholdRule r) { return r == ThresholdRule::GlobalMin ? "global_min" : "stationary_root"; }

Json opt_json(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }
Json opt_json(const std::optional<double>& s) { return s ? Json(*s) : Json(nullptr); }

using Setter = std::function<void(ExperimentConfig&, const Json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"ground_truth", [](auto& c, const Json& v, const auto& k) { c.ground_truth = nullable(v, k, get_string); }},
      {"phantom_dims", [](auto& c, const Json& v, const auto& k) { c.phantom_dims = nullable(v, k, get_dims); }},
      {"phantom_ranks", [](auto& c, const Json& v, const auto& k) { c.phantom_ranks = get_ranks(v, k); }},
      {"y_path", [](auto& c, const Json& v, const auto& k) { c.y_path = nullable(v, k, get_string); }},
      {"z_path", [](auto& c, const Json& v, const auto& k) { c.z_path = nullable(v, k, get_string); }},
      {"response_path", [](auto& c, const Json& v, const auto& k) { c.response_path = nullable(v, k, get_string); }},
      {"blur_kernel", [](auto& c, const Json& v, const auto& k) { c.blur_kernel = get_string(v, k); }},
      {"blur_size", [](auto& c, const Json& v, const auto& k) { c.blur_size = get_count(v, k); }},
      {"blur_sigma", [](auto& c, const Json& v, const auto& k) { c.blur_sigma = get_number(v, k); }},
      {"factor", [](auto& c, const Json& v, const auto& k) { c.factor = get_count(v, k); }},
      {"bands", [](auto& c, const Json& v, const auto& k) { c.bands = get_count(v, k); }},
      {"snr_hsi_db", [](auto& c, const Json& v, const auto& k) { c.snr_hsi_db = get_snr(v, k); }},
      {"snr_msi_db", [](auto& c, const Json& v, const auto& k) { c.snr_msi_db = get_snr(v, k); }},
      {"ranks", [](auto& c, const Json& v, const auto& k) { c.solver.ranks = get_ranks(v, k); }},
      {"lambda", [](auto& c, const Json& v, const auto& k) { c.solver.lambda = get_number(v, k); }},
      {"alpha", [](auto& c, const Json& v, const auto& k) { c.solver.alpha = get_number(v, k); }},
      {"beta", [](auto& c, const Json& v, const auto& k) { c.solver.beta = get_number(v, k); }},
      {"eta", [](auto& c, const Json& v, const auto& k) { c.solver.eta = get_number(v, k); }},
      {"mu", [](auto& c, const Json& v, const auto& k) { c.solver.mu = get_number(v, k); }},
      {"eps_log", [](auto& c, const Json& v, const auto& k) { c.solver.eps_log = get_number(v, k); }},
      {"varsigma", [](auto& c, const Json& v, const auto& k) { c.solver.varsigma = get_number(v, k); }},
      {"k_max", [](auto& c, const Json& v, const auto& k) { c.solver.k_max = get_count(v, k); }},
      {"inner_max", [](auto& c, const Json& v, const auto& k) { c.solver.inner_max = get_count(v, k); }},
      {"inner_tol", [](auto& c, const Json& v, const auto& k) { c.solver.inner_tol = get_number(v, k); }},
      {"cg_tol", [](auto& c, const Json& v, const auto& k) { c.solver.cg_tol = get_number(v, k); }},
      {"cg_max", [](auto& c, const Json& v, const auto& k) { c.solver.cg_max = get_count(v, k); }},
      {"stop_tol", [](auto& c, const Json& v, const auto& k) { c.solver.stop_tol = get_number(v, k); }},
      {"init",
       [](auto& c, const Json& v, const auto& k) {
         const auto s = get_string(v, k);
         if (s == "trsvd") c.solver.init = InitMethod::TrSvd;
         else if (s == "random") c.solver.init = InitMethod::Random;
         else bad(k, "expected \"trsvd\" or \"random\"");
       }},
      {"init_seed", [](auto& c, const Json& v, const auto& k) { c.solver.init_seed = get_u64(v, k); }},
      {"init_refit", [](auto& c, const Json& v, const auto& k) { c.solver.init_refit = get_bool(v, k); }},
      {"monotone", [](auto& c, const Json& v, const auto& k) { c.solver.monotone = get_bool(v, k); }},
      {"threshold_rule",
       [](auto& c, const Json& v, const auto& k) {
         const auto s = get_string(v, k);
         if (s == "global_min") c.solver.threshold_rule = ThresholdRule::GlobalMin;
         else if (s == "stationary_root") c.solver.threshold_rule = ThresholdRule::StationaryRoot;
         else bad(k, "expected \"global_min\" or \"stationary_root\"");
       }},
      {"ssim_window", [](auto& c, const Json& v, const auto& k) { c.metrics.ssim_window = get_count(v, k); }},
      {"ssim_sigma", [](auto& c, const Json& v, const auto& k) { c.metrics.ssim_sigma = get_number(v, k); }},
      {"uiqi_window", [](auto& c, const Json& v, const auto& k) { c.metrics.uiqi_window = get_count(v, k); }},
      {"disable_ltnn_spectral", [](auto& c, const Json& v, const auto& k) { c.disable_ltnn_spectral = get_bool(v, k); }},
      {"disable_ltnn_spatial", [](auto& c, const Json& v, const auto& k) { c.disable_ltnn_spatial = get_bool(v, k); }},
      {"disable_tv", [](auto& c, const Json& v, const auto& k) { c.disable_tv = get_bool(v, k); }},
      {"baseline_trkj", [](auto& c, const Json& v, const auto& k) { c.baseline_trkj = get_bool(v, k); }},
      {"output_dir", [](auto& c, const Json& v, const auto& k) { c.output_dir = get_string(v, k); }},
      {"seed", [](auto& c, const Json& v, const auto& k) { c.seed = get_u64(v, k); }},
  };
  return table;
}

Json config_json(const ExperimentConfig& c) {
  const SolverConfig& s = c.solver;
  Json j;
  j["ground_truth"] = opt_json(c.ground_truth);
  j["phantom_dims"] = c.phantom_dims ? Json(*c.phantom_dims) : Json(nullptr);
  j["phantom_ranks"] = c.phantom_ranks;
  j["y_path"] = opt_json(c.y_path);
  j["z_path"] = opt_json(c.z_path);
  j["response_path"] = opt_json(c.response_path);
  j["blur_kernel"] = c.blur_kernel;
  j["blur_size"] = c.blur_size;
  j["blur_sigma"] = c.blur_sigma;
  j["factor"] = c.factor;
  j["bands"] = c.bands;
  j["snr_hsi_db"] = opt_json(c.snr_hsi_db);
  j["snr_msi_db"] = opt_json(c.snr_msi_db);
  j["ranks"] = s.ranks;
  j["lambda"] = s.lambda;
  j["alpha"] = s.alpha;
  j["beta"] = s.beta;
  j["eta"] = s.eta;
  j["mu"] = s.mu;
  j["eps_log"] = s.eps_log;
  j["varsigma"] = s.varsigma;
  j["k_max"] = s.k_max;
  j["inner_max"] = s.inner_max;
  j["inner_tol"] = s.inner_tol;
  j["cg_tol"] = s.cg_tol;
  j["cg_max"] = s.cg_max;
  j["stop_tol"] = s.stop_tol;
  j["init"] = init_name(s.init);
  j["init_seed"] = s.init_seed;
  j["init_refit"] = s.init_refit;
  j["monotone"] = s.monotone;
  j["threshold_rule"] = rule_name(s.threshold_rule);
  j["ssim_window"] = c.metrics.ssim_window;
  j["ssim_sigma"] = c.metrics.ssim_sigma;
  j["uiqi_window"] = c.metrics.uiqi_window;
  j["disable_ltnn_spectral"] = c.disable_ltnn_spectral;
  j["disable_ltnn_spatial"] = c.disable_ltnn_spatial;
  j["disable_tv"] = c.disable_tv;
  j["baseline_trkj"] = c.baseline_trkj;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  return j;
}

Json metrics_json(const MetricsReport& m) {
  Json j;
  j["psnr"] = std::isfinite(m.psnr) ? Json(m.psnr) : Json("inf");
  j["ssim"] = m.ssim;
  j["ergas"] = m.ergas;
  j["sam"] = m.sam;
  j["uiqi"] = std::isnan(m.uiqi) ? Json(nullptr) : Json(m.uiqi);
  j["sam_skipped"] = m.sam_skipped;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TnsrIoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw TnsrIoError("write failed for " + path.string());
}

std::string num(double v) { return fmt::format("{}", v); }

// Row k = 0 holds the initial objective; its rel_change is reported as 1.
std::string convergence_csv(std::optional<double> initial, const std::vector<IterationRecord>& history) {
  std::string s = "k,objective,rel_change,seconds\n";
  if (initial) s += fmt::format("0,{},1,0\n", num(*initial));
  for (const auto& h : history) s += fmt::format("{},{},{},{}\n", h.k, num(h.objective), num(h.rel_change), num(h.seconds));
  return s;
}

BlurSpec blur_of(const ExperimentConfig& c) {
  if (c.blur_kernel == "delta") return BlurSpec::delta();
  return BlurSpec::gaussian(c.blur_size, c.blur_sigma);
}

Matrix spectral_of(const ExperimentConfig& c, std::size_t hr_bands) {
  if (c.response_path) {
    const Tensor r = read_tnsr(*c.response_path);
    if (r.order() != 2) throw ShapeError("spectral response must be a 2-way b x B tensor");
    if (r.extent(1) != hr_bands) {
      throw ShapeError("spectral response has " + std::to_string(r.extent(1)) + " columns, data has " +
                       std::to_string(hr_bands) + " bands");
    }
    return build_spectral_operator(tensor_to_matrix(r));
  }
  return build_spectral_operator(hr_bands, contiguous_groups(hr_bands, c.bands));
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw TnsrIoError("cannot create output directory " + dir + ": " + ec.message());
}

}  // namespace

SolverConfig ExperimentConfig::effective_solver() const {
  SolverConfig s = solver;
  if (disable_ltnn_spectral) s.ltnn_enabled[2] = false;
  if (disable_ltnn_spatial) s.ltnn_enabled[0] = s.ltnn_enabled[1] = false;
  if (disable_tv) s.tv_enabled = {false, false, false};
  if (baseline_trkj) {
    s.tv_enabled = {false, false, false};
    s.ltnn_enabled = {false, false, false};
  }
  return s;
}

void ExperimentConfig::validate() const {
  const int sources = (ground_truth ? 1 : 0) + (phantom_dims ? 1 : 0) + ((y_path || z_path) ? 1 : 0);
  if (sources != 1) throw ConfigError("config needs exactly one of ground_truth, phantom_dims, or y_path + z_path");
  if (static_cast<bool>(y_path) != static_cast<bool>(z_path)) throw ConfigError("y_path and z_path must be given together");
  if (blur_kernel != "gaussian" && blur_kernel != "delta") bad("blur_kernel", "expected \"gaussian\" or \"delta\"");
  if (blur_kernel == "gaussian" && (blur_size % 2 == 0 || !(blur_sigma > 0.0))) {
    throw ConfigError("gaussian blur needs an odd blur_size and positive blur_sigma");
  }
  if (factor == 0) bad("factor", "must be at least 1");
  if (bands == 0) bad("bands", "must be at least 1");
  for (const auto& snr : {snr_hsi_db, snr_msi_db}) {
    if (snr && !std::isfinite(*snr)) throw ConfigError("SNR values must be finite or null");
  }
  if (phantom_dims) {
    for (auto e : *phantom_dims) {
      if (e == 0) bad("phantom_dims", "extents must be positive");
    }
    for (auto r : phantom_ranks) {
      if (r == 0) bad("phantom_ranks", "ranks must be positive");
    }
  }
  if (metrics.ssim_window == 0 || metrics.uiqi_window == 0 || !(metrics.ssim_sigma > 0.0)) {
    throw ConfigError("metric window parameters must be positive");
  }
  try {
    solver.validate();
  } catch (const ValueError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, value, key);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg, int indent) { return config_json(cfg).dump(indent); }

TRFactors make_phantom(const Dims& dims, Ranks ranks, std::uint64_t seed) {
  if (dims.size() != 3) throw ShapeError("phantom dims must be 3-way");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kTwoPi = 2.0 * M_PI;
  TRFactors f;
  for (std::size_t n = 0; n < 3; ++n) {
    const std::size_t ra = ranks[n], rb = ranks[(n + 1) % 3], len = dims[n];
    f.cores[n] = Tensor({ra, len, rb});
    for (std::size_t a = 0; a < ra; ++a) {
      for (std::size_t b = 0; b < rb; ++b) {
        double phase[3], amp[3];
        for (int q = 0; q < 3; ++q) {
          phase[q] = kTwoPi * unit(rng);
          amp[q] = (2.0 * unit(rng) - 1.0) / (q + 1);
        }
        for (std::size_t i = 0; i < len; ++i) {
          double v = 0.0;
          for (int q = 0; q < 3; ++q) v += amp[q] * std::cos(kTwoPi * (q + 1) * static_cast<double>(i) / len + phase[q]);
          f.cores[n](a, i, b) = 0.5 + 0.25 * v;
        }
      }
    }
  }
  const Tensor x = compose(f);
  double peak = 0.0;
  for (double v : x.data()) peak = std::max(peak, v);
  const double s = std::cbrt(1.0 / peak);
  for (auto& c : f.cores) c *= s;
  return f;
}

Problem prepare_problem(const ExperimentConfig& cfg) {
  cfg.validate();
  Problem p;
  const BlurSpec blur = blur_of(cfg);
  if (cfg.y_path) {
    p.y = read_tnsr(*cfg.y_path);
    p.z = read_tnsr(*cfg.z_path);
    if (p.y.order() != 3 || p.z.order() != 3) throw ShapeError("y and z must be 3-way tensors");
    const Dims hr{p.y.extent(0) * cfg.factor, p.y.extent(1) * cfg.factor, p.y.extent(2)};
    p.model = make_degradation(hr, cfg.factor, blur, spectral_of(cfg, hr[2]));
    if (p.z.dims() != p.model.hr_msi_dims(hr)) {
      throw ShapeError("z dims " + to_string(p.z.dims()) + " do not match y and the operators (expected " +
                       to_string(p.model.hr_msi_dims(hr)) + ")");
    }
    return p;
  }
  Tensor x = cfg.phantom_dims
                 ? compose(make_phantom(*cfg.phantom_dims, cfg.phantom_ranks, derive_seed(cfg.seed, Stream::Phantom)))
                 : read_tnsr(*cfg.ground_truth);
  if (x.order() != 3) throw ShapeError("ground truth must be a 3-way tensor");
  p.model = make_degradation(x.dims(), cfg.factor, blur, spectral_of(cfg, x.extent(2)));
  Observations obs = degrade(x, p.model);
  p.y = cfg.snr_hsi_db ? add_noise(obs.lr_hsi, *cfg.snr_hsi_db, derive_seed(cfg.seed, Stream::NoiseHsi)) : obs.lr_hsi;
  p.z = cfg.snr_msi_db ? add_noise(obs.hr_msi, *cfg.snr_msi_db, derive_seed(cfg.seed, Stream::NoiseMsi)) : obs.hr_msi;
  p.truth = std::move(x);
  return p;
}

Tensor spectral_lift_baseline(const Tensor& z, const Matrix& spectral_op) {
  const Matrix lift = spectral_op.completeOrthogonalDecomposition().pseudoInverse();
  return mode_n_product(z, lift, 2);
}

namespace {

// Both tensors mapped by the affine map taking the reference range onto [0, 255].
MetricsReport evaluate_on_reference_scale(const Tensor& truth, const Tensor& est, double factor,
                                          const MetricsOptions& opts) {
  if (truth.size() == 0) throw ShapeError("empty reference tensor");
  const auto [lo, hi] = std::minmax_element(truth.data().begin(), truth.data().end());
  return evaluate(rescale_to_255(truth, *lo, *hi), rescale_to_255(est, *lo, *hi), factor, opts);
}

}  // namespace

MetricsReport score(const Tensor& truth, const Tensor& est, const ExperimentConfig& cfg) {
  return evaluate_on_reference_scale(truth, est, static_cast<double>(cfg.factor), cfg.metrics);
}

FuseOutcome run_fusion(const Problem& problem, const ExperimentConfig& cfg) {
  FuseOutcome out;
  out.result = solve(problem.y, problem.z, problem.model, cfg.effective_solver());
  if (problem.truth) {
    out.metrics = score(*problem.truth, out.result.fused, cfg);
    out.baseline = score(*problem.truth, spectral_lift_baseline(problem.z, problem.model.spectral_op), cfg);
  }
  return out;
}

void cmd_simulate(const ExperimentConfig& cfg) {
  if (!cfg.has_ground_truth()) throw ConfigError("simulate needs ground_truth or phantom_dims");
  const Problem p = prepare_problem(cfg);
  ensure_dir(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  write_tnsr(dir / "x.tnsr", *p.truth);
  write_tnsr(dir / "y.tnsr", p.y);
  write_tnsr(dir / "z.tnsr", p.z);

  const Observations clean = degrade(*p.truth, p.model);
  Json model;
  model["hr_dims"] = p.truth->dims();
  model["lr_hsi_dims"] = p.y.dims();
  model["hr_msi_dims"] = p.z.dims();
  model["factor"] = p.model.factor;
  model["kernel_taps"] = kernel_taps(p.model.blur);
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < p.model.spectral_op.rows(); ++r) {
    std::vector<double> row(p.model.spectral_op.cols());
    for (Eigen::Index c = 0; c < p.model.spectral_op.cols(); ++c) row[c] = p.model.spectral_op(r, c);
    rows.push_back(row);
  }
  model["spectral_op"] = rows;
  model["snr_hsi_db"] = opt_json(cfg.snr_hsi_db);
  model["snr_msi_db"] = opt_json(cfg.snr_msi_db);
  model["empirical_snr_hsi_db"] = cfg.snr_hsi_db ? Json(empirical_snr_db(clean.lr_hsi, p.y)) : Json(nullptr);
  model["empirical_snr_msi_db"] = cfg.snr_msi_db ? Json(empirical_snr_db(clean.hr_msi, p.z)) : Json(nullptr);
  model["noise_seed_hsi"] = derive_seed(cfg.seed, Stream::NoiseHsi);
  model["noise_seed_msi"] = derive_seed(cfg.seed, Stream::NoiseMsi);
  model["config"] = config_json(cfg);
  write_text(dir / "model.json", model.dump(2) + "\n");
}

FuseOutcome cmd_fuse(const ExperimentConfig& cfg) {
  const Problem p = prepare_problem(cfg);
  ensure_dir(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  FuseOutcome out;
  try {
    out = run_fusion(p, cfg);
  } catch (const DivergenceError& e) {
    write_text(dir / "convergence.csv", convergence_csv(std::nullopt, e.history));
    throw;
  }
  const FusionResult& r = out.result;
  write_tnsr(dir / "xhat.tnsr", r.fused);
  write_text(dir / "convergence.csv", convergence_csv(r.initial_objective, r.history));

  Json report;
  if (out.metrics) report["metrics"] = metrics_json(*out.metrics);
  Json run;
  run["converged"] = r.converged;
  run["iterations"] = r.history.size();
  run["initial_objective"] = r.initial_objective;
  run["final_objective"] = r.history.empty() ? r.initial_objective : r.history.back().objective;
  run["effective_ranks"] = r.cores.ranks();
  report["run"] = run;
  report["config"] = config_json(cfg);
  write_text(dir / "metrics.json", report.dump(2) + "\n");

  if (out.metrics) {
    std::string csv = "band,psnr,uiqi\n";
    for (std::size_t b = 0; b < out.metrics->band_psnr.size(); ++b) {
      csv += fmt::format("{},{},{}\n", b, num(out.metrics->band_psnr[b]), num(out.metrics->band_uiqi[b]));
    }
    write_text(dir / "per_band.csv", csv);
    Tensor err = r.fused - *p.truth;
    for (double& v : err.data()) v = std::abs(v);
    write_tnsr(dir / "error_tensor.tnsr", err);
    Json base;
    base["method"] = "spectral_lift_pinv";
    base["metrics"] = metrics_json(*out.baseline);
    write_text(dir / "baseline.json", base.dump(2) + "\n");
  }
  return out;
}

std::vector<AblationRow> cmd_ablate(const ExperimentConfig& cfg) {
  if (!cfg.has_ground_truth()) throw ConfigError("ablate needs ground_truth or phantom_dims");
  const Problem p = prepare_problem(cfg);
  struct Variant {
    const char* name;
    std::function<void(ExperimentConfig&)> apply;
  };
  const std::vector<Variant> variants = {
      {"full", [](ExperimentConfig&) {}},
      {"ban_spe", [](ExperimentConfig& c) { c.disable_ltnn_spectral = true; }},
      {"ban_spa", [](ExperimentConfig& c) { c.disable_ltnn_spatial = true; }},
      {"no_tv", [](ExperimentConfig& c) { c.disable_tv = true; }},
      {"trkj", [](ExperimentConfig& c) { c.baseline_trkj = true; }},
  };
  std::vector<AblationRow> rows;
  std::string csv = "variant,alpha,beta,tv_cores,ltnn_cores,psnr,ssim,ergas,sam,uiqi,iterations,converged\n";
  for (const auto& v : variants) {
    ExperimentConfig vc = cfg;
    v.apply(vc);
    const FuseOutcome o = run_fusion(p, vc);
    AblationRow row{v.name, vc.effective_solver(), *o.metrics, o.result.history.size(), o.result.converged};
    std::string tv, lt;
    for (std::size_t n = 0; n < 3; ++n) {
      if (row.solver.alpha_for(n) > 0.0) tv += std::to_string(n);
      if (row.solver.beta_for(n) > 0.0) lt += std::to_string(n);
    }
    const bool any_tv = !tv.empty(), any_lt = !lt.empty();
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", row.variant, num(any_tv ? row.solver.alpha : 0.0),
                       num(any_lt ? row.solver.beta : 0.0), any_tv ? tv : "none", any_lt ? lt : "none",
                       num(row.metrics.psnr), num(row.metrics.ssim), num(row.metrics.ergas), num(row.metrics.sam),
                       num(row.metrics.uiqi), row.iterations, row.converged ? 1 : 0);
    rows.push_back(std::move(row));
  }
  ensure_dir(cfg.output_dir);
  write_text(std::filesystem::path(cfg.output_dir) / "ablation.csv", csv);
  return rows;
}

MetricsReport cmd_metrics(const std::filesystem::path& ref, const std::filesystem::path& est, double factor,
                          const MetricsOptions& opts, const std::optional<std::filesystem::path>& out_dir) {
  const MetricsReport m = evaluate_on_reference_scale(read_tnsr(ref), read_tnsr(est), factor, opts);
  if (out_dir) {
    ensure_dir(out_dir->string());
    Json j;
    j["metrics"] = metrics_json(m);
    j["band_psnr"] = Json::array();
    for (double v : m.band_psnr) j["band_psnr"].push_back(std::isfinite(v) ? Json(v) : Json("inf"));
    j["band_uiqi"] = Json::array();
    for (double v : m.band_uiqi) j["band_uiqi"].push_back(std::isnan(v) ? Json(nullptr) : Json(v));
    write_text(*out_dir / "metrics.json", j.dump(2) + "\n");
  }
  return m;
}

std::string version_string() { return std::string("logtr ") + LOGTR_VERSION; }

}  // namespace logtr
