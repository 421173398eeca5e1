// pat: command-line driver for the photoacoustic operator experiments.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "pat/config.hpp"
#include "pat/container.hpp"
#include "pat/experiments.hpp"
#include "pat/phantom.hpp"
#include "pat/recon.hpp"
#include "pat/verify.hpp"

namespace fs = std::filesystem;
using namespace pat;

namespace {

// Files created by this invocation; removed if the command fails.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  fs::path path(const std::string& name) const { return dir_ / name; }

  void prepare() {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
  }

  void text(const std::string& name, const std::string& body) {
    const fs::path target = path(name);
    fs::path tmp = target;
    tmp += ".tmp";
    {
      std::ofstream os(tmp);
      if (!os) throw std::runtime_error("cannot write " + tmp.string());
      os << body;
      if (!os.flush()) throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, target);
    written_.push_back(target);
  }

  void dataset(const std::string& name, const Dataset& ds) {
    save_dataset(path(name), ds);
    written_.push_back(path(name));
  }

  void discard() noexcept {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }

 private:
  fs::path dir_;
  bool created_dir_ = false;
  std::vector<fs::path> written_;
};

struct Common {
  std::string preset;
  std::string config;
  std::string out = "pat-out";
};

void add_common(CLI::App* app, Common& c, const std::string& default_preset) {
  c.preset = default_preset;
  app->add_option("--preset", c.preset, "Named configuration")->capture_default_str();
  app->add_option("--config", c.config, "YAML file overriding preset fields")
      ->check(CLI::ExistingFile);
  app->add_option("-o,--output", c.out, "Output directory")->capture_default_str();
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = preset(c.preset);
  if (!c.config.empty()) cfg = load_config(c.config, cfg);
  validate(cfg);
  return cfg;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

void store_grid(const std::string& prefix, const Grid& g, Dataset& ds) {
  ds.metadata[prefix + "dims"] = std::to_string(g.dim(0)) + "x" + std::to_string(g.dim(1));
  ds.metadata[prefix + "dx"] = fmt(g.dx(), 17);
  ds.metadata[prefix + "pml_size"] = std::to_string(g.pml_size());
}

Grid load_grid(const std::string& prefix, const Dataset& ds) {
  const std::string dims = ds.meta(prefix + "dims");
  const auto x = dims.find('x');
  if (x == std::string::npos) throw std::runtime_error("bad dims metadata '" + dims + "'");
  const int n0 = std::stoi(dims.substr(0, x));
  const int n1 = std::stoi(dims.substr(x + 1));
  // Only interior coordinates are used, so the time axis is a placeholder.
  return make_grid({n0, n1}, std::stod(ds.meta(prefix + "dx")),
                   std::stoi(ds.meta(prefix + "pml_size")), 0.0, 1, 1.0);
}

int cmd_phantom(const Common& common, const std::string& kind, double radius, long seed,
                bool radius_set, bool seed_set, bool kind_set) {
  ExperimentConfig cfg = resolve(common);
  if (kind_set) cfg.phantom.kind = kind == "vessel" ? PhantomKind::kVessel : PhantomKind::kDisc;
  if (radius_set) cfg.phantom.radius = radius;
  if (seed_set) cfg.seeds.phantom = static_cast<std::uint64_t>(seed);

  Outputs out(common.out);
  try {
    out.prepare();
    const Grid grid = build_grid(cfg);
    const Image img = build_phantom(cfg, grid);
    Dataset ds;
    ds.put("p0", "Pa", img);
    store_grid("", grid, ds);
    ds.metadata["seed"] = std::to_string(cfg.seeds.phantom);
    ds.metadata["config_digest"] = config_digest(cfg);
    ds.metadata["created"] = timestamp();
    out.dataset("phantom.patd", ds);
    out.text("config.yaml", to_yaml(cfg));
    std::cout << "phantom: " << grid.dim(0) << "x" << grid.dim(1) << ", max " << max_abs(img)
              << " -> " << out.path("phantom.patd").string() << "\n";
  } catch (...) {
    out.discard();
    throw;
  }
  return 0;
}

int cmd_simulate(const Common& common, const std::string& phantom_file) {
  const ExperimentConfig cfg = resolve(common);
  Outputs out(common.out);
  try {
    out.prepare();
    const PatOperator op = build_operator(cfg);
    Image p0;
    if (!phantom_file.empty()) {
      p0 = load_dataset(phantom_file).field("p0");
      if (!op.grid().is_interior_shape(p0))
        throw std::runtime_error(phantom_file + ": phantom does not match the simulation grid");
    } else {
      p0 = build_phantom(cfg, op.grid());
    }
    const auto t0 = std::chrono::steady_clock::now();
    const BoundaryData clean = op.forward(p0);
    const BoundaryData noisy = add_awgn(clean, cfg.snr_db, cfg.seeds.noise);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Dataset ds;
    ds.put("data", "Pa", noisy.values);
    ds.put("data_clean", "Pa", clean.values);
    ds.put("p0", "Pa", p0);
    describe_acquisition(cfg, ds);
    store_grid("sim_", op.grid(), ds);
    ds.metadata["dt"] = fmt(op.grid().dt(), 17);
    ds.metadata["nt"] = std::to_string(op.grid().nt());
    ds.metadata["snr_db"] = std::isinf(cfg.snr_db) ? "none" : fmt(cfg.snr_db);
    ds.metadata["noise_seed"] = std::to_string(cfg.seeds.noise);
    ds.metadata["created"] = timestamp();
    out.dataset("data.patd", ds);
    {
      std::ofstream rec(out.path("receivers.json"));
      write_receiver_array(op.array(), rec);
    }
    out.text("config.yaml", to_yaml(cfg));
    std::cout << "simulate: " << op.node_count() << " nodes x " << op.sample_count()
              << " samples in " << fmt(secs, 3) << " s -> " << out.path("data.patd").string()
              << "\n";
  } catch (...) {
    out.discard();
    std::error_code ec;
    fs::remove(out.path("receivers.json"), ec);
    throw;
  }
  return 0;
}

int cmd_adjoint_test(const Common& common, const std::string& mode, const std::string& scale,
                     int trials, int threads) {
  Common c = common;
  if (c.preset.empty()) c.preset = scale + "-" + mode;
  ExperimentConfig cfg = resolve(c);
  if (trials > 0) cfg.trials = trials;
  Outputs out(c.out);
  try {
    out.prepare();
    const PatOperator op = build_operator(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports = run_inner_product_trials(cfg, op, threads > 0 ? threads : thread_count());
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream csv;
    write_report_csv(csv, reports);
    out.text("rd.csv", csv.str());
    out.text("config.yaml", to_yaml(cfg));

    double mean = 0.0;
    double worst = 0.0;
    std::cout << std::left << std::setw(8) << "seed" << std::setw(26) << "lhs" << std::setw(26)
              << "rhs" << "rd_percent\n";
    for (const auto& r : reports) {
      std::cout << std::setw(8) << r.seed << std::setw(26) << fmt(r.lhs, 15) << std::setw(26)
                << fmt(r.rhs, 15) << fmt(r.rd_percent, 4) << (r.absolute ? " (abs)" : "")
                << "\n";
      mean += r.rd_percent;
      worst = std::max(worst, r.rd_percent);
    }
    mean /= static_cast<double>(reports.size());
    std::cout << "mean RD " << fmt(mean, 4) << " %, max " << fmt(worst, 4) << " %, "
              << reports.size() << " trials in " << fmt(secs, 3) << " s ("
              << cfg.name << ")\n";
  } catch (...) {
    out.discard();
    throw;
  }
  return 0;
}

int cmd_reconstruct(const Common& common, const std::string& data_file, bool allow_crime,
                    int max_iters) {
  ExperimentConfig cfg = resolve(common);
  if (max_iters > 0) cfg.recon.max_iters = max_iters;
  const Dataset data = load_dataset(data_file);
  if (is_inverse_crime(data, cfg) && !allow_crime)
    throw std::runtime_error(
        "reconstruction grid spacing and receiver node count both match the simulation in " +
        data_file + "; pass --allow-inverse-crime to run anyway");

  Outputs out(common.out);
  try {
    out.prepare();
    const PatOperator op = build_operator(cfg);
    const double dt = std::stod(data.meta("dt"));
    const int nt = std::stoi(data.meta("nt"));
    if (nt != op.grid().nt() || std::abs(dt - op.grid().dt()) > 1e-12 * dt)
      throw std::runtime_error("time axis of " + data_file + " differs from the reconstruction");

    BoundaryData measured{data.field("data"), dt};
    if (measured.nodes() != op.node_count()) {
      const Grid sim_grid = load_grid("sim_", data);
      ExperimentConfig sim_cfg = cfg;
      sim_cfg.array.nodes_per_receiver = std::stoi(data.meta("nodes_per_receiver"));
      measured = transfer_boundary_data(measured, build_array(sim_cfg, sim_grid), op.array());
    }

    std::function<double(const Image&)> monitor;
    Grid truth_grid;
    Image truth;
    if (data.find("p0") != nullptr) {
      truth_grid = load_grid("sim_", data);
      truth = data.field("p0");
      monitor = [&](const Image& x) { return relative_error(x, op.grid(), truth, truth_grid); };
    }
    const auto t0 = std::chrono::steady_clock::now();
    const ReconResult res = reconstruct(op, measured, cfg.recon, monitor);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Dataset img;
    img.put("p0", "Pa", res.p0);
    store_grid("", op.grid(), img);
    img.metadata["iterations"] = std::to_string(res.iterations_used);
    img.metadata["tau"] = fmt(res.tau, 17);
    img.metadata["termination"] = res.termination == Termination::kTolerance ? "tolerance" : "max_iters";
    img.metadata["config_digest"] = config_digest(cfg);
    img.metadata["created"] = timestamp();
    out.dataset("recon.patd", img);
    std::ostringstream csv;
    write_history_csv(csv, res);
    out.text("history.csv", csv.str());
    out.text("config.yaml", to_yaml(cfg));

    std::cout << "reconstruct: " << res.iterations_used << " iterations ("
              << img.metadata["termination"] << "), tau " << fmt(res.tau) << ", objective "
              << fmt(res.objective_history.front()) << " -> " << fmt(res.objective_history.back());
    if (!res.re_history.empty()) std::cout << ", RE " << fmt(res.re_history.back(), 4) << " %";
    std::cout << ", " << fmt(secs, 3) << " s\n";
  } catch (...) {
    out.discard();
    throw;
  }
  return 0;
}

int cmd_oracle(const Common& common, int n, int nt, int receivers, int pml) {
  Outputs out(common.out);
  try {
    out.prepare();
    ExperimentConfig cfg;
    cfg.name = "oracle";
    cfg.grid = {{n, n}, 1e-3, pml, 2.0, nt, 0.3e-3 / 1500.0};
    cfg.array.kind = ArrayKind::kCircular;
    cfg.array.n_receivers = receivers;
    cfg.array.radius = 0.35 * n * cfg.grid.dx;
    cfg.array.half_length = 0.5e-3;
    cfg.array.nodes_per_receiver = 2;
    cfg.array.eps_factor = 0.01;
    validate(cfg);
    const PatOperator op = build_operator(cfg);
    const DenseOracle o = dense_oracle(op);
    std::ostringstream os;
    os << "# A: forward, rows scaled by sqrt(w_j dt), columns by sqrt(dx^d)\n"
       << "# B: adjoint with the reciprocal scalings; adjoint means B = A^T\n"
       << "rows,cols,max_abs_forward,discrepancy\n"
       << o.rows << ',' << o.cols << ',' << std::setprecision(17) << o.max_abs_forward << ','
       << o.discrepancy << '\n';
    out.text("oracle.csv", os.str());
    out.text("config.yaml", to_yaml(cfg));
    std::cout << "oracle: " << o.rows << " x " << o.cols << ", max|A - B^T| / max|A| = "
              << fmt(o.discrepancy, 4) << "\n";
  } catch (...) {
    out.discard();
    throw;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photoacoustic forward/adjoint operators, inner-product tests and reconstruction"};
  app.require_subcommand(1);

  Common ph_common;
  std::string ph_kind = "disc";
  double ph_radius = 0.0;
  long ph_seed = 0;
  auto* ph = app.add_subcommand("phantom", "Write a phantom image dataset");
  add_common(ph, ph_common, "desk-ongrid");
  auto* kind_opt = ph->add_option("--kind", ph_kind, "disc or vessel")
                       ->check(CLI::IsMember({"disc", "vessel"}));
  auto* radius_opt = ph->add_option("--radius", ph_radius, "Disc radius in metres");
  auto* seed_opt = ph->add_option("--seed", ph_seed, "Phantom seed");

  Common sim_common;
  std::string sim_phantom;
  auto* sim = app.add_subcommand("simulate", "Forward-simulate boundary data (plus noise)");
  add_common(sim, sim_common, "desk-sim");
  sim->add_option("--phantom", sim_phantom, "Phantom dataset (default: generate from config)")
      ->check(CLI::ExistingFile);

  Common at_common;
  std::string at_mode = "ongrid";
  std::string at_scale = "desk";
  int at_trials = 0;
  int at_threads = 0;
  auto* at = app.add_subcommand("adjoint-test", "Inner-product tests of the operator pair");
  add_common(at, at_common, "");
  at->add_option("--mode", at_mode, "ongrid or offgrid")
      ->check(CLI::IsMember({"ongrid", "offgrid"}))
      ->capture_default_str();
  at->add_option("--scale", at_scale, "desk or full")
      ->check(CLI::IsMember({"desk", "full"}))
      ->capture_default_str();
  at->add_option("--trials", at_trials, "Number of seeded trials (default from config)");
  at->add_option("--threads", at_threads, "Worker threads (default PAT_NUM_THREADS or all cores)");

  Common rc_common;
  std::string rc_data;
  bool rc_allow = false;
  int rc_iters = 0;
  auto* rc = app.add_subcommand("reconstruct", "Projected gradient descent from boundary data");
  add_common(rc, rc_common, "desk-recon");
  rc->add_option("--data", rc_data, "Dataset written by simulate")->required()->check(CLI::ExistingFile);
  rc->add_flag("--allow-inverse-crime", rc_allow,
               "Run even if grid spacing and node count match the simulation");
  rc->add_option("--max-iters", rc_iters, "Override recon.max_iters");

  Common or_common;
  int or_n = 16;
  int or_nt = 40;
  int or_receivers = 4;
  int or_pml = 0;
  auto* orc = app.add_subcommand("oracle", "Dense-matrix transpose check on a tiny grid");
  or_common.out = "pat-out";
  orc->add_option("-o,--output", or_common.out, "Output directory")->capture_default_str();
  orc->add_option("--n", or_n, "Interior points per axis")->capture_default_str();
  orc->add_option("--nt", or_nt, "Time steps")->capture_default_str();
  orc->add_option("--receivers", or_receivers, "Receivers on a circle")->capture_default_str();
  orc->add_option("--pml", or_pml, "PML points per side")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ph->parsed())
      return cmd_phantom(ph_common, ph_kind, ph_radius, ph_seed, radius_opt->count() > 0,
                         seed_opt->count() > 0, kind_opt->count() > 0);
    if (sim->parsed()) return cmd_simulate(sim_common, sim_phantom);
    if (at->parsed()) return cmd_adjoint_test(at_common, at_mode, at_scale, at_trials, at_threads);
    if (rc->parsed()) return cmd_reconstruct(rc_common, rc_data, rc_allow, rc_iters);
    if (orc->parsed()) return cmd_oracle(or_common, or_n, or_nt, or_receivers, or_pml);
  } catch (const std::exception& e) {
    std::cerr << "pat: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
