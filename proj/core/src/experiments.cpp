#include "pat/experiments.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "pat/phantom.hpp"

namespace pat {

namespace {

ExperimentConfig ongrid(int n, int nt, double disc_radius) {
  ExperimentConfig c;
  c.grid = {{n, n}, 0.4e-3, 20, 2.0, nt, 0.08e-6};
  c.array.kind = ArrayKind::kOnGrid;
  c.array.sides = {Side::kLeft, Side::kBottom, Side::kRight};
  c.array.inset = 2;
  c.phantom.kind = PhantomKind::kDisc;
  c.phantom.radius = disc_radius;
  return c;
}

ExperimentConfig offgrid(int n, int nt, double disc_radius, int receivers, double radius) {
  ExperimentConfig c = ongrid(n, nt, disc_radius);
  c.array.kind = ArrayKind::kCircular;
  c.array.n_receivers = receivers;
  c.array.radius = radius;
  c.array.half_length = 2e-3;
  c.array.nodes_per_receiver = 40;
  c.array.eps_factor = 0.01;
  return c;
}

// Measurement/inversion pair. Both grids span about 22 mm; the time axis is
// shared and set by the simulation grid at CFL 0.2.
ExperimentConfig vessel(int n, double dx, double dt, int nt, int receivers, int nodes,
                        double eps, double width_min, double width_max) {
  ExperimentConfig c;
  c.grid = {{n, n}, dx, 20, 2.0, nt, dt};
  c.array.kind = ArrayKind::kCircular;
  c.array.n_receivers = receivers;
  c.array.radius = 9e-3;
  c.array.half_length = 0.1e-3;
  c.array.nodes_per_receiver = nodes;
  c.array.eps_factor = eps;
  c.phantom.kind = PhantomKind::kVessel;
  c.phantom.vessel = {6, width_min, width_max, 8e-3};
  c.snr_db = 30.0;
  return c;
}

constexpr double kSpan = 22.016e-3;
constexpr double kFullT = 20.75e-6;

}  // namespace

std::vector<std::string> preset_names() {
  return {"desk-ongrid", "desk-offgrid", "full-ongrid", "full-offgrid",
          "desk-sim",    "desk-recon",   "full-sim",    "full-recon"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "desk-ongrid") {
    c = ongrid(128, 600, 18e-3);
  } else if (name == "desk-offgrid") {
    c = offgrid(128, 600, 18e-3, 32, 22.5e-3);
  } else if (name == "full-ongrid") {
    c = ongrid(256, 1207, 36e-3);
  } else if (name == "full-offgrid") {
    c = offgrid(256, 1207, 36e-3, 64, 45e-3);
  } else if (name == "full-sim" || name == "full-recon") {
    const double dt = 5.733e-9;
    const int nt = 3621;
    c = name == "full-sim" ? vessel(512, 43e-6, dt, nt, 256, 20, 0.001, 0.05e-3, 0.15e-3)
                           : vessel(440, 50e-6, dt, nt, 256, 16, 0.005, 0.05e-3, 0.15e-3);
  } else if (name == "desk-sim" || name == "desk-recon") {
    const double sim_dx = kSpan / 160;
    const double dt = 0.2 * sim_dx / 1500.0;
    const int nt = static_cast<int>(std::lround(kFullT / dt));
    c = name == "desk-sim"
            ? vessel(160, sim_dx, dt, nt, 128, 20, 0.001, 0.2e-3, 0.45e-3)
            : vessel(140, kSpan / 140, dt, nt, 128, 16, 0.005, 0.2e-3, 0.45e-3);
  } else {
    std::ostringstream os;
    os << "unknown preset '" << name << "' (available:";
    for (const auto& n : preset_names()) os << ' ' << n;
    os << ')';
    throw ConfigError(os.str());
  }
  c.name = name;
  return c;
}

Grid build_grid(const ExperimentConfig& c) {
  return make_grid(c.grid.dims, c.grid.dx, c.grid.pml_size, c.grid.pml_alpha_max, c.grid.nt,
                   c.grid.dt);
}

Medium build_medium(const ExperimentConfig& c, const Grid& grid) {
  Medium m = homogeneous_medium(grid, c.medium.c, c.medium.rho0);
  auto load = [&](const std::string& file, const char* array, Field& out) {
    if (file.empty()) return;
    Field f = load_dataset(file).field(array);
    if (!grid.is_full_shape(f))
      throw ConfigError(file + ": array '" + array + "' does not match the full grid");
    out = std::move(f);
  };
  load(c.medium.c_file, "c", m.c);
  load(c.medium.rho0_file, "rho0", m.rho0);
  m.c_ref = 0.0;
  validate_medium(m, grid);
  return m;
}

ReceiverArray build_array(const ExperimentConfig& c, const Grid& grid) {
  if (c.array.kind == ArrayKind::kOnGrid)
    return build_ongrid_lines(grid, c.array.sides, c.array.inset);
  return build_circular_array(c.array.n_receivers, c.array.radius, c.array.half_length,
                              c.array.nodes_per_receiver);
}

PatOperator build_operator(const ExperimentConfig& c) {
  const Grid grid = build_grid(c);
  const Medium medium = build_medium(c, grid);
  return PatOperator(grid, medium, build_array(c, grid), kernel_threshold(c.array.eps_factor, grid),
                     c.smoother);
}

Image build_phantom(const ExperimentConfig& c, const Grid& grid) {
  if (c.phantom.kind == PhantomKind::kDisc)
    return make_disc_phantom(grid, c.phantom.radius, {0.0, 0.0}, c.phantom.lo, c.phantom.hi,
                             c.seeds.phantom);
  return make_vessel_phantom(grid, c.seeds.phantom, c.phantom.vessel);
}

int thread_count() {
  if (const char* env = std::getenv("PAT_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<InnerProductReport> run_inner_product_trials(const ExperimentConfig& c,
                                                         const PatOperator& op, int threads) {
  const auto n = static_cast<std::size_t>(c.trials);
  std::vector<InnerProductReport> out(n);
  const std::string digest = config_digest(c);
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(threads, c.trials)));

  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < n; k += workers)
          out[k] = inner_product_test(op, c.seeds.trials + k, c.phantom.radius, digest);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

void describe_acquisition(const ExperimentConfig& c, Dataset& ds) {
  std::ostringstream dx;
  dx.precision(17);
  dx << c.grid.dx;
  ds.metadata["dx"] = dx.str();
  ds.metadata["nodes_per_receiver"] =
      c.array.kind == ArrayKind::kCircular ? std::to_string(c.array.nodes_per_receiver) : "2";
  ds.metadata["config_digest"] = config_digest(c);
  ds.metadata["preset"] = c.name;
}

bool is_inverse_crime(const Dataset& data, const ExperimentConfig& recon) {
  const auto dx = data.metadata.find("dx");
  const auto nodes = data.metadata.find("nodes_per_receiver");
  if (dx == data.metadata.end() || nodes == data.metadata.end()) return false;
  const double sim_dx = std::stod(dx->second);
  const int recon_nodes =
      recon.array.kind == ArrayKind::kCircular ? recon.array.nodes_per_receiver : 2;
  const bool same_dx = std::abs(sim_dx - recon.grid.dx) <= 1e-12 * std::abs(sim_dx);
  return same_dx && std::stoi(nodes->second) == recon_nodes;
}

}  // namespace pat
