#pragma once

#include <string>
#include <vector>

#include "pat/config.hpp"
#include "pat/container.hpp"
#include "pat/operators.hpp"
#include "pat/verify.hpp"

namespace pat {

/// Named configurations:
///   desk-ongrid, desk-offgrid, full-ongrid, full-offgrid  (inner-product tests)
///   desk-sim, desk-recon, full-sim, full-recon            (measurement + inversion)
/// Throws ConfigError for unknown names.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

Grid build_grid(const ExperimentConfig& config);
/// Constant medium unless c_file / rho0_file name datasets with full-grid
/// arrays "c" / "rho0".
Medium build_medium(const ExperimentConfig& config, const Grid& grid);
ReceiverArray build_array(const ExperimentConfig& config, const Grid& grid);
PatOperator build_operator(const ExperimentConfig& config);
Image build_phantom(const ExperimentConfig& config, const Grid& grid);

/// Threads for parallel trials: PAT_NUM_THREADS if set and positive, else the
/// hardware concurrency.
int thread_count();

/// config.trials inner-product tests with seeds seeds.trials + k, run on up
/// to `threads` threads. Results are in seed order and independent of the
/// thread count.
std::vector<InnerProductReport> run_inner_product_trials(const ExperimentConfig& config,
                                                         const PatOperator& op, int threads);

/// Metadata recorded with simulated data and used by the inverse-crime guard.
void describe_acquisition(const ExperimentConfig& config, Dataset& ds);

/// True when the reconstruction shares both the grid spacing and the
/// per-receiver node count with the simulation recorded in `data`.
bool is_inverse_crime(const Dataset& data, const ExperimentConfig& recon);

}  // namespace pat
