#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ratcov/dual_solver.hpp"

namespace ratcov::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2, kNoConvergence = 3 };

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string output;
  std::string prior;
  std::string cov;
  std::string ceps;
  std::vector<int> grid;
  std::vector<int> degree;
  double lambda = 1e-2;
  std::string mode = "cepstral";
  bool fft_ingest = false;
  int maxval = 255;
  std::string fixture = "1d";
  std::vector<int> grids;  ///< per-dimension sizes of the study grids
  int reference = 0;       ///< 0 picks the fixture default
  double max_error = 1e-3;
  std::uint64_t seed = 0x5eed;
  SolverOptions solver;

  /// Throws DomainError on inconsistent settings.
  void validate() const;
};

int cmd_estimate(const RunConfig& cfg);
int cmd_match(const RunConfig& cfg);
int cmd_ingest(const RunConfig& cfg);
int cmd_compress(const RunConfig& cfg);
int cmd_decompress(const RunConfig& cfg);
int cmd_mssim(const RunConfig& cfg);
int cmd_convergence(const RunConfig& cfg);
int cmd_sysid_demo(const RunConfig& cfg);

/// Parses argv (or the JSON named by --config) and dispatches.
int run(int argc, const char* const* argv);

}  // namespace ratcov::cli
