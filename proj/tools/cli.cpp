#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ratcov/compression.hpp"
#include "ratcov/error.hpp"
#include "ratcov/fixtures.hpp"
#include "ratcov/grid_transform.hpp"
#include "ratcov/joint_solver.hpp"
#include "ratcov/moment_ingest.hpp"

namespace ratcov::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw DomainError("cannot open " + path);
  return in;
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw DomainError("cannot write " + path.string());
  return out;
}

HermitianSeq load_seq(const std::string& path) {
  auto in = open_in(path);
  return read_hermitian_csv(in);
}

void save_seq(const fs::path& path, const HermitianSeq& s) {
  auto out = open_out(path);
  write_hermitian_csv(out, s);
}

json seq_json(const HermitianSeq& s) {
  json rows = json::array();
  rows.push_back({{"k", MultiIndex(s.index_set().dim(), 0)}, {"re", s.zero()}, {"im", 0.0}});
  for (const auto& k : s.index_set().half()) rows.push_back({{"k", k}, {"re", s[k].real()}, {"im", s[k].imag()}});
  return rows;
}

// Values as a CSV matrix; two-dimensional grids get one row per l_1.
void save_grid_csv(const fs::path& path, const DiscreteSpectrum& s) {
  auto out = open_out(path);
  out.precision(17);
  const auto& dims = s.grid().dims();
  const std::size_t cols = dims.size() == 1 ? 1 : static_cast<std::size_t>(dims.back());
  for (std::size_t o = 0; o < s.grid().total(); ++o) out << s[o] << ((o + 1) % cols == 0 ? '\n' : ',');
}

void save_spectrum(const fs::path& stem, const DiscreteSpectrum& s) {
  {
    auto out = open_out(fs::path(stem).concat(".dspec"), true);
    write_dspec(out, s);
  }
  save_grid_csv(fs::path(stem).concat(".csv"), s);
}

DiscreteSpectrum ratio_on_grid(const HermitianSeq& p, const HermitianSeq& q, const Grid& grid) {
  const auto pv = eval_on_grid(TrigPoly(p), grid);
  const auto qv = eval_on_grid(TrigPoly(q), grid);
  std::vector<double> v(grid.total());
  for (std::size_t o = 0; o < v.size(); ++o) v[o] = pv[o] / qv[o];
  return DiscreteSpectrum(grid, std::move(v));
}

DiscreteSpectrum relative_error(const DiscreteSpectrum& est, const DiscreteSpectrum& truth) {
  std::vector<double> v(truth.grid().total());
  for (std::size_t o = 0; o < v.size(); ++o) v[o] = std::abs(est[o] - truth[o]) / truth[o];
  return DiscreteSpectrum(truth.grid(), std::move(v));
}

void emit_json(const RunConfig& cfg, const json& j, const std::string& suffix) {
  if (cfg.output.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  auto out = open_out(cfg.output + suffix);
  out << j.dump(2) << '\n';
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

void RunConfig::validate() const {
  solver.validate();
  for (int n : grid) {
    if (n <= 0) throw DomainError("grid sizes must be positive");
  }
  for (int n : degree) {
    if (n < 0) throw DomainError("degrees must be nonnegative");
  }
  if (!grid.empty() && !degree.empty()) {
    if (grid.size() != degree.size()) throw DomainError("grid and degree dimensions differ");
    if (!Grid(grid).resolves(degree)) throw AliasingError("grid " + join_ints(grid) + " does not resolve degree " + join_ints(degree));
  }
  if (lambda < 0.0) throw DomainError("lambda must be nonnegative");
  if (mode != "cepstral" && mode != "me") throw DomainError("mode must be cepstral or me");
  if (fixture != "1d" && fixture != "2d") throw DomainError("fixture must be 1d or 2d");
  if (maxval < 1 || maxval > 65535) throw DomainError("maxval must lie in [1, 65535]");
}

int cmd_estimate(const RunConfig& cfg) {
  const auto c = load_seq(cfg.cov);
  const auto p = cfg.prior.empty() ? HermitianSeq::delta(c.index_set()) : load_seq(cfg.prior);
  const Grid grid(cfg.grid);
  const auto r = solve(TrigPoly(p), c, grid, cfg.solver);
  json masses = json::array();
  for (const auto& m : r.masses) masses.push_back({{"point", m.point}, {"weight", m.weight}});
  const json j = {{"q_hat", seq_json(r.q_hat)},
                  {"covariance_residual", r.c_residual.max_abs()},
                  {"iterations", r.iterations},
                  {"grad_norm", r.grad_norm},
                  {"on_boundary", r.on_boundary},
                  {"objective", r.objective},
                  {"masses", masses},
                  {"mass_residual", r.mass_residual},
                  {"masses_approximate", r.masses_approximate}};
  emit_json(cfg, j, ".json");
  if (!cfg.output.empty()) {
    save_seq(cfg.output + "_q.csv", r.q_hat);
    auto out = open_out(cfg.output + ".dspec", true);
    write_dspec(out, ratio_on_grid(p, r.q_hat, grid));
  }
  return kOk;
}

int cmd_match(const RunConfig& cfg) {
  const auto c = load_seq(cfg.cov);
  const auto gamma = load_seq(cfg.ceps);
  const auto r = solve_joint(c, gamma, cfg.lambda, Grid(cfg.grid), cfg.solver);
  const json j = {{"p_hat", seq_json(r.p_hat)},
                  {"q_hat", seq_json(r.q_hat)},
                  {"lambda", r.lambda},
                  {"covariance_residual", r.cov_residual},
                  {"cepstral_residual", seq_json(r.ceps_residual)},
                  {"interior", r.interior},
                  {"converged", r.converged},
                  {"iterations", r.iterations},
                  {"objective", r.objective},
                  {"grad_norm", r.grad_norm}};
  emit_json(cfg, j, ".json");
  if (!cfg.output.empty()) {
    save_seq(cfg.output + "_p.csv", r.p_hat);
    save_seq(cfg.output + "_q.csv", r.q_hat);
  }
  return kOk;
}

int cmd_ingest(const RunConfig& cfg) {
  auto in = open_in(cfg.inputs.at(0), true);
  const auto img = read_pgm(in);
  const auto set = make_box_index_set(cfg.degree);
  const auto r = ingest(img, set, cfg.fft_ingest ? IngestMode::fft : IngestMode::mirror);
  save_seq(cfg.output + "_c.csv", r.c);
  save_seq(cfg.output + "_gamma.csv", r.gamma);
  std::cout << "grid " << join_ints(r.grid.dims()) << '\n';
  return kOk;
}

int cmd_compress(const RunConfig& cfg) {
  auto in = open_in(cfg.inputs.at(0), true);
  const auto img = read_pgm(in);
  const auto m = compress(img, cfg.degree, cfg.lambda, cfg.mode == "me" ? CodecMode::me : CodecMode::cepstral,
                          cfg.solver, cfg.fft_ingest ? IngestMode::fft : IngestMode::mirror);
  auto out = open_out(cfg.inputs.at(1), true);
  serialize(out, m);
  std::cout << "parameters " << m.parameter_count() << '\n';
  return kOk;
}

int cmd_decompress(const RunConfig& cfg) {
  auto in = open_in(cfg.inputs.at(0), true);
  const auto img = decompress(deserialize(in));
  auto out = open_out(cfg.inputs.at(1), true);
  write_pgm(out, img, cfg.maxval);
  return kOk;
}

int cmd_mssim(const RunConfig& cfg) {
  auto read_raw = [](const std::string& path, std::size_t& h, std::size_t& w) {
    auto in = open_in(path, true);
    return read_pgm_raw(in, h, w);
  };
  std::size_t ha = 0, wa = 0, hb = 0, wb = 0;
  const auto [a, ma] = read_raw(cfg.inputs.at(0), ha, wa);
  const auto [b, mb] = read_raw(cfg.inputs.at(1), hb, wb);
  if (ha != hb || wa != wb) throw DomainError("images differ in size");
  std::printf("%.6f\n", mssim(a, b, ha, wa, std::max(ma, mb)));
  return kOk;
}

int cmd_convergence(const RunConfig& cfg) {
  auto f = cfg.fixture == "2d" ? fixtures::ar2d_fixture() : fixtures::ar1_fixture();
  const std::size_t d = f.reference.dim();
  auto grid_of = [d](int n) { return Grid(std::vector<int>(d, n)); };
  std::vector<Grid> grids;
  if (cfg.grids.empty()) {
    grids = f.grids;
  } else {
    for (int n : cfg.grids) grids.push_back(grid_of(n));
  }
  if (grids.size() < 2) throw DomainError("a convergence study needs at least two grid sizes");
  grids.push_back(cfg.reference > 0 ? grid_of(cfg.reference) : f.reference);
  const auto rows = convergence_study(f.prior, f.c, grids, cfg.solver);

  std::ostringstream csv;
  csv.precision(17);
  csv << "N,distance\n";
  for (const auto& r : rows) csv << r.dims.front() << ',' << r.distance << '\n';
  if (cfg.output.empty()) {
    std::cout << csv.str();
  } else {
    auto out = open_out(cfg.output);
    out << csv.str();
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].distance < rows[i - 1].distance)) {
      std::cerr << "distance does not decrease from N=" << rows[i - 1].dims.front() << " to N=" << rows[i].dims.front()
                << '\n';
      return kFailed;
    }
  }
  return kOk;
}

int cmd_sysid_demo(const RunConfig& cfg) {
  const Grid grid(cfg.grid.empty() ? std::vector<int>{30, 30} : cfg.grid);
  if (grid.dim() != 2) throw DomainError("the filter demo needs a two-dimensional grid");
  const auto truth = fixtures::filter_spectrum(grid);
  const std::vector<int> n{2, 2};
  const auto set = make_box_index_set(n);
  const auto c = moments_on_grid(truth, set);
  auto gamma = log_moments_on_grid(truth, set);
  gamma = gamma - HermitianSeq::delta(set, gamma.zero() - 1.0);

  const auto joint = solve_joint(c, gamma, 0.0, grid, cfg.solver);
  const auto phi_joint = ratio_on_grid(joint.p_hat, joint.q_hat, grid);
  const auto err_joint = relative_error(phi_joint, truth);

  const auto nme = me_degree(n);
  const auto me = me_solve(moments_on_grid(truth, make_box_index_set(nme)), grid, cfg.solver);
  const auto phi_me = ratio_on_grid(HermitianSeq::delta(me.q_hat.index_set()), me.q_hat, grid);
  const auto err_me = relative_error(phi_me, truth);

  const fs::path dir = cfg.output.empty() ? fs::path("sysid_out") : fs::path(cfg.output);
  save_spectrum(dir / "phi_true", truth);
  save_spectrum(dir / "phi_cepstral", phi_joint);
  save_spectrum(dir / "relerr_cepstral", err_joint);
  save_spectrum(dir / "phi_me", phi_me);
  save_spectrum(dir / "relerr_me", err_me);
  save_seq(dir / "p_hat.csv", joint.p_hat);
  save_seq(dir / "q_hat.csv", joint.q_hat);

  std::printf("cepstral max relative error %.3e (interior %d)\n", err_joint.max(), joint.interior ? 1 : 0);
  std::printf("me (degree %d,%d) max relative error %.3e\n", nme[0], nme[1], err_me.max());
  return err_joint.max() <= cfg.max_error ? kOk : kFailed;
}

namespace {

// Turns a JSON config object into the equivalent argument list.
std::vector<std::string> config_args(const std::string& path) {
  auto in = open_in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad config file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("command")) throw DomainError("config needs a \"command\" entry");
  std::vector<std::string> args{"ratcov", j.at("command").get<std::string>()};
  if (j.contains("inputs")) {
    for (const auto& v : j.at("inputs")) args.push_back(v.get<std::string>());
  }
  for (const auto& [key, v] : j.items()) {
    if (key == "command" || key == "inputs") continue;
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    if (v.is_array()) {
      std::vector<int> ints;
      for (const auto& e : v) ints.push_back(e.get<int>());
      args.push_back(join_ints(ints));
    } else if (v.is_string()) {
      args.push_back(v.get<std::string>());
    } else {
      args.push_back(v.dump());
    }
  }
  return args;
}

}  // namespace

int run(int argc, const char* const* argv) {
  // --config replaces the whole command line
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::vector<std::string> args;
      try {
        args = config_args(argv[i + 1]);
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
      }
      std::vector<const char*> ptrs;
      for (const auto& a : args) ptrs.push_back(a.c_str());
      return run(static_cast<int>(ptrs.size()), ptrs.data());
    }
  }

  RunConfig cfg;
  CLI::App app{"Rational covariance extension on the d-torus"};
  app.require_subcommand(1);
  std::string config;
  app.add_option("--config", config, "JSON file holding the command and its options");

  auto tol_opts = [&](CLI::App* s) {
    s->add_option("--tol", cfg.solver.grad_tol, "gradient tolerance relative to |c|");
    s->add_option("--max-iter", cfg.solver.max_iter, "Newton iteration cap");
  };
  auto grid_opt = [&](CLI::App* s, bool required) {
    auto* o = s->add_option("--grid", cfg.grid, "grid sizes N1,N2,...")->delimiter(',');
    if (required) o->required();
  };

  auto* est = app.add_subcommand("estimate", "solve the covariance extension problem for a prior P");
  est->add_option("--prior", cfg.prior, "prior coefficients CSV (default P = 1)");
  est->add_option("--cov", cfg.cov, "covariance CSV")->required();
  est->add_option("--out", cfg.output, "output prefix");
  grid_opt(est, true);
  tol_opts(est);

  auto* match = app.add_subcommand("match", "joint covariance and cepstral matching");
  match->add_option("--cov", cfg.cov, "covariance CSV")->required();
  match->add_option("--ceps", cfg.ceps, "cepstral CSV")->required();
  match->add_option("--lambda", cfg.lambda, "regularization weight");
  match->add_option("--out", cfg.output, "output prefix");
  grid_opt(match, true);
  tol_opts(match);

  auto* ing = app.add_subcommand("ingest", "covariance and cepstral data of a PGM image");
  ing->add_option("input", cfg.inputs, "image.pgm")->required()->expected(1);
  ing->add_option("--n", cfg.degree, "degree n or n1,n2")->required()->delimiter(',');
  ing->add_option("--out", cfg.output, "output prefix")->required();
  ing->add_flag("--fft", cfg.fft_ingest, "transform the image directly instead of mirroring");

  auto* comp = app.add_subcommand("compress", "fit a rational model to a PGM image");
  comp->add_option("files", cfg.inputs, "in.pgm out.rcxm")->required()->expected(2);
  comp->add_option("--n", cfg.degree, "degree n or n1,n2")->required()->delimiter(',');
  comp->add_option("--lambda", cfg.lambda, "regularization weight (cepstral mode)");
  comp->add_option("--mode", cfg.mode, "cepstral or me");
  comp->add_flag("--fft", cfg.fft_ingest, "transform the image directly instead of mirroring");
  tol_opts(comp);

  auto* dec = app.add_subcommand("decompress", "render a model back to PGM");
  dec->add_option("files", cfg.inputs, "in.rcxm out.pgm")->required()->expected(2);
  dec->add_option("--maxval", cfg.maxval, "PGM maxval of the output");

  auto* ms = app.add_subcommand("mssim", "mean structural similarity of two PGM images");
  ms->add_option("files", cfg.inputs, "a.pgm b.pgm")->required()->expected(2);

  auto* conv = app.add_subcommand("convergence", "grid-refinement study on a bundled fixture");
  conv->add_option("--fixture", cfg.fixture, "1d or 2d");
  conv->add_option("--grids", cfg.grids, "study sizes, e.g. 32,64,128,256")->delimiter(',');
  conv->add_option("--ref", cfg.reference, "reference size");
  conv->add_option("--out", cfg.output, "CSV output path");
  tol_opts(conv);

  auto* sys = app.add_subcommand("sysid-demo", "identify the bundled 2D recursive filter");
  grid_opt(sys, false);
  sys->add_option("--out", cfg.output, "output directory");
  sys->add_option("--max-error", cfg.max_error, "pass threshold on the relative spectrum error");
  tol_opts(sys);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  cfg.subcommand = chosen->get_name();
  if (cfg.degree.size() == 1 && (cfg.subcommand == "ingest" || cfg.subcommand == "compress")) {
    cfg.degree.push_back(cfg.degree.front());  // images take n for both axes
  }
  if (cfg.subcommand == "convergence" && cfg.grids.size() == 1) {
    std::cerr << "error: a convergence study needs at least two grid sizes\n";
    return kUsage;
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (cfg.subcommand == "estimate") return cmd_estimate(cfg);
    if (cfg.subcommand == "match") return cmd_match(cfg);
    if (cfg.subcommand == "ingest") return cmd_ingest(cfg);
    if (cfg.subcommand == "compress") return cmd_compress(cfg);
    if (cfg.subcommand == "decompress") return cmd_decompress(cfg);
    if (cfg.subcommand == "mssim") return cmd_mssim(cfg);
    if (cfg.subcommand == "convergence") return cmd_convergence(cfg);
    return cmd_sysid_demo(cfg);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
}

}  // namespace ratcov::cli
