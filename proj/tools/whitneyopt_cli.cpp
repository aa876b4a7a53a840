// Command-line front end.
//
//   whitneyopt run      --problem FILE [--seed N | --seeds A..B] [--trace FILE] [--report FILE] ...
//   whitneyopt project  --problem FILE --w 0.1[,0.2...]
//   whitneyopt geodesic --problem FILE --velocity 0,1 --duration T [--step H]
//   whitneyopt validate --problem FILE
//
// Exit codes: 0 converged / ok, 1 error, 2 iteration budget exhausted.

#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "whitneyopt/error.hpp"
#include "whitneyopt/geodesic.hpp"
#include "whitneyopt/problem.hpp"

namespace {

using whitneyopt::Error;
using whitneyopt::ErrorCode;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBudget = 2;

struct Options {
  std::string problem;
  std::uint64_t seed = 0;
  std::string seeds;
  double alpha0 = 0.25;
  double alpha_max = std::numeric_limits<double>::infinity();
  std::optional<double> c_forcing;
  std::size_t max_iter = 5000;
  std::size_t window = 500;
  double proj_tol = 1e-10;
  int proj_max_iter = 50;
  double oracle_radius = 0.5;
  std::string trace;
  std::string report;
  std::vector<double> w;
  std::vector<double> velocity;
  double duration = 1.0;
  double step = 1e-3;
};

whitneyopt::ProjectionConfig projection_config(const Options& o) {
  whitneyopt::ProjectionConfig cfg;
  cfg.residual_tol = o.proj_tol;
  cfg.max_iters = o.proj_max_iter;
  cfg.oracle_radius = o.oracle_radius;
  return cfg;
}

void emit(const Json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << j.dump(2) << '\n';
}

Json coords_json(const whitneyopt::VariableOrder& order, const std::vector<std::size_t>& idx,
                 const whitneyopt::Vector& v) {
  Json out = Json::object();
  for (std::size_t i = 0; i < idx.size(); ++i) out[order.name(idx[i])] = v(static_cast<Eigen::Index>(i));
  return out;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "--seeds expects A..B");
  try {
    const auto a = std::stoull(text.substr(0, dots));
    const auto b = std::stoull(text.substr(dots + 2));
    if (b < a) throw Error(ErrorCode::kInvalidArgument, "--seeds range is empty");
    return {a, b};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidArgument, "--seeds expects A..B with unsigned integers");
  }
}

whitneyopt::RunReport run_one(const whitneyopt::ProblemFile& problem,
                              whitneyopt::DescentConfig cfg, std::uint64_t seed,
                              const std::string& trace_path) {
  cfg.seed = seed;
  if (trace_path.empty()) return whitneyopt::run_problem(problem, cfg, nullptr);
  std::ofstream trace(trace_path, std::ios::binary);
  if (!trace) throw Error(ErrorCode::kIo, "cannot write " + trace_path);
  auto report = whitneyopt::run_problem(problem, cfg, &trace);
  report.trace_path = trace_path;
  return report;
}

int cmd_run(const Options& o) {
  const auto problem = whitneyopt::load_problem(o.problem, projection_config(o));
  whitneyopt::DescentConfig cfg;
  cfg.alpha0 = o.alpha0;
  cfg.alpha_max = o.alpha_max;
  cfg.c_forcing = o.c_forcing;
  cfg.max_iterations = o.max_iter;
  cfg.convergence_window = o.window;
  cfg.projection = projection_config(o);
  cfg.validate();

  if (o.seeds.empty()) {
    const auto report = run_one(problem, cfg, o.seed, o.trace);
    emit(whitneyopt::report_to_json(report, problem), o.report);
    return report.converged ? kExitOk : kExitBudget;
  }

  // Independent runs; each owns its descent state and trace file.
  const auto [first, last] = parse_seed_range(o.seeds);
  std::vector<std::future<whitneyopt::RunReport>> jobs;
  for (auto s = first; s <= last; ++s) {
    const std::string path = o.trace.empty() ? std::string() : o.trace + ".seed" + std::to_string(s);
    jobs.push_back(std::async(std::launch::async, run_one, std::cref(problem), cfg, s, path));
  }
  Json all = Json::array();
  bool every_converged = true;
  for (auto& job : jobs) {
    const auto report = job.get();
    every_converged = every_converged && report.converged;
    all.push_back(whitneyopt::report_to_json(report, problem));
  }
  emit(all, o.report);
  return every_converged ? kExitOk : kExitBudget;
}

int cmd_project(const Options& o) {
  const auto cfg = projection_config(o);
  const auto problem = whitneyopt::load_problem(o.problem, cfg);
  const auto g = whitneyopt::ConstraintSet::reduced(problem.partition);
  const auto frame = whitneyopt::tangent_frame(g, problem.start);
  whitneyopt::Vector w = whitneyopt::Vector::Zero(frame.tangent_basis.cols());
  if (!o.w.empty()) {
    if (static_cast<Eigen::Index>(o.w.size()) != w.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--w needs " + std::to_string(w.size()) + " tangent coordinates");
    }
    for (std::size_t i = 0; i < o.w.size(); ++i) w(static_cast<Eigen::Index>(i)) = o.w[i];
  }
  const auto result = whitneyopt::project_to_manifold(g, frame, w, cfg);
  static constexpr const char* kStatus[] = {"converged", "iteration_limit", "left_oracle_radius",
                                            "diverged"};
  Json out;
  out["status"] = kStatus[static_cast<int>(result.status)];
  out["iterations"] = result.iterations;
  out["residual"] = result.residual;
  const auto& part = problem.partition;
  out["base"] = coords_json(part.order(), part.retained, frame.base.coords);
  if (result.point) {
    out["point"] = coords_json(part.order(), part.retained, result.point->coords);
    const auto z = whitneyopt::lift(part, *result.point, std::nullopt, cfg);
    std::vector<std::size_t> all(part.order().size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    out["ambient"] = coords_json(part.order(), all, z.coords);
  } else {
    out["point"] = nullptr;
  }
  emit(out, o.report);
  return result.ok() ? kExitOk : kExitError;
}

int cmd_geodesic(const Options& o) {
  const auto cfg = projection_config(o);
  const auto problem = whitneyopt::load_problem(o.problem, cfg);
  const auto g = whitneyopt::ConstraintSet::reduced(problem.partition);
  const auto d = static_cast<Eigen::Index>(g.dimension());
  if (static_cast<Eigen::Index>(o.velocity.size()) != d) {
    throw Error(ErrorCode::kInvalidArgument,
                "--velocity needs " + std::to_string(d) + " components (retained variables)");
  }
  whitneyopt::Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = o.velocity[static_cast<std::size_t>(i)];
  // Keep only the tangential part of the requested velocity.
  const auto frame = whitneyopt::tangent_frame(g, problem.start);
  v = frame.tangent_basis * (frame.tangent_basis.transpose() * v);

  const whitneyopt::GeodesicState start{problem.start.coords, v, 0.0};
  const auto end = whitneyopt::geodesic_integrate(g, start, o.duration, o.step, cfg);
  const auto& part = problem.partition;
  Json out;
  out["time"] = end.time;
  out["position"] = coords_json(part.order(), part.retained, end.position);
  out["velocity"] = coords_json(part.order(), part.retained, end.velocity);
  out["residual"] = g.max_residual(end.position);
  emit(out, o.report);
  return kExitOk;
}

int cmd_validate(const Options& o) {
  const auto problem = whitneyopt::load_problem(o.problem, projection_config(o));
  Json out = whitneyopt::partition_to_json(problem.partition);
  out["start"] = coords_json(problem.order, problem.partition.retained, problem.start.coords);
  emit(out, o.report);
  return kExitOk;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--problem", o.problem, "Problem file")->required();
  cmd->add_option("--proj-tol", o.proj_tol, "Projection residual tolerance");
  cmd->add_option("--proj-max-iter", o.proj_max_iter, "Projection iteration cap");
  cmd->add_option("--oracle-radius", o.oracle_radius, "Projection oracle radius");
  cmd->add_option("--report", o.report, "Write the JSON result here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free optimization on triangular polynomial manifolds"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Run probabilistic descent");
  add_common(run, o);
  run->add_option("--seed", o.seed, "Random seed");
  run->add_option("--seeds", o.seeds, "Seed sweep A..B, run in parallel");
  run->add_option("--alpha0", o.alpha0, "Initial step size");
  run->add_option("--alpha-max", o.alpha_max, "Maximum step size");
  run->add_option("--c-forcing", o.c_forcing, "Forcing constant C in C*alpha^2");
  run->add_option("--max-iter", o.max_iter, "Iteration budget");
  run->add_option("--window", o.window, "Convergence window (iterations without re-basing)");
  run->add_option("--trace", o.trace, "CSV trace output");

  auto* project = app.add_subcommand("project", "Project one tangent step onto the manifold");
  add_common(project, o);
  project->add_option("--w", o.w, "Tangent coordinates")->delimiter(',');

  auto* geodesic = app.add_subcommand("geodesic", "Integrate a geodesic from the start point");
  add_common(geodesic, o);
  geodesic->add_option("--velocity", o.velocity, "Initial velocity over retained variables")
      ->delimiter(',')
      ->required();
  geodesic->add_option("--duration", o.duration, "Integration time");
  geodesic->add_option("--step", o.step, "RK4 step");

  auto* validate = app.add_subcommand("validate", "Validate the system and print the partition");
  add_common(validate, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (project->parsed()) return cmd_project(o);
    if (geodesic->parsed()) return cmd_geodesic(o);
    return cmd_validate(o);
  } catch (const Error& e) {
    std::cerr << "error: " << whitneyopt::to_string(e.code()) << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: INTERNAL: " << e.what() << '\n';
    return kExitError;
  }
}
