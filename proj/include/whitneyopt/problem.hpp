#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "whitneyopt/descent.hpp"

namespace whitneyopt {

/// A validated problem file:
///
///   vars: u x y                 ascending variable order
///   eliminate: y | auto
///   constraint: <polynomial>    repeatable
///   objective: <polynomial>
///   start: u=0, x=1             retained variables only
///
/// `#` starts a comment.
struct ProblemFile {
  VariableOrder order;
  std::optional<std::vector<std::size_t>> eliminate;  // nullopt = auto
  std::vector<Polynomial> constraints;                // as written
  Polynomial objective;
  WhitneyPartition partition;
  ReducedPoint start;  // projected onto the reduced manifold
};

/// Throws Error with the underlying code; positions are reported as
/// "line L, column C" in the message.
ProblemFile parse_problem(std::string_view text, const ProjectionConfig& cfg = {});
ProblemFile load_problem(const std::filesystem::path& path, const ProjectionConfig& cfg = {});

struct RunReport {
  ReducedPoint final_point;
  AmbientPoint final_ambient;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double max_constraint_residual = 0.0;
  double forcing_constant = 0.0;
  double final_alpha = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::string> trace_path;
};

/// CSV header: j,alpha,f,event,<retained variables>.
void write_trace_header(std::ostream& out, const WhitneyPartition& part);
void write_trace_row(std::ostream& out, const IterationRecord& record);

/// Runs the descent, streaming trace rows to `trace` when given. The final
/// lifted point is re-checked against the source constraints; a residual
/// above 10 * residual_tol throws Error(kLiftCheckFailed).
RunReport run_problem(const ProblemFile& problem, const DescentConfig& cfg,
                      std::ostream* trace = nullptr);

nlohmann::ordered_json report_to_json(const RunReport& report, const ProblemFile& problem);
nlohmann::ordered_json partition_to_json(const WhitneyPartition& part);

}  // namespace whitneyopt
