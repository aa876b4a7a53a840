#include "whitneyopt/problem.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "whitneyopt/error.hpp"

namespace whitneyopt {

namespace {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
  std::size_t column;  // 1-based column of the first value byte
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(ErrorCode code, std::size_t line, std::size_t column, const std::string& what) {
  throw Error(code, fmt::format("line {}, column {}: {}", line, column, what));
}

std::vector<Entry> split_entries(std::string_view text) {
  std::vector<Entry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      const auto first = line.find_first_not_of(" \t\r");
      fail(ErrorCode::kSyntax, line_no, first + 1, "expected 'key: value'");
    }
    std::size_t value_start = colon + 1;
    while (value_start < line.size() && std::isspace(static_cast<unsigned char>(line[value_start]))) {
      ++value_start;
    }
    entries.push_back(Entry{std::string(trim(line.substr(0, colon))),
                            std::string(trim(line.substr(value_start))), line_no, value_start + 1});
    if (end == text.size()) break;
  }
  return entries;
}

Polynomial parse_at(const Entry& e, const VariableOrder& order) {
  try {
    return parse_polynomial(e.value, order);
  } catch (const ParseError& err) {
    fail(err.code(), e.line, e.column + err.offset(), err.what());
  }
}

double parse_number(std::string_view text, const Entry& e, std::size_t column) {
  text = trim(text);
  auto to_double = [&](std::string_view s) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      fail(ErrorCode::kSyntax, e.line, column, "invalid number '" + std::string(text) + "'");
    }
    return v;
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const double den = to_double(trim(text.substr(slash + 1)));
    if (den == 0.0) fail(ErrorCode::kSyntax, e.line, column, "zero denominator");
    return to_double(trim(text.substr(0, slash))) / den;
  }
  return to_double(text);
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

ReducedPoint settle_start(const WhitneyPartition& part, ReducedPoint start,
                          const ProjectionConfig& cfg, const Entry& e) {
  const ConstraintSet g = ConstraintSet::reduced(part);
  const double residual = g.max_residual(start.coords);
  if (residual <= cfg.residual_tol) return start;
  try {
    const TangentFrame frame = tangent_frame(g, start);
    const Vector zero = Vector::Zero(frame.tangent_basis.cols());
    const ProjectionResult projected = project_to_manifold(g, frame, zero, cfg);
    if (projected.ok()) return *projected.point;
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kNotRegular) throw;
  }
  fail(ErrorCode::kStartOffManifold, e.line, e.column,
       fmt::format("start point has residual {} and cannot be projected onto the manifold",
                   residual));
}

}  // namespace

ProblemFile parse_problem(std::string_view text, const ProjectionConfig& cfg) {
  cfg.validate();
  const auto entries = split_entries(text);

  const Entry* vars = nullptr;
  const Entry* eliminate = nullptr;
  const Entry* objective = nullptr;
  const Entry* start = nullptr;
  std::vector<const Entry*> constraints;
  for (const auto& e : entries) {
    auto set_once = [&](const Entry*& slot) {
      if (slot) fail(ErrorCode::kSyntax, e.line, 1, "duplicate '" + e.key + "' entry");
      slot = &e;
    };
    if (e.key == "vars") set_once(vars);
    else if (e.key == "eliminate") set_once(eliminate);
    else if (e.key == "objective") set_once(objective);
    else if (e.key == "start") set_once(start);
    else if (e.key == "constraint") constraints.push_back(&e);
    else fail(ErrorCode::kSyntax, e.line, 1, "unknown key '" + e.key + "'");
  }
  if (!vars) throw Error(ErrorCode::kSyntax, "missing 'vars' entry");
  if (!objective) throw Error(ErrorCode::kSyntax, "missing 'objective' entry");
  if (!start) throw Error(ErrorCode::kSyntax, "missing 'start' entry");

  std::optional<VariableOrder> order_holder;
  try {
    order_holder.emplace(split_words(vars->value));
  } catch (const Error& err) {
    fail(err.code(), vars->line, vars->column, err.what());
  }
  const VariableOrder& order = *order_holder;

  std::optional<std::vector<std::size_t>> elim;
  if (eliminate && trim(eliminate->value) != "auto") {
    elim.emplace();
    for (const auto& name : split_words(eliminate->value)) {
      const auto idx = order.index_of(name);
      if (!idx) {
        const auto col = eliminate->column + eliminate->value.find(name);
        fail(ErrorCode::kUnknownVariable, eliminate->line, col, "unknown variable '" + name + "'");
      }
      elim->push_back(*idx);
    }
  }

  std::vector<Polynomial> polys;
  for (const auto* e : constraints) polys.push_back(parse_at(*e, order));
  Polynomial objective_poly = parse_at(*objective, order);

  TriangularSystem system = [&] {
    try {
      return validate_triangular(polys, order);
    } catch (const Error& err) {
      for (std::size_t i = 0; i < polys.size(); ++i) {
        if (polys[i].is_constant() && err.code() == ErrorCode::kConstantMember) {
          fail(err.code(), constraints[i]->line, constraints[i]->column, err.what());
        }
      }
      throw;
    }
  }();
  WhitneyPartition partition = whitney_partition(system, elim);

  // start: name=value, name=value
  Vector coords = Vector::Constant(static_cast<Eigen::Index>(partition.retained.size()),
                                   std::numeric_limits<double>::quiet_NaN());
  std::size_t offset = 0;
  const std::string& sv = start->value;
  while (offset <= sv.size()) {
    auto comma = sv.find(',', offset);
    if (comma == std::string::npos) comma = sv.size();
    const std::string_view item = std::string_view(sv).substr(offset, comma - offset);
    const std::size_t col = start->column + offset;
    if (!trim(item).empty()) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) fail(ErrorCode::kSyntax, start->line, col, "expected name=value");
      const std::string name(trim(item.substr(0, eq)));
      const auto idx = order.index_of(name);
      if (!idx) fail(ErrorCode::kUnknownVariable, start->line, col, "unknown variable '" + name + "'");
      const auto pos = std::find(partition.retained.begin(), partition.retained.end(), *idx);
      if (pos == partition.retained.end()) {
        fail(ErrorCode::kInvalidArgument, start->line, col,
             "'" + name + "' is eliminated; start lists retained variables only");
      }
      const auto slot = static_cast<Eigen::Index>(pos - partition.retained.begin());
      if (!std::isnan(coords(slot))) {
        fail(ErrorCode::kSyntax, start->line, col, "duplicate start value for '" + name + "'");
      }
      coords(slot) = parse_number(item.substr(eq + 1), *start, col + eq + 1);
    }
    offset = comma + 1;
  }
  for (std::size_t i = 0; i < partition.retained.size(); ++i) {
    if (std::isnan(coords(static_cast<Eigen::Index>(i)))) {
      fail(ErrorCode::kInvalidArgument, start->line, start->column,
           "missing start value for '" + order.name(partition.retained[i]) + "'");
    }
  }
  ReducedPoint settled = settle_start(partition, ReducedPoint{coords}, cfg, *start);

  return ProblemFile{order,          std::move(elim),      std::move(polys),
                     std::move(objective_poly), std::move(partition), std::move(settled)};
}

ProblemFile load_problem(const std::filesystem::path& path, const ProjectionConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open problem file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "failed reading " + path.string());
  return parse_problem(buffer.str(), cfg);
}

void write_trace_header(std::ostream& out, const WhitneyPartition& part) {
  out << "j,alpha,f,event";
  for (auto v : part.retained) out << ',' << part.order().name(v);
  out << '\n';
}

void write_trace_row(std::ostream& out, const IterationRecord& record) {
  out << fmt::format("{},{},{},{}", record.j, record.alpha, record.f, to_string(record.event));
  for (Eigen::Index i = 0; i < record.point.size(); ++i) out << fmt::format(",{}", record.point(i));
  out << '\n';
}

RunReport run_problem(const ProblemFile& problem, const DescentConfig& cfg, std::ostream* trace) {
  if (trace) write_trace_header(*trace, problem.partition);
  DescentProblem dp{problem.partition, polynomial_objective(problem.objective), problem.start};
  std::function<void(const IterationRecord&)> observer;
  if (trace) observer = [trace](const IterationRecord& r) { write_trace_row(*trace, r); };
  const DescentTrace result = descend(dp, cfg, observer);
  if (trace) trace->flush();

  RunReport report;
  report.final_point = result.final_point;
  report.final_ambient = result.final_ambient;
  report.objective = result.final_objective;
  report.iterations = result.iterations.size();
  report.converged = result.converged;
  report.forcing_constant = result.forcing_constant;
  report.final_alpha = result.final_alpha;
  report.seed = cfg.seed;
  report.max_constraint_residual = max_source_residual(problem.partition, result.final_ambient);
  for (const auto& p : problem.constraints) {
    const double r = std::abs(evaluate(
        p, {result.final_ambient.coords.data(), static_cast<std::size_t>(result.final_ambient.coords.size())}));
    report.max_constraint_residual = std::max(report.max_constraint_residual, r);
  }
  if (!(report.max_constraint_residual <= 10.0 * cfg.projection.residual_tol)) {
    throw Error(ErrorCode::kLiftCheckFailed,
                fmt::format("lifted point violates the constraints (residual {})",
                            report.max_constraint_residual));
  }
  return report;
}

nlohmann::ordered_json report_to_json(const RunReport& report, const ProblemFile& problem) {
  const auto& part = problem.partition;
  nlohmann::ordered_json out;
  out["status"] = report.converged ? "converged" : "budget_exhausted";
  out["converged"] = report.converged;
  out["iterations"] = report.iterations;
  out["seed"] = report.seed;
  out["objective"] = report.objective;
  nlohmann::ordered_json reduced = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < part.retained.size(); ++i) {
    reduced[part.order().name(part.retained[i])] =
        report.final_point.coords(static_cast<Eigen::Index>(i));
  }
  out["reduced"] = reduced;
  nlohmann::ordered_json ambient = nlohmann::ordered_json::object();
  for (std::size_t v = 0; v < part.order().size(); ++v) {
    ambient[part.order().name(v)] = report.final_ambient.coords(static_cast<Eigen::Index>(v));
  }
  out["ambient"] = ambient;
  out["max_constraint_residual"] = report.max_constraint_residual;
  out["forcing_constant"] = report.forcing_constant;
  out["final_alpha"] = report.final_alpha;
  out["trace"] = report.trace_path ? nlohmann::ordered_json(*report.trace_path) : nullptr;
  return out;
}

nlohmann::ordered_json partition_to_json(const WhitneyPartition& part) {
  const auto& order = part.order();
  auto names = [&](const std::vector<std::size_t>& idx) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (auto v : idx) arr.push_back(order.name(v));
    return arr;
  };
  auto polys = [](const std::vector<Polynomial>& ps) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : ps) arr.push_back(p.to_string());
    return arr;
  };
  nlohmann::ordered_json out;
  out["vars"] = names([&] {
    std::vector<std::size_t> all(order.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }());
  out["free"] = names(part.system.free_vars);
  out["algebraic"] = names(part.system.algebraic_vars);
  out["manifold_dim"] = part.manifold_dim();
  out["reduced_dim"] = part.reduced_dim();
  out["eliminated"] = names(part.eliminated);
  out["retained"] = names(part.retained);
  out["g_star"] = polys(part.g_star);
  out["g_circ"] = polys(part.g_circ);
  return out;
}

}  // namespace whitneyopt
