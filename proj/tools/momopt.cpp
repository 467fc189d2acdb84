// momopt: global polynomial minimization by moment relaxations.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "momopt/driver.hpp"
#include "momopt/error.hpp"
#include "momopt/polyparse.hpp"
#include "momopt/report_json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitMaxOrder = 3;
constexpr int kExitInput = 4;

struct Inputs {
  std::string problem_file;
  std::string vars;
  std::string objective;
  std::vector<std::string> ineqs;
  std::vector<std::string> eqs;
  int order = 0;
  int max_order = 0;
  std::string mode = "qm";
  std::string polar_mode;
  double solver_tol = 1e-8;
  double extract_tol = 1e-2;
  std::uint64_t seed = 42;
  std::string output;
  bool trace = false;
};

void add_common(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--problem", in.problem_file, "JSON file with vars, objective, inequalities, equalities");
  cmd->add_option("--vars", in.vars, "Comma-separated variable names");
  cmd->add_option("--objective", in.objective, "Polynomial to minimize");
  cmd->add_option("--ineq", in.ineqs, "Constraint g >= 0 (repeatable)");
  cmd->add_option("--eq", in.eqs, "Constraint h = 0 (repeatable)");
  cmd->add_option("--order", in.order, "Relaxation order (default ceil(deg/2))")->check(CLI::PositiveNumber);
  cmd->add_option("--mode", in.mode, "Relaxation: qm or preorder")->check(CLI::IsMember({"qm", "preorder"}));
  cmd->add_option("--solver-tol", in.solver_tol, "Duality gap tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--extract-tol", in.extract_tol, "Extraction tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", in.seed, "Seed for the extraction combination");
  cmd->add_option("--output", in.output, "Write the JSON report here instead of stdout");
  cmd->add_flag("--trace", in.trace, "Solver iteration log on stderr and per-order diagnostics");
}

momopt::POPInstance load_problem(const Inputs& in) {
  std::string vars = in.vars, objective = in.objective;
  std::vector<std::string> ineqs = in.ineqs, eqs = in.eqs;
  if (!in.problem_file.empty()) {
    std::ifstream f(in.problem_file);
    if (!f) throw std::invalid_argument("cannot open " + in.problem_file);
    nlohmann::json j = nlohmann::json::parse(f);
    std::vector<std::string> names = j.at("vars").get<std::vector<std::string>>();
    vars.clear();
    for (std::size_t i = 0; i < names.size(); ++i) vars += (i ? "," : "") + names[i];
    objective = j.at("objective").get<std::string>();
    if (j.contains("inequalities")) ineqs = j["inequalities"].get<std::vector<std::string>>();
    if (j.contains("equalities")) eqs = j["equalities"].get<std::vector<std::string>>();
  }
  if (vars.empty() || objective.empty()) throw std::invalid_argument("--vars and --objective are required");
  momopt::POPInstance pop;
  pop.vars = momopt::VariableTable::from_list(vars);
  pop.f = momopt::parse_polynomial(objective, pop.vars);
  for (const auto& s : ineqs) pop.ineqs.push_back(momopt::parse_polynomial(s, pop.vars));
  for (const auto& s : eqs) pop.eqs.push_back(momopt::parse_polynomial(s, pop.vars));
  pop.validate();
  return pop;
}

momopt::RunConfig make_config(const Inputs& in) {
  momopt::RunConfig cfg;
  cfg.initial_order = in.order;
  cfg.max_order = in.max_order;
  cfg.mode = in.mode == "preorder" ? momopt::RelaxationMode::Preordering
                                   : momopt::RelaxationMode::QuadraticModule;
  cfg.residual_tol = in.extract_tol;
  cfg.seed = in.seed;
  cfg.solver.gap_tol = in.solver_tol;
  if (in.trace) cfg.solver.log = &std::cerr;
  return cfg;
}

void emit(const Inputs& in, const nlohmann::ordered_json& j) {
  std::string text = momopt::dump_json(j) + "\n";
  if (in.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(in.output);
  if (!f) throw std::invalid_argument("cannot write " + in.output);
  f << text;
}

int exit_code(momopt::RunStatus s) {
  switch (s) {
    case momopt::RunStatus::Exact: return kExitOk;
    case momopt::RunStatus::Infeasible: return kExitInfeasible;
    case momopt::RunStatus::MaxOrderReached: return kExitMaxOrder;
  }
  return kExitSolverFailure;
}

int exit_code(momopt::SolveStatus s) {
  switch (s) {
    case momopt::SolveStatus::Optimal: return kExitOk;
    case momopt::SolveStatus::Infeasible: return kExitInfeasible;
    default: return kExitSolverFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global polynomial optimization with moment relaxations"};
  app.require_subcommand(1);
  Inputs in;
  auto* cmd_min = app.add_subcommand("minimize", "Solve one relaxation of the given order");
  auto* cmd_fin = app.add_subcommand("finite-min", "Raise the order until the minimizers are extracted");
  auto* cmd_pol = app.add_subcommand("polar-min", "finite-min with polar or KKT constraints added");
  for (auto* c : {cmd_min, cmd_fin, cmd_pol}) add_common(c, in);
  for (auto* c : {cmd_fin, cmd_pol})
    c->add_option("--max-order", in.max_order, "Last order tried (default order + 4)")
        ->check(CLI::PositiveNumber);
  cmd_pol->add_option("--polar-mode", in.polar_mode, "product, branch or kkt")
      ->check(CLI::IsMember({"product", "branch", "kkt"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    momopt::POPInstance pop = load_problem(in);
    momopt::RunConfig cfg = make_config(in);
    if (cmd_min->parsed()) {
      int d = in.order > 0 ? in.order : momopt::minimal_order(pop);
      momopt::MinimizeResult res = momopt::minimize(pop, d, cfg);
      emit(in, momopt::minimize_to_json(res, in.trace));
      return exit_code(res.solve.status);
    }
    momopt::RunReport rep;
    if (cmd_fin->parsed()) {
      rep = momopt::finite_minimizers(pop, cfg);
    } else {
      int d = in.order > 0 ? in.order : momopt::minimal_order(pop);
      momopt::PolarMode mode = momopt::PolarMode::PolarProduct;
      if (in.polar_mode == "branch") mode = momopt::PolarMode::PolarBranch;
      if (in.polar_mode == "kkt") mode = momopt::PolarMode::KKT;
      try {
        rep = momopt::polar_minimize(pop, d, mode, cfg);
      } catch (const momopt::Error& e) {
        // Without an explicit mode the product form falls back to branches.
        if (e.code() != momopt::ErrorCode::CapExceeded || !in.polar_mode.empty()) throw;
        std::cerr << e.what() << "; switching to branch mode\n";
        rep = momopt::polar_minimize(pop, d, momopt::PolarMode::PolarBranch, cfg);
      }
    }
    emit(in, momopt::report_to_json(rep, in.trace));
    return exit_code(rep.status);
  } catch (const momopt::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
  } catch (const momopt::Error& e) {
    std::cerr << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "problem file: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
  }
  return kExitInput;
}
