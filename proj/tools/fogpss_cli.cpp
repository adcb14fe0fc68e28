// fogpss: run closed-loop experiments, solve Caputo test problems, check
// linear stability and reproduce the bundled experiments.
//
// Exit codes: 0 ok, 1 error, 2 unstable verdict (check-stability),
// 3 failed criterion (reproduce) or failed --max-error check (solve-fde).

#include "fogpss/config.hpp"
#include "fogpss/fde_abm.hpp"
#include "fogpss/fostab.hpp"
#include "fogpss/reproduce.hpp"
#include "fogpss/trace_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <sstream>

namespace {

constexpr int kExitError = 1;
constexpr int kExitUnstable = 2;
constexpr int kExitCriterion = 3;

// Parses "[[1,2],[3,4]]" into a square matrix.
Eigen::MatrixXd parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto expect = [&](char c) {
    skip();
    if (i >= text.size() || text[i] != c) {
      throw std::invalid_argument("matrix literal: expected '" + std::string(1, c) + "' at offset " +
                                  std::to_string(i));
    }
    ++i;
  };
  expect('[');
  while (true) {
    expect('[');
    std::vector<double> row;
    while (true) {
      skip();
      const char* begin = text.c_str() + i;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) throw std::invalid_argument("matrix literal: expected a number at offset " + std::to_string(i));
      row.push_back(v);
      i += static_cast<std::size_t>(end - begin);
      skip();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      expect(']');
      break;
    }
    rows.push_back(std::move(row));
    skip();
    if (i < text.size() && text[i] == ',') {
      ++i;
      continue;
    }
    expect(']');
    break;
  }
  skip();
  if (i != text.size()) throw std::invalid_argument("matrix literal: trailing characters");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != n) {
      throw std::invalid_argument("matrix literal: matrix must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) A(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return A;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* s = std::getenv("FOGPSS_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0' || s[0] == '-') throw std::invalid_argument(std::string("FOGPSS_SEED is not an integer: ") + s);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional-order PSS tracking toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<double> step, horizon;
  bool negate_u = false;
  auto* simulate = app.add_subcommand("simulate", "Run a configured experiment and write CSV, SVG and summary");
  simulate->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--step", step, "Override the step size h");
  simulate->add_option("--horizon", horizon, "Override the horizon T");
  simulate->add_flag("--negate-u", negate_u, "Flip the sign applied to the control input");

  double alpha = 0.5, lambda = -1.0, x0 = 1.0, fde_T = 1.0;
  long long steps = 1000;
  std::string fde_out;
  std::optional<double> max_error;
  auto* solve = app.add_subcommand("solve-fde", "Solve D^alpha x = lambda x, x(0) = x0 by ABM");
  solve->add_option("--alpha", alpha, "Order in (0, 1]")->check(CLI::Range(0.0, 1.0));
  solve->add_option("--lambda", lambda, "Linear coefficient");
  solve->add_option("--x0", x0, "Initial value");
  solve->add_option("--horizon", fde_T, "Final time T");
  solve->add_option("--steps", steps, "Number of steps N")->check(CLI::Range(1LL, 1'000'000LL));
  solve->add_option("--out", fde_out, "CSV output path");
  solve->add_option("--max-error", max_error, "Fail with exit 3 if the reference error exceeds this");

  std::string matrix;
  double stab_alpha = 0.5;
  auto* check = app.add_subcommand("check-stability", "Eigenvalue-argument test for D^alpha x = A x");
  check->add_option("matrix", matrix, "Matrix literal, e.g. [[0,1],[-1,0]]")->required();
  check->add_option("alpha", stab_alpha, "Order in (0, 1]")->required();

  std::string figure;
  std::string repro_out;
  auto* repro = app.add_subcommand("reproduce", "Run a bundled experiment and check its criteria");
  repro->add_option("figure", figure, "fig5, fig6, fig7, pss, order or all")
      ->required()
      ->check(CLI::IsMember({"fig5", "fig6", "fig7", "pss", "order", "all"}));
  repro->add_option("--out", repro_out, "Artifact directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*simulate) {
      auto config = fogpss::load_experiment_config(config_path);
      fogpss::ConfigOverrides o{step, horizon, negate_u, seed_from_env()};
      fogpss::apply_overrides(config, o);
      if (config.is_robot()) {
        const auto result = fogpss::pss_robot_experiment(std::get<fogpss::RobotExperimentConfig>(config.experiment));
        fogpss::write_robot_artifacts(out_dir, config, result);
        std::cout << fogpss::robot_summary(config, result);
      } else {
        const auto trace = fogpss::simulate(std::get<fogpss::SimConfig>(config.experiment));
        fogpss::write_run_artifacts(out_dir, config, trace);
        std::cout << fogpss::simulation_summary(config, trace);
      }
      std::cout << "artifacts written to " << out_dir << '\n';
      return 0;
    }

    if (*solve) {
      fogpss::FdeProblem p;
      p.alpha = alpha;
      p.rhs = [lambda](double, const fogpss::State& x) { return fogpss::State(lambda * x); };
      p.x0 = {fogpss::State::Constant(1, x0)};
      p.horizon = fde_T;
      p.steps = static_cast<fogpss::Index>(steps);
      const auto sol = fogpss::abm_solve(p);
      // The series reference exists only where it is accurate; the argument
      // is largest in magnitude at T.
      bool have_ref = true;
      try {
        (void)fogpss::mittag_leffler(alpha, lambda * std::pow(fde_T, alpha));
      } catch (const std::domain_error&) {
        have_ref = false;
      }
      auto reference = [&](double t) { return x0 * fogpss::mittag_leffler(alpha, lambda * std::pow(t, alpha)); };
      if (!fde_out.empty()) {
        std::string csv = have_ref ? "t,x,reference\n" : "t,x\n";
        char buf[96];
        for (std::size_t n = 0; n < sol.states.size(); ++n) {
          const double t = sol.time(static_cast<fogpss::Index>(n));
          if (have_ref) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", t, sol.states[n][0], reference(t));
          } else {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", t, sol.states[n][0]);
          }
          csv += buf;
        }
        fogpss::write_text_file(fde_out, csv);
      }
      std::cout << "alpha = " << alpha << ", lambda = " << lambda << ", x0 = " << x0 << ", T = " << fde_T
                << ", N = " << steps << '\n'
                << "x(T) = " << sol.states.back()[0] << '\n';
      if (!have_ref) {
        std::cout << "no Mittag-Leffler reference: series outside its accurate range\n";
        return max_error ? kExitError : 0;
      }
      const double err = fogpss::max_grid_error(sol, reference);
      std::cout << "max error vs x0 E_alpha(lambda t^alpha) = " << err << '\n';
      if (max_error && !(err <= *max_error)) {
        std::cerr << "max error " << err << " exceeds " << *max_error << '\n';
        return kExitCriterion;
      }
      return 0;
    }

    if (*check) {
      Eigen::MatrixXd A;
      try {
        A = parse_matrix(matrix);
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
      }
      const auto v = fogpss::check_linear_fo_stability(fogpss::LinearFoSystem(A, stab_alpha));
      std::cout << (v.stable ? "stable" : "unstable") << '\n'
                << "margin: " << v.margin << " rad (threshold alpha*pi/2 = " << stab_alpha * std::numbers::pi / 2
                << ")\n";
      for (Eigen::Index i = 0; i < v.eigenvalues.size(); ++i) {
        const auto& l = v.eigenvalues[i];
        std::cout << "lambda_" << i + 1 << " = " << l.real() << (l.imag() < 0 ? " - " : " + ") << std::abs(l.imag())
                  << "i, |arg| = " << v.eigen_args[static_cast<std::size_t>(i)] << '\n';
      }
      return v.stable ? 0 : kExitUnstable;
    }

    if (*repro) {
      const auto results = fogpss::reproduce(figure, repro_out);
      bool ok = true;
      for (const auto& r : results) {
        std::cout << fogpss::format_result(r) << '\n';
        ok = ok && r.pass;
      }
      if (!repro_out.empty()) std::cout << "artifacts written to " << repro_out << '\n';
      return ok ? 0 : kExitCriterion;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
