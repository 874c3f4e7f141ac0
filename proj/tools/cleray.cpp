#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cleray/experiments.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> domain, out;
  std::optional<double> m, chart_radius;
  std::optional<int> level;
  std::optional<std::uint64_t> seed;
  std::vector<double> eps, p;
};

void add_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON config file");
  sub->add_option("--domain", o.domain, "flat, power or ball");
  sub->add_option("--m", o.m, "exponent of the power domain");
  sub->add_option("--chart-radius", o.chart_radius, "atlas chart radius");
  sub->add_option("--level", o.level, "quadrature level");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--eps", o.eps, "eps values")->delimiter(',');
  sub->add_option("--p", o.p, "p values (inf allowed)")->delimiter(',');
  sub->add_option("--out", o.out, "output directory");
}

cleray::ExperimentConfig resolve(const std::string& experiment, const Overrides& o) {
  auto c = cleray::default_config(experiment);
  if (!o.config_path.empty()) cleray::apply_config_file(c, o.config_path);
  if (o.domain) c.domain = *o.domain;
  if (o.m) c.m = *o.m;
  if (o.chart_radius) c.chart_radius = *o.chart_radius;
  if (o.level) c.level = *o.level;
  if (o.seed) c.seed = *o.seed;
  if (!o.eps.empty()) c.eps = o.eps;
  if (!o.p.empty()) c.p_values = o.p;
  if (o.out) c.out = *o.out;
  return c;
}

std::string short_number(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void print_summary(const cleray::Report& r, const std::string& stem) {
  std::cout << r.experiment << ": " << r.header << "\n";
  for (const auto& c : r.checks) {
    const char* tag = c.asserted ? (c.pass ? "PASS" : "FAIL") : "info";
    std::cout << "  [" << tag << "] " << c.name << "  value " << short_number(c.value);
    if (!std::isnan(c.threshold)) std::cout << "  threshold " << short_number(c.threshold);
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
  }
  std::cout << (r.passed() ? "all asserted checks passed" : "asserted checks FAILED") << "; wrote " << stem << ".{json,csv,svg}\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cauchy-Leray numerics on Flat, PowerM and Ball domains"};
  app.require_subcommand(1);
  Overrides o;
  for (const auto& name : cleray::experiment_names()) add_options(app.add_subcommand(name, "run the " + name + " experiment"), o);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();
  try {
    const auto cfg = resolve(experiment, o);
    const cleray::Report rep = cleray::run_experiment(cfg);
    std::filesystem::create_directories(cfg.out);
    const std::string stem = (std::filesystem::path(cfg.out) / experiment).string();
    cleray::write_text(stem + ".json", cleray::reports_json({rep}));
    cleray::write_text(stem + ".csv", cleray::reports_csv({rep}));
    cleray::write_text(stem + ".svg", cleray::reports_svg({rep}));
    print_summary(rep, stem);
    return rep.passed() ? 0 : 1;
  } catch (const cleray::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
