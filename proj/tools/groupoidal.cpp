#include "groupoidal/model.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"groupoidal: groupoid C*-algebra workbench"};
  app.require_subcommand(1);

  std::string file;
  auto* validate = app.add_subcommand("validate", "parse and validate a model document");
  validate->add_option("file", file, "model document (JSON)")->required();

  std::string run_file, suite = "all", format = "text";
  unsigned long long seed = 0;
  std::int64_t window = -1;
  double tol = -1;
  auto* run = app.add_subcommand("run", "run a check suite against a model document");
  run->add_option("file", run_file, "model document (JSON)")->required();
  run->add_option("--suite", suite, "axioms|algebra|cocycle|bimodule|kms|index|all")
      ->check(CLI::IsMember({"axioms", "algebra", "cocycle", "bimodule", "kms", "index", "all"}));
  run->add_option("--seed", seed, "deterministic seed");
  run->add_option("--window", window, "degree window override");
  run->add_option("--tol", tol, "tolerance override");
  run->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"json", "text"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      auto doc = groupoidal::parse_model(slurp(file));
      std::cout << "valid  digest " << doc.digest << "\n";
      return 0;
    }
    auto doc = groupoidal::parse_model(slurp(run_file));
    if (window > 0) doc.window = window;
    if (tol > 0) doc.tolerance = tol;
    auto rep = groupoidal::run_suite(doc, suite, seed);
    std::cout << (format == "json" ? groupoidal::report_to_json(rep)
                                   : groupoidal::report_to_text(rep));
    return rep.exit_code();
  } catch (const groupoidal::SchemaError& e) {
    for (const auto& msg : e.errors) std::cerr << "schema error: " << msg << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
