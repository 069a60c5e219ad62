#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cem/golden.hpp"
#include "cem/interp.hpp"
#include "cem/motivation.hpp"
#include "cem/patterns.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cem — contextual evaluation model and V5 engine"};
  app.require_subcommand(1);

  auto* repl_cmd = app.add_subcommand("repl", "interactive V5 session");

  std::string script_path;
  bool strict = false;
  auto* run_cmd = app.add_subcommand("run", "run a .v5 script and print the transcript");
  run_cmd->add_option("script", script_path, "script file")->required();
  run_cmd->add_flag("--strict", strict, "abort on the first command error");

  std::string golden_dir;
  auto* golden_cmd = app.add_subcommand("golden", "run golden transcript cases");
  golden_cmd->add_option("dir", golden_dir, "directory of .v5 + .golden.txt pairs")
      ->required();

  std::string sample_path;
  int min_points = 5, min_occurs = 5;
  auto* learn_cmd = app.add_subcommand("learn-patterns", "mine patterns from a sample file");
  learn_cmd->add_option("file", sample_path, "sample set file")->required();
  learn_cmd->add_option("--min-points", min_points, "minimum points per pattern");
  learn_cmd->add_option("--min-occurs", min_occurs, "minimum containing samples");

  std::string world;
  std::uint64_t seed = 1;
  int steps = 5000;
  double theta = 10.0, pen_size = 40.0;
  bool learning = false;
  std::string out_path;
  auto* sim_cmd = app.add_subcommand("sim", "run a motivation simulation");
  sim_cmd->add_option("world", world, "seeker|pen")->required();
  sim_cmd->add_option("--seed", seed, "rng seed");
  sim_cmd->add_option("--steps", steps, "step count");
  sim_cmd->add_option("--theta", theta, "seeker turn increment (degrees)");
  sim_cmd->add_option("--pen-size", pen_size, "pen side length");
  sim_cmd->add_flag("--learning", learning, "enable pen learning");
  sim_cmd->add_option("--out", out_path, "CSV output path (default stdout)");

  std::string fft_path;
  auto* fft_cmd = app.add_subcommand("fft-encode", "re-encode a spectra file into codes");
  fft_cmd->add_option("file", fft_path,
                      "text file: one frame per line of freq:mag pairs")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (repl_cmd->parsed()) return cem::interp::repl(std::cin, std::cout);

  if (run_cmd->parsed()) {
    auto result = cem::interp::run_script_file(script_path, strict);
    std::cout << result.transcript;
    return result.ok ? 0 : 1;
  }

  if (golden_cmd->parsed()) return cem::gold::run_dir(golden_dir, std::cout);

  if (learn_cmd->parsed()) {
    std::ifstream in(sample_path);
    if (!in) {
      std::cerr << "cannot open " << sample_path << "\n";
      return 1;
    }
    auto samples = cem::pat::parse_sample_file(in);
    cem::pat::Params params;
    params.min_points = min_points;
    params.min_occurs = min_occurs;
    auto result = cem::pat::learn(samples, params);
    for (const auto& p : result.patterns) {
      std::cout << "pattern (support " << p.support << "):";
      for (auto v : p.key) std::cout << ' ' << v;
      std::cout << "\n";
    }
    if (result.patterns.empty()) std::cout << "no patterns found\n";
    return 0;
  }

  if (sim_cmd->parsed()) {
    cem::mot::SimConfig cfg;
    if (world == "seeker") {
      cfg.world = cem::mot::SimConfig::World::Seeker;
    } else if (world == "pen") {
      cfg.world = cem::mot::SimConfig::World::Pen;
    } else {
      std::cerr << "world must be seeker or pen\n";
      return 1;
    }
    cfg.seed = seed;
    cfg.steps = steps;
    cfg.seeker.theta = theta;
    cfg.pen.size = pen_size;
    cfg.pen.learning = learning;
    auto rows = cem::mot::run_sim(cfg);
    if (out_path.empty()) {
      cem::mot::write_csv(std::cout, rows);
    } else {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "cannot open " << out_path << "\n";
        return 1;
      }
      cem::mot::write_csv(out, rows);
    }
    return 0;
  }

  if (fft_cmd->parsed()) {
    std::ifstream in(fft_path);
    if (!in) {
      std::cerr << "cannot open " << fft_path << "\n";
      return 1;
    }
    // One frame per line: freq:mag pairs separated by whitespace.
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::vector<std::pair<double, double>> bins;
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) {
        auto colon = tok.find(':');
        if (colon == std::string::npos) continue;
        bins.emplace_back(std::stod(tok.substr(0, colon)),
                          std::stod(tok.substr(colon + 1)));
      }
      if (bins.empty()) continue;
      auto codes = cem::pat::encode_fft_frame(bins);
      if (!codes) {
        std::cout << "frame " << lineno << ": empty (all magnitudes zero)\n";
        continue;
      }
      bool first = true;
      for (int c : *codes) {
        if (!first) std::cout << ',';
        std::cout << c;
        first = false;
      }
      std::cout << "\n";
    }
    return 0;
  }
  return 0;
}
