#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "mgmax/error.hpp"

namespace {

void add_sweep_options(CLI::App& cmd, mgmax::cli::SweepConfig& c, std::vector<std::string>& q_text,
                       std::string& r_text) {
  cmd.add_option("--trials", c.trials, "Number of instances")->capture_default_str();
  cmd.add_option("--seed", c.seed, "Base seed")->capture_default_str();
  cmd.add_option("--p", c.p_values, "Values of p")->delimiter(',')->capture_default_str();
  cmd.add_option("--q", q_text, "Values of q: a number, 'inf', or a multiple like '2p'")->delimiter(',');
  cmd.add_option("--r", r_text, "Stopping ratio, or 'auto' for (p+1)/p")->capture_default_str();
  cmd.add_option("--depth-min", c.depth_min)->capture_default_str();
  cmd.add_option("--depth-max", c.depth_max)->capture_default_str();
  cmd.add_option("--branch-min", c.branch_min)->capture_default_str();
  cmd.add_option("--branch-max", c.branch_max)->capture_default_str();
  cmd.add_option("--tol", c.tol, "Relative tolerance")->capture_default_str();
}

void finish_config(mgmax::cli::SweepConfig& c, const std::vector<std::string>& q_text, const std::string& r_text) {
  if (!q_text.empty()) {
    c.q_values.clear();
    for (const auto& t : q_text) c.q_values.push_back(mgmax::cli::QToken::parse(t));
  }
  if (r_text != "auto") {
    try {
      std::size_t used = 0;
      c.r = std::stod(r_text, &used);
      if (used != r_text.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw mgmax::cli::ConfigError("bad --r value '" + r_text + "'");
    }
  }
  c.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Martingale maximal operator toolkit"};
  app.require_subcommand(1);

  mgmax::cli::SweepConfig config;
  std::vector<std::string> q_text;
  std::string r_text = "auto";

  auto* gen = app.add_subcommand("generate", "Write random instances to a directory");
  add_sweep_options(*gen, config, q_text, r_text);
  gen->add_option("--out", config.out, "Output directory")->required();

  auto* ver = app.add_subcommand("verify", "Check instances and append JSON records to a report");
  add_sweep_options(*ver, config, q_text, r_text);
  std::vector<std::string> inputs;
  std::string report_path;
  bool resume = false;
  ver->add_option("inputs", inputs, "Instance files or directories")->required();
  ver->add_option("--report", report_path, "Report file (appended); stdout if omitted");
  ver->add_flag("--resume", resume, "Skip instances already present in the report");
  ver->add_option("--candidates", config.candidates, "Random candidates in the lower-bound search")
      ->capture_default_str();
  ver->add_option("--ascent", config.ascent_rounds, "Coordinate-ascent rounds")->capture_default_str();
  ver->add_option("--workers", config.workers, "Worker threads")->capture_default_str();
  bool halve = false;
  ver->add_flag("--debug-halve-cp", halve, "Replace C(p) by C(p)/2 (fault injection)");

  auto* rep = app.add_subcommand("report", "Summarize a report as CSV");
  std::string summary_path;
  rep->add_option("report", summary_path, "Report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      finish_config(config, q_text, r_text);
      mgmax::cli::cmd_generate(config, std::cout);
      return 0;
    }
    if (*ver) {
      if (halve) config.cp_factor = 0.5;
      finish_config(config, q_text, r_text);
      std::vector<std::filesystem::path> files;
      for (const auto& in : inputs) {
        if (std::filesystem::is_directory(in)) {
          for (auto& f : mgmax::cli::list_instances(in)) files.push_back(f);
        } else if (std::filesystem::exists(in)) {
          files.emplace_back(in);
        } else {
          throw mgmax::cli::ConfigError("no such input '" + in + "'");
        }
      }
      if (resume && !report_path.empty()) {
        std::set<std::string> done;
        std::ifstream prev(report_path);
        std::string line;
        while (std::getline(prev, line)) {
          const auto at = line.find("\"instance\":\"");
          if (at == std::string::npos) continue;
          const auto start = at + 12;
          done.insert(line.substr(start, line.find('"', start) - start));
        }
        std::erase_if(files, [&](const auto& f) { return done.contains(f.stem().string()); });
      }
      if (report_path.empty()) return mgmax::cli::cmd_verify(config, files, std::cout, std::cerr);
      // Buffer so a load failure leaves the report untouched.
      std::ostringstream buffer;
      const int code = mgmax::cli::cmd_verify(config, files, buffer, std::cerr);
      std::ofstream out(report_path, std::ios::app);
      if (!out) throw mgmax::cli::ConfigError("cannot open report '" + report_path + "'");
      out << buffer.str();
      return code;
    }
    mgmax::cli::cmd_report(summary_path, std::cout);
    return 0;
  } catch (const mgmax::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mgmax::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mgmax::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
