#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mgmax/constants.hpp"
#include "mgmax/error.hpp"
#include "mgmax/io.hpp"
#include "mgmax/random_model.hpp"
#include "mgmax/rng.hpp"
#include "mgmax/sawyer.hpp"
#include "mgmax/stopping.hpp"

namespace mgmax::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

QToken QToken::parse(const std::string& text) {
  if (text == "inf") return {Kind::infinite, 0.0};
  try {
    if (!text.empty() && text.back() == 'p') {
      const std::string head = text.substr(0, text.size() - 1);
      std::size_t used = 0;
      const double k = head.empty() ? 1.0 : std::stod(head, &used);
      if (!head.empty() && used != head.size()) throw ConfigError("");
      if (!(k >= 1.0)) throw ConfigError("");
      return {Kind::relative, k};
    }
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !(v > 1.0) || !std::isfinite(v)) throw ConfigError("");
    return {Kind::absolute, v};
  } catch (const std::exception&) {
    throw ConfigError("bad q value '" + text + "' (expected a number > 1, 'inf', or a multiple like '2p')");
  }
}

Exponent QToken::resolve(double p) const {
  switch (kind) {
    case Kind::infinite:
      return Exponent::infinity();
    case Kind::relative:
      return Exponent::finite(value * p);
    case Kind::absolute:
      return Exponent::finite(value);
  }
  return Exponent::infinity();
}

void SweepConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (p_values.empty()) throw ConfigError("need at least one p");
  for (double p : p_values) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("every p must be finite and > 1");
  }
  if (q_values.empty()) throw ConfigError("need at least one q");
  if (r && !(*r > 1.0)) throw ConfigError("r must be > 1");
  if (depth_min > depth_max) throw ConfigError("empty depth range");
  if (branch_min < 1 || branch_min > branch_max) throw ConfigError("empty branching range");
  if (!(tol >= 0.0)) throw ConfigError("tolerance must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  exponent_pairs();
}

std::vector<std::pair<double, Exponent>> SweepConfig::exponent_pairs() const {
  std::vector<std::pair<double, Exponent>> out;
  for (double p : p_values) {
    for (const auto& tok : q_values) {
      const Exponent q = tok.resolve(p);
      if (q < Exponent::finite(p)) {
        throw ConfigError("q = " + q.to_string() + " is below p = " + Exponent::finite(p).to_string());
      }
      out.emplace_back(p, q);
    }
  }
  return out;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string instance_name(std::size_t i) {
  std::ostringstream os;
  os << "inst_";
  os.width(4);
  os.fill('0');
  os << i;
  return os.str();
}

LeafValues positive_values(std::size_t n, Rng& rng, double zero_probability) {
  LeafValues v(n);
  for (double& x : v) {
    x = uniform01(rng) < zero_probability ? 0.0 : std::exp(4.0 * uniform01(rng) - 2.0);
  }
  return v;
}

fs::path sibling(const fs::path& instance, const char* suffix) {
  return instance.parent_path() / (instance.stem().string() + suffix);
}

std::string number_text(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

void cmd_generate(const SweepConfig& config, std::ostream& manifest) {
  config.validate();
  if (config.out.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec || !fs::is_directory(config.out)) throw ConfigError("cannot create output directory " + config.out.string());

  RandomModelParams params;
  params.depth_min = config.depth_min;
  params.depth_max = config.depth_max;
  params.branch_min = config.branch_min;
  params.branch_max = config.branch_max;
  params.mu_zero_probability = 0.05;
  params.nu_zero_probability = 0.05;

  for (std::size_t i = 0; i < config.trials; ++i) {
    const std::string name = instance_name(i);
    const auto model = random_model(params, splitmix64(config.seed ^ splitmix64(i)));
    Rng rng = substream(config.seed, {i, 0x636f6566ULL});

    CoefficientFamily a(model.node_count());
    for (NodeIndex v = 0; v < model.node_count(); ++v) {
      if (uniform01(rng) < 0.5) {
        a.set(v, std::exp(2.0 * uniform01(rng) - 1.0));
      } else {
        a.set(v, positive_values(model.leaf_range(v).size(), rng, 0.1));
      }
    }

    SawyerInstance sawyer{model, positive_values(model.leaf_count(), rng, 0.05),
                          positive_values(model.leaf_count(), rng, 0.0), 1.0 - 0.9 * uniform01(rng), 2.0};

    const fs::path base = config.out / name;
    try {
      write_file(base.string() + ".json", write_model(model));
      write_file(base.string() + ".coef.json", write_coefficients(a, model));
      write_file(base.string() + ".sawyer.json", write_sawyer(sawyer));
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
    manifest << name << ".json nodes=" << model.node_count() << " leaves=" << model.leaf_count()
             << " depth=" << model.max_depth() << " roots=" << model.roots().size() << "\n";
  }
}

std::vector<fs::path> list_instances(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (name.ends_with(".coef.json") || name.ends_with(".sawyer.json")) continue;
    out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct LoadedInstance {
  std::string id;
  DyadicModel model;
  CoefficientFamily a;
  std::string coefficient_source;
  std::optional<std::string> sawyer_text;
};

LoadedInstance load_instance(const fs::path& path) {
  const auto model = read_model(read_file(path));
  LoadedInstance inst{path.stem().string(), model, CoefficientFamily::constant(model, 1.0), "unit", std::nullopt};
  if (const auto coef = sibling(path, ".coef.json"); fs::exists(coef)) {
    inst.a = read_coefficients(read_file(coef), model);
    inst.coefficient_source = "file";
  }
  if (const auto saw = sibling(path, ".sawyer.json"); fs::exists(saw)) {
    inst.sawyer_text = read_file(saw);
    const auto parsed = read_sawyer(*inst.sawyer_text, 2.0);
    if (parsed.model.leaf_count() != model.leaf_count()) throw ParseError("Sawyer file does not match its instance");
    reduce_three_to_two(parsed);  // rejects infinite mu up front
  }
  return inst;
}

struct CheckOutcome {
  std::vector<std::string> lines;
  bool passed = true;
};

std::string witness_text(const DyadicModel& m, const std::optional<NodeIndex>& v) {
  return v ? m.id(*v) : std::string();
}

CheckOutcome run_checks(const LoadedInstance& inst, const SweepConfig& config) {
  CheckOutcome out;
  const auto pairs = config.exponent_pairs();
  const DyadicModel& m = inst.model;
  const std::uint64_t key = fnv1a(inst.id);

  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const auto [p, q] = pairs[pi];
    auto record = [&](const char* check, bool pass, double margin) {
      ordered_json j;
      j["instance"] = inst.id;
      j["p"] = p;
      j["q"] = q.to_string();
      j["check"] = check;
      j["pass"] = pass;
      j["margin"] = margin;
      out.passed = out.passed && pass;
      return j;
    };
    auto emit = [&](const ordered_json& j) { out.lines.push_back(j.dump()); };
    auto emit_error = [&](const char* check, const std::exception& e) {
      auto j = record(check, false, 0.0);
      j["error"] = e.what();
      emit(j);
    };

    Rng rng = substream(config.seed, {key, pi, 0x66ULL});
    const auto f = positive_values(m.leaf_count(), rng, 0.2);

    // Two-weight sandwich B <= A_lower <= C(p) B.
    double B = 0.0;
    try {
      const SearchBudget budget{config.candidates, config.ascent_rounds, splitmix64(config.seed ^ key ^ pi)};
      const auto rep = verify_theorem(m, inst.a, p, q, budget, {config.tol, config.cp_factor});
      B = rep.B;
      auto j = record("sandwich", rep.passed(), std::min(rep.lower_margin, rep.upper_margin));
      j["B"] = rep.B;
      j["A_lower"] = rep.A_lower;
      j["C_p"] = rep.C_p;
      j["lower_margin"] = rep.lower_margin;
      j["upper_margin"] = rep.upper_margin;
      j["B_witness"] = witness_text(m, testing_constant(m, inst.a, p, q).witness);
      j["A_witness"] = rep.witness_cube ? m.id(*rep.witness_cube) : rep.witness_origin;
      j["coefficients"] = inst.coefficient_source;
      if (!rep.passed()) j["failed_link"] = rep.lower_holds ? "sufficiency" : "necessity";
      emit(j);
    } catch (const std::exception& e) {
      emit_error("sandwich", e);
    }

    const double r = config.r.value_or((p + 1.0) / p);

    // Stopping cubes: packing, partition and average control.
    try {
      const auto d = build_decomposition(m, f, r);
      const auto pack = verify_packing(m, d, config.tol);
      const bool partition = blocks_partition(m, d);
      const bool control = average_control(m, d, config.tol);
      auto j = record("packing", pack.passed() && partition && control, pack.bound - pack.worst_ratio);
      j["r"] = r;
      j["worst_ratio"] = pack.worst_ratio;
      j["bound"] = pack.bound;
      j["worst_generation_ratio"] = pack.worst_generation_ratio;
      j["partition"] = partition;
      j["average_control"] = control;
      j["generations"] = d.generations.size();
      emit(j);
    } catch (const std::exception& e) {
      emit_error("packing", e);
    }

    // Carleson embedding with a random sequence.
    try {
      Rng wrng = substream(config.seed, {key, pi, 0x77ULL});
      const auto w = make_carleson_sequence(m, positive_values(m.node_count(), wrng, 0.3));
      const auto rep = carleson_embedding_check(m, w, f, p, config.tol);
      auto j = record("carleson", rep.holds, rep.rhs - rep.lhs);
      j["lhs"] = rep.lhs;
      j["rhs"] = rep.rhs;
      j["packing_constant"] = rep.packing_constant;
      emit(j);
    } catch (const std::exception& e) {
      emit_error("carleson", e);
    }

    // The chain of estimates.
    try {
      ProofOptions opts;
      opts.r = r;
      opts.rel_tol = config.tol;
      opts.cp_factor = config.cp_factor;
      const auto t = proof_trace(m, inst.a, f, p, q, B, opts);
      const bool rebuilt = t.reconstruction_error <= 1e-12;
      // rhs / lhs of the tightest applicable link; below 1 means a violation.
      double min_slack = HUGE_VAL;
      for (const auto& l : t.links) {
        if (l.applicable) min_slack = std::min(min_slack, slack_ratio(l.lhs, l.rhs));
      }
      auto j = record("proof_chain", t.passed() && rebuilt, min_slack);
      j["r"] = r;
      j["lhs"] = t.lhs;
      j["block_sum"] = t.block_sum;
      j["carleson_sum"] = t.carleson_sum;
      j["carleson_bound"] = t.carleson_bound;
      j["final_bound"] = t.final_bound;
      j["optimal_bound"] = t.optimal_bound;
      j["reconstruction_error"] = t.reconstruction_error;
      j["min_slack"] = min_slack;
      if (auto bad = t.first_failure()) {
        j["failed_link"] = link_name(*bad);
      } else if (!rebuilt) {
        j["failed_link"] = "block_reconstruction";
      }
      emit(j);
    } catch (const std::exception& e) {
      emit_error("proof_chain", e);
    }

    // Three-measure to two-measure reduction.
    try {
      SawyerInstance saw = inst.sawyer_text
                               ? read_sawyer(*inst.sawyer_text, p)
                               : SawyerInstance{m,
                                                LeafValues(m.leaf_masses(Measure::mu).begin(),
                                                           m.leaf_masses(Measure::mu).end()),
                                                LeafValues(m.leaf_count(), 1.0), 1.0, p};
      const auto rep = verify_reduction(saw, f, q);
      const double worst = std::max({rep.integral_error, rep.operator_error, rep.norm_error});
      auto j = record("reduction", rep.holds, 1e-12 - worst);
      j["integral_error"] = rep.integral_error;
      j["operator_error"] = rep.operator_error;
      j["norm_error"] = rep.norm_error;
      j["sawyer"] = inst.sawyer_text ? "file" : "derived";
      emit(j);
    } catch (const std::exception& e) {
      emit_error("reduction", e);
    }
  }
  return out;
}

}  // namespace

int cmd_verify(const SweepConfig& config, const std::vector<fs::path>& instances, std::ostream& report,
               std::ostream& log) {
  config.validate();
  std::vector<LoadedInstance> loaded;
  for (const auto& path : instances) {
    try {
      loaded.push_back(load_instance(path));
    } catch (const std::exception& e) {
      log << "error: " << path.string() << ": " << e.what() << "\n";
      return 2;
    }
  }
  std::sort(loaded.begin(), loaded.end(), [](const auto& x, const auto& y) { return x.id < y.id; });

  std::vector<CheckOutcome> results(loaded.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < loaded.size(); i = next++) results[i] = run_checks(loaded[i], config);
  };
  std::vector<std::thread> pool;
  const std::size_t n_workers = std::min(config.workers, std::max<std::size_t>(loaded.size(), 1));
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  bool ok = true;
  std::size_t failures = 0;
  for (const auto& r : results) {
    for (const auto& line : r.lines) report << line << "\n";
    if (!r.passed) {
      ok = false;
      ++failures;
    }
  }
  report.flush();
  log << loaded.size() << " instances, " << failures << " with failing checks\n";
  return ok ? 0 : 1;
}

void cmd_report(const fs::path& report, std::ostream& csv) {
  std::ifstream in(report);
  if (!in) throw ConfigError("missing report '" + report.string() + "'");

  struct Metric {
    double value;
    std::string instance;
  };
  // Keyed by (p, q); q ordered with inf last.
  struct Key {
    double p;
    Exponent q;
    bool operator<(const Key& o) const {
      if (p != o.p) return p < o.p;
      return q < o.q;
    }
  };
  std::map<Key, std::map<std::string, Metric>> table;
  auto keep = [](std::map<std::string, Metric>& row, const std::string& name, double v, const std::string& id,
                 bool take_max) {
    auto it = row.find(name);
    if (it == row.end() || (take_max ? v > it->second.value : v < it->second.value)) row[name] = {v, id};
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw ParseError("report line " + std::to_string(lineno) + " is not JSON");
    }
    const Key key{j.at("p").get<double>(), Exponent::parse(j.at("q").get<std::string>())};
    const auto id = j.at("instance").get<std::string>();
    const auto check = j.at("check").get<std::string>();
    auto& row = table[key];
    if (check == "sandwich" && j.contains("B") && j["B"].get<double>() > 0.0) {
      keep(row, "max_A_lower_over_B", j["A_lower"].get<double>() / j["B"].get<double>(), id, true);
    } else if (check == "packing" && j.contains("worst_ratio")) {
      keep(row, "max_packing_ratio", j["worst_ratio"].get<double>(), id, true);
    } else if (check == "proof_chain" && j.contains("min_slack") && j["min_slack"].is_number()) {
      keep(row, "worst_chain_slack", j["min_slack"].get<double>(), id, false);
    }
    if (!j.at("pass").get<bool>()) keep(row, "failures", row.contains("failures") ? row["failures"].value + 1 : 1, id, true);
  }

  csv << "p,q,metric,value,instance_id\n";
  for (const auto& [key, row] : table) {
    for (const char* name : {"max_A_lower_over_B", "max_packing_ratio", "worst_chain_slack", "failures"}) {
      auto it = row.find(name);
      if (it == row.end()) continue;
      csv << number_text(key.p) << "," << key.q.to_string() << "," << name << "," << number_text(it->second.value)
          << "," << it->second.instance << "\n";
    }
  }
}

}  // namespace mgmax::cli
