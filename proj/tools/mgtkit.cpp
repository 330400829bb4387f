#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mgt/errors.hpp"
#include "mgt/report.hpp"

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mgt::ConfigInvalid("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// flag values that name groups or groupoids accept a path or inline JSON
std::string maybe_file(const std::string& s) {
  return std::filesystem::exists(s) ? read_file(s) : s;
}

struct Common {
  std::string config_path, out;
  std::uint64_t seed = 0;
  unsigned radius = 0;
  std::uint64_t samples = 0;
  CLI::Option *seed_opt = nullptr, *radius_opt = nullptr, *samples_opt = nullptr,
              *out_opt = nullptr, *config_opt = nullptr;

  void attach(CLI::App* cmd) {
    config_opt = cmd->add_option("--config", config_path,
                                 "experiment config JSON file; flags override it");
    seed_opt = cmd->add_option("--seed", seed, "root RNG seed");
    radius_opt = cmd->add_option("--radius", radius, "ball radius (0 = default)");
    samples_opt = cmd->add_option("--samples", samples, "sample count (0 = default)");
    out_opt = cmd->add_option("--out", out, "report path (.json or .csv)");
  }

  // starts from --config when present, else from the given kind
  mgt::ExperimentConfig base(const std::string& kind) const {
    mgt::ExperimentConfig c;
    if (!config_path.empty()) {
      c = mgt::config_from_json(json::parse(read_file(config_path)));
    } else {
      c.kind = kind;
    }
    if (seed_opt->count()) c.seed = seed;
    if (radius_opt->count()) c.radius = radius;
    if (samples_opt->count()) c.samples = samples;
    if (out_opt->count()) c.out = out;
    return c;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw mgt::ConfigInvalid("cannot write: " + path);
  f << text;
}

int emit(const mgt::RunReport& rep) {
  const std::string path = rep.config.value("out", std::string());
  if (path.empty()) {
    std::cout << to_json(rep).dump(2) << "\n";
  } else if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
    write_text(path, to_csv(rep));
    std::cout << (rep.pass ? "pass" : "FAIL") << "  " << path << "\n";
  } else {
    write_text(path, to_json(rep).dump(2) + "\n");
    std::cout << (rep.pass ? "pass" : "FAIL") << "  " << path << "\n";
  }
  return rep.pass ? 0 : 1;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

json parse_weights(const std::string& s) {
  json out = json::array();
  for (const auto& tok : split_csv(s)) {
    const auto slash = tok.find('/');
    const long long num = std::stoll(tok.substr(0, slash));
    const long long den = slash == std::string::npos ? 1 : std::stoll(tok.substr(slash + 1));
    out.push_back(json::array({num, den}));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"measured-group toolkit: lifts, groupoids, cocycles, entropy"};
  app.require_subcommand(1);

  // lift ----------------------------------------------------------------
  auto* lift = app.add_subcommand(
      "lift", "lifted finitary maps: equivariance defects and cylinder statistics");
  Common lift_c;
  lift_c.attach(lift);
  std::string lift_mode = "verify", lift_group, lift_inner, lift_delta, lift_window;
  unsigned lift_factor = 0;
  std::uint64_t lift_seeds = 0;
  lift->add_option("--mode", lift_mode, "verify | cylinder")
      ->check(CLI::IsMember({"verify", "cylinder"}));
  lift->add_option("--group", lift_group, "ambient free product, JSON text or file");
  lift->add_option("--subgroup-factor", lift_factor, "index of the lifted-along factor");
  lift->add_option("--inner", lift_inner,
                   "identity | odometer | bijection:<syms> | scramble:<json-or-file>");
  lift->add_option("--delta", lift_delta, "group word to test equivariance against");
  lift->add_option("--seeds", lift_seeds, "number of sampled configurations");
  lift->add_option("--window", lift_window, "cylinder window, comma-separated words");

  // groupoid ------------------------------------------------------------
  auto* grpd = app.add_subcommand(
      "groupoid", "finite measured groupoids: validation and independence checks");
  Common grpd_c;
  grpd_c.attach(grpd);
  std::string grpd_mode = "validate", grpd_builtin, grpd_file;
  std::uint64_t grpd_instances = 0, grpd_max_points = 0;
  grpd->add_option("--mode", grpd_mode, "validate | indep")
      ->check(CLI::IsMember({"validate", "indep"}));
  grpd->add_option("--builtin", grpd_builtin, "full:N | partition:c0,c1,... | wreath:N");
  grpd->add_option("--file", grpd_file, "groupoid JSON file");
  grpd->add_option("--instances", grpd_instances, "random instances for indep");
  grpd->add_option("--max-points", grpd_max_points, "max base set size for indep");

  // cocycle -------------------------------------------------------------
  auto* coc = app.add_subcommand(
      "cocycle", "cocycle laboratory: cohomology solving and tree cocycles");
  Common coc_c;
  coc_c.attach(coc);
  std::string coc_mode = "solve";
  std::uint64_t coc_instances = 0, coc_max_points = 0, coc_max_target = 0, coc_cap = 0;
  std::uint64_t coc_depth = 0, coc_total = 0, coc_labelings = 0, coc_flips = 0;
  coc->add_option("--mode", coc_mode, "solve | tree")
      ->check(CLI::IsMember({"solve", "tree"}));
  coc->add_option("--instances", coc_instances, "planted instances for solve");
  coc->add_option("--max-points", coc_max_points, "max action points for solve");
  coc->add_option("--max-target", coc_max_target, "max target group order for solve");
  coc->add_option("--cap", coc_cap, "search node cap for solve");
  coc->add_option("--depth", coc_depth, "tree truncation depth");
  coc->add_option("--total-length", coc_total, "max combined word length per pair");
  coc->add_option("--labelings", coc_labelings, "random edge labelings per target");
  coc->add_option("--flip-labelings", coc_flips, "labelings probed for flip sensitivity");

  // entropy -------------------------------------------------------------
  auto* ent = app.add_subcommand("entropy", "alphabet entropy, closed form vs sampled");
  Common ent_c;
  ent_c.attach(ent);
  std::string ent_weights;
  ent->add_option("--weights", ent_weights, "comma-separated rationals, e.g. 1/4,3/4");

  // accept --------------------------------------------------------------
  auto* acc = app.add_subcommand("accept", "run the acceptance criteria");
  std::string acc_filter, acc_out;
  bool acc_mutate = false;
  acc->add_option("--filter", acc_filter, "only criteria whose name contains this");
  acc->add_option("--out", acc_out, "write the aggregated JSON report here");
  acc->add_flag("--mutate", acc_mutate, "plant a deliberate fault (self-test of the suite)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (lift->parsed()) {
      auto c = lift_c.base(lift_mode == "cylinder" ? "cylinder" : "lift-verify");
      if (!lift_group.empty()) c.params["group"] = maybe_file(lift_group);
      if (lift->count("--subgroup-factor")) c.params["subgroup_factor"] = lift_factor;
      if (!lift_inner.empty()) c.params["inner"] = lift_inner;
      if (!lift_delta.empty()) c.params["delta"] = lift_delta;
      if (lift_seeds) c.params["seeds"] = lift_seeds;
      if (!lift_window.empty()) c.params["window"] = split_csv(lift_window);
      return emit(mgt::run(c));
    }
    if (grpd->parsed()) {
      auto c = grpd_c.base(grpd_mode == "indep" ? "indep-crossval" : "groupoid-build");
      if (!grpd_builtin.empty()) c.params["builtin"] = grpd_builtin;
      if (!grpd_file.empty()) c.params["groupoid"] = json::parse(read_file(grpd_file));
      if (grpd_instances) c.params["instances"] = grpd_instances;
      if (grpd_max_points) c.params["max_points"] = grpd_max_points;
      return emit(mgt::run(c));
    }
    if (coc->parsed()) {
      auto c = coc_c.base(coc_mode == "tree" ? "tree-cocycle" : "cocycle-solve");
      if (coc_instances) c.params["instances"] = coc_instances;
      if (coc_max_points) c.params["max_points"] = coc_max_points;
      if (coc_max_target) c.params["max_target"] = coc_max_target;
      if (coc_cap) c.params["cap"] = coc_cap;
      if (coc_depth) c.params["depth"] = coc_depth;
      if (coc_total) c.params["total_length"] = coc_total;
      if (coc_labelings) c.params["labelings"] = coc_labelings;
      if (coc_flips) c.params["flip_labelings"] = coc_flips;
      return emit(mgt::run(c));
    }
    if (ent->parsed()) {
      auto c = ent_c.base("entropy");
      if (!ent_weights.empty()) c.params["weights"] = parse_weights(ent_weights);
      return emit(mgt::run(c));
    }
    // accept
    mgt::AcceptanceOptions opt;
    opt.filter = acc_filter;
    opt.mutate = acc_mutate;
    const auto rep = mgt::acceptance(opt);
    for (const auto& cr : rep.criteria)
      std::printf("%s  %-28s (%.2f s)\n", cr.pass ? "PASS" : "FAIL", cr.name.c_str(),
                  cr.seconds);
    std::printf("%s  %zu criteria\n", rep.all_pass ? "PASS" : "FAIL",
                rep.criteria.size());
    if (!acc_out.empty()) write_text(acc_out, to_json(rep).dump(2) + "\n");
    return rep.all_pass ? 0 : 1;
  } catch (const mgt::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mgt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
