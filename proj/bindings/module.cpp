#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mgt/cocycle.hpp"
#include "mgt/group.hpp"
#include "mgt/groupoid.hpp"
#include "mgt/report.hpp"
#include "mgt/shift.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// the python boundary is JSON text; the wrapper package turns it into dicts
std::string run_experiment(const std::string& config_text) {
  const auto rep = mgt::run(mgt::config_from_json(json::parse(config_text)));
  return to_json(rep).dump();
}

std::string acceptance_report(const std::string& filter, bool mutate) {
  mgt::AcceptanceOptions opt;
  opt.filter = filter;
  opt.mutate = mutate;
  return to_json(mgt::acceptance(opt)).dump();
}

std::string normalize_word(const std::string& group_text, const std::string& word) {
  auto g = mgt::Group::from_json_text(group_text);
  return g->parse_word(word).word();
}

std::vector<std::string> ball_words(const std::string& group_text, unsigned radius) {
  auto g = mgt::Group::from_json_text(group_text);
  std::vector<std::string> out;
  for (const auto& e : g->ball(radius)) out.push_back(e.word());
  return out;
}

double shannon(const std::vector<std::pair<long long, long long>>& weights) {
  std::vector<mgt::Rat> ws;
  std::vector<std::string> syms;
  for (const auto& [n, d] : weights) {
    ws.emplace_back(n, d);
    syms.push_back(std::to_string(syms.size()));
  }
  return mgt::shannon_entropy(*mgt::Alphabet::weighted(syms, ws));
}

std::string validate_groupoid(const std::string& groupoid_text) {
  const auto g = mgt::FiniteGroupoid::from_json(json::parse(groupoid_text));
  const auto rep = mgt::validate(g);
  return json{{"ok", rep.ok},
              {"problems", rep.problems},
              {"n_objects", g.n_objects()},
              {"n_morphisms", g.n_morphisms()},
              {"principal", rep.principal},
              {"ergodic", rep.ergodic}}
      .dump();
}

std::string solve_cocycle(const std::string& cocycle_text, std::size_t cap) {
  const auto c = mgt::action_cocycle_from_json(json::parse(cocycle_text));
  const auto r = mgt::cohomologous_to_hom_search(c, cap);
  json out{{"nodes", r.nodes}};
  switch (r.verdict) {
    case mgt::SolveResult::Verdict::Found:
      out["verdict"] = "found";
      out["rho"] = r.rho;
      out["f"] = r.f;
      break;
    case mgt::SolveResult::Verdict::None:
      out["verdict"] = "none";
      break;
    case mgt::SolveResult::Verdict::Cap:
      out["verdict"] = "cap";
      break;
  }
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_mgtkit, m) {
  m.doc() = "measured-group toolkit core";
  m.attr("__version__") = mgt::MGTKIT_VERSION;
  m.def("run_experiment", &run_experiment, py::arg("config_json"),
        "Run one experiment config (JSON text), return the report as JSON text");
  m.def("acceptance_report", &acceptance_report, py::arg("filter") = "",
        py::arg("mutate") = false,
        "Run acceptance criteria matching the filter, return JSON text");
  m.def("normalize_word", &normalize_word, py::arg("group_json"), py::arg("word"),
        "Reduce a word to its normal form in the given group");
  m.def("ball_words", &ball_words, py::arg("group_json"), py::arg("radius"),
        "Words of the closed ball in the word metric");
  m.def("shannon_entropy", &shannon, py::arg("weights"),
        "Entropy in nats of a rational weight vector given as (num, den) pairs");
  m.def("validate_groupoid", &validate_groupoid, py::arg("groupoid_json"),
        "Validate a finite measured groupoid, return a JSON verdict");
  m.def("solve_cocycle", &solve_cocycle, py::arg("cocycle_json"),
        py::arg("cap") = 1000000,
        "Search for a homomorphism cohomologous to the given action cocycle");
  py::register_exception<mgt::ConfigInvalid>(m, "ConfigInvalid", PyExc_ValueError);
}
