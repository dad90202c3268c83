#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "irswb/bounds.hpp"
#include "irswb/canon.hpp"
#include "irswb/classifier.hpp"
#include "irswb/errors.hpp"
#include "irswb/group_io.hpp"
#include "irswb/irs.hpp"
#include "irswb/montecarlo.hpp"

using namespace irswb;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kCounterexample = 1;
constexpr int kUsage = 2;
constexpr int kFormatVersion = 1;
constexpr std::uint64_t kDefaultSeed = 20240607;
// Slack in the exponent of the decay curve printed next to simulation estimates.
constexpr double kDecaySlack = 0.01;

struct Table {
  std::string command;
  json params = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows = {};
};

std::string csv_field(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (!v.is_string()) return v.dump();
  const auto s = v.get<std::string>();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string render(const Table& t, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    json rows = json::array();
    for (const auto& r : t.rows) {
      json o = json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) o[t.columns[i]] = r[i];
      rows.push_back(std::move(o));
    }
    json doc = {{"command", t.command}, {"version", kFormatVersion}, {"params", t.params}, {"rows", rows}};
    os << doc.dump(2) << "\n";
    return os.str();
  }
  os << "# irswb " << t.command << " v" << kFormatVersion << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
    os << "\n";
  }
  return os.str();
}

void emit(const Table& t, const std::string& format, const std::string& out) {
  const auto text = render(t, format);
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ParseError("cannot write " + out);
  f << text;
}

std::string set_string(const PointSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + std::to_string(s[i]);
  return out + "}";
}

std::string scheme_string(const ColourScheme& s) {
  std::string out;
  for (const auto& g : s.group().generators()) {
    out += out.empty() ? "[" : ";[";
    for (std::size_t x = 0; x < g.degree(); ++x) out += (x ? " " : "") + std::to_string(g.image(static_cast<Point>(x)));
    out += "]";
  }
  return out.empty() ? "trivial" : out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// A single group object, an array of them, or {"groups": [...]}.
std::vector<GeneratedGroup> read_groups(const std::string& path) {
  json j = read_json_file(path);
  if (j.is_object() && j.contains("groups")) j = j["groups"];
  std::vector<GeneratedGroup> out;
  if (j.is_array())
    for (const auto& g : j) out.push_back(group_from_json(g));
  else
    out.push_back(group_from_json(j));
  return out;
}

ColouringRule parse_rule(const std::string& s) {
  if (s == "orbit_sorted") return ColouringRule::orbit_sorted;
  if (s == "natural") return ColouringRule::natural;
  throw ParseError("unknown colouring rule " + s);
}

double log_add(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

struct Options {
  std::size_t d = 2, q = 2, n = 2, degree = 3, delta = 0;
  std::vector<std::size_t> k{2};
  std::uint64_t trials = 10000, seed = kDefaultSeed;
  std::size_t workers = 1;
  std::optional<double> C, c;
  double eps = 0.1;
  std::string out, format = "csv";
  std::string experiment, group_file, scheme_file, rule = "orbit_sorted";
  std::size_t label = 0;
  Point colour_u = 0, colour_v = 0;
};

std::optional<BoundParams> bound_params(const Options& o, std::size_t d) {
  if (o.C.has_value() != o.c.has_value()) throw DomainError("--cc-C and --cc-c go together");
  if (!o.C) return std::nullopt;
  BoundParams p{d, o.q, *o.C, *o.c, o.eps};
  p.validate();
  return p;
}

json params_json(const Options& o, std::initializer_list<const char*> keys) {
  json all = {{"d", o.d},         {"q", o.q},         {"n", o.n},         {"k", o.k},
              {"degree", o.degree}, {"delta", o.delta}, {"trials", o.trials}, {"seed", o.seed},
              {"experiment", o.experiment}, {"label", o.label}, {"rule", o.rule},
              {"colour_u", o.colour_u}, {"colour_v", o.colour_v}, {"eps", o.eps}};
  json p = json::object();
  for (const char* key : keys) p[key] = all[key];
  if (o.C) {
    p["C"] = *o.C;
    p["c"] = *o.c;
  }
  return p;
}

int cmd_verify_counting(const Options& o) {
  if (o.degree > 5) throw DomainError("verify-counting supports degree <= 5");
  Table t{"verify-counting", params_json(o, {"degree"}),
          {"lemma", "degree", "gamma_id", "U", "V", "detail", "lhs_num", "lhs_den", "rhs_num", "rhs_den", "holds"}};
  const CountingRow* first_failure = nullptr;
  const auto rows = counting_sweep(o.degree);
  for (const auto& r : rows) {
    t.rows.push_back({r.lemma, r.degree, r.gamma_id, set_string(r.U), set_string(r.V), r.detail,
                      numerator_of(r.check.lhs).str(), denominator_of(r.check.lhs).str(),
                      numerator_of(r.check.rhs).str(), denominator_of(r.check.rhs).str(), r.check.holds});
    if (!r.check.holds && !first_failure) first_failure = &r;
  }
  emit(t, o.format, o.out);
  if (first_failure) {
    std::cerr << "counterexample: " << first_failure->lemma << " gamma " << first_failure->gamma_id << " U "
              << set_string(first_failure->U) << " V " << set_string(first_failure->V) << " lhs "
              << to_string(first_failure->check.lhs) << " rhs " << to_string(first_failure->check.rhs) << "\n";
    return kCounterexample;
  }
  return kOk;
}

int cmd_simulate(const Options& o) {
  const auto& e = o.experiment;
  if (e != "treematch" && e != "cut1" && e != "cut2" && e != "colormatch")
    throw InvalidExperiment("unknown experiment '" + e + "'");
  std::optional<ColourScheme> scheme;
  std::size_t d = o.d;
  if (e == "colormatch") {
    scheme = o.scheme_file.empty() ? ColourScheme::full(o.d) : scheme_from_json(read_json_file(o.scheme_file));
    d = scheme->d();
  }
  const auto bp = bound_params(o, d);
  Table t{"simulate", params_json(o, {"experiment", "d", "q", "n", "k", "trials", "seed"}),
          {"experiment", "d", "q", "n", "k", "scheme", "trials", "seed", "successes", "p_hat", "stderr"}};
  if (scheme) {
    t.params["scheme"] = scheme_to_json(*scheme);
    t.params["label"] = o.label;
    t.params["colour_u"] = o.colour_u;
    t.params["colour_v"] = o.colour_v;
    t.params["rule"] = o.rule;
  }
  if (bp) t.columns.push_back("bound_value");
  const RunOptions run{o.trials, o.seed, o.workers};
  for (std::size_t k : o.k) {
    Estimate est;
    if (e == "treematch") est = estimate_treematch(d, o.n, k, run);
    if (e == "cut1") est = estimate_cut1(d, o.q, o.n, k, run);
    if (e == "cut2") est = estimate_cut2(d, o.q, o.n, k, run);
    if (e == "colormatch")
      est = estimate_colormatch(*scheme, o.n, k, o.label, run, o.colour_u, o.colour_v, parse_rule(o.rule));
    for (const auto& w : est.warnings) std::cerr << "warning: " << w << "\n";
    std::vector<json> row{e, d, e == "treematch" || e == "colormatch" ? json(nullptr) : json(o.q), o.n, k,
                          scheme ? scheme_string(*scheme) : std::string("full"), est.trials, est.seed,
                          est.successes, est.p_hat, est.std_error};
    if (bp) {
      const double exponent = static_cast<double>(d - 1) / (2.0 * static_cast<double>(d)) - kDecaySlack;
      row.push_back(bp->C * std::exp(-bp->c * std::pow(static_cast<double>(k), exponent)));
    }
    t.rows.push_back(std::move(row));
  }
  emit(t, o.format, o.out);
  return kOk;
}

int cmd_census(const Options& o) {
  const bool coloured = !o.scheme_file.empty();
  std::optional<Canonicalizer> mode;
  std::optional<std::size_t> label;
  Point parent = kNoColour;
  if (coloured) {
    mode = Canonicalizer::coloured(scheme_from_json(read_json_file(o.scheme_file)), parse_rule(o.rule));
    label = o.label;
    parent = o.colour_u;
  } else {
    mode = Canonicalizer::full(o.d);
  }
  const auto census = orbit_census(*mode, Cone{o.n, parent}, o.k.front(), label);
  Table t{"census", params_json(o, {"d", "n", "k"}),
          {"d", "depth", "k", "mode", "class_id", "count", "description"}};
  if (coloured) {
    t.params["scheme"] = scheme_to_json(*mode->scheme());
    t.params["label"] = o.label;
    t.params["colour_u"] = o.colour_u;
    t.params["rule"] = o.rule;
  }
  for (const auto& c : census.classes)
    t.rows.push_back({mode->d(), census.depth, census.k, coloured ? "coloured" : "full", c.class_id, c.count,
                      c.description});
  emit(t, o.format, o.out);
  return kOk;
}

int cmd_classify(const Options& o) {
  if (o.group_file.empty()) throw ParseError("classify needs --group");
  const auto groups = read_groups(o.group_file);
  const auto bp = bound_params(o, o.d);
  Table t{"classify", params_json(o, {"delta", "q"}),
          {"group_id", "degree", "t_max", "case", "in_Xi", "delta", "witness_size"}};
  if (bp) t.columns.push_back("bound_log");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& G = groups[i];
    const auto cls = classify(G, o.delta, o.q);
    std::vector<json> row{i, G.degree(), cls.profile.t_max, to_string(cls.group_case), cls.xi.has_value(), o.delta,
                          cls.xi ? json(cls.xi->U.size()) : json(nullptr)};
    if (bp) {
      const auto b = classification_log_bound(cls, *bp, G.degree());
      row.push_back(b ? json(*b) : json(nullptr));
    }
    t.rows.push_back(std::move(row));
  }
  emit(t, o.format, o.out);
  return kOk;
}

int cmd_bounds(const Options& o) {
  const auto bp = bound_params(o, o.d);
  if (!bp) throw DomainError("bounds needs --cc-C and --cc-c");
  if (o.n == 0) throw DomainError("--n must be at least 1");
  Table t{"bounds", params_json(o, {"d", "q", "n", "eps"}),
          {"n", "k_n", "Delta_n", "alpha", "case", "bound_value_log", "partial_sum_log"}};
  const std::vector<std::string> cases{"I", "II", "III", "III_aggregate", "aggregate"};
  std::vector<double> sums(cases.size(), -INFINITY);
  for (std::size_t n = 1; n <= o.n; ++n) {
    const double k_n = level_size(*bp, n);
    const double delta = delta_n(*bp, n);
    const std::vector<double> values{log_case_one_by_gap(*bp, k_n, delta),
                                     log_case_bound(BoundCase::II, *bp, k_n, k_n),
                                     log_case_bound(BoundCase::III, *bp, k_n, k_n),
                                     log_case_bound(BoundCase::III_aggregate, *bp, k_n, k_n),
                                     log_aggregate_term(*bp, n)};
    for (std::size_t i = 0; i < cases.size(); ++i) {
      sums[i] = log_add(sums[i], values[i]);
      t.rows.push_back({n, k_n, delta, bp->alpha(), cases[i], values[i], sums[i]});
    }
  }
  emit(t, o.format, o.out);
  return kOk;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("IRSWB_WORKERS")) {
    try {
      const auto w = std::stoul(env);
      if (w > 0) return w;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring IRSWB_WORKERS=" << env << "\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite verification workbench for stabilizer-containment estimates"};
  app.require_subcommand(1);
  Options o;
  o.workers = default_workers();
  double C = 0, c = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output file (stdout when omitted)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto constants = [&](CLI::App* sub) {
    sub->add_option("--cc-C", C, "Constant C of the decay bounds")->check(CLI::PositiveNumber);
    sub->add_option("--cc-c", c, "Constant c of the decay bounds")->check(CLI::PositiveNumber);
  };

  auto* verify = app.add_subcommand("verify-counting", "Exhaustive counting-lemma checks over Sym(degree)");
  verify->add_option("--degree", o.degree, "Degree, at most 5")->required();
  common(verify);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a matching probability");
  simulate->add_option("experiment", o.experiment, "treematch, cut1, cut2 or colormatch")->required();
  simulate->add_option("--d", o.d, "Branching degree");
  simulate->add_option("--q", o.q, "Root degree (cut1, cut2)");
  simulate->add_option("--n", o.n, "Cone depth");
  simulate->add_option("--k", o.k, "Subset size, comma separated for several rows")->delimiter(',');
  simulate->add_option("--trials", o.trials, "Number of trials");
  simulate->add_option("--seed", o.seed, "Seed");
  simulate->add_option("--workers", o.workers, "Worker threads (default IRSWB_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--scheme", o.scheme_file, "Colour scheme JSON (colormatch; default full)");
  simulate->add_option("--label", o.label, "Orbit label of the sampled leaves (colormatch)");
  simulate->add_option("--colour-u", o.colour_u, "Parent colour of the first cone (colormatch)");
  simulate->add_option("--colour-v", o.colour_v, "Parent colour of the second cone (colormatch)");
  simulate->add_option("--rule", o.rule, "orbit_sorted or natural");
  constants(simulate);
  common(simulate);

  auto* census = app.add_subcommand("census", "Orbit census of k-subsets of a cone");
  census->add_option("--d", o.d, "Branching degree (full mode)");
  census->add_option("--n", o.n, "Cone depth");
  census->add_option("--k", o.k, "Subset size")->expected(1);
  census->add_option("--scheme", o.scheme_file, "Colour scheme JSON; coloured mode when given");
  census->add_option("--label", o.label, "Restrict to leaves of this orbit label (coloured mode)");
  census->add_option("--colour-u", o.colour_u, "Parent colour of the cone (coloured mode)");
  census->add_option("--rule", o.rule, "orbit_sorted or natural");
  common(census);

  auto* cls = app.add_subcommand("classify", "Case of each group in a group file");
  cls->add_option("--group", o.group_file, "Group JSON: one group, an array, or {\"groups\": [...]}")->required();
  cls->add_option("--delta", o.delta, "Delta");
  cls->add_option("--q", o.q, "Root degree q");
  cls->add_option("--d", o.d, "Branching degree for the bound column");
  cls->add_option("--eps", o.eps, "Epsilon of the bound parameters");
  constants(cls);
  common(cls);

  auto* bounds = app.add_subcommand("bounds", "Case bounds and partial sums for n = 1..N");
  bounds->add_option("--d", o.d, "Branching degree");
  bounds->add_option("--q", o.q, "Root degree q");
  bounds->add_option("--n", o.n, "Largest level N")->required();
  bounds->add_option("--eps", o.eps, "Epsilon of the bound parameters");
  constants(bounds);
  common(bounds);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  for (auto* sub : {simulate, cls, bounds}) {
    if (!sub->parsed()) continue;
    const bool hasC = sub->count("--cc-C") > 0, hasc = sub->count("--cc-c") > 0;
    if (hasC) o.C = C;
    if (hasc) o.c = c;
  }

  try {
    if (verify->parsed()) return cmd_verify_counting(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (census->parsed()) return cmd_census(o);
    if (cls->parsed()) return cmd_classify(o);
    if (bounds->parsed()) return cmd_bounds(o);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
