#include "recomb/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "recomb/dynamics.hpp"
#include "recomb/entropy.hpp"
#include "recomb/inequality.hpp"
#include "recomb/random.hpp"

namespace recomb::lab {

using Json = nlohmann::ordered_json;

std::string format_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  const auto& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw InvalidArgument("table row has the wrong number of cells");
  rows_.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::ostringstream out;
  out << "# schema_version=" << kSchemaVersion << "\n";
  for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_cell(row[c]);
    out << "\n";
  }
  return out.str();
}

bool ExperimentResult::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

void ExperimentResult::check(std::string name, bool ok, std::string detail) {
  checks.push_back({std::move(name), ok, std::move(detail)});
}

Json ExperimentResult::to_json(const Json& config) const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["experiment"] = experiment;
  j["claim"] = claim;
  j["passed"] = passed();
  j["config"] = config;
  j["checks"] = Json::array();
  for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["summary"] = summary;
  return j;
}

std::string failure_report(const ExperimentResult& result) {
  std::string out;
  for (const auto& c : result.checks) {
    if (!c.passed) out += "  FAILED " + result.experiment + ": " + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")") + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schema helpers.

namespace {

void require_keys(const Json& c, const std::set<std::string>& allowed, const std::set<std::string>& required) {
  if (!c.is_object()) throw ConfigError("experiment entry must be a JSON object");
  for (const auto& [key, value] : c.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key \"" + key + "\" for experiment " + c.value("experiment", "?"));
  }
  for (const auto& key : required) {
    if (!c.contains(key)) throw ConfigError("missing key \"" + key + "\" for experiment " + c.value("experiment", "?"));
  }
}

long long get_int(const Json& c, const std::string& key, long long fallback, long long lo, long long hi) {
  if (!c.contains(key)) return fallback;
  const auto& v = c.at(key);
  if (!v.is_number_integer()) throw ConfigError("\"" + key + "\" must be an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) {
    throw ConfigError("\"" + key + "\" = " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  return x;
}

double get_double(const Json& c, const std::string& key, double fallback, double lo, double hi) {
  if (!c.contains(key)) return fallback;
  const auto& v = c.at(key);
  if (!v.is_number()) throw ConfigError("\"" + key + "\" must be a number");
  const double x = v.get<double>();
  if (!(x >= lo && x <= hi)) throw ConfigError("\"" + key + "\" outside its allowed range");
  return x;
}

std::string get_string(const Json& c, const std::string& key, const std::string& fallback,
                       const std::set<std::string>& choices) {
  if (!c.contains(key)) return fallback;
  if (!c.at(key).is_string()) throw ConfigError("\"" + key + "\" must be a string");
  const auto s = c.at(key).get<std::string>();
  if (!choices.count(s)) throw ConfigError("\"" + key + "\" has unsupported value \"" + s + "\"");
  return s;
}

std::uint64_t get_seed(const Json& c) {
  if (!c.contains("seed")) return kDefaultSeed;
  if (!c.at("seed").is_number_unsigned()) throw ConfigError("\"seed\" must be a nonnegative integer");
  return c.at("seed").get<std::uint64_t>();
}

ProductSpace space_from_config(const Json& c, int n) {
  if (!c.contains("alphabet")) return ProductSpace::binary(n);
  const auto& a = c.at("alphabet");
  if (a.is_number_integer()) {
    return ProductSpace::uniform_alphabet(n, static_cast<int>(get_int(c, "alphabet", 2, 1, 16)));
  }
  if (!a.is_array() || a.size() != static_cast<std::size_t>(n)) {
    throw ConfigError("\"alphabet\" must be an integer or an array of n integers");
  }
  std::vector<int> sizes;
  for (const auto& x : a) {
    if (!x.is_number_integer() || x.get<int>() < 1 || x.get<int>() > 16) throw ConfigError("alphabet sizes must be in [1, 16]");
    sizes.push_back(x.get<int>());
  }
  return ProductSpace(sizes);
}

const std::set<std::string> kModels{"single_site", "one_point", "uniform", "bernoulli"};

ExperimentResult run_kappa_scan(const Json& c) {
  require_keys(c, {"experiment", "name", "seed", "model", "q", "n", "samples", "alphabet", "measure", "kappa"},
               {"model", "n"});
  const int n = static_cast<int>(get_int(c, "n", 0, 2, 12));
  const auto nu = law_from_config(c, n);
  const auto samples = static_cast<int>(get_int(c, "samples", 1000, 1, 10000000));
  const auto seed = get_seed(c);
  const auto space = space_from_config(c, n);
  const auto kind = get_string(c, "measure", "uniform", {"uniform", "random"});
  std::mt19937_64 rng(derive_seed(seed, "measure"));
  const auto mu = kind == "uniform" ? ProductMeasure::uniform(space) : random_product_measure(space, rng);
  const auto scan = kappa_scan(nu, mu, samples, seed);

  ExperimentResult r;
  r.experiment = "kappa_scan";
  r.claim = "subadditivity ratios of IPF densities stay below 1 - kappa";
  r.table = Table({"sample", "ratio"});
  for (std::size_t i = 0; i < scan.ratios.size(); ++i) r.table.add({static_cast<long long>(i), scan.ratios[i]});
  // A claimed constant replaces the theoretical one in the check.
  const double kappa = get_double(c, "kappa", kappa_theoretical(nu), 0.0, 1.0);
  const double bound = 1.0 - kappa;
  r.summary["kappa"] = kappa;
  r.summary["bound"] = bound;
  r.summary["max_ratio"] = scan.max_ratio;
  r.summary["identical_copies_ratio"] = scan.identical_copies_ratio;
  char detail[96];
  std::snprintf(detail, sizeof detail, "max %.17g, bound %.17g", scan.max_ratio, bound);
  r.check("max ratio <= 1 - kappa + 1e-9", scan.max_ratio <= bound + 1e-9, detail);
  return r;
}

ExperimentResult run_sharp_test(const Json& c) {
  require_keys(c, {"experiment", "name", "seed", "model", "q", "n", "n_range"}, {"model"});
  int lo = 0, hi = 0;
  if (c.contains("n_range")) {
    const auto& range = c.at("n_range");
    if (c.contains("n")) throw ConfigError("give either \"n\" or \"n_range\"");
    if (!range.is_array() || range.size() != 2 || !range[0].is_number_integer() || !range[1].is_number_integer()) {
      throw ConfigError("\"n_range\" must be [lo, hi]");
    }
    lo = range[0].get<int>();
    hi = range[1].get<int>();
  } else {
    lo = hi = static_cast<int>(get_int(c, "n", 8, 2, kMaxShearerSites));
  }
  if (lo < 2 || hi > kMaxShearerSites || lo > hi) throw ConfigError("sharp_test needs 2 <= lo <= hi <= 40");

  ExperimentResult r;
  r.experiment = "sharp_test";
  r.claim = "sharp test density: kappa <= D/Ent, approaching 4(1 - Delta)/n";
  r.table = Table({"n", "model", "q", "kappa", "ratio", "delta_nu", "asymptote", "ent", "production"});
  double gap = 0.0;
  for (int n = lo; n <= hi; ++n) {
    const auto nu = law_from_config(c, n);
    const auto rep = sharp_test_closed_form(n, nu);
    gap = std::max(gap, rep.kappa - rep.ratio);
    r.table.add({static_cast<long long>(n), rep.model, rep.q, rep.kappa, rep.ratio, rep.delta_nu, rep.asymptote,
                 rep.ent, rep.production});
  }
  char detail[64];
  std::snprintf(detail, sizeof detail, "worst kappa - ratio %.3e", gap);
  r.check("kappa <= D/Ent", gap <= 1e-15, detail);
  return r;
}

ExperimentResult run_evolve(const Json& c) {
  require_keys(c,
               {"experiment", "name", "seed", "model", "q", "n", "alphabet", "mode", "t_end", "dt", "snapshot_every",
                "steps", "initial", "alpha", "states"},
               {"model", "n"});
  const int n = static_cast<int>(get_int(c, "n", 0, 1, 12));
  const auto nu = law_from_config(c, n);
  const auto space = space_from_config(c, n);
  const auto mode = get_string(c, "mode", "continuous", {"continuous", "discrete"});
  const auto initial = get_string(c, "initial", "random", {"random", "identical_copies"});
  const double alpha = get_double(c, "alpha", 1.0, 1e-3, 1e3);
  if (c.contains("states") && !c.at("states").is_boolean()) throw ConfigError("\"states\" must be true or false");
  const bool states = c.value("states", false);

  Distribution p0 = Distribution::uniform(space);
  if (initial == "random") {
    std::mt19937_64 rng(derive_seed(get_seed(c), "evolve"));
    p0 = random_distribution(space, rng, alpha);
  } else {
    if (!(space == ProductSpace::binary(n))) throw ConfigError("identical_copies needs a binary alphabet");
    p0 = distribution_of(identical_copies_density(n, {0.5, 0.5}), ProductMeasure::uniform(space));
  }
  const double kappa = n >= 2 ? kappa_theoretical(nu) : 0.0;

  EvolutionTrace trace;
  std::vector<double> bound;
  if (mode == "continuous") {
    EvolutionOptions opt;
    opt.t_end = get_double(c, "t_end", 5.0, 0.0, 1e6);
    opt.dt = get_double(c, "dt", 0.01, 1e-6, 1.0);
    opt.snapshot_every = static_cast<int>(get_int(c, "snapshot_every", 10, 1, 1000000));
    trace = evolve_continuous(p0, nu, opt);
    for (double t : trace.times) bound.push_back(std::exp(-kappa * t) * trace.entropy.front());
  } else {
    trace = evolve_discrete(p0, nu, static_cast<int>(get_int(c, "steps", 10, 0, 100000)));
    for (double t : trace.times) bound.push_back(std::pow(1.0 - kappa, t) * trace.entropy.front());
  }

  ExperimentResult r;
  r.experiment = "evolve";
  r.claim = "relative entropy to the product of marginals decays at rate kappa";
  std::vector<std::string> columns{"t", "entropy", "total_variation", "bound"};
  if (states) {
    for (std::size_t i = 0; i < space.size(); ++i) columns.push_back("p" + std::to_string(i));
  }
  r.table = Table(columns);
  double excess = -1.0;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    std::vector<Cell> row{trace.times[k], trace.entropy[k], trace.total_variation[k], bound[k]};
    if (states) {
      for (double x : trace.states[k].weights()) row.emplace_back(x);
    }
    r.table.add(std::move(row));
    excess = std::max(excess, trace.entropy[k] - bound[k]);
  }
  r.summary["kappa"] = kappa;
  r.summary["max_mass_drift"] = trace.max_mass_drift;
  char detail[64];
  std::snprintf(detail, sizeof detail, "worst excess %.3e", excess);
  r.check("entropy stays below the kappa envelope", excess <= 1e-8, detail);
  return r;
}

}  // namespace

CrossoverLaw named_law(const std::string& model, double q, int n) {
  if (model == "single_site") return CrossoverLaw::single_site(n);
  if (model == "one_point") return CrossoverLaw::one_point(n);
  if (model == "uniform") return CrossoverLaw::uniform(n);
  if (model == "bernoulli") return CrossoverLaw::bernoulli(n, q);
  throw InvalidArgument("unknown crossover model: " + model);
}

CrossoverLaw law_from_config(const Json& config, int n) {
  const auto model = get_string(config, "model", "", kModels);
  if (model.empty()) throw ConfigError("missing key \"model\"");
  if (model == "bernoulli" && !config.contains("q")) throw ConfigError("bernoulli model needs \"q\"");
  if (model != "bernoulli" && config.contains("q")) throw ConfigError("\"q\" only applies to the bernoulli model");
  return named_law(model, get_double(config, "q", 0.0, 0.0, 0.5), n);
}

ExperimentResult run_experiment(const Json& config) {
  if (!config.is_object() || !config.contains("experiment") || !config.at("experiment").is_string()) {
    throw ConfigError("each experiment needs a string \"experiment\" field");
  }
  const auto name = config.at("experiment").get<std::string>();
  try {
    if (name == "kappa_scan") return run_kappa_scan(config);
    if (name == "sharp_test") return run_sharp_test(config);
    if (name == "evolve") return run_evolve(config);
    for (const auto& e : acceptance_suite()) {
      if (e.tag == name) {
        require_keys(config, {"experiment", "name", "seed"}, {});
        return e.run(get_seed(config));
      }
    }
  } catch (const InvalidArgument& err) {
    throw ConfigError(std::string("invalid parameters: ") + err.what());
  } catch (const CapExceeded& err) {
    throw ConfigError(std::string("problem too large: ") + err.what());
  }
  throw ConfigError("unknown experiment \"" + name + "\"");
}

std::vector<Json> experiment_list(const Json& document) {
  std::vector<Json> out;
  if (document.is_array()) {
    for (const auto& e : document) out.push_back(e);
  } else if (document.is_object() && document.contains("experiments")) {
    if (document.size() != 1) throw ConfigError("\"experiments\" must be the only top-level key");
    if (!document.at("experiments").is_array()) throw ConfigError("\"experiments\" must be an array");
    for (const auto& e : document.at("experiments")) out.push_back(e);
  } else if (document.is_object()) {
    out.push_back(document);
  } else {
    throw ConfigError("config must be an object or an array of objects");
  }
  for (const auto& e : out) {
    if (!e.is_object()) throw ConfigError("experiment entries must be objects");
  }
  return out;
}

std::string artifact_stem(const Json& config, std::size_t position, std::size_t count) {
  if (config.contains("name")) {
    if (!config.at("name").is_string()) throw ConfigError("\"name\" must be a string");
    const auto name = config.at("name").get<std::string>();
    if (name.empty() || name.find_first_of("/\\") != std::string::npos || name[0] == '.') {
      throw ConfigError("\"name\" must be a plain file stem");
    }
    return name;
  }
  const auto base = config.at("experiment").get<std::string>();
  if (count == 1) return base;
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%02zu_", position + 1);
  return prefix + base;
}

void write_artifacts(const ExperimentResult& result, const Json& config, const std::filesystem::path& dir,
                     const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / (stem + ".csv"), std::ios::binary);
  csv << result.table.to_csv();
  std::ofstream json(dir / (stem + ".json"), std::ios::binary);
  json << result.to_json(config).dump(2) << "\n";
  if (!csv || !json) throw Error("could not write artifacts to " + dir.string());
}

}  // namespace recomb::lab
