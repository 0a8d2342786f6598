// qdsim command-line driver: configure a model, run an experiment, write
// machine-readable results (CSV for curves, JSON for scalars). Identical
// config + seed gives byte-identical output.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qdsim/darwinism.hpp"
#include "qdsim/envariance.hpp"
#include "qdsim/gaussian.hpp"
#include "qdsim/models.hpp"
#include "qdsim/qstate_ops.hpp"
#include "qdsim/schmidt.hpp"

using json = nlohmann::json;
using namespace qdsim;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(config.dump()));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void reject_unknown(const json& config, const std::vector<std::string>& known) {
  for (auto it = config.begin(); it != config.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw CLI::ValidationError("config", "unknown config field: " + it.key());
  }
}

EntropyUnit parse_unit(const std::string& unit) {
  if (unit == "bits") return EntropyUnit::Bits;
  if (unit == "nats") return EntropyUnit::Nats;
  throw CLI::ValidationError("--unit", "unit must be bits or nats");
}

std::vector<double> fraction_grid(const json& config) {
  if (config.contains("fractions")) return config["fractions"].get<std::vector<double>>();
  const int n = config.value("fraction_count", 21);
  std::vector<double> fs;
  for (int i = 0; i < n; ++i) fs.push_back(static_cast<double>(i) / (n - 1));
  return fs;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string csv_of_curve(const PIPCurve& curve, const std::string& experiment,
                         const json& config, double tau_rec = -1.0) {
  std::string out = "# qdsim " + experiment + " config_hash=" + hash_hex(config) +
                    " seed=" + std::to_string(curve.seed) +
                    " unit=" + (curve.unit == EntropyUnit::Bits ? "bits" : "nats") +
                    " H_S=" + fmt(curve.system_entropy);
  if (tau_rec > 0.0) out += " tau_rec=" + fmt(tau_rec);
  out += "\nf,I_mean,I_stderr,n_samples\n";
  for (const auto& pt : curve.points)
    out += fmt(pt.f) + "," + fmt(pt.mean_info) + "," + fmt(pt.stderr_info) + "," +
           std::to_string(pt.n_samples) + "\n";
  return out;
}

// amplitude-squares may be given as rationals ("2/3") or decimals
double parse_prob(const json& v) {
  if (v.is_number()) return v.get<double>();
  const std::string s = v.get<std::string>();
  const auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

// diagonal Schmidt state with given branch probabilities over dims (n, n)
PureState schmidt_diagonal_state(const std::vector<double>& probs) {
  const int n = static_cast<int>(probs.size());
  if (n < 2) throw CLI::ValidationError("config", "need at least two amplitude squares");
  Vector v = Vector::Zero(static_cast<std::int64_t>(n) * n);
  for (int k = 0; k < n; ++k)
    v(static_cast<std::int64_t>(k) * n + k) =
        std::sqrt(std::max(0.0, probs[static_cast<std::size_t>(k)]));
  v /= v.norm();
  return PureState(v, SubsystemLayout({n, n}));
}

struct Common {
  std::string config_path;
  std::string out_path = "result.json";
  std::optional<std::uint64_t> seed;
  std::string unit = "bits";
};

json load_config(const Common& common) {
  if (common.config_path.empty()) return json::object();
  std::ifstream f(common.config_path);
  if (!f) throw CLI::ValidationError("--config", "cannot read " + common.config_path);
  json j = json::parse(f);
  if (!j.is_object()) throw CLI::ValidationError("--config", "config must be a JSON object");
  return j;
}

std::uint64_t require_seed(const Common& common, json& config) {
  if (common.seed) {
    config["seed"] = *common.seed;
    return *common.seed;
  }
  if (config.contains("seed")) return config["seed"].get<std::uint64_t>();
  throw CLI::ValidationError("--seed", "a seed is required for stochastic experiments");
}

CentralSpinModel central_spin_from_config(const json& config, std::uint64_t seed) {
  const int n = config.value("n_env", 50);
  const double a2 = config.contains("a2") ? parse_prob(config["a2"]) : 0.5;
  auto model = CentralSpinModel::random_couplings(n, seed ^ 0x5ca1ab1e, std::sqrt(a2),
                                                  std::sqrt(1.0 - a2));
  if (config.contains("couplings"))
    model.couplings = config["couplings"].get<std::vector<double>>();
  return model;
}

QBMModel qbm_from_config(const json& config) {
  QBMModel m;
  m.system_mass = config.value("system_mass", 1000.0);
  m.system_frequency = config.value("system_frequency", 4.0);
  m.bath = discretize_ohmic_bath(config.value("cutoff", 16.0), config.value("band_width", 0.1),
                                 config.value("coupling", 1.0 / 40.0), m.system_mass,
                                 config.value("band_mass", 1.0));
  m.squeezing = config.value("squeezing", 100.0);
  m.squeeze_axis =
      config.value("squeeze_axis", std::string("x")) == "p" ? SqueezeAxis::P : SqueezeAxis::X;
  return m;
}

int run_born(const Common& common, json config) {
  reject_unknown(config, {"amplitude_squares", "denominator_bound", "seed"});
  std::vector<double> probs;
  if (config.contains("amplitude_squares"))
    for (const auto& v : config["amplitude_squares"]) probs.push_back(parse_prob(v));
  else
    probs = {2.0 / 3.0, 1.0 / 3.0};
  const auto bound = config.value("denominator_bound", std::int64_t{1} << 20);

  auto psi = schmidt_diagonal_state(probs);
  auto result = born_probabilities(psi, {0}, bound);

  json out;
  out["experiment"] = "born";
  out["config_hash"] = hash_hex(config);
  out["seed"] = common.seed ? *common.seed : config.value("seed", std::uint64_t{0});
  out["rational"] = result.rational;
  out["approximation_error"] = result.approximation_error;
  json plist = json::array();
  for (const auto& p : result.probabilities) {
    json e;
    e["value"] = p.value;
    if (result.rational) {
      e["numerator"] = p.numerator;
      e["denominator"] = p.denominator;
    }
    plist.push_back(e);
  }
  out["p"] = plist;
  write_json(common.out_path, out);
  std::cout << "born: wrote " << common.out_path
            << " (rational=" << (result.rational ? "true" : "false") << ")\n";
  return 0;
}

int run_envariance(const Common& common, json config) {
  reject_unknown(config, {"amplitude_squares", "swap_k", "swap_l", "phases", "seed"});
  std::vector<double> probs;
  if (config.contains("amplitude_squares"))
    for (const auto& v : config["amplitude_squares"]) probs.push_back(parse_prob(v));
  else
    probs = {0.5, 0.5};
  auto psi = schmidt_diagonal_state(probs);
  const int k = config.value("swap_k", 0);
  const int l = config.value("swap_l", 1);

  auto swap_verdict = verify_envariance(psi, {0}, SchmidtLocalUnitary::swap(k, l));
  std::vector<double> phases = config.value("phases", std::vector<double>{0.7, 2.1});
  auto phase_verdict = verify_envariance(psi, {0}, SchmidtLocalUnitary::phase_rotation(phases));

  auto pair = make_swap_pair(psi, {0}, k, l);
  auto roundtrip = apply_local_unitary(apply_local_unitary(psi, pair.swap_left, {0}),
                                       pair.counterswap_right, {1});

  json out;
  out["experiment"] = "envariance";
  out["config_hash"] = hash_hex(config);
  out["seed"] = common.seed ? *common.seed : config.value("seed", std::uint64_t{0});
  out["swap"] = {{"k", k},
                 {"l", l},
                 {"envariant", swap_verdict.envariant},
                 {"fidelity", swap_verdict.fidelity}};
  out["phase_rotation"] = {{"envariant", phase_verdict.envariant},
                           {"fidelity", phase_verdict.fidelity}};
  out["swap_counterswap_fidelity"] = fidelity(psi, roundtrip);
  write_json(common.out_path, out);
  std::cout << "envariance: swap envariant=" << (swap_verdict.envariant ? "yes" : "no")
            << ", wrote " << common.out_path << "\n";
  return 0;
}

std::unique_ptr<MutualInfoSource> source_from_config(const json& config, std::uint64_t seed) {
  const std::string model = config.value("model", std::string("cnot-chain"));
  if (model == "cnot-chain") {
    CnotChainModel m;
    m.n_env = config.value("n_env", 16);
    const double a2 = config.contains("a2") ? parse_prob(config["a2"]) : 0.5;
    m.a = std::sqrt(a2);
    m.b = std::sqrt(1.0 - a2);
    const int k = config.value("gates", m.n_env);
    return std::make_unique<BranchStateSource>(cnot_chain_branch_state(m, k));
  }
  if (model == "central-spin") {
    auto m = central_spin_from_config(config, seed);
    const double t = config.value("t", 1.0 / std::max(1e-12, m.average_action(1.0)));
    return std::make_unique<BranchStateSource>(central_spin_state_at(m, t));
  }
  if (model == "haar") {
    const int n = config.value("n_env", 12);
    auto psi = haar_random_state(SubsystemLayout::qubits(n + 1), seed ^ 0xfeedface);
    return std::make_unique<DensePureStateSource>(std::move(psi), 0);
  }
  throw CLI::ValidationError("config", "unknown model: " + model);
}

int run_pip(const Common& common, json config) {
  reject_unknown(config, {"model", "n_env", "a2", "gates", "t", "couplings", "fractions",
                          "fraction_count", "samples_per_f", "seed"});
  const auto seed = require_seed(common, config);
  auto source = source_from_config(config, seed);
  auto curve =
      partial_information_plot(*source, fraction_grid(config),
                               config.value("samples_per_f", 64), seed, parse_unit(common.unit));
  curve.model = config.value("model", std::string("cnot-chain"));
  write_text(common.out_path, csv_of_curve(curve, "pip", config));
  std::cout << "pip: model=" << curve.model << " H_S=" << fmt(curve.system_entropy) << " "
            << common.unit << ", wrote " << common.out_path << "\n";
  return 0;
}

int run_redundancy(const Common& common, json config) {
  reject_unknown(config, {"model", "n_env", "a2", "gates", "t", "couplings", "fractions",
                          "fraction_count", "samples_per_f", "delta", "seed"});
  const auto seed = require_seed(common, config);
  auto source = source_from_config(config, seed);
  auto curve =
      partial_information_plot(*source, fraction_grid(config),
                               config.value("samples_per_f", 64), seed, parse_unit(common.unit));
  const double delta = config.value("delta", 0.1);
  auto r = redundancy_from_pip(curve, delta);

  json out;
  out["experiment"] = "redundancy";
  out["config_hash"] = hash_hex(config);
  out["seed"] = seed;
  out["unit"] = common.unit;
  out["system_entropy"] = curve.system_entropy;
  out["delta"] = r.delta;
  out["f_delta"] = r.f_delta;
  out["r_delta"] = r.r_delta;
  out["f_interpolated"] = r.f_interpolated;
  out["r_interpolated"] = r.r_interpolated;
  out["interpolated"] = r.interpolated;
  write_json(common.out_path, out);
  std::cout << "redundancy: R_delta=" << fmt(r.r_delta) << ", wrote " << common.out_path << "\n";
  return 0;
}

int run_redundancy_vs_mu(const Common& common, json config) {
  reject_unknown(config,
                 {"n_env", "a2", "t", "average_action", "delta", "mu_count", "draws", "seed"});
  const auto seed = require_seed(common, config);
  const int mu_count = config.value("mu_count", 9);
  const int draws = config.value("draws", 8);
  const double delta = config.value("delta", 0.1);

  std::string csv = "# qdsim redundancy-vs-mu config_hash=" + hash_hex(config) +
                    " seed=" + std::to_string(seed) + " unit=bits\nmu,R_mean,R_min,R_max,draws\n";
  for (int i = 0; i < mu_count; ++i) {
    const double mu = 0.5 * 3.14159265358979323846 * i / (mu_count - 1);
    double sum = 0.0, mn = 1e300, mx = 0.0;
    for (int d = 0; d < draws; ++d) {
      auto model =
          central_spin_from_config(config, seed + 1000003ULL * static_cast<std::uint64_t>(d));
      const double t = config.contains("t")
                           ? config["t"].get<double>()
                           : config.value("average_action", 1.0) / model.average_action(1.0);
      auto st = central_spin_state_at(model, t);
      auto r = redundancy_of_observable(st, mu, delta, seed + static_cast<std::uint64_t>(d));
      sum += r.redundancy;
      mn = std::min(mn, static_cast<double>(r.redundancy));
      mx = std::max(mx, static_cast<double>(r.redundancy));
    }
    csv += fmt(mu) + "," + fmt(sum / draws) + "," + fmt(mn) + "," + fmt(mx) + "," +
           std::to_string(draws) + "\n";
  }
  write_text(common.out_path, csv);
  std::cout << "redundancy-vs-mu: wrote " << common.out_path << "\n";
  return 0;
}

int run_qbm_pip(const Common& common, json config) {
  reject_unknown(config, {"system_mass", "system_frequency", "cutoff", "band_width", "coupling",
                          "band_mass", "squeezing", "squeeze_axis", "t", "fractions",
                          "fraction_count", "samples_per_f", "seed"});
  const auto seed = require_seed(common, config);
  auto model = qbm_from_config(config);
  const double t = config.value("t", 4.0);
  auto curve = qbm_partial_information(model, t, fraction_grid(config),
                                       config.value("samples_per_f", 32), seed);
  write_text(common.out_path,
             csv_of_curve(curve, "qbm-pip", config, model.bath.recurrence_time()));
  std::cout << "qbm-pip: H_S=" << fmt(curve.system_entropy)
            << " nats, tau_rec=" << fmt(model.bath.recurrence_time()) << ", wrote "
            << common.out_path << "\n";
  return 0;
}

int run_qbm_redundancy(const Common& common, json config) {
  reject_unknown(config, {"system_mass", "system_frequency", "cutoff", "band_width", "coupling",
                          "band_mass", "squeezing", "squeeze_axis", "t", "fractions",
                          "fraction_count", "samples_per_f", "delta", "seed"});
  const auto seed = require_seed(common, config);
  auto model = qbm_from_config(config);
  const double t = config.value("t", 4.0);
  const double delta = config.value("delta", 0.1);
  std::vector<double> fractions;
  if (config.contains("fractions"))
    fractions = config["fractions"].get<std::vector<double>>();
  else
    for (int i = 0; i <= 40; ++i) fractions.push_back(i / 40.0);
  auto r = qbm_redundancy(model, t, delta, fractions, config.value("samples_per_f", 32), seed);

  json out;
  out["experiment"] = "qbm-redundancy";
  out["config_hash"] = hash_hex(config);
  out["seed"] = seed;
  out["unit"] = "nats";
  out["system_entropy"] = r.system_entropy_nats;
  out["tau_rec"] = model.bath.recurrence_time();
  out["delta"] = delta;
  out["r_delta"] = r.result.r_delta;
  out["r_interpolated"] = r.result.r_interpolated;
  out["predicted_exp_2dH"] = r.predicted;
  out["ratio"] = r.ratio;
  out["squeezing_power_law"] = std::pow(model.squeezing, 2.0 * delta);
  write_json(common.out_path, out);
  std::cout << "qbm-redundancy: R=" << fmt(r.result.r_interpolated)
            << " predicted=" << fmt(r.predicted) << " ratio=" << fmt(r.ratio) << ", wrote "
            << common.out_path << "\n";
  return 0;
}

int run_chain_check(const Common& common, json config) {
  reject_unknown(config, {"initial_overlap", "link_overlaps", "s_overlap", "e_overlap", "seed"});
  json out;
  out["experiment"] = "chain-check";
  out["config_hash"] = hash_hex(config);
  out["seed"] = common.seed ? *common.seed : config.value("seed", std::uint64_t{0});

  if (config.contains("link_overlaps")) {
    std::vector<Complex> links;
    for (const auto& v : config["link_overlaps"]) links.emplace_back(v.get<double>(), 0.0);
    auto r = chain_overlap_invariant(Complex(config.value("initial_overlap", 0.0), 0.0), links);
    out["chain"] = {{"product", r.product.real()},
                    {"log_sum", r.log_sum},
                    {"log_initial", r.log_initial},
                    {"consistent", r.consistent},
                    {"violation", r.violation}};
  }
  if (config.contains("s_overlap") && config.contains("e_overlap")) {
    const double so = config["s_overlap"].get<double>();
    const double eo = config["e_overlap"].get<double>();
    // pure-imprint constraint |<s|s'>| |1 - <e|e'>|
    const double violation = std::abs(so * (1.0 - eo));
    out["repeatability"] = {{"violation", violation}, {"consistent", violation < 1e-9}};
  }
  write_json(common.out_path, out);
  std::cout << "chain-check: wrote " << common.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum Darwinism simulation toolkit"};
  app.require_subcommand(1);

  Common common;
  app.add_option("--config", common.config_path, "JSON config file");
  app.add_option("--seed", common.seed, "RNG seed (required for stochastic experiments)");
  app.add_option("--out", common.out_path, "output path")->capture_default_str();
  app.add_option("--unit", common.unit, "entropy unit: bits|nats")->capture_default_str();

  std::map<std::string, std::function<int(const Common&, json)>> runners{
      {"born", run_born},
      {"envariance", run_envariance},
      {"pip", run_pip},
      {"redundancy", run_redundancy},
      {"redundancy-vs-mu", run_redundancy_vs_mu},
      {"qbm-pip", run_qbm_pip},
      {"qbm-redundancy", run_qbm_redundancy},
      {"chain-check", run_chain_check}};

  const std::vector<std::pair<std::string, std::string>> descriptions{
      {"born", "branch-counting probabilities for a Schmidt state"},
      {"envariance", "swap/counterswap and phase-rotation verdicts"},
      {"pip", "partial information plot (CSV)"},
      {"redundancy", "redundancy R_delta from a PIP crossing"},
      {"redundancy-vs-mu", "central-spin redundancy vs observable angle (CSV)"},
      {"qbm-pip", "quantum Brownian motion PIP (CSV, nats)"},
      {"qbm-redundancy", "QBM redundancy vs the squeezing power law"},
      {"chain-check", "repeatability and von Neumann chain overlap checks"}};
  for (const auto& [name, desc] : descriptions)
    app.add_subcommand(name, desc)->fallthrough();  // common flags may follow the subcommand

  CLI11_PARSE(app, argc, argv);

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    json config = load_config(common);
    return runners.at(sub)(common, std::move(config));
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
