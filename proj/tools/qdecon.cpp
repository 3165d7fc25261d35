// Copyright 2026 the qdecon authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// qdecon: command-line front end.
//
//   qdecon analyze      entropies, mutual informations, identity residuals
//   qdecon for          fidelity-of-recovery ascent with certificates
//   qdecon deconstruct  run a randomizing protocol and grade its conditions
//   qdecon verify       batch property checks on seeded random states
//   qdecon fixtures     write the reference states shipped with the repo
//
// Reports are JSON on stdout (or --out FILE); --pretty renders a plain text
// table instead.  Every floating-point result is an object
// {"value", "tolerance", "pass"}; tolerance and pass are null when the value
// is informational rather than a check.  Reports are byte-identical across
// runs with the same inputs, flags, and seed, except for the top-level
// "timing" object.
//
// Exit codes: 0 success, 2 input error, 3 non-convergence, 4 capacity
// exceeded, 5 check failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qdecon/qdecon.hpp"

namespace {

using namespace qdecon;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitCapacity = 4;
constexpr int kExitCheckFailure = 5;

// ---------------------------------------------------------------------------
// Report plumbing.

Json checked(double value, double tolerance, bool pass) {
  Json j;
  j["value"] = value;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  return j;
}

Json info(double value) {
  Json j;
  j["value"] = value;
  j["tolerance"] = nullptr;
  j["pass"] = nullptr;
  return j;
}

struct Report {
  Json j;
  bool any_fail = false;
  std::chrono::steady_clock::time_point t0 =
      std::chrono::steady_clock::now();

  Report(const std::string& command, int argc, char** argv) {
    j["command"] = command;
    std::string line;
    for (int i = 1; i < argc; ++i) {
      if (i > 1) line += ' ';
      line += argv[i];
    }
    j["command_line"] = line;
    j["version"] = kVersion;
  }

  Json& results() { return j["results"]; }

  void put_check(Json& dst, const char* key, double value, double tolerance,
                 bool pass) {
    dst[key] = checked(value, tolerance, pass);
    if (!pass) any_fail = true;
  }

  void stamp_timing() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    Json t;
    t["started_utc"] = buf;
    t["elapsed_seconds"] = secs;
    j["timing"] = std::move(t);
  }
};

void render_table(std::ostream& os, const std::string& prefix, const Json& j) {
  auto is_wrapped = [](const Json& v) {
    return v.is_object() && v.size() == 3 && v.contains("value") &&
           v.contains("tolerance") && v.contains("pass");
  };
  for (const auto& [key, value] : j.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (is_wrapped(value)) {
      std::ostringstream row;
      row << path;
      os << row.str();
      for (std::size_t i = row.str().size(); i < 44; ++i) os << ' ';
      std::ostringstream val;
      val.precision(12);
      val << value["value"].get<double>();
      os << val.str();
      for (std::size_t i = val.str().size(); i < 24; ++i) os << ' ';
      if (value["tolerance"].is_null()) {
        os << '\n';
      } else {
        os << "tol " << value["tolerance"].get<double>() << "  "
           << (value["pass"].get<bool>() ? "ok" : "FAIL") << '\n';
      }
    } else if (value.is_object()) {
      render_table(os, path, value);
    } else {
      os << path;
      for (std::size_t i = path.size(); i < 44; ++i) os << ' ';
      os << value.dump() << '\n';
    }
  }
}

struct OutputOptions {
  std::string out_path;
  bool pretty = false;
};

void emit(Report& rep, const OutputOptions& oo) {
  rep.stamp_timing();
  const std::string body = rep.j.dump(2) + "\n";
  if (!oo.out_path.empty()) detail::write_text_file(oo.out_path, body);
  if (oo.pretty) {
    std::cout << rep.j["command"].get<std::string>() << " (version "
              << rep.j["version"].get<std::string>() << ")\n";
    render_table(std::cout, "", rep.j["results"]);
    std::cout << "elapsed_seconds                             "
              << rep.j["timing"]["elapsed_seconds"].get<double>() << '\n';
  } else if (oo.out_path.empty()) {
    std::cout << body;
  }
}

// ---------------------------------------------------------------------------
// Flag parsing helpers.

std::vector<std::string> split_labels(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> out;
  for (const auto& tok : split_labels(s)) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(tok, &pos);
      if (pos != tok.size() || v < 1)
        throw InputError("--dims: bad dimension '" + tok + "'");
      out.push_back(v);
    } catch (const std::exception&) {
      throw InputError("--dims: bad dimension '" + tok + "'");
    }
  }
  if (out.empty()) throw InputError("--dims: empty list");
  return out;
}

struct RoleFlags {
  std::string a, b, e;
  Roles to_roles() const {
    return Roles{split_labels(a), split_labels(b), split_labels(e)};
  }
};

void add_role_flags(CLI::App* cmd, RoleFlags& rf, bool e_required) {
  cmd->add_option("--a", rf.a, "comma-separated labels of the A system")
      ->required();
  cmd->add_option("--b", rf.b, "comma-separated labels of the B system")
      ->required();
  auto* e = cmd->add_option(
      "--e", rf.e, "comma-separated labels of the conditioning system E");
  if (e_required) e->required();
}

ConditionMode parse_mode(const std::string& s, std::string& canonical) {
  if (s == "eq7" || s == "deconstruction") {
    canonical = "eq7";
    return ConditionMode::Deconstruction;
  }
  if (s == "eq8" || s == "erasure") {
    canonical = "eq8";
    return ConditionMode::Erasure;
  }
  throw InputError("--mode: expected eq7|deconstruction|eq8|erasure, got '" +
                   s + "'");
}

int worker_count(int n_items) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("QDECON_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = static_cast<unsigned>(cap);
    } catch (const std::exception&) {
      throw InputError(std::string("QDECON_THREADS: bad value '") + env + "'");
    }
  }
  return static_cast<int>(
      std::min<unsigned>(n, static_cast<unsigned>(std::max(1, n_items))));
}

// ---------------------------------------------------------------------------
// analyze

int cmd_analyze(const std::string& state_file, const RoleFlags& rf,
                Report& rep, const OutputOptions& oo) {
  const LabeledState rho = read_state(state_file);
  const Roles roles = rf.to_roles();
  const EntropyReport er = analyze_entropies(rho, roles);

  Json& r = rep.results();
  r["state_file"] = state_file;
  r["dim"] = rho.dim();
  r["pure"] = rho.is_pure();
  for (const auto& [name, h] : er.entropies)
    r["entropies"][name] = info(h);
  for (const auto& [name, d] : er.subset_log_dims)
    r["subset_log_dims"][name] = info(d);
  r["qmi_ab"] = info(er.qmi_ab);
  // Nonnegativity of the conditional mutual information is strong
  // subadditivity, so it doubles as a check.
  rep.put_check(r, "cqmi_ab_given_e", er.cqmi_ab_given_e, 1e-9,
                er.cqmi_ab_given_e >= -1e-9);
  if (er.chain_available)
    rep.put_check(r, "chain_residual", er.chain_residual, 1e-9,
                  std::abs(er.chain_residual) <= 1e-9);
  if (er.duality_available) {
    rep.put_check(r, "duality_residual", er.duality, 1e-9,
                  std::abs(er.duality) <= 1e-9);
    r["ancilla_rate"] = info(er.ancilla_rate);
  }
  emit(rep, oo);
  return rep.any_fail ? kExitCheckFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// for

int cmd_for(const std::string& state_file, const RoleFlags& rf,
            const OptimizerConfig& cfg, Report& rep,
            const OutputOptions& oo) {
  const LabeledState rho = read_state(state_file);
  const Roles roles = rf.to_roles();

  FoREstimate est;
  const double fr = fawzi_renner_residual(rho, roles, cfg, &est);

  Json& r = rep.results();
  r["state_file"] = state_file;
  // The ascent is initialized at the recovery value of the transpose map,
  // so the certificate can never fall below that floor.
  rep.put_check(r, "value", est.value, 1e-9,
                est.value >= est.petz_value - 1e-9);
  r["petz_value"] = info(est.petz_value);
  r["iterations"] = est.iterations;
  r["converged"] = est.converged;
  r["gradient_norm_final"] = info(est.gradient_norm_final);
  rep.put_check(r, "fawzi_renner_residual", fr, 1e-4, fr >= -1e-4);
  r["cqmi"] = info(cqmi(rho, roles));

  emit(rep, oo);
  if (!est.converged) return kExitNoConvergence;
  return rep.any_fail ? kExitCheckFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// deconstruct

int cmd_deconstruct(const std::string& state_file,
                    const std::string& protocol_spec, int copies,
                    bool copies_given, const std::string& mode_str,
                    const std::string& erase_csv, const RoleFlags& rf,
                    const OptimizerConfig& cfg, Report& rep,
                    const OutputOptions& oo) {
  const LabeledState rho = read_state(state_file);
  const Roles roles = rf.to_roles();
  std::string mode_canonical;
  const ConditionMode mode = parse_mode(mode_str, mode_canonical);

  DeconstructionProtocol p;
  std::string kind;
  if (protocol_spec == "twirl") {
    p = full_twirl_protocol(rho, roles, copies);
    kind = "twirl";
  } else if (protocol_spec == "markov") {
    p = markov_protocol(rho, roles, copies);
    kind = "markov";
  } else {
    p = read_protocol(protocol_spec);
    kind = "file";
    if (copies_given) p.copies = copies;
  }

  std::optional<std::vector<std::string>> erase_override;
  if (!erase_csv.empty()) erase_override = split_labels(erase_csv);

  const ProtocolReport pr =
      evaluate_protocol(rho, roles, p, mode, erase_override, cfg);

  Json& r = rep.results();
  r["state_file"] = state_file;
  r["mode"] = mode_canonical;
  Json proto;
  proto["kind"] = kind;
  proto["copies"] = pr.copies;
  proto["ensemble_size"] = pr.ensemble_size;
  proto["ancilla_dim"] = pr.ancilla_dim;
  proto["erase"] = erase_override.has_value() ? *erase_override
                                              : p.erase_labels;
  r["protocol"] = std::move(proto);
  r["rate_bits"] = info(pr.rate_bits);
  r["cqmi_per_copy"] = info(pr.cqmi_per_copy);
  r["disturbance_fidelity"] = info(pr.disturbance_fidelity);
  if (pr.erasure_available)
    r["erasure_fidelity"] = info(pr.erasure_fidelity);
  if (pr.recoverability_available) {
    Json rec;
    rec["value"] = info(pr.recoverability.value);
    rec["petz_candidate_fidelity"] = info(pr.petz_candidate_fidelity);
    rec["iterations"] = pr.recoverability.iterations;
    rec["converged"] = pr.recoverability.converged;
    r["recoverability"] = std::move(rec);
  }
  r["epsilon"] = info(pr.epsilon);
  Json cv;
  cv["available"] = pr.converse.available;
  if (pr.converse.available) {
    cv["lhs_n_times_cqmi"] = info(pr.converse.lhs);
    cv["rhs_cqmi_omega_plus_log_m"] = info(pr.converse.rhs_core);
    cv["difference"] = info(pr.converse.difference);
  } else {
    cv["note"] = pr.converse.note;
  }
  r["converse"] = std::move(cv);

  emit(rep, oo);
  return rep.any_fail ? kExitCheckFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct CheckSpec {
  std::string name;
  int parties = 3;           // canonical party count for --dims
  double tolerance = 1e-9;
  bool two_sided = true;     // pass |r| <= tol; else pass r >= -tol
};

const std::vector<CheckSpec>& check_table() {
  static const std::vector<CheckSpec> t = {
      {"ssa", 3, 1e-9, false},
      {"chain", 4, 1e-9, true},
      {"duality", 4, 1e-9, true},
      {"fawzi-renner", 3, 1e-4, false},
      {"self-duality", 4, 1e-3, true},
      {"multiplicativity", 3, 1e-3, true},
  };
  return t;
}

const CheckSpec& find_check(const std::string& name) {
  for (const auto& c : check_table())
    if (c.name == name) return c;
  std::string known;
  for (const auto& c : check_table()) {
    if (!known.empty()) known += ", ";
    known += c.name;
  }
  throw InputError("--checks: unknown check '" + name + "' (known: " + known +
                   ")");
}

// Each check draws states of a canonical shape; --dims must either match
// that party count or be all-2s, in which case it is stretched to fit.
std::vector<int> dims_for(const CheckSpec& spec,
                          const std::vector<int>& user) {
  if (static_cast<int>(user.size()) == spec.parties) return user;
  const bool all_two =
      std::all_of(user.begin(), user.end(), [](int d) { return d == 2; });
  if (all_two) return std::vector<int>(static_cast<std::size_t>(spec.parties), 2);
  throw InputError("--dims: check '" + spec.name + "' expects " +
                   std::to_string(spec.parties) + " dimensions, got " +
                   std::to_string(user.size()));
}

double run_one_check(const CheckSpec& spec, const std::vector<int>& dims,
                     std::uint64_t seed, const OptimizerConfig& cfg) {
  Rng rng(seed);
  if (spec.name == "ssa") {
    const Factorization f({"A", "B", "E"}, dims);
    const LabeledState rho =
        random_mixed_state(f, static_cast<int>(f.total_dim()), rng);
    return cqmi(rho, {"A"}, {"B"}, {"E"});
  }
  if (spec.name == "chain") {
    const Factorization f({"A1", "A2", "B", "E"}, dims);
    const LabeledState psi = random_pure_state(f, rng);
    return chain_rule_residual(psi, {"A1", "A2"}, {"B"}, {"E"});
  }
  if (spec.name == "duality") {
    const Factorization f({"A", "B", "E", "R"}, dims);
    const LabeledState psi = random_pure_state(f, rng);
    return duality_residual(psi, {"A"}, {"B"}, {"E"}, {"R"});
  }
  if (spec.name == "fawzi-renner") {
    const Factorization f({"A", "B", "E"}, dims);
    const LabeledState rho =
        random_mixed_state(f, static_cast<int>(f.total_dim()), rng);
    return fawzi_renner_residual(rho, Roles{{"A"}, {"B"}, {"E"}}, cfg);
  }
  if (spec.name == "self-duality") {
    const Factorization f({"A", "B", "E", "R"}, dims);
    const LabeledState psi = random_pure_state(f, rng);
    return for_self_duality_residual(psi, Roles{{"A"}, {"B"}, {"E"}}, {"R"},
                                     cfg);
  }
  // multiplicativity
  const Factorization f1({"A", "B", "E"}, dims);
  const long d = f1.total_dim();
  if (d * d > kRecoveryDimCap)
    throw CapacityError("--checks multiplicativity: joint dimension " +
                        std::to_string(d * d) + " exceeds cap " +
                        std::to_string(kRecoveryDimCap));
  const LabeledState rho =
      random_mixed_state(f1, static_cast<int>(d), rng);
  const Factorization f2({"A2", "B2", "E2"}, dims);
  const LabeledState sigma =
      random_mixed_state(f2, static_cast<int>(d), rng);
  return for_multiplicativity_residual(rho, Roles{{"A"}, {"B"}, {"E"}}, sigma,
                                       Roles{{"A2"}, {"B2"}, {"E2"}}, cfg);
}

int cmd_verify(const std::string& checks_csv, int n_states,
               const std::string& dims_csv, std::uint64_t seed,
               const OptimizerConfig& cfg, Report& rep,
               const OutputOptions& oo) {
  if (n_states < 1) throw InputError("--random: need at least 1 state");
  const std::vector<int> user_dims = parse_dims(dims_csv);
  std::vector<const CheckSpec*> specs;
  for (const auto& name : split_labels(checks_csv))
    specs.push_back(&find_check(name));
  if (specs.empty()) throw InputError("--checks: empty list");

  Json& r = rep.results();
  r["states_per_check"] = n_states;
  int total_failures = 0;

  for (std::size_t ci = 0; ci < specs.size(); ++ci) {
    const CheckSpec& spec = *specs[ci];
    const std::vector<int> dims = dims_for(spec, user_dims);

    std::vector<double> residuals(static_cast<std::size_t>(n_states), 0.0);
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    const int workers = worker_count(n_states);

    auto body = [&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n_states) return;
        try {
          // Per-state seed: deterministic in (seed, check, index) and
          // independent of the worker layout.
          const std::uint64_t s =
              seed + 1000003ULL * static_cast<std::uint64_t>(ci) +
              static_cast<std::uint64_t>(i);
          residuals[static_cast<std::size_t>(i)] =
              run_one_check(spec, dims, s, cfg);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    if (workers == 1) {
      body();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(body);
      for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    int failures = 0;
    double mn = residuals[0], mx = residuals[0], sum = 0.0;
    for (double v : residuals) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      sum += v;
      const bool ok =
          spec.two_sided ? std::abs(v) <= spec.tolerance : v >= -spec.tolerance;
      if (!ok) ++failures;
    }
    total_failures += failures;

    Json c;
    c["states"] = n_states;
    c["dims"] = dims;
    c["tolerance"] = spec.tolerance;
    c["failures"] = failures;
    const bool worst_ok = spec.two_sided
                              ? std::max(std::abs(mn), std::abs(mx)) <=
                                    spec.tolerance
                              : mn >= -spec.tolerance;
    rep.put_check(c, "min_residual", mn, spec.tolerance,
                  spec.two_sided ? std::abs(mn) <= spec.tolerance
                                 : mn >= -spec.tolerance);
    rep.put_check(c, "max_residual", mx, spec.tolerance,
                  !spec.two_sided || std::abs(mx) <= spec.tolerance);
    c["mean_residual"] = info(sum / n_states);
    c["pass"] = (failures == 0) && worst_ok;
    r["checks"][spec.name] = std::move(c);
  }
  r["total_failures"] = total_failures;

  emit(rep, oo);
  return (total_failures > 0 || rep.any_fail) ? kExitCheckFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// fixtures

LabeledState fixture_markov_a() {
  Rng rng(2001);
  auto blk = [&rng](double w) {
    MarkovBlock b;
    b.weight = w;
    b.dim_left = 1;
    b.dim_right = 1;
    b.left = random_mixed_state(Factorization({"x"}, {2}), 2, rng).matrix;
    b.right = random_mixed_state(Factorization({"y"}, {2}), 2, rng).matrix;
    return b;
  };
  return markov_state({blk(0.3), blk(0.7)});
}

LabeledState fixture_markov_b() {
  Rng rng(2002);
  MarkovBlock b1;
  b1.weight = 0.5;
  b1.dim_left = 2;
  b1.dim_right = 1;
  b1.left = random_mixed_state(Factorization({"x"}, {4}), 4, rng).matrix;
  b1.right = random_mixed_state(Factorization({"y"}, {2}), 2, rng).matrix;
  MarkovBlock b2;
  b2.weight = 0.5;
  b2.dim_left = 1;
  b2.dim_right = 2;
  b2.left = random_mixed_state(Factorization({"x"}, {2}), 2, rng).matrix;
  b2.right = random_mixed_state(Factorization({"y"}, {4}), 4, rng).matrix;
  return markov_state({b1, b2});
}

int cmd_fixtures(const std::string& out_dir, std::uint64_t seed, Report& rep,
                 const OutputOptions& oo) {
  struct Entry {
    const char* name;
    LabeledState state;
  };
  Rng rng(seed);
  const std::vector<Entry> entries = {
      {"ghz3.json", ghz(3, 2)},
      {"phi_pi.json",
       tensor(maximally_entangled(2, "A", "B"), maximally_mixed(2, "E"))},
      {"markov_a.json", fixture_markov_a()},
      {"markov_b.json", fixture_markov_b()},
      {"random_pure_4q.json",
       random_pure_state(Factorization({"A", "B", "E", "R"}, {2, 2, 2, 2}),
                         rng)},
  };

  std::filesystem::create_directories(out_dir);
  Json files = Json::array();
  for (const auto& e : entries) {
    const std::string path = out_dir + "/" + e.name;
    write_state(path, e.state);
    files.push_back(path);
  }
  Json& r = rep.results();
  r["out_dir"] = out_dir;
  r["files"] = std::move(files);
  emit(rep, oo);
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{"deconstruction and conditional-correlation toolkit"};
  app.require_subcommand(1);

  // Shared flag storage.
  std::string state_file, out_path, protocol_spec = "twirl";
  std::string mode_str = "eq7", erase_csv;
  std::string checks_csv = "ssa,chain,duality,fawzi-renner,self-duality";
  std::string dims_csv = "2,2,2", out_dir = "fixtures";
  RoleFlags rf_analyze, rf_for, rf_decon;
  bool pretty = false;
  int copies = 1, n_states = 20;
  std::uint64_t seed = 1;
  OptimizerConfig cfg;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "write the JSON report to this file");
    cmd->add_flag("--pretty", pretty,
                  "print a plain text table instead of JSON");
  };
  auto add_optimizer = [&](CLI::App* cmd) {
    cmd->add_option("--tol-obj", cfg.tol_obj,
                    "ascent stops when the objective gain drops below this");
    cmd->add_option("--max-iter", cfg.max_iter, "ascent iteration cap");
    cmd->add_option("--seed", seed, "seed echoed into the report");
  };

  CLI::App* c_analyze = app.add_subcommand(
      "analyze", "entropies, mutual informations, identity residuals");
  c_analyze->add_option("state", state_file, "state JSON file")->required();
  add_role_flags(c_analyze, rf_analyze, false);
  add_common(c_analyze);

  CLI::App* c_for = app.add_subcommand(
      "for", "fidelity-of-recovery ascent with certificates");
  c_for->add_option("state", state_file, "state JSON file")->required();
  add_role_flags(c_for, rf_for, true);
  add_optimizer(c_for);
  add_common(c_for);

  CLI::App* c_decon = app.add_subcommand(
      "deconstruct", "run a randomizing protocol and grade its conditions");
  c_decon->add_option("state", state_file, "state JSON file")->required();
  add_role_flags(c_decon, rf_decon, true);
  CLI::Option* copies_opt =
      c_decon->add_option("--copies", copies, "number of input copies");
  c_decon->add_option("--protocol", protocol_spec,
                      "twirl | markov | protocol JSON file");
  c_decon->add_option("--mode", mode_str,
                      "eq7 (deconstruction) or eq8 (erasure)");
  c_decon->add_option("--erase", erase_csv,
                      "override the protocol's erase labels");
  add_optimizer(c_decon);
  add_common(c_decon);

  CLI::App* c_verify = app.add_subcommand(
      "verify", "batch property checks on seeded random states");
  c_verify->add_option("--checks", checks_csv,
                       "comma list: ssa, chain, duality, fawzi-renner, "
                       "self-duality, multiplicativity");
  c_verify->add_option("--random", n_states, "states per check");
  c_verify->add_option("--dims", dims_csv, "party dimensions, comma list");
  add_optimizer(c_verify);
  add_common(c_verify);

  CLI::App* c_fixtures = app.add_subcommand(
      "fixtures", "write the reference states shipped with the repo");
  c_fixtures->add_option("--out-dir", out_dir, "directory to write into");
  c_fixtures->add_option("--seed", seed,
                         "seed for the random pure fixture (default 1)");
  add_common(c_fixtures);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  const OutputOptions oo{out_path, pretty};
  try {
    if (app.got_subcommand(c_analyze)) {
      Report rep("analyze", argc, argv);
      return cmd_analyze(state_file, rf_analyze, rep, oo);
    }
    if (app.got_subcommand(c_for)) {
      Report rep("for", argc, argv);
      rep.j["seed"] = seed;
      return cmd_for(state_file, rf_for, cfg, rep, oo);
    }
    if (app.got_subcommand(c_decon)) {
      Report rep("deconstruct", argc, argv);
      rep.j["seed"] = seed;
      return cmd_deconstruct(state_file, protocol_spec, copies,
                             copies_opt->count() > 0, mode_str, erase_csv,
                             rf_decon, cfg, rep, oo);
    }
    if (app.got_subcommand(c_verify)) {
      Report rep("verify", argc, argv);
      rep.j["seed"] = seed;
      return cmd_verify(checks_csv, n_states, dims_csv, seed, cfg, rep, oo);
    }
    if (app.got_subcommand(c_fixtures)) {
      Report rep("fixtures", argc, argv);
      rep.j["seed"] = seed;
      return cmd_fixtures(out_dir, seed, rep, oo);
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
  return kExitInput;
}
