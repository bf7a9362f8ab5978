#include "semifl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace semifl {

extern const char* const kExperimentSchemaText;  // generated from schemas/experiment.schema.json

std::string_view experiment_schema() { return kExperimentSchemaText; }

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& path, const std::string& msg) {
  fail(ErrorCode::ConfigError, path + ": " + msg);
}

// ---- schema subset: type, enum, const, anyOf, properties, additionalProperties, required,
// minimum, maximum, exclusiveMinimum, items, minItems, maxItems, pattern ----

bool type_matches(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "number") return v.is_number();
  if (t == "integer") {
    if (v.is_number_integer()) return true;
    return v.is_number_float() && std::isfinite(v.get<double>()) && std::trunc(v.get<double>()) == v.get<double>();
  }
  if (t == "null") return v.is_null();
  return false;
}

const json& schema_root() {
  static const json root = json::parse(experiment_schema());
  return root;
}

void check(const json& v, const json& s, const std::string& path) {
  if (s.is_boolean()) {
    if (!s.get<bool>()) config_error(path, "not allowed");
    return;
  }
  if (s.contains("anyOf")) {
    for (const auto& alt : s["anyOf"]) {
      try {
        check(v, alt, path);
        return;
      } catch (const Error&) {
      }
    }
    config_error(path, "value " + v.dump() + " matches none of the allowed forms");
  }
  if (s.contains("type")) {
    const json& t = s["type"];
    bool ok = false;
    if (t.is_string()) ok = type_matches(v, t.get<std::string>());
    else
      for (const auto& x : t) ok = ok || type_matches(v, x.get<std::string>());
    if (!ok) config_error(path, "expected type " + t.dump() + ", got " + v.dump());
  }
  if (s.contains("const") && v != s["const"]) config_error(path, "expected " + s["const"].dump());
  if (s.contains("enum")) {
    const json& e = s["enum"];
    if (std::find(e.begin(), e.end(), v) == e.end()) config_error(path, v.dump() + " is not one of " + e.dump());
  }
  if (v.is_number()) {
    double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>())
      config_error(path, "must be >= " + s["minimum"].dump());
    if (s.contains("maximum") && x > s["maximum"].get<double>())
      config_error(path, "must be <= " + s["maximum"].dump());
    if (s.contains("exclusiveMinimum") && !(x > s["exclusiveMinimum"].get<double>()))
      config_error(path, "must be > " + s["exclusiveMinimum"].dump());
  }
  if (v.is_string() && s.contains("pattern")) {
    if (!std::regex_search(v.get<std::string>(), std::regex(s["pattern"].get<std::string>())))
      config_error(path, "does not match " + s["pattern"].get<std::string>());
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
      config_error(path, "needs at least " + s["minItems"].dump() + " items");
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
      config_error(path, "allows at most " + s["maxItems"].dump() + " items");
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], path + "[" + std::to_string(i) + "]");
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& r : s["required"])
        if (!v.contains(r.get<std::string>())) config_error(path, "missing required key '" + r.get<std::string>() + "'");
    const json* props = s.contains("properties") ? &s["properties"] : nullptr;
    for (const auto& [key, val] : v.items()) {
      std::string sub = path + "." + key;
      if (props && props->contains(key)) {
        check(val, (*props)[key], sub);
      } else if (s.contains("additionalProperties")) {
        const json& extra = s["additionalProperties"];
        if (extra.is_boolean() && !extra.get<bool>()) config_error(sub, "unknown key");
        check(val, extra, sub);
      }
    }
  }
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    config_error("$", std::string("invalid JSON: ") + e.what());
  }
}

// ---- config building ----

double number_or_inf(const json& v) { return v.is_string() ? std::numeric_limits<double>::infinity() : v.get<double>(); }

template <typename T>
void get(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj[key].get<T>();
}

double power_field(const json& obj, const std::string& section, const char* base, double fallback_w) {
  std::string dbm = std::string(base) + "_dbm", w = std::string(base) + "_w";
  bool has_dbm = obj.contains(dbm), has_w = obj.contains(w);
  if (has_dbm && has_w) config_error("$." + section + "." + base, "give " + dbm + " or " + w + ", not both");
  if (has_dbm) return dbm_to_watts(obj[dbm].get<double>());
  if (has_w) return obj[w].get<double>();
  return fallback_w;
}

SemiflConfig build_sim(const json& j) {
  SemiflConfig c;
  const json empty = json::object();
  auto section = [&](const char* k) -> const json& { return j.contains(k) ? j[k] : empty; };

  get(j, "rounds", c.rounds);

  const json& n = section("network");
  NetworkConfig& net = c.net;
  get(n, "K", net.K);
  get(n, "N_r", net.N_r);
  get(n, "B_hz", net.B);
  net.sigma2 = power_field(n, "network", "sigma2", dbm_to_watts(-80.0));
  net.p_max = power_field(n, "network", "p_max", dbm_to_watts(23.0));
  get(n, "T_s", net.T_s);
  get(n, "M", net.M);
  get(n, "D", net.D);
  get(n, "Cbar", net.Cbar);
  get(n, "Ctilde", net.Ctilde);
  get(n, "kappa_hat", net.kappa_hat);
  get(n, "kappa_tilde", net.kappa_tilde);
  get(n, "fhat_max", net.fhat_max);
  get(n, "ftilde_max", net.ftilde_max);
  get(n, "Q", net.Q);
  get(n, "Q1", net.Q1);
  if (n.contains("Chat") && n.contains("Chat_range")) config_error("$.network.Chat", "give Chat or Chat_range, not both");
  if (n.contains("Chat")) {
    auto v = n["Chat"].get<std::vector<double>>();
    if (static_cast<int>(v.size()) != net.K) config_error("$.network.Chat", "needs one entry per device (K)");
    net.Chat = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
  } else if (n.contains("Chat_range")) {
    auto r = n["Chat_range"].get<std::vector<double>>();
    if (r[0] > r[1]) config_error("$.network.Chat_range", "lower end exceeds upper end");
    net.Chat = spread_cycles(net.K, r[0], r[1]);
  } else {
    net.Chat = spread_cycles(net.K);
  }

  const json& t = section("thresholds");
  get(t, "eps1", c.thr.eps1);
  get(t, "eps2", c.thr.eps2);
  get(t, "eps3", c.thr.eps3);
  get(t, "eps4", c.thr.eps4);
  get(t, "theta_min", c.thr.theta_min);
  get(t, "theta_max", c.thr.theta_max);
  get(t, "T_max", c.thr.T_max);

  const json& th = section("theory");
  get(th, "L", c.theory.L);
  get(th, "mu", c.theory.mu);
  get(th, "A2", c.theory.A2);
  get(th, "eps", c.theory.eps);

  const json& s = section("solver");
  if (s.contains("allocation")) c.allocation_solver = parse_allocation_solver(s["allocation"].get<std::string>());
  get(s, "beta", c.solver.beta);
  get(s, "dc_max_iter", c.solver.dc_max_iter);
  get(s, "bcd_max_iter", c.solver.bcd_max_iter);
  get(s, "tol_obj", c.solver.tol_obj);
  get(s, "tol_rank", c.solver.tol_rank);
  get(s, "inner_max_iter", c.solver.inner_max_iter);
  get(s, "inner_fail_gap", c.solver.inner_fail_gap);
  get(s, "lp_tol", c.solver.lp_tol);
  get(s, "sdr_warm_start", c.solver.sdr_warm_start);
  if (s.contains("field"))
    c.solver.field = s["field"] == "real_composite" ? SdpField::RealComposite : SdpField::Hermitian;
  if (s.contains("init")) c.solver.init = s["init"] == "box_mid" ? InitStrategy::BoxMid : InitStrategy::LatencySplit;

  const json& l = section("learner");
  if (l.contains("kind")) c.learner.kind = parse_learner(l["kind"].get<std::string>());
  get(l, "features", c.learner.features);
  get(l, "shallow_features", c.learner.shallow_features);
  get(l, "hidden", c.learner.hidden);
  get(l, "classes", c.learner.classes);
  get(l, "separation", c.learner.separation);
  get(l, "l2", c.learner.l2);
  get(l, "mu", c.learner.mu);
  get(l, "L", c.learner.L);
  get(l, "sample_std", c.learner.sample_std);

  const json& d = section("data");
  if (d.contains("partition"))
    c.partition.scheme = d["partition"] == "dirichlet" ? PartitionSpec::Scheme::Dirichlet : PartitionSpec::Scheme::Iid;
  if (d.contains("alpha")) c.partition.alpha = number_or_inf(d["alpha"]);
  if (c.partition.scheme == PartitionSpec::Scheme::Dirichlet && !d.contains("alpha"))
    config_error("$.data.alpha", "dirichlet partition needs alpha");
  get(d, "test_per_class", c.test_per_class);

  const json& ch = section("channel");
  if (ch.contains("fading") && ch["fading"] == "rician") {
    c.fading = Fading::rician(ch.contains("k_factor") ? number_or_inf(ch["k_factor"]) : 0.0);
  } else if (ch.contains("k_factor")) {
    config_error("$.channel.k_factor", "only meaningful with rician fading");
  }
  get(ch, "csi_error", c.csi_error);
  if (ch.contains("noise")) {
    const json& nz = ch["noise"];
    std::string kind = nz.value("kind", "gaussian");
    if (kind == "gaussian") {
      if (nz.contains("alpha") || nz.contains("scale")) config_error("$.channel.noise", "alpha/scale need alpha_stable");
      c.noise = NoiseModel::gaussian(power_field(nz, "channel.noise", "sigma2", net.sigma2));
    } else {
      if (nz.contains("sigma2_dbm") || nz.contains("sigma2_w"))
        config_error("$.channel.noise", "sigma2 applies to gaussian noise only");
      if (!nz.contains("alpha") || !nz.contains("scale")) config_error("$.channel.noise", "alpha_stable needs alpha and scale");
      c.noise = NoiseModel::alpha_stable(nz["alpha"].get<double>(), nz["scale"].get<double>());
    }
  }

  const json& tr = section("training");
  if (tr.contains("allocator")) c.allocator = parse_allocator(tr["allocator"].get<std::string>());
  if (tr.contains("region_mode")) c.region_mode = parse_region_mode(tr["region_mode"].get<std::string>());
  if (tr.contains("aggregation")) c.aggregation = parse_aggregation(tr["aggregation"].get<std::string>());
  get(tr, "eta", c.eta);
  if (tr.contains("eta_stable")) c.eta_stable = tr["eta_stable"].get<double>();
  get(tr, "loss_threshold", c.loss_threshold);
  if (tr.contains("fixed_theta")) {
    auto v = tr["fixed_theta"].get<std::vector<double>>();
    c.fixed_theta = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
  }
  if (tr.contains("detector")) {
    const json& dt = tr["detector"];
    get(dt, "window", c.detector.window);
    get(dt, "slope_threshold", c.detector.slope_threshold);
    get(dt, "patience", c.detector.patience);
  }

  auto section_check = [](const char* path, auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      config_error(path, e.what());
    }
  };
  section_check("$.network", [&] { c.net.validate(); });
  section_check("$.thresholds", [&] { c.thr.validate(); });
  section_check("$.solver", [&] { c.solver.validate(); });
  section_check("$.learner", [&] { c.learner.validate(); });
  section_check("$.training.detector", [&] { c.detector.validate(); });
  section_check("$.channel.noise", [&] { c.aggregation_noise().validate(); });
  section_check("$", [&] { c.validate(); });
  return c;
}

// "section.field" -> JSON pointer
json::json_pointer axis_pointer(const std::string& axis) {
  auto dot = axis.find('.');
  return json::json_pointer("/" + axis.substr(0, dot) + "/" + axis.substr(dot + 1));
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  auto T = static_cast<std::size_t>(threads > 0 ? threads : static_cast<int>(hw));
  T = std::max<std::size_t>(1, std::min(T, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < T; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            f(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  // lowest index first, so the reported failure does not depend on scheduling
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Unreached threshold counts as +inf.
double median_rounds(const std::vector<RunResult>& runs) {
  std::vector<double> r;
  for (const auto& x : runs)
    r.push_back(x.traj.rounds_to_threshold < 0 ? std::numeric_limits<double>::infinity() : x.traj.rounds_to_threshold);
  return median(r);
}

double median_final(const std::vector<RunResult>& runs) {
  std::vector<double> r;
  for (const auto& x : runs) r.push_back(x.traj.final_loss());
  return median(r);
}

ojson finite_or_null(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

ojson seed_summary(const RunResult& r) {
  const Trajectory& t = r.traj;
  ojson o;
  o["seed"] = r.seed;
  o["rounds_run"] = t.rounds.size();
  o["rounds_to_threshold"] = t.rounds_to_threshold;
  o["initial_loss"] = finite_or_null(t.initial_loss);
  o["final_loss"] = finite_or_null(t.final_loss());
  o["diverged"] = t.diverged;
  o["delta_d"] = t.delta_d;
  o["energy_uplink"] = t.energy_uplink;
  o["energy_compute"] = t.energy_compute;
  o["energy_total"] = t.energy_uplink + t.energy_compute;
  return o;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

ojson complex_vec(const Eigen::VectorXcd& v) {
  ojson a = ojson::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
  return a;
}

std::string file_label(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')) c = '_';
  return s;
}

SemiflConfig with_learner_dims(SemiflConfig c, std::uint64_t seed) {
  auto L = make_learner(c.learner, seed);
  c.net.Q = static_cast<long>(L->dim());
  c.net.Q1 = static_cast<long>(L->shallow_dim());
  return c;
}

}  // namespace

void validate_against_schema(std::string_view json_text) { check(parse_json(json_text), schema_root(), "$"); }

ExperimentConfig parse_config(std::string_view json_text) {
  json j = parse_json(json_text);
  check(j, schema_root(), "$");

  ExperimentConfig c;
  get(j, "name", c.name);
  if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  get(j, "threads", c.threads);
  json base = j;
  base.erase("sweep");
  c.sim = build_sim(base);

  if (j.contains("sweep")) {
    const json& sw = j["sweep"];
    SweepAxis ax;
    ax.axis = sw["axis"].get<std::string>();
    std::vector<std::pair<std::string, json>> fields{{ax.axis, sw["values"]}};
    if (sw.contains("paired"))
      for (const auto& [k, v] : sw["paired"].items()) {
        if (!std::regex_match(k, std::regex("[A-Za-z0-9_]+\\.[A-Za-z0-9_]+")))
          config_error("$.sweep.paired." + k, "expected section.field");
        if (v.size() != sw["values"].size()) config_error("$.sweep.paired." + k, "length differs from values");
        fields.emplace_back(k, v);
      }
    for (std::size_t i = 0; i < sw["values"].size(); ++i) {
      json point = base;
      for (const auto& [field, vals] : fields) point[axis_pointer(field)] = vals[i];
      try {
        check(point, schema_root(), "$");
        ax.points.push_back(build_sim(point));
      } catch (const Error& e) {
        config_error("$.sweep.values[" + std::to_string(i) + "]", e.what());
      }
      const json& v = sw["values"][i];
      ax.labels.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
    c.sweep = std::move(ax);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, path.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<RunResult> run_seeds(const ExperimentConfig& cfg) {
  std::vector<RunResult> out(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t i) {
    out[i].seed = cfg.seeds[i];
    out[i].traj = run_semifl(cfg.sim, cfg.seeds[i]);
  });
  return out;
}

std::string format_csv(const std::vector<RunResult>& runs) {
  std::string s = std::string(kCsvHeader) + "\n";
  for (const auto& r : runs) {
    for (const auto& x : r.traj.rounds) {
      s += std::to_string(r.seed) + "," + std::to_string(x.round) + "," + region_name(x.region);
      for (double v : {x.loss, x.accuracy, x.mse, x.nu, x.omega, x.mean_theta, x.E_uplink, x.E_compute, x.E_total,
                       x.T_total})
        s += "," + fmt17(v);
      s += "\n";
    }
  }
  return s;
}

std::string format_summary(const ExperimentConfig& cfg, const std::vector<RunResult>& runs) {
  ojson o;
  o["name"] = cfg.name;
  o["rounds"] = cfg.sim.rounds;
  o["loss_threshold"] = cfg.sim.loss_threshold;
  o["median_rounds_to_threshold"] = finite_or_null(median_rounds(runs));
  o["median_final_loss"] = finite_or_null(median_final(runs));
  ojson seeds = ojson::array();
  for (const auto& r : runs) seeds.push_back(seed_summary(r));
  o["seeds"] = seeds;
  return o.dump(2) + "\n";
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorCode::InvalidArgument, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ExperimentFiles run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  auto runs = run_seeds(cfg);
  ExperimentFiles f{out / (cfg.name + ".csv"), out / (cfg.name + ".summary.json")};
  write_atomic(f.csv, format_csv(runs));
  write_atomic(f.summary, format_summary(cfg, runs));
  return f;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  require(cfg.sweep.has_value(), "config has no sweep section");
  const SweepAxis& ax = *cfg.sweep;
  const std::size_t P = ax.points.size(), S = cfg.seeds.size();
  std::vector<SweepPoint> pts(P);
  for (std::size_t p = 0; p < P; ++p) {
    pts[p].label = ax.labels[p];
    pts[p].runs.resize(S);
  }
  parallel_for(P * S, cfg.threads, [&](std::size_t i) {
    std::size_t p = i / S, s = i % S;
    pts[p].runs[s].seed = cfg.seeds[s];
    pts[p].runs[s].traj = run_semifl(ax.points[p], cfg.seeds[s]);
  });

  std::string csv = "point,seed,rounds_to_threshold,initial_loss,final_loss,diverged,delta_d,energy_uplink,energy_compute\n";
  ojson points = ojson::array();
  for (const auto& pt : pts) {
    write_atomic(out / (cfg.name + "." + file_label(ax.axis + "=" + pt.label) + ".csv"), format_csv(pt.runs));
    ojson o;
    o["value"] = pt.label;
    o["median_rounds_to_threshold"] = finite_or_null(median_rounds(pt.runs));
    o["median_final_loss"] = finite_or_null(median_final(pt.runs));
    ojson seeds = ojson::array();
    for (const auto& r : pt.runs) {
      seeds.push_back(seed_summary(r));
      const Trajectory& t = r.traj;
      csv += pt.label + "," + std::to_string(r.seed) + "," + std::to_string(t.rounds_to_threshold) + "," +
             fmt17(t.initial_loss) + "," + fmt17(t.final_loss()) + "," + (t.diverged ? "1" : "0") + "," +
             fmt17(t.delta_d) + "," + fmt17(t.energy_uplink) + "," + fmt17(t.energy_compute) + "\n";
    }
    o["seeds"] = seeds;
    points.push_back(o);
  }
  ojson summary;
  summary["name"] = cfg.name;
  summary["axis"] = ax.axis;
  summary["points"] = points;
  write_atomic(out / (cfg.name + ".sweep.csv"), csv);
  write_atomic(out / (cfg.name + ".sweep.json"), summary.dump(2) + "\n");
  return pts;
}

std::string optimize_json(const ExperimentConfig& cfg, Region region, AllocatorKind kind, std::uint64_t seed) {
  const SemiflConfig& c = cfg.sim;
  ChannelRealization ch = round_channels(c, seed, 1);
  BcdRequest req;
  req.region = region;
  req.kind = kind;
  req.seed = seed;
  req.theta_fixed = c.fixed_theta;
  BcdResult r = run_bcd(req, c.net, ch, c.thr, c.theory, c.solver);

  ojson a;
  a["theta"] = to_vec(r.alloc.theta);
  a["fhat"] = to_vec(r.alloc.fhat);
  a["ftilde"] = r.alloc.ftilde;
  a["nu"] = r.alloc.sf.nu;
  a["omega"] = r.alloc.sf.omega;
  a["zeta"] = to_vec(r.alloc.sf.zeta);
  a["b"] = complex_vec(r.alloc.bf.b);
  ojson v = ojson::array();
  for (const auto& x : r.alloc.bf.v) v.push_back(complex_vec(x));
  a["v"] = v;

  const CostBreakdown& k = r.costs;
  ojson cb;
  cb["T_G"] = k.T_G;
  cb["T_D"] = to_vec(k.T_D);
  cb["T_F"] = to_vec(k.T_F);
  cb["T_E"] = k.T_E;
  cb["E_G"] = to_vec(k.E_G);
  cb["E_D"] = to_vec(k.E_D);
  cb["E_F"] = to_vec(k.E_F);
  cb["E_E"] = k.E_E;
  cb["T_all"] = k.T_all;
  cb["E_all"] = k.E_all;
  cb["E_uplink"] = k.E_uplink();
  cb["E_compute"] = k.E_compute();

  ojson o;
  o["region"] = region_name(region);
  o["allocator"] = allocator_name(kind);
  o["seed"] = seed;
  o["mse"] = mse_closed_form(c.net.K, r.alloc.sf.omega, r.alloc.sf.nu, c.net.sigma2);
  o["allocation"] = a;
  o["costs"] = cb;
  o["trace"] = r.trace;
  o["iterations"] = r.iterations;
  return o.dump(2) + "\n";
}

std::string bounds_json(const ExperimentConfig& cfg, std::uint64_t seed) {
  const SemiflConfig c = with_learner_dims(cfg.sim, seed);
  const AssumptionConstants& ac = c.theory;
  const long Q = c.net.Q;
  const int K = c.net.K;
  auto learner = make_learner(c.learner, seed);
  const int C = learner->n_classes();

  ojson o;
  o["asserted"] = c.learner.kind == LearnerKind::Quadratic;
  o["Q"] = Q;
  o["constants"] = {{"L", ac.L}, {"mu", ac.mu}, {"A2", ac.A2}, {"eps", ac.eps}};
  auto guarded = [&](const char* key, auto&& f) {
    try {
      o[key] = f();
    } catch (const Error& e) {
      o[key] = {{"error", error_name(e.code())}, {"message", e.what()}};
    }
  };

  ChannelRealization ch = round_channels(c, seed, 1);
  auto alloc = [&](Region r) {
    BcdRequest req;
    req.region = r;
    req.kind = c.allocator;
    req.seed = seed;
    req.theta_fixed = c.fixed_theta;
    return initial_allocation(req, c.net, ch, c.thr, ac, c.solver);
  };
  std::optional<Allocation> ns, st;
  guarded("allocation_ns", [&] {
    ns = alloc(Region::NonStable);
    return ojson{{"nu", ns->sf.nu}, {"omega", ns->sf.omega}, {"mean_theta", ns->theta.mean()}};
  });
  guarded("allocation_s", [&] {
    st = alloc(Region::Stable);
    return ojson{{"nu", st->sf.nu}, {"omega", st->sf.omega}, {"mean_theta", st->theta.mean()}};
  });
  const double delta_d = heterogeneity_delta(prepare_data(c, *learner, seed).partition);
  o["delta_d"] = delta_d;
  const double eta = c.eta, s2 = c.net.sigma2;

  if (ns) {
    MixWeights mw = mix_weights(ns->theta);
    double ratio = std::sqrt(ns->sf.omega / ns->sf.nu);
    guarded("thm1_lower_bound",
            [&] { return thm1_lower_bound(eta, ac.mu, ac.eps, ac.A2, ratio, mw.rhoL, s2, Q, ns->sf.nu); });
    guarded("cor1_lower_bound", [&] {
      return cor1_lower_bound(eta, ac.mu, ac.eps, ac.A2, ratio, mw.rhoL, mw.rhoE, std::sqrt(s2), Q, ns->sf.nu,
                              ns->sf.omega, C, K, delta_d);
    });
  }
  if (st) {
    MixWeights mw = mix_weights(st->theta);
    guarded("thm2_gap", [&] { return thm2_gap(st->sf.nu, ac.L, ac.mu, ac.A2, s2, Q); });
    guarded("cor2_gap", [&] {
      Cor2Result r = cor2_gap(ac.L, ac.mu, ac.A2, s2, Q, st->sf.nu, C, K, {delta_d}, {mw.rhoL});
      return ojson{{"value", r.value},
                   {"first_term", r.first_term},
                   {"accumulation", r.accumulation},
                   {"remainder_bound", r.remainder_bound},
                   {"contraction", r.contraction}};
    });
  }
  if (ns && st) {
    guarded("two_region_limit", [&] {
      return two_region_gap(1, ns->sf.nu, st->sf.nu, ac.L, ac.mu, ac.A2, s2, Q, 0.0, 1).limit;
    });
  }
  return o.dump(2) + "\n";
}

std::string error_json(const std::exception& e) {
  ojson o;
  if (const auto* se = dynamic_cast<const Error*>(&e)) {
    o["error"] = error_name(se->code());
    o["message"] = se->what();
    if (se->round >= 0) o["round"] = se->round;
    if (se->iteration >= 0) o["iteration"] = se->iteration;
  } else {
    o["error"] = "Internal";
    o["message"] = e.what();
  }
  return o.dump();
}

}  // namespace semifl
