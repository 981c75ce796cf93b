#include "hjn/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "hjn/acceptance.hpp"
#include "hjn/audit.hpp"
#include "hjn/ergodic.hpp"
#include "hjn/io.hpp"
#include "hjn/skorokhod.hpp"
#include "hjn/variational.hpp"
#include "hjn/weak_kam.hpp"

namespace hjn {

namespace fs = std::filesystem;

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["artifact"] = "hj-neumann";
  j["version"] = version;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["wall_clock_s"] = wall_clock;
  j["stages"] = nlohmann::ordered_json::array();
  for (const auto& [name, s] : stages) j["stages"].push_back({{"name", name}, {"seconds", s}});
  j["files"] = files;
  nlohmann::ordered_json res = nlohmann::ordered_json::object();
  for (const auto& [k, v] : results) res[k] = v;
  j["results"] = res;
  return j.dump(2) + "\n";
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const GeometryError*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  return 1;
}

namespace {

using Clock = std::chrono::steady_clock;

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, const RunOptions& opt) : c_(cfg), opt_(opt) {
    out_ = opt.out.empty() ? cfg.out : opt.out;
    fs::create_directories(out_);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(cfg.hash()));
    m_.config_hash = hex;
    m_.command = cfg.command;
  }

  RunManifest go() {
    auto t0 = Clock::now();
    const std::string& cmd = c_.command;
    if (cmd == "evolve") evolve_cmd();
    else if (cmd == "ergodic") ergodic_cmd();
    else if (cmd == "value") value_cmd();
    else if (cmd == "crosscheck") crosscheck_cmd();
    else if (cmd == "skorokhod") skorokhod_cmd();
    else if (cmd == "distance") distance_cmd();
    else if (cmd == "aubry") aubry_cmd();
    else if (cmd == "asymptotic") asymptotic_cmd();
    else if (cmd == "monotonicity") monotonicity_cmd();
    else if (cmd == "audit") audit_cmd();
    else if (cmd == "report") report_cmd();
    else throw ConfigError("unknown command '" + cmd + "'");
    m_.wall_clock = std::chrono::duration<double>(Clock::now() - t0).count();
    m_.files.push_back("manifest.json");
    write_text((fs::path(out_) / "manifest.json").string(), m_.to_json());
    return m_;
  }

 private:
  // runs fn, records its time, and prefixes errors with the stage name
  template <class F>
  auto stage(const std::string& name, F&& fn) {
    if (opt_.verbose && opt_.log) *opt_.log << "[" << name << "]\n";
    auto t0 = Clock::now();
    auto done = [&] { m_.stages.emplace_back(name, std::chrono::duration<double>(Clock::now() - t0).count()); };
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        done();
      } else {
        auto r = fn();
        done();
        return r;
      }
    } catch (const ConfigError& e) {
      throw ConfigError(name + ": " + e.what());
    } catch (const GeometryError& e) {
      throw GeometryError(name + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError(name + ": " + e.what());
    }
  }

  std::string path(const std::string& file) {
    m_.files.push_back(file);
    return (fs::path(out_) / file).string();
  }
  void result(const std::string& k, const std::string& v) { m_.results.emplace_back(k, v); }
  void result(const std::string& k, double v) { result(k, format_double(v)); }

  GridPtr grid() {
    if (!grid_) grid_ = stage("geometry", [&] { return build_grid(make_domain(c_), c_.h); });
    return grid_;
  }
  GridField u0() {
    Expr e = Expr::parse(c_.u0, {"x", "y"});
    return sample_field(grid(), [&](Vec x) { return e(x.x, x.y); });
  }
  Hamiltonian H() { return make_hamiltonian(c_); }
  BoundaryModel B() { return make_boundary(c_); }
  std::vector<double> schedule() { return c_.eps.empty() ? default_eps_schedule() : c_.eps; }

  ErgodicPair ergodic() {
    return stage("ergodic", [&] {
      return ergodic_limit(grid(), H(), B(), problem_kind(c_), schedule(), scheme_options(c_), c_.cauchy_tol);
    });
  }

  EvolveOptions evolve_options() {
    EvolveOptions o;
    o.scheme = scheme_options(c_);
    o.dt = c_.dt;
    return o;
  }

  void plot_field(const GridField& f, const std::string& file, const std::string& title) {
    PlotOptions po;
    po.title = title;
    if (f.grid->dim() == 2) po.ylabel = "y";
    write_text(path(file), svg_heat(f, po));
  }

  void plot_stamps(const SpaceTimeField& f, const std::string& file, const std::string& title) {
    if (f.grid->dim() == 2) {
      plot_field({f.grid, f.values.back()}, file, title + " at t=" + format_double(f.times.back()));
      return;
    }
    std::vector<Series> ser;
    std::size_t stride = std::max<std::size_t>(1, f.times.size() / 6);
    for (std::size_t k = 0; k < f.times.size(); k += stride) {
      if (k + stride >= f.times.size()) k = f.times.size() - 1;
      Series s{"t=" + format_double(f.times[k]), {}, {}};
      for (std::size_t i = 0; i < f.grid->size(); ++i) {
        s.x.push_back(f.grid->position(i).x);
        s.y.push_back(f.values[k][i]);
      }
      ser.push_back(std::move(s));
    }
    PlotOptions po;
    po.title = title;
    write_text(path(file), svg_lines(ser, po));
  }

  void evolve_cmd() {
    GridField init = u0();
    auto evo = stage("evolve", [&] { return evolve(init, H(), B(), problem_kind(c_), c_.T, c_.record_every, evolve_options()); });
    write_csv(path("evolve.csv"), spacetime_table(evo));
    plot_stamps(evo, "evolve.svg", "u(x,t)");
    result("dt", evo.dt);
    result("stamps", std::to_string(evo.times.size()));
  }

  void ergodic_cmd() {
    ErgodicPair ep = ergodic();
    Table t = field_table(ep.v);
    t.meta["c"] = format_double(ep.c);
    write_csv(path("ergodic.csv"), t);
    Table tr;
    tr.meta["x0"] = format_double(grid()->position(ep.anchor).x);
    tr.columns = {"eps", "eps_u"};
    Series s{"eps u_eps(x0)", {}, {}};
    for (auto [e, v] : ep.trace) {
      tr.rows.push_back({e, v});
      s.x.push_back(e);
      s.y.push_back(v);
    }
    write_csv(path("eps_trace.csv"), tr);
    PlotOptions po;
    po.title = "vanishing discount";
    po.xlabel = "eps";
    po.ylabel = "eps u_eps(x0)";
    po.log_x = true;
    write_text(path("eps_trace.svg"), svg_lines({s}, po));
    plot_field(ep.v, "ergodic.svg", "ergodic function v, c=" + format_double(ep.c));
    result("c", ep.c);
    result("residual", ep.residual);
    if (!ep.warning.empty()) result("warning", ep.warning);
  }

  ValueTable value_table(const GridField& init) {
    return stage("value", [&] {
      ValueOptions vo;
      vo.samples = c_.samples;
      vo.ladder = c_.ladder;
      vo.delta = c_.delta;
      vo.record_every = c_.record_every;
      return value(init, H(), B(), problem_kind(c_), c_.T, vo);
    });
  }

  void value_cmd() {
    ValueTable tb = value_table(u0());
    SpaceTimeField f{tb.grid, tb.times, tb.values, tb.dt};
    if (c_.record_every > 0) {
      // keep only the requested stamps
      SpaceTimeField g{tb.grid, {}, {}, tb.dt};
      for (std::size_t k = 0; k < tb.times.size(); ++k) {
        double q = tb.times[k] / c_.record_every;
        if (std::abs(q - std::round(q)) < 1e-9 || k + 1 == tb.times.size()) {
          g.times.push_back(tb.times[k]);
          g.values.push_back(tb.values[k]);
        }
      }
      f = std::move(g);
    }
    write_csv(path("value.csv"), spacetime_table(f));
    plot_stamps(f, "value.svg", "value function");
    result("dt", tb.dt);
  }

  void crosscheck_cmd() {
    GridField init = u0();
    double rec = c_.record_every > 0 ? c_.record_every : c_.T;
    auto evo = stage("evolve", [&] { return evolve(init, H(), B(), problem_kind(c_), c_.T, rec, evolve_options()); });
    ValueTable tb = stage("value", [&] {
      ValueOptions vo;
      vo.samples = c_.samples;
      vo.ladder = c_.ladder;
      vo.delta = c_.delta;
      vo.record_every = rec;
      return value(init, H(), B(), problem_kind(c_), c_.T, vo);
    });
    CrosscheckReport rep = stage("crosscheck", [&] { return crosscheck(tb, evo); });
    Table t;
    t.meta["h"] = format_double(c_.h);
    t.meta["dt"] = format_double(evo.dt);
    t.columns = {"t", "error"};
    Series s{"|value - fd|", rep.times, rep.errors};
    for (std::size_t k = 0; k < rep.times.size(); ++k) t.rows.push_back({rep.times[k], rep.errors[k]});
    write_csv(path("crosscheck.csv"), t);
    PlotOptions po;
    po.title = "representation cross-check";
    po.xlabel = "t";
    po.ylabel = "sup error";
    write_text(path("crosscheck.svg"), svg_lines({s}, po));
    result("max_error", rep.max_error);
    result("final_error", rep.final_error);
  }

  void skorokhod_cmd() {
    Domain dom = make_domain(c_);
    BoundaryModel b = B();
    Expr vx = Expr::parse(c_.vx, {"t"}), vy = Expr::parse(c_.vy, {"t"});
    Control v = [&](double t) {
      double a[1] = {t};
      return Vec{vx.eval(a), vy.eval(a)};
    };
    double dt = c_.dt > 0 ? c_.dt : 1e-3;
    Vec x0{c_.x0[0], c_.x0.size() > 1 ? c_.x0[1] : 0.0};
    ObliqueSelection sel(b, dom.dim(), c_.delta);
    auto tr = stage("skorokhod", [&] { return integrate(dom, sel, x0, v, c_.T, dt); });
    BoundsReport br = verify_bounds(tr, dom, b.theta(), b.lipschitz());
    Table t;
    t.meta["dt"] = format_double(dt);
    t.columns = {"t", "x", "y", "l", "f"};
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      double l = k ? tr.l[k - 1] : 0.0, f = k ? tr.f[k - 1] : 0.0;
      t.rows.push_back({tr.times[k], tr.eta[k].x, tr.eta[k].y, l, f});
    }
    write_csv(path("skorokhod.csv"), t);
    Series s{"eta", {}, {}};
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      s.x.push_back(dom.dim() == 1 ? tr.times[k] : tr.eta[k].x);
      s.y.push_back(dom.dim() == 1 ? tr.eta[k].x : tr.eta[k].y);
    }
    PlotOptions po;
    po.title = "reflected path";
    po.xlabel = dom.dim() == 1 ? "t" : "x";
    po.ylabel = dom.dim() == 1 ? "x" : "y";
    write_text(path("skorokhod.svg"), svg_lines({s}, po));
    result("max_l_ratio", br.max_l_ratio);
    result("l_bound", br.l_bound);
    result("max_speed_ratio", br.max_speed_ratio);
    result("speed_bound", br.speed_bound);
    result("max_rho", br.max_rho);
    result("violations", std::to_string(br.violations.size()));
  }

  ActionMetric metric() {
    ErgodicPair ep = ergodic();
    auto [Hn, Bn] = normalize(H(), B(), ep.c, problem_kind(c_));
    result("c", ep.c);
    return stage("metric", [&] { return ActionMetric(grid(), Hn, Bn); });
  }

  void distance_cmd() {
    ActionMetric m = metric();
    Vec y = c_.source.empty() ? grid()->domain().centroid()
                              : Vec{c_.source[0], c_.source.size() > 1 ? c_.source[1] : 0.0};
    int node = grid()->nearest_node(y);
    auto d = stage("distance", [&] { return distance_from(m, node); });
    Table t = field_table({grid(), d});
    t.meta["source"] = std::to_string(node);
    write_csv(path("distance.csv"), t);
    plot_field({grid(), d}, "distance.svg", "d(x, y)");
  }

  std::pair<ActionMatrix, AubryMask> aubry_pair() {
    ActionMetric m = metric();
    ActionMatrix A = stage("action", [&] { return action_matrix(m); });
    AubryMask M = aubry_set(A, c_.aubry_tol < 0 ? std::numeric_limits<double>::quiet_NaN() : c_.aubry_tol);
    result("aubry_tol", M.tol);
    result("aubry_nodes", std::to_string(std::count(M.mask.begin(), M.mask.end(), 1)));
    if (M.forced) result("warning", "no node passed the tolerance; kept the smallest residual");
    return {std::move(A), std::move(M)};
  }

  void aubry_cmd() {
    auto [A, M] = aubry_pair();
    const Grid& g = *A.grid;
    Table t;
    t.meta["h"] = format_double(g.h());
    t.meta["tol"] = format_double(M.tol);
    t.columns = g.dim() == 1 ? std::vector<std::string>{"x", "residual", "mask"}
                             : std::vector<std::string>{"x", "y", "residual", "mask"};
    for (std::size_t i = 0; i < g.size(); ++i) {
      Vec p = g.position(i);
      if (g.dim() == 1)
        t.rows.push_back({p.x, M.residual[i], double(M.mask[i])});
      else
        t.rows.push_back({p.x, p.y, M.residual[i], double(M.mask[i])});
    }
    write_csv(path("aubry.csv"), t);
    std::vector<double> mk(M.mask.begin(), M.mask.end());
    plot_field({A.grid, mk}, "aubry.svg", "Aubry mask");
  }

  void asymptotic_cmd() {
    auto [A, M] = aubry_pair();
    GridField init = u0();
    GridField u = stage("asymptotic", [&] { return asymptotic_profile(init, A, M); });
    write_csv(path("asymptotic.csv"), field_table(u));
    plot_field(u, "asymptotic.svg", "asymptotic profile");
  }

  void monotonicity_cmd() {
    ErgodicPair ep = ergodic();
    auto [Hn, Bn] = normalize(H(), B(), ep.c, problem_kind(c_));
    GridField init = u0();
    double rec = c_.record_every > 0 ? c_.record_every : c_.T / 32.0;
    auto evo = stage("evolve", [&] { return evolve(init, Hn, Bn, problem_kind(c_), c_.T, rec, evolve_options()); });
    auto mt = stage("monotonicity", [&] { return monotonicity_trace(evo, ep.v, c_.eta, c_.shift, c_.per_node); });
    Table t;
    t.meta["eta"] = format_double(mt.eta);
    t.meta["shift"] = format_double(mt.shift);
    t.meta["C"] = format_double(mt.C);
    t.columns = {"s", "mu_plus", "mu_minus"};
    for (std::size_t k = 0; k < mt.s.size(); ++k) t.rows.push_back({mt.s[k], mt.mu_plus[k], mt.mu_minus[k]});
    write_csv(path("monotonicity.csv"), t);
    PlotOptions po;
    po.title = "monotonicity traces";
    po.xlabel = "s";
    po.ylabel = "mu";
    po.reference_y = 1.0;
    write_text(path("monotonicity.svg"),
               svg_lines({{"mu+", mt.s, mt.mu_plus}, {"mu-", mt.s, mt.mu_minus}}, po));
    result("c", ep.c);
    result("mu_plus_final", mt.mu_plus.back());
    result("mu_minus_final", mt.mu_minus.back());
  }

  void audit_cmd() {
    ErgodicPair ep = ergodic();
    AuditOptions ao;
    ao.sample_budget = c_.sample_budget;
    ao.seed = c_.seed;
    ao.eigenvalue = ep.c;
    AuditReport rep = stage("audit", [&] { return audit_assumptions(H(), B(), grid()->domain(), ao); });
    std::string txt = "# hj-neumann v" + std::string(kVersion) + " audit, c=" + format_double(ep.c) + "\n";
    for (const auto& it : rep.items) {
      std::string status = !it.applicable ? "n/a " : it.passed ? "pass" : "FAIL";
      txt += it.id + "\t" + status + "\tworst=" + format_double(it.worst) + "\tsamples=" + std::to_string(it.samples) +
             "\t" + it.description + (it.witness.empty() ? "" : "\twitness: " + it.witness) + "\n";
      result(it.id, status);
    }
    write_text(path("audit.txt"), txt);
  }

  void report_cmd() {
    std::string txt;
    auto results = stage("acceptance", [&] {
      return acceptance::run_all([&](const acceptance::Result& r) {
        if (opt_.log) *opt_.log << acceptance::format_line(r) << std::endl;
      });
    });
    for (const auto& r : results) {
      txt += acceptance::format_line(r) + "\n";
      result("criterion_" + std::to_string(r.id), r.passed ? "pass" : "fail");
      m_.acceptance_failed = m_.acceptance_failed || !r.passed;
    }
    write_text(path("acceptance.txt"), txt);
  }

  const ExperimentConfig& c_;
  const RunOptions& opt_;
  std::string out_;
  RunManifest m_;
  GridPtr grid_;
};

}  // namespace

RunManifest run(const ExperimentConfig& cfg, const RunOptions& opt) {
  set_threads(opt.threads);
  return Runner(cfg, opt).go();
}

}  // namespace hjn
