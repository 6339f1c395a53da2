#include "denjoy/pipelines.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "denjoy/blowup.hpp"
#include "denjoy/confspace.hpp"
#include "denjoy/denjoy_circle.hpp"
#include "denjoy/distortion.hpp"
#include "denjoy/error.hpp"
#include "denjoy/sampling.hpp"
#include "denjoy/svg.hpp"
#include "denjoy/trap.hpp"
#include "denjoy/version.hpp"

#ifndef DENJOY_VERSION
#define DENJOY_VERSION "dev"
#endif

namespace denjoy::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json vec_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Collects records, summary text and artifacts for one run.
class Session {
 public:
  explicit Session(const ExperimentConfig& cfg) : cfg_(cfg), rng_(cfg.seed), dir_(cfg.output_dir) {}

  const ExperimentConfig& cfg() const { return cfg_; }
  std::mt19937_64& rng() { return rng_; }

  void record(json j) { outcome_.records.push_back(j.dump()); }

  template <class... Args>
  void say(Args&&... args) {
    std::ostringstream os;
    os << std::setprecision(10);
    (os << ... << args);
    outcome_.summary += os.str() + "\n";
  }

  void fail() { outcome_.exit_code = kExitPipeline; }

  fs::path artifact(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    outcome_.artifacts.push_back(path);
    return path;
  }

  void plot(const std::string& name, const std::string& svg) {
    if (cfg_.plots) artifact(name, svg);
  }

  const fs::path& dir() const { return dir_; }

  RunOutcome finish() {
    outcome_.results_path = dir_ / "results.jsonl";
    outcome_.summary_path = dir_ / "summary.txt";
    std::ofstream res(outcome_.results_path, std::ios::binary);
    for (const auto& line : outcome_.records) res << line << '\n';
    std::ofstream sum(outcome_.summary_path, std::ios::binary);
    sum << outcome_.summary;
    return outcome_;
  }

 private:
  const ExperimentConfig& cfg_;
  std::mt19937_64 rng_;
  fs::path dir_;
  RunOutcome outcome_;
};

TranslationVector config_translation(const ExperimentConfig& cfg) {
  const auto t = cfg.translation();
  return make_translation(Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size())));
}

Matrix config_direction(const ExperimentConfig& cfg) {
  return cfg.direction == "shear" ? blowup::shear_direction(cfg.k) : blowup::diagonal_direction(cfg.k);
}

std::shared_ptr<const blowup::BallSystem> build_system(Session& s) {
  const auto& cfg = s.cfg();
  auto system = std::make_shared<const blowup::BallSystem>(blowup::build_ball_system(
      config_translation(cfg), cfg.window, blowup::Schedule{cfg.c_r, cfg.p}, cfg.v_max));
  const auto& cert = system->certificate();
  const double vol = blowup::total_volume(*system);
  long double oracle = 0.0L;
  for (int j = -system->window(); j <= system->window(); ++j) {
    const long double r = system->radius(j);
    oracle += std::pow(3.141592653589793238462643383279502884L, cfg.k / 2.0L) * std::pow(r, cfg.k) /
              std::tgamma(cfg.k / 2.0L + 1.0L);
  }
  s.record({{"record", "ball_system"},
            {"k", cfg.k},
            {"theta", vec_json(system->theta().theta)},
            {"J", system->window()},
            {"radius_0", system->radius(0)},
            {"repairs", system->repair_log().size()},
            {"summable_schedule", blowup::Schedule{cfg.c_r, cfg.p}.summable(cfg.k)},
            {"disjoint", cert.holds},
            {"worst_slack", cert.worst_slack},
            {"volume_sum", vol},
            {"volume_oracle", static_cast<double>(oracle)},
            {"budget", system->budget()}});
  s.say("ball system: k = ", cfg.k, ", J = ", system->window(), ", repairs = ",
        system->repair_log().size(), ", disjoint = ", cert.holds ? "yes" : "no",
        ", sum vol = ", vol, " (budget ", system->budget(), ")");
  return system;
}

// ---------------------------------------------------------------------------

void run_conf(Session& s) {
  const auto& cfg = s.cfg();
  bool all_ok = true;
  for (int k : cfg.dims) {
    double sym = 0.0, iso = 0.0, self = 0.0;
    double slack = std::numeric_limits<double>::infinity();
    for (int t = 0; t < cfg.trials; ++t) {
      const auto p = confspace::normalize(sampling::random_invertible(k, s.rng()));
      const auto q = confspace::normalize(sampling::random_invertible(k, s.rng()));
      const auto r = confspace::normalize(sampling::random_invertible(k, s.rng()));
      const Matrix a = sampling::random_invertible(k, s.rng());
      const double pq = confspace::conf_dist(p, q);
      sym = std::max(sym, std::abs(pq - confspace::conf_dist(q, p)));
      slack = std::min(slack, pq + confspace::conf_dist(q, r) - confspace::conf_dist(p, r));
      iso = std::max(iso, std::abs(confspace::conf_dist(confspace::act(a, p), confspace::act(a, q)) - pq));
      self = std::max(self, confspace::conf_dist(p, p));
    }
    const bool ok = sym <= 1e-10 && slack >= -1e-9 && iso <= 1e-8;
    all_ok = all_ok && ok;
    s.record({{"record", "conf_metric"},
              {"k", k},
              {"trials", cfg.trials},
              {"max_asymmetry", sym},
              {"min_triangle_slack", slack},
              {"max_isometry_deviation", iso},
              {"max_self_distance", self},
              {"pass", ok}});
    s.say("Conf(", k, "): asymmetry ", sym, ", triangle slack ", slack, ", isometry deviation ", iso,
          ok ? "  [ok]" : "  [FAIL]");
  }

  double dil_err = 0.0, dist_err = 0.0;
  for (int t = 0; t < cfg.bridge_trials; ++t) {
    const Matrix a = sampling::random_positive_2x2(s.rng());
    const double mu = std::abs(confspace::beltrami(a));
    const double dil = confspace::dilatation(a);
    dil_err = std::max(dil_err, std::abs(dil - (1.0 + mu) / (1.0 - mu)));
    dist_err = std::max(dist_err, std::abs(confspace::dist_to_base(a) - std::sqrt(2.0) * std::log(dil)));
  }
  const bool bridge_ok = dil_err <= 1e-9 && dist_err <= 1e-9;
  all_ok = all_ok && bridge_ok;
  s.record({{"record", "beltrami_bridge"},
            {"trials", cfg.bridge_trials},
            {"max_dilatation_error", dil_err},
            {"max_distance_error", dist_err},
            {"pass", bridge_ok}});
  s.say("2D bridge: |dil - (1+|mu|)/(1-|mu|)| <= ", dil_err, ", |dist - sqrt2 log dil| <= ", dist_err,
        bridge_ok ? "  [ok]" : "  [FAIL]");
  if (!all_ok) s.fail();
}

void run_denjoy(Session& s) {
  const auto& cfg = s.cfg();
  dynamics::DenjoyParams params{cfg.alpha, cfg.c, cfg.truncation, cfg.tail_tolerance};
  auto circle = std::make_shared<const dynamics::DenjoyCircle>(params);
  const auto map = dynamics::denjoy_circle(circle);

  const auto rot = dynamics::rotation_vector(map, TorusPoint(Vector::Constant(1, 0.5)),
                                             static_cast<std::size_t>(cfg.orbit_length));
  const double rho = rot.estimate.theta(0);
  const double rot_err = std::abs(rho - cfg.alpha);
  const auto wandering = dynamics::wandering_images(*circle, 100);

  json growth = json::array();
  std::vector<double> ns, sup_log, oracle;
  for (std::size_t n : {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000}) {
    const double m = dynamics::max_log_derivative(*circle, n, 401);
    const double o = std::abs(std::log(circle->interval_length(static_cast<std::int64_t>(n)) /
                                       circle->interval_length(0)));
    ns.push_back(static_cast<double>(n));
    sup_log.push_back(m);
    oracle.push_back(o);
    growth.push_back({{"n", n}, {"max_abs_log_derivative", m}, {"mean_value_oracle", o}});
  }
  s.record({{"record", "denjoy_circle"},
            {"alpha", cfg.alpha},
            {"c", cfg.c},
            {"truncation", cfg.truncation},
            {"inserted_length", circle->inserted_length()},
            {"series_length", circle->series_length()},
            {"tail_bound", circle->tail_bound()},
            {"rotation_estimate", rho},
            {"rotation_error", rot_err},
            {"rotation_error_bar", rot.error_bar},
            {"orbit_length", cfg.orbit_length},
            {"wandering_images_disjoint", wandering.disjoint},
            {"wandering_min_gap", wandering.min_gap},
            {"derivative_growth", growth}});
  s.say("Denjoy circle: inserted length ", circle->inserted_length(), " (series ",
        circle->series_length(), ", tail <= ", circle->tail_bound(), ")");
  s.say("  rotation number estimate ", rho, " vs alpha ", cfg.alpha, " (error ", rot_err, ", bar ",
        rot.error_bar, ")");
  s.say("  images of I_0 up to n = 100 disjoint: ", wandering.disjoint ? "yes" : "no",
        ", sup|log Df^1000| on I_0 = ", sup_log.back());

  svg::LinePlot plot{"Denjoy map: distortion on the wandering interval", "n", "max |log Df^n| on I_0",
                     true, false, {}};
  plot.series.push_back({"measured", ns, sup_log, "#1f77b4", false, true});
  plot.series.push_back({"|log(l_n / l_0)|", ns, oracle, "#ff7f0e", true, false});
  s.plot("denjoy_distortion.svg", plot.render());
  if (rot_err > std::max(1e-4, rot.error_bar) || !wandering.disjoint) s.fail();
}

void run_blowup(Session& s) {
  const auto& cfg = s.cfg();
  const auto system = build_system(s);
  const blowup::SimilarityMap g(system);
  std::uniform_int_distribution<int> pick(-system->window(), system->window() - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int samples = 0;
  if (system->window() > 0) {
    for (; samples < 1000; ++samples) {
      const int j = pick(s.rng());
      Vector d(cfg.k);
      for (int a = 0; a < cfg.k; ++a) d(a) = gauss(s.rng());
      d *= 0.999 * system->radius(j) * std::pow(unit(s.rng()), 1.0 / cfg.k) / d.norm();
      const TorusPoint x(system->center(j) + d);
      const TorusPoint lhs = blowup::collapse(*system, g.eval(j, x));
      const TorusPoint rhs(blowup::collapse(*system, x).coords() + system->theta().theta);
      worst = std::max(worst, torus_distance(lhs.coords(), rhs.coords()));
    }
  }
  std::ostringstream rec;
  blowup::write_ball_system(rec, *system);
  s.artifact("ball_system.jsonl", rec.str());
  s.record({{"record", "semiconjugacy"}, {"samples", samples}, {"max_error", worst}, {"pass", worst <= 1e-10}});
  s.say("collapse semiconjugacy on ", samples, " in-ball samples: max error ", worst);

  std::vector<svg::Circle> circles;
  for (int j = -std::min(system->window(), 40); j <= std::min(system->window(), 40); ++j) {
    const Vector c = system->center(j);
    circles.push_back({c(0), c(1), system->radius(j), j == 0 ? "#d62728" : "#1f77b4", "", false});
  }
  if (cfg.k == 2) s.plot("ball_system.svg", svg::circle_sketch("Wandering balls |j| <= 40 (k = 2)", circles, {}));
  if (!system->certificate().holds || worst > 1e-10) s.fail();
}

struct DistortOutcome {
  distortion::VolumeBoundReport volume_bound;
  bool contrast_ok = false;
  bool fit_ok = false;
};

DistortOutcome run_distort(Session& s, std::shared_ptr<const blowup::BallSystem> system) {
  const auto& cfg = s.cfg();
  const int m = cfg.flatness_order();
  const Matrix dir = config_direction(cfg);
  const blowup::SyntheticField field(system, blowup::volume_profile(*system, m, cfg.eps0, dir));
  const TorusPoint start(system->center(0));
  const auto trace = distortion::trace_cocycle_distortion(field, start, static_cast<std::size_t>(cfg.steps));
  DistortOutcome out;
  out.volume_bound = distortion::verify_volume_bound(trace, cfg.eps0);
  s.record({{"record", "volume_bound"},
            {"M", cfg.eps0},
            {"m", m},
            {"steps", cfg.steps},
            {"sup_direct", out.volume_bound.sup_direct},
            {"volume_sum", out.volume_bound.volume_sum},
            {"bound", out.volume_bound.bound},
            {"margin", out.volume_bound.margin},
            {"best_constant", out.volume_bound.best_constant},
            {"per_step_certified", out.volume_bound.per_step_certified},
            {"pass", out.volume_bound.pass}});
  s.say("volume distortion bound: sup D_n = ", out.volume_bound.sup_direct, " <= M sum vol = ", out.volume_bound.bound,
        out.volume_bound.pass ? "  [pass]" : "  [FAIL]");
  std::ostringstream table;
  distortion::write_trace_table(table, trace);
  s.artifact("distortion_trace.csv", table.str());

  // Per-ball flatness on ball 0.
  const auto fit = distortion::fit_per_ball_constant(field, 0, static_cast<std::size_t>(cfg.fit_samples), cfg.seed);
  const double r0 = system->radius(0);
  const double expected_c = 2.0 * std::abs(field.profile().amplitude(0, system->window())) / std::pow(r0, cfg.k);
  out.fit_ok = m != cfg.k || (std::abs(fit.slope - cfg.k) <= 0.1 &&
                              std::abs(fit.constant - expected_c) <= 0.01 * expected_c);
  s.record({{"record", "flatness_fit"},
            {"ball", 0},
            {"m", m},
            {"k", cfg.k},
            {"samples", fit.samples},
            {"slope", fit.slope},
            {"constant", fit.constant},
            {"closed_form_constant", m == cfg.k ? json(expected_c) : json(nullptr)},
            {"pass", out.fit_ok}});
  s.say("flatness on ball 0: slope ", fit.slope, ", C = ", fit.constant,
        m == cfg.k ? " (closed form " : "", m == cfg.k ? std::to_string(expected_c) + ")" : "");

  // Contrast: constant per-step distortion, no volume decay.
  const blowup::SyntheticField flat(system, blowup::constant_profile(*system, m, 0.5 * cfg.delta, dir));
  const auto contrast = distortion::trace_cocycle_distortion(flat, start, static_cast<std::size_t>(cfg.steps));
  const auto contrast_report = distortion::verify_volume_bound(contrast, cfg.eps0);
  bool linear = true;
  for (std::size_t n = 100; n <= contrast.length(); ++n) {
    linear = linear && contrast.direct[n - 1] >= 0.9 * cfg.delta * static_cast<double>(n);
  }
  out.contrast_ok = contrast_report.pass == false && (cfg.delta == 0.0 || linear);
  s.record({{"record", "volume_bound_contrast"},
            {"delta", cfg.delta},
            {"final_direct", contrast.direct.back()},
            {"linear_growth", linear},
            {"bound_pass", contrast_report.pass},
            {"first_violation", contrast_report.first_violation ? json(*contrast_report.first_violation) : json(nullptr)}});
  s.say("contrast (constant delta = ", cfg.delta, "): D_n = ", contrast.direct.back(), " at n = ",
        contrast.length(), ", bound ", contrast_report.pass ? "holds" : "fails");

  std::vector<double> n_axis, dn, tn, bound, cn;
  for (std::size_t i = 0; i < trace.length(); ++i) {
    n_axis.push_back(static_cast<double>(i + 1));
    dn.push_back(trace.direct[i]);
    tn.push_back(trace.telescoped[i]);
    bound.push_back(out.volume_bound.bound);
  }
  svg::LinePlot dplot{"Cocycle distortion along a wandering orbit", "n", "distance to sigma_0", false, false, {}};
  dplot.series.push_back({"D_n (direct)", n_axis, dn, "#1f77b4", false, false});
  dplot.series.push_back({"T_n (telescoped)", n_axis, tn, "#2ca02c", true, false});
  dplot.series.push_back({"M sum vol", n_axis, bound, "#d62728", true, false});
  s.plot("distortion.svg", dplot.render());
  for (std::size_t i = 0; i < contrast.length(); ++i) cn.push_back(contrast.direct[i]);
  svg::LinePlot cplot{"Contrast: constant per-step distortion", "n", "D_n", false, false, {}};
  cplot.series.push_back({"D_n", n_axis, cn, "#9467bd", false, false});
  s.plot("distortion_contrast.svg", cplot.render());
  svg::LinePlot fplot{"Flatness on ball 0", "l(x)", "dist([A(x)], sigma_0)", true, true, {}};
  fplot.series.push_back({"samples", fit.ell, fit.dist, "#1f77b4", false, true});
  s.plot("flatness.svg", fplot.render());

  if (!out.volume_bound.pass || !out.contrast_ok || !out.fit_ok) s.fail();
  return out;
}

trap::TrapParams trap_params(const ExperimentConfig& cfg) {
  trap::TrapParams p;
  p.lambda = cfg.lambda;
  p.horizon = cfg.horizon;
  p.boundary_samples = static_cast<std::size_t>(cfg.boundary_samples);
  p.inclusion_margin = cfg.margin;
  p.seed = cfg.seed;
  return p;
}

std::optional<trap::TrapCertificate> run_trap(Session& s, const blowup::BallSystem& system) {
  const auto& cfg = s.cfg();
  trap::TrapCertificate cert = trap::certify_trap(system, trap_params(cfg));
  json rec = json::parse(trap::certificate_record(cert));
  rec["record"] = "trap";
  rec.erase("contradiction");  // decided by the contradiction stage
  if (!cert.search.found) {
    rec["error"] = "NotFound";
    s.record(rec);
    s.say("trap: NotFound within horizon ", cfg.horizon, "; closest candidate n = ", cert.search.near_miss_n,
          " (score ", cert.search.near_miss_score, ", alpha_n = ", cert.search.near_miss_alpha,
          ", displacement = ", cert.search.near_miss_displacement, ")");
    s.fail();
    return std::nullopt;
  }
  s.record(rec);
  s.say("trap: n = ", cert.n, ", alpha_n = ", cert.alpha_n, " < ", cert.threshold_radius,
        ", |x_n - x_0| = ", cert.displacement, " < ", cert.threshold_displacement, ", lambda' = ",
        cert.lambda_prime);
  s.say("  inclusion ", cert.inclusion_verified ? "verified" : "NOT verified", " (worst margin ",
        cert.inclusion_worst_margin, "), fixed point residual ", cert.fixed_point_residual,
        ", distance to closed form ", cert.fixed_point_error);

  if (cfg.k == 2) {
    const Vector x0 = blowup::composed_chain(system, 0, cert.n).source;
    const Vector xn = blowup::composed_chain(system, 0, cert.n).target;
    std::vector<svg::Circle> circles = {
        {x0(0), x0(1), cert.alpha0, "#1f77b4", "B(x0, a0)", false},
        {x0(0), x0(1), cfg.lambda * cert.alpha0, "#1f77b4", "B(x0, lambda a0)", true},
        {xn(0), xn(1), cert.alpha_n, "#2ca02c", "B(xn, an)", false},
        {xn(0), xn(1), cert.lambda_prime * cert.alpha_n, "#2ca02c", "B(xn, lambda' an)", true},
    };
    std::vector<svg::Marker> markers = {{cert.fixed_point(0), cert.fixed_point(1), "#d62728", "fixed point"}};
    s.plot("trap.svg", svg::circle_sketch("Trap at n = " + std::to_string(cert.n), circles, markers));
  }
  if (!cert.valid()) s.fail();
  return cert;
}

void run_demo(Session& s) {
  const auto& cfg = s.cfg();
  const auto system = build_system(s);
  const DistortOutcome distort = run_distort(s, system);
  auto cert = run_trap(s, *system);
  if (!cert) return;
  const auto report = trap::contradiction_report(*system, trap_params(cfg), *cert, cfg.minimality_horizon,
                                                 distort.volume_bound);
  cert->contradiction = report.contradiction;
  trap::append_certificate(s.dir(), cfg.experiment_id, *cert);
  s.record({{"record", "contradiction"},
            {"minimality_evidence", report.minimality_evidence},
            {"closest_return", report.closest_return},
            {"closest_return_time", report.closest_return_time},
            {"periodic_point", report.periodic_point},
            {"period", report.period},
            {"located", report.located},
            {"point", vec_json(report.point)},
            {"residual", report.residual},
            {"wandering_balls", report.wandering_balls},
            {"bounded_distortion", report.bounded_distortion ? json(*report.bounded_distortion) : json(nullptr)},
            {"contradiction", report.contradiction},
            {"clauses", report.clauses}});
  for (const auto& c : report.clauses) s.say(c);
  if (!report.contradiction) s.fail();
}

}  // namespace

RunOutcome run(const ExperimentConfig& config) {
  config.validate();
  fs::create_directories(config.output_dir);
  Session s(config);
  s.record({{"record", "run"},
            {"kind", std::string(to_string(config.kind))},
            {"experiment_id", config.experiment_id},
            {"seed", config.seed},
            {"config_hash", hex64(fnv1a64(config.canonical()))},
            {"versions", {{"core", kCoreVersion}, {"cli", DENJOY_VERSION}, {"ballsystem_record", blowup::kRecordVersion}}}});
  s.say("experiment ", config.experiment_id, " (", to_string(config.kind), "), seed ", config.seed,
        ", config hash ", hex64(fnv1a64(config.canonical())), ", core ", kCoreVersion);
  try {
    switch (config.kind) {
      case Experiment::ConfCheck: run_conf(s); break;
      case Experiment::Denjoy: run_denjoy(s); break;
      case Experiment::Blowup: run_blowup(s); break;
      case Experiment::Distort: run_distort(s, build_system(s)); break;
      case Experiment::Trap: {
        const auto system = build_system(s);
        if (auto cert = run_trap(s, *system)) trap::append_certificate(s.dir(), config.experiment_id, *cert);
        break;
      }
      case Experiment::DemoTheorem: run_demo(s); break;
    }
  } catch (const Error& e) {
    s.record({{"record", "error"}, {"code", std::string(to_string(e.code()))}, {"message", e.what()}});
    s.say("pipeline error: ", e.what());
    s.fail();
  }
  return s.finish();
}

}  // namespace denjoy::cli
