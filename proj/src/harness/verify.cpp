#include "koco/harness/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "koco/error.hpp"
#include "koco/harness/experiment.hpp"
#include "koco/harness/gd_baseline.hpp"
#include "koco/harness/stream.hpp"
#include "koco/kors.hpp"
#include "koco/oracle.hpp"
#include "koco/skons.hpp"

namespace koco::harness {

namespace {

using Clock = std::chrono::steady_clock;

struct Sizes {
  std::size_t equiv_t;
  std::size_t degeneracy_t;
  int kors_seeds;
  int chain_streams;
  std::size_t regret_t;
  int regret_streams;
  int comparator_iterations;
  std::size_t adversary_t;
  std::size_t trend_t;
  std::size_t trend_tail;
};

Sizes sizes_for(VerifyLevel level) {
  if (level == VerifyLevel::full) return {200, 200, 50, 20, 1000, 5, 5000, 2000, 2000, 500};
  return {200, 200, 12, 6, 300, 2, 2000, 500, 1000, 250};
}

std::vector<LossEvent> synth(Generator g, std::size_t dim, std::size_t T, std::uint64_t seed,
                             LossFamily loss = LossFamily::squared, double noise = 0.1) {
  SyntheticSpec s;
  s.generator = g;
  s.input_dim = dim;
  s.horizon = T;
  s.noise_sd = noise;
  s.loss = loss;
  s.spread = 1.0;
  return generate_stream(s, seed);
}

KonsConfig kons_defaults(LossFamily loss, double alpha, EtaMode mode = EtaMode::fixed_sigma) {
  const CurvatureProfile p = curvature_profile(loss, 1.0);
  KonsConfig k;
  k.clip_c = 1.0;
  k.alpha = alpha;
  k.eta_mode = mode;
  k.sigma = p.sigma;
  k.lipschitz = p.lipschitz;
  return k;
}

SkonsConfig skons_defaults(double alpha, double gamma, std::size_t T, std::uint64_t seed) {
  SkonsConfig s;
  s.kons = kons_defaults(LossFamily::squared, alpha);
  s.kors = KorsConfig{alpha, 0.5, beta_threshold(T, 0.1, 0.5), 0.1, sub_seed(seed, "kors")};
  s.gamma = gamma;
  s.coin_seed = sub_seed(seed, "skons-coin");
  return s;
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

double fraction(const std::vector<int>& flags) {
  if (flags.empty()) return 0.0;
  return static_cast<double>(std::accumulate(flags.begin(), flags.end(), 0)) /
         static_cast<double>(flags.size());
}

// ---- criterion 1

CheckResult primal_equivalence(std::size_t T, KonsLearner::Fault fault, std::string name) {
  CheckResult r;
  r.name = std::move(name);
  const std::vector<LossEvent> events = synth(Generator::rkhs_target, 5, T, 11);
  std::vector<DenseVec> features;
  for (const LossEvent& e : events) features.push_back(e.point.normalized());

  double worst = 0.0;
  for (const EtaMode mode : {EtaMode::fixed_sigma, EtaMode::inverse_sqrt}) {
    const KonsConfig kc = kons_defaults(LossFamily::squared, 1.0, mode);
    KonsLearner l(KernelSpec::linear(), kc);
    l.inject_fault(fault);
    const PrimalOnsTrace ref = primal_ons(features, events, kc);
    for (std::size_t t = 0; t < T; ++t) {
      const Prediction p = l.predict(events[t].point);
      worst = std::max(worst, std::abs(p.yhat - ref.yhat[t]) / std::max(1.0, std::abs(ref.yhat[t])));
      l.observe(events[t], p);
    }
  }
  r.pass = worst <= 1e-6;
  r.detail = "T=" + std::to_string(T) + " d=5 max_rel_err=" + fmt(worst) + " tol=1e-6";
  return r;
}

// ---- criterion 2

CheckResult sketch_degeneracy(const Sizes& sz) {
  CheckResult r;
  r.name = "sketch_degeneracy";
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto events = synth(Generator::rkhs_target, 2, sz.degeneracy_t, seed);
    KonsLearner exact(KernelSpec::gaussian(1.0), kons_defaults(LossFamily::squared, 1.0));
    SkonsLearner sk(KernelSpec::gaussian(1.0), skons_defaults(1.0, 1.0, sz.degeneracy_t, seed));
    for (const LossEvent& e : events) {
      const double a = exact.step(e).yhat;
      const double b = sk.step(e).yhat;
      worst = std::max(worst, std::abs(a - b));
    }
  }
  r.pass = worst <= 1e-8;
  r.detail = "T=" + std::to_string(sz.degeneracy_t) + " seeds=5 gamma=1 max_abs_diff=" + fmt(worst) + " tol=1e-8";
  return r;
}

// ---- criterion 3

constexpr double kKorsAlpha = 300.0;

CheckResult kors_guarantees(const Sizes& sz) {
  CheckResult r;
  r.name = "kors_guarantees";
  const std::size_t T = 300;
  const double eps = 0.5, delta = 0.1;
  const double beta = beta_threshold(T, delta, eps);
  const KernelSpec kernel = KernelSpec::gaussian(1.0);
  const auto events = synth(Generator::rkhs_target, 1, T, 3);
  std::vector<Point> pts;
  for (const LossEvent& e : events) pts.push_back(e.point);
  const SymMat K = gram(kernel, pts);
  const DenseVec tau = online_rls(K, kKorsAlpha);
  DenseVec d_onl(T);
  std::partial_sum(tau.data(), tau.data() + T, d_onl.data());
  const std::size_t checkpoints[] = {50, 150, 300};

  // dual pairs depend on the dictionary weights, so only the prefix grams are shared
  std::vector<SymMat> prefix;
  for (const std::size_t c : checkpoints)
    prefix.emplace_back(DenseMat(K.matrix().topLeftCorner(c, c)));

  const int n = sz.kors_seeds;
  std::vector<int> bracket(n, 0), sandwich(n, 0), size_ok(n, 0);
  std::vector<double> final_size(n, 0.0), lo_min(n, 0.0), hi_max(n, 0.0);
  std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < n; ++s) {
    try {
      KorsConfig cfg{kKorsAlpha, eps, beta, delta, sub_seed(static_cast<std::uint64_t>(1000 + s), "kors")};
      KorsSampler ks(kernel, cfg);
      const double rho = cfg.rho();
      bool br = true, sw = true, sz_ok = true;
      double lo = 1e300, hi = -1e300;
      int cp = 0;
      for (std::size_t t = 1; t <= T; ++t) {
        const KorsStep st = ks.step(pts[t - 1]);
        const double ex = tau(static_cast<Index>(t - 1));
        if (st.tau_tilde < ex * (1.0 - 1e-9) - 1e-12 || st.tau_tilde > rho * ex * (1.0 + 1e-9) + 1e-12) br = false;
        if (static_cast<double>(ks.dictionary().size()) > dict_size_bound(cfg, d_onl(static_cast<Index>(t - 1))))
          sz_ok = false;
        if (cp < 3 && t == checkpoints[cp]) {
          const auto [exact, sketch] = dual_pair(prefix[cp], ks.round_weights(t), kKorsAlpha);
          const SpectralBounds b = spectral_audit(exact, sketch);
          lo = std::min(lo, b.lo);
          hi = std::max(hi, b.hi);
          if (b.lo < 1.0 - eps || b.hi > 1.0 + eps) sw = false;
          ++cp;
        }
      }
      bracket[s] = br;
      sandwich[s] = sw;
      size_ok[s] = sz_ok;
      final_size[s] = static_cast<double>(ks.dictionary().size());
      lo_min[s] = lo;
      hi_max[s] = hi;
    } catch (const std::exception& e) {
      errors[s] = e.what();
    }
  }
  for (const std::string& e : errors)
    if (!e.empty()) {
      r.detail = "error=" + e;
      return r;
    }
  const double fa = fraction(bracket), fb = fraction(sandwich), fc = fraction(size_ok);
  const double mean_size = std::accumulate(final_size.begin(), final_size.end(), 0.0) / n;
  r.pass = fa >= 0.9 && fb >= 0.9 && fc >= 0.9;
  r.detail = "T=300 seeds=" + std::to_string(n) + " alpha=" + fmt(kKorsAlpha) + " beta=" + fmt(beta) +
             " bracket=" + fmt(fa) + " sandwich=" + fmt(fb) + " size=" + fmt(fc) +
             " mean_dict=" + fmt(mean_size) + " lo_min=" + fmt(*std::min_element(lo_min.begin(), lo_min.end())) +
             " hi_max=" + fmt(*std::max_element(hi_max.begin(), hi_max.end())) +
             " d_onl=" + fmt(d_onl(T - 1)) + " need>=0.9";
  return r;
}

// ---- criterion 4

CheckResult logdet_chain_check(const Sizes& sz) {
  CheckResult r;
  r.name = "logdet_chain";
  const double alphas[] = {0.1, 1.0, 10.0};
  const Generator gens[] = {Generator::rkhs_target, Generator::orthogonal_drift, Generator::sixsix_adversary};
  const LossFamily losses[] = {LossFamily::squared, LossFamily::logistic, LossFamily::squared_hinge};
  const KernelSpec kernels[] = {KernelSpec::gaussian(1.0), KernelSpec::gaussian(0.5), KernelSpec::linear(),
                                KernelSpec::polynomial(3, 1.0), KernelSpec::gaussian(2.0)};
  const int n = sz.chain_streams;
  std::vector<double> slack(n * 3, 0.0);
  std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      const std::size_t T = 50 + static_cast<std::size_t>((i * 97) % 251);
      const LossFamily loss = losses[i % 3];
      const auto events = synth(gens[i % 3], 1 + i % 4, T, 500 + i, loss);
      for (int a = 0; a < 3; ++a) {
        KonsLearner l(kernels[i % 5], kons_defaults(loss, alphas[a]));
        for (const LossEvent& e : events) l.step(e);
        const LogdetChain c = logdet_chain(l.rescaled_gram(), alphas[a]);
        slack[i * 3 + a] = std::min(c.logdet - c.d_onl, c.upper - c.logdet);
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const std::string& e : errors)
    if (!e.empty()) {
      r.detail = "error=" + e;
      return r;
    }
  const double worst = *std::min_element(slack.begin(), slack.end());
  r.pass = worst >= -1e-7;
  r.detail = "streams=" + std::to_string(n) + " alphas=0.1,1,10 min_slack=" + fmt(worst) + " tol=-1e-7";
  return r;
}

// ---- criteria 5 and 6

ExperimentConfig regret_config(std::size_t T, int iterations) {
  ExperimentConfig cfg;
  cfg.kernel = KernelSpec::gaussian(1.0);
  cfg.loss = LossFamily::squared;
  cfg.learner = LearnerKind::kons;
  cfg.horizon = T;
  cfg.clip_c = 1.0;
  cfg.alpha = 1.0;
  cfg.comparator_iterations = iterations;
  cfg.record_timing = false;
  return cfg;
}

struct RegretStream {
  std::vector<LossEvent> events;
  ComparatorResult comparator;
  // minimizer of loss + alpha ||w||^2; the bound must hold for it as well
  ComparatorResult ridge;
};

/// Bound check against both comparators of the stream. Returns regret/bound
/// for the worse of the two.
double bound_ratio(const RunResult& res, const RegretStream& s, double alpha, bool& pass) {
  const RunSummary& m = res.summary;
  const double tail = m.bound - alpha * m.norm_sq;
  const double ridge_regret = m.cumulative_loss - s.ridge.total_loss;
  const double ridge_bound = alpha * s.ridge.norm_sq + tail;
  pass = m.bound_pass && ridge_regret <= ridge_bound;
  return std::max(m.regret / m.bound, ridge_regret / ridge_bound);
}

const std::vector<RegretStream>& regret_streams(const Sizes& sz) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, std::vector<RegretStream>> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(sz.regret_t, sz.regret_streams);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<RegretStream> out(sz.regret_streams);
  std::vector<std::string> errors(sz.regret_streams);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < sz.regret_streams; ++i) {
    try {
      const std::uint64_t seed = 100 + i;
      out[i].events = synth(Generator::rkhs_target, 2, sz.regret_t, seed);
      std::vector<Point> pts;
      for (const LossEvent& e : out[i].events) pts.push_back(e.point);
      ComparatorOptions opts;
      opts.iterations = sz.comparator_iterations;
      opts.seed = sub_seed(seed, "comparator");
      const SymMat K = gram(KernelSpec::gaussian(1.0), pts);
      out[i].comparator = best_comparator(K, out[i].events, 1.0, opts);
      opts.ridge = 1.0;
      out[i].ridge = best_comparator(K, out[i].events, 1.0, opts);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const std::string& e : errors)
    if (!e.empty()) throw Error("regret stream: " + e);
  return cache.emplace(key, std::move(out)).first->second;
}

CheckResult exact_regret_bound(const Sizes& sz) {
  CheckResult r;
  r.name = "kons_regret_bound";
  const auto& streams = regret_streams(sz);
  const ExperimentConfig cfg = regret_config(sz.regret_t, sz.comparator_iterations);
  int passed = 0;
  double worst_ratio = -1e300, min_regret = 1e300, min_ridge_regret = 1e300;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    const RunResult res = run_once(cfg, streams[i].events, 100 + i, &streams[i].comparator);
    bool ok = false;
    worst_ratio = std::max(worst_ratio, bound_ratio(res, streams[i], cfg.alpha, ok));
    passed += ok;
    min_regret = std::min(min_regret, res.summary.regret);
    min_ridge_regret = std::min(min_ridge_regret, res.summary.cumulative_loss - streams[i].ridge.total_loss);
  }
  r.pass = passed == static_cast<int>(streams.size());
  r.detail = "T=" + std::to_string(sz.regret_t) + " runs=" + std::to_string(streams.size()) +
             " passed=" + std::to_string(passed) + " max_regret_over_bound=" + fmt(worst_ratio) +
             " min_regret=" + fmt(min_regret) + " min_regret_vs_ridge=" + fmt(min_ridge_regret);
  return r;
}

CheckResult sketched_regret_bound(const Sizes& sz) {
  CheckResult r;
  r.name = "skons_regret_bound";
  const auto& streams = regret_streams(sz);
  ExperimentConfig cfg = regret_config(sz.regret_t, sz.comparator_iterations);
  cfg.learner = LearnerKind::skons;
  std::ostringstream det;
  det << "T=" << sz.regret_t;
  bool ok = true;
  for (const double gamma : {0.1, 0.3}) {
    cfg.gamma = gamma;
    const int n = static_cast<int>(streams.size()) * 2;
    std::vector<int> pass(n, 0);
    std::vector<double> ratio(n, 0.0);
    std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < n; ++j) {
      try {
        const auto& s = streams[j / 2];
        const RunResult res = run_once(cfg, s.events, 7000 + j, &s.comparator);
        bool ok = false;
        ratio[j] = bound_ratio(res, s, cfg.alpha, ok);
        pass[j] = ok;
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    }
    for (const std::string& e : errors)
      if (!e.empty()) {
        r.detail = "error=" + e;
        return r;
      }
    const double f = fraction(pass);
    ok = ok && f >= 0.9;
    det << " gamma=" << gamma << ":runs=" << n << ",frac=" << fmt(f)
        << ",max_ratio=" << fmt(*std::max_element(ratio.begin(), ratio.end()));
  }
  r.pass = ok;
  r.detail = det.str() + " need>=0.9";
  return r;
}

// ---- criterion 7

CheckResult adversary_scenario(const Sizes& sz) {
  CheckResult r;
  r.name = "sixsix_adversary";
  const std::size_t T = sz.adversary_t;
  const double C = 1.0, alpha = 1.0;
  ExperimentConfig cfg = regret_config(T, sz.comparator_iterations);
  const auto events = synth(Generator::sixsix_adversary, 1, T, 0);
  const RunResult res = run_once(cfg, events, 0);
  const double sigma = cfg.kons_config().sigma;

  double stated = 0.0, exact_form = 0.0, gsum = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    stated += C * C / (C * C * sigma * static_cast<double>(t) + alpha);
    const double g = res.trace[t - 1].gdot;
    gsum += g * g;
    exact_form += g * g / (gsum * sigma + alpha);
  }
  const double rg = res.summary.r_g, rd = res.summary.r_d;
  const bool rd_ok = rd <= 1e-9;
  const bool rg_ok = rg <= stated + 1e-7;
  const bool first_ok = rg <= exact_form + 1e-7;
  r.pass = rd_ok && rg_ok;
  r.detail = "T=" + std::to_string(T) + " r_d=" + fmt(rd) + " r_g=" + fmt(rg) + " bound_C2=" + fmt(stated) +
             " bound_gdot=" + fmt(exact_form) + " r_d_ok=" + (rd_ok ? "1" : "0") +
             " r_g_ok=" + (rg_ok ? "1" : "0") + " r_g_gdot_form_ok=" + (first_ok ? "1" : "0") +
             " max_abs_gdot=" + fmt(std::accumulate(res.trace.begin(), res.trace.end(), 0.0,
                                                    [](double m, const StepRecord& s) { return std::max(m, std::abs(s.gdot)); }));
  return r;
}

// ---- criterion 8

CheckResult identity_suites() {
  CheckResult r;
  r.name = "identity_and_block_inverse";
  CounterRng rng(sub_seed(8, "identities"));
  double hat_err = 0.0, inv_err = 0.0, prod_err = 0.0, block_err = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const Index n = 2 + static_cast<Index>(rng.uniform() * 11);
    const Index m = 1 + static_cast<Index>(rng.uniform() * 15);
    const double alpha = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
    DenseMat X(n, m);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < m; ++j) X(i, j) = rng.normal();
    DenseVec v(n);
    for (Index i = 0; i < n; ++i) v(i) = rng.normal();

    const DenseMat ph = primal_hat(X, alpha), dh = dual_hat(X, alpha);
    hat_err = std::max(hat_err, (ph - dh).cwiseAbs().maxCoeff());
    const DenseMat pi = primal_shift_inverse(X, alpha), di = dual_shift_inverse(X, alpha);
    inv_err = std::max(inv_err, (pi - di).cwiseAbs().maxCoeff() / std::max(1.0, pi.cwiseAbs().maxCoeff()));
    const DenseVec direct = pi * v;
    prod_err = std::max(prod_err, (gram_shift_product(X, alpha, v) - direct).cwiseAbs().maxCoeff() /
                                      std::max(1.0, direct.cwiseAbs().maxCoeff()));

    // grow (X^T X + alpha I)^{-1} one column at a time
    const DenseMat G = X.transpose() * X;
    RegularizedInverse ri(alpha);
    for (Index j = 0; j < m; ++j) ri = append_block_inverse(std::move(ri), G.col(j).head(j), G(j, j));
    const DenseMat ref = psd_inverse(SymMat(G), alpha);
    block_err = std::max(block_err, (DenseMat(ri.inverse()) - ref).cwiseAbs().maxCoeff() /
                                        std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
  r.pass = hat_err <= 1e-9 && inv_err <= 1e-9 && prod_err <= 1e-9 && block_err <= 1e-8;
  r.detail = "instances=100 hat_err=" + fmt(hat_err) + " shift_inverse_err=" + fmt(inv_err) +
             " product_err=" + fmt(prod_err) + " block_err=" + fmt(block_err) + " tol=1e-9/1e-8";
  return r;
}

// ---- criterion 9

CheckResult complexity_trend(const Sizes& sz) {
  CheckResult r;
  r.name = "complexity_trend";
  const std::size_t T = sz.trend_t, tail = sz.trend_tail;
  const auto events = synth(Generator::rkhs_target, 1, T, 9);
  KonsLearner exact(KernelSpec::gaussian(1.0), kons_defaults(LossFamily::squared, 1.0));
  SkonsLearner sk(KernelSpec::gaussian(1.0), skons_defaults(1.0, 0.0, T, 9));
  double te = 0.0, ts = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const StepRecord a = exact.step(events[t]);
    const StepRecord b = sk.step(events[t]);
    if (t >= T - tail) {
      te += std::chrono::duration<double, std::micro>(a.elapsed).count();
      ts += std::chrono::duration<double, std::micro>(b.elapsed).count();
    }
  }
  te /= static_cast<double>(tail);
  ts /= static_cast<double>(tail);
  r.pass = ts <= 0.25 * te;
  r.detail = "T=" + std::to_string(T) + " tail=" + std::to_string(tail) + " kons_us=" + fmt(te) +
             " skons_us=" + fmt(ts) + " ratio=" + fmt(ts / te) + " selected=" +
             std::to_string(sk.selected().size()) + " need<=0.25";
  return r;
}

// ---- supporting checks

CheckResult mutation_detected() {
  CheckResult inner = primal_equivalence(60, KonsLearner::Fault::flip_coefficient_sign, "inner");
  CheckResult r;
  r.name = "mutation_detected";
  r.pass = !inner.pass;
  r.detail = "flipped coefficient sign: " + inner.detail;
  return r;
}

CheckResult trace_determinism() {
  CheckResult r;
  r.name = "trace_determinism";
  ExperimentConfig cfg = regret_config(150, 500);
  cfg.learner = LearnerKind::skons;
  cfg.gamma = 0.1;
  const auto events = synth(Generator::rkhs_target, 2, 150, 21);
  std::string first;
  bool same = true;
  bool identity = true;
  for (int rep = 0; rep < 2; ++rep) {
    const RunResult res = run_once(cfg, events, 21);
    std::ostringstream o;
    write_trace(o, res.trace, false);
    if (rep == 0) first = o.str();
    else same = first == o.str();
    identity = identity && std::abs(res.summary.regret -
                                    (res.summary.cumulative_loss - res.summary.comparator_loss)) <= 1e-9;
  }
  r.pass = same && identity;
  r.detail = std::string("byte_identical=") + (same ? "1" : "0") + " regret_identity=" + (identity ? "1" : "0");
  return r;
}

CheckResult kors_acceptance_frequency() {
  CheckResult r;
  r.name = "kors_acceptance_frequency";
  KorsConfig cfg{1.0, 0.5, 1.0, 0.1, 0};
  CounterRng rng(sub_seed(5, "coin"));
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += kors_sample(0.3, cfg, rng).z;
  const double f = hits / 10000.0;
  r.pass = std::abs(f - 0.3) <= 0.015;
  r.detail = "trials=10000 p=0.3 freq=" + fmt(f);
  return r;
}

CheckResult curvature_constants() {
  CheckResult r;
  r.name = "curvature_constants";
  double worst = 1e300;
  std::ostringstream det;
  for (const LossFamily f : {LossFamily::squared, LossFamily::logistic, LossFamily::squared_hinge})
    for (const double C : {0.5, 1.0, 2.0}) {
      const CurvatureProfile p = curvature_profile(f, C);
      worst = std::min(worst, curvature_grid_gap(f, C, p.sigma));
      if (C == 1.0) det << to_string(f) << "_sigma=" << fmt(p.sigma) << ' ';
    }
  r.pass = worst >= -1e-12;
  r.detail = det.str() + "min_gap=" + fmt(worst);
  return r;
}

CheckResult sketch_sandwich(int seeds) {
  CheckResult r;
  r.name = "sketch_sandwich";
  const std::size_t T = 200;
  const auto events = synth(Generator::rkhs_target, 1, T, 31);
  std::vector<int> lower(seeds, 0), upper(seeds, 0);
  std::vector<double> rd(seeds, 0.0);
  std::vector<std::string> errors(seeds);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < seeds; ++s) {
    try {
      SkonsLearner sk(KernelSpec::gaussian(1.0), skons_defaults(1.0, 0.3, T, 40 + s));
      bool lo_ok = true, hi_ok = true;
      for (std::size_t t = 1; t <= T; ++t) {
        sk.step(events[t - 1]);
        if (t == 50 || t == 100 || t == 200) {
          const auto [lo, hi] = sk.sandwich_audit(t);
          if (lo < 0.5 * sk.p_min()) lo_ok = false;
          if (hi > 1.0 + 1e-10) hi_ok = false;
        }
      }
      lower[s] = lo_ok;
      upper[s] = hi_ok;
    } catch (const std::exception& e) {
      errors[s] = e.what();
    }
  }
  for (const std::string& e : errors)
    if (!e.empty()) {
      r.detail = "error=" + e;
      return r;
    }
  const double fl = fraction(lower), fu = fraction(upper);
  r.pass = fu == 1.0 && fl >= 0.9;
  r.detail = "seeds=" + std::to_string(seeds) + " gamma=0.3 upper_all=" + fmt(fu) + " lower=" + fmt(fl);
  return r;
}

CheckResult sketched_rd_nonpositive() {
  CheckResult r;
  r.name = "skons_rd_nonpositive";
  ExperimentConfig cfg = regret_config(400, 500);
  cfg.learner = LearnerKind::skons;
  cfg.gamma = 0.2;
  const auto events = synth(Generator::sixsix_adversary, 1, 400, 0);
  const RunResult res = run_once(cfg, events, 3);
  std::size_t accepted = 0;
  for (const StepRecord& s : res.trace) accepted += s.z;
  r.pass = res.summary.r_d <= 1e-9;
  r.detail = "T=400 gamma=0.2 r_d=" + fmt(res.summary.r_d) + " acceptance=" +
             fmt(static_cast<double>(accepted) / 400.0);
  return r;
}

CheckResult gd_baseline_reference(const Sizes& sz) {
  CheckResult r;
  r.name = "gd_baseline_reference";
  const auto events = synth(Generator::rkhs_target, 2, sz.degeneracy_t, 41);
  KonsLearner kons(KernelSpec::gaussian(1.0), kons_defaults(LossFamily::squared, 1.0));
  GdBaseline gd(KernelSpec::gaussian(1.0), 1.0, curvature_profile(LossFamily::squared, 1.0).lipschitz);
  double lk = 0.0, lg = 0.0;
  for (const LossEvent& e : events) {
    lk += kons.step(e).loss;
    lg += gd.step(e).loss;
  }
  r.pass = std::isfinite(lk) && std::isfinite(lg);
  r.detail = "reported_only kons_loss=" + fmt(lk) + " gd_loss=" + fmt(lg);
  return r;
}

}  // namespace

VerifyLevel verify_level_from_string(const std::string& s) {
  if (s == "fast") return VerifyLevel::fast;
  if (s == "full") return VerifyLevel::full;
  throw ConfigError("verify level must be fast or full, got '" + s + "'");
}

std::string format_check(const CheckResult& r) {
  std::ostringstream o;
  o << "check=" << r.name << " status=" << (r.pass ? "pass" : "fail") << " seconds=" << fmt(r.seconds)
    << " detail=" << r.detail;
  return o.str();
}

CheckResult run_criterion(int id, VerifyLevel level) {
  const Sizes sz = sizes_for(level);
  const auto start = Clock::now();
  CheckResult r;
  try {
    switch (id) {
      case 1: r = primal_equivalence(sz.equiv_t, KonsLearner::Fault::none, "primal_equivalence"); break;
      case 2: r = sketch_degeneracy(sz); break;
      case 3: r = kors_guarantees(sz); break;
      case 4: r = logdet_chain_check(sz); break;
      case 5: r = exact_regret_bound(sz); break;
      case 6: r = sketched_regret_bound(sz); break;
      case 7: r = adversary_scenario(sz); break;
      case 8: r = identity_suites(); break;
      case 9: r = complexity_trend(sz); break;
      default: throw InvalidArgument("no criterion " + std::to_string(id));
    }
  } catch (const Error& e) {
    r.name = "criterion_" + std::to_string(id);
    r.pass = false;
    r.detail = std::string("error=") + e.what();
  }
  r.name = "c" + std::to_string(id) + "_" + r.name;
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

std::vector<CheckResult> verify_suite(VerifyLevel level, std::ostream& out) {
  std::vector<CheckResult> all;
  auto emit = [&](CheckResult r) {
    out << format_check(r) << std::endl;
    all.push_back(std::move(r));
  };
  for (int id = 1; id <= kCriterionCount; ++id) emit(run_criterion(id, level));

  const Sizes sz = sizes_for(level);
  using Fn = CheckResult (*)(const Sizes&);
  const std::pair<const char*, Fn> extras[] = {
      {"mutation_detected", [](const Sizes&) { return mutation_detected(); }},
      {"trace_determinism", [](const Sizes&) { return trace_determinism(); }},
      {"kors_acceptance_frequency", [](const Sizes&) { return kors_acceptance_frequency(); }},
      {"curvature_constants", [](const Sizes&) { return curvature_constants(); }},
      {"sketch_sandwich", [](const Sizes& s) { return sketch_sandwich(s.kors_seeds); }},
      {"skons_rd_nonpositive", [](const Sizes&) { return sketched_rd_nonpositive(); }},
      {"gd_baseline_reference", [](const Sizes& s) { return gd_baseline_reference(s); }},
  };
  for (const auto& [name, fn] : extras) {
    const auto start = Clock::now();
    CheckResult r;
    try {
      r = fn(sz);
    } catch (const Error& e) {
      r.name = name;
      r.detail = std::string("error=") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    emit(std::move(r));
  }
  return all;
}

}  // namespace koco::harness
