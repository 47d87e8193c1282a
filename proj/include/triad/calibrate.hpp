#pragma once

// Recovery of device parameters from measured spectra and sweeps.
//
// Every fitter sorts its input, builds O(1)-scaled parameters from a
// heuristic initial guess and hands them to lm::minimize. Reported
// uncertainties are the square roots of the diagonal of s^2 (J^T J)^-1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "triad/errors.hpp"
#include "triad/hybridize.hpp"
#include "triad/lm.hpp"
#include "triad/timedomain.hpp"
#include "triad/units.hpp"

namespace triad {

struct FitParameter {
  std::string name;
  double value = 0.0;
  std::string unit;
  double sigma = 0.0;  // one standard deviation; inf when undetermined
};

struct FitReport {
  std::string kind;
  std::vector<FitParameter> parameters;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> flags;
  std::optional<std::uint64_t> seed;

  const FitParameter& at(const std::string& name) const {
    for (const auto& p : parameters)
      if (p.name == name) return p;
    throw InvalidParameter("fit report has no parameter " + name);
  }
  double value(const std::string& name) const { return at(name).value; }
  double sigma(const std::string& name) const { return at(name).sigma; }
  bool has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
  }
  void add(std::string name, double value, std::string unit, double sigma) {
    parameters.push_back({std::move(name), value, std::move(unit), sigma});
  }
};

namespace detail {

inline std::vector<std::size_t> sort_order(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return idx;
}

template <class T>
std::vector<T> permute(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

inline double median(std::vector<double> v) {
  require(!v.empty(), "median of empty set");
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  double hi = v[m];
  if (v.size() % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lo + hi);
}

// Point-to-point noise estimate: MAD of first differences / sqrt 2.
inline double noise_sigma(const std::vector<double>& y) {
  if (y.size() < 3) return 0.0;
  std::vector<double> d(y.size() - 1);
  for (std::size_t i = 0; i + 1 < y.size(); ++i) d[i] = y[i + 1] - y[i];
  const double med = median(d);
  for (auto& v : d) v = std::abs(v - med);
  return 1.4826 * median(d) / std::sqrt(2.0);
}

// Width of the peak of `y` around index `peak` at level `level`, by linear
// interpolation; falls back to the grid span when a side never crosses.
inline double width_at(const std::vector<double>& x, const std::vector<double>& y,
                       std::size_t peak, double level) {
  std::size_t l = peak, r = peak;
  while (l > 0 && y[l] > level) --l;
  while (r + 1 < y.size() && y[r] > level) ++r;
  auto cross = [&](std::size_t a, std::size_t b) {
    if (y[a] == y[b]) return x[a];
    const double t = (level - y[a]) / (y[b] - y[a]);
    return x[a] + t * (x[b] - x[a]);
  };
  const double xl = y[l] <= level && l < peak ? cross(l, l + 1) : x.front();
  const double xr = y[r] <= level && r > peak ? cross(r, r - 1) : x.back();
  return std::max(xr - xl, x[1] - x[0]);
}

inline std::vector<double> sigmas(const lm::Result& r) {
  const lm::Mat c = lm::covariance(r);
  std::vector<double> s(static_cast<std::size_t>(r.x.size()));
  for (Eigen::Index i = 0; i < r.x.size(); ++i)
    s[static_cast<std::size_t>(i)] = c(i, i) >= 0.0 ? std::sqrt(c(i, i)) : 0.0;
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------- doublet

struct DoubletTrace {
  std::vector<double> omega;         // rad/s (absolute or offset)
  std::vector<double> transmission;  // |t|^2
  std::optional<double> bias;        // actuation voltage, V
};

struct DoubletOptions {
  std::optional<double> fixed_J;  // required for a single trace
};

namespace detail {

struct DoubletPoles {
  double w_minus, w_plus, k_minus, k_plus;
};

inline DoubletPoles doublet_poles(double omega_bar, double kappa_l, double kappa_r, double J,
                                  double delta) {
  const double mu = kappa_l - kappa_r;
  const double kbar = 0.5 * (kappa_l + kappa_r);
  cplx d = std::sqrt(std::pow(cplx(0.5 * mu, delta), 2) - 4.0 * J * J);
  if (d.imag() < 0.0 || (d.imag() == 0.0 && d.real() < 0.0)) d = -d;
  return {omega_bar - 0.5 * d.imag(), omega_bar + 0.5 * d.imag(), kbar - d.real(), kbar + d.real()};
}

inline double doublet_line(double omega, const DoubletPoles& p, double kappa_ex) {
  const cplx t = 1.0 - kappa_ex / cplx(0.5 * p.k_minus, -(omega - p.w_minus)) -
                 kappa_ex / cplx(0.5 * p.k_plus, -(omega - p.w_plus));
  return std::norm(t);
}

}  // namespace detail

/// Bus transmission |1 - k_ex chi_-(w - w_-) - k_ex chi_+(w - w_+)|^2 of two
/// rings with equal bus coupling k_ex, ring detuning delta = w_l - w_r.
inline double doublet_transmission(double omega, double omega_bar, double kappa_l,
                                   double kappa_r, double kappa_ex, double J, double delta) {
  return detail::doublet_line(omega, detail::doublet_poles(omega_bar, kappa_l, kappa_r, J, delta),
                              kappa_ex);
}

namespace detail {

struct Dip {
  double omega = 0.0;
  double width = 0.0;
  double depth_min = 1.0;  // transmission at the dip
};

inline std::vector<Dip> find_dips(const std::vector<double>& x, const std::vector<double>& T,
                                  double noise) {
  std::vector<double> inv(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) inv[i] = 1.0 - T[i];
  std::vector<Dip> dips;
  std::vector<bool> masked(T.size(), false);
  for (int k = 0; k < 2; ++k) {
    std::size_t best = T.size();
    for (std::size_t i = 0; i < T.size(); ++i)
      if (!masked[i] && (best == T.size() || inv[i] > inv[best])) best = i;
    if (best == T.size() || inv[best] < 5.0 * noise + 1e-12) break;
    const double w = width_at(x, inv, best, 0.5 * inv[best]);
    dips.push_back({x[best], w, T[best]});
    for (std::size_t i = 0; i < T.size(); ++i)
      if (std::abs(x[i] - x[best]) < 1.2 * w) masked[i] = true;
  }
  std::sort(dips.begin(), dips.end(), [](const Dip& a, const Dip& b) { return a.omega < b.omega; });
  return dips;
}

}  // namespace detail

inline FitReport fit_doublet(std::vector<DoubletTrace> traces, const DoubletOptions& opt = {}) {
  detail::require(!traces.empty(), "fit_doublet: no spectra");
  if (traces.size() == 1 && !opt.fixed_J)
    throw InvalidParameter(
        "fit_doublet: one spectrum fixes only the splitting and linewidth difference; "
        "supply more spectra or fix J");
  FitReport rep;
  rep.kind = "doublet";

  const std::size_t K = traces.size();
  std::vector<double> center(K);
  std::vector<double> om_m(K), om_p(K), ka_m(K), ka_p(K);
  std::vector<double> kex_guess;
  std::size_t n_res = 0;
  for (std::size_t k = 0; k < K; ++k) {
    auto& tr = traces[k];
    detail::require(tr.omega.size() == tr.transmission.size() && tr.omega.size() >= 16,
                    "fit_doublet: spectrum too short or ragged");
    const auto idx = detail::sort_order(tr.omega);
    tr.omega = detail::permute(tr.omega, idx);
    tr.transmission = detail::permute(tr.transmission, idx);
    center[k] = 0.5 * (tr.omega.front() + tr.omega.back());
    std::vector<double> x(tr.omega.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = tr.omega[i] - center[k];
    const double noise = detail::noise_sigma(tr.transmission);
    const auto dips = detail::find_dips(x, tr.transmission, noise);
    if (dips.empty()) throw ConvergenceError("fit_doublet: no resonance dip found");
    if (dips.size() == 1) {
      rep.flags.push_back("single_dip_spectrum_" + std::to_string(k));
      om_m[k] = dips[0].omega - 0.25 * dips[0].width;
      om_p[k] = dips[0].omega + 0.25 * dips[0].width;
      ka_m[k] = ka_p[k] = dips[0].width;
    } else {
      om_m[k] = dips[0].omega;
      om_p[k] = dips[1].omega;
      ka_m[k] = dips[0].width;
      ka_p[k] = dips[1].width;
    }
    for (const auto& d : dips)
      kex_guess.push_back(0.5 * d.width * (1.0 - std::sqrt(std::clamp(d.depth_min, 0.0, 1.0))));
    const double step = x[1] - x[0];
    if (std::min(ka_m[k], ka_p[k]) < 8.0 * step)
      rep.flags.push_back("under_resolved_spectrum_" + std::to_string(k));
    n_res += x.size();
  }

  double kbar = 0.0;
  for (std::size_t k = 0; k < K; ++k) kbar += 0.5 * (ka_m[k] + ka_p[k]) / static_cast<double>(K);
  const double U = kbar;  // parameter scale
  const double kex0 = std::max(detail::median(kex_guess), 1e-3 * kbar);

  // Per-trace (mu, delta) implied by a trial J; the shared mu should agree.
  auto implied = [&](double J, std::vector<double>& mu, std::vector<double>& dl) {
    mu.resize(K);
    dl.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      const cplx d(0.5 * (ka_p[k] - ka_m[k]), om_p[k] - om_m[k]);
      const cplx z = std::sqrt(d * d + 4.0 * J * J);
      mu[k] = 2.0 * z.real();
      dl[k] = z.imag();
    }
  };
  std::vector<double> J_starts;
  if (opt.fixed_J) {
    J_starts.push_back(*opt.fixed_J);
  } else {
    double split_max = 0.0;
    for (std::size_t k = 0; k < K; ++k) split_max = std::max(split_max, om_p[k] - om_m[k]);
    std::vector<std::pair<double, double>> scored;
    const int n_grid = 400;
    for (int i = 0; i <= n_grid; ++i) {
      const double J = 0.75 * split_max * i / n_grid;
      std::vector<double> mu, dl;
      implied(J, mu, dl);
      const double m = std::accumulate(mu.begin(), mu.end(), 0.0) / static_cast<double>(K);
      double var = 0.0;
      for (double v : mu) var += (v - m) * (v - m);
      scored.emplace_back(var, J);
    }
    // Local minima of the spread, best three first.
    std::vector<std::pair<double, double>> cand;
    for (std::size_t i = 0; i < scored.size(); ++i) {
      const bool left_ok = i == 0 || scored[i].first <= scored[i - 1].first;
      const bool right_ok = i + 1 == scored.size() || scored[i].first <= scored[i + 1].first;
      if (left_ok && right_ok) cand.push_back(scored[i]);
    }
    std::sort(cand.begin(), cand.end());
    for (std::size_t i = 0; i < cand.size() && i < 3; ++i) J_starts.push_back(cand[i].second);
    if (J_starts.empty()) J_starts.push_back(0.5 * split_max);
  }

  const bool fit_J = !opt.fixed_J.has_value();
  const Eigen::Index n_shared = fit_J ? 4 : 3;
  const Eigen::Index n_par = n_shared + 2 * static_cast<Eigen::Index>(K);

  auto unpack = [&](const lm::Vec& p, std::size_t k) {
    struct P {
      double kl, kr, kex, J, wbar, delta;
    } v{};
    v.kl = p[0] * U;
    v.kr = p[1] * U;
    v.kex = p[2] * U;
    v.J = fit_J ? p[3] * U : *opt.fixed_J;
    v.wbar = p[n_shared + 2 * static_cast<Eigen::Index>(k)] * U;
    v.delta = p[n_shared + 2 * static_cast<Eigen::Index>(k) + 1] * U;
    return v;
  };
  auto residual = [&](const lm::Vec& p) {
    lm::Vec r(static_cast<Eigen::Index>(n_res));
    Eigen::Index j = 0;
    for (std::size_t k = 0; k < K; ++k) {
      const auto v = unpack(p, k);
      const auto& tr = traces[k];
      const auto poles = detail::doublet_poles(v.wbar, v.kl, v.kr, v.J, v.delta);
      for (std::size_t i = 0; i < tr.omega.size(); ++i)
        r[j++] = detail::doublet_line(tr.omega[i] - center[k], poles, v.kex) - tr.transmission[i];
    }
    return r;
  };

  lm::Vec lo = lm::Vec::Constant(n_par, -std::numeric_limits<double>::infinity());
  lm::Vec hi = lm::Vec::Constant(n_par, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n_shared; ++i) lo[i] = 0.0;
  lo[0] = lo[1] = 1e-6;

  lm::Result best;
  bool have = false;
  for (double J0 : J_starts) {
    std::vector<double> mu, dl;
    implied(J0, mu, dl);
    const double mu0 = std::accumulate(mu.begin(), mu.end(), 0.0) / static_cast<double>(K);
    lm::Vec p(n_par);
    p[0] = (kbar + 0.5 * mu0) / U;
    p[1] = std::max(kbar - 0.5 * mu0, 0.05 * kbar) / U;
    p[2] = kex0 / U;
    if (fit_J) p[3] = J0 / U;
    for (std::size_t k = 0; k < K; ++k) {
      p[n_shared + 2 * static_cast<Eigen::Index>(k)] = 0.5 * (om_m[k] + om_p[k]) / U;
      p[n_shared + 2 * static_cast<Eigen::Index>(k) + 1] = dl[k] / U;
    }
    lm::Result r = lm::minimize(residual, p, lo, hi);
    if (!have || r.cost < best.cost) {
      best = std::move(r);
      have = true;
    }
  }

  std::vector<double> sig = detail::sigmas(best);
  lm::Vec p = best.x;
  // Ring labels: kappa_l >= kappa_r. Swapping the rings flips every delta.
  if (p[0] < p[1]) {
    std::swap(p[0], p[1]);
    std::swap(sig[0], sig[1]);
    for (std::size_t k = 0; k < K; ++k) p[n_shared + 2 * static_cast<Eigen::Index>(k) + 1] *= -1.0;
    rep.flags.push_back("ring_labels_swapped");
  }
  rep.converged = best.converged;
  rep.iterations = best.iterations;
  rep.residual_norm = std::sqrt(best.cost);
  rep.add("kappa_l", p[0] * U, "rad/s", sig[0] * U);
  rep.add("kappa_r", p[1] * U, "rad/s", sig[1] * U);
  rep.add("kappa_ex", p[2] * U, "rad/s", sig[2] * U);
  if (fit_J)
    rep.add("J", p[3] * U, "rad/s", sig[3] * U);
  else
    rep.add("J", *opt.fixed_J, "rad/s", 0.0);
  std::vector<double> bias, deltas;
  for (std::size_t k = 0; k < K; ++k) {
    const auto iw = n_shared + 2 * static_cast<Eigen::Index>(k);
    rep.add("omega_bar_" + std::to_string(k), p[iw] * U + center[k], "rad/s",
            sig[static_cast<std::size_t>(iw)] * U);
    rep.add("delta_" + std::to_string(k), p[iw + 1] * U, "rad/s",
            sig[static_cast<std::size_t>(iw + 1)] * U);
    if (traces[k].bias) {
      bias.push_back(*traces[k].bias);
      deltas.push_back(p[iw + 1] * U);
    }
  }
  // delta against bias: linear post-fit.
  if (bias.size() >= 2 && bias.size() == K) {
    const double mb = std::accumulate(bias.begin(), bias.end(), 0.0) / static_cast<double>(K);
    const double md = std::accumulate(deltas.begin(), deltas.end(), 0.0) / static_cast<double>(K);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      sxx += (bias[k] - mb) * (bias[k] - mb);
      sxy += (bias[k] - mb) * (deltas[k] - md);
    }
    if (sxx > 0.0) {
      const double slope = sxy / sxx;
      double ss = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const double e = deltas[k] - md - slope * (bias[k] - mb);
        ss += e * e;
      }
      const double s_slope =
          K > 2 ? std::sqrt(ss / static_cast<double>(K - 2) / sxx) : std::numeric_limits<double>::infinity();
      rep.add("delta_slope", slope, "rad/s/V", s_slope);
      rep.add("delta_intercept", md - slope * mb, "rad/s", 0.0);
    }
  }
  return rep;
}

// -------------------------------------------------------------------- S11

/// One-port reflection -1 + kappa_ex,m chi_m[omega - omega_m].
inline cplx s11_model(double omega, double omega_m, double Q_m, double eta_m) {
  const double kappa = omega_m / Q_m;
  return -1.0 + eta_m * kappa / cplx(0.5 * kappa, -(omega - omega_m));
}

struct S11Options {
  bool magnitude_only = false;
};

inline FitReport fit_s11(const std::vector<double>& omega_in, const std::vector<cplx>& s_in,
                         const S11Options& opt = {}) {
  detail::require(omega_in.size() == s_in.size() && omega_in.size() >= 8,
                  "fit_s11: need at least 8 points");
  const auto idx = detail::sort_order(omega_in);
  const auto omega = detail::permute(omega_in, idx);
  const auto s = detail::permute(s_in, idx);
  FitReport rep;
  rep.kind = "s11";
  if (opt.magnitude_only) rep.flags.push_back("magnitude_only_assumes_undercoupled");

  const double c = 0.5 * (omega.front() + omega.back());
  std::vector<double> x(omega.size()), prof(omega.size()), re(omega.size()), im(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    x[i] = omega[i] - c;
    prof[i] = opt.magnitude_only ? 1.0 - std::norm(s[i]) : std::norm(s[i] + 1.0);
    re[i] = s[i].real();
    im[i] = s[i].imag();
  }
  const double noise = opt.magnitude_only ? detail::noise_sigma(prof)
                                          : std::hypot(detail::noise_sigma(re), detail::noise_sigma(im));
  const std::size_t peak =
      static_cast<std::size_t>(std::max_element(prof.begin(), prof.end()) - prof.begin());
  const double depth = opt.magnitude_only ? 1.0 - std::abs(s[peak]) : std::abs(s[peak] + 1.0);
  if (depth < std::max(3.0 * noise, 1e-9)) {
    rep.flags.push_back("no_resonance");
    rep.converged = false;
    rep.add("omega_m", std::numeric_limits<double>::quiet_NaN(), "rad/s", 0.0);
    rep.add("Q_m", std::numeric_limits<double>::quiet_NaN(), "", 0.0);
    rep.add("eta_m", 0.0, "", 0.0);
    return rep;
  }
  const double width = detail::width_at(x, prof, peak, 0.5 * prof[peak]);
  const double U = width;
  const double wm0 = x[peak];
  const double eta0 = opt.magnitude_only ? 0.5 * (1.0 - std::abs(s[peak]))
                                         : 0.5 * std::abs(s[peak] + 1.0);
  const double Q0 = (c + wm0) / width;

  auto residual = [&](const lm::Vec& p) {
    const double wm = c + p[0] * U;
    const double Q = p[1] * Q0;
    const double eta = p[2];
    lm::Vec r(static_cast<Eigen::Index>(opt.magnitude_only ? omega.size() : 2 * omega.size()));
    for (std::size_t i = 0; i < omega.size(); ++i) {
      const cplx m = s11_model(omega[i], wm, Q, eta);
      if (opt.magnitude_only) {
        r[static_cast<Eigen::Index>(i)] = std::abs(m) - std::abs(s[i]);
      } else {
        r[static_cast<Eigen::Index>(2 * i)] = m.real() - s[i].real();
        r[static_cast<Eigen::Index>(2 * i + 1)] = m.imag() - s[i].imag();
      }
    }
    return r;
  };
  lm::Vec p0(3), lo(3), hi(3);
  p0 << wm0 / U, 1.0, std::clamp(eta0, 1e-6, 1.0);
  lo << -std::numeric_limits<double>::infinity(), 1e-6, 0.0;
  hi << std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
      opt.magnitude_only ? 0.5 : 1.0;
  const lm::Result r = lm::minimize(residual, p0, lo, hi);
  const auto sig = detail::sigmas(r);
  rep.converged = r.converged;
  rep.iterations = r.iterations;
  rep.residual_norm = std::sqrt(r.cost);
  rep.add("omega_m", c + r.x[0] * U, "rad/s", sig[0] * U);
  rep.add("Q_m", r.x[1] * Q0, "", sig[1] * Q0);
  rep.add("eta_m", r.x[2], "", sig[2]);
  return rep;
}

// ------------------------------------------------------- power sweep -> C0

struct PowerFitFixed {
  double eta_probes = 1.0;
  double eta_fiber_fiber = 1.0;
  double eta_m = 1.0;
  double eta_o = 1.0;
  double kappa_o = 0.0;  // rad/s
  double kappa_m = 0.0;  // rad/s
  double omega_L = wavelength_to_angular(kDefaultWavelength);
};

/// d eta_tot / d (C0 P_in) in the low-cooperativity limit.
inline double efficiency_slope_factor(const PowerFitFixed& f) {
  return 16.0 * f.eta_probes * f.eta_fiber_fiber * f.eta_m * f.eta_o * f.eta_o /
         (kHbar * f.omega_L * f.kappa_o);
}

/// Single-photon cooperativity from eta_tot(P_in) data (linear units),
/// with g0 = sqrt(kappa_o kappa_m C0).
inline FitReport fit_efficiency_power(const std::vector<double>& power_w,
                                      const std::vector<double>& eta_tot,
                                      const PowerFitFixed& fixed) {
  detail::require(power_w.size() == eta_tot.size(), "fit_efficiency_power: ragged data");
  detail::require(fixed.kappa_o > 0.0 && fixed.kappa_m > 0.0,
                  "fit_efficiency_power: kappa_o and kappa_m are required");
  std::vector<double> P, y;
  for (std::size_t i = 0; i < power_w.size(); ++i)
    if (power_w[i] > 0.0 && eta_tot[i] > 0.0) {
      P.push_back(power_w[i]);
      y.push_back(eta_tot[i]);
    }
  if (P.empty()) throw InvalidParameter("fit_efficiency_power: no positive data points");
  const double K = efficiency_slope_factor(fixed);

  // Slope fixed to 1 in log-log: relative-weighted linear solve for a = K C0.
  double su = 0.0, suu = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double u = P[i] / y[i];
    su += u;
    suu += u * u;
  }
  const double a = su / suu;
  double ss = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double r = 1.0 - a * P[i] / y[i];
    ss += r * r;
  }
  const std::size_t m = P.size();
  const double s_a = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1) / suu)
                           : std::numeric_limits<double>::infinity();

  FitReport rep;
  rep.kind = "power";
  rep.converged = true;
  rep.iterations = 1;
  rep.residual_norm = std::sqrt(ss);
  if (m >= 3) {
    // Relative-weighted quadratic: y / P = a + b P.
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd rhs = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
    double pmax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      A(static_cast<Eigen::Index>(i), 0) = P[i] / y[i];
      A(static_cast<Eigen::Index>(i), 1) = P[i] * P[i] / y[i];
      pmax = std::max(pmax, P[i]);
    }
    const Eigen::Vector2d q = A.colPivHouseholderQr().solve(rhs);
    const double curvature = std::abs(q[1]) * pmax / std::abs(q[0]);
    if (curvature > 0.1) rep.flags.push_back("out_of_regime_nonlinear");
  }
  const double C0 = a / K;
  const double sC0 = s_a / K;
  const double g0 = std::sqrt(fixed.kappa_o * fixed.kappa_m * C0);
  rep.add("C0", C0, "", sC0);
  rep.add("g0", g0, "rad/s", 0.5 * g0 * sC0 / C0);
  return rep;
}

// ------------------------------------------------------------ RC step fit

/// A (1 - exp(-(t - t0) / tau)) for t >= t0, zero before.
inline double rc_step(double t, double amplitude, double t0, double tau) {
  return t < t0 ? 0.0 : amplitude * -std::expm1(-(t - t0) / tau);
}

inline FitReport fit_rc_step(const std::vector<double>& t_in, const std::vector<double>& y_in) {
  detail::require(t_in.size() == y_in.size() && t_in.size() >= 8, "fit_rc_step: need at least 8 samples");
  const auto idx = detail::sort_order(t_in);
  const auto t = detail::permute(t_in, idx);
  const auto y = detail::permute(y_in, idx);
  const std::size_t n = t.size();
  const std::size_t tail = std::max<std::size_t>(n / 10, 3);
  const double A0 = detail::median(std::vector<double>(y.end() - static_cast<std::ptrdiff_t>(tail), y.end()));
  const double base = detail::median(std::vector<double>(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(tail)));
  const double noise = detail::noise_sigma(y);
  if (!(A0 - base > std::max(5.0 * noise, 1e-300)))
    throw InvalidParameter("fit_rc_step: no rising edge detected");

  // Crossing times on a 5-sample running mean.
  std::vector<double> sm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i >= 2 ? i - 2 : 0, b = std::min(n - 1, i + 2);
    double acc = 0.0;
    for (std::size_t j = a; j <= b; ++j) acc += y[j];
    sm[i] = acc / static_cast<double>(b - a + 1);
  }
  auto crossing = [&](double level) {
    for (std::size_t i = 1; i < n; ++i)
      if (sm[i] >= level && sm[i - 1] < level)
        return t[i - 1] + (level - sm[i - 1]) / (sm[i] - sm[i - 1]) * (t[i] - t[i - 1]);
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double t10 = crossing(base + 0.1 * (A0 - base));
  const double t90 = crossing(base + 0.9 * (A0 - base));
  if (!std::isfinite(t10) || !std::isfinite(t90) || t90 <= t10)
    throw InvalidParameter("fit_rc_step: no rising edge detected");
  const double tau0 = (t90 - t10) / 2.2;
  const double t00 = t10 - tau0 * std::log(1.0 / 0.9);

  auto residual = [&](const lm::Vec& p) {
    const double t0 = t00 + p[0] * tau0, tau = p[1] * tau0, A = p[2] * A0;
    lm::Vec r(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) r[static_cast<Eigen::Index>(i)] = rc_step(t[i], A, t0, tau) - y[i];
    return r;
  };
  lm::Vec p0(3), lo(3), hi(3);
  p0 << 0.0, 1.0, 1.0;
  lo << -std::numeric_limits<double>::infinity(), 1e-6, 0.0;
  hi << std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
      std::numeric_limits<double>::infinity();
  const lm::Result r = lm::minimize(residual, p0, lo, hi);
  const auto sig = detail::sigmas(r);
  FitReport rep;
  rep.kind = "step";
  rep.converged = r.converged;
  rep.iterations = r.iterations;
  rep.residual_norm = std::sqrt(r.cost);
  rep.add("tau_rc", r.x[1] * tau0, "s", sig[1] * tau0);
  rep.add("amplitude", r.x[2] * A0, "", sig[2] * A0);
  rep.add("t0", t00 + r.x[0] * tau0, "s", sig[0] * tau0);
  return rep;
}

// ---------------------------------------------------- photothermal fit

inline FitReport fit_photothermal(const std::vector<double>& f_in, const std::vector<cplx>& h_in) {
  detail::require(f_in.size() == h_in.size() && f_in.size() >= 8, "fit_photothermal: need at least 8 points");
  const auto idx = detail::sort_order(f_in);
  const auto f = detail::permute(f_in, idx);
  const auto h = detail::permute(h_in, idx);
  detail::require(f.front() > 0.0, "fit_photothermal: frequencies must be positive");
  double scale = 0.0;
  for (const auto& v : h) scale = std::max(scale, std::abs(v));
  detail::require(scale > 0.0, "fit_photothermal: response is identically zero");

  auto residual = [&](const lm::Vec& p) {
    PhotothermalModel m{p[0] * scale, p[1] * scale, std::pow(10.0, p[2]), p[3] * scale,
                        std::pow(10.0, p[4])};
    lm::Vec r(static_cast<Eigen::Index>(2 * f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) {
      const cplx v = m.a_kerr + m.a_local / cplx(1.0, f[i] / m.f_local) +
                     m.a_global / cplx(1.0, f[i] / m.f_global);
      r[static_cast<Eigen::Index>(2 * i)] = (v.real() - h[i].real()) / scale;
      r[static_cast<Eigen::Index>(2 * i + 1)] = (v.imag() - h[i].imag()) / scale;
    }
    return r;
  };

  // Starts: corners on a coarse log grid inside the data span.
  const double lf0 = std::log10(f.front()), lf1 = std::log10(f.back());
  const double a_hi = h.back().real() / scale;
  const double a_dc = h.front().real() / scale;
  lm::Result best;
  bool have = false;
  for (int i = 1; i <= 4; ++i)
    for (int j = i + 1; j <= 5; ++j) {
      const double lg = lf0 + (lf1 - lf0) * i / 6.0, ll = lf0 + (lf1 - lf0) * j / 6.0;
      lm::Vec p0(5);
      p0 << a_hi, 0.5 * (a_dc - a_hi), ll, 0.5 * (a_dc - a_hi), lg;
      lm::Result r = lm::minimize(residual, p0, {}, {});
      if (!have || r.cost < best.cost) {
        best = std::move(r);
        have = true;
      }
    }
  lm::Vec p = best.x;
  auto sig = detail::sigmas(best);
  if (p[4] > p[2]) {  // label the lower corner "global"
    std::swap(p[1], p[3]);
    std::swap(p[2], p[4]);
    std::swap(sig[1], sig[3]);
    std::swap(sig[2], sig[4]);
  }
  FitReport rep;
  rep.kind = "photothermal";
  rep.converged = best.converged;
  rep.iterations = best.iterations;
  rep.residual_norm = std::sqrt(best.cost);
  const double fl = std::pow(10.0, p[2]), fg = std::pow(10.0, p[4]);
  rep.add("a_kerr", p[0] * scale, "", sig[0] * scale);
  rep.add("a_local", p[1] * scale, "", sig[1] * scale);
  rep.add("f_local", fl, "Hz", fl * std::log(10.0) * sig[2]);
  rep.add("a_global", p[3] * scale, "", sig[3] * scale);
  rep.add("f_global", fg, "Hz", fg * std::log(10.0) * sig[4]);
  return rep;
}

}  // namespace triad
