#pragma once

// Reference computations that share no code with the library: dense
// eigen-decompositions, frequency-domain linear solves of the coupled-mode
// equations, and textbook integrals. Tests compare library output to these.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace oracle {

using cplx = std::complex<double>;

struct Eig {
  double omega_minus, omega_plus, kappa_minus, kappa_plus;
};

// Eigenvalues of the non-Hermitian two-ring matrix H = [[w_l - i k_l/2, J],
// [J, w_r - i k_r/2]]; each eigenvalue is omega - i kappa/2.
inline Eig two_ring_eigen(double wl, double kl, double wr, double kr, double J) {
  Eigen::Matrix2cd H;
  H << cplx(wl, -0.5 * kl), cplx(J, 0.0), cplx(J, 0.0), cplx(wr, -0.5 * kr);
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(H);
  cplx a = es.eigenvalues()(0), b = es.eigenvalues()(1);
  if (a.real() > b.real()) std::swap(a, b);
  return {a.real(), b.real(), -2.0 * a.imag(), -2.0 * b.imag()};
}

// Full width at half maximum of 1 / ((1 + (2w/a)^2)(1 + (2w/b)^2)), a and b
// the two FWHMs: u = w^2 solves u^2 16/(a^2 b^2) + 4u (1/a^2 + 1/b^2) - 1 = 0.
inline double two_lorentzian_fwhm(double a, double b) {
  const double A = 16.0 / (a * a * b * b);
  const double B = 4.0 * (1.0 / (a * a) + 1.0 / (b * b));
  const double u = (-B + std::sqrt(B * B + 4.0 * A)) / (2.0 * A);
  return 2.0 * std::sqrt(u);
}

// integral over the real line of 1/(1 + (w/a)^2) 1/(1 + (w/b)^2), a and b
// half widths, by composite Simpson after w = a tan(theta).
inline double lorentz_product_integral(double a, double b, int n = 20000) {
  const double lo = -0.5 * std::numbers::pi, hi = 0.5 * std::numbers::pi;
  const double h = (hi - lo) / n;
  auto f = [&](double th) {
    const double t = std::tan(th);
    return a / (1.0 + (a * t / b) * (a * t / b));  // dw/(1+w^2/a^2) = a dtheta
  };
  double s = 0.0;
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;  // endpoints contribute zero
}

// Coupled-mode equations of one converting cavity mode a, the pumped
// spectator s and the mechanical mode b, solved as a 3x3 linear system at
// microwave offset w (resolved-sideband frame). Returns the 2x2 scattering
// matrix [[S_oo, S_om], [S_mo, S_mm]] with rows = output port. For the
// two-mode-squeezing case the optical amplitudes are conjugated.
struct Scatter {
  cplx oo, om, mo, mm;
};

inline Scatter coupled_mode_solve(bool anti_stokes, double ko, double keo, double ks, double kes,
                                  double km, double kem, cplx g, double w_spec, double w = 0.0,
                                  double w_sig = 0.0) {
  const cplx i(0.0, 1.0);
  auto solve = [&](cplx drive_o, cplx drive_m) {
    // unknowns (a, b); spectator solved separately, it only reflects.
    Eigen::Matrix2cd M;
    Eigen::Vector2cd rhs;
    if (anti_stokes) {
      // -i w a = -(ko/2 - i w_sig) a + i g b + sqrt(keo) a_in
      // -i w b = -(km/2) b + i g* a + sqrt(kem) c_in
      M << cplx(0.5 * ko, -(w + w_sig)), -i * g, -i * std::conj(g), cplx(0.5 * km, -w);
    } else {
      // conjugate frame A = a^dag:
      // -i w A = -(ko/2 - i w_sig) A - i g* b + sqrt(keo) a_in^dag
      // -i w b = -(km/2) b + i g A + sqrt(kem) c_in
      M << cplx(0.5 * ko, -(w + w_sig)), i * std::conj(g), -i * g, cplx(0.5 * km, -w);
    }
    rhs << std::sqrt(keo) * drive_o, std::sqrt(kem) * drive_m;
    return Eigen::Vector2cd(M.partialPivLu().solve(rhs));
  };
  const cplx chi_s = 1.0 / cplx(0.5 * ks, -w_spec);
  const Eigen::Vector2cd xo = solve(1.0, 0.0);
  const Eigen::Vector2cd xm = solve(0.0, 1.0);
  Scatter s;
  s.oo = 1.0 - std::sqrt(keo) * xo(0) - kes * chi_s;
  s.mo = std::sqrt(kem) * xo(1);  // c_out = -c_in + sqrt(kem) b
  s.om = -std::sqrt(keo) * xm(0);
  s.mm = -1.0 + std::sqrt(kem) * xm(1);
  return s;
}

// Gaussian noise with a fixed seed, independent of the code under test.
struct Noise {
  std::mt19937_64 rng;
  explicit Noise(std::uint64_t seed) : rng(seed) {}
  double operator()(double sigma) { return std::normal_distribution<double>(0.0, sigma)(rng); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
};

}  // namespace oracle
