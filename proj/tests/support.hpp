#pragma once

// Shared fixtures and independent reference computations for the tests.
// Nothing here calls the library's solvers; the oracles recompute the
// quantities they check from first principles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "relaysec/channel.hpp"

namespace relaysec::testing {

inline CVector random_cvector(std::mt19937_64& rng, Index n, double sigma = 1.0) {
  std::normal_distribution<double> d(0.0, sigma / std::sqrt(2.0));
  CVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = Complex(d(rng), d(rng));
  return v;
}

inline CMatrix random_cmatrix(std::mt19937_64& rng, Index r, Index c) {
  CMatrix m(r, c);
  for (Index j = 0; j < c; ++j) m.col(j) = random_cvector(rng, r);
  return m;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, Index n) {
  const CMatrix a = random_cmatrix(rng, n, n);
  return 0.5 * (a + a.adjoint());
}

inline CMatrix random_psd(std::mt19937_64& rng, Index n, Index rank) {
  const CMatrix a = random_cmatrix(rng, n, rank);
  return a * a.adjoint();
}

inline CMatrix random_pd(std::mt19937_64& rng, Index n) {
  CMatrix b = random_psd(rng, n, n);
  b.diagonal().array() += 0.1;
  return b;
}

struct Sigmas {
  double g = 10.0, h = 1.0, z = 1.0, k = 1.0;
};

inline ChannelRealization random_realization(std::uint64_t seed, Index m, Sigmas s = {}, double ps = 1.0) {
  std::mt19937_64 rng(seed);
  CVector g = random_cvector(rng, m, s.g);
  CVector h = random_cvector(rng, m, s.h);
  CVector z = random_cvector(rng, m, s.z);
  CVector k = random_cvector(rng, m, s.k);
  return make_realization(g, h, z, k, ps);
}

// --- scalar-sum evaluation of the link model ---------------------------------

struct ScalarModel {
  double ps, n0;
  std::vector<Complex> g, h, z, k;
  std::vector<double> n;

  explicit ScalarModel(const ChannelRealization& r) : ps(r.source_power), n0(r.dest_noise) {
    for (Index m = 0; m < r.relays(); ++m) {
      g.push_back(r.g[m]);
      h.push_back(r.h[m]);
      z.push_back(r.z[m]);
      k.push_back(r.k[m]);
      n.push_back(r.relay_noise[m]);
    }
  }

  double amp(std::size_t m) const { return 1.0 / std::sqrt(std::norm(g[m]) * ps + n[m]); }

  // Received signal power and noise power at a node with relay channel c.
  std::pair<double, double> powers(const std::vector<Complex>& c, const CVector& w) const {
    Complex sig = 0.0;
    double noise = 0.0;
    for (std::size_t m = 0; m < g.size(); ++m) {
      const double l = amp(m);
      sig += c[m] * g[m] * l * w[static_cast<Index>(m)];
      noise += std::norm(c[m] * l * w[static_cast<Index>(m)]) * n[m];
    }
    return {ps * std::norm(sig), noise};
  }

  double snr(const std::vector<Complex>& c, const CVector& w) const {
    const auto [s, nz] = powers(c, w);
    return s / (nz + n0);
  }
  double interference(const CVector& w) const {
    const auto [s, nz] = powers(k, w);
    return s + nz;
  }
};

// --- M = 2 brute force over (power split, relative phase) ------------------------

// Rate along a fixed unit direction d as a function of the power P = ||w||^2:
//   log2((N0+(a+b)P)/(N0+bP)) - log2((N0+(c+e)P)/(N0+eP)).
struct Direction {
  double a, b, c, e, n0;
  double rate(double p) const {
    return std::log2((n0 + (a + b) * p) / (n0 + b * p)) - std::log2((n0 + (c + e) * p) / (n0 + e * p));
  }
  // Best rate over P in [0, pmax]: endpoints plus the roots of
  // a (N0+(c+e)P)(N0+eP) = c (N0+(a+b)P)(N0+bP).
  double best(double pmax) const {
    double r = std::max(0.0, rate(pmax));
    const double q2 = a * (c + e) * e - c * (a + b) * b;
    const double q1 = a * n0 * (c + 2 * e) - c * n0 * (a + 2 * b);
    const double q0 = (a - c) * n0 * n0;
    std::vector<double> roots;
    if (std::abs(q2) < 1e-300) {
      if (q1 != 0.0) roots.push_back(-q0 / q1);
    } else {
      const double disc = q1 * q1 - 4 * q2 * q0;
      if (disc >= 0.0) {
        roots.push_back((-q1 + std::sqrt(disc)) / (2 * q2));
        roots.push_back((-q1 - std::sqrt(disc)) / (2 * q2));
      }
    }
    for (double p : roots) {
      if (p > 0.0 && p < pmax) r = std::max(r, rate(p));
    }
    return r;
  }
};

struct BruteForce {
  double rate = 0.0;
  CVector w;
};

// Total power pt, embedded primary user limited by gamma.
inline BruteForce brute_force_m2(const ChannelRealization& real, double pt, double gamma, int grid = 400) {
  const ScalarModel sm(real);
  BruteForce best;
  best.w = CVector::Zero(2);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < grid; ++i) {
    const double theta = 0.5 * pi * i / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double phi = 2.0 * pi * j / grid;
      CVector d(2);
      d << std::cos(theta), std::sin(theta) * std::polar(1.0, phi);
      const auto [sd, nd] = sm.powers(sm.h, d);
      const auto [se, ne] = sm.powers(sm.z, d);
      const double lam = sm.interference(d);
      const double pmax = lam > 0.0 ? std::min(pt, gamma / lam) : pt;
      const Direction dir{sd, nd, se, ne, sm.n0};
      const double r = dir.best(pmax);
      if (r > best.rate) {
        best.rate = r;
        best.w = d;
      }
    }
  }
  return best;
}

// --- null space and Rayleigh quotients ---------------------------------------------

// Orthonormal basis of {w : c_i^H w = 0} via a full-pivot LU kernel followed by
// Householder orthonormalization.
inline CMatrix kernel_basis(const std::vector<CVector>& channels) {
  const Index m = channels.front().size();
  CMatrix rows(static_cast<Index>(channels.size()), m);
  for (std::size_t i = 0; i < channels.size(); ++i) rows.row(static_cast<Index>(i)) = channels[i].adjoint();
  const CMatrix k = Eigen::FullPivLU<CMatrix>(rows).kernel();
  Eigen::HouseholderQR<CMatrix> qr(k);
  return qr.householderQ() * CMatrix::Identity(m, k.cols());
}

inline double rayleigh(const CMatrix& a, const CMatrix& b, const CVector& u) {
  return std::real(u.dot(a * u)) / std::real(u.dot(b * u));
}

// Largest generalized eigenvalue by power iteration on B^{-1} A.
inline double power_iteration_gev(const CMatrix& a, const CMatrix& b, std::mt19937_64& rng, int iters = 3000) {
  const Eigen::PartialPivLU<CMatrix> lu(b);
  CVector u = random_cvector(rng, a.rows());
  for (int i = 0; i < iters; ++i) {
    u = lu.solve(a * u);
    u.normalize();
  }
  return rayleigh(a, b, u);
}

// Random-direction search for max u^H A u / u^H B u followed by a shrinking
// random-perturbation hill climb from the best sample.
struct SampledMax {
  double sampled = 0.0;
  double refined = 0.0;
};

template <class Objective>
SampledMax sample_then_climb(Index n, int samples, std::mt19937_64& rng, Objective f, int climb_steps = 20000) {
  SampledMax out;
  out.sampled = -std::numeric_limits<double>::infinity();
  CVector best;
  for (int s = 0; s < samples; ++s) {
    CVector u = random_cvector(rng, n);
    u.normalize();
    const double v = f(u);
    if (v > out.sampled) {
      out.sampled = v;
      best = u;
    }
  }
  double cur = out.sampled;
  double step = 0.1;
  for (int s = 0; s < climb_steps; ++s) {
    CVector u = best + step * random_cvector(rng, n);
    u.normalize();
    const double v = f(u);
    if (v > cur) {
      cur = v;
      best = u;
    } else if (s % 200 == 199) {
      step *= 0.7;
    }
  }
  out.refined = cur;
  return out;
}

} // namespace relaysec::testing
