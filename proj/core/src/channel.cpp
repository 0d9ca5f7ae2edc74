#include "relaysec/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace relaysec {

namespace {

void require_length(const CVector& w, Index m, const char* what) {
  if (w.size() != m) {
    throw std::invalid_argument(std::string(what) + ": weight vector has length " +
                                std::to_string(w.size()) + ", expected " +
                                std::to_string(m));
  }
}

double quad_diag(const RVector& d, const CVector& w) {
  return (d.array() * w.array().abs2()).sum();
}

} // namespace

void ChannelRealization::validate() const {
  const Index m = g.size();
  if (m < 1) throw std::invalid_argument("channel realization needs at least one relay");
  if (h.size() != m || z.size() != m || k.size() != m || relay_noise.size() != m) {
    throw std::invalid_argument("channel vectors g, h, z, k and relay noise must share length M");
  }
  if (!(relay_noise.array() > 0.0).all()) {
    throw std::invalid_argument("relay noise variances must be positive");
  }
  if (!(dest_noise > 0.0)) throw std::invalid_argument("destination noise N0 must be positive");
  if (!(source_power > 0.0)) throw std::invalid_argument("source power Ps must be positive");
}

ChannelRealization make_realization(CVector g, CVector h, CVector z, CVector k,
                                    double source_power) {
  ChannelRealization r;
  r.relay_noise = RVector::Ones(g.size());
  r.g = std::move(g);
  r.h = std::move(h);
  r.z = std::move(z);
  r.k = std::move(k);
  r.source_power = source_power;
  r.dest_noise = 1.0;
  return r;
}

CVector composite_channel(const ChannelRealization& real, const CVector& c) {
  const Index m = real.relays();
  if (c.size() != m) throw std::invalid_argument("composite_channel: length mismatch");
  CVector out(m);
  for (Index i = 0; i < m; ++i) {
    const double l = 1.0 / std::sqrt(std::norm(real.g[i]) * real.source_power + real.relay_noise[i]);
    out[i] = std::conj(c[i]) * std::conj(real.g[i]) * l;
  }
  return out;
}

RVector forwarded_noise(const ChannelRealization& real, const CVector& c) {
  const Index m = real.relays();
  if (c.size() != m) throw std::invalid_argument("forwarded_noise: length mismatch");
  RVector out(m);
  for (Index i = 0; i < m; ++i) {
    const double l2 = 1.0 / (std::norm(real.g[i]) * real.source_power + real.relay_noise[i]);
    out[i] = std::norm(c[i]) * l2 * real.relay_noise[i];
  }
  return out;
}

DerivedChannel derive_channel(const ChannelRealization& real) {
  real.validate();
  const Index m = real.relays();
  DerivedChannel dc;
  dc.dest_noise = real.dest_noise;
  dc.source_power = real.source_power;
  dc.scale.resize(m);
  for (Index i = 0; i < m; ++i) {
    dc.scale[i] = 1.0 / std::sqrt(std::norm(real.g[i]) * real.source_power + real.relay_noise[i]);
  }
  dc.hg = composite_channel(real, real.h);
  dc.hz = composite_channel(real, real.z);
  dc.hk = composite_channel(real, real.k);
  dc.dh = forwarded_noise(real, real.h);
  dc.dz = forwarded_noise(real, real.z);
  dc.dk = forwarded_noise(real, real.k);
  return dc;
}

CMatrix DerivedChannel::signal_form_dest() const {
  CMatrix q = source_power * hg * hg.adjoint();
  q.diagonal() += dh.cast<Complex>();
  return q;
}

CMatrix DerivedChannel::signal_form_eve() const {
  CMatrix q = source_power * hz * hz.adjoint();
  q.diagonal() += dz.cast<Complex>();
  return q;
}

CMatrix DerivedChannel::interference_form() const {
  CMatrix q = source_power * hk * hk.adjoint();
  q.diagonal() += dk.cast<Complex>();
  return q;
}

std::string to_string(PowerMode mode) {
  switch (mode) {
    case PowerMode::Total: return "total";
    case PowerMode::Individual: return "individual";
    case PowerMode::Both: return "both";
  }
  return "unknown";
}

PowerMode power_mode_from_string(const std::string& name) {
  if (name == "total") return PowerMode::Total;
  if (name == "individual") return PowerMode::Individual;
  if (name == "both") return PowerMode::Both;
  throw std::invalid_argument("unknown power mode '" + name + "'");
}

PowerConstraint PowerConstraint::make_total(double pt) {
  PowerConstraint pc;
  pc.mode = PowerMode::Total;
  pc.total = pt;
  return pc;
}

PowerConstraint PowerConstraint::make_individual(RVector p) {
  PowerConstraint pc;
  pc.mode = PowerMode::Individual;
  pc.per_relay = std::move(p);
  return pc;
}

PowerConstraint PowerConstraint::make_both(double pt, RVector p) {
  PowerConstraint pc;
  pc.mode = PowerMode::Both;
  pc.total = pt;
  pc.per_relay = std::move(p);
  return pc;
}

PowerConstraint PowerConstraint::equal_split(double pt, Index relays) {
  return make_individual(RVector::Constant(relays, pt / static_cast<double>(relays)));
}

double PowerConstraint::max_total_power() const {
  switch (mode) {
    case PowerMode::Total: return total;
    case PowerMode::Individual: return per_relay.sum();
    case PowerMode::Both: return std::min(total, per_relay.sum());
  }
  return total;
}

void PowerConstraint::validate(Index relays) const {
  if (has_total() && !(total > 0.0 && std::isfinite(total))) {
    throw std::invalid_argument("total relay power PT must be positive and finite");
  }
  if (has_individual()) {
    if (per_relay.size() != relays) {
      throw std::invalid_argument("per-relay power vector must have length M");
    }
    if (!(per_relay.array() > 0.0).all() || !per_relay.allFinite()) {
      throw std::invalid_argument("per-relay powers must be positive and finite");
    }
  }
}

PrimaryUser primary_user(const DerivedChannel& dc, InterferenceLimit lim) {
  return PrimaryUser{dc.hk, dc.dk, lim};
}

PrimaryUser primary_user(const ChannelRealization& real, const CVector& k,
                         InterferenceLimit lim) {
  return PrimaryUser{composite_channel(real, k), forwarded_noise(real, k), lim};
}

double received_snr(const CVector& hc, const RVector& noise_diag, double ps,
                    double n0, const CVector& w) {
  require_length(w, hc.size(), "received_snr");
  const double signal = ps * std::norm(hc.dot(w)); // dot() conjugates hc
  return signal / (quad_diag(noise_diag, w) + n0);
}

double snr_destination(const DerivedChannel& dc, const CVector& w) {
  return received_snr(dc.hg, dc.dh, dc.source_power, dc.dest_noise, w);
}

double snr_eavesdropper(const DerivedChannel& dc, const CVector& w) {
  return received_snr(dc.hz, dc.dz, dc.source_power, dc.dest_noise, w);
}

double interference(const PrimaryUser& pu, double source_power, const CVector& w) {
  require_length(w, pu.hk.size(), "interference");
  return source_power * std::norm(pu.hk.dot(w)) + quad_diag(pu.dk, w);
}

double interference(const DerivedChannel& dc, const CVector& w) {
  require_length(w, dc.relays(), "interference");
  return dc.source_power * std::norm(dc.hk.dot(w)) + quad_diag(dc.dk, w);
}

double secrecy_rate(const DerivedChannel& dc, const CVector& w) {
  return std::log2(1.0 + snr_destination(dc, w)) - std::log2(1.0 + snr_eavesdropper(dc, w));
}

namespace {

bool exceeds(double value, double bound, double tol) {
  return value > bound * (1.0 + tol) + tol * 1e-12;
}

} // namespace

FeasibilityReport check_feasible(const DerivedChannel& dc, const CVector& w,
                                 const PowerConstraint& pc,
                                 const std::vector<PrimaryUser>& users, double tol) {
  FeasibilityReport report;
  if (w.size() != dc.relays()) {
    throw std::invalid_argument("check_feasible: weight vector length mismatch");
  }
  if (pc.has_total()) {
    const double p = w.squaredNorm();
    if (exceeds(p, pc.total, tol)) {
      report.violations.push_back({ConstraintKind::TotalPower, 0, p, pc.total});
    }
  }
  if (pc.has_individual()) {
    for (Index m = 0; m < w.size(); ++m) {
      const double p = std::norm(w[m]);
      if (exceeds(p, pc.per_relay[m], tol)) {
        report.violations.push_back({ConstraintKind::RelayPower, m, p, pc.per_relay[m]});
      }
    }
  }
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (!users[i].limit.active()) continue;
    const double lam = interference(users[i], dc.source_power, w);
    if (exceeds(lam, users[i].limit.gamma, tol)) {
      report.violations.push_back(
          {ConstraintKind::Interference, static_cast<Index>(i), lam, users[i].limit.gamma});
    }
  }
  return report;
}

FeasibilityReport check_feasible(const DerivedChannel& dc, const CVector& w,
                                 const PowerConstraint& pc, InterferenceLimit lim,
                                 double tol) {
  return check_feasible(dc, w, pc, {primary_user(dc, lim)}, tol);
}

double max_feasible_scale(const CVector& w, double source_power,
                          const PowerConstraint& pc,
                          const std::vector<PrimaryUser>& users) {
  // Every constrained quantity is quadratic in w, so alpha^2 scales it.
  double a2 = 1.0;
  if (pc.has_total()) {
    const double p = w.squaredNorm();
    if (p > 0.0) a2 = std::min(a2, pc.total / p);
  }
  if (pc.has_individual()) {
    for (Index m = 0; m < w.size(); ++m) {
      const double p = std::norm(w[m]);
      if (p > 0.0) a2 = std::min(a2, pc.per_relay[m] / p);
    }
  }
  for (const auto& pu : users) {
    if (!pu.limit.active()) continue;
    const double lam = interference(pu, source_power, w);
    if (lam > 0.0) a2 = std::min(a2, pu.limit.gamma / lam);
  }
  return std::sqrt(std::max(a2, 0.0));
}

void evaluate_into(SolveResult& r, const DerivedChannel& dc) {
  r.snr_dest = snr_destination(dc, r.w);
  r.snr_eve = snr_eavesdropper(dc, r.w);
  r.interference = interference(dc, r.w);
  r.secrecy_rate = std::log2(1.0 + r.snr_dest) - std::log2(1.0 + r.snr_eve);
}

} // namespace relaysec
