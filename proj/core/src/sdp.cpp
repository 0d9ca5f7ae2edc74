#include "relaysec/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "relaysec/linalg.hpp"

namespace relaysec::sdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One equality row of the internal conic form. Rows whose matrix is a single
// diagonal entry are kept in compact form; they dominate problems with
// per-relay power budgets and make their Schur entries O(1).
struct Row {
  bool unit = false;
  Index idx = 0;
  double coef = 0.0;
  CMatrix a;

  double inner(const CMatrix& x) const {
    if (unit) return coef * x(idx, idx).real();
    return (a.transpose().cwiseProduct(x)).sum().real();
  }

  void accumulate(double y, CMatrix& out) const {
    if (unit) {
      out(idx, idx) += y * coef;
    } else {
      out += y * a;
    }
  }

  double frob() const { return unit ? std::abs(coef) : a.norm(); }
};

Row make_row(const CMatrix& a) {
  Row r;
  Index nnz = 0;
  Index at = 0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) != Complex(0.0)) {
        ++nnz;
        at = i == j ? i : -1;
      }
    }
  }
  if (nnz == 1 && at >= 0 && a(at, at).imag() == 0.0) {
    r.unit = true;
    r.idx = at;
    r.coef = a(at, at).real();
  } else {
    r.a = 0.5 * (a + a.adjoint());
  }
  return r;
}

// minimize <C, X> + cl . x  s.t.  <A_i, X> + al_i . x = b_i,  X PSD, x >= 0
struct Conic {
  Index n = 0;
  Index nl = 0;
  std::vector<Row> rows;
  Eigen::MatrixXd al; // m x nl
  RVector b;
  CMatrix c;
  RVector cl;
};

struct IpmResult {
  bool converged = false;
  CMatrix X, Z;
  RVector x, z, y;
  double pobj = 0.0, dobj = 0.0;
  double pinf = kInf, dinf = kInf, gap = kInf;
  int iterations = 0;
  std::string message;
};

double max_step_psd(const CMatrix& x, const CMatrix& dx) {
  Eigen::LLT<CMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  CMatrix t = llt.matrixL().solve(dx);
  t = llt.matrixL().solve(t.adjoint()).adjoint();
  t = 0.5 * (t + t.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(t, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()[0];
  return lmin >= 0.0 ? kInf : -1.0 / lmin;
}

double max_step_lp(const RVector& x, const RVector& dx) {
  double a = kInf;
  for (Index i = 0; i < x.size(); ++i) {
    if (dx[i] < 0.0) a = std::min(a, -x[i] / dx[i]);
  }
  return a;
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

IpmResult run_ipm(const Conic& cp, const SolverOptions& opt) {
  const Index n = cp.n;
  const Index nl = cp.nl;
  const Index m = static_cast<Index>(cp.rows.size());
  IpmResult res;

  // Row normalization and objective scaling.
  std::vector<Row> rows = cp.rows;
  Eigen::MatrixXd al = cp.al;
  RVector b = cp.b;
  RVector rho(m);
  for (Index i = 0; i < m; ++i) {
    double nrm = std::sqrt(std::pow(rows[i].frob(), 2) + (nl > 0 ? al.row(i).squaredNorm() : 0.0));
    if (nrm == 0.0) nrm = 1.0;
    rho[i] = nrm;
    if (rows[i].unit) {
      rows[i].coef /= nrm;
    } else {
      rows[i].a /= nrm;
    }
    if (nl > 0) al.row(i) /= nrm;
    b[i] /= nrm;
  }
  const double cscale = std::max(1.0, cp.c.norm() + cp.cl.norm());
  const CMatrix c = cp.c / cscale;
  const RVector cl = cp.cl / cscale;

  double amax = 0.0;
  double bratio = 0.0;
  for (Index i = 0; i < m; ++i) {
    amax = std::max(amax, rows[i].frob());
    bratio = std::max(bratio, (1.0 + std::abs(b[i])) / (1.0 + rows[i].frob()));
  }
  const double dn = static_cast<double>(std::max<Index>(n, 1));
  const double xi = std::max({10.0, std::sqrt(dn), dn * bratio});
  const double eta = std::max({10.0, std::sqrt(dn), amax, c.norm() + cl.norm()});

  CMatrix X = xi * CMatrix::Identity(n, n);
  CMatrix Z = eta * CMatrix::Identity(n, n);
  RVector x = RVector::Constant(nl, xi);
  RVector z = RVector::Constant(nl, eta);
  RVector y = RVector::Zero(m);
  const double big = 1e12 * std::max(xi, eta);
  const double bnorm = b.norm();
  const double cnorm = c.norm() + cl.norm();
  const double ncone = static_cast<double>(n + nl);
  double step_scale = 0.9;

  std::vector<CMatrix> g(static_cast<std::size_t>(m));
  Eigen::MatrixXd schur(m, m);

  auto atrans = [&](const RVector& v) {
    CMatrix out = CMatrix::Zero(n, n);
    for (Index i = 0; i < m; ++i) rows[i].accumulate(v[i], out);
    return out;
  };

  int it = 0;
  for (; it <= opt.max_iterations; ++it) {
    RVector rp(m);
    for (Index i = 0; i < m; ++i) {
      rp[i] = b[i] - rows[i].inner(X) - (nl > 0 ? al.row(i).dot(x) : 0.0);
    }
    const CMatrix Rd = c - atrans(y) - Z;
    const RVector rdl = nl > 0 ? RVector(cl - al.transpose() * y - z) : RVector();
    const double pobj = (c.transpose().cwiseProduct(X)).sum().real() + (nl > 0 ? cl.dot(x) : 0.0);
    const double dobj = b.dot(y);
    const double comp = (X.transpose().cwiseProduct(Z)).sum().real() + (nl > 0 ? x.dot(z) : 0.0);
    res.pinf = rp.norm() / (1.0 + bnorm);
    res.dinf = std::sqrt(Rd.squaredNorm() + (nl > 0 ? rdl.squaredNorm() : 0.0)) / (1.0 + cnorm);
    res.gap = std::max(comp, std::abs(pobj - dobj)) / (1.0 + std::abs(pobj) + std::abs(dobj));
    res.pobj = pobj;
    res.dobj = dobj;
    if (res.pinf <= opt.tol && res.dinf <= opt.tol && res.gap <= opt.tol) {
      res.converged = true;
      break;
    }
    if (it == opt.max_iterations) {
      res.message = "iteration limit";
      break;
    }
    if (X.norm() > big || Z.norm() > big || y.norm() > big) {
      res.message = "iterates diverged";
      break;
    }
    const double mu = comp / ncone;

    Eigen::LLT<CMatrix> zllt(Z);
    if (zllt.info() != Eigen::Success) {
      res.message = "dual iterate lost definiteness";
      break;
    }
    CMatrix Zinv = zllt.solve(CMatrix::Identity(n, n));
    Zinv = hermitian_part(Zinv);

    for (Index j = 0; j < m; ++j) {
      const Row& r = rows[j];
      if (r.unit) {
        g[j] = r.coef * X.col(r.idx) * Zinv.row(r.idx);
      } else {
        g[j] = X * r.a * Zinv;
      }
    }
    for (Index i = 0; i < m; ++i) {
      for (Index j = i; j < m; ++j) {
        const double v = rows[i].inner(g[j]);
        schur(i, j) = v;
        schur(j, i) = v;
      }
    }
    RVector xz;
    if (nl > 0) {
      xz = x.cwiseQuotient(z);
      schur.noalias() += al * xz.asDiagonal() * al.transpose();
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(schur);
    if (ldlt.info() != Eigen::Success) {
      res.message = "Schur complement factorization failed";
      break;
    }

    struct Dir {
      CMatrix dX, dZ;
      RVector dx, dz, dy;
    };
    auto direction = [&](double target, const CMatrix* kmat, const RVector* kvec) {
      CMatrix h = target * Zinv - X - X * Rd * Zinv;
      if (kmat) h -= (*kmat) * Zinv;
      RVector hl;
      if (nl > 0) {
        hl = (RVector::Constant(nl, target) - x.cwiseProduct(z)).cwiseQuotient(z) -
             xz.cwiseProduct(rdl);
        if (kvec) hl -= kvec->cwiseQuotient(z);
      }
      RVector rhs(m);
      for (Index i = 0; i < m; ++i) {
        rhs[i] = rp[i] - rows[i].inner(h) - (nl > 0 ? al.row(i).dot(hl) : 0.0);
      }
      Dir d;
      d.dy = ldlt.solve(rhs);
      const CMatrix aty = atrans(d.dy);
      d.dZ = Rd - aty;
      d.dX = hermitian_part(h + X * aty * Zinv);
      if (nl > 0) {
        const RVector alty = al.transpose() * d.dy;
        d.dz = rdl - alty;
        d.dx = hl + xz.cwiseProduct(alty);
      }
      return d;
    };
    auto steps = [&](const Dir& d) {
      double ap = max_step_psd(X, d.dX);
      double ad = max_step_psd(Z, d.dZ);
      if (nl > 0) {
        ap = std::min(ap, max_step_lp(x, d.dx));
        ad = std::min(ad, max_step_lp(z, d.dz));
      }
      return std::pair<double, double>{ap, ad};
    };

    const Dir pred = direction(0.0, nullptr, nullptr);
    auto [ap_a, ad_a] = steps(pred);
    ap_a = std::min(1.0, ap_a);
    ad_a = std::min(1.0, ad_a);
    const CMatrix Xa = X + ap_a * pred.dX;
    const CMatrix Za = Z + ad_a * pred.dZ;
    double comp_a = (Xa.transpose().cwiseProduct(Za)).sum().real();
    if (nl > 0) comp_a += (x + ap_a * pred.dx).dot(z + ad_a * pred.dz);
    const double mu_a = std::max(comp_a, 0.0) / ncone;
    const double sigma = std::clamp(std::pow(mu_a / mu, 3.0), 0.0, 1.0);

    const CMatrix kmat = pred.dX * pred.dZ;
    const RVector kvec = nl > 0 ? RVector(pred.dx.cwiseProduct(pred.dz)) : RVector();
    const Dir corr = direction(sigma * mu, &kmat, nl > 0 ? &kvec : nullptr);
    auto [ap, ad] = steps(corr);
    ap = std::min(1.0, step_scale * ap);
    ad = std::min(1.0, step_scale * ad);
    if (ap < 1e-12 && ad < 1e-12) {
      res.message = "step length collapsed";
      break;
    }
    X = hermitian_part(X + ap * corr.dX);
    Z = hermitian_part(Z + ad * corr.dZ);
    y += ad * corr.dy;
    if (nl > 0) {
      x += ap * corr.dx;
      z += ad * corr.dz;
    }
    step_scale = 0.9 + 0.09 * std::min(ap, ad);
  }

  res.iterations = it;
  res.X = X;
  res.x = x;
  res.Z = Z * cscale;
  res.z = z * cscale;
  res.y = y.cwiseQuotient(rho) * cscale;
  res.pobj *= cscale;
  res.dobj *= cscale;
  return res;
}

double lhs(const Constraint& con, const CMatrix& x, const RVector& s) {
  double v = (con.a.transpose().cwiseProduct(x)).sum().real();
  if (con.scalar_coeffs.size() > 0) v += con.scalar_coeffs.dot(s);
  return v;
}

double relative_violation(const Constraint& con, const CMatrix& x, const RVector& s) {
  const double v = lhs(con, x, s);
  // Scalar terms count toward the scale, so a right-hand side moved into the
  // scalar block (as in the Charnes-Cooper form) is measured as before.
  const double scalar_part = con.scalar_coeffs.size() > 0 ? std::abs(con.scalar_coeffs.dot(s)) : 0.0;
  double viol = 0.0;
  switch (con.sense) {
    case Sense::LessEqual: viol = std::max(0.0, v - con.rhs); break;
    case Sense::GreaterEqual: viol = std::max(0.0, con.rhs - v); break;
    case Sense::Equal: viol = std::abs(v - con.rhs); break;
  }
  return viol / (1.0 + std::abs(con.rhs) + scalar_part);
}

double max_violation(const SdpProblem& p, const CMatrix& x, const RVector& s) {
  double worst = 0.0;
  for (const auto& con : p.constraints) worst = std::max(worst, relative_violation(con, x, s));
  return worst;
}

// Standard form of the user problem: slacks follow the user scalars.
Conic to_conic(const SdpProblem& p) {
  Conic cp;
  cp.n = p.dim;
  Index slacks = 0;
  for (const auto& con : p.constraints) {
    if (con.sense != Sense::Equal) ++slacks;
  }
  cp.nl = p.scalar_dim + slacks;
  const Index m = static_cast<Index>(p.constraints.size());
  cp.al = Eigen::MatrixXd::Zero(m, cp.nl);
  cp.b.resize(m);
  Index s = p.scalar_dim;
  for (Index i = 0; i < m; ++i) {
    const auto& con = p.constraints[i];
    cp.rows.push_back(make_row(con.a));
    if (con.scalar_coeffs.size() > 0) cp.al.row(i).head(p.scalar_dim) = con.scalar_coeffs.transpose();
    if (con.sense == Sense::LessEqual) cp.al(i, s++) = 1.0;
    if (con.sense == Sense::GreaterEqual) cp.al(i, s++) = -1.0;
    cp.b[i] = con.rhs;
  }
  cp.c = p.objective.size() > 0 ? CMatrix(-hermitian_part(p.objective)) : CMatrix::Zero(p.dim, p.dim);
  cp.cl = RVector::Zero(cp.nl);
  if (p.scalar_objective.size() > 0) cp.cl.head(p.scalar_dim) = -p.scalar_objective;
  return cp;
}

// Phase one: minimize u >= 0 with every relative violation <= u - 1.
Conic to_phase_one(const SdpProblem& p) {
  struct Half {
    const Constraint* con;
    bool upper; // lhs <= rhs + w (u - 1)
  };
  std::vector<Half> halves;
  for (const auto& con : p.constraints) {
    if (con.sense != Sense::GreaterEqual) halves.push_back({&con, true});
    if (con.sense != Sense::LessEqual) halves.push_back({&con, false});
  }
  Conic cp;
  cp.n = p.dim;
  const Index m = static_cast<Index>(halves.size());
  const Index u = p.scalar_dim;
  cp.nl = p.scalar_dim + 1 + m;
  cp.al = Eigen::MatrixXd::Zero(m, cp.nl);
  cp.b.resize(m);
  double xscale = 1.0;
  for (Index i = 0; i < m; ++i) {
    const Constraint& con = *halves[i].con;
    const double w = 1.0 + std::abs(con.rhs);
    const double sign = halves[i].upper ? 1.0 : -1.0;
    cp.rows.push_back(make_row(con.a));
    if (con.scalar_coeffs.size() > 0) cp.al.row(i).head(p.scalar_dim) = con.scalar_coeffs.transpose();
    // upper: lhs - w u + slack = rhs - w;  lower: lhs + w u - slack = rhs + w
    cp.al(i, u) = -sign * w;
    cp.al(i, u + 1 + i) = sign;
    cp.b[i] = con.rhs - sign * w;
    const double an = std::max(con.a.norm(), 1e-300);
    xscale = std::max(xscale, std::abs(con.rhs) / an);
  }
  // A tiny trace penalty keeps the phase-one optimal set bounded.
  const double eps = 1e-10 / (1.0 + xscale);
  cp.c = eps * CMatrix::Identity(p.dim, p.dim);
  cp.cl = RVector::Zero(cp.nl);
  cp.cl[u] = 1.0;
  if (p.scalar_dim > 0) cp.cl.head(p.scalar_dim).setConstant(eps);
  return cp;
}

} // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void SdpProblem::add(CMatrix a, Sense sense, double rhs, RVector scalar_coeffs) {
  constraints.push_back({std::move(a), std::move(scalar_coeffs), sense, rhs});
}

void SdpProblem::add_diagonal_bound(Index m, double bound) {
  CMatrix e = CMatrix::Zero(dim, dim);
  e(m, m) = 1.0;
  add(std::move(e), Sense::LessEqual, bound);
}

void SdpProblem::add_trace_bound(double bound) {
  add(CMatrix::Identity(dim, dim), Sense::LessEqual, bound);
}

void SdpProblem::validate() const {
  if (dim < 1) throw std::invalid_argument("SdpProblem: dimension must be positive");
  auto check = [&](const CMatrix& a, const char* what) {
    if (a.rows() != dim || a.cols() != dim) {
      throw std::invalid_argument(std::string("SdpProblem: ") + what + " has wrong dimensions");
    }
    if (!a.allFinite()) throw std::invalid_argument(std::string("SdpProblem: ") + what + " is not finite");
    if ((a - a.adjoint()).norm() > 1e-12 * std::max(1.0, a.norm())) {
      throw std::invalid_argument(std::string("SdpProblem: ") + what + " is not Hermitian");
    }
  };
  if (objective.size() > 0) check(objective, "objective");
  if (scalar_objective.size() != 0 && scalar_objective.size() != scalar_dim) {
    throw std::invalid_argument("SdpProblem: scalar objective length mismatch");
  }
  for (const auto& con : constraints) {
    check(con.a, "constraint matrix");
    if (con.scalar_coeffs.size() != 0 && con.scalar_coeffs.size() != scalar_dim) {
      throw std::invalid_argument("SdpProblem: scalar coefficient length mismatch");
    }
    if (!std::isfinite(con.rhs)) throw std::invalid_argument("SdpProblem: right-hand side is not finite");
  }
}

FeasibilityResult check_feasibility(const SdpProblem& p, double tol, const SolverOptions& opt) {
  p.validate();
  FeasibilityResult fr;
  if (p.constraints.empty()) {
    fr.status = Status::Optimal;
    fr.x = CMatrix::Zero(p.dim, p.dim);
    fr.scalars = RVector::Zero(p.scalar_dim);
    fr.margin = -1.0;
    return fr;
  }
  const Conic cp = to_phase_one(p);
  SolverOptions o = opt;
  o.tol = std::min(opt.tol, 0.1 * tol);
  const IpmResult r = run_ipm(cp, o);
  fr.iterations = r.iterations;
  fr.x = r.X;
  fr.scalars = r.x.head(p.scalar_dim);
  const double t_primal = r.x[p.scalar_dim] - 1.0;
  const double t_dual = r.dobj - 1.0;
  const double viol = max_violation(p, r.X, fr.scalars);
  const bool primal_ok = r.pinf <= 1e-6;
  fr.margin = primal_ok ? std::min(t_primal, viol) : t_primal;
  if (r.converged) {
    fr.status = fr.margin <= tol ? Status::Optimal : Status::Infeasible;
  } else if (primal_ok && viol <= tol) {
    fr.status = Status::Optimal;
  } else if (r.dinf <= 1e-6 && t_dual > tol) {
    // Weak duality: the dual objective bounds the phase-one optimum below.
    fr.status = Status::Infeasible;
    fr.margin = t_dual;
  } else {
    fr.status = Status::NumericalFailure;
  }
  return fr;
}

bool feasible(const SdpProblem& p, double tol) {
  const FeasibilityResult fr = check_feasibility(p, tol);
  if (fr.status == Status::NumericalFailure) {
    throw SolverError("feasibility check failed numerically (phase-one margin " +
                      std::to_string(fr.margin) + ")");
  }
  return fr.status == Status::Optimal;
}

SdpSolution solve(const SdpProblem& p, const SolverOptions& opt) {
  p.validate();
  SdpSolution sol;
  if (p.constraints.empty()) {
    // Unconstrained: bounded only when C is negative semidefinite.
    const double top = p.objective.size() > 0 ? linalg::hermitian_eig(p.objective).eigenvalues.maxCoeff() : 0.0;
    const bool scalars_bounded = p.scalar_objective.size() == 0 || p.scalar_objective.maxCoeff() <= 0.0;
    if (top <= 0.0 && scalars_bounded) {
      sol.status = Status::Optimal;
      sol.x = CMatrix::Zero(p.dim, p.dim);
      sol.scalars = RVector::Zero(p.scalar_dim);
    } else {
      sol.message = "objective is unbounded";
    }
    return sol;
  }

  const Conic cp = to_conic(p);
  const IpmResult r = run_ipm(cp, opt);
  sol.iterations = r.iterations;
  const RVector s = r.x.head(p.scalar_dim);
  const double viol = max_violation(p, r.X, s);
  const bool near_optimal = r.converged || (r.pinf <= opt.feas_tol && r.dinf <= 1e-6 && r.gap <= 1e-6);
  if (near_optimal && viol <= opt.feas_tol) {
    sol.status = Status::Optimal;
    sol.x = r.X;
    sol.scalars = s;
    sol.dual = -r.y;
    sol.objective = -r.pobj;
    sol.max_violation = viol;
    if (!r.converged) sol.message = "stopped early (" + r.message + ") at acceptable accuracy";
    return sol;
  }

  const FeasibilityResult fr = check_feasibility(p, opt.feas_tol, opt);
  sol.iterations += fr.iterations;
  sol.infeasibility_margin = fr.margin;
  if (fr.status == Status::Infeasible) {
    sol.status = Status::Infeasible;
    sol.message = "phase-one certifies infeasibility";
  } else {
    sol.status = Status::NumericalFailure;
    sol.message = "interior-point method failed: " + (r.message.empty() ? std::string("no convergence") : r.message);
  }
  return sol;
}

FractionalSolution solve_fractional(const FractionalProgram& fp, const SolverOptions& opt) {
  const SdpProblem& base = fp.constraints;
  const Index n = base.dim;
  if (!(fp.den_const > 0.0)) throw std::invalid_argument("solve_fractional: denominator constant must be positive");
  const Index ns = base.scalar_dim + 1;
  const Index tau = base.scalar_dim;
  SdpProblem p(n, ns);
  p.objective = fp.num.size() > 0 ? fp.num : CMatrix::Zero(n, n);
  p.scalar_objective = RVector::Zero(ns);
  p.scalar_objective[tau] = fp.num_const;

  RVector norm_coeffs = RVector::Zero(ns);
  norm_coeffs[tau] = fp.den_const;
  p.add(fp.den.size() > 0 ? fp.den : CMatrix::Zero(n, n), Sense::Equal, 1.0, norm_coeffs);
  for (const auto& con : base.constraints) {
    RVector coeffs = RVector::Zero(ns);
    if (con.scalar_coeffs.size() > 0) coeffs.head(base.scalar_dim) = con.scalar_coeffs;
    coeffs[tau] = -con.rhs;
    p.add(con.a, con.sense, 0.0, std::move(coeffs));
  }

  const SdpSolution s = solve(p, opt);
  FractionalSolution out;
  out.iterations = s.iterations;
  out.status = s.status;
  out.message = s.message;
  if (s.status != Status::Optimal) return out;
  const double t = s.scalars[tau];
  const double ymag = std::max(1.0, s.x.norm());
  if (!(t > 1e-12 * ymag)) {
    out.status = Status::NumericalFailure;
    out.message = "fractional program has no bounded maximizer";
    return out;
  }
  out.x = s.x / t;
  const auto trace_with = [&](const CMatrix& a) {
    return a.size() > 0 ? (a.transpose().cwiseProduct(out.x)).sum().real() : 0.0;
  };
  out.value = (fp.num_const + trace_with(fp.num)) / (fp.den_const + trace_with(fp.den));
  return out;
}

double rank_ratio(const CMatrix& x) {
  if (x.rows() < 2) return 0.0;
  const RVector ev = linalg::hermitian_eig(x).eigenvalues;
  const Index n = ev.size();
  const double l1 = ev[n - 1];
  if (!(l1 > 0.0)) return 0.0;
  return std::max(ev[n - 2], 0.0) / l1;
}

std::optional<CVector> rank_one_extract(const CMatrix& x, double ratio_tol) {
  const linalg::HermitianEig eig = linalg::hermitian_eig(x);
  const Index n = eig.eigenvalues.size();
  const double l1 = eig.eigenvalues[n - 1];
  if (!(l1 > 0.0)) return CVector::Zero(n);
  const double l2 = n > 1 ? std::max(eig.eigenvalues[n - 2], 0.0) : 0.0;
  if (l2 / l1 > ratio_tol) return std::nullopt;
  CVector w = std::sqrt(l1) * eig.eigenvectors.col(n - 1);
  Index best = 0;
  w.cwiseAbs().maxCoeff(&best);
  w *= std::conj(w[best]) / std::abs(w[best]);
  return w;
}

RandomizationResult gaussian_randomization(const CMatrix& x, const DerivedChannel& dc,
                                           const PowerConstraint& pc,
                                           const std::vector<PrimaryUser>& users, int n_samples,
                                           std::uint64_t seed, const CMatrix& basis) {
  if (n_samples < 1) throw std::invalid_argument("gaussian_randomization: need at least one sample");
  const CMatrix root = linalg::psd_sqrt(x);
  const Index n = x.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  RandomizationResult best;
  best.w = CVector::Zero(dc.relays());
  best.rate = 0.0;
  for (int j = 0; j < n_samples; ++j) {
    CVector xi(n);
    for (Index i = 0; i < n; ++i) xi[i] = Complex(normal(rng), normal(rng));
    CVector w = root * xi;
    if (basis.size() > 0) w = basis * w;
    if (w.squaredNorm() == 0.0) continue;
    // Scale up or down until the tightest constraint is active.
    double a2 = kInf;
    if (pc.has_total()) a2 = std::min(a2, pc.total / w.squaredNorm());
    if (pc.has_individual()) {
      for (Index m = 0; m < w.size(); ++m) {
        if (std::norm(w[m]) > 0.0) a2 = std::min(a2, pc.per_relay[m] / std::norm(w[m]));
      }
    }
    for (const auto& pu : users) {
      if (!pu.limit.active()) continue;
      const double lam = interference(pu, dc.source_power, w);
      if (lam > 0.0) a2 = std::min(a2, pu.limit.gamma / lam);
    }
    if (!std::isfinite(a2)) continue;
    w *= std::sqrt(a2);
    ++best.candidates;
    const double r = secrecy_rate(dc, w);
    if (!best.found || r > best.rate) {
      best.found = true;
      best.rate = r;
      best.w = w;
    }
  }
  return best;
}

RandomizationResult gaussian_randomization(const CMatrix& x, const DerivedChannel& dc,
                                           const PowerConstraint& pc, InterferenceLimit lim,
                                           int n_samples, std::uint64_t seed) {
  return gaussian_randomization(x, dc, pc, {primary_user(dc, lim)}, n_samples, seed);
}

} // namespace relaysec::sdp
