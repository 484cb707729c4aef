#include "optexec/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "optexec/error.hpp"

namespace optexec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Bound { free, lower, upper, fixed };

// Canonical problem: bounds plus general rows M u (= | >=) r, the first
// m_eq rows being equalities.
struct Canonical {
  const MatrixXd* H = nullptr;
  VectorXd c;
  VectorXd lb, ub;
  MatrixXd M;
  VectorXd r;
  Eigen::Index m_eq = 0;

  [[nodiscard]] Eigen::Index k() const { return c.size(); }
  [[nodiscard]] Eigen::Index m() const { return r.size(); }
};

struct CoreResult {
  VectorXd u;
  std::vector<Bound> bound;
  std::vector<bool> row_active;
  VectorXd row_mult;   // multipliers of all rows (0 when inactive)
  VectorXd bound_mult; // g_i - (M' lambda)_i on bound-fixed variables, else 0
  std::size_t iterations = 0;
  bool converged = false;
};

double row_tol(double feas_tol, double rhs) { return feas_tol * std::max(1.0, std::abs(rhs)); }

// Largest violation of the canonical constraints at u.
double violation(const Canonical& cp, const VectorXd& u) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < cp.k(); ++i) {
    v = std::max(v, cp.lb(i) - u(i));
    v = std::max(v, u(i) - cp.ub(i));
  }
  if (cp.m() > 0) {
    const VectorXd Mu = cp.M * u;
    for (Eigen::Index j = 0; j < cp.m(); ++j) {
      const double res = Mu(j) - cp.r(j);
      v = std::max(v, j < cp.m_eq ? std::abs(res) : -res);
    }
  }
  return v;
}

double scaled_feas_tol(const Canonical& cp, double feas_tol) {
  double scale = 1.0;
  if (cp.m() > 0) scale = std::max(scale, cp.r.cwiseAbs().maxCoeff());
  return feas_tol * scale;
}

// Whether the active rows restricted to the free columns have full row rank.
bool active_rows_independent(const Canonical& cp, const std::vector<Bound>& bound,
                             const std::vector<bool>& row_active) {
  std::vector<Eigen::Index> F, R;
  for (Eigen::Index i = 0; i < cp.k(); ++i) {
    if (bound[i] == Bound::free) F.push_back(i);
  }
  for (Eigen::Index j = 0; j < cp.m(); ++j) {
    if (row_active[j]) R.push_back(j);
  }
  if (R.empty()) return true;
  if (R.size() > F.size()) return false;
  MatrixXd C(R.size(), F.size());
  for (std::size_t a = 0; a < R.size(); ++a) {
    for (std::size_t b = 0; b < F.size(); ++b) C(a, b) = cp.M(R[a], F[b]);
  }
  Eigen::FullPivLU<MatrixXd> lu(C);
  lu.setThreshold(1e-10);
  return lu.rank() == static_cast<Eigen::Index>(R.size());
}

struct Step {
  VectorXd p;          // full-length, zero on fixed variables
  VectorXd lambda;     // multipliers of the active rows, in row order
  bool zero_curvature = false;
};

// Solves the equality-constrained subproblem on the free variables,
//   H_FF p - C' lambda = -g_F,  C p = 0,
// by the null-space method: p = Z w with Z spanning ker C.
Step solve_eqp(const Canonical& cp, const VectorXd& g, const std::vector<Eigen::Index>& F,
               const std::vector<Eigen::Index>& R) {
  const Eigen::Index nf = static_cast<Eigen::Index>(F.size());
  const Eigen::Index ma = static_cast<Eigen::Index>(R.size());
  const MatrixXd& H = *cp.H;

  Step step;
  step.p = VectorXd::Zero(cp.k());
  step.lambda = VectorXd::Zero(ma);
  if (nf == 0) return step;

  MatrixXd HF(nf, nf);
  VectorXd gF(nf);
  for (Eigen::Index a = 0; a < nf; ++a) {
    gF(a) = g(F[a]);
    for (Eigen::Index b = 0; b < nf; ++b) HF(a, b) = H(F[a], F[b]);
  }

  MatrixXd Y, Z, Rm;
  if (ma > 0) {
    MatrixXd Ct(nf, ma);
    for (Eigen::Index a = 0; a < ma; ++a) {
      for (Eigen::Index b = 0; b < nf; ++b) Ct(b, a) = cp.M(R[a], F[b]);
    }
    Eigen::HouseholderQR<MatrixXd> qr(Ct);
    const MatrixXd Q = qr.householderQ();
    Y = Q.leftCols(ma);
    Z = Q.rightCols(nf - ma);
    Rm = qr.matrixQR().topRows(ma).triangularView<Eigen::Upper>();
  } else {
    Z = MatrixXd::Identity(nf, nf);
  }

  const Eigen::Index nz = Z.cols();
  VectorXd pF = VectorXd::Zero(nf);
  if (nz > 0) {
    const MatrixXd Hz = Z.transpose() * HF * Z;
    const VectorXd gz = Z.transpose() * gF;
    Eigen::LLT<MatrixXd> llt(Hz);
    if (llt.info() == Eigen::Success && llt.rcond() > 1e-12) {
      pF = -Z * llt.solve(gz);
    } else {
      // Singular reduced Hessian: take a zero-curvature descent direction if
      // the gradient has a component along the kernel, otherwise the
      // minimum-norm Newton step on the range.
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (Hz + Hz.transpose()));
      const VectorXd& ev = es.eigenvalues();
      const MatrixXd& V = es.eigenvectors();
      const double tol = 1e-11 * std::max(1.0, ev.cwiseAbs().maxCoeff());
      const VectorXd gv = V.transpose() * gz;
      const double gscale = 1e-12 * std::max(1.0, gF.lpNorm<Eigen::Infinity>());
      VectorXd w = VectorXd::Zero(nz);
      for (Eigen::Index i = 0; i < nz; ++i) {
        if (ev(i) <= tol && std::abs(gv(i)) > gscale) {
          w(i) = -gv(i);
          step.zero_curvature = true;
        }
      }
      if (!step.zero_curvature) {
        for (Eigen::Index i = 0; i < nz; ++i) {
          if (ev(i) > tol) w(i) = -gv(i) / ev(i);
        }
      }
      pF = Z * (V * w);
    }
  }
  if (ma > 0 && !step.zero_curvature) {
    const VectorXd resid = HF * pF + gF;
    step.lambda = Rm.triangularView<Eigen::Upper>().solve(Y.transpose() * resid);
  }
  for (Eigen::Index a = 0; a < nf; ++a) step.p(F[a]) = pF(a);
  return step;
}

// Removes the drift of the active rows accumulated by long steps, using the
// minimum-norm correction on the free variables.
void restore_active_rows(const Canonical& cp, const std::vector<Bound>& bound,
                         const std::vector<bool>& row_active, VectorXd& u) {
  std::vector<Eigen::Index> F, R;
  for (Eigen::Index i = 0; i < cp.k(); ++i) {
    if (bound[i] == Bound::free) F.push_back(i);
  }
  for (Eigen::Index j = 0; j < cp.m(); ++j) {
    if (row_active[j]) R.push_back(j);
  }
  if (R.empty() || F.empty()) return;
  MatrixXd C(R.size(), F.size());
  VectorXd res(R.size());
  for (std::size_t a = 0; a < R.size(); ++a) {
    res(a) = cp.r(R[a]) - cp.M.row(R[a]).dot(u);
    for (std::size_t b = 0; b < F.size(); ++b) C(a, b) = cp.M(R[a], F[b]);
  }
  if (res.lpNorm<Eigen::Infinity>() == 0.0) return;
  const VectorXd y = (C * C.transpose()).ldlt().solve(res);
  const VectorXd delta = C.transpose() * y;
  for (std::size_t b = 0; b < F.size(); ++b) u(F[b]) += delta(b);
}

void trace_row(std::ostream* os, std::size_t iter, double obj, std::size_t n_active,
               double step_norm, const char* action, long index) {
  if (os == nullptr) return;
  *os << iter << ',' << obj << ',' << n_active << ',' << step_norm << ',' << action << ','
      << index << '\n';
}

double canonical_objective(const Canonical& cp, const VectorXd& u) {
  return 0.5 * u.dot(*cp.H * u) + cp.c.dot(u);
}

// Primal active-set iterations from a feasible u0.
CoreResult active_set(const Canonical& cp, VectorXd u, const QpOptions& opts,
                      std::size_t max_iter) {
  const Eigen::Index k = cp.k();
  const Eigen::Index m = cp.m();
  CoreResult res;
  res.bound.assign(k, Bound::free);
  res.row_active.assign(m, false);
  for (Eigen::Index j = 0; j < cp.m_eq; ++j) res.row_active[j] = true;

  // Initial working set: bounds first, then inequality rows, keeping the
  // active rows independent on the free variables.
  for (Eigen::Index i = 0; i < k; ++i) {
    Bound bnd = Bound::free;
    if (cp.lb(i) == cp.ub(i)) {
      bnd = Bound::fixed;
    } else if (std::isfinite(cp.lb(i)) &&
               std::abs(u(i) - cp.lb(i)) <= row_tol(opts.feas_tol, cp.lb(i))) {
      bnd = Bound::lower;
    } else if (std::isfinite(cp.ub(i)) &&
               std::abs(u(i) - cp.ub(i)) <= row_tol(opts.feas_tol, cp.ub(i))) {
      bnd = Bound::upper;
    }
    if (bnd == Bound::free) continue;
    res.bound[i] = bnd;
    if (!active_rows_independent(cp, res.bound, res.row_active)) {
      res.bound[i] = Bound::free;
      continue;
    }
    u(i) = bnd == Bound::upper ? cp.ub(i) : cp.lb(i);
  }
  if (m > cp.m_eq) {
    const VectorXd Mu = cp.M * u;
    for (Eigen::Index j = cp.m_eq; j < m; ++j) {
      if (std::abs(Mu(j) - cp.r(j)) > row_tol(opts.feas_tol, cp.r(j))) continue;
      res.row_active[j] = true;
      if (!active_rows_independent(cp, res.bound, res.row_active)) res.row_active[j] = false;
    }
  }

  res.row_mult = VectorXd::Zero(m);
  res.bound_mult = VectorXd::Zero(k);

  std::vector<Eigen::Index> F, R;
  // Set after a full unblocked Newton step: u minimizes the objective on the
  // current working set, whatever round-off the next step would show.
  bool at_min = false;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;
    F.clear();
    R.clear();
    for (Eigen::Index i = 0; i < k; ++i) {
      if (res.bound[i] == Bound::free) F.push_back(i);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      if (res.row_active[j]) R.push_back(j);
    }
    const VectorXd g = *cp.H * u + cp.c;
    const Step st = solve_eqp(cp, g, F, R);
    const double pnorm = st.p.lpNorm<Eigen::Infinity>();
    const std::size_t n_active = (k - F.size()) + R.size();

    if (!st.zero_curvature && (at_min || pnorm <= 1e-13 * (1.0 + u.lpNorm<Eigen::Infinity>()))) {
      at_min = false;
      // Stationary on the working set: check multiplier signs.
      VectorXd rowm = VectorXd::Zero(m);
      for (std::size_t a = 0; a < R.size(); ++a) rowm(R[a]) = st.lambda(a);
      VectorXd gres = g;
      if (m > 0) gres -= cp.M.transpose() * rowm;
      VectorXd bm = VectorXd::Zero(k);
      double worst = -opts.kkt_tol;
      long drop = -1;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (res.bound[i] == Bound::free) continue;
        bm(i) = gres(i);
        const double signed_mult = res.bound[i] == Bound::upper ? -gres(i) : gres(i);
        if (res.bound[i] != Bound::fixed && signed_mult < worst) {
          worst = signed_mult;
          drop = static_cast<long>(i);
        }
      }
      for (Eigen::Index j = cp.m_eq; j < m; ++j) {
        if (res.row_active[j] && rowm(j) < worst) {
          worst = rowm(j);
          drop = static_cast<long>(k + j);
        }
      }
      res.row_mult = rowm;
      res.bound_mult = bm;
      if (drop < 0) {
        trace_row(opts.trace, iter, canonical_objective(cp, u), n_active, pnorm, "optimal", -1);
        res.u = u;
        res.converged = true;
        return res;
      }
      if (drop < k) {
        res.bound[drop] = Bound::free;
      } else {
        res.row_active[drop - k] = false;
      }
      trace_row(opts.trace, iter, canonical_objective(cp, u), n_active, pnorm, "drop", drop);
      continue;
    }

    // Ratio test; on ties the smallest index blocks.
    double alpha = st.zero_curvature ? kInf : 1.0;
    long block = -1;
    const double tiny = 1e-14 * std::max(1.0, pnorm);
    for (Eigen::Index i : F) {
      const double pi = st.p(i);
      double ai = kInf;
      if (pi < -tiny && std::isfinite(cp.lb(i))) ai = (cp.lb(i) - u(i)) / pi;
      if (pi > tiny && std::isfinite(cp.ub(i))) ai = (cp.ub(i) - u(i)) / pi;
      ai = std::max(ai, 0.0);
      if (ai < alpha) {
        alpha = ai;
        block = static_cast<long>(i);
      }
    }
    // Variables are visited in index order above, rows after them, so a
    // strict comparison keeps the smallest index on ties.
    if (m > cp.m_eq) {
      const VectorXd Mp = cp.M * st.p;
      const VectorXd Mu = cp.M * u;
      for (Eigen::Index j = cp.m_eq; j < m; ++j) {
        if (res.row_active[j] || Mp(j) >= -tiny) continue;
        const double aj = std::max((cp.r(j) - Mu(j)) / Mp(j), 0.0);
        if (aj < alpha) {
          alpha = aj;
          block = static_cast<long>(k + j);
        }
      }
    }
    if (!std::isfinite(alpha)) {
      throw Error(ErrorCode::NotConvex, "qp", "objective unbounded below");
    }
    u += alpha * st.p;
    at_min = block < 0 && !st.zero_curvature;
    if (block >= 0) {
      if (block < k) {
        const bool lower = st.p(block) < 0.0;
        res.bound[block] = lower ? Bound::lower : Bound::upper;
        u(block) = lower ? cp.lb(block) : cp.ub(block);
      } else {
        res.row_active[block - k] = true;
      }
      restore_active_rows(cp, res.bound, res.row_active, u);
      trace_row(opts.trace, iter, canonical_objective(cp, u), n_active, pnorm, "add", block);
    } else {
      restore_active_rows(cp, res.bound, res.row_active, u);
      trace_row(opts.trace, iter, canonical_objective(cp, u), n_active, pnorm, "step", -1);
    }
  }
  res.u = u;
  res.converged = false;
  return res;
}

// Finds a feasible point by an elastic problem whose starting point is
// feasible by construction. Returns nullopt when the constraints cannot be met.
std::optional<VectorXd> phase_one(const Canonical& cp, const VectorXd& start,
                                  const QpOptions& opts) {
  const Eigen::Index k = cp.k();
  const Eigen::Index m = cp.m();
  const Eigen::Index m_in = m - cp.m_eq;
  const Eigen::Index ns = 2 * cp.m_eq + m_in;
  const Eigen::Index nx = k + ns;
  constexpr double ridge = 1e-8;

  MatrixXd H1 = MatrixXd::Identity(nx, nx) * ridge;
  Canonical p1;
  p1.H = &H1;
  p1.c = VectorXd::Zero(nx);
  p1.c.tail(ns).setOnes();
  p1.lb.resize(nx);
  p1.ub.resize(nx);
  p1.lb.head(k) = cp.lb;
  p1.ub.head(k) = cp.ub;
  p1.lb.tail(ns).setZero();
  p1.ub.tail(ns).setConstant(kInf);
  p1.M = MatrixXd::Zero(m, nx);
  p1.M.leftCols(k) = cp.M;
  p1.r = cp.r;
  p1.m_eq = cp.m_eq;

  VectorXd x = VectorXd::Zero(nx);
  x.head(k) = start;
  const VectorXd res = cp.M * start - cp.r;
  for (Eigen::Index j = 0; j < cp.m_eq; ++j) {
    p1.M(j, k + 2 * j) = 1.0;
    p1.M(j, k + 2 * j + 1) = -1.0;
    x(k + 2 * j) = std::max(-res(j), 0.0);
    x(k + 2 * j + 1) = std::max(res(j), 0.0);
  }
  for (Eigen::Index j = 0; j < m_in; ++j) {
    const Eigen::Index row = cp.m_eq + j;
    const Eigen::Index col = k + 2 * cp.m_eq + j;
    p1.M(row, col) = 1.0;
    x(col) = std::max(-res(row), 0.0);
  }

  QpOptions o = opts;
  o.trace = nullptr;
  const CoreResult cr = active_set(p1, x, o, 50 * static_cast<std::size_t>(nx + m + 1));
  const VectorXd u = cr.u.head(k);
  if (violation(cp, u) > 10.0 * scaled_feas_tol(cp, opts.feas_tol)) return std::nullopt;
  return u;
}

}  // namespace

double QpProblem::objective(const VectorXd& u) const { return 0.5 * u.dot(H * u) + c.dot(u); }

QpSolution solve(const QpProblem& problem, const QpOptions& opts) {
  const Eigen::Index k = problem.c.size();
  auto invalid = [](const std::string& what) {
    throw Error(ErrorCode::InvalidParameter, "qp", what);
  };
  if (k < 1) invalid("empty problem");
  if (problem.H.rows() != k || problem.H.cols() != k) invalid("H dimension mismatch");
  const double hscale = std::max(1.0, problem.H.cwiseAbs().maxCoeff());
  if ((problem.H - problem.H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * hscale) {
    invalid("H is not symmetric");
  }

  Canonical cp;
  cp.H = &problem.H;
  cp.c = problem.c;
  cp.lb = problem.lb ? *problem.lb : VectorXd::Constant(k, -kInf);
  cp.ub = problem.ub ? *problem.ub : VectorXd::Constant(k, kInf);
  if (cp.lb.size() != k || cp.ub.size() != k) invalid("bound dimension mismatch");

  const Eigen::Index m_eq = problem.E ? problem.E->rows() : 0;
  const Eigen::Index m_in = problem.G ? problem.G->rows() : 0;
  if (problem.E && (problem.E->cols() != k || !problem.d || problem.d->size() != m_eq)) {
    invalid("equality row dimension mismatch");
  }
  if (problem.G && (problem.G->cols() != k || !problem.h || problem.h->size() != m_in)) {
    invalid("inequality row dimension mismatch");
  }
  cp.m_eq = m_eq;
  cp.M.resize(m_eq + m_in, k);
  cp.r.resize(m_eq + m_in);
  if (m_eq > 0) {
    cp.M.topRows(m_eq) = *problem.E;
    cp.r.head(m_eq) = *problem.d;
  }
  if (m_in > 0) {
    cp.M.bottomRows(m_in) = *problem.G;
    cp.r.tail(m_in) = *problem.h;
  }

  auto fail = [&](QpStatus status, ErrorCode code, const std::string& what) {
    if (opts.throw_on_failure) throw Error(code, "qp", what);
    QpSolution sol;
    sol.status = status;
    sol.u = VectorXd::Zero(k);
    return sol;
  };

  for (Eigen::Index i = 0; i < k; ++i) {
    if (cp.lb(i) > cp.ub(i)) {
      return fail(QpStatus::infeasible, ErrorCode::Infeasible,
                  "lb > ub at index " + std::to_string(i));
    }
  }

  // Convexity on the null space of the equality rows.
  {
    MatrixXd Z;
    if (m_eq > 0) {
      Eigen::FullPivLU<MatrixXd> lu(*problem.E);
      Z = lu.kernel();
      if (lu.rank() == k) Z.resize(k, 0);
    } else {
      Z = MatrixXd::Identity(k, k);
    }
    if (Z.cols() > 0 && Z.norm() > 0.0) {
      Eigen::HouseholderQR<MatrixXd> qr(Z);
      const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(k, Z.cols());
      const MatrixXd R = Q.transpose() * problem.H * Q;
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (R + R.transpose()),
                                                 Eigen::EigenvaluesOnly);
      const double lmin = es.eigenvalues().minCoeff();
      if (lmin < -opts.convexity_tol * hscale) {
        throw Error(ErrorCode::NotConvex, "qp",
                    "smallest projected eigenvalue " + std::to_string(lmin));
      }
    }
  }

  // Starting point.
  VectorXd start = opts.warm_start && opts.warm_start->size() == k ? *opts.warm_start
                                                                    : VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!std::isfinite(start(i))) start(i) = 0.0;
    start(i) = std::clamp(start(i), cp.lb(i), cp.ub(i));
  }
  const double ftol = scaled_feas_tol(cp, opts.feas_tol);
  if (cp.M.rows() > 0 && violation(cp, start) > ftol) {
    auto feasible = phase_one(cp, start, opts);
    if (!feasible) {
      return fail(QpStatus::infeasible, ErrorCode::Infeasible,
                  "constraints admit no feasible point");
    }
    start = *feasible;
  }

  const std::size_t max_iter =
      opts.max_iter > 0 ? opts.max_iter : 50 * static_cast<std::size_t>(k + cp.M.rows());
  if (opts.trace) *opts.trace << "iter,objective,n_active,step_norm,action,index\n";
  const CoreResult cr = active_set(cp, start, opts, max_iter);
  if (!cr.converged) {
    if (opts.throw_on_failure) {
      throw Error(ErrorCode::MaxIterations, "qp",
                  "no convergence after " + std::to_string(max_iter) + " iterations");
    }
  }

  QpSolution sol;
  sol.u = cr.u;
  sol.objective = problem.objective(cr.u);
  sol.status = cr.converged ? QpStatus::optimal : QpStatus::max_iter;
  sol.iterations = cr.iterations;
  sol.z_lb = VectorXd::Zero(k);
  sol.z_ub = VectorXd::Zero(k);
  sol.nu = cr.row_mult.head(m_eq);
  sol.lambda = cr.row_mult.tail(m_in);
  for (Eigen::Index i = 0; i < k; ++i) {
    switch (cr.bound[i]) {
      case Bound::free: break;
      case Bound::lower: sol.z_lb(i) = cr.bound_mult(i); break;
      case Bound::upper: sol.z_ub(i) = -cr.bound_mult(i); break;
      case Bound::fixed:
        if (cr.bound_mult(i) >= 0.0) {
          sol.z_lb(i) = cr.bound_mult(i);
        } else {
          sol.z_ub(i) = -cr.bound_mult(i);
        }
        break;
    }
    if (cr.bound[i] != Bound::free) sol.active_set.push_back(static_cast<std::size_t>(i));
  }
  for (Eigen::Index j = 0; j < cp.m(); ++j) {
    if (cr.row_active[j]) sol.active_set.push_back(static_cast<std::size_t>(k + j));
  }

  // KKT report.
  const VectorXd g = problem.H * sol.u + problem.c;
  VectorXd stat = g - sol.z_lb + sol.z_ub;
  if (cp.M.rows() > 0) stat -= cp.M.transpose() * cr.row_mult;
  double kkt = stat.lpNorm<Eigen::Infinity>();
  double gap = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    kkt = std::max({kkt, -sol.z_lb(i), -sol.z_ub(i)});
    if (sol.z_lb(i) != 0.0) {
      const double comp = sol.z_lb(i) * (sol.u(i) - cp.lb(i));
      kkt = std::max(kkt, std::abs(comp));
      gap += comp;
    }
    if (sol.z_ub(i) != 0.0) {
      const double comp = sol.z_ub(i) * (cp.ub(i) - sol.u(i));
      kkt = std::max(kkt, std::abs(comp));
      gap += comp;
    }
  }
  if (cp.M.rows() > 0) {
    const VectorXd res = cp.M * sol.u - cp.r;
    for (Eigen::Index j = 0; j < cp.m(); ++j) {
      const double comp = cr.row_mult(j) * res(j);
      if (j >= m_eq) {
        kkt = std::max({kkt, -cr.row_mult(j), std::abs(comp)});
      }
      gap += comp;
    }
  }
  sol.kkt_residual = kkt;
  sol.primal_residual = violation(cp, sol.u);
  sol.duality_gap = gap;
  return sol;
}

}  // namespace optexec
