#include "gndi/lmi.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace gndi {

struct SolverAccess {
  using Constraint = LmiProblem::Constraint;
  static const std::vector<Constraint>& constraints(const LmiProblem& p) {
    return p.constraints_;
  }
};

int LmiProblem::add_unknown(const std::string& name, int rows, int cols, bool symmetric) {
  if (!constraints_.empty()) {
    throw std::logic_error("LmiProblem: declare all unknowns before constraints");
  }
  if (rows < 0 || cols < 0 || (symmetric && rows != cols)) {
    throw std::invalid_argument("LmiProblem: bad unknown dimensions for " + name);
  }
  for (const auto& b : blocks_) {
    if (b.name == name) {
      throw std::invalid_argument("LmiProblem: duplicate unknown " + name);
    }
  }
  UnknownBlock b;
  b.name = name;
  b.rows = rows;
  b.cols = cols;
  b.symmetric = symmetric;
  b.offset = total_params_;
  b.params = symmetric ? rows * (rows + 1) / 2 : rows * cols;
  blocks_.push_back(b);
  total_params_ += b.params;
  return static_cast<int>(blocks_.size()) - 1;
}

std::vector<Eigen::MatrixXd> LmiProblem::blocks_from_theta(const Eigen::VectorXd& theta) const {
  if (theta.size() != total_params_) {
    throw std::invalid_argument("LmiProblem: parameter vector has wrong length");
  }
  std::vector<Eigen::MatrixXd> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    Eigen::MatrixXd m(b.rows, b.cols);
    int k = b.offset;
    if (b.symmetric) {
      for (int i = 0; i < b.rows; ++i) {
        for (int j = i; j < b.cols; ++j) {
          m(i, j) = theta(k);
          m(j, i) = theta(k);
          ++k;
        }
      }
    } else {
      for (int i = 0; i < b.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) m(i, j) = theta(k++);
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

Eigen::VectorXd LmiProblem::theta_from_blocks(
    const std::map<std::string, Eigen::MatrixXd>& values) const {
  Eigen::VectorXd theta(total_params_);
  size_t matched = 0;
  for (const auto& b : blocks_) {
    const auto it = values.find(b.name);
    if (it == values.end()) {
      throw std::invalid_argument("certificate is missing block " + b.name);
    }
    const Eigen::MatrixXd& m = it->second;
    if (m.rows() != b.rows || m.cols() != b.cols) {
      throw std::invalid_argument("certificate block " + b.name + " has wrong dimensions");
    }
    if (b.symmetric && (m - m.transpose()).norm() > 1e-9 * (1.0 + m.norm())) {
      throw std::invalid_argument("certificate block " + b.name + " is not symmetric");
    }
    ++matched;
    int k = b.offset;
    if (b.symmetric) {
      for (int i = 0; i < b.rows; ++i)
        for (int j = i; j < b.cols; ++j) theta(k++) = 0.5 * (m(i, j) + m(j, i));
    } else {
      for (int i = 0; i < b.rows; ++i)
        for (int j = 0; j < b.cols; ++j) theta(k++) = m(i, j);
    }
  }
  if (matched != values.size()) {
    throw std::invalid_argument("certificate contains blocks the problem does not declare");
  }
  return theta;
}

void LmiProblem::add_constraint(const std::string& name, ConstraintSense sense,
                                const Assembler& assemble) {
  const double sign = (sense == ConstraintSense::NegativeDefinite) ? -1.0 : 1.0;
  auto probe = [&](const Eigen::VectorXd& th) -> Eigen::MatrixXd {
    Eigen::MatrixXd m = assemble(blocks_from_theta(th));
    if (m.rows() != m.cols() || m.rows() == 0) {
      throw std::invalid_argument("constraint " + name + ": matrix must be square and nonempty");
    }
    return 0.5 * sign * (m + m.transpose());
  };

  Constraint c;
  c.name = name;
  c.sense = sense;
  Eigen::VectorXd th = Eigen::VectorXd::Zero(total_params_);
  c.f0 = probe(th);
  c.size = static_cast<int>(c.f0.rows());
  c.coeffs.resize(total_params_);
  for (int k = 0; k < total_params_; ++k) {
    th(k) = 1.0;
    const Eigen::MatrixXd fk = probe(th) - c.f0;
    th(k) = 0.0;
    if (fk.rows() != c.size) {
      throw std::invalid_argument("constraint " + name + ": size depends on the unknowns");
    }
    for (int r = 0; r < c.size; ++r) {
      for (int col = 0; col < c.size; ++col) {
        if (fk(r, col) != 0.0) c.coeffs[k].push_back({r, col, fk(r, col)});
      }
    }
    if (!c.coeffs[k].empty()) c.active.push_back(k);
  }

  // Affinity audit at theta = 2*ones: catches quadratic terms in a
  // single unknown (which unit probes read as linear) and bilinear
  // cross terms alike.
  th.setConstant(2.0);
  Eigen::MatrixXd recon = c.f0;
  for (int k : c.active) {
    for (const auto& e : c.coeffs[k]) recon(e.r, e.c) += 2.0 * e.v;
  }
  const Eigen::MatrixXd direct = probe(th);
  if ((direct - recon).norm() > 1e-9 * (1.0 + direct.norm())) {
    throw std::invalid_argument("constraint " + name + ": assembler is not affine in the unknowns");
  }
  constraints_.push_back(std::move(c));
}

Eigen::MatrixXd LmiProblem::assemble_adjusted(int constraint, const Eigen::VectorXd& theta) const {
  const Constraint& c = constraints_.at(constraint);
  if (theta.size() != total_params_) {
    throw std::invalid_argument("LmiProblem: parameter vector has wrong length");
  }
  Eigen::MatrixXd m = c.f0;
  for (int k : c.active) {
    for (const auto& e : c.coeffs[k]) m(e.r, e.c) += theta(k) * e.v;
  }
  return m;
}

std::string LmiProblem::parameter_label(int k) const {
  for (const auto& b : blocks_) {
    if (k < b.offset || k >= b.offset + b.params) continue;
    int rem = k - b.offset;
    int i = 0, j = 0;
    if (b.symmetric) {
      for (i = 0; i < b.rows; ++i) {
        const int row_len = b.cols - i;
        if (rem < row_len) {
          j = i + rem;
          break;
        }
        rem -= row_len;
      }
    } else {
      i = rem / b.cols;
      j = rem % b.cols;
    }
    return b.name + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
  }
  return "theta[" + std::to_string(k) + "]";
}

MarginReport margins_at(const LmiProblem& p, const Eigen::VectorXd& theta) {
  MarginReport rep;
  rep.min_raw = std::numeric_limits<double>::infinity();
  rep.min_normalized = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.constraint_count(); ++i) {
    const Eigen::MatrixXd m = p.assemble_adjusted(i, theta);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    ConstraintMargin cm;
    cm.name = p.constraint_name(i);
    cm.raw = es.eigenvalues().minCoeff();
    cm.normalized = cm.raw / std::max(1.0, m.norm());
    rep.min_raw = std::min(rep.min_raw, cm.raw);
    rep.min_normalized = std::min(rep.min_normalized, cm.normalized);
    rep.constraints.push_back(std::move(cm));
  }
  return rep;
}

MarginReport verify_certificate(const LmiProblem& p, const Certificate& c) {
  return margins_at(p, p.theta_from_blocks(c.blocks));
}

namespace {

Certificate make_certificate(const LmiProblem& p, const Eigen::VectorXd& theta,
                             const MarginReport& rep) {
  Certificate cert;
  const auto blocks = p.blocks_from_theta(theta);
  const auto& meta = p.unknowns();
  for (size_t i = 0; i < meta.size(); ++i) cert.blocks[meta[i].name] = blocks[i];
  cert.margin = rep.min_raw;
  return cert;
}

}  // namespace

SolveResult solve_feasibility(const LmiProblem& p, const SolverOptions& opts) {
  const auto& cons = SolverAccess::constraints(p);
  if (cons.empty()) {
    throw std::invalid_argument("solve_feasibility: problem has no constraints");
  }
  const int np = p.parameter_count();
  SolveResult res;

  if (np == 0) {
    res.margins = margins_at(p, Eigen::VectorXd(0));
    res.certificate = make_certificate(p, Eigen::VectorXd(0), res.margins);
    res.status = res.margins.min_normalized >= opts.feasibility_tol
                     ? SolveStatus::Feasible
                     : SolveStatus::Infeasible;
    return res;
  }

  // Margin maximization: maximize t subject to every (sign-adjusted)
  // constraint matrix dominating t*I and ||theta||^2 <= radius^2,
  // solved by Newton descent on the log-det barrier along a shrinking
  // barrier-weight path. theta = 0 with t below the smallest constant-
  // part eigenvalue is strictly feasible for the lifted problem, so no
  // separate phase-1 is needed.
  const double rho2 = opts.radius * opts.radius;
  const int nc = static_cast<int>(cons.size());

  auto build_s = [&](const Eigen::VectorXd& th, double t, int i) {
    Eigen::MatrixXd s = cons[i].f0;
    for (int k : cons[i].active) {
      for (const auto& e : cons[i].coeffs[k]) s(e.r, e.c) += th(k) * e.v;
    }
    s.diagonal().array() -= t;
    return s;
  };

  auto barrier_value = [&](const Eigen::VectorXd& th, double t, double mu,
                           bool& ok) -> double {
    ok = false;
    const double g = rho2 - th.squaredNorm();
    if (g <= 0.0) return 0.0;
    double logdet = 0.0;
    for (int i = 0; i < nc; ++i) {
      const Eigen::MatrixXd s = build_s(th, t, i);
      Eigen::LLT<Eigen::MatrixXd> llt(s);
      if (llt.info() != Eigen::Success) return 0.0;
      logdet += 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    }
    ok = true;
    return -t - mu * logdet - mu * std::log(g);
  };

  Eigen::VectorXd th = Eigen::VectorXd::Zero(np);
  double t = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nc; ++i) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cons[i].f0, Eigen::EigenvaluesOnly);
    t = std::min(t, es.eigenvalues().minCoeff());
  }
  t -= 1.0;

  int iters = 0;
  bool exhausted = false;
  double mu = 1.0;
  const double mu_final = 1e-12;

  while (true) {
    for (int inner = 0; inner < 100; ++inner) {
      if (iters >= opts.max_newton_iters) {
        exhausted = true;
        break;
      }
      ++iters;

      Eigen::VectorXd grad = Eigen::VectorXd::Zero(np + 1);
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(np + 1, np + 1);
      grad(np) = -1.0;
      for (int i = 0; i < nc; ++i) {
        const int m = cons[i].size;
        const Eigen::MatrixXd s = build_s(th, t, i);
        Eigen::LLT<Eigen::MatrixXd> llt(s);
        const Eigen::MatrixXd w = llt.solve(Eigen::MatrixXd::Identity(m, m));
        grad(np) += mu * w.trace();
        hess(np, np) += mu * w.squaredNorm();
        const auto& act = cons[i].active;
        std::vector<Eigen::MatrixXd> z(act.size());
        for (size_t a = 0; a < act.size(); ++a) {
          const int k = act[a];
          Eigen::MatrixXd y = Eigen::MatrixXd::Zero(m, m);
          double tr_wf = 0.0;
          for (const auto& e : cons[i].coeffs[k]) {
            y.col(e.c) += e.v * w.col(e.r);
            tr_wf += e.v * w(e.c, e.r);
          }
          z[a] = y * w;
          grad(k) -= mu * tr_wf;
          hess(k, np) -= mu * z[a].trace();
        }
        for (size_t a = 0; a < act.size(); ++a) {
          for (size_t b = a; b < act.size(); ++b) {
            double hv = 0.0;
            for (const auto& e : cons[i].coeffs[act[b]]) hv += e.v * z[a](e.r, e.c);
            hess(act[a], act[b]) += mu * hv;
          }
        }
      }
      const double g = rho2 - th.squaredNorm();
      grad.head(np) += (2.0 * mu / g) * th;
      hess.topLeftCorner(np, np) +=
          (2.0 * mu / g) * Eigen::MatrixXd::Identity(np, np);
      hess.topLeftCorner(np, np) += (4.0 * mu / (g * g)) * th * th.transpose();
      const Eigen::MatrixXd hs = hess.selfadjointView<Eigen::Upper>();

      const double ridge = 1e-12 * (1.0 + hs.diagonal().cwiseAbs().maxCoeff());
      Eigen::LDLT<Eigen::MatrixXd> ldlt(
          hs + ridge * Eigen::MatrixXd::Identity(np + 1, np + 1));
      const Eigen::VectorXd d = -ldlt.solve(grad);
      if (!d.allFinite()) break;
      const double decrement = -grad.dot(d);
      if (!(decrement > 0.0) || 0.5 * decrement < 1e-11 * (1.0 + std::abs(t))) break;

      bool ok = false;
      const double f0 = barrier_value(th, t, mu, ok);
      const double slope = grad.dot(d);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const Eigen::VectorXd thn = th + alpha * d.head(np);
        const double tn = t + alpha * d(np);
        bool okn = false;
        const double fn = barrier_value(thn, tn, mu, okn);
        if (okn && fn <= f0 + 0.25 * alpha * slope) {
          th = thn;
          t = tn;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    if (exhausted || mu <= mu_final) break;
    mu = std::max(mu * 0.1, mu_final);
  }

  res.newton_iterations = iters;
  res.margins = margins_at(p, th);
  res.certificate = make_certificate(p, th, res.margins);
  if (res.margins.min_normalized >= opts.feasibility_tol) {
    res.status = SolveStatus::Feasible;
  } else {
    res.status = exhausted ? SolveStatus::Indeterminate : SolveStatus::Infeasible;
  }
  return res;
}

void dump(const LmiProblem& p, std::ostream& os) {
  os << "lmi problem: " << p.parameter_count() << " parameters, "
     << p.constraint_count() << " constraints\n";
  for (const auto& b : p.unknowns()) {
    os << "unknown " << b.name << ": " << b.rows << "x" << b.cols
       << (b.symmetric ? " symmetric" : "") << ", params " << b.params
       << " at offset " << b.offset << "\n";
  }
  const auto& cons = SolverAccess::constraints(p);
  for (const auto& c : cons) {
    os << "constraint " << c.name << ": "
       << (c.sense == ConstraintSense::PositiveDefinite ? "positive_definite"
                                                        : "negative_definite")
       << ", size " << c.size
       << " (stored in the positive-definite orientation)\n";
    os << "  constant part, row-major:\n";
    for (int r = 0; r < c.size; ++r) {
      os << "   ";
      for (int col = 0; col < c.size; ++col) os << " " << c.f0(r, col);
      os << "\n";
    }
    for (int k : c.active) {
      os << "  coeff " << p.parameter_label(k) << ":";
      for (const auto& e : c.coeffs[k]) {
        os << " (" << e.r << "," << e.c << ")=" << e.v;
      }
      os << "\n";
    }
  }
}

LmiProblem build_attitude_lmi(const StateSpace& k) {
  if (k.inputs() != 3 || k.outputs() != 3) {
    throw std::invalid_argument("build_attitude_lmi: compensator must map R^3 -> R^3");
  }
  LmiProblem prob;
  const int n = k.states();
  if (n == 0) {
    const Eigen::MatrixXd d = k.D;
    prob.add_constraint("lyapunov_decrease", ConstraintSense::NegativeDefinite,
                        [d](const std::vector<Eigen::MatrixXd>&) { return d; });
    return prob;
  }
  prob.add_unknown("P", n, n, true);
  prob.add_constraint("P_positive", ConstraintSense::PositiveDefinite,
                      [](const std::vector<Eigen::MatrixXd>& u) { return u[0]; });
  const Eigen::MatrixXd a = k.A, b = k.B, c = k.C, d = k.D;
  prob.add_constraint(
      "lyapunov_decrease", ConstraintSense::NegativeDefinite,
      [a, b, c, d, n](const std::vector<Eigen::MatrixXd>& u) {
        const Eigen::MatrixXd& pm = u[0];
        Eigen::MatrixXd q(3 + n, 3 + n);
        const Eigen::MatrixXd g = pm * b + 0.5 * c.transpose();
        q.topLeftCorner(3, 3) = d;
        q.block(0, 3, 3, n) = g.transpose();
        q.block(3, 0, n, 3) = g;
        q.block(3, 3, n, n) = a.transpose() * pm + pm * a;
        return q;
      });
  return prob;
}

CascadeMatrices build_cascade_matrices(const StateSpace& att,
                                       const PartitionedStateSpace& rate) {
  if (att.inputs() != 3 || att.outputs() != 3) {
    throw std::invalid_argument("build_cascade_matrices: attitude block must map R^3 -> R^3");
  }
  if (rate.D1.rows() != 3 || rate.D1.cols() != 3 || rate.D2.cols() != 3) {
    throw std::invalid_argument("build_cascade_matrices: rate law must map (R^3, R^3) -> R^3");
  }
  CascadeMatrices cm;
  cm.n_att = att.states();
  cm.n_rate = rate.states();
  const int na = cm.n_att, nw = cm.n_rate, nk = na + nw;
  cm.A21 = rate.D2 * att.D;
  cm.A22 = rate.D1;
  cm.A23 = Eigen::MatrixXd::Zero(3, nk);
  cm.A23.leftCols(na) = rate.D2 * att.C;
  cm.A23.rightCols(nw) = rate.C;
  cm.A31 = Eigen::MatrixXd::Zero(nk, 3);
  cm.A31.topRows(na) = att.B;
  cm.A31.bottomRows(nw) = rate.B2 * att.D;
  cm.A32 = Eigen::MatrixXd::Zero(nk, 3);
  cm.A32.bottomRows(nw) = rate.B1;
  cm.A33 = Eigen::MatrixXd::Zero(nk, nk);
  cm.A33.topLeftCorner(na, na) = att.A;
  cm.A33.bottomLeftCorner(nw, na) = rate.B2 * att.C;
  cm.A33.bottomRightCorner(nw, nw) = rate.A;
  return cm;
}

LmiProblem build_cascade_lmis(const CascadeMatrices& cm) {
  const int nk = cm.n_att + cm.n_rate;
  if (cm.A21.rows() != 3 || cm.A22.rows() != 3 || cm.A23.cols() != nk ||
      cm.A31.rows() != nk || cm.A32.rows() != nk || cm.A33.rows() != nk) {
    throw std::invalid_argument("build_cascade_lmis: inconsistent cascade matrices");
  }
  LmiProblem prob;
  prob.add_unknown("p11", 1, 1, true);
  prob.add_unknown("p12", 1, 1, true);
  prob.add_unknown("P22", 3, 3, true);
  prob.add_unknown("P23", 3, nk, false);
  prob.add_unknown("P33", nk, nk, true);

  const Eigen::Matrix3d id3 = Eigen::Matrix3d::Identity();
  prob.add_constraint(
      "P_positive", ConstraintSense::PositiveDefinite,
      [nk, id3](const std::vector<Eigen::MatrixXd>& u) {
        const double p11 = u[0](0, 0), p12 = u[1](0, 0);
        Eigen::MatrixXd pm = Eigen::MatrixXd::Zero(6 + nk, 6 + nk);
        pm.block(0, 0, 3, 3) = p11 * id3;
        pm.block(0, 3, 3, 3) = p12 * id3;
        pm.block(3, 0, 3, 3) = p12 * id3;
        pm.block(3, 3, 3, 3) = u[2];
        pm.block(3, 6, 3, nk) = u[3];
        pm.block(6, 3, nk, 3) = u[3].transpose();
        pm.block(6, 6, nk, nk) = u[4];
        return pm;
      });

  const Eigen::MatrixXd a21 = cm.A21, a22 = cm.A22, a23 = cm.A23;
  const Eigen::MatrixXd a31 = cm.A31, a32 = cm.A32, a33 = cm.A33;
  prob.add_constraint(
      "lyapunov_decrease", ConstraintSense::NegativeDefinite,
      [nk, id3, a21, a22, a23, a31, a32, a33](const std::vector<Eigen::MatrixXd>& u) {
        const double p11 = u[0](0, 0), p12 = u[1](0, 0);
        const Eigen::MatrixXd& p22 = u[2];
        const Eigen::MatrixXd& p23 = u[3];
        const Eigen::MatrixXd& p33 = u[4];
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6 + nk, 6 + nk);
        m.block(0, 0, 3, 3) = p12 * (a21 + a21.transpose());
        m.block(0, 3, 3, 3) = p11 * id3 + p12 * a22 + a21.transpose() * p22 +
                              a31.transpose() * p23.transpose();
        m.block(0, 6, 3, nk) =
            p12 * a23 + a21.transpose() * p23 + a31.transpose() * p33;
        m.block(3, 3, 3, 3) = 2.0 * p12 * id3 + p22 * a22 + a22.transpose() * p22 +
                              p23 * a32 + a32.transpose() * p23.transpose();
        m.block(3, 6, 3, nk) = p22 * a23 + a22.transpose() * p23 +
                               a32.transpose() * p33 + p23 * a33;
        m.block(6, 6, nk, nk) = p23.transpose() * a23 + a23.transpose() * p23 +
                                p33 * a33 + a33.transpose() * p33;
        m.block(3, 0, 3, 3) = m.block(0, 3, 3, 3).transpose();
        m.block(6, 0, nk, 3) = m.block(0, 6, 3, nk).transpose();
        m.block(6, 3, nk, 3) = m.block(3, 6, 3, nk).transpose();
        return m;
      });

  // The Lyapunov-derivative bound drops a term p12 * w^T (E + E^T - 2I) w
  // that is only guaranteed nonpositive for p12 >= 0; a negative p12
  // can satisfy the matrix pair while certifying nothing.
  prob.add_constraint("p12_nonnegative", ConstraintSense::PositiveDefinite,
                      [](const std::vector<Eigen::MatrixXd>& u) { return u[1]; });
  return prob;
}

}  // namespace gndi
