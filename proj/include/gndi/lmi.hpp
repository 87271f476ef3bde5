#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gndi/lti.hpp"

namespace gndi {

enum class ConstraintSense { PositiveDefinite, NegativeDefinite };

enum class SolveStatus { Feasible, Infeasible, Indeterminate };

struct UnknownBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  bool symmetric = false;
  int offset = 0;  // first entry in the stacked parameter vector
  int params = 0;  // rows*cols, or rows*(rows+1)/2 when symmetric
};

/// Per-constraint eigenvalue margins of an instantiated problem. "raw"
/// is the smallest eigenvalue measured into the required cone (for a
/// negative-definite constraint, of the negated matrix), so satisfied
/// constraints have positive margins in both senses. "normalized"
/// divides by max(1, Frobenius norm) of the instantiated matrix.
struct ConstraintMargin {
  std::string name;
  double raw = 0.0;
  double normalized = 0.0;
};

struct MarginReport {
  std::vector<ConstraintMargin> constraints;
  double min_raw = 0.0;
  double min_normalized = 0.0;
};

/// A feasible-point witness: numeric values for every unknown block.
struct Certificate {
  std::map<std::string, Eigen::MatrixXd> blocks;
  /// min over constraints of the definite-direction eigenvalue gap,
  /// as measured when the certificate was produced.
  double margin = 0.0;
};

/// Definiteness constraints affine in a set of unknown matrix blocks.
///
/// Constraints are supplied as assembler callbacks that build the
/// constraint matrix from concrete block values; the affine structure
/// (constant part plus one coefficient matrix per scalar parameter) is
/// extracted numerically by probing the assembler at unit vectors.
/// Declare all unknowns before the first constraint.
class LmiProblem {
 public:
  using Assembler =
      std::function<Eigen::MatrixXd(const std::vector<Eigen::MatrixXd>&)>;

  /// Registers an unknown block and returns its index. Symmetric
  /// blocks must be square and are parametrized by the upper triangle.
  /// Zero-sized blocks are allowed and contribute no parameters.
  int add_unknown(const std::string& name, int rows, int cols, bool symmetric);

  /// Registers a definiteness constraint. The assembled matrix is
  /// symmetrized, sign-adjusted so every constraint reads "inside the
  /// positive-definite cone", and probed for its affine structure.
  /// Throws std::invalid_argument if the assembler is not affine in
  /// the unknowns or produces a non-square matrix.
  void add_constraint(const std::string& name, ConstraintSense sense,
                      const Assembler& assemble);

  int parameter_count() const { return total_params_; }
  int constraint_count() const { return static_cast<int>(constraints_.size()); }
  const std::vector<UnknownBlock>& unknowns() const { return blocks_; }
  const std::string& constraint_name(int i) const { return constraints_[i].name; }
  ConstraintSense constraint_sense(int i) const { return constraints_[i].sense; }
  int constraint_size(int i) const { return constraints_[i].size; }

  /// Block values corresponding to a stacked parameter vector.
  std::vector<Eigen::MatrixXd> blocks_from_theta(const Eigen::VectorXd& theta) const;

  /// Stacked parameter vector from named block values. Throws
  /// std::invalid_argument on missing names or dimension mismatches.
  Eigen::VectorXd theta_from_blocks(const std::map<std::string, Eigen::MatrixXd>& blocks) const;

  /// Sign-adjusted constraint matrix at a parameter vector: positive
  /// semidefiniteness of the result means the constraint holds weakly.
  Eigen::MatrixXd assemble_adjusted(int constraint, const Eigen::VectorXd& theta) const;

  /// Parameter label "block[i,j]" for dumps and diagnostics.
  std::string parameter_label(int k) const;

 private:
  friend struct SolverAccess;

  struct Coeff {
    int r, c;
    double v;
  };
  struct Constraint {
    std::string name;
    ConstraintSense sense;
    int size = 0;
    Eigen::MatrixXd f0;                      // sign-adjusted constant part
    std::vector<std::vector<Coeff>> coeffs;  // per parameter, sign-adjusted
    std::vector<int> active;                 // parameters with nonzero coeffs
  };

  std::vector<UnknownBlock> blocks_;
  std::vector<Constraint> constraints_;
  int total_params_ = 0;
};

struct SolverOptions {
  /// Feasibility threshold applied to normalized margins; the paper's
  /// strict inequalities are interpreted as "margin at least this".
  double feasibility_tol = 1e-7;
  /// Ball bound on the stacked parameter vector; makes the margin
  /// maximization well posed for homogeneous constraints.
  double radius = 1e4;
  /// Total Newton iteration budget across the barrier path. Exhausting
  /// it yields Indeterminate, which is not a proof of infeasibility.
  int max_newton_iters = 1200;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Indeterminate;
  /// Best iterate found; a valid witness only when status is Feasible.
  Certificate certificate;
  MarginReport margins;
  int newton_iterations = 0;
};

/// Margin-maximization feasibility solve by a log-det barrier Newton
/// method. Deterministic: identical problems produce identical results,
/// down to the bit pattern of the certificate.
SolveResult solve_feasibility(const LmiProblem& p, const SolverOptions& opts = {});

/// Instantiates every constraint at the certificate's block values and
/// measures eigenvalue margins with a dense symmetric eigensolver.
/// Independent of the solver internals.
MarginReport verify_certificate(const LmiProblem& p, const Certificate& c);

MarginReport margins_at(const LmiProblem& p, const Eigen::VectorXd& theta);

/// Plain-text dump of the problem structure (constant parts row-major,
/// per-parameter coefficient entries) for cross-checking externally.
void dump(const LmiProblem& p, std::ostream& os);

/// Attitude-loop stability problem for a compensator realization
/// (input e_R, output omega_cmd, both 3-vectors):
///   find P = P^T > 0 with
///   [ D      (P B + C^T/2)^T ]
///   [ P B + C^T/2   A^T P + P A ]  negative definite.
/// A zero-state compensator degenerates to "D negative definite" with
/// no unknowns.
LmiProblem build_attitude_lmi(const StateSpace& k);

/// Closed-loop interconnection matrices of the attitude/rate cascade
/// in error coordinates z = (e_R, omega_e, x):
///   d/dt omega_e = A21 e_R + A22 omega_e + A23 x
///   d/dt x       = A31 e_R + A32 omega_e + A33 x
/// with x stacking the attitude compensator states over the rate-path
/// states (any measurement filtering included in the rate law).
struct CascadeMatrices {
  Eigen::MatrixXd A21, A22, A23;
  Eigen::MatrixXd A31, A32, A33;
  int n_att = 0;   // attitude compensator states
  int n_rate = 0;  // rate-path states
};

/// Assembles the cascade matrices from an attitude compensator (e_R ->
/// omega_cmd) and a rate law with partitioned inputs (omega, omega_ref)
/// producing the desired-dynamics term.
CascadeMatrices build_cascade_matrices(const StateSpace& att,
                                       const PartitionedStateSpace& rate);

/// Cascade stability problem: unknowns p11, p12 (scalars), P22 (3x3
/// sym), P23 (3 x n_K), P33 (n_K x n_K sym), n_K = n_att + n_rate, with
///   [ p11 I  p12 I  0   ]
///   [  .     P22    P23 ]  positive definite,
///   [  .      .     P33 ]
/// the quadratic-form matrix M(p11, p12, P22, P23, P33) of the
/// Lyapunov derivative negative definite, and p12 >= 0. The last
/// constraint is not part of the matrix pair but is required for the
/// derivative bound that discards the indefinite curvature of the
/// attitude error map; without it a "certificate" proves nothing.
LmiProblem build_cascade_lmis(const CascadeMatrices& cm);

}  // namespace gndi
