#include "seqcs/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "seqcs/errors.hpp"
#include "seqcs/linalg.hpp"

namespace seqcs {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Unbounded:
      return "unbounded";
    case SolveStatus::IterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

namespace detail {

namespace {

// Two-tier cost used for pricing. The high tier carries only the warm-start
// slack penalty, so any strictly positive high component outweighs every
// finite low-tier (unit-cost) combination.
struct LexCost {
  double hi = 0.0;
  double lo = 0.0;

  LexCost operator-(const LexCost& o) const { return {hi - o.hi, lo - o.lo}; }
  bool negative(double tol) const { return hi < -tol || (hi <= tol && lo < -tol); }
  bool lex_less(const LexCost& o) const {
    if (hi != o.hi) return hi < o.hi;
    return lo < o.lo;
  }
};

enum class ColKind : std::uint8_t {
  Regular,     // x+ / x- columns, eligible to enter
  Slack,       // active warm-start slack (starts basic, never re-enters)
  Artificial,  // phase-1 artificials (never re-enter)
  Retired,     // slack from an earlier step, permanently excluded
};

constexpr double kDegenerateTol = 1e-12;

}  // namespace

// Revised primal simplex over the standard-form program
//   min c'v  s.t.  G v = b, v >= 0
// with G = [A, -A | specials], an explicitly maintained basis inverse, and
// two-tier lexicographic pricing so the warm-start slack cost dominates.
class SimplexEngine {
 public:
  SimplexEngine(int signal_dim, SimplexOptions options, QPolicy q_policy)
      : n_(signal_dim), opts_(options), q_policy_(q_policy) {}

  SolveReport solve_cold(const Matrix& a, const Vector& y);
  SolveReport add_row(const Vector& row, double value);

  int rows() const { return m_; }
  int signal_dim() const { return n_; }
  bool has_state() const { return has_state_; }
  const Matrix& measurements() const { return a_; }
  const Vector& values() const { return y_; }
  const Vector& solution() const { return solution_; }

  SimplexState state() const {
    SimplexState st;
    st.basis = basis_;
    st.basic_values = xb_;
    st.iterations = iters_;
    st.status = status_;
    return st;
  }

 private:
  // --- problem data ---
  int n_ = 0;  // signal dimension N; regular columns are [0, 2N)
  int m_ = 0;  // current number of measurement rows
  SimplexOptions opts_;
  QPolicy q_policy_;
  Matrix a_;   // original measurement rows (unflipped), m_ x n_
  Vector y_;   // original right-hand side
  Matrix g_;   // standard-form columns with phase-1 row flips applied
  Vector b_;   // flipped right-hand side, b_ >= 0 after cold setup
  std::vector<ColKind> kind_;  // per column of g_
  std::vector<LexCost> cost_;  // per column of g_ (phase-2 costs)

  // --- basis state ---
  std::vector<int> basis_;      // m_ column indices
  std::vector<char> in_basis_;  // per column of g_
  std::vector<int> basis_row_;  // column -> row when basic, -1 otherwise
  Matrix binv_;                 // m_ x m_ inverse of the basic matrix
  Vector xb_;                   // basic values, kept >= 0
  Vector solution_;             // extracted x of length n_
  IterationCounts iters_;
  SolveStatus status_ = SolveStatus::Optimal;
  bool has_state_ = false;
  int active_slack_ = -1;  // column index of the current warm slack, -1 if none
  int pivots_since_refactor_ = 0;

  // --- core loop ---
  enum class Phase { One, Two };
  SolveStatus run_simplex(Phase phase);
  int price_dantzig(Phase phase, const Vector& y_hi, const Vector& y_lo) const;
  int price_bland(Phase phase, const Vector& y_hi, const Vector& y_lo) const;
  LexCost reduced_cost(Phase phase, int j, const Vector& y_hi, const Vector& y_lo) const;
  bool may_enter(Phase phase, int j) const;
  bool guard_active(Phase phase, int row) const;
  void pivot(int entering, int leaving_row, const Vector& direction, double theta);
  void refactor();
  void recompute_basic_values();
  void set_basic(int col, int row);
  void clear_basic(int col);
  void extract_solution();
  double regular_objective() const;
  void check_feasibility() const;
  void pivot_out_zero_specials();
  SolveReport finish(SolveStatus status);
};

bool SimplexEngine::may_enter(Phase phase, int j) const {
  if (in_basis_[j]) return false;
  // Specials are created basic and are never allowed back in. During phase 1
  // the regular columns are the only candidates as well, so the rule is
  // uniform across phases.
  (void)phase;
  return kind_[j] == ColKind::Regular;
}

// A basic special variable sitting at zero must not be driven positive by a
// phase-2 or warm pivot; its row blocks the ratio test at step length zero.
bool SimplexEngine::guard_active(Phase phase, int row) const {
  if (phase == Phase::One) return false;
  const int col = basis_[row];
  if (kind_[col] == ColKind::Regular) return false;
  return xb_[row] <= opts_.feas_tol;
}

LexCost SimplexEngine::reduced_cost(Phase phase, int j, const Vector& y_hi,
                                    const Vector& y_lo) const {
  const auto col = g_.col(j);
  if (phase == Phase::One) {
    // Phase-1 cost is 1 on artificials, 0 elsewhere; candidates are regular,
    // so their direct cost is zero.
    return {0.0, -y_lo.dot(col)};
  }
  LexCost rc;
  rc.lo = cost_[j].lo - y_lo.dot(col);
  rc.hi = (y_hi.size() > 0) ? cost_[j].hi - y_hi.dot(col) : cost_[j].hi;
  return rc;
}

int SimplexEngine::price_dantzig(Phase phase, const Vector& y_hi, const Vector& y_lo) const {
  int best = -1;
  LexCost best_rc{0.0, 0.0};
  const int n_regular = 2 * n_;
  for (int j = 0; j < n_regular; ++j) {
    if (!may_enter(phase, j)) continue;
    const LexCost rc = reduced_cost(phase, j, y_hi, y_lo);
    if (!rc.negative(opts_.pivot_tol)) continue;
    if (best < 0 || rc.lex_less(best_rc)) {
      best = j;
      best_rc = rc;
    }
  }
  return best;
}

int SimplexEngine::price_bland(Phase phase, const Vector& y_hi, const Vector& y_lo) const {
  const int n_regular = 2 * n_;
  for (int j = 0; j < n_regular; ++j) {
    if (!may_enter(phase, j)) continue;
    if (reduced_cost(phase, j, y_hi, y_lo).negative(opts_.pivot_tol)) return j;
  }
  return -1;
}

void SimplexEngine::set_basic(int col, int row) {
  in_basis_[col] = 1;
  basis_row_[col] = row;
  basis_[row] = col;
}

void SimplexEngine::clear_basic(int col) {
  in_basis_[col] = 0;
  basis_row_[col] = -1;
}

void SimplexEngine::pivot(int entering, int leaving_row, const Vector& direction, double theta) {
  const int leaving = basis_[leaving_row];

  // Update basic values along the edge, then install the entering value.
  if (theta != 0.0) {
    xb_ -= theta * direction;
  }
  xb_[leaving_row] = theta;
  for (int i = 0; i < m_; ++i) {
    if (xb_[i] < 0.0 && xb_[i] >= -opts_.feas_tol) xb_[i] = 0.0;
  }

  // Row operations keep binv_ equal to the inverse of the new basic matrix.
  const double piv = direction[leaving_row];
  binv_.row(leaving_row) /= piv;
  for (int i = 0; i < m_; ++i) {
    if (i == leaving_row) continue;
    const double d = direction[i];
    if (d != 0.0) binv_.row(i) -= d * binv_.row(leaving_row);
  }

  clear_basic(leaving);
  set_basic(entering, leaving_row);
  ++pivots_since_refactor_;
}

void SimplexEngine::refactor() {
  Matrix basis_matrix(m_, m_);
  for (int i = 0; i < m_; ++i) basis_matrix.col(i) = g_.col(basis_[i]);
  Eigen::ColPivHouseholderQR<Matrix> qr(basis_matrix);
  qr.setThreshold(1e-12);
  if (qr.rank() < m_) {
    throw RankDeficientError("simplex basis matrix is numerically singular");
  }
  binv_ = qr.inverse();
  pivots_since_refactor_ = 0;
}

void SimplexEngine::recompute_basic_values() {
  xb_ = binv_ * b_;
  for (int i = 0; i < m_; ++i) {
    if (xb_[i] < 0.0 && xb_[i] >= -opts_.feas_tol) xb_[i] = 0.0;
  }
}

SolveStatus SimplexEngine::run_simplex(Phase phase) {
  const int iter_cap = static_cast<int>(opts_.iteration_factor * (m_ + n_)) + 1;
  int iters = 0;
  int degenerate_streak = 0;
  bool bland = false;
  const bool track_hi =
      phase == Phase::Two && q_policy_ == QPolicy::Lexicographic && active_slack_ >= 0;

  Vector cb_lo(m_), cb_hi(m_);
  Vector y_lo, y_hi;

  while (iters < iter_cap) {
    // Simplex multipliers per tier: y' = c_B' B^{-1}.
    for (int i = 0; i < m_; ++i) {
      const int col = basis_[i];
      if (phase == Phase::One) {
        cb_lo[i] = (kind_[col] == ColKind::Artificial) ? 1.0 : 0.0;
      } else {
        cb_lo[i] = cost_[col].lo;
        if (track_hi) cb_hi[i] = cost_[col].hi;
      }
    }
    y_lo.noalias() = binv_.transpose() * cb_lo;
    if (track_hi) {
      y_hi.noalias() = binv_.transpose() * cb_hi;
    } else {
      y_hi.resize(0);
    }

    const int entering =
        bland ? price_bland(phase, y_hi, y_lo) : price_dantzig(phase, y_hi, y_lo);
    if (entering < 0) return SolveStatus::Optimal;

    const Vector direction = binv_ * g_.col(entering);

    // Ratio test: the leaving row minimizes the blocking step length. Basic
    // specials pinned at zero block immediately so they can never grow.
    int leaving_row = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_mag = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double d = direction[i];
      double ratio;
      if (guard_active(phase, i)) {
        if (std::abs(d) <= opts_.ratio_tol) continue;
        ratio = 0.0;
      } else if (d > opts_.ratio_tol) {
        ratio = std::max(xb_[i], 0.0) / d;
      } else {
        continue;
      }
      bool take;
      if (leaving_row < 0) {
        take = true;
      } else if (ratio < best_ratio - kDegenerateTol) {
        take = true;
      } else if (ratio <= best_ratio + kDegenerateTol) {
        take = bland ? basis_[i] < basis_[leaving_row] : std::abs(d) > best_mag;
      } else {
        take = false;
      }
      if (take) {
        leaving_row = i;
        best_ratio = ratio;
        best_mag = std::abs(d);
      }
    }
    if (leaving_row < 0) return SolveStatus::Unbounded;

    const double theta = best_ratio;
    pivot(entering, leaving_row, direction, theta);
    ++iters;
    if (phase == Phase::One) {
      ++iters_.phase1;
    } else {
      ++iters_.phase2;
    }

    if (theta <= kDegenerateTol) {
      if (++degenerate_streak >= opts_.stall_limit) bland = true;
    } else {
      degenerate_streak = 0;
      bland = false;
    }

    if (pivots_since_refactor_ >= opts_.refactor_interval) {
      refactor();
      recompute_basic_values();
    }
  }
  return SolveStatus::IterationLimit;
}

// Drive basic specials that sit at zero out of the basis where possible: a
// degenerate exchange against any regular column with a usable pivot element
// in that row. Rows with no such column stay pinned and are guarded instead.
void SimplexEngine::pivot_out_zero_specials() {
  const int n_regular = 2 * n_;
  for (int r = 0; r < m_; ++r) {
    const int col = basis_[r];
    if (kind_[col] == ColKind::Regular) continue;
    if (xb_[r] > opts_.feas_tol) continue;
    int best_j = -1;
    double best_mag = 1e-7;  // demand a comfortably nonsingular pivot
    const Vector row = (binv_.row(r) * g_.leftCols(n_regular)).transpose();
    for (int j = 0; j < n_regular; ++j) {
      if (in_basis_[j]) continue;
      const double mag = std::abs(row[j]);
      if (mag > best_mag) {
        best_mag = mag;
        best_j = j;
      }
    }
    if (best_j < 0) continue;
    const Vector direction = binv_ * g_.col(best_j);
    pivot(best_j, r, direction, 0.0);
  }
}

void SimplexEngine::extract_solution() {
  solution_ = Vector::Zero(n_);
  for (int i = 0; i < m_; ++i) {
    const int col = basis_[i];
    if (col < n_) {
      solution_[col] += xb_[i];
    } else if (col < 2 * n_) {
      solution_[col - n_] -= xb_[i];
    }
  }
}

double SimplexEngine::regular_objective() const {
  double obj = 0.0;
  for (int i = 0; i < m_; ++i) {
    if (kind_[basis_[i]] == ColKind::Regular) obj += xb_[i];
  }
  return obj;
}

void SimplexEngine::check_feasibility() const {
  const double resid = (a_ * solution_ - y_).lpNorm<Eigen::Infinity>();
  const double allowed = 1e-8 * (1.0 + y_.lpNorm<Eigen::Infinity>());
  if (!(resid <= allowed)) {
    throw Error("basis pursuit: optimal vertex violates the equality constraints (residual " +
                std::to_string(resid) + ")");
  }
}

SolveReport SimplexEngine::finish(SolveStatus status) {
  status_ = status;
  SolveReport report;
  report.iterations = iters_;
  report.status = status;
  if (status == SolveStatus::Optimal) {
    // Polish: a fresh factorization and re-solve of the basic system removes
    // drift accumulated by the rank-one updates before anything is read off.
    refactor();
    recompute_basic_values();
    extract_solution();
    check_feasibility();
    report.solution = solution_;
    report.objective = regular_objective();
    has_state_ = true;
  } else {
    has_state_ = false;
  }
  return report;
}

SolveReport SimplexEngine::solve_cold(const Matrix& a, const Vector& y) {
  if (a.cols() != n_) throw ConfigError("basis pursuit: matrix width does not match signal_dim");
  if (a.rows() != y.size()) throw ConfigError("basis pursuit: row/value count mismatch");
  if (a.rows() == 0) throw ConfigError("basis pursuit: empty measurement set");
  linalg::require_finite(a, "measurement matrix");
  linalg::require_finite(y, "measurement values");

  m_ = static_cast<int>(a.rows());
  a_ = a;
  y_ = y;
  iters_ = IterationCounts{};
  active_slack_ = -1;
  has_state_ = false;

  const int n_regular = 2 * n_;
  const int n_total = n_regular + m_;
  g_.resize(m_, n_total);
  g_.leftCols(n_) = a;
  g_.middleCols(n_, n_) = -a;
  g_.rightCols(m_).setIdentity();
  b_ = y;
  // Phase 1 needs b >= 0; flipping a row negates its stored columns too.
  for (int i = 0; i < m_; ++i) {
    if (b_[i] < 0.0) {
      b_[i] = -b_[i];
      g_.row(i) = -g_.row(i);
    }
  }

  kind_.assign(n_total, ColKind::Regular);
  cost_.assign(n_total, LexCost{0.0, 1.0});
  for (int j = n_regular; j < n_total; ++j) {
    kind_[j] = ColKind::Artificial;
    cost_[j] = LexCost{0.0, 0.0};
  }

  basis_.resize(m_);
  in_basis_.assign(n_total, 0);
  basis_row_.assign(n_total, -1);
  binv_ = Matrix::Identity(m_, m_);
  xb_ = b_;
  for (int i = 0; i < m_; ++i) set_basic(n_regular + i, i);
  pivots_since_refactor_ = 0;

  const SolveStatus s1 = run_simplex(Phase::One);
  if (s1 == SolveStatus::IterationLimit) return finish(s1);
  if (s1 == SolveStatus::Unbounded) {
    // Phase-1 objective is bounded below by zero; this signals a numerical
    // breakdown rather than a property of the data.
    throw Error("basis pursuit: phase 1 reported an unbounded direction");
  }
  double artificial_mass = 0.0;
  for (int i = 0; i < m_; ++i) {
    if (kind_[basis_[i]] == ColKind::Artificial) artificial_mass += xb_[i];
  }
  if (artificial_mass > 1e-8 * (1.0 + b_.lpNorm<1>())) {
    return finish(SolveStatus::Infeasible);
  }
  pivot_out_zero_specials();

  const SolveStatus s2 = run_simplex(Phase::Two);
  return finish(s2);
}

SolveReport SimplexEngine::add_row(const Vector& row, double value) {
  if (!has_state_) throw Error("add_row requires a prior optimal solve");
  if (row.size() != n_) throw ConfigError("add_row: row length does not match signal_dim");
  linalg::require_finite(row, "measurement row");
  if (!std::isfinite(value)) throw NonFiniteError("measurement value is not finite");

  // Retire the previous step's slack for good; it can never re-enter.
  if (active_slack_ >= 0) {
    cost_[active_slack_] = LexCost{0.0, 0.0};
    kind_[active_slack_] = ColKind::Retired;
    active_slack_ = -1;
  }
  iters_ = IterationCounts{};  // reports carry per-call pivot counts

  const int old_m = m_;
  const int n_total_old = static_cast<int>(g_.cols());
  const double violation = row.dot(solution_) - value;
  const double sign = (violation >= 0.0) ? 1.0 : -1.0;

  a_.conservativeResize(old_m + 1, Eigen::NoChange);
  a_.row(old_m) = row.transpose();
  y_.conservativeResize(old_m + 1);
  y_[old_m] = value;

  g_.conservativeResize(old_m + 1, n_total_old + 1);
  for (int j = 0; j < n_; ++j) {
    g_(old_m, j) = row[j];
    g_(old_m, n_ + j) = -row[j];
  }
  for (int j = 2 * n_; j < n_total_old; ++j) g_(old_m, j) = 0.0;
  // Slack column: a single entry -sign in the new row, so the slack value
  // equals |a'x - y| >= 0 at the warm-start point.
  g_.col(n_total_old).setZero();
  g_(old_m, n_total_old) = -sign;
  b_.conservativeResize(old_m + 1);
  b_[old_m] = value;

  kind_.push_back(ColKind::Slack);
  if (q_policy_ == QPolicy::Lexicographic) {
    cost_.push_back(LexCost{1.0, 0.0});
  } else {
    // A literal big-M penalty large enough to dominate any achievable l1 mass.
    cost_.push_back(LexCost{0.0, 1e8 * (1.0 + b_.lpNorm<1>())});
  }
  in_basis_.push_back(0);
  basis_row_.push_back(-1);
  active_slack_ = n_total_old;

  // Extend the basis inverse by the block formula for [[B, 0], [c', t]].
  const Vector c_b = [&] {
    Vector v(old_m);
    for (int i = 0; i < old_m; ++i) v[i] = g_(old_m, basis_[i]);
    return v;
  }();
  const double inv_t = -sign;  // t = -sign, and sign is +-1
  Matrix binv_new = Matrix::Zero(old_m + 1, old_m + 1);
  binv_new.topLeftCorner(old_m, old_m) = binv_;
  binv_new.row(old_m).head(old_m) = -inv_t * (c_b.transpose() * binv_);
  binv_new(old_m, old_m) = inv_t;

  m_ = old_m + 1;
  binv_ = std::move(binv_new);
  basis_.push_back(active_slack_);
  set_basic(active_slack_, old_m);
  xb_.conservativeResize(m_);
  xb_[old_m] = std::abs(violation);

  SolveStatus status;
  try {
    // The manually assembled basic values must agree with binv_ * b; a
    // mismatch means the block-extended inverse is too degraded to trust.
    const double resid = (binv_ * b_ - xb_).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(resid)) {
      throw RankDeficientError("augmented basis produced non-finite values");
    }
    if (resid > 1e-9 * (1.0 + b_.lpNorm<Eigen::Infinity>())) {
      refactor();
      recompute_basic_values();
    }
    status = run_simplex(Phase::Two);

    if (status == SolveStatus::Optimal && active_slack_ >= 0) {
      const int srow = basis_row_[active_slack_];
      if (srow >= 0) {
        const double sval = xb_[srow];
        if (sval > 1e-7 * (1.0 + std::abs(value))) {
          // The dominant penalty could not drive the slack to zero, which
          // means the augmented equality system admits no exact solution.
          throw SlackStuckError(
              "warm-start slack remained active (value " + std::to_string(sval) +
              "); the new measurement is inconsistent with an exact reconstruction");
        }
        pivot_out_zero_specials();
      }
      // Whether it left during the solve or just now, price it out for good.
      cost_[active_slack_] = LexCost{0.0, 0.0};
      kind_[active_slack_] = ColKind::Retired;
      active_slack_ = -1;
    }
    return finish(status);
  } catch (const RankDeficientError&) {
    // The augmented basis was numerically unusable; rebuild from scratch.
    const IterationCounts attempted = iters_;
    const Matrix a_copy = a_;
    const Vector y_copy = y_;
    SolveReport cold = solve_cold(a_copy, y_copy);
    cold.warm_fallback_to_cold = true;
    cold.iterations.phase1 += attempted.phase1;
    cold.iterations.phase2 += attempted.phase2;
    iters_ = cold.iterations;
    return cold;
  }
}

}  // namespace detail

SequentialBasisPursuit::SequentialBasisPursuit(int signal_dim, SimplexOptions options,
                                               QPolicy q_policy)
    : engine_(std::make_unique<detail::SimplexEngine>(signal_dim, options, q_policy)) {
  if (signal_dim <= 0) throw ConfigError("signal_dim must be positive");
}

SequentialBasisPursuit::~SequentialBasisPursuit() = default;
SequentialBasisPursuit::SequentialBasisPursuit(SequentialBasisPursuit&&) noexcept = default;
SequentialBasisPursuit& SequentialBasisPursuit::operator=(SequentialBasisPursuit&&) noexcept =
    default;

SolveReport SequentialBasisPursuit::solve(const Matrix& a, const Vector& y) {
  return engine_->solve_cold(a, y);
}

SolveReport SequentialBasisPursuit::add_row(const Vector& row, double value) {
  return engine_->add_row(row, value);
}

int SequentialBasisPursuit::rows() const { return engine_->rows(); }
int SequentialBasisPursuit::signal_dim() const { return engine_->signal_dim(); }
bool SequentialBasisPursuit::has_state() const { return engine_->has_state(); }
const Matrix& SequentialBasisPursuit::measurements() const { return engine_->measurements(); }
const Vector& SequentialBasisPursuit::values() const { return engine_->values(); }
const Vector& SequentialBasisPursuit::solution() const { return engine_->solution(); }
SimplexState SequentialBasisPursuit::state() const { return engine_->state(); }

SolveReport basis_pursuit(const Matrix& a, const Vector& y, const SimplexOptions& options) {
  SequentialBasisPursuit solver(static_cast<int>(a.cols()), options);
  return solver.solve(a, y);
}

}  // namespace seqcs
