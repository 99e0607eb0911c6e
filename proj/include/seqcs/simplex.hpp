#pragma once

#include <memory>
#include <vector>

#include "seqcs/types.hpp"

namespace seqcs {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(SolveStatus s);

struct IterationCounts {
  int phase1 = 0;
  int phase2 = 0;
  int total() const { return phase1 + phase2; }
};

struct SimplexOptions {
  double pivot_tol = 1e-9;      // reduced-cost threshold for entering candidates
  double feas_tol = 1e-9;       // absolute feasibility tolerance on basic values
  double ratio_tol = 1e-9;      // direction entries below this never block
  int stall_limit = 50;         // degenerate pivots before switching to Bland's rule
  double iteration_factor = 50.0;  // per-phase cap = factor * (M + N)
  int refactor_interval = 128;  // pivots between basis refactorizations
};

/// How the dominating cost on the warm-start slack is realized. Lexicographic
/// keeps the slack cost in a separate tier that outweighs any finite
/// combination of unit costs; Literal uses a plain numeric penalty.
enum class QPolicy { Lexicographic, Literal };

struct SolveReport {
  Vector solution;  // length N, x = x+ - x-
  double objective = 0.0;
  IterationCounts iterations;
  SolveStatus status = SolveStatus::Optimal;
  bool warm_fallback_to_cold = false;  // warm basis was unusable, re-solved cold
};

/// Snapshot of the simplex basis for inspection.
struct SimplexState {
  std::vector<int> basis;  // column indices: [0,N) x+, [N,2N) x-, >= 2N specials
  Vector basic_values;
  IterationCounts iterations;
  SolveStatus status = SolveStatus::Optimal;
};

namespace detail {
class SimplexEngine;
}

/// Sequential minimum-l1 equality solver. Owns the LP state across a growing
/// measurement set: solve() runs a cold two-phase simplex, add_row() appends
/// one constraint and re-optimizes from the previous optimal basis through an
/// augmented program with a dominantly-priced slack variable.
class SequentialBasisPursuit {
 public:
  explicit SequentialBasisPursuit(int signal_dim, SimplexOptions options = {},
                                  QPolicy q_policy = QPolicy::Lexicographic);
  ~SequentialBasisPursuit();
  SequentialBasisPursuit(SequentialBasisPursuit&&) noexcept;
  SequentialBasisPursuit& operator=(SequentialBasisPursuit&&) noexcept;

  /// Cold solve on the given rows; replaces any prior state.
  SolveReport solve(const Matrix& a, const Vector& y);

  /// Warm solve after appending one measurement row. Requires an Optimal
  /// prior state. Throws SlackStuckError if the slack cannot be driven out.
  SolveReport add_row(const Vector& row, double value);

  int rows() const;
  int signal_dim() const;
  bool has_state() const;
  const Matrix& measurements() const;
  const Vector& values() const;
  const Vector& solution() const;
  SimplexState state() const;

 private:
  std::unique_ptr<detail::SimplexEngine> engine_;
};

/// One-shot noiseless basis pursuit: min ||x||_1 subject to A x = y, as a
/// standard-form LP solved by a two-phase primal simplex.
SolveReport basis_pursuit(const Matrix& a, const Vector& y, const SimplexOptions& options = {});

}  // namespace seqcs
