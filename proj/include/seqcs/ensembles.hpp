#pragma once

#include <cstdint>

#include "seqcs/random.hpp"
#include "seqcs/types.hpp"

namespace seqcs {

enum class EnsembleKind {
  GaussianStdNormal,  // i.i.d. N(0, 1) entries
  BernoulliPM1,       // i.i.d. equiprobable +-1 entries
};

struct SignalSpec {
  enum class Kind { ExactSparse, PowerLaw };

  Kind kind = Kind::ExactSparse;
  int dim = 0;
  int sparsity = 0;       // ExactSparse only
  double exponent = 1.0;  // PowerLaw only: sorted magnitudes i^(-p)

  static SignalSpec exact_sparse(int n, int k);
  static SignalSpec power_law(int n, double p = 1.0);
};

/// One acquired measurement: the sensing row, the observed value, and the
/// noise level it was taken at (0 for noiseless).
struct MeasurementRecord {
  Vector row;
  double value = 0.0;
  double noise_sigma = 0.0;
};

/// Synthesizes a test signal. ExactSparse places standard-normal amplitudes on
/// a uniformly random support of size exactly K; PowerLaw assigns magnitudes
/// i^(-p) to a random permutation of indices with random signs.
Vector generate_signal(const SignalSpec& spec, std::uint64_t seed);

/// Draws one fresh measurement row, consuming stream state.
Vector draw_row(EnsembleKind kind, int n, RngStream& stream);

/// Applies a row to the signal; adds sigma_n * g noise with a fresh standard
/// normal g when sigma_n > 0.
MeasurementRecord measure(const Vector& signal, const Vector& row, double noise_sigma,
                          RngStream& stream);

}  // namespace seqcs
