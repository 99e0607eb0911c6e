#include "seqcs/ensembles.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "seqcs/errors.hpp"

namespace seqcs {

SignalSpec SignalSpec::exact_sparse(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw ConfigError("exact_sparse: need 0 <= K <= N");
  SignalSpec s;
  s.kind = Kind::ExactSparse;
  s.dim = n;
  s.sparsity = k;
  return s;
}

SignalSpec SignalSpec::power_law(int n, double p) {
  if (n < 0 || !(p > 0.0)) throw ConfigError("power_law: need N >= 0 and p > 0");
  SignalSpec s;
  s.kind = Kind::PowerLaw;
  s.dim = n;
  s.exponent = p;
  return s;
}

namespace {

// Partial Fisher-Yates: first k slots of a random permutation of 0..n-1.
std::vector<int> random_prefix(int n, int k, RngStream& stream) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(stream.uniform_below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

Vector generate_signal(const SignalSpec& spec, std::uint64_t seed) {
  RngStream stream(seed);
  Vector x = Vector::Zero(spec.dim);
  switch (spec.kind) {
    case SignalSpec::Kind::ExactSparse: {
      const auto support = random_prefix(spec.dim, spec.sparsity, stream);
      for (int i : support) {
        double amp = stream.normal();
        while (amp == 0.0) amp = stream.normal();
        x[i] = amp;
      }
      break;
    }
    case SignalSpec::Kind::PowerLaw: {
      const auto order = random_prefix(spec.dim, spec.dim, stream);
      for (int rank = 0; rank < spec.dim; ++rank)
        x[order[rank]] = stream.sign_pm1() * std::pow(static_cast<double>(rank + 1), -spec.exponent);
      break;
    }
  }
  return x;
}

Vector draw_row(EnsembleKind kind, int n, RngStream& stream) {
  Vector row(n);
  switch (kind) {
    case EnsembleKind::GaussianStdNormal:
      for (int i = 0; i < n; ++i) row[i] = stream.normal();
      break;
    case EnsembleKind::BernoulliPM1:
      for (int i = 0; i < n; ++i) row[i] = stream.sign_pm1();
      break;
  }
  return row;
}

MeasurementRecord measure(const Vector& signal, const Vector& row, double noise_sigma,
                          RngStream& stream) {
  if (signal.size() != row.size()) throw Error("measure: dimension mismatch");
  if (noise_sigma < 0.0) throw ConfigError("measure: negative noise sigma");
  MeasurementRecord rec;
  rec.row = row;
  rec.noise_sigma = noise_sigma;
  rec.value = row.dot(signal);
  if (noise_sigma > 0.0) rec.value += noise_sigma * stream.normal();
  return rec;
}

}  // namespace seqcs
