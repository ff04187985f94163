#pragma once

#include <gelnet/matrix.hpp>

#include <cstdint>
#include <random>

namespace gelnet {

/// Every random draw in the library comes from std::mt19937_64. Streams
/// are derived with derive_seed so replicates are independent of the
/// order in which they run.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer of seed + index; distinct indices give
/// decorrelated seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct ModelSpec {
  int model_id = 1;
  Index p = 10;
  std::uint64_t seed = 1;
};

struct GroundTruth {
  /// Correlation matrix.
  SymMatrix sigma;
  /// sigma^{-1}.
  SymMatrix theta;
};

/// Models 1-6: compound symmetry, scale-free, hub, block, band,
/// Erdos-Renyi. The covariance is rescaled to a correlation matrix.
GroundTruth gen_model(const ModelSpec& spec);

// Building blocks of the generators, exposed for testing.
Matrix compound_symmetry_covariance(Index p);
Matrix scale_free_adjacency(Index p, Rng& rng);
Matrix hub_adjacency(Index p, Rng& rng);
Matrix block_precision(Index p, Rng& rng);
Matrix band_precision(Index p);
Matrix erdos_renyi_precision(Index p, Rng& rng);
/// D (A + (|lambda_min(A)| + 0.2) I) D with D = 1 / 3 on the two halves.
Matrix tiger_precision(const Matrix& adjacency);

/// n x p matrix with i.i.d. rows drawn from N(0, sigma). Throws
/// InputError when sigma has no Cholesky factor.
Matrix sample_gaussian(const SymMatrix& sigma, Index n, std::uint64_t seed);

/// X^T X / n after centering the columns.
SymMatrix sample_covariance(const Matrix& data);
SymMatrix sample_correlation(const Matrix& data);

/// tr(Sigma Theta_hat) - log det(Sigma Theta_hat) - p.
double kl_loss(const SymMatrix& sigma, const SymMatrix& theta_hat);
/// Frobenius norm of the difference.
double l2_loss(const SymMatrix& theta, const SymMatrix& theta_hat);
/// Largest singular value of the difference.
double sp_loss(const SymMatrix& theta, const SymMatrix& theta_hat);

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Edge (i < j) present iff Theta_ij >= eps (signed, as defined for the
/// simulation study); `absolute` switches to |Theta_ij| >= eps.
ConfusionCounts graph_confusion(const SymMatrix& theta_hat, const SymMatrix& theta,
                                double eps = 1e-5, bool absolute = false);

/// Degenerate denominators give 1 when FP = FN = 0 and 0 otherwise.
double f1_score(const ConfusionCounts& c);
double mcc_score(const ConfusionCounts& c);

}  // namespace gelnet
