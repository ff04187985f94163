#pragma once

#include <gelnet/problem.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace gelnet {

enum class Solver { Gelnet, Dpgelnet, Rope };

std::string to_string(Solver s);
Solver parse_solver(const std::string& name);

/// Symmetric boolean adjacency with an empty diagonal.
class Adjacency {
 public:
  explicit Adjacency(Index p) : p_(p), bits_(static_cast<size_t>(p * p), 0) {}

  Index size() const { return p_; }
  bool operator()(Index i, Index j) const { return bits_[static_cast<size_t>(i * p_ + j)] != 0; }
  void connect(Index i, Index j);
  Index edge_count() const;

 private:
  Index p_;
  std::vector<std::uint8_t> bits_;
};

struct ComponentPartition {
  std::vector<Index> labels;
  Index count = 0;
  /// Sorted members of each component; component ids follow the smallest
  /// member index.
  std::vector<std::vector<Index>> members;

  Index max_size() const;
};

/// Edge (i, j) iff |S_ij| > lam_alpha, i != j.
Adjacency threshold_graph(const SymMatrix& s, double lam_alpha);

ComponentPartition connected_components(const Adjacency& adj);

/// Dispatches to gelnet_fit / gelnet_fit_target / dpgelnet_fit / rope_fit
/// on the whole problem. Throws InputError for incompatible combinations
/// (dpgelnet with a target, rope with alpha != 0 or zero constraints).
FitResult fit_direct(const ProblemSpec& spec, Solver solver,
                     const std::optional<WarmStart>& warm = std::nullopt,
                     const FitHooks& hooks = {});

struct BlockwiseOptions {
  /// Worker threads for independent components; 0 picks the hardware
  /// concurrency. The result does not depend on this value.
  unsigned threads = 1;
};

/// Splits the problem along the connected components of
/// threshold_graph(S, lambda alpha), solves each block on its own and
/// assembles block-diagonal Theta and W. Isolated nodes use the scalar
/// closed form. When lambda alpha == 0 the whole problem is solved in one
/// piece.
FitResult solve_blockwise(const ProblemSpec& spec, Solver solver,
                          const std::optional<WarmStart>& warm = std::nullopt,
                          BlockwiseOptions options = {});

void check_solver_compatible(const ProblemSpec& spec, Solver solver);

}  // namespace gelnet
