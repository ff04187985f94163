#include <gelnet/dpgelnet.hpp>
#include <gelnet/error.hpp>
#include <gelnet/gelnet.hpp>
#include <gelnet/rope.hpp>
#include <gelnet/screening.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace gelnet {

std::string to_string(Solver s) {
  switch (s) {
    case Solver::Gelnet: return "gelnet";
    case Solver::Dpgelnet: return "dpgelnet";
    case Solver::Rope: return "rope";
  }
  return "?";
}

Solver parse_solver(const std::string& name) {
  if (name == "gelnet") return Solver::Gelnet;
  if (name == "dpgelnet") return Solver::Dpgelnet;
  if (name == "rope") return Solver::Rope;
  throw InputError("unknown solver '" + name + "'");
}

void Adjacency::connect(Index i, Index j) {
  if (i == j) return;
  bits_[static_cast<size_t>(i * p_ + j)] = 1;
  bits_[static_cast<size_t>(j * p_ + i)] = 1;
}

Index Adjacency::edge_count() const {
  Index n = 0;
  for (Index i = 0; i < p_; ++i)
    for (Index j = i + 1; j < p_; ++j) n += (*this)(i, j) ? 1 : 0;
  return n;
}

Index ComponentPartition::max_size() const {
  Index m = 0;
  for (const auto& c : members) m = std::max<Index>(m, static_cast<Index>(c.size()));
  return m;
}

Adjacency threshold_graph(const SymMatrix& s, double lam_alpha) {
  const Index p = s.size();
  Adjacency adj(p);
  for (Index j = 0; j < p; ++j)
    for (Index i = j + 1; i < p; ++i)
      if (std::abs(s(i, j)) > lam_alpha) adj.connect(i, j);
  return adj;
}

ComponentPartition connected_components(const Adjacency& adj) {
  const Index p = adj.size();
  ComponentPartition out;
  out.labels.assign(static_cast<size_t>(p), -1);
  std::vector<Index> queue;
  for (Index start = 0; start < p; ++start) {
    if (out.labels[static_cast<size_t>(start)] >= 0) continue;
    const Index id = out.count++;
    std::vector<Index> members;
    queue.assign(1, start);
    out.labels[static_cast<size_t>(start)] = id;
    while (!queue.empty()) {
      const Index u = queue.back();
      queue.pop_back();
      members.push_back(u);
      for (Index v = 0; v < p; ++v) {
        if (adj(u, v) && out.labels[static_cast<size_t>(v)] < 0) {
          out.labels[static_cast<size_t>(v)] = id;
          queue.push_back(v);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.members.push_back(std::move(members));
  }
  return out;
}

void check_solver_compatible(const ProblemSpec& spec, Solver solver) {
  if (solver == Solver::Dpgelnet && spec.has_target())
    throw InputError("dpgelnet does not support target matrices");
  if (solver == Solver::Rope) {
    if (spec.alpha != 0.0) throw InputError("rope requires alpha = 0");
    if (!spec.zero.empty()) throw InputError("rope does not support zero constraints");
    if (!spec.penalize_diagonal) throw InputError("rope requires a penalized diagonal");
  }
}

FitResult fit_direct(const ProblemSpec& spec, Solver solver, const std::optional<WarmStart>& warm,
                     const FitHooks& hooks) {
  check_solver_compatible(spec, solver);
  switch (solver) {
    case Solver::Gelnet: return gelnet_fit(spec, warm, hooks);
    case Solver::Dpgelnet: return dpgelnet_fit(spec, warm, hooks);
    case Solver::Rope: return rope_fit(spec);
  }
  throw InputError("unknown solver");
}

FitResult solve_blockwise(const ProblemSpec& spec, Solver solver,
                          const std::optional<WarmStart>& warm, BlockwiseOptions options) {
  check_solver_compatible(spec, solver);
  const Index p = spec.size();
  if (warm && (warm->theta.size() != p || warm->w.size() != p))
    throw InputError("warm start dimension mismatch");
  if (spec.lambda_alpha() == 0.0) return fit_direct(spec, solver, warm);

  const auto parts = connected_components(threshold_graph(spec.s, spec.lambda_alpha()));
  const size_t n = parts.members.size();

  // Largest blocks first so the pool does not finish on a big straggler.
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return parts.members[a].size() > parts.members[b].size();
  });

  std::vector<FitResult> fits(n);
  std::vector<std::exception_ptr> errors(n);
  auto solve_one = [&](size_t c) {
    try {
      const auto& idx = parts.members[c];
      const ProblemSpec sub = spec.restricted(idx);
      if (idx.size() == 1) {
        fits[c] = scalar_fit(sub);
        return;
      }
      std::optional<WarmStart> sub_warm;
      if (warm) sub_warm = WarmStart{warm->theta.principal(idx), warm->w.principal(idx)};
      fits[c] = fit_direct(sub, solver, sub_warm);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (size_t c : order) solve_one(c);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (size_t k = next++; k < n; k = next++) solve_one(order[k]);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Matrix theta = Matrix::Zero(p, p);
  Matrix w = Matrix::Zero(p, p);
  FitResult out;
  out.conv = true;
  out.del = 0.0;
  for (size_t c = 0; c < n; ++c) {
    const auto& idx = parts.members[c];
    const auto& f = fits[c];
    for (size_t a = 0; a < idx.size(); ++a) {
      for (size_t b = 0; b < idx.size(); ++b) {
        theta(idx[a], idx[b]) = f.theta(static_cast<Index>(a), static_cast<Index>(b));
        w(idx[a], idx[b]) = f.w(static_cast<Index>(a), static_cast<Index>(b));
      }
    }
    out.niter = std::max(out.niter, f.niter);
    out.del = std::max(out.del, f.del);
    out.conv = out.conv && f.conv;
    if (out.diagnostic.empty() && !f.diagnostic.empty()) out.diagnostic = f.diagnostic;
  }
  out.theta = SymMatrix::from_symmetric(std::move(theta));
  out.w = SymMatrix::from_symmetric(std::move(w));
  out.n_components = static_cast<Index>(n);
  out.max_block_size = parts.max_size();
  return out;
}

}  // namespace gelnet
