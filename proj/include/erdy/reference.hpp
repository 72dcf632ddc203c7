#ifndef ERDY_REFERENCE_HPP
#define ERDY_REFERENCE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "erdy/graph.hpp"
#include "erdy/model.hpp"

// Straightforward serial baselines. They share no code with the
// optimized kernels: tests compare the two routes, and the benchmark
// target measures the gap. Dense paths materialize the full adjacency
// matrix, so keep n small.
namespace erdy::reference {

/// Dense adjacency matrix (n x n, row-major).
std::vector<double> dense_adjacency(const weighted_graph& g);

/// d(i,j) by a direct sum over all vertices of the dense matrix.
double common_weight_dense(const weighted_graph& g, std::uint32_t i, std::uint32_t j);

/// Full |c| double sum, every pair visited with a two-pointer
/// intersection. Serial, quadratic in n.
double r2_pairwise(const weighted_graph& g);

/// Right-hand side of the intertwined dynamics through the dense
/// adjacency matrix: rho_i from a dense matrix-vector product, then the
/// per-vertex rate products.
std::vector<double> nimfa_rhs_dense(const weighted_graph& g, const rate_model& model,
                                    std::span<const double> z);

/// Serial sparse right-hand side (same algorithm as the parallel kernel,
/// plain loops, no OpenMP). Baseline for the benchmark.
std::vector<double> nimfa_rhs_serial(const weighted_graph& g, const rate_model& model,
                                     std::span<const double> z);

/// Serial pair-scan graph sampling, bit-identical to sample_graph.
weighted_graph sample_graph_serial(const graph_params& params);

} // namespace erdy::reference

#endif
