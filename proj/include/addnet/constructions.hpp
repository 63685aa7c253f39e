#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "addnet/exact_real.hpp"
#include "addnet/network.hpp"

// Executable universal-approximation machinery: the explicit additive network
// computing sign(y^T x + b), the identity-to-ReLU width-doubling conversion,
// and the superposition builder G(x) = sum_i alpha_i * sign(y_i^T x + theta_i),
// each verifiable against a direct oracle.

namespace addnet::constructions {

struct SignNetSpec {
    Vec y;
    double bias = 0.0;
};

struct SuperpositionTerm {
    double alpha = 0.0;
    Vec y;
    double theta = 0.0;
};

struct SuperpositionSpec {
    std::vector<SuperpositionTerm> terms;
};

// Four identity-activation additive layers computing sign(y^T x + bias) in
// real arithmetic, with output 0 on the boundary.  Per input coordinate i,
// layer 1 has three neurons with weights (1, 1, 2) on that coordinate and
// scaling y_i; layer 2 sums the blocks with weights (1, 1, -2) and adds the
// bias; layers 3 and 4 (weights [2, 1] and [1, -1]) collapse the result to
// its sign.  Plain double evaluation preserves the sign but can be one ulp
// off +-1; exact_forward realizes the telescoping identity exactly.
Network build_sign_network(const SignNetSpec& spec);

// Output negation: a' = a, W' = -W, b' = -b computes -g(x).
AdditiveDense negate_layer(const AdditiveDense& layer);

// Input negation: a'' = a, W'' = -W, b'' = b computes g at -x.
AdditiveDense input_negation_layer(const AdditiveDense& layer);

// ReLU-split residual: max_j |(a o (ReLU(x) <> W) + a o (ReLU(-x) <> -W) + b)_j
// - (a o (x <> W) + b)_j| for an identity-activation layer.
double relu_split_residual(const AdditiveDense& layer, const Vec& x);

// Width-doubles every layer to carry (g, -g) with ReLU activations (the
// negation and ReLU-split identities above), then appends a classic +-1
// recombination layer so
// the converted network reproduces the original outputs (negative values
// cannot survive a final ReLU).  Requires all layers additive with identity
// activation.
Network convert_to_relu_network(const Network& net);

// Pair-form layers without the recombination tail; after layer k the vector
// is [ReLU(g_k), ReLU(-g_k)].
std::vector<AdditiveDense> pair_form_layers(const Network& net);

// N sign subnetworks in parallel (optionally ReLU-converted), then a classic
// linear output layer holding the alpha_i — the only general multiplications
// in the network.
Network build_superposition(const SuperpositionSpec& spec, bool relu);

// Exact evaluation of a network built from additive (identity or ReLU) and
// classic dense layers: every layer is computed in error-free expansion
// arithmetic, so the result is the network's real-arithmetic output.
std::vector<exact::Value> exact_forward(const Network& net, const Vec& x);

// ---------------------------------------------------------------------------
// Randomized verification suites (shared by the verify CLI command and the
// acceptance tests).

struct VerifyReport {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::size_t boundary_cases = 0;    // sign-network suite: pinned sign(0)=0 checks
    std::size_t boundary_failures = 0;
    bool passed() const { return failures == 0 && boundary_failures == 0; }
};

// For each d: random (y, bias, x) with |y.x + bias| > 1e-9, assert the
// network's exact forward equals the sign oracle exactly (and that plain
// double forward agrees in sign); boundary inputs must return exactly 0.
VerifyReport verify_sign_network_exactness(const std::vector<std::size_t>& dims,
                                           std::size_t cases_per_dim, std::uint64_t seed);

// Random identity-activation nets: converted ReLU twins match within 1e-9;
// the negation, input-negation and ReLU-split identities hold within 1e-12.
VerifyReport verify_relu_conversion(std::size_t num_nets, std::size_t inputs_per_net,
                                    std::uint64_t seed);

// Random superposition specs (N <= max_terms): network output equals the
// direct G(x) evaluation exactly (both sides in exact arithmetic),
// off-boundary.
VerifyReport verify_superposition(std::size_t max_terms, std::size_t num_inputs,
                                  std::uint64_t seed, bool relu = false);

}  // namespace addnet::constructions
