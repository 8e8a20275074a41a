#pragma once

#include <json.hpp>

#include "gibbsprep/pinning.hpp"

namespace gibbsprep {

// One single-qubit stabilizer state per site: the +-1 eigenstate of sigma_axis.
struct SiteState {
    Axis axis = Axis::Z; // X, Y, or Z
    int sign = 1;        // +1 or -1
};

struct ProductState {
    std::vector<SiteState> sites;
    int size() const { return static_cast<int>(sites.size()); }
};

// Random stabilizer product state with E[density] = sigma(config)/tr(sigma(config)).
// Per block (c, r, P): with probability |c r| the support of P gets an
// even-parity correlated assignment realizing I + sign(c r) P, otherwise the
// block is maximally mixed; every site outside the correlated supports draws
// a uniform single-qubit stabilizer state.
ProductState sample_state(const Configuration& config, int n, Rng& rng);

// (1/2^n) prod (I + s_i sigma_{axis_i}) as a dense matrix; n <= 12.
DenseOp product_state_density(const ProductState& st);

nlohmann::json product_state_to_json(const ProductState& st);
ProductState product_state_from_json(const nlohmann::json& j);

} // namespace gibbsprep
