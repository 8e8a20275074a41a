#include "gibbsprep/stabilizer.hpp"

#include <cmath>
#include <stdexcept>

namespace gibbsprep {

namespace {

SiteState uniform_site(Rng& rng) {
    static const Axis axes[3] = {Axis::X, Axis::Y, Axis::Z};
    return SiteState{axes[rng.uniform_index(3)], rng.fair_coin() ? 1 : -1};
}

} // namespace

ProductState sample_state(const Configuration& config, int n, Rng& rng) {
    ProductState out;
    out.sites.assign(n, SiteState{});
    Bits assigned(n);

    for (const ConfigBlock& b : config.blocks) {
        double cr = b.x.is_zero() ? 0.0 : b.c * b.x.value->coeff;
        bool correlated = false;
        if (!b.x.is_zero() && !b.x.value->pauli.is_identity_body() && cr != 0.0) {
            if (std::abs(cr) > 1.0)
                throw std::logic_error("sample_state: |c r| > 1");
            correlated = rng.bernoulli(std::abs(cr));
        }
        if (correlated) {
            // Uniform signs conditioned on prod s_i = sign(c r): draw all but
            // the last support site freely, fix the last by parity.
            const PauliString& p = b.x.value->pauli;
            std::vector<int> supp = p.support().to_indices();
            int parity = cr > 0 ? 1 : -1;
            for (size_t i = 0; i + 1 < supp.size(); ++i) {
                int s = rng.fair_coin() ? 1 : -1;
                out.sites[supp[i]] = SiteState{p.axis_at(supp[i]), s};
                parity *= s;
            }
            out.sites[supp.back()] = SiteState{p.axis_at(supp.back()), parity};
            for (int site : supp) assigned.set(site);
        }
        b.x.formal_support.for_each_set([&](int site) {
            if (!assigned.test(site)) {
                out.sites[site] = uniform_site(rng);
                assigned.set(site);
            }
        });
    }
    for (int site = 0; site < n; ++site)
        if (!assigned.test(site)) out.sites[site] = uniform_site(rng);
    return out;
}

DenseOp product_state_density(const ProductState& st) {
    int n = st.size();
    require_dense_size(n, "product_state_density");
    DenseOp out = DenseOp::Identity(1, 1);
    for (int site = 0; site < n; ++site) {
        DenseOp m = 0.5 * (pauli_to_dense(PauliString::identity(1)) +
                           static_cast<double>(st.sites[site].sign) *
                               pauli_to_dense(PauliString::single(1, 0, st.sites[site].axis)));
        // site j occupies bit j of the index
        DenseOp next(m.rows() * out.rows(), m.cols() * out.cols());
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j)
                next.block(i * out.rows(), j * out.cols(), out.rows(), out.cols()) =
                    m(i, j) * out;
        out = std::move(next);
    }
    return out;
}

nlohmann::json product_state_to_json(const ProductState& st) {
    nlohmann::json sites = nlohmann::json::array();
    for (const SiteState& s : st.sites)
        sites.push_back({{"axis", std::string(1, axis_char(s.axis))}, {"sign", s.sign}});
    return {{"sites", sites}};
}

ProductState product_state_from_json(const nlohmann::json& j) {
    ProductState st;
    for (const auto& rec : j.at("sites")) {
        std::string a = rec.at("axis").get<std::string>();
        SiteState s;
        s.sign = rec.at("sign").get<int>();
        if (a == "X") s.axis = Axis::X;
        else if (a == "Y") s.axis = Axis::Y;
        else if (a == "Z") s.axis = Axis::Z;
        else throw std::invalid_argument("product state: bad axis " + a);
        if (s.sign != 1 && s.sign != -1)
            throw std::invalid_argument("product state: sign must be +-1");
        st.sites.push_back(s);
    }
    return st;
}

} // namespace gibbsprep
