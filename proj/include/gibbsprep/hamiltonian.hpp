#pragma once

#include <string>
#include <vector>

#include "gibbsprep/pauli.hpp"

namespace gibbsprep {

// lambda_a E_a with |lambda_a| <= 1 and E_a a positively-signed Hermitian
// Pauli string on at most K sites.
struct Term {
    double coeff = 0.0;
    SignedPauli pauli;
};

using TermSet = std::vector<int>; // sorted ascending, indices into terms()

enum class BetaMode { Separability, Sampling, Cluster };

// Pauli-term Hamiltonian with its dual interaction graph (vertices = terms,
// edges between terms with intersecting support) and a site -> terms index.
// Immutable after construction; safe to share across threads.
class Hamiltonian {
public:
    Hamiltonian(int n, int locality, std::vector<Term> terms);

    int sites() const { return n_; }
    int locality() const { return locality_; }
    int term_count() const { return static_cast<int>(terms_.size()); }
    const Term& term(int a) const { return terms_[a]; }
    const std::vector<Term>& terms() const { return terms_; }
    const Bits& term_support(int a) const { return supports_[a]; }

    // neighbors of a in the dual interaction graph, excluding a itself
    const std::vector<int>& neighbors(int a) const { return adjacency_[a]; }
    const std::vector<int>& terms_touching_site(int site) const { return site_index_[site]; }
    int degree() const { return degree_; }

    // E^(S): terms with support inside S
    TermSet restricted_terms(const Bits& s) const;
    // E_(S): terms whose support intersects S
    TermSet localized_terms(const Bits& s) const;

    // 1/(100 Delta K), 1/(200 Delta K), or 1/(100 Delta); Delta=0 counts as 1
    double critical_beta(BetaMode mode) const;

    std::string to_file_string() const;
    static Hamiltonian from_file_string(const std::string& text);
    void save(const std::string& path) const;
    static Hamiltonian load(const std::string& path);

private:
    int n_;
    int locality_;
    std::vector<Term> terms_;
    std::vector<Bits> supports_;
    std::vector<std::vector<int>> adjacency_;
    std::vector<std::vector<int>> site_index_;
    int degree_ = 0;
};

} // namespace gibbsprep
