#include "gibbsprep/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gibbsprep {

Hamiltonian::Hamiltonian(int n, int locality, std::vector<Term> terms)
    : n_(n), locality_(locality), terms_(std::move(terms)) {
    if (n_ <= 0) throw std::invalid_argument("Hamiltonian: need at least one site");
    if (locality_ < 1) throw std::invalid_argument("Hamiltonian: locality must be >= 1");

    supports_.reserve(terms_.size());
    site_index_.assign(n_, {});
    for (size_t a = 0; a < terms_.size(); ++a) {
        const Term& t = terms_[a];
        if (!(std::abs(t.coeff) <= 1.0))
            throw std::invalid_argument("Hamiltonian: coefficient outside [-1, 1]");
        if (t.pauli.sites() != n_)
            throw std::invalid_argument("Hamiltonian: term site count mismatch");
        if (t.pauli.sign() != 1)
            throw std::invalid_argument("Hamiltonian: term Pauli must be positively signed");
        Bits supp = t.pauli.support();
        int sz = supp.count();
        if (sz == 0)
            throw std::invalid_argument("Hamiltonian: identity term (empty support) not allowed");
        if (sz > locality_)
            throw std::invalid_argument("Hamiltonian: term support exceeds declared locality");
        supp.for_each_set([&](int site) { site_index_[site].push_back(static_cast<int>(a)); });
        supports_.push_back(std::move(supp));
    }

    adjacency_.assign(terms_.size(), {});
    std::vector<char> seen(terms_.size(), 0);
    for (size_t a = 0; a < terms_.size(); ++a) {
        std::vector<int>& adj = adjacency_[a];
        supports_[a].for_each_set([&](int site) {
            for (int b : site_index_[site]) {
                if (b != static_cast<int>(a) && !seen[b]) {
                    seen[b] = 1;
                    adj.push_back(b);
                }
            }
        });
        for (int b : adj) seen[b] = 0;
        std::sort(adj.begin(), adj.end());
        degree_ = std::max(degree_, static_cast<int>(adj.size()));
    }
}

TermSet Hamiltonian::restricted_terms(const Bits& s) const {
    TermSet out;
    for (int a = 0; a < term_count(); ++a)
        if (supports_[a].is_subset_of(s)) out.push_back(a);
    return out;
}

TermSet Hamiltonian::localized_terms(const Bits& s) const {
    TermSet out;
    for (int a = 0; a < term_count(); ++a)
        if (supports_[a].intersects(s)) out.push_back(a);
    return out;
}

double Hamiltonian::critical_beta(BetaMode mode) const {
    double d = std::max(degree_, 1);
    switch (mode) {
        case BetaMode::Separability: return 1.0 / (100.0 * d * locality_);
        case BetaMode::Sampling: return 1.0 / (200.0 * d * locality_);
        case BetaMode::Cluster: return 1.0 / (100.0 * d);
    }
    return 0.0;
}

namespace {

Axis axis_from_letter(const std::string& s) {
    if (s == "X") return Axis::X;
    if (s == "Y") return Axis::Y;
    if (s == "Z") return Axis::Z;
    throw std::invalid_argument("Hamiltonian file: axis must be X, Y, or Z");
}

} // namespace

std::string Hamiltonian::to_file_string() const {
    std::ostringstream out;
    nlohmann::json header;
    header["locality"] = locality_;
    header["n"] = n_;
    out << header.dump() << '\n';
    for (const Term& t : terms_) {
        nlohmann::json rec;
        rec["coeff"] = t.coeff;
        nlohmann::json paulis = nlohmann::json::array();
        t.pauli.support().for_each_set([&](int site) {
            nlohmann::json p;
            p["axis"] = std::string(1, axis_char(t.pauli.string().axis_at(site)));
            p["site"] = site;
            paulis.push_back(p);
        });
        rec["paulis"] = paulis;
        out << rec.dump() << '\n';
    }
    return out.str();
}

Hamiltonian Hamiltonian::from_file_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("Hamiltonian file: missing header line");
    nlohmann::json header = nlohmann::json::parse(line);
    int n = header.at("n").get<int>();
    int locality = header.at("locality").get<int>();

    std::vector<Term> terms;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line);
        std::vector<std::pair<int, Axis>> axes;
        int prev_site = -1;
        for (const auto& p : rec.at("paulis")) {
            int site = p.at("site").get<int>();
            if (site <= prev_site)
                throw std::invalid_argument(
                    "Hamiltonian file: axis list must be sorted by site with no duplicates");
            prev_site = site;
            axes.push_back({site, axis_from_letter(p.at("axis").get<std::string>())});
        }
        Term t;
        t.coeff = rec.at("coeff").get<double>();
        t.pauli = SignedPauli(PauliString::from_axes(n, axes));
        terms.push_back(std::move(t));
    }
    return Hamiltonian(n, locality, std::move(terms));
}

void Hamiltonian::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("Hamiltonian::save: cannot open " + path);
    out << to_file_string();
}

Hamiltonian Hamiltonian::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("Hamiltonian::load: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_file_string(buf.str());
}

} // namespace gibbsprep
