#include "gibbsprep/pauli.hpp"

#include <sstream>
#include <stdexcept>

namespace gibbsprep {

char axis_char(Axis a) {
    switch (a) {
        case Axis::I: return 'I';
        case Axis::X: return 'X';
        case Axis::Y: return 'Y';
        case Axis::Z: return 'Z';
    }
    return '?';
}

PauliString::PauliString(int n, Bits x, Bits z, int phase_exp)
    : n_(n), x_(std::move(x)), z_(std::move(z)), phase_(((phase_exp % 4) + 4) % 4) {
    if (x_.size() != n_ || z_.size() != n_)
        throw std::invalid_argument("PauliString: bit-vector width does not match site count");
}

PauliString PauliString::from_axes(int n, const std::vector<std::pair<int, Axis>>& axes) {
    Bits x(n), z(n);
    int y = 0;
    for (auto [site, a] : axes) {
        if (site < 0 || site >= n)
            throw std::invalid_argument("PauliString: site index out of range");
        if (x.test(site) || z.test(site))
            throw std::invalid_argument("PauliString: duplicate site in axis list");
        switch (a) {
            case Axis::I: break;
            case Axis::X: x.set(site); break;
            case Axis::Y: x.set(site); z.set(site); ++y; break;
            case Axis::Z: z.set(site); break;
        }
    }
    return PauliString(n, std::move(x), std::move(z), y % 4);
}

PauliString PauliString::single(int n, int site, Axis a) {
    return from_axes(n, {{site, a}});
}

Axis PauliString::axis_at(int site) const {
    bool x = x_.test(site), z = z_.test(site);
    if (x && z) return Axis::Y;
    if (x) return Axis::X;
    if (z) return Axis::Z;
    return Axis::I;
}

int PauliString::sign() const {
    int s = sign_exp();
    if (s % 2 != 0)
        throw std::logic_error("PauliString::sign: string is not Hermitian");
    return s == 0 ? 1 : -1;
}

PauliString PauliString::bare() const {
    return PauliString(n_, x_, z_, y_count());
}

PauliString PauliString::adjoint() const {
    // (i^p X^x Z^z)^dagger = i^{-p} (-1)^{x.z} X^x Z^z
    return PauliString(n_, x_, z_, -phase_ + 2 * x_.and_count(z_));
}

PauliString PauliString::with_phase_added(int k) const {
    return PauliString(n_, x_, z_, phase_ + k);
}

std::complex<double> PauliString::normalized_trace() const {
    if (!is_identity_body()) return {0.0, 0.0};
    static const std::complex<double> powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return powers[phase_];
}

PauliString pauli_mul(const PauliString& p, const PauliString& q) {
    if (p.sites() != q.sites())
        throw std::invalid_argument("pauli_mul: site counts differ");
    // Z^{z1} X^{x2} = (-1)^{z1.x2} X^{x2} Z^{z1}
    int phase = p.phase_exp() + q.phase_exp() + 2 * p.z_bits().and_count(q.x_bits());
    return PauliString(p.sites(), p.x_bits() ^ q.x_bits(), p.z_bits() ^ q.z_bits(), phase);
}

std::optional<ScaledPauli> hermitian_part(double alpha, const PauliString& p) {
    int s = p.sign_exp();
    if (s % 2 != 0 || alpha == 0.0) return std::nullopt;
    double r = (s == 0 ? alpha : -alpha);
    return ScaledPauli{r, p.bare()};
}

std::string PauliString::to_string() const {
    std::ostringstream out;
    int s = sign_exp();
    out << (s >= 2 ? '-' : '+');
    if (s % 2 != 0) out << 'i';
    if (is_identity_body()) {
        out << 'I';
        return out.str();
    }
    bool first = true;
    support().for_each_set([&](int site) {
        if (!first) out << ' ';
        first = false;
        out << axis_char(axis_at(site)) << site;
    });
    return out.str();
}

PauliString PauliString::parse(int n, const std::string& text) {
    size_t pos = 0;
    auto fail = [&](const char* why) {
        throw std::invalid_argument(std::string("PauliString::parse: ") + why + " in '" + text + "'");
    };
    if (pos >= text.size()) fail("empty string");
    int sign_exp = 0;
    if (text[pos] == '+') { ++pos; }
    else if (text[pos] == '-') { sign_exp = 2; ++pos; }
    if (pos < text.size() && text[pos] == 'i') { sign_exp += 1; ++pos; }

    std::vector<std::pair<int, Axis>> axes;
    std::istringstream tokens(text.substr(pos));
    std::string tok;
    bool identity = false;
    while (tokens >> tok) {
        if (tok == "I") { identity = true; continue; }
        Axis a;
        switch (tok[0]) {
            case 'X': a = Axis::X; break;
            case 'Y': a = Axis::Y; break;
            case 'Z': a = Axis::Z; break;
            default: fail("unknown axis"); return PauliString();
        }
        size_t used = 0;
        int site = std::stoi(tok.substr(1), &used);
        if (used + 1 != tok.size()) fail("bad site index");
        axes.push_back({site, a});
    }
    if (axes.empty() && !identity) fail("no axis tokens");
    return from_axes(n, axes).with_phase_added(sign_exp);
}

SignedPauli::SignedPauli(PauliString s) : str_(std::move(s)) {
    if (!str_.is_hermitian())
        throw std::invalid_argument("SignedPauli: string is not Hermitian");
}

} // namespace gibbsprep
