#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "gibbsprep/bits.hpp"

namespace gibbsprep {

enum class Axis : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char axis_char(Axis a);

// Phased Pauli string on n sites in symplectic form:
//
//   operator = i^{phase_exp} * prod_j X_j^{x_bits[j]} Z_j^{z_bits[j]}
//
// The Hermitian representative of the same string is i^{y_count} X^x Z^z
// (one factor of i per site carrying both bits, since Y = i X Z), so the
// phase relative to it, sign_exp = phase_exp - y_count (mod 4), decides
// hermiticity: even values are Hermitian (+1 / -1), odd values are
// anti-Hermitian (+i / -i).
class PauliString {
public:
    PauliString() = default;
    explicit PauliString(int n) : n_(n), x_(n), z_(n), phase_(0) {}
    PauliString(int n, Bits x, Bits z, int phase_exp);

    static PauliString identity(int n) { return PauliString(n); }
    // Positively-signed Hermitian string from per-site axes.
    static PauliString from_axes(int n, const std::vector<std::pair<int, Axis>>& axes);
    static PauliString single(int n, int site, Axis a);

    int sites() const { return n_; }
    const Bits& x_bits() const { return x_; }
    const Bits& z_bits() const { return z_; }
    int phase_exp() const { return phase_; }

    Axis axis_at(int site) const;
    Bits support() const { return x_ | z_; }
    bool is_identity_body() const { return x_.none() && z_.none(); }

    int y_count() const { return x_.and_count(z_); }
    // phase relative to the Hermitian representative, in {0,1,2,3}
    int sign_exp() const { return ((phase_ - y_count()) % 4 + 4) % 4; }
    bool is_hermitian() const { return sign_exp() % 2 == 0; }
    // +1 or -1; requires is_hermitian()
    int sign() const;

    // Same body with sign_exp forced to 0 (the bare Hermitian string).
    PauliString bare() const;
    PauliString adjoint() const;
    PauliString with_phase_added(int k) const;

    // tr(P) / 2^n: i^{phase_exp} when the body is identity, else 0.
    std::complex<double> normalized_trace() const;

    bool operator==(const PauliString& o) const {
        return n_ == o.n_ && phase_ == o.phase_ && x_ == o.x_ && z_ == o.z_;
    }
    bool operator!=(const PauliString& o) const { return !(*this == o); }

    // "+X0 Z3 Y4" rendering; identity body renders as "+I".
    // Anti-Hermitian phases render with an i marker ("+iX0") for debugging.
    std::string to_string() const;
    static PauliString parse(int n, const std::string& text);

private:
    int n_ = 0;
    Bits x_, z_;
    int phase_ = 0;
};

// Exact product; phases tracked as integers mod 4.
PauliString pauli_mul(const PauliString& p, const PauliString& q);

// A real multiple of a bare Hermitian Pauli string. `pauli` always has
// sign_exp == 0; the magnitude and sign live in `coeff`.
struct ScaledPauli {
    double coeff = 0.0;
    PauliString pauli;
};

// (alpha P + (alpha P)^dagger) / 2 for real alpha. Either zero (nullopt, when
// the relative phase of P is imaginary) or +-|alpha| times the bare string.
std::optional<ScaledPauli> hermitian_part(double alpha, const PauliString& p);

// Hermitian Pauli string with a real sign, norm exactly 1. Wraps the terms
// E_a of a Hamiltonian and the evaluated bodies of Hermitian monomials.
class SignedPauli {
public:
    SignedPauli() = default;
    explicit SignedPauli(PauliString s);

    const PauliString& string() const { return str_; }
    int sign() const { return str_.sign(); }
    PauliString bare() const { return str_.bare(); }
    int sites() const { return str_.sites(); }
    Bits support() const { return str_.support(); }

    bool operator==(const SignedPauli& o) const { return str_ == o.str_; }

private:
    PauliString str_;
};

} // namespace gibbsprep
