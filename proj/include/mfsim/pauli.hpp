// Copyright 2026 The mfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MFSIM_PAULI_HPP
#define MFSIM_PAULI_HPP

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mfsim {

enum class GateKind : uint8_t { H, S, X, Y, Z, CNOT, CZ, SWAP, CH };

inline bool gate_is_clifford(GateKind k) {
    return k != GateKind::CH;
}

inline int gate_arity(GateKind k) {
    switch (k) {
        case GateKind::H:
        case GateKind::S:
        case GateKind::X:
        case GateKind::Y:
        case GateKind::Z:
            return 1;
        default:
            return 2;
    }
}

inline const char *gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::S: return "S";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CZ: return "CZ";
        case GateKind::SWAP: return "SWAP";
        case GateKind::CH: return "CH";
    }
    return "?";
}

inline GateKind gate_from_name(std::string_view s) {
    if (s == "H") return GateKind::H;
    if (s == "S") return GateKind::S;
    if (s == "X") return GateKind::X;
    if (s == "Y") return GateKind::Y;
    if (s == "Z") return GateKind::Z;
    if (s == "CNOT") return GateKind::CNOT;
    if (s == "CZ") return GateKind::CZ;
    if (s == "SWAP") return GateKind::SWAP;
    if (s == "CH") return GateKind::CH;
    throw std::invalid_argument("unknown gate name: " + std::string(s));
}

/// A single- or two-site gate. q1 is ignored for single-site kinds.
/// For CNOT and CH, q0 is the control and q1 the target.
struct Gate {
    GateKind kind;
    uint32_t q0 = 0;
    uint32_t q1 = 0;

    bool two_site() const { return gate_arity(kind) == 2; }
};

/// Signed Pauli word on n qubits. Site j carries the letter encoded by
/// (x bit, z bit): (0,0)=I, (1,0)=X, (0,1)=Z, (1,1)=Y. Sign is +1 or -1;
/// the Y convention keeps conjugation by Clifford gates closed over +/-.
/// Products of two words can pick up factors of i, which mul_right reports
/// as an exponent so callers that need +/-1 results can assert evenness.
struct PauliString {
    size_t n = 0;
    std::vector<uint64_t> x, z;
    int8_t sign = +1;

    PauliString() = default;
    explicit PauliString(size_t n_qubits)
        : n(n_qubits), x((n_qubits + 63) / 64, 0), z((n_qubits + 63) / 64, 0) {}

    static PauliString identity(size_t n_qubits) { return PauliString(n_qubits); }

    static PauliString single(size_t n_qubits, uint32_t q, char letter, int8_t sgn = +1) {
        PauliString p(n_qubits);
        p.set_letter(q, letter);
        p.sign = sgn;
        return p;
    }

    static PauliString from_terms(size_t n_qubits,
                                  const std::vector<std::pair<uint32_t, char>> &terms,
                                  int8_t sgn = +1) {
        PauliString p(n_qubits);
        for (auto &[q, c] : terms) {
            p.set_letter(q, c);
        }
        p.sign = sgn;
        return p;
    }

    size_t num_words() const { return x.size(); }

    bool x_bit(uint32_t q) const { return (x[q >> 6] >> (q & 63)) & 1; }
    bool z_bit(uint32_t q) const { return (z[q >> 6] >> (q & 63)) & 1; }

    char letter_at(uint32_t q) const {
        bool xb = x_bit(q), zb = z_bit(q);
        if (xb && zb) return 'Y';
        if (xb) return 'X';
        if (zb) return 'Z';
        return 'I';
    }

    void set_letter(uint32_t q, char letter) {
        if (q >= n) {
            throw std::out_of_range("pauli site out of range");
        }
        uint64_t m = uint64_t{1} << (q & 63);
        x[q >> 6] &= ~m;
        z[q >> 6] &= ~m;
        switch (letter) {
            case 'I': break;
            case 'X': x[q >> 6] |= m; break;
            case 'Z': z[q >> 6] |= m; break;
            case 'Y': x[q >> 6] |= m; z[q >> 6] |= m; break;
            default: throw std::invalid_argument("bad pauli letter");
        }
    }

    bool is_identity() const {
        for (size_t w = 0; w < x.size(); w++) {
            if (x[w] | z[w]) return false;
        }
        return true;
    }

    size_t weight() const {
        size_t c = 0;
        for (size_t w = 0; w < x.size(); w++) {
            c += std::popcount(x[w] | z[w]);
        }
        return c;
    }

    std::vector<uint32_t> support() const {
        std::vector<uint32_t> out;
        for (size_t w = 0; w < x.size(); w++) {
            uint64_t bits = x[w] | z[w];
            while (bits) {
                out.push_back(uint32_t(w * 64 + std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
        return out;
    }

    bool same_support(const PauliString &o) const {
        if (n != o.n) return false;
        for (size_t w = 0; w < x.size(); w++) {
            if (x[w] != o.x[w] || z[w] != o.z[w]) return false;
        }
        return true;
    }

    bool operator==(const PauliString &o) const {
        return sign == o.sign && same_support(o);
    }

    bool commutes_with(const PauliString &o) const {
        if (n != o.n) {
            throw std::invalid_argument("pauli length mismatch");
        }
        return commutes_with_range(o, 0, x.size() - 1);
    }

    /// Symplectic test restricted to word range [wlo, whi]; exact whenever o
    /// has no support outside that range.
    bool commutes_with_range(const PauliString &o, size_t wlo, size_t whi) const {
        uint64_t acc = 0;
        for (size_t w = wlo; w <= whi; w++) {
            acc ^= (x[w] & o.z[w]) ^ (z[w] & o.x[w]);
        }
        return (std::popcount(acc) & 1) == 0;
    }

    /// In-place right multiplication (*this = *this * q). Returns the extra
    /// phase as an exponent k of i (mod 4), with signs already folded in:
    /// the true product is i^k times the returned word taken with sign +1
    /// times... rather, after the call the bit pattern is the product word
    /// and (sign of result) must be derived from k by the caller. sign is
    /// left untouched here; use multiply()/multiply_with_phase() wrappers.
    int mul_right_phase(const PauliString &q) {
        if (n != q.n) {
            throw std::invalid_argument("pauli length mismatch");
        }
        return mul_right_phase_range(q, 0, x.size() - 1);
    }

    /// As mul_right_phase, touching only words [wlo, whi]; exact whenever q
    /// has no support outside that range.
    int mul_right_phase_range(const PauliString &q, size_t wlo, size_t whi) {
        int64_t k = 0;
        for (size_t w = wlo; w <= whi; w++) {
            uint64_t a = x[w], b = z[w], c = q.x[w], d = q.z[w];
            // i^{+1} sites: XY, YZ, ZX. i^{-1} sites: XZ, YX, ZY.
            uint64_t plus = (a & ~b & c & d) | (a & b & ~c & d) | (~a & b & c & ~d);
            uint64_t minus = (a & ~b & ~c & d) | (a & b & c & ~d) | (~a & b & c & d);
            k += std::popcount(plus) - std::popcount(minus);
            x[w] = a ^ c;
            z[w] = b ^ d;
        }
        return int(((k % 4) + 4) % 4);
    }

    size_t lowest_word() const {
        for (size_t w = 0; w < x.size(); w++) {
            if (x[w] | z[w]) return w;
        }
        return 0;
    }

    size_t highest_word() const {
        for (size_t w = x.size(); w-- > 0;) {
            if (x[w] | z[w]) return w;
        }
        return 0;
    }

    /// g^dag * P * g for Clifford g (throws on CH). With dagger=true the
    /// conjugation runs the opposite direction (g * P * g^dag).
    void conjugate(const Gate &g, bool dagger = false) {
        if (!gate_is_clifford(g.kind)) {
            throw std::invalid_argument("cannot conjugate a Pauli through a non-Clifford gate");
        }
        uint32_t a = g.q0, b = g.q1;
        if (a >= n || (g.two_site() && b >= n)) {
            throw std::out_of_range("gate target out of range");
        }
        if (g.two_site() && a == b) {
            throw std::invalid_argument("two-site gate needs distinct targets");
        }
        uint64_t ma = uint64_t{1} << (a & 63);
        size_t wa = a >> 6;
        bool xa = (x[wa] & ma) != 0, za = (z[wa] & ma) != 0;
        switch (g.kind) {
            case GateKind::H: {
                if (xa && za) sign = -sign;
                if (xa != za) {
                    x[wa] ^= ma;
                    z[wa] ^= ma;
                }
                break;
            }
            case GateKind::S: {
                // g^dag P g: X -> -Y, Y -> X. Dagger direction: X -> Y, Y -> -X.
                if (xa) {
                    bool flip = dagger ? za : !za;
                    if (flip) sign = -sign;
                    z[wa] ^= ma;
                }
                break;
            }
            case GateKind::X: {
                if (za) sign = -sign;
                break;
            }
            case GateKind::Y: {
                if (xa != za) sign = -sign;
                break;
            }
            case GateKind::Z: {
                if (xa) sign = -sign;
                break;
            }
            case GateKind::CNOT: {
                uint64_t mb = uint64_t{1} << (b & 63);
                size_t wb = b >> 6;
                bool xb = (x[wb] & mb) != 0, zb = (z[wb] & mb) != 0;
                if (xa && zb && (xb == za)) sign = -sign;
                if (xa) x[wb] ^= mb;
                if (zb) z[wa] ^= ma;
                break;
            }
            case GateKind::CZ: {
                uint64_t mb = uint64_t{1} << (b & 63);
                size_t wb = b >> 6;
                bool xb = (x[wb] & mb) != 0, zb = (z[wb] & mb) != 0;
                if (xa && xb && (za != zb)) sign = -sign;
                if (xb) z[wa] ^= ma;
                if (xa) z[wb] ^= mb;
                break;
            }
            case GateKind::SWAP: {
                uint64_t mb = uint64_t{1} << (b & 63);
                size_t wb = b >> 6;
                bool xb = (x[wb] & mb) != 0, zb = (z[wb] & mb) != 0;
                if (xa != xb) { x[wa] ^= ma; x[wb] ^= mb; }
                if (za != zb) { z[wa] ^= ma; z[wb] ^= mb; }
                break;
            }
            case GateKind::CH:
                break;  // unreachable
        }
    }

    /// Text form like "+X1*Z4*Z5" with 1-based site indices; "+I" if empty.
    std::string str() const {
        std::string out;
        out += (sign > 0) ? '+' : '-';
        bool any = false;
        for (uint32_t q = 0; q < n; q++) {
            char c = letter_at(q);
            if (c == 'I') continue;
            if (any) out += '*';
            out += c;
            out += std::to_string(q + 1);
            any = true;
        }
        if (!any) out += 'I';
        return out;
    }

    static PauliString parse(std::string_view s, size_t n_qubits) {
        PauliString p(n_qubits);
        size_t i = 0;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            p.sign = (s[i] == '+') ? +1 : -1;
            i++;
        }
        while (i < s.size()) {
            char c = s[i];
            if (c == '*') {
                i++;
                continue;
            }
            if (c == 'I') {
                i++;
                continue;
            }
            if (c != 'X' && c != 'Y' && c != 'Z') {
                throw std::invalid_argument("bad pauli text: " + std::string(s));
            }
            i++;
            size_t start = i;
            while (i < s.size() && s[i] >= '0' && s[i] <= '9') i++;
            if (start == i) {
                throw std::invalid_argument("pauli letter without index: " + std::string(s));
            }
            unsigned long site = std::stoul(std::string(s.substr(start, i - start)));
            if (site == 0 || site > n_qubits) {
                throw std::out_of_range("pauli site out of range: " + std::string(s));
            }
            p.set_letter(uint32_t(site - 1), c);
        }
        return p;
    }
};

inline bool commutes(const PauliString &p, const PauliString &q) {
    return p.commutes_with(q);
}

/// Full product with the i-exponent reported: p*q = i^k * result where the
/// result's sign field already includes the +/- of both inputs.
inline std::pair<PauliString, int> multiply_with_phase(const PauliString &p, const PauliString &q) {
    PauliString r = p;
    int k = r.mul_right_phase(q);
    r.sign = int8_t(p.sign * q.sign);
    return {r, k};
}

/// Product with the phase folded to a sign: exponents {0,1} map to +, {2,3}
/// to -. Products of commuting words are exact; anticommuting products keep
/// only the +/- part of the i^k factor.
inline PauliString multiply(const PauliString &p, const PauliString &q) {
    auto [r, k] = multiply_with_phase(p, q);
    if (k >= 2) r.sign = -r.sign;
    return r;
}

inline PauliString conjugate_by_clifford(const PauliString &p, const Gate &g, bool dagger = false) {
    PauliString r = p;
    r.conjugate(g, dagger);
    return r;
}

}  // namespace mfsim

#endif
