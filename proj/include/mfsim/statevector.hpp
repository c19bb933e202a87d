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

#ifndef MFSIM_STATEVECTOR_HPP
#define MFSIM_STATEVECTOR_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mfsim/pauli.hpp"

namespace mfsim {

using cplx = std::complex<double>;

/// Dense amplitudes over 2^n basis states, qubit 0 in the least significant
/// bit. Physical qubits come first; explicit Stinespring registers, when
/// present, occupy the high indices.
class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(size_t n_qubits, size_t basis_index = 0) : n_(n_qubits) {
        if (n_ > 30) {
            throw std::invalid_argument("statevector too large");
        }
        amps_.assign(size_t{1} << n_, cplx(0, 0));
        amps_[basis_index] = 1;
    }

    size_t n_qubits() const { return n_; }
    size_t dim() const { return amps_.size(); }
    const std::vector<cplx> &amplitudes() const { return amps_; }
    std::vector<cplx> &amplitudes() { return amps_; }
    cplx amp(size_t i) const { return amps_[i]; }

    /// Adds fresh |0> qubits above the current ones.
    void extend(size_t extra) {
        if (extra == 0) return;
        if (n_ + extra > 30) {
            throw std::invalid_argument("statevector too large");
        }
        amps_.resize(size_t{1} << (n_ + extra), cplx(0, 0));
        n_ += extra;
    }

    double norm2() const {
        double s = 0;
        for (const auto &a : amps_) s += std::norm(a);
        return s;
    }

    void renormalize() {
        double n2 = norm2();
        if (n2 < 1e-24) {
            throw std::runtime_error("projection onto a zero-probability outcome");
        }
        double inv = 1.0 / std::sqrt(n2);
        for (auto &a : amps_) a *= inv;
    }

    cplx inner(const StateVector &other) const {
        if (other.n_ != n_) {
            throw std::invalid_argument("statevector dimension mismatch");
        }
        cplx s = 0;
        for (size_t i = 0; i < amps_.size(); i++) {
            s += std::conj(other.amps_[i]) * amps_[i];
        }
        return s;
    }

    void apply_gate(const Gate &g, bool dagger = false) {
        switch (g.kind) {
            case GateKind::H: {
                for_pairs(g.q0, [](cplx &a0, cplx &a1) {
                    const double r = 1.0 / std::sqrt(2.0);
                    cplx t0 = r * (a0 + a1), t1 = r * (a0 - a1);
                    a0 = t0;
                    a1 = t1;
                });
                break;
            }
            case GateKind::S: {
                cplx ph = dagger ? cplx(0, -1) : cplx(0, 1);
                size_t m = size_t{1} << g.q0;
                for (size_t i = 0; i < amps_.size(); i++) {
                    if (i & m) amps_[i] *= ph;
                }
                break;
            }
            case GateKind::X: {
                for_pairs(g.q0, [](cplx &a0, cplx &a1) { std::swap(a0, a1); });
                break;
            }
            case GateKind::Y: {
                for_pairs(g.q0, [](cplx &a0, cplx &a1) {
                    cplx t0 = cplx(0, -1) * a1, t1 = cplx(0, 1) * a0;
                    a0 = t0;
                    a1 = t1;
                });
                break;
            }
            case GateKind::Z: {
                size_t m = size_t{1} << g.q0;
                for (size_t i = 0; i < amps_.size(); i++) {
                    if (i & m) amps_[i] = -amps_[i];
                }
                break;
            }
            case GateKind::CNOT: {
                size_t mc = size_t{1} << g.q0, mt = size_t{1} << g.q1;
                for (size_t i = 0; i < amps_.size(); i++) {
                    if ((i & mc) && !(i & mt)) std::swap(amps_[i], amps_[i | mt]);
                }
                break;
            }
            case GateKind::CZ: {
                size_t mc = size_t{1} << g.q0, mt = size_t{1} << g.q1;
                for (size_t i = 0; i < amps_.size(); i++) {
                    if ((i & mc) && (i & mt)) amps_[i] = -amps_[i];
                }
                break;
            }
            case GateKind::SWAP: {
                size_t ma = size_t{1} << g.q0, mb = size_t{1} << g.q1;
                for (size_t i = 0; i < amps_.size(); i++) {
                    if ((i & ma) && !(i & mb)) std::swap(amps_[i], amps_[(i ^ ma) | mb]);
                }
                break;
            }
            case GateKind::CH: {
                size_t mc = size_t{1} << g.q0, mt = size_t{1} << g.q1;
                const double r = 1.0 / std::sqrt(2.0);
                for (size_t i = 0; i < amps_.size(); i++) {
                    if ((i & mc) && !(i & mt)) {
                        cplx a0 = amps_[i], a1 = amps_[i | mt];
                        amps_[i] = r * (a0 + a1);
                        amps_[i | mt] = r * (a0 - a1);
                    }
                }
                break;
            }
        }
    }

    /// In-place P|psi> for a signed Pauli word on the low qubits.
    void apply_pauli(const PauliString &p) {
        if (p.n > n_) {
            throw std::invalid_argument("pauli larger than state");
        }
        size_t xmask = 0, zmask = 0;
        int ycount = 0;
        for (uint32_t q = 0; q < p.n; q++) {
            if (p.x_bit(q)) xmask |= size_t{1} << q;
            if (p.z_bit(q)) zmask |= size_t{1} << q;
            if (p.x_bit(q) && p.z_bit(q)) ycount++;
        }
        static const cplx itab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        cplx base = double(p.sign) * itab[ycount % 4];
        std::vector<cplx> out(amps_.size());
        for (size_t i = 0; i < amps_.size(); i++) {
            cplx ph = base * ((std::popcount(i & zmask) & 1) ? -1.0 : 1.0);
            out[i ^ xmask] = ph * amps_[i];
        }
        amps_ = std::move(out);
    }

    double expectation_pauli(const PauliString &p) const {
        StateVector tmp = *this;
        tmp.apply_pauli(p);
        return tmp.inner(*this).real();
    }

    /// || (1 - P)/2 |psi> ||^2, the Born weight of the -1 outcome.
    double minus_probability(const PauliString &p) const {
        return 0.5 * (1.0 - expectation_pauli(p));
    }

    /// Projects onto the (-1)^outcome eigenspace of p and renormalizes.
    void project_pauli(const PauliString &p, int outcome) {
        StateVector tmp = *this;
        tmp.apply_pauli(p);
        double sgn = outcome ? -1.0 : 1.0;
        for (size_t i = 0; i < amps_.size(); i++) {
            amps_[i] = 0.5 * (amps_[i] + sgn * tmp.amps_[i]);
        }
        renormalize();
    }

    /// Dilated measurement unitary U = P+ x I + P- x X on an explicit
    /// register qubit. Hermitian, so it is its own inverse.
    void apply_measure_unitary(const PauliString &p, uint32_t reg_qubit) {
        StateVector tmp = *this;
        tmp.apply_pauli(p);
        size_t mr = size_t{1} << reg_qubit;
        std::vector<cplx> out(amps_.size());
        for (size_t i = 0; i < amps_.size(); i++) {
            cplx plus = 0.5 * (amps_[i] + tmp.amps_[i]);
            cplx minus = 0.5 * (amps_[i ^ mr] - tmp.amps_[i ^ mr]);
            out[i] = plus + minus;
        }
        amps_ = std::move(out);
    }

    /// Dilated weak-measurement unitary: P+ x I + P- x exp(i a X) on the
    /// register. At a = pi/2 this is the projective channel up to a phase of
    /// i on the flipped branch; at a = 0 it is the identity.
    void apply_weak_unitary(const PauliString &p, uint32_t reg_qubit, double angle) {
        StateVector tmp = *this;
        tmp.apply_pauli(p);
        size_t mr = size_t{1} << reg_qubit;
        cplx c = std::cos(angle), is = cplx(0, 1) * std::sin(angle);
        std::vector<cplx> out(amps_.size());
        for (size_t i = 0; i < amps_.size(); i++) {
            cplx plus = 0.5 * (amps_[i] + tmp.amps_[i]);
            cplx minus_same = 0.5 * (amps_[i] - tmp.amps_[i]);
            cplx minus_flip = 0.5 * (amps_[i ^ mr] - tmp.amps_[i ^ mr]);
            out[i] = plus + c * minus_same + is * minus_flip;
        }
        amps_ = std::move(out);
    }

    /// Applies a gate on the subspace where the register qubits in `regs`
    /// have odd parity.
    void apply_parity_controlled_gate(const Gate &g, const std::vector<uint32_t> &reg_qubits,
                                      bool dagger = false) {
        size_t pmask = 0;
        for (auto r : reg_qubits) pmask |= size_t{1} << r;
        // Build the gate on a copy, then splice the odd-parity slice back.
        StateVector tmp = *this;
        tmp.apply_gate(g, dagger);
        for (size_t i = 0; i < amps_.size(); i++) {
            if (std::popcount(i & pmask) & 1) amps_[i] = tmp.amps_[i];
        }
    }

    void apply_parity_controlled_pauli(const PauliString &p, const std::vector<uint32_t> &reg_qubits) {
        size_t pmask = 0;
        for (auto r : reg_qubits) pmask |= size_t{1} << r;
        StateVector tmp = *this;
        tmp.apply_pauli(p);
        for (size_t i = 0; i < amps_.size(); i++) {
            if (std::popcount(i & pmask) & 1) amps_[i] = tmp.amps_[i];
        }
    }

  private:
    template <typename F>
    void for_pairs(uint32_t q, F &&f) {
        size_t m = size_t{1} << q;
        for (size_t i = 0; i < amps_.size(); i++) {
            if (!(i & m)) f(amps_[i], amps_[i | m]);
        }
    }

    size_t n_ = 0;
    std::vector<cplx> amps_;
};

}  // namespace mfsim

#endif
