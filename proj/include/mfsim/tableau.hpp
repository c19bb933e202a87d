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

#ifndef MFSIM_TABLEAU_HPP
#define MFSIM_TABLEAU_HPP

#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

#include "mfsim/outcome.hpp"
#include "mfsim/pauli.hpp"

namespace mfsim {

struct MeasureResult {
    int outcome;  // 0 for the +1 eigenvalue, 1 for -1
    bool deterministic;
};

/// Stabilizer/destabilizer generator pair for a pure stabilizer state.
/// Destabilizer row k anticommutes with stabilizer row k and commutes with
/// every other row. Rows are full bitvector words plus a per-row support
/// interval (word indices), so local gates and measurements skip rows whose
/// support is elsewhere; on protocol circuits rows stay narrow and a
/// trajectory costs far below the naive O(n^2) sweep.
class Tableau {
  public:
    explicit Tableau(size_t n_qubits) : n_(n_qubits) {
        stab_.reserve(n_);
        destab_.reserve(n_);
        for (uint32_t q = 0; q < n_; q++) {
            stab_.push_back(PauliString::single(n_, q, 'Z'));
            destab_.push_back(PauliString::single(n_, q, 'X'));
            uint32_t w = q >> 6;
            stab_span_.push_back({w, w});
            destab_span_.push_back({w, w});
        }
    }

    size_t n_qubits() const { return n_; }
    const PauliString &stabilizer(size_t k) const { return stab_[k]; }
    const PauliString &destabilizer(size_t k) const { return destab_[k]; }

    void apply(const Gate &g, bool dagger = false) {
        if (!gate_is_clifford(g.kind)) {
            throw std::invalid_argument("non-Clifford gate on the tableau backend");
        }
        uint32_t wa = g.q0 >> 6;
        uint32_t wb = g.two_site() ? (g.q1 >> 6) : wa;
        uint32_t lo = wa < wb ? wa : wb;
        uint32_t hi = wa > wb ? wa : wb;
        // Rows evolve in the state direction: S -> g S g^dag.
        for (size_t k = 0; k < n_; k++) {
            conj_row(stab_[k], stab_span_[k], g, !dagger, lo, hi, wa, wb);
            conj_row(destab_[k], destab_span_[k], g, !dagger, lo, hi, wa, wb);
        }
    }

    void apply_pauli_string(const PauliString &p) {
        // Conjugation by a Pauli only flips row signs.
        Span ps{uint32_t(p.lowest_word()), uint32_t(p.highest_word())};
        for (size_t k = 0; k < n_; k++) {
            if (overlaps(stab_span_[k], ps) &&
                !stab_[k].commutes_with_range(p, ps.first, ps.second)) {
                stab_[k].sign = int8_t(-stab_[k].sign);
            }
            if (overlaps(destab_span_[k], ps) &&
                !destab_[k].commutes_with_range(p, ps.first, ps.second)) {
                destab_[k].sign = int8_t(-destab_[k].sign);
            }
        }
    }

    /// +1 / -1 if +p / -p is in the stabilizer group, else 0.
    int expectation(const PauliString &p) const {
        if (p.n != n_) {
            throw std::invalid_argument("pauli length mismatch");
        }
        Span ps{uint32_t(p.lowest_word()), uint32_t(p.highest_word())};
        for (size_t k = 0; k < n_; k++) {
            if (overlaps(stab_span_[k], ps) &&
                !stab_[k].commutes_with_range(p, ps.first, ps.second)) {
                return 0;
            }
        }
        auto [word, sgn] = group_decomposition(p, ps);
        if (!word.same_support(p)) {
            return 0;
        }
        return (sgn == p.sign) ? +1 : -1;
    }

    /// Projective measurement of p by the standard stabilizer update rule.
    MeasureResult measure(const PauliString &p, OutcomeSource &src) {
        if (p.n != n_) {
            throw std::invalid_argument("pauli length mismatch");
        }
        Span ps{uint32_t(p.lowest_word()), uint32_t(p.highest_word())};
        size_t pivot = n_;
        for (size_t k = 0; k < n_; k++) {
            if (overlaps(stab_span_[k], ps) &&
                !stab_[k].commutes_with_range(p, ps.first, ps.second)) {
                pivot = k;
                break;
            }
        }
        if (pivot == n_) {
            auto [word, sgn] = group_decomposition(p, ps);
            assert(word.same_support(p));
            int outcome = (sgn == p.sign) ? 0 : 1;
            return {src.deterministic_bit(outcome), true};
        }

        int outcome = src.random_bit(0.5);
        const PauliString piv = stab_[pivot];  // rows below mutate in place
        const Span piv_span = stab_span_[pivot];
        for (size_t k = 0; k < n_; k++) {
            if (k != pivot && overlaps(stab_span_[k], ps) &&
                !stab_[k].commutes_with_range(p, ps.first, ps.second)) {
                mul_row(stab_[k], stab_span_[k], piv, piv_span);
            }
            if (k != pivot && overlaps(destab_span_[k], ps) &&
                !destab_[k].commutes_with_range(p, ps.first, ps.second)) {
                mul_row(destab_[k], destab_span_[k], piv, piv_span);
            }
        }
        destab_[pivot] = piv;
        destab_span_[pivot] = piv_span;
        stab_[pivot] = p;
        if (outcome) stab_[pivot].sign = int8_t(-stab_[pivot].sign);
        stab_span_[pivot] = ps;
        return {outcome, false};
    }

    /// Consistency check used by the tests: mutual commutation of the
    /// stabilizers and the symplectic pairing against the destabilizers.
    bool check_invariants() const {
        for (size_t i = 0; i < n_; i++) {
            for (size_t j = 0; j < n_; j++) {
                if (!stab_[i].commutes_with(stab_[j])) return false;
                if (!destab_[i].commutes_with(destab_[j])) return false;
                bool anti = !destab_[i].commutes_with(stab_[j]);
                if (anti != (i == j)) return false;
            }
        }
        return true;
    }

  private:
    using Span = std::pair<uint32_t, uint32_t>;

    static bool overlaps(const Span &row, const Span &p) {
        return row.first <= p.second && p.first <= row.second;
    }

    static void conj_row(PauliString &row, Span &span, const Gate &g, bool dagger,
                         uint32_t lo, uint32_t hi, uint32_t wa, uint32_t wb) {
        if (span.first > hi || span.second < lo) {
            return;
        }
        row.conjugate(g, dagger);
        if (row.x[wa] | row.z[wa]) {
            if (wa < span.first) span.first = wa;
            if (wa > span.second) span.second = wa;
        }
        if (row.x[wb] | row.z[wb]) {
            if (wb < span.first) span.first = wb;
            if (wb > span.second) span.second = wb;
        }
    }

    static void mul_row(PauliString &row, Span &span, const PauliString &by, const Span &by_span) {
        int k = row.mul_right_phase_range(by, by_span.first, by_span.second);
        assert(k % 2 == 0);
        row.sign = int8_t(row.sign * by.sign * (k == 2 ? -1 : +1));
        if (by_span.first < span.first) span.first = by_span.first;
        if (by_span.second > span.second) span.second = by_span.second;
    }

    /// Express p (up to sign) as a product of stabilizer generators, picking
    /// the generator set from the destabilizer pairing. Returns the product
    /// word and its overall sign with the i-exponent folded in.
    std::pair<PauliString, int8_t> group_decomposition(const PauliString &p, const Span &ps) const {
        PauliString acc = PauliString::identity(n_);
        int phase = 0;
        int8_t sgn = +1;
        for (size_t k = 0; k < n_; k++) {
            if (overlaps(destab_span_[k], ps) &&
                !destab_[k].commutes_with_range(p, ps.first, ps.second)) {
                phase = (phase + acc.mul_right_phase_range(stab_[k], stab_span_[k].first,
                                                           stab_span_[k].second)) %
                        4;
                sgn = int8_t(sgn * stab_[k].sign);
            }
        }
        assert(phase % 2 == 0);
        if (phase == 2) sgn = int8_t(-sgn);
        acc.sign = sgn;
        return {acc, sgn};
    }

    size_t n_;
    std::vector<PauliString> stab_, destab_;
    std::vector<Span> stab_span_, destab_span_;
};

}  // namespace mfsim

#endif
