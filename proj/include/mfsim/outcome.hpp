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

#ifndef MFSIM_OUTCOME_HPP
#define MFSIM_OUTCOME_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace mfsim {

/// Raised when a forced outcome contradicts a deterministic measurement:
/// the requested trajectory has probability zero.
struct contradictory_trajectory : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One source of measurement outcomes per run. Measurements are numbered by
/// encounter order (the ordinal); a prefix of outcomes may be forced, which
/// is how trajectory enumeration drives the backends. Random measurements
/// past the forced prefix either sample the seeded generator or, in
/// discovery mode, take 0 and are recorded as free choices.
class OutcomeSource {
  public:
    explicit OutcomeSource(uint64_t seed = 0) : rng_(seed) {}

    static OutcomeSource forced(std::vector<int> bits, uint64_t seed = 0) {
        OutcomeSource s(seed);
        s.forced_ = std::move(bits);
        return s;
    }

    static OutcomeSource discovery(std::vector<int> bits) {
        OutcomeSource s(0);
        s.forced_ = std::move(bits);
        s.discovery_ = true;
        return s;
    }

    /// Called by a backend for a random (unbiased or Born-weighted)
    /// measurement. p1 is the probability of outcome 1.
    int random_bit(double p1) {
        size_t ord = ordinal_++;
        random_flags_.push_back(1);
        int bit;
        if (ord < forced_.size()) {
            bit = forced_[ord];
        } else if (discovery_) {
            bit = 0;
        } else {
            bit = std::bernoulli_distribution(p1)(rng_) ? 1 : 0;
        }
        branch_probability_ *= bit ? p1 : 1.0 - p1;
        return bit;
    }

    /// Called for a measurement whose outcome is fixed by the state.
    int deterministic_bit(int outcome) {
        size_t ord = ordinal_++;
        random_flags_.push_back(0);
        if (ord < forced_.size() && forced_[ord] != outcome) {
            throw contradictory_trajectory("forced outcome contradicts a deterministic measurement");
        }
        return outcome;
    }

    size_t measurements_seen() const { return ordinal_; }
    size_t random_measurements_seen() const {
        size_t n = 0;
        for (auto f : random_flags_) n += f;
        return n;
    }
    const std::vector<uint8_t> &random_flags() const { return random_flags_; }
    double branch_probability() const { return branch_probability_; }

  private:
    std::mt19937_64 rng_;
    std::vector<int> forced_;
    bool discovery_ = false;
    std::vector<uint8_t> random_flags_;
    double branch_probability_ = 1.0;
    size_t ordinal_ = 0;
};

}  // namespace mfsim

#endif
