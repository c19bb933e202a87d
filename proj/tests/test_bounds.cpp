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

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "mfsim/bounds.hpp"

using namespace mfsim;

namespace {

BoundParams base_params() {
    BoundParams p;
    p.m = 2;
    p.m0 = 1;
    p.t = 4;
    p.t0 = -1;
    p.v = 1.0;
    p.q = 1;
    p.n_obs = 4;
    p.nobs0 = 0;
    p.dim = 1;
    p.alpha = 1.0;
    p.nu = 0.5;
    p.dx = 4;
    p.dz = 4;
    p.n = 16;
    return p;
}

}  // namespace

TEST_CASE("closed-form evaluators", "[bounds]") {
    BoundParams p = base_params();

    SECTION("main reproduces the saturated teleportation distance") {
        auto r = evaluate_bound(BoundKind::main, p);
        REQUIRE(r.d_max == 15);
    }

    SECTION("estp at M=0 allows the staircase plus one") {
        BoundParams q;
        q.m = 0;
        q.t = 4;
        auto r = evaluate_bound(BoundKind::estp, q);
        REQUIRE(r.d_max == 4);
    }

    SECTION("repetition code takes the larger CSS distance") {
        BoundParams q;
        q.dx = 10;
        q.dz = 1;
        q.dim = 1;
        auto r = evaluate_bound(BoundKind::css, q);
        REQUIRE(r.d_max == 10);
        q.dim = 2;
        q.dx = 25;
        auto r2 = evaluate_bound(BoundKind::css, q);
        REQUIRE(r2.d_max == 5);  // largest D with D^2 <= 25
    }

    SECTION("w bound for the measurement-free builder depth") {
        BoundParams q;
        q.m = 0;
        q.t = 11;
        q.n = 16;
        auto r = evaluate_bound(BoundKind::w, q);
        REQUIRE(r.is_predicate);
        REQUIRE(r.d_max == 33);
        REQUIRE(r.predicate);
    }

    SECTION("bell and ghz forms") {
        auto rb = evaluate_bound(BoundKind::bell, p);
        REQUIRE(rb.d_max == 2 * 3 * 3 + 1);
        auto rg = evaluate_bound(BoundKind::ghz, p);
        REQUIRE(rg.d_max == 2 * 3 * 4);
    }

    SECTION("squeeze predicate") {
        BoundParams q;
        q.m = 4;
        q.t = 4;
        q.dim = 1;
        q.n = 16;
        q.nu = 0.5;
        auto r = evaluate_bound(BoundKind::squeeze, q);
        REQUIRE(r.is_predicate);
        REQUIRE(r.predicate == (4.0 * 4.0 >= std::pow(16.0, 0.75)));
    }

    SECTION("code distance form") {
        BoundParams q;
        q.m = 2;
        q.t = 3;
        q.dim = 1;
        auto r = evaluate_bound(BoundKind::code, q);
        REQUIRE(r.d_max == 12);  // (2 v M T)^dim
    }

    SECTION("missing parameters throw") {
        BoundParams q;
        REQUIRE_THROWS_AS(evaluate_bound(BoundKind::main, q), std::invalid_argument);
        REQUIRE_THROWS_AS(evaluate_bound(BoundKind::critical, BoundParams{}),
                          std::invalid_argument);
    }
}

TEST_CASE("implicit forms solve to the tight integer", "[bounds]") {
    std::mt19937_64 rng(71);
    const BoundKind kinds[] = {BoundKind::adaptive, BoundKind::dicke, BoundKind::critical,
                               BoundKind::multiq_adaptive};
    for (int trial = 0; trial < 200; trial++) {
        BoundParams p = base_params();
        p.m = int64_t(rng() % 6);
        p.t = 1 + int64_t(rng() % 8);
        p.dim = 1 + int(rng() % 3);
        p.alpha = double(rng() % 30) / 10.0;
        p.n_obs = int64_t(rng() % 12);
        p.q = 1 + int64_t(rng() % 3);
        p.c_dicke = double(rng() % 3);
        for (auto kind : kinds) {
            auto r = evaluate_bound(kind, p);
            // the returned D satisfies the defining inequality; D+1 fails
            auto rhs = [&](int64_t dd) {
                double lg = dd <= 1 ? 0.0 : std::log2(double(dd));
                switch (kind) {
                    case BoundKind::adaptive:
                        return 2.0 * double(*p.m + 1) * (p.v * double(*p.t) + (p.dim - 1) * lg);
                    case BoundKind::dicke:
                        return 2.0 * double(*p.m + 1) *
                               (p.v * double(*p.t) + (3 * p.dim - 1) * lg + p.c_dicke);
                    case BoundKind::critical:
                        return 2.0 * double(*p.m + 1) *
                               (p.v * double(*p.t) + (*p.alpha + p.dim - 1) * lg);
                    default:
                        return 2.0 * double(*p.n_obs / *p.q + 1) *
                               (p.v * double(*p.t) + (p.dim - 1) * lg);
                }
            };
            if (r.d_max > 0) {
                REQUIRE(double(r.d_max) <= rhs(r.d_max) + 1e-6);
            }
            REQUIRE(double(r.d_max + 1) > rhs(r.d_max + 1) + 1e-9);
        }
    }
}

TEST_CASE("monotonicity in resources", "[bounds]") {
    std::mt19937_64 rng(73);
    const BoundKind kinds[] = {BoundKind::main,    BoundKind::estp,          BoundKind::clifford,
                               BoundKind::generic, BoundKind::adaptive,      BoundKind::ghz,
                               BoundKind::dicke,   BoundKind::w,             BoundKind::critical,
                               BoundKind::multiq,  BoundKind::multiq_adaptive, BoundKind::sre,
                               BoundKind::multiq_sre, BoundKind::code,       BoundKind::bell};
    for (int trial = 0; trial < 1000; trial++) {
        BoundParams p = base_params();
        p.m = int64_t(rng() % 8);
        p.m0 = int64_t(rng() % 3);
        p.t = 2 + int64_t(rng() % 8);
        p.t0 = 0;
        p.dim = 1 + int(rng() % 3);
        p.alpha = double(rng() % 25) / 10.0;
        p.n_obs = int64_t(rng() % 16);
        p.nobs0 = int64_t(rng() % 3);
        p.q = 1 + int64_t(rng() % 4);
        BoundKind kind = kinds[rng() % (sizeof(kinds) / sizeof(kinds[0]))];
        auto r0 = evaluate_bound(kind, p);

        BoundParams pm = p;
        pm.m = *p.m + 1;
        REQUIRE(evaluate_bound(kind, pm).d_max >= r0.d_max);

        BoundParams pt = p;
        pt.t = *p.t + 1;
        REQUIRE(evaluate_bound(kind, pt).d_max >= r0.d_max);

        BoundParams pn = p;
        pn.n_obs = *p.n_obs + 1;
        REQUIRE(evaluate_bound(kind, pn).d_max >= r0.d_max);

        BoundParams pq = p;
        pq.q = *p.q + 1;
        REQUIRE(evaluate_bound(kind, pq).d_max <= r0.d_max);
    }
}

TEST_CASE("audit flags saturation at the expected offsets", "[bounds][audit]") {
    auto inst = build_estp(2, 4);
    auto rep = audit_protocol(inst, true);
    REQUIRE(rep.audited_m == 2);
    REQUIRE(rep.audited_nobs == 4);
    REQUIRE(rep.audited_depth == 4);
    REQUIRE(rep.audited_distance == 15);
    bool main_saturated = false;
    for (const auto &chk : rep.checks) {
        if (chk.result.kind == BoundKind::main) {
            REQUIRE(chk.satisfied);
            main_saturated = chk.saturated;
        }
    }
    REQUIRE(main_saturated);
    REQUIRE(!rep.inconsistent);
}

TEST_CASE("soundness across the builder sweep", "[bounds][audit]") {
    // No honest instance that would pass its task check violates an exact
    // applicable bound.
    for (int m = 0; m <= 4; m++) {
        for (int t = 3; t <= 6; t++) {
            auto rep = audit_protocol(build_estp(m, t), true);
            INFO("estp m=" << m << " t=" << t);
            REQUIRE(!rep.inconsistent);
        }
    }
    for (int ell : {2, 4, 6}) {
        for (int m : {0, 1, 2, 3}) {
            auto rep = audit_protocol(build_ghz_1d(m, ell), true);
            INFO("ghz ell=" << ell << " m=" << m);
            REQUIRE(!rep.inconsistent);
        }
    }
    for (int m : {0, 1, 2}) {
        for (int t : {3, 4}) {
            auto rep = audit_protocol(build_bell_distill(m, t), true);
            INFO("bell m=" << m << " t=" << t);
            REQUIRE(!rep.inconsistent);
        }
    }
    for (int nlog : {2, 3, 4}) {
        REQUIRE(!audit_protocol(build_w_state(nlog, WMode::unitary), true).inconsistent);
        REQUIRE(!audit_protocol(build_w_state(nlog, WMode::estp), true).inconsistent);
    }
}
