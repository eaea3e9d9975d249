// Copyright 2026 The qtpe Authors
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


#include <cmath>

#include "doctest.h"
#include "qtpe/error.hpp"
#include "qtpe/moment.hpp"
#include "qtpe/zigzag.hpp"

using namespace qtpe;

namespace {

CMatrix pauli_x() {
    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

// {I, V, V^dagger} with involution 0 <-> 0, 1 <-> 2.
UnitaryEnsemble hermitian_triple(Index d, SeededRng &rng) {
    CMatrix v = haar_unitary(d, rng);
    return UnitaryEnsemble({CMatrix::Identity(d, d), v, v.adjoint()}, std::vector<int>{0, 2, 1});
}

UnitaryEnsemble lifted(const UnitaryEnsemble &h, Index outer) {
    std::vector<CMatrix> us;
    for (Index i = 0; i < h.size(); i++) {
        us.push_back(kron(CMatrix::Identity(outer, outer), h[i]));
    }
    return UnitaryEnsemble(std::move(us));
}

double lam(const UnitaryEnsemble &e) {
    LambdaOptions opts;
    opts.tol = 1e-10;
    return lambda(e, 1, opts).lambda;
}

}  // namespace

TEST_CASE("routing unitary") {
    SeededRng rng(1);
    auto g = sample_random_qtpe(3, 4, rng);
    CMatrix gd = g_dot(g);
    CHECK(unitarity_defect(gd) < 1e-10);
    CHECK((gd * gd - CMatrix::Identity(12, 12)).norm() < 1e-10);

    auto simple = UnitaryEnsemble({CMatrix::Identity(2, 2), pauli_x()});
    CMatrix s = g_dot(simple);
    CMatrix expected = CMatrix::Zero(4, 4);
    for (Index b = 0; b < 2; b++) {
        CMatrix proj = CMatrix::Zero(2, 2);
        proj(b, b) = 1.0;
        expected += kron(simple[b], proj);
    }
    CHECK((s - expected).norm() == 0.0);
    // Reordered with the degree index most significant: blocks diag(I, X).
    CMatrix reordered(4, 4);
    for (Index r = 0; r < 4; r++) {
        for (Index c = 0; c < 4; c++) {
            reordered((r % 2) * 2 + r / 2, (c % 2) * 2 + c / 2) = s(r, c);
        }
    }
    CMatrix blocks = CMatrix::Zero(4, 4);
    blocks.topLeftCorner(2, 2) = CMatrix::Identity(2, 2);
    blocks.bottomRightCorner(2, 2) = pauli_x();
    CHECK((reordered - blocks).norm() == 0.0);

    // With an involution the degree register is relabelled.
    auto inv = UnitaryEnsemble({pauli_x(), pauli_x()}, std::vector<int>{1, 0});
    CMatrix gi = g_dot(inv);
    CHECK(gi(1 * 2 + 1, 0 * 2 + 0) == cd(1.0));
}

TEST_CASE("zigzag product structure") {
    SeededRng rng(2);
    auto g = sample_random_qtpe(3, 4, rng);
    auto h = sample_random_qtpe(4, 4, rng);
    auto z = zigzag(g, h);
    REQUIRE(z.size() == 16);
    CHECK(z.dim() == 12);
    CHECK(validate(z, 1e-10).pass);
    CMatrix gd = g_dot(g);
    CMatrix li = kron(CMatrix::Identity(3, 3), h[1]);
    CMatrix lj = kron(CMatrix::Identity(3, 3), h[3]);
    CHECK((z[1 * 4 + 3] - li * gd * lj).norm() < 1e-12);
    REQUIRE(z.involution());
    const auto &hi = *h.involution();
    CHECK((*z.involution())[1 * 4 + 3] == hi[3] * 4 + hi[1]);

    auto plain = zigzag(UnitaryEnsemble(g.unitaries()), h);
    CHECK_FALSE(plain.involution());
    CHECK(validate(plain, 1e-10).pass);

    auto bad = sample_random_qtpe(5, 4, rng);
    try {
        zigzag(g, bad);
        FAIL("expected DomainError");
    } catch (const DomainError &err) {
        std::string msg = err.what();
        CHECK(msg.find('5') != std::string::npos);
        CHECK(msg.find('4') != std::string::npos);
    }
}

TEST_CASE("zigzag with a trivial outer ensemble") {
    SeededRng rng(3);
    auto h = sample_random_qtpe(2, 4, rng);
    auto trivial1 = UnitaryEnsemble(std::vector<CMatrix>(2, CMatrix::Identity(1, 1)), std::vector<int>{0, 1});
    auto z1 = zigzag(trivial1, h);
    CHECK(std::abs(lam(z1) - lam(square_compose(h))) < 1e-7);
    // With D >= 2 the outer register is untouched, so lambda = 1.
    auto trivial2 = UnitaryEnsemble(std::vector<CMatrix>(2, CMatrix::Identity(2, 2)), std::vector<int>{0, 1});
    CHECK(std::abs(lam(zigzag(trivial2, h)) - 1.0) < 1e-7);
}

TEST_CASE("zigzag respects the eigenvalue bound at t = 1") {
    for (std::uint64_t seed = 0; seed < 3; seed++) {
        SeededRng rng(seed);
        auto g = sample_random_qtpe(8, 4, rng);
        auto h = sample_random_qtpe(4, 4, rng);
        double l1 = lam(g), l2 = lam(h);
        double lz = lam(zigzag(g, h));
        CHECK(lz <= 1.0 + 1e-9);
        CHECK(lz <= bound_zigzag(l1, l2, 1, 4).value + 1e-6);
    }
}

TEST_CASE("zigzag superoperator factorises") {
    SeededRng rng(4);
    for (int t = 1; t <= 2; t++) {
        auto g = UnitaryEnsemble({haar_unitary(2, rng), haar_unitary(2, rng)});
        auto h = UnitaryEnsemble({haar_unitary(2, rng), haar_unitary(2, rng)});
        auto z = zigzag(g, h);
        CMatrix hs = MomentOperator(lifted(h, 2), t).dense();
        CMatrix gs = MomentOperator(UnitaryEnsemble({g_dot(g)}), t).dense();
        CMatrix zs = MomentOperator(z, t).dense();
        CHECK((zs - hs * gs * hs).norm() < 1e-9);
        FixedSpaceBasis basis(4, t);
        MomentOperator phi(z, t);
        for (size_t i = 0; i < basis.permutations().size(); i++) {
            CHECK((phi.apply_vec(basis.alpha_vec(i)) - basis.alpha_vec(i)).norm() < 1e-9);
        }
    }
}

TEST_CASE("derandomised zigzag") {
    SeededRng rng(5);
    auto g = sample_random_qtpe(8, 4, rng);
    auto h = hermitian_triple(4, rng);
    auto z = zigzag_derandomised(g, h);
    REQUIRE(z.size() == 27);
    CHECK(validate(z, 1e-10).pass);
    CMatrix gd = g_dot(g);
    auto l = [&](Index i) { return kron(CMatrix::Identity(8, 8), h[i]); };
    CHECK((z[(2 * 3 + 1) * 3 + 0] - l(2) * l(1).adjoint() * gd * l(1) * l(0)).norm() < 1e-12);
    double l1 = lam(g), l2 = lam(h);
    double lz = lam(z);
    CHECK(lz <= 1.0 + 1e-9);
    CHECK(lz <= bound_zigzag_derandomised(l1, l2, 1, 4).value + 1e-6);

    auto unit = UnitaryEnsemble({CMatrix::Identity(4, 4)}, std::vector<int>{0});
    auto only = zigzag_derandomised(g, unit);
    REQUIRE(only.size() == 1);
    CHECK((only[0] - gd).norm() < 1e-12);
    CHECK_THROWS_AS(zigzag_derandomised(g, UnitaryEnsemble(h.unitaries())), DomainError);
}

TEST_CASE("generalised routing unitary") {
    SeededRng rng(6);
    auto ids = UnitaryEnsemble(std::vector<CMatrix>(3, CMatrix::Identity(2, 2)));
    CHECK((g_dot_general(ids, 3, 2) - CMatrix::Identity(12, 12)).norm() == 0.0);
    auto g = UnitaryEnsemble({haar_unitary(3, rng), haar_unitary(3, rng)}, std::vector<int>{0, 1});
    CHECK((g_dot_general(g, 2, 1) - g_dot(g)).norm() == 0.0);
    auto r = UnitaryEnsemble({haar_unitary(3, rng), haar_unitary(3, rng), haar_unitary(3, rng)});
    CHECK(unitarity_defect(g_dot_general(r, 3, 4)) < 1e-10);
    CHECK_THROWS_AS(g_dot_general(r, 2, 4), DomainError);
}

TEST_CASE("generalised zigzag product") {
    SeededRng rng(7);
    const Index d = 2, dp = 2, outer = 3;
    auto g = UnitaryEnsemble({haar_unitary(outer, rng), haar_unitary(outer, rng)});
    auto h1 = UnitaryEnsemble({haar_unitary(d * dp, rng), haar_unitary(d * dp, rng)});
    auto h2 = UnitaryEnsemble({haar_unitary(d * dp, rng), haar_unitary(d * dp, rng)});
    CMatrix gd = g_dot_general(g, d, dp);
    auto lift = [&](const CMatrix &v) { return kron(CMatrix::Identity(outer, outer), v); };

    auto k1 = zigzag_generalised(g, {h1}, dp);
    REQUIRE(k1.size() == 2);
    CHECK((k1[1] - lift(h1[1])).norm() < 1e-14);

    auto k2 = zigzag_generalised(g, {h1, h2}, dp);
    REQUIRE(k2.size() == 4);
    CHECK_FALSE(k2.involution());
    CHECK(validate(k2, 1e-10).pass);
    for (Index i2 = 0; i2 < 2; i2++) {
        for (Index i1 = 0; i1 < 2; i1++) {
            CHECK((k2[i2 * 2 + i1] - lift(h2[i2]) * gd * lift(h1[i1])).norm() < 1e-12);
        }
    }
    CHECK(lam(k2) <= 1.0 + 1e-9);

    auto unit = UnitaryEnsemble({CMatrix::Identity(d * dp, d * dp)});
    auto k3 = zigzag_generalised(g, {unit, unit, unit}, dp);
    REQUIRE(k3.size() == 1);
    CHECK((k3[0] - gd * gd).norm() < 1e-12);

    auto wrong = UnitaryEnsemble({CMatrix::Identity(3, 3)});
    CHECK_THROWS_AS(zigzag_generalised(g, {h1, wrong}, dp), DomainError);
    auto wide = UnitaryEnsemble(std::vector<CMatrix>(3, CMatrix::Identity(4, 4)));
    CHECK_THROWS_AS(zigzag_generalised(g, {h1, wide}, dp), DomainError);
    auto many = UnitaryEnsemble(std::vector<CMatrix>(17, CMatrix::Identity(4, 4)));
    CHECK_THROWS_AS(zigzag_generalised(g, {many, many, many}, dp), SizeLimitError);
}

TEST_CASE("zigzag bound arithmetic") {
    CHECK(bound_zigzag(0.1, 0.2, 1, 3).value == doctest::Approx(0.34));
    CHECK(bound_zigzag(0.1, 0.2, 1, 1000).value == doctest::Approx(0.34));
    auto vac = bound_zigzag(0.0, 0.0, 2, 40);
    CHECK(vac.value == doctest::Approx(11.3490).epsilon(1e-4));
    CHECK(vac.vacuous());
    CHECK(vac.flags.empty());
    auto big = bound_zigzag(0.1, 0.1, 2, 2e6);
    CHECK(big.value == doctest::Approx(0.968947).epsilon(1e-6));
    CHECK_FALSE(big.vacuous());
    CHECK(bound_zigzag(0.0, 0.0, 2, 39).flags.size() == 1);
    auto j = to_json(vac);
    CHECK(j["vacuous"] == true);
}

TEST_CASE("improved zigzag bound arithmetic") {
    CHECK(bound_zigzag_improved(0.2, 0.3, 1, 4, ImprovedVariant::AsPrinted).value ==
          doctest::Approx(0.405802).epsilon(1e-6));
    CHECK(bound_zigzag_improved(0.2, 0.3, 1, 4, ImprovedVariant::Squared).value ==
          doctest::Approx(0.404498).epsilon(1e-6));
    for (auto v : {ImprovedVariant::AsPrinted, ImprovedVariant::Squared}) {
        CHECK(bound_zigzag_improved(0.37, 0.0, 1, 4, v).value == doctest::Approx(0.37));
        CHECK(bound_zigzag_improved(0.0, 0.42, 1, 4, v).value == doctest::Approx(0.42));
    }
}

TEST_CASE("derandomised bound arithmetic") {
    CHECK(bound_zigzag_derandomised(0.1, 0.2, 1, 5).value == doctest::Approx(0.18));
    double r = 0.01;
    double expected = 9 * std::sqrt(r) + 2 * std::pow(2 * std::pow(r, 0.25), 2) + 2 * std::pow(r, 0.25);
    CHECK(bound_zigzag_derandomised(0.0, 0.0, 2, 200).value == doctest::Approx(expected));
    CHECK(bound_zigzag_derandomised(0.0, 0.0, 2, 200).value == doctest::Approx(2.332456).epsilon(1e-6));
    CHECK(bound_zigzag_derandomised(0.3, 0.0, 1, 5).value == doctest::Approx(0.3));
}

TEST_CASE("generalised bound arithmetic") {
    auto a = bound_genzigzag(0.01, 0.1, 2, 1, 100, 100, 0.001, 16);
    CHECK(a.bound.value == doctest::Approx(0.246));
    CHECK(a.dprime_threshold > 100);
    CHECK_FALSE(a.dprime_sufficient);
    auto k1 = bound_genzigzag(0.01, 0.0, 1, 1, 100, 100, 0.001, 16);
    CHECK(k1.bound.value == doctest::Approx(8 * 0.017 + 1.0));
    bool flagged = false;
    for (const auto &f : k1.bound.flags) flagged = flagged || f.find("k = 1") != std::string::npos;
    CHECK(flagged);
    auto c = bound_genzigzag(0.0, 0.0, 2, 2, 100, 100, 0.001, 16);
    CHECK(c.bound.value == doctest::Approx(8 * 0.007 + 47 * std::pow(2e-4, 0.25)).epsilon(1e-12));
    CHECK(47 * std::pow(2e-4, 0.25) == doctest::Approx(5.5893).epsilon(1e-4));
    auto flags = bound_genzigzag(0.0, 0.0, 3, 2, 2, 2, 0.1, 2).bound.flags;
    CHECK(flags.size() >= 4);
}
