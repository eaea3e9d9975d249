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


#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "qtpe/ensemble.hpp"
#include "qtpe/error.hpp"
#include "qtpe/moment.hpp"

using namespace qtpe;

namespace {

UnitaryEnsemble haar_ensemble(Index d, Index s, std::uint64_t seed) {
    SeededRng rng(seed);
    std::vector<CMatrix> us;
    for (Index i = 0; i < s; i++) {
        us.push_back(haar_unitary(d, rng));
    }
    return UnitaryEnsemble(std::move(us));
}

double dense_lambda(const UnitaryEnsemble &e, int t) {
    LambdaOptions opts;
    opts.method = SpectralMethod::DenseSvd;
    return lambda(e, t, opts).lambda;
}

std::filesystem::path temp_file(const std::string &name) {
    auto dir = std::filesystem::temp_directory_path() / "qtpe_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("constructor shape checks") {
    CHECK_THROWS_AS(UnitaryEnsemble({}), DomainError);
    CHECK_THROWS_AS(UnitaryEnsemble({CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)}), DomainError);
    CHECK_THROWS_AS(UnitaryEnsemble({CMatrix::Identity(2, 3)}), DomainError);
    CHECK_THROWS_AS(UnitaryEnsemble({CMatrix::Identity(2, 2)}, std::vector<int>{0, 1}), DomainError);
}

TEST_CASE("validate reports defects") {
    auto id = UnitaryEnsemble({CMatrix::Identity(2, 2)});
    auto ok = validate(id, 1e-10);
    CHECK(ok.pass);
    CHECK(ok.unitarity_defect == 0.0);

    CMatrix bent = CMatrix::Identity(2, 2);
    bent(0, 1) = 1e-3;
    auto bad = validate(UnitaryEnsemble({bent}), 1e-10);
    CHECK_FALSE(bad.pass);
    CHECK(bad.unitarity_defect == doctest::Approx(1e-3).epsilon(1e-3));
    CHECK_FALSE(bad.message.empty());

    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    CMatrix phase = CMatrix::Identity(2, 2);
    phase(1, 1) = cd(0, 1);
    auto wrong_inv = validate(UnitaryEnsemble({phase, x}, std::vector<int>{1, 0}), 1e-10);
    CHECK_FALSE(wrong_inv.pass);
    CHECK(wrong_inv.involution_defect > 0.5);

    auto not_involutive = validate(UnitaryEnsemble({x, x, x}, std::vector<int>{1, 2, 0}), 1e-10);
    CHECK_FALSE(not_involutive.involution_well_formed);
    CHECK_FALSE(not_involutive.pass);
}

TEST_CASE("random qtpe sampler") {
    SeededRng rng(12);
    auto e = sample_random_qtpe(2, 4, rng);
    REQUIRE(e.size() == 4);
    CHECK((e[2] - e[0].adjoint()).norm() == 0.0);
    CHECK((e[3] - e[1].adjoint()).norm() == 0.0);
    REQUIRE(e.involution());
    CHECK(*e.involution() == std::vector<int>{2, 3, 0, 1});

    SeededRng a(77), b(77);
    CHECK(bit_identical(sample_random_qtpe(5, 6, a), sample_random_qtpe(5, 6, b)));

    for (std::uint64_t seed = 0; seed < 20; seed++) {
        SeededRng r(seed);
        auto f = sample_random_qtpe(8, 6, r);
        CHECK(validate(f, 1e-10 * 8).pass);
    }
    SeededRng r(1);
    CHECK_THROWS_AS(sample_random_qtpe(3, 5, r), DomainError);
    CHECK_THROWS_AS(sample_random_qtpe(3, 2, r), DomainError);
}

TEST_CASE("hermitian doubling") {
    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    auto e = UnitaryEnsemble({CMatrix::Identity(2, 2), x});
    auto dbl = hermitian_double(e);
    CHECK(dbl.size() == 4);
    CHECK(*dbl.involution() == std::vector<int>{2, 3, 0, 1});
    CHECK(validate(dbl, 1e-12).pass);

    // Doubling symmetrises the moment operator: lambda(double) <= lambda,
    // with equality when the input is already closed under adjoints.
    for (std::uint64_t seed = 0; seed < 10; seed++) {
        auto g = haar_ensemble(4, 3, seed);
        CHECK(dense_lambda(hermitian_double(g), 1) <= dense_lambda(g, 1) + 1e-7);
        SeededRng rng(seed + 100);
        auto h = sample_random_qtpe(4, 4, rng);
        CHECK(std::abs(dense_lambda(hermitian_double(h), 1) - dense_lambda(h, 1)) <= 1e-7);
    }
}

TEST_CASE("squaring") {
    auto one = square_compose(UnitaryEnsemble({CMatrix::Identity(3, 3)}));
    CHECK(one.size() == 1);
    CHECK_FALSE(one.involution());
    CHECK(square_compose(haar_ensemble(2, 3, 1)).size() == 9);
    auto e = haar_ensemble(2, 3, 2);
    auto sq = square_compose(e);
    CHECK((sq[1 * 3 + 2] - e[1] * e[2]).norm() < 1e-14);
    CHECK(validate(sq, 1e-10).pass);
    for (std::uint64_t seed = 0; seed < 10; seed++) {
        SeededRng rng(seed);
        auto h = sample_random_qtpe(4, 4, rng);
        double l = dense_lambda(h, 1);
        CHECK(std::abs(dense_lambda(square_compose(h), 1) - l * l) <= 1e-7);
    }
    CHECK_THROWS_AS(square_compose(haar_ensemble(2, 65, 3)), SizeLimitError);
}

TEST_CASE("tensoring") {
    auto id = tensor_ensemble(UnitaryEnsemble({CMatrix::Identity(2, 2)}));
    CHECK(id.dim() == 4);
    CHECK((id[0] - CMatrix::Identity(4, 4)).norm() == 0.0);
    auto two = tensor_ensemble(haar_ensemble(2, 2, 4));
    CHECK(two.size() == 4);
    CHECK(two.dim() == 4);
    for (std::uint64_t seed = 0; seed < 10; seed++) {
        auto e = haar_ensemble(3, 4, seed);
        CHECK(std::abs(dense_lambda(tensor_ensemble(e), 1) - dense_lambda(e, 1)) <= 1e-7);
    }
}

TEST_CASE("tracing out: lambda is monotone in t") {
    for (Index d : {3, 4}) {
        for (std::uint64_t seed = 0; seed < 3; seed++) {
            auto e = haar_ensemble(d, 3, seed);
            LambdaOptions opts;
            opts.method = SpectralMethod::Lanczos;
            opts.tol = 1e-10;
            double l1 = lambda(e, 1, opts).lambda;
            double l2 = lambda(e, 2, opts).lambda;
            CHECK(l1 <= l2 + 1e-7);
            if (d == 3) {
                double l3 = lambda(e, 3, opts).lambda;
                CHECK(l2 <= l3 + 1e-7);
            }
        }
    }
}

TEST_CASE("binary round trip is bit exact") {
    auto path = temp_file("id.qtpe");
    std::filesystem::remove(sidecar_path(path));
    auto id = UnitaryEnsemble({CMatrix::Identity(2, 2)}, std::nullopt, "identity");
    save(id, path);
    CHECK(bit_identical(load(path), id));

    SeededRng rng(9);
    auto e = sample_random_qtpe(4, 4, rng);
    auto bytes = encode(e);
    CHECK(bytes.size() == 4 + 1 + 4 + 4 + 1 + 4 * 4 + 4 * 16 * 16);
    save(e, path);
    auto back = load(path);
    CHECK(bit_identical(back, e));
    CHECK(back.label() == "id");
    CHECK(encode(back) == bytes);

    save_sidecar(e, path, 9, {{"command", "test"}});
    CHECK(std::filesystem::exists(sidecar_path(path)));
    CHECK(sidecar_path(path).extension() == ".json");
    CHECK(load(path).label() == e.label());
}

TEST_CASE("header layout") {
    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    auto bytes = encode(UnitaryEnsemble({x, x}, std::vector<int>{1, 0}));
    REQUIRE(bytes.size() == 4 + 1 + 4 + 4 + 1 + 8 + 2 * 4 * 16);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "QTPE");
    CHECK(bytes[4] == 0x01);
    CHECK(bytes[5] == 2);  // dim, little-endian
    CHECK(bytes[9] == 2);  // count
    CHECK(bytes[13] == 1);
    CHECK(bytes[14] == 1);  // involution[0]
    CHECK(bytes[18] == 0);
    // entry (0,1) of the first unitary is 1.0: real part at offset 22 + 16.
    double re = 0.0;
    std::memcpy(&re, bytes.data() + 22 + 16, 8);
    CHECK(re == 1.0);
}

TEST_CASE("malformed files name the field") {
    SeededRng rng(1);
    auto good = encode(sample_random_qtpe(2, 4, rng));
    auto expect_field = [](std::vector<std::uint8_t> bytes, const std::string &field) {
        try {
            decode(bytes);
            FAIL("expected ParseError for " << field);
        } catch (const ParseError &err) {
            CHECK(err.field() == field);
        }
    };
    auto bad_magic = good;
    bad_magic[0] = 'X';
    expect_field(bad_magic, "magic");
    auto bad_version = good;
    bad_version[4] = 2;
    expect_field(bad_version, "version");
    expect_field(std::vector<std::uint8_t>(good.begin(), good.begin() + 7), "dim");
    auto zero_dim = good;
    zero_dim[5] = 0;
    expect_field(zero_dim, "dim");
    expect_field(std::vector<std::uint8_t>(good.begin(), good.begin() + 11), "count");
    auto bad_flag = good;
    bad_flag[13] = 7;
    expect_field(bad_flag, "involution_flag");
    expect_field(std::vector<std::uint8_t>(good.begin(), good.begin() + good.size() - 3), "entries");
    auto out_of_range = good;
    out_of_range[14] = 9;
    expect_field(out_of_range, "involution");

    auto not_involutive = good;
    // targets {2,3,0,1} -> {1,2,3,0}: bijective but not self-inverse.
    for (int i = 0; i < 4; i++) {
        not_involutive[static_cast<size_t>(14 + 4 * i)] = static_cast<std::uint8_t>((i + 1) % 4);
    }
    CHECK_THROWS_AS(decode(not_involutive), ValidationError);

    auto path = temp_file("truncated.qtpe");
    {
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char *>(good.data()), 30);
    }
    CHECK_THROWS_AS(load(path), ParseError);
    CHECK_THROWS_AS(load(temp_file("missing.qtpe")), IoError);
}
