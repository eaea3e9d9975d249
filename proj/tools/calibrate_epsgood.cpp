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


// Monte Carlo acceptance rates of the eps-good checks on Haar-random inputs.

#include <chrono>
#include <cmath>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qtpe/epsgood.hpp"

using namespace qtpe;

namespace {

struct Rate {
    std::int64_t accepted = 0;
    std::int64_t trials = 0;
    double seconds = 0.0;
};

// Lower end of the 95% Wilson score interval.
double wilson_lower(const Rate &r) {
    const double z = 1.959963984540054;
    double n = static_cast<double>(r.trials);
    double p = static_cast<double>(r.accepted) / n;
    double centre = p + z * z / (2 * n);
    double spread = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    return (centre - spread) / (1 + z * z / n);
}

nlohmann::json to_json(const Rate &r) {
    return {{"accepted", r.accepted},
            {"trials", r.trials},
            {"rate", static_cast<double>(r.accepted) / static_cast<double>(r.trials)},
            {"wilson95_lower", wilson_lower(r)},
            {"seconds", r.seconds}};
}

template <typename F>
Rate measure(std::int64_t trials, F &&trial) {
    Rate r;
    r.trials = trials;
    auto start = std::chrono::steady_clock::now();
    for (std::int64_t i = 0; i < trials; i++) {
        if (trial(i)) r.accepted++;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Calibrate Haar acceptance rates of the eps-good checks"};
    Index d = 2;
    Index dprime = 256;
    double eps = 0.3;
    int k = 2;
    std::int64_t trials = 400;
    std::int64_t set_trials = 200;
    std::int64_t tuple_trials = 100;
    std::uint64_t seed = 20261016;
    app.add_option("--d", d, "First factor dimension")->capture_default_str();
    app.add_option("--dprime", dprime, "Second factor dimension")->capture_default_str();
    app.add_option("--eps", eps, "eps")->capture_default_str();
    app.add_option("--k", k, "Tuple length")->capture_default_str();
    app.add_option("--trials", trials, "Trials of the vector check")->capture_default_str();
    app.add_option("--set-trials", set_trials, "Trials of the set check")->capture_default_str();
    app.add_option("--tuple-trials", tuple_trials, "Trials of the tuple check")->capture_default_str();
    app.add_option("--seed", seed, "Seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    const Index n = d * dprime;
    std::vector<CVector> basis;
    for (Index i = 0; i < n; i++) basis.push_back(CVector::Unit(n, i));

    Rate vector = measure(trials, [&](std::int64_t i) {
        SeededRng r = SeededRng(seed, 1).derive(static_cast<std::uint64_t>(i));
        CMatrix u = haar_unitary(n, r);
        CVector x(n);
        for (Index j = 0; j < n; j++) x(j) = r.complex_normal();
        x.normalize();
        return is_good_for_vector(u, x, d, dprime, eps).good;
    });
    Rate set = measure(set_trials, [&](std::int64_t i) {
        SeededRng r = SeededRng(seed, 2).derive(static_cast<std::uint64_t>(i));
        CMatrix u = haar_unitary(n, r);
        return is_good_for_set(u, basis, d, dprime, eps).good;
    });
    Rate tuple = measure(tuple_trials, [&](std::int64_t i) {
        SeededRng r = SeededRng(seed, 3).derive(static_cast<std::uint64_t>(i));
        std::vector<CMatrix> us;
        for (int j = 0; j < k; j++) us.push_back(haar_unitary(n, r));
        return is_tuple_good(us, d, dprime, eps).good;
    });

    nlohmann::json out = {{"d", d},         {"dprime", dprime},       {"eps", eps},
                          {"k", k},         {"seed", seed},           {"vector", to_json(vector)},
                          {"set", to_json(set)}, {"tuple", to_json(tuple)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}
