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
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cli_support.hpp"
#include "qtpe/error.hpp"
#include "qtpe/zigzag.hpp"

using namespace qtpe;
using namespace qtpe::cli;
using nlohmann::json;

namespace {

struct SampleArgs {
    Index dim = 0;
    Index degree = 0;
    std::uint64_t seed = 0;
    std::string out;
};

struct LambdaArgs {
    std::string path;
    int t = 1;
    std::string method = "auto";
    double tol = -1.0;
    std::uint64_t seed = 0;
    int max_iters = 5000;
    std::string out;
    bool csv = false;
};

struct ZigzagArgs {
    std::string g;
    std::vector<std::string> h;
    std::string kind = "zigzag";
    Index dprime = 1;
    std::string out;
    std::string report;
    bool csv = false;
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    bool compute_lambda = false;
    int t = 1;
    double eps = 1e-3;
    std::string method = "auto";
    double tol = -1.0;
    std::uint64_t seed = 0;
};

struct CertifyArgs {
    std::string config;
    std::string out;
    bool csv = false;
};

int cmd_sample(const SampleArgs &a) {
    if (a.degree < 4 || a.degree % 2 != 0) {
        throw DomainError("--degree must be even and at least 4, got " + std::to_string(a.degree));
    }
    SeededRng rng(a.seed);
    UnitaryEnsemble e = sample_random_qtpe(a.dim, a.degree, rng);
    std::filesystem::path out(a.out);
    e = e.with_label(out.stem().string());
    save(e, out);
    save_sidecar(e, out, a.seed, json{{"kind", "random-qtpe"}, {"dim", a.dim}, {"degree", a.degree}});
    std::cout << "wrote " << e.size() << " unitaries of dimension " << e.dim() << " to " << a.out << " (seed "
              << a.seed << ")\n";
    return kExitOk;
}

SpectralReport run_lambda(const UnitaryEnsemble &e, int t, const std::string &method, double tol, int max_iters,
                          std::uint64_t seed) {
    LambdaOptions opts;
    opts.method = spectral_method_from_string(method);
    opts.tol = tol;
    opts.max_iters = max_iters;
    opts.seed = seed;
    return lambda(e, t, opts);
}

std::optional<BoundReference> reference_for(const std::filesystem::path &path, const UnitaryEnsemble &e, int t) {
    json prov = read_provenance(path);
    if (prov.is_object() && prov.value("kind", "") == "random-qtpe") {
        return random_qtpe_reference(e.dim(), e.size(), t);
    }
    return std::nullopt;
}

int cmd_lambda(const LambdaArgs &a) {
    UnitaryEnsemble e = load_validated(a.path);
    SpectralReport r = run_lambda(e, a.t, a.method, a.tol, a.max_iters, a.seed);
    json report = lambda_json(r, reference_for(a.path, e, a.t));
    report["command"] = "lambda";
    report["dim"] = e.dim();
    report["count"] = e.size();
    emit_report(report, a.out, a.csv);
    if (!r.converged) {
        std::cerr << "lambda: iterative solver did not converge (residual " << r.residual << " after " << r.iterations
                  << " iterations)\n";
        return kExitNonConvergence;
    }
    return kExitOk;
}

int cmd_zigzag(const ZigzagArgs &a) {
    ZigzagKind kind = zigzag_kind_from_string(a.kind);
    if (a.lambda1.has_value() != a.lambda2.has_value()) {
        throw DomainError("--lambda1 and --lambda2 must be given together");
    }
    if (kind != ZigzagKind::Generalised && a.h.size() != 1) {
        throw DomainError("--kind " + a.kind + " takes exactly one --h, got " + std::to_string(a.h.size()));
    }
    UnitaryEnsemble g = load_validated(a.g);
    std::vector<UnitaryEnsemble> hs;
    for (const auto &p : a.h) hs.push_back(load_validated(p));
    const Index s = hs.front().size();

    UnitaryEnsemble product = [&] {
        switch (kind) {
            case ZigzagKind::Zigzag:
                return zigzag(g, hs.front());
            case ZigzagKind::Derandomised:
                return zigzag_derandomised(g, hs.front());
            case ZigzagKind::Generalised:
                break;
        }
        return zigzag_generalised(g, hs, a.dprime);
    }();
    std::filesystem::path out(a.out);
    product = product.with_label(out.stem().string());
    save(product, out);
    save_sidecar(product, out, std::nullopt,
                 json{{"kind", std::string(to_string(kind))}, {"g", a.g}, {"h", a.h}, {"dprime", a.dprime}});

    int k = static_cast<int>(hs.size());
    Index expected = kind == ZigzagKind::Zigzag ? s * s : kind == ZigzagKind::Derandomised ? s * s * s
                                                                                          : checked_pow(s, k);
    json report = {{"schema_version", 1},
                   {"command", "zigzag"},
                   {"kind", std::string(to_string(kind))},
                   {"out", a.out},
                   {"dim", product.dim()},
                   {"member_count", product.size()},
                   {"expected_member_count", expected},
                   {"explicitly_hermitian", product.explicitly_hermitian()}};

    int code = kExitOk;
    std::optional<double> l1 = a.lambda1, l2 = a.lambda2;
    if (a.compute_lambda) {
        SeededRng streams(a.seed, 0x5a5a);
        auto measure = [&](const UnitaryEnsemble &e) {
            SpectralReport r = run_lambda(e, a.t, a.method, a.tol, 5000, streams.next_u64());
            if (!r.converged) code = kExitNonConvergence;
            return r;
        };
        SpectralReport rg = measure(g);
        double worst_inner = 0.0;
        json inner = json::array();
        for (const auto &h : hs) {
            SpectralReport rh = measure(h);
            worst_inner = std::max(worst_inner, rh.lambda);
            inner.push_back(to_json(rh));
        }
        SpectralReport rp = measure(product);
        report["lambda_outer"] = to_json(rg);
        report["lambda_inner"] = inner;
        report["lambda_product"] = to_json(rp);
        if (!l1) {
            l1 = rg.lambda;
            l2 = worst_inner;
        }
    }
    if (l1) {
        const double d = static_cast<double>(g.size());
        json bound;
        switch (kind) {
            case ZigzagKind::Zigzag:
                bound = to_json(bound_zigzag(*l1, *l2, a.t, d));
                break;
            case ZigzagKind::Derandomised:
                bound = to_json(bound_zigzag_derandomised(*l1, *l2, a.t, d));
                break;
            case ZigzagKind::Generalised: {
                GenZigzagBound gb =
                    bound_genzigzag(*l1, *l2, k, a.t, d, static_cast<double>(a.dprime), a.eps, static_cast<double>(s));
                bound = to_json(gb.bound);
                bound["dprime_threshold"] = gb.dprime_threshold;
                bound["dprime_sufficient"] = gb.dprime_sufficient;
                break;
            }
        }
        bound["lambda1"] = *l1;
        bound["lambda2"] = *l2;
        bound["t"] = a.t;
        report["bound"] = bound;
        if (report.contains("lambda_product")) {
            report["within_bound"] = report["lambda_product"]["lambda"].get<double>() <= bound["value"].get<double>();
        }
    }
    emit_report(report, a.report, a.csv);
    return code;
}

int cmd_certify(const CertifyArgs &a) {
    std::ifstream in(a.config);
    if (!in) {
        throw IoError("cannot open '" + a.config + "'");
    }
    json config = json::parse(in, nullptr, false);
    if (config.is_discarded()) {
        throw ConfigError("config", "'" + a.config + "' is not valid JSON");
    }
    int code = kExitOk;
    std::filesystem::path base = std::filesystem::path(a.config).parent_path();
    json report = run_certify(config, base, code);
    emit_report(report, a.out, a.csv);
    if (code == kExitCheckFailed) {
        for (const auto &f : report["failures"]) std::cerr << "check failed: " << f.get<std::string>() << "\n";
    }
    return code;
}

int fail(int code, const std::string &what) {
    std::cerr << "qtpe: " << what << "\n";
    return code;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum tensor product expanders: sampling, products and spectral certification"};
    app.require_subcommand(1);

    SampleArgs sa;
    auto *sample = app.add_subcommand("sample", "Sample a random Hermitian ensemble of Haar unitaries");
    sample->add_option("--dim", sa.dim, "Unitary dimension")->required()->check(CLI::PositiveNumber);
    sample->add_option("--degree", sa.degree, "Number of unitaries (even, >= 4)")->required();
    sample->add_option("--seed", sa.seed, "Random seed")->required();
    sample->add_option("--out", sa.out, "Ensemble file to write")->required();

    LambdaArgs la;
    auto *lam = app.add_subcommand("lambda", "Compute lambda = ||Phi_t - P_W|| of an ensemble file");
    lam->add_option("path", la.path, "Ensemble file")->required();
    lam->add_option("--t", la.t, "Moment order")->capture_default_str();
    lam->add_option("--method", la.method, "auto | dense | power | lanczos")->capture_default_str();
    lam->add_option("--tol", la.tol, "Solver tolerance (default per method)");
    lam->add_option("--seed", la.seed, "Seed for the iterative start vector")->capture_default_str();
    lam->add_option("--max-iters", la.max_iters, "Iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    lam->add_option("--out", la.out, "Report path (stdout when omitted)");
    lam->add_flag("--csv", la.csv, "Emit the report as path,value CSV");

    ZigzagArgs za;
    auto *zz = app.add_subcommand("zigzag", "Build a zigzag product of ensemble files");
    zz->set_help_flag("--help", "Print this help message and exit");
    zz->add_option("--g", za.g, "Outer ensemble file")->required();
    zz->add_option("--h", za.h, "Inner ensemble file (repeat for the generalised kind)")->required();
    zz->add_option("--kind", za.kind, "zigzag | derandomised | generalised")->capture_default_str();
    zz->add_option("--dprime", za.dprime, "Second inner factor dimension (generalised)")->capture_default_str()
        ->check(CLI::PositiveNumber);
    zz->add_option("--out", za.out, "Product ensemble file to write")->required();
    zz->add_option("--report", za.report, "Report path (stdout when omitted)");
    zz->add_flag("--csv", za.csv, "Emit the report as path,value CSV");
    zz->add_option("--lambda1", za.lambda1, "Outer lambda for the bound");
    zz->add_option("--lambda2", za.lambda2, "Inner lambda for the bound");
    zz->add_flag("--compute-lambda", za.compute_lambda, "Measure lambda of inputs and product");
    zz->add_option("--t", za.t, "Moment order for lambda and bounds")->capture_default_str();
    zz->add_option("--eps", za.eps, "eps-goodness parameter (generalised bound)")->capture_default_str();
    zz->add_option("--method", za.method, "Spectral method for --compute-lambda")->capture_default_str();
    zz->add_option("--tol", za.tol, "Solver tolerance");
    zz->add_option("--seed", za.seed, "Seed for iterative start vectors")->capture_default_str();

    CertifyArgs ca;
    auto *cert = app.add_subcommand("certify", "Run a batch of checks from a JSON config");
    cert->add_option("config", ca.config, "Config file")->required();
    cert->add_option("--out", ca.out, "Report path (stdout when omitted)");
    cert->add_flag("--csv", ca.csv, "Emit the report as path,value CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*sample) return cmd_sample(sa);
        if (*lam) return cmd_lambda(la);
        if (*zz) return cmd_zigzag(za);
        return cmd_certify(ca);
    } catch (const ParseError &e) {
        return fail(kExitIo, e.what());
    } catch (const IoError &e) {
        return fail(kExitIo, e.what());
    } catch (const ConfigError &e) {
        return fail(kExitUsage, e.what());
    } catch (const DomainError &e) {
        return fail(kExitUsage, e.what());
    } catch (const PreconditionError &e) {
        return fail(kExitUsage, e.what());
    } catch (const SizeLimitError &e) {
        return fail(kExitUsage, e.what());
    } catch (const ValidationError &e) {
        return fail(kExitUsage, e.what());
    } catch (const std::filesystem::filesystem_error &e) {
        return fail(kExitIo, e.what());
    }
}
