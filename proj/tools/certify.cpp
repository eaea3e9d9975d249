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
#include <map>
#include <tuple>

#include "cli_support.hpp"
#include "qtpe/epsgood.hpp"
#include "qtpe/error.hpp"
#include "qtpe/zigzag.hpp"

namespace qtpe::cli {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSampleStream = 0x53414d50;
constexpr std::uint64_t kLambdaStream = 0x4c414d42;
constexpr std::uint64_t kEpsgoodStream = 0x45505347;
constexpr Index kMaxDesignTuples = 4096;

std::string field(const std::string &path, const std::string &key) { return path + "." + key; }

const json &require(const json &obj, const std::string &path, const std::string &key) {
    if (!obj.is_object()) {
        throw ConfigError(path, "expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError(field(path, key), "missing");
    }
    return *it;
}

std::int64_t get_int(const json &obj, const std::string &path, const std::string &key,
                     std::optional<std::int64_t> fallback, std::int64_t lo, std::int64_t hi) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(field(path, key), "missing");
    }
    const json &v = obj.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(field(path, key), "expected an integer");
    }
    std::int64_t x = v.get<std::int64_t>();
    if (x < lo || x > hi) {
        throw ConfigError(field(path, key),
                          std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return x;
}

std::uint64_t get_seed(const json &obj, const std::string &path, const std::string &key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json &v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ConfigError(field(path, key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

double get_double(const json &obj, const std::string &path, const std::string &key, std::optional<double> fallback,
                  double lo, double hi) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(field(path, key), "missing");
    }
    const json &v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(field(path, key), "expected a number");
    }
    double x = v.get<double>();
    if (!(x >= lo && x <= hi)) {
        throw ConfigError(field(path, key), "value outside [" + json(lo).dump() + ", " + json(hi).dump() + "]");
    }
    return x;
}

std::string get_string(const json &obj, const std::string &path, const std::string &key,
                       std::optional<std::string> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(field(path, key), "missing");
    }
    const json &v = obj.at(key);
    if (!v.is_string()) {
        throw ConfigError(field(path, key), "expected a string");
    }
    return v.get<std::string>();
}

template <typename F>
auto as_config(const std::string &path, F &&f) {
    try {
        return f();
    } catch (const DomainError &e) {
        throw ConfigError(path, e.what());
    } catch (const PreconditionError &e) {
        throw ConfigError(path, e.what());
    } catch (const SizeLimitError &e) {
        throw ConfigError(path, e.what());
    }
}

struct EnsembleSpec {
    std::string name;
    std::string source;
    std::string path;  // config path, e.g. ensembles[1]
    Index dim = 0;
    Index degree = 0;
    std::uint64_t seed = 0;
    std::filesystem::path file;
    std::string g;
    std::vector<std::string> h;
    ZigzagKind kind = ZigzagKind::Zigzag;
    Index dprime = 1;
};

struct Built {
    EnsembleSpec spec;
    UnitaryEnsemble ensemble;
    std::optional<BoundReference> reference_base;  // random-qtpe ensembles: (d, s) known
    json provenance;
};

struct LambdaSettings {
    SpectralMethod method = SpectralMethod::Auto;
    double tol = -1.0;
    int max_iters = 5000;
};

LambdaSettings read_lambda_settings(const json &step, const std::string &path) {
    LambdaSettings s;
    std::string m = get_string(step, path, "method", std::string("auto"));
    s.method = as_config(field(path, "method"), [&] { return spectral_method_from_string(m); });
    s.tol = step.contains("tol") ? get_double(step, path, "tol", std::nullopt, 1e-15, 1.0) : -1.0;
    s.max_iters = static_cast<int>(get_int(step, path, "max_iters", 5000, 1, 1'000'000));
    return s;
}

class Runner {
   public:
    Runner(const json &config, std::filesystem::path base_dir) : config_(config), base_dir_(std::move(base_dir)) {}

    json run(int &exit_code);

   private:
    void parse_ensembles();
    void build_ensembles();
    std::size_t ensemble_index(const json &step, const std::string &path, const std::string &key) const;
    const SpectralReport &lambda_of(const Built &b, int t, const LambdaSettings &s, const std::string &path);
    json lambda_entry(const Built &b, const SpectralReport &r, int t);

    json step_lambda(const json &step, const std::string &path);
    json step_zigzag_bound(const json &step, const std::string &path);
    json step_closeness(const json &step, const std::string &path);
    json step_design_error(const json &step, const std::string &path);
    json step_epsgood(const json &step, const std::string &path, std::size_t index);

    json run_step(const json &step, std::size_t index);
    void check(json &report, const std::string &name, bool pass, json detail = json::object());

    const json &config_;
    std::filesystem::path base_dir_;
    std::uint64_t seed_ = 0;
    std::vector<EnsembleSpec> specs_;
    std::vector<Built> built_;
    std::map<std::string, std::size_t> by_name_;
    std::map<std::tuple<std::size_t, int, int, double, int>, SpectralReport> lambda_cache_;
    bool nonconverged_ = false;
    bool dry_ = false;
};

void Runner::check(json &report, const std::string &name, bool pass, json detail) {
    detail["name"] = name;
    detail["pass"] = pass;
    report["checks"].push_back(std::move(detail));
    if (!pass) report["pass"] = false;
}

void Runner::parse_ensembles() {
    const json &list = require(config_, "config", "ensembles");
    if (!list.is_array()) {
        throw ConfigError("ensembles", "expected an array");
    }
    for (std::size_t i = 0; i < list.size(); i++) {
        const std::string path = "ensembles[" + std::to_string(i) + "]";
        const json &node = list[i];
        EnsembleSpec spec;
        spec.path = path;
        spec.name = get_string(node, path, "name");
        if (by_name_.count(spec.name)) {
            throw ConfigError(field(path, "name"), "duplicate ensemble name '" + spec.name + "'");
        }
        spec.source = get_string(node, path, "source");
        if (spec.source == "sample") {
            spec.dim = get_int(node, path, "dim", std::nullopt, 1, 4096);
            spec.degree = get_int(node, path, "degree", std::nullopt, 4, kMaxEnsembleSize);
            if (spec.degree % 2 != 0) {
                throw ConfigError(field(path, "degree"), "degree must be even and at least 4");
            }
            SeededRng stream(seed_, kSampleStream + i);
            spec.seed = get_seed(node, path, "seed", stream.next_u64());
        } else if (spec.source == "file") {
            std::filesystem::path p = get_string(node, path, "path");
            spec.file = p.is_absolute() ? p : base_dir_ / p;
        } else if (spec.source == "zigzag") {
            spec.kind = as_config(field(path, "kind"),
                                  [&] { return zigzag_kind_from_string(get_string(node, path, "kind", "zigzag")); });
            spec.g = get_string(node, path, "g");
            if (!by_name_.count(spec.g)) {
                throw ConfigError(field(path, "g"), "unknown or later ensemble '" + spec.g + "'");
            }
            const json &h = require(node, path, "h");
            if (h.is_string()) {
                spec.h.push_back(h.get<std::string>());
            } else if (h.is_array() && !h.empty()) {
                for (std::size_t j = 0; j < h.size(); j++) {
                    if (!h[j].is_string()) {
                        throw ConfigError(field(path, "h") + "[" + std::to_string(j) + "]", "expected a string");
                    }
                    spec.h.push_back(h[j].get<std::string>());
                }
            } else {
                throw ConfigError(field(path, "h"), "expected a name or a nonempty array of names");
            }
            for (std::size_t j = 0; j < spec.h.size(); j++) {
                if (!by_name_.count(spec.h[j])) {
                    throw ConfigError(field(path, "h"), "unknown or later ensemble '" + spec.h[j] + "'");
                }
            }
            if (spec.kind != ZigzagKind::Generalised && spec.h.size() != 1) {
                throw ConfigError(field(path, "h"), "this kind takes exactly one inner ensemble");
            }
            if (spec.kind == ZigzagKind::Generalised) {
                spec.dprime = get_int(node, path, "dprime", std::nullopt, 1, 4096);
            }
        } else {
            throw ConfigError(field(path, "source"), "expected 'sample', 'file' or 'zigzag', got '" + spec.source + "'");
        }
        by_name_[spec.name] = i;
        specs_.push_back(std::move(spec));
    }
}

void Runner::build_ensembles() {
    for (const EnsembleSpec &spec : specs_) {
        if (spec.source == "sample") {
            SeededRng rng(spec.seed);
            UnitaryEnsemble e = sample_random_qtpe(spec.dim, spec.degree, rng).with_label(spec.name);
            json prov = {{"kind", "random-qtpe"}, {"dim", spec.dim}, {"degree", spec.degree}, {"seed", spec.seed}};
            built_.push_back({spec, std::move(e), BoundReference{}, prov});
        } else if (spec.source == "file") {
            UnitaryEnsemble e = load_validated(spec.file);
            json prov = read_provenance(spec.file);
            std::optional<BoundReference> ref;
            if (prov.is_object() && prov.value("kind", "") == "random-qtpe") {
                ref = BoundReference{};
            }
            built_.push_back({spec, std::move(e), ref, prov});
        } else {
            const UnitaryEnsemble &g = built_[by_name_.at(spec.g)].ensemble;
            std::vector<UnitaryEnsemble> hs;
            for (const auto &name : spec.h) hs.push_back(built_[by_name_.at(name)].ensemble);
            UnitaryEnsemble e = as_config(spec.path, [&] {
                switch (spec.kind) {
                    case ZigzagKind::Zigzag:
                        return zigzag(g, hs.front());
                    case ZigzagKind::Derandomised:
                        return zigzag_derandomised(g, hs.front());
                    case ZigzagKind::Generalised:
                        break;
                }
                return zigzag_generalised(g, hs, spec.dprime);
            });
            json prov = {{"kind", std::string(to_string(spec.kind))}, {"g", spec.g}, {"h", spec.h}};
            built_.push_back({spec, e.with_label(spec.name), std::nullopt, prov});
        }
    }
}

std::size_t Runner::ensemble_index(const json &step, const std::string &path, const std::string &key) const {
    std::string name = get_string(step, path, key);
    auto it = by_name_.find(name);
    if (it == by_name_.end()) {
        throw ConfigError(field(path, key), "unknown ensemble '" + name + "'");
    }
    return it->second;
}

const SpectralReport &Runner::lambda_of(const Built &b, int t, const LambdaSettings &s, const std::string &path) {
    std::size_t index = by_name_.at(b.spec.name);
    auto key = std::make_tuple(index, t, static_cast<int>(s.method), s.tol, s.max_iters);
    auto it = lambda_cache_.find(key);
    if (it != lambda_cache_.end()) return it->second;
    LambdaOptions opts;
    opts.method = s.method;
    opts.tol = s.tol;
    opts.max_iters = s.max_iters;
    opts.seed = SeededRng(seed_, kLambdaStream + index).derive(static_cast<std::uint64_t>(t)).next_u64();
    SpectralReport r = as_config(path, [&] { return lambda(b.ensemble, t, opts); });
    if (!r.converged) nonconverged_ = true;
    return lambda_cache_.emplace(key, r).first->second;
}

json Runner::lambda_entry(const Built &b, const SpectralReport &r, int t) {
    std::optional<BoundReference> ref;
    if (b.reference_base) {
        ref = random_qtpe_reference(b.ensemble.dim(), b.ensemble.size(), t);
    }
    return lambda_json(r, ref);
}

json Runner::step_lambda(const json &step, const std::string &path) {
    std::size_t bi = ensemble_index(step, path, "ensemble");
    int t = static_cast<int>(get_int(step, path, "t", 1, 1, kMaxLambdaT));
    LambdaSettings s = read_lambda_settings(step, path);
    std::optional<double> max_lambda;
    if (step.contains("max_lambda")) max_lambda = get_double(step, path, "max_lambda", std::nullopt, 0.0, 1e9);
    if (dry_) return {};
    const Built &b = built_[bi];
    const SpectralReport &r = lambda_of(b, t, s, path);
    json out = {{"ensemble", b.spec.name}, {"lambda", lambda_entry(b, r, t)}};
    check(out, "converged", r.converged);
    if (max_lambda) {
        check(out, "lambda <= max_lambda", r.lambda <= *max_lambda, {{"value", r.lambda}, {"limit", *max_lambda}});
    }
    return out;
}

json Runner::step_zigzag_bound(const json &step, const std::string &path) {
    std::size_t pi = ensemble_index(step, path, "product");
    const EnsembleSpec &spec = specs_[pi];
    if (spec.source != "zigzag") {
        throw ConfigError(field(path, "product"), "ensemble '" + spec.name + "' is not a zigzag product");
    }
    int t = static_cast<int>(get_int(step, path, "t", 1, 1, kMaxLambdaT));
    LambdaSettings s = read_lambda_settings(step, path);
    double slack = get_double(step, path, "slack", 1e-6, 0.0, 1.0);
    double eps = 0.0;
    if (spec.kind == ZigzagKind::Generalised) eps = get_double(step, path, "eps", std::nullopt, 0.0, 1.0);
    if (dry_) return {};
    const Built &p = built_[pi];

    const Built &g = built_[by_name_.at(p.spec.g)];
    const SpectralReport &rg = lambda_of(g, t, s, path);
    double l2 = 0.0;
    json inner = json::array();
    bool converged = rg.converged;
    for (const auto &name : p.spec.h) {
        const Built &h = built_[by_name_.at(name)];
        const SpectralReport &rh = lambda_of(h, t, s, path);
        l2 = std::max(l2, rh.lambda);
        converged = converged && rh.converged;
        inner.push_back(lambda_entry(h, rh, t));
    }
    const SpectralReport &rp = lambda_of(p, t, s, path);
    converged = converged && rp.converged;

    const Index sdeg = built_[by_name_.at(p.spec.h.front())].ensemble.size();
    const double d = static_cast<double>(g.ensemble.size());
    Index expected = 0;
    json bound;
    bool vacuous = false;
    double bound_value = 0.0;
    switch (p.spec.kind) {
        case ZigzagKind::Zigzag: {
            expected = sdeg * sdeg;
            BoundResult br = bound_zigzag(rg.lambda, l2, t, d);
            bound = to_json(br);
            bound_value = br.value;
            vacuous = br.vacuous();
            break;
        }
        case ZigzagKind::Derandomised: {
            expected = sdeg * sdeg * sdeg;
            BoundResult br = bound_zigzag_derandomised(rg.lambda, l2, t, d);
            bound = to_json(br);
            bound_value = br.value;
            vacuous = br.vacuous();
            break;
        }
        case ZigzagKind::Generalised: {
            int k = static_cast<int>(p.spec.h.size());
            expected = checked_pow(sdeg, k, kMaxEnsembleSize);
            GenZigzagBound gb = bound_genzigzag(rg.lambda, l2, k, t, d, static_cast<double>(p.spec.dprime), eps,
                                                static_cast<double>(sdeg));
            bound = to_json(gb.bound);
            bound["dprime_threshold"] = gb.dprime_threshold;
            bound["dprime_sufficient"] = gb.dprime_sufficient;
            bound_value = gb.bound.value;
            vacuous = gb.bound.vacuous();
            break;
        }
    }
    json out = {{"product", p.spec.name},
                {"kind", std::string(to_string(p.spec.kind))},
                {"t", t},
                {"member_count", p.ensemble.size()},
                {"expected_member_count", expected},
                {"lambda_outer", lambda_entry(g, rg, t)},
                {"lambda_inner", inner},
                {"lambda_product", lambda_entry(p, rp, t)},
                {"bound", bound},
                {"vacuous", vacuous}};
    check(out, "converged", converged);
    check(out, "member_count", p.ensemble.size() == expected,
          {{"value", p.ensemble.size()}, {"expected", expected}});
    check(out, "lambda <= bound", rp.lambda <= bound_value + slack,
          {{"value", rp.lambda}, {"limit", bound_value}, {"slack", slack}});
    return out;
}

json Runner::step_closeness(const json &step, const std::string &path) {
    Index outer = get_int(step, path, "outer_dim", std::nullopt, 1, 64);
    Index inner = get_int(step, path, "inner_dim", std::nullopt, 1, 64);
    int t = static_cast<int>(get_int(step, path, "t", std::nullopt, 1, 3));
    if (dry_) return {};
    ClosenessReport r = as_config(path, [&] { return subspace_closeness_report(outer, inner, t); });
    json out = {{"closeness", to_json(r)}};
    check(out, "claim1", r.claim1);
    check(out, "claim2", r.claim2);
    check(out, "claim3", r.claim3);
    check(out, "claim4", r.claim4);
    return out;
}

json Runner::step_design_error(const json &step, const std::string &path) {
    std::size_t bi = ensemble_index(step, path, "ensemble");
    int t = static_cast<int>(get_int(step, path, "t", 1, 1, kMaxLambdaT));
    LambdaSettings s = read_lambda_settings(step, path);
    double slack = get_double(step, path, "slack", 1e-9, 0.0, 1.0);
    std::vector<int> ks = {1, 2, 3};
    if (step.contains("k")) {
        const json &kv = step.at("k");
        if (!kv.is_array() || kv.empty()) {
            throw ConfigError(field(path, "k"), "expected a nonempty array of integers");
        }
        ks.clear();
        for (std::size_t i = 0; i < kv.size(); i++) {
            std::string kp = field(path, "k") + "[" + std::to_string(i) + "]";
            if (!kv[i].is_number_integer() || kv[i].get<std::int64_t>() < 1 || kv[i].get<std::int64_t>() > 16) {
                throw ConfigError(kp, "expected an integer in [1, 16]");
            }
            ks.push_back(kv[i].get<int>());
        }
    }
    if (dry_) return {};
    const Built &b = built_[bi];
    const Index n = b.ensemble.dim();
    const Index tuples = as_config(path, [&] { return checked_pow(n, t, kMaxDesignTuples); });
    const SpectralReport &r = lambda_of(b, t, s, path);

    json rows = json::array();
    bool ok = true;
    double worst_margin = -1.0;
    std::vector<Index> row(static_cast<size_t>(t)), col(static_cast<size_t>(t));
    auto unpack = [&](Index code, std::vector<Index> &out) {
        for (int p = t - 1; p >= 0; p--) {
            out[static_cast<size_t>(p)] = code % n;
            code /= n;
        }
    };
    for (int k : ks) {
        double limit = std::pow(r.lambda, k) + slack;
        double worst = 0.0;
        for (Index i = 0; i < tuples; i++) {
            unpack(i, row);
            for (Index j = 0; j < tuples; j++) {
                unpack(j, col);
                worst = std::max(worst, design_error_monomial(b.ensemble, t, k, row, col));
            }
        }
        ok = ok && worst <= limit;
        worst_margin = std::max(worst_margin, worst - limit);
        rows.push_back({{"k", k}, {"max_error", worst}, {"limit", limit}, {"pass", worst <= limit}});
    }
    json out = {{"ensemble", b.spec.name}, {"t", t}, {"lambda", lambda_entry(b, r, t)}, {"table", rows}};
    check(out, "converged", r.converged);
    check(out, "error <= lambda^k", ok, {{"worst_margin", worst_margin}});
    return out;
}

json Runner::step_epsgood(const json &step, const std::string &path, std::size_t index) {
    Index d = get_int(step, path, "d", std::nullopt, 2, 64);
    Index dprime = get_int(step, path, "dprime", std::nullopt, 1, 1024);
    double eps = get_double(step, path, "eps", std::nullopt, 0.0, 1.0);
    std::string mode = get_string(step, path, "mode", std::string("vector"));
    int k = static_cast<int>(get_int(step, path, "k", 2, 1, 8));
    std::int64_t trials = get_int(step, path, "trials", 100, 1, 1'000'000);
    std::optional<std::int64_t> budget;
    if (step.contains("budget")) budget = get_int(step, path, "budget", std::nullopt, 1, 1'000'000'000);
    std::optional<double> min_rate;
    if (step.contains("min_accept_rate")) min_rate = get_double(step, path, "min_accept_rate", std::nullopt, 0.0, 1.0);
    if (mode != "vector" && mode != "set" && mode != "tuple") {
        throw ConfigError(field(path, "mode"), "expected 'vector', 'set' or 'tuple', got '" + mode + "'");
    }
    const Index n = as_config(path, [&] { return checked_pow(d * dprime, 1, 4096); });
    if (dry_) return {};

    SeededRng rng(seed_, kEpsgoodStream + index);
    std::int64_t accepted = 0;
    for (std::int64_t trial = 0; trial < trials; trial++) {
        bool good = false;
        if (mode == "vector") {
            CMatrix u = haar_unitary(n, rng);
            CVector x = haar_unitary(n, rng).col(0);
            good = is_good_for_vector(u, x, d, dprime, eps).good;
        } else if (mode == "set") {
            CMatrix u = haar_unitary(n, rng);
            std::vector<CVector> basis;
            for (Index i = 0; i < n; i++) basis.push_back(CVector::Unit(n, i));
            good = is_good_for_set(u, basis, d, dprime, eps).good;
        } else {
            std::vector<CMatrix> us;
            for (int j = 0; j < k; j++) us.push_back(haar_unitary(n, rng));
            TupleMode tm = budget ? TupleMode::sampled(static_cast<std::uint64_t>(*budget), rng.next_u64())
                                  : TupleMode::exhaustive();
            good = as_config(path, [&] { return is_tuple_good(us, d, dprime, eps, tm); }).good;
        }
        if (good) accepted++;
    }
    double rate = static_cast<double>(accepted) / static_cast<double>(trials);
    json out = {{"d", d},        {"dprime", dprime},     {"eps", eps},    {"mode", mode},
                {"trials", trials}, {"accepted", accepted}, {"accept_rate", rate}};
    if (mode == "tuple") out["k"] = k;
    if (min_rate) {
        check(out, "accept_rate >= min_accept_rate", rate >= *min_rate, {{"value", rate}, {"limit", *min_rate}});
    }
    return out;
}

json Runner::run_step(const json &step, std::size_t index) {
    const std::string path = "steps[" + std::to_string(index) + "]";
    const std::string type = get_string(step, path, "type");
    if (type == "lambda") return step_lambda(step, path);
    if (type == "zigzag_bound") return step_zigzag_bound(step, path);
    if (type == "closeness") return step_closeness(step, path);
    if (type == "design_error") return step_design_error(step, path);
    if (type == "epsgood") return step_epsgood(step, path, index);
    throw ConfigError(field(path, "type"), "unknown step type '" + type + "'");
}

json Runner::run(int &exit_code) {
    if (!config_.is_object()) {
        throw ConfigError("config", "expected a JSON object");
    }
    std::int64_t version = get_int(config_, "config", "schema_version", std::nullopt, 1, 1);
    seed_ = get_seed(config_, "config", "seed", 0);
    parse_ensembles();

    const json &steps = require(config_, "config", "steps");
    if (!steps.is_array()) {
        throw ConfigError("steps", "expected an array");
    }
    dry_ = true;
    for (std::size_t i = 0; i < steps.size(); i++) {
        run_step(steps[i], i);
    }
    dry_ = false;
    build_ensembles();

    json report;
    report["schema_version"] = 1;
    report["command"] = "certify";
    report["config_schema_version"] = version;
    report["seed"] = seed_;
    report["ensembles"] = json::array();
    for (const Built &b : built_) {
        report["ensembles"].push_back({{"name", b.spec.name},
                                       {"source", b.spec.source},
                                       {"dim", b.ensemble.dim()},
                                       {"count", b.ensemble.size()},
                                       {"explicitly_hermitian", b.ensemble.explicitly_hermitian()},
                                       {"provenance", b.provenance}});
    }
    report["steps"] = json::array();
    json failures = json::array();
    for (std::size_t i = 0; i < steps.size(); i++) {
        std::string path = "steps[" + std::to_string(i) + "]";
        std::string type = steps[i].at("type").get<std::string>();
        json out = run_step(steps[i], i);
        if (!out.contains("checks")) out["checks"] = json::array();
        if (!out.contains("pass")) out["pass"] = true;
        for (const json &c : out["checks"]) {
            if (!c["pass"].get<bool>()) failures.push_back(path + ": " + c["name"].get<std::string>());
        }
        json entry = {{"index", i}, {"type", type}};
        entry.update(out);
        report["steps"].push_back(std::move(entry));
    }
    report["failures"] = failures;
    report["pass"] = failures.empty();
    exit_code = nonconverged_ ? kExitNonConvergence : (failures.empty() ? kExitOk : kExitCheckFailed);
    return report;
}

}  // namespace

json run_certify(const json &config, const std::filesystem::path &base_dir, int &exit_code) {
    Runner runner(config, base_dir);
    return runner.run(exit_code);
}

}  // namespace qtpe::cli
