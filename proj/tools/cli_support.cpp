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


#include "cli_support.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qtpe/error.hpp"

namespace qtpe::cli {

namespace {

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string to_csv(const nlohmann::json &report) {
    std::ostringstream out;
    out << "path,value\n";
    nlohmann::json flat = report.flatten();
    for (auto it = flat.begin(); it != flat.end(); ++it) {
        std::string value = it->is_string() ? it->get<std::string>() : it->dump();
        out << csv_field(it.key()) << ',' << csv_field(value) << '\n';
    }
    return out.str();
}

void emit_report(const nlohmann::json &report, const std::string &out, bool csv) {
    std::string text = csv ? to_csv(report) : report.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(out, std::ios::trunc);
    if (!f) {
        throw IoError("cannot open '" + out + "' for writing");
    }
    f << text;
    if (!f) {
        throw IoError("failed writing '" + out + "'");
    }
}

nlohmann::json read_provenance(const std::filesystem::path &path) {
    auto side = sidecar_path(path);
    if (!std::filesystem::exists(side)) {
        return nullptr;
    }
    std::ifstream in(side);
    auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("provenance")) {
        return nullptr;
    }
    return doc["provenance"];
}

BoundReference random_qtpe_reference(Index d, Index s, int t) {
    BoundReference ref;
    ref.value = 8.0 / std::sqrt(static_cast<double>(s));
    if (s < 4) ref.flags.emplace_back("s < 4");
    if (s % 2 != 0) ref.flags.emplace_back("s odd");
    if (d < 100) ref.flags.emplace_back("d < 100");
    double dd = static_cast<double>(d);
    if (d < 2 || t > std::pow(dd, 1.0 / 6.0) / (10.0 * std::log(dd))) {
        ref.flags.emplace_back("t > d^(1/6) / (10 ln d)");
    }
    return ref;
}

UnitaryEnsemble load_validated(const std::filesystem::path &path, double tol) {
    UnitaryEnsemble e = load(path);
    ValidationReport v = validate(e, tol);
    if (!v.pass) {
        throw ValidationError("'" + path.string() + "' failed validation: " + v.message);
    }
    return e;
}

nlohmann::json lambda_json(const SpectralReport &r, const std::optional<BoundReference> &ref) {
    nlohmann::json j = to_json(r);
    if (ref) {
        j["bound_reference"] = ref->value;
        j["bound_reference_flags"] = ref->flags;
        j["below_bound_reference"] = r.lambda < ref->value;
    }
    return j;
}

}  // namespace qtpe::cli
