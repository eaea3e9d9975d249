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


#ifndef QTPE_TOOLS_CLI_SUPPORT_HPP
#define QTPE_TOOLS_CLI_SUPPORT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtpe/ensemble.hpp"
#include "qtpe/moment.hpp"

namespace qtpe::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitUsage = 2,
    kExitNonConvergence = 3,
    kExitIo = 4,
};

/// Bad configuration value; the message carries the field path.
class ConfigError : public std::invalid_argument {
   public:
    ConfigError(const std::string &path, const std::string &what)
        : std::invalid_argument("config error at " + path + ": " + what), path_(path) {}
    const std::string &path() const noexcept { return path_; }

   private:
    std::string path_;
};

/// Flattens a report into "path,value" rows (JSON pointer paths, sorted keys).
std::string to_csv(const nlohmann::json &report);

/// Serialises the report as JSON or CSV to `out`, or to stdout when empty.
void emit_report(const nlohmann::json &report, const std::string &out, bool csv);

/// Sidecar provenance of an ensemble file, or null when there is none.
nlohmann::json read_provenance(const std::filesystem::path &path);

struct BoundReference {
    double value = 0.0;
    std::vector<std::string> flags;
};

/// 8 / sqrt(s) for a random-qtpe ensemble, with the hypotheses that fail for
/// (d, s, t) named in `flags`.
BoundReference random_qtpe_reference(Index d, Index s, int t);

/// Loads an ensemble and rejects it unless validate() passes at `tol`.
UnitaryEnsemble load_validated(const std::filesystem::path &path, double tol = 1e-8);

/// Spectral report plus the bound reference fields.
nlohmann::json lambda_json(const SpectralReport &r, const std::optional<BoundReference> &ref);

/// Runs the certify batch. Returns the consolidated report; `exit_code` is set
/// to 0, 1 (hard check failed) or 3 (non-convergence).
nlohmann::json run_certify(const nlohmann::json &config, const std::filesystem::path &base_dir, int &exit_code);

}  // namespace qtpe::cli

#endif
