#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lomv/distribution.hpp"
#include "lomv/model.hpp"

namespace lomv::io {

/// Rows of an instance CSV (`beta,delta2`, header optional).
struct InstanceRows {
  std::vector<double> betas;
  std::vector<double> delta2s;
};

/// Parses instance CSV text. Errors carry the 1-based line number and are
/// thrown as InputError; a delta2 <= 0 is reported here, not deferred to
/// FactorModel.
[[nodiscard]] InstanceRows parse_instance_csv(std::string_view text);

[[nodiscard]] FactorModel read_instance_csv(const std::filesystem::path& path,
                                            double sigma2);

/// Reads `{ "sigma2": <float> }`.
[[nodiscard]] double read_sigma2_sidecar(const std::filesystem::path& path);

/// Parses a distribution spec:
///   {"kind":"normal","mu":1.0,"s":0.4}
///   {"kind":"discrete","atoms":[[-1,0.05],[1,0.15],[2,0.30],[5,0.50]]}
///   {"kind":"uniform","a":0.5,"b":1.5}
///   {"kind":"empirical","path":"betas.csv"}
/// Relative empirical paths resolve against `base_dir`.
[[nodiscard]] BetaDistribution parse_distribution_json(
    std::string_view text, const std::filesystem::path& base_dir = {});

[[nodiscard]] BetaDistribution read_distribution_json(
    const std::filesystem::path& path);

/// Single-column CSV of betas (header `beta` optional).
[[nodiscard]] std::vector<double> read_beta_column(
    const std::filesystem::path& path);

/// Shortest decimal text that round-trips to the same double.
[[nodiscard]] std::string format_double(double x);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace lomv::io
