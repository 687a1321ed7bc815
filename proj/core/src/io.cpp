#include "lomv/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lomv/error.hpp"

namespace lomv::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') {
    field.remove_prefix(1);
  }
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc{} && ptr == end && !field.empty();
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return fields;
}

std::string line_error(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

double json_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw InputError(std::string("distribution field '") + key +
                     "' must be a number");
  }
  return j.at(key).get<double>();
}

}  // namespace

InstanceRows parse_instance_csv(std::string_view text) {
  InstanceRows rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool first_content = true;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(
        start, nl == std::string_view::npos ? std::string_view::npos
                                            : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) {
      line.remove_prefix(3);
    }
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_commas(line);
    if (first_content) {
      first_content = false;
      if (fields.size() == 2 && trim(fields[0]) == "beta" &&
          trim(fields[1]) == "delta2") {
        continue;
      }
    }
    if (fields.size() != 2) {
      throw InputError(line_error(line_no, "expected 2 fields (beta,delta2), got " +
                                               std::to_string(fields.size())));
    }
    double beta = 0.0;
    double delta2 = 0.0;
    if (!parse_number(fields[0], beta) || !std::isfinite(beta)) {
      throw InputError(line_error(line_no, "beta is not a finite number"));
    }
    if (!parse_number(fields[1], delta2) || !std::isfinite(delta2)) {
      throw InputError(line_error(line_no, "delta2 is not a finite number"));
    }
    if (delta2 <= 0.0) {
      throw InputError(line_error(line_no, "delta2 must be positive"));
    }
    rows.betas.push_back(beta);
    rows.delta2s.push_back(delta2);
  }
  if (rows.betas.empty()) {
    throw InputError("instance has no asset rows");
  }
  return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FactorModel read_instance_csv(const std::filesystem::path& path,
                              double sigma2) {
  InstanceRows rows = parse_instance_csv(read_text_file(path));
  return FactorModel(sigma2, std::move(rows.betas), std::move(rows.delta2s));
}

double read_sigma2_sidecar(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("sigma2") || !j["sigma2"].is_number()) {
    throw InputError(path.string() + ": expected {\"sigma2\": <number>}");
  }
  return j["sigma2"].get<double>();
}

std::vector<double> read_beta_column(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<double> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view field = trim(line);
    if (field.empty()) {
      continue;
    }
    if (out.empty() && line_no == 1 && field == "beta") {
      continue;
    }
    // Only the first column is used.
    field = trim(field.substr(0, field.find(',')));
    double x = 0.0;
    if (!parse_number(field, x) || !std::isfinite(x)) {
      throw InputError(path.string() + ": " +
                       line_error(line_no, "beta is not a finite number"));
    }
    out.push_back(x);
  }
  return out;
}

BetaDistribution parse_distribution_json(std::string_view text,
                                         const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("distribution JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw InputError("distribution JSON needs a string 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "normal") {
    return BetaDistribution::normal(json_number(j, "mu"), json_number(j, "s"));
  }
  if (kind == "uniform") {
    return BetaDistribution::uniform(json_number(j, "a"), json_number(j, "b"));
  }
  if (kind == "discrete") {
    if (!j.contains("atoms") || !j["atoms"].is_array()) {
      throw InputError("discrete distribution needs an 'atoms' array");
    }
    std::vector<Atom> atoms;
    for (const auto& a : j["atoms"]) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() ||
          !a[1].is_number()) {
        throw InputError("each atom must be [location, mass]");
      }
      atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return BetaDistribution::discrete(std::move(atoms));
  }
  if (kind == "empirical") {
    if (!j.contains("path") || !j["path"].is_string()) {
      throw InputError("empirical distribution needs a 'path'");
    }
    std::filesystem::path p = j["path"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) {
      p = base_dir / p;
    }
    const auto samples = read_beta_column(p);
    return BetaDistribution::empirical(samples);
  }
  throw InputError("unsupported distribution kind '" + kind + "'");
}

BetaDistribution read_distribution_json(const std::filesystem::path& path) {
  return parse_distribution_json(read_text_file(path), path.parent_path());
}

std::string format_double(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

}  // namespace lomv::io
