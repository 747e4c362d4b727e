#include "phasetype/sample_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "phasetype/errors.hpp"
#include "phasetype/format.hpp"

namespace phasetype::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(unquote(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_value(std::string_view field, const std::string& label, std::size_t line_no) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw InvalidParameter(label + ":" + std::to_string(line_no) + ": not a number: '" + std::string(field) + "'");
  }
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidParameter(label + ":" + std::to_string(line_no) + ": value must be finite and >= 0, got " +
                           std::string(field));
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open " + path.string());
  return in;
}

double require_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw InvalidParameter(std::string("parameter record needs numeric '") + key + "'");
  }
  return j.at(key).get<double>();
}

int require_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw InvalidParameter(std::string("parameter record needs integer '") + key + "'");
  }
  return j.at(key).get<int>();
}

}  // namespace

SampleBatch read_samples(std::istream& in, const std::string& label) {
  SampleBatch batch;
  batch.label = label;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    batch.values.push_back(parse_value(t, label, line_no));
  }
  batch.validate();
  return batch;
}

SampleBatch read_samples(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_samples(in, path.string());
}

SampleBatch read_samples_csv(std::istream& in, const std::string& column, const std::string& label) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidParameter(label + ": missing CSV header row");
  const auto header = split_csv(line);
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) col = i;
  }
  if (col == header.size()) throw InvalidParameter(label + ": no column named '" + column + "'");

  SampleBatch batch;
  batch.label = label + ":" + column;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (col >= fields.size()) {
      throw InvalidParameter(label + ":" + std::to_string(line_no) + ": row has too few fields");
    }
    batch.values.push_back(parse_value(fields[col], label, line_no));
  }
  batch.validate();
  return batch;
}

SampleBatch read_samples_csv(const std::filesystem::path& path, const std::string& column) {
  auto in = open_in(path);
  return read_samples_csv(in, column, path.string());
}

void write_samples(std::ostream& out, const SampleBatch& batch) {
  for (double v : batch.values) out << format_double(v) << '\n';
}

void write_samples(const std::filesystem::path& path, const SampleBatch& batch) {
  std::ofstream out(path);
  if (!out) throw InvalidParameter("cannot write " + path.string());
  write_samples(out, batch);
}

nlohmann::json to_json(const Distribution& d) {
  nlohmann::json j;
  j["family"] = family_name(d);
  std::visit(
      [&j](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExpParams>) {
          j["lambda"] = p.lambda();
        } else if constexpr (std::is_same_v<T, ErlangParams>) {
          j["n"] = p.n();
          j["lambda"] = p.lambda();
        } else if constexpr (std::is_same_v<T, RateVector>) {
          j["rates"] = std::vector<double>(p.rates().begin(), p.rates().end());
        } else {
          j["n"] = p.n();
          j["lambda"] = p.lambda();
          j["w"] = p.w();
        }
      },
      d);
  return j;
}

Distribution distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw InvalidParameter("parameter record needs a string 'family'");
  }
  const auto family = j.at("family").get<std::string>();
  if (family == "exp") return ExpParams(require_number(j, "lambda"));
  if (family == "erlang") return ErlangParams(require_int(j, "n"), require_number(j, "lambda"));
  if (family == "eme") return EMEParams(require_int(j, "n"), require_number(j, "lambda"), require_number(j, "w"));
  if (family == "hypo") {
    if (!j.contains("rates") || !j.at("rates").is_array()) throw InvalidParameter("hypo record needs 'rates' array");
    std::vector<double> rates;
    for (const auto& r : j.at("rates")) {
      if (!r.is_number()) throw InvalidParameter("hypo 'rates' must be numbers");
      rates.push_back(r.get<double>());
    }
    return RateVector(std::move(rates));
  }
  throw InvalidParameter("unknown family '" + family + "'");
}

Distribution read_params(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidParameter(path.string() + ": " + e.what());
  }
  return distribution_from_json(j);
}

void write_params(const std::filesystem::path& path, const Distribution& d) {
  std::ofstream out(path);
  if (!out) throw InvalidParameter("cannot write " + path.string());
  out << to_json(d).dump() << '\n';
}

}  // namespace phasetype::io
