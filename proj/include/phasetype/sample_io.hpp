#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "phasetype/distributions.hpp"

namespace phasetype::io {

// Sample files come in two shapes:
//   plain text  one nonnegative decimal per line; blank lines and lines
//               starting with '#' are skipped
//   CSV         comma-separated with a header row; one named column is read
// Parse failures throw InvalidParameter naming the file and line.

SampleBatch read_samples(std::istream& in, const std::string& label);
SampleBatch read_samples(const std::filesystem::path& path);
SampleBatch read_samples_csv(std::istream& in, const std::string& column, const std::string& label);
SampleBatch read_samples_csv(const std::filesystem::path& path, const std::string& column);

/// Writes one value per line in shortest round-trip form.
void write_samples(std::ostream& out, const SampleBatch& batch);
void write_samples(const std::filesystem::path& path, const SampleBatch& batch);

// Parameter records are JSON objects
//   {"family": "exp"|"erlang"|"hypo"|"eme", "n": int, "lambda": real,
//    "w": real, "rates": [real, ...]}
// carrying only the keys the family uses.
nlohmann::json to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j);
Distribution read_params(const std::filesystem::path& path);
void write_params(const std::filesystem::path& path, const Distribution& d);

}  // namespace phasetype::io
