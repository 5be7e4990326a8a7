#pragma once

// File formats shared by the CLI: JSON note lists, numeric CSV matrices and
// raw audio samples.

#include "perfkit/core.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace perfkit::io {

using Json = nlohmann::ordered_json;

// {"notes":[{"pitch":int,"onset":float,"offset":float,"velocity":int},...]}
Json notes_to_json(const NoteList& notes);
NoteList notes_from_json(const Json& doc);

NoteList read_notes(const std::filesystem::path& path);
void write_notes(const std::filesystem::path& path, const NoteList& notes);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);

// Numeric CSV, one row per line. A first line that does not parse as
// numbers is treated as a header and skipped. Rows must share a width.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);
std::string csv_from_matrix(const Eigen::MatrixXd& m);
void write_text(const std::filesystem::path& path, const std::string& text);

// Mono samples: a CSV with one value per line (or per cell), or 16-bit
// little-endian PCM for any other extension. PCM values are scaled to
// [-1, 1).
std::vector<double> read_audio(const std::filesystem::path& path);

}  // namespace perfkit::io
