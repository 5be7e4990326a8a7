#include "perfkit/io.hpp"

#include "perfkit/error.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace perfkit::io {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path, std::ios::openmode mode = {})
{
    std::ifstream in(path, std::ios::in | mode);
    if (!in)
        throw DataError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool parse_number(std::string_view text, double& out)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (text.empty())
        return false;
    if (text.front() == '+')
        text.remove_prefix(1);
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

// Splits on commas; returns false if any cell is not a number.
bool parse_row(const std::string& line, std::vector<double>& row)
{
    row.clear();
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        const auto cell = std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        double v = 0.0;
        if (!parse_number(cell, v))
            return false;
        row.push_back(v);
        if (comma == std::string::npos)
            return true;
        start = comma + 1;
    }
}

}  // namespace

Json notes_to_json(const NoteList& notes)
{
    Json arr = Json::array();
    for (const auto& n : notes) {
        Json j;
        j["pitch"] = n.pitch;
        j["onset"] = n.onset;
        j["offset"] = n.offset;
        j["velocity"] = n.velocity;
        arr.push_back(std::move(j));
    }
    Json doc;
    doc["notes"] = std::move(arr);
    return doc;
}

NoteList notes_from_json(const Json& doc)
{
    if (!doc.is_object() || !doc.contains("notes") || !doc["notes"].is_array())
        throw DataError("note list JSON must be an object with a \"notes\" array");
    std::vector<NoteEvent> notes;
    notes.reserve(doc["notes"].size());
    for (const auto& j : doc["notes"]) {
        try {
            NoteEvent n;
            n.pitch = j.at("pitch").get<int>();
            n.onset = j.at("onset").get<double>();
            n.offset = j.at("offset").get<double>();
            n.velocity = j.at("velocity").get<int>();
            notes.push_back(n);
        } catch (const Json::exception& e) {
            throw DataError(std::string("malformed note entry: ") + e.what());
        }
    }
    return NoteList(std::move(notes));
}

NoteList read_notes(const fs::path& path)
{
    const auto doc = read_json(path);
    try {
        return notes_from_json(doc);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_notes(const fs::path& path, const NoteList& notes)
{
    write_json(path, notes_to_json(notes));
}

Json read_json(const fs::path& path)
{
    const auto text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw DataError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const Json& doc)
{
    write_text(path, doc.dump(2) + "\n");
}

Eigen::MatrixXd read_csv_matrix(const fs::path& path)
{
    std::istringstream in(read_file(path));
    std::vector<std::vector<double>> rows;
    std::vector<double> row;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        if (!parse_row(line, row)) {
            if (first) {
                first = false;
                continue;
            }
            throw DataError("non-numeric CSV row in " + path.string() + ": " + line);
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError("ragged CSV rows in " + path.string());
        rows.push_back(row);
    }
    if (rows.empty())
        return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    return m;
}

std::string csv_from_matrix(const Eigen::MatrixXd& m)
{
    std::ostringstream out;
    out << std::setprecision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c)
                out << ',';
            out << m(r, c);
        }
        out << '\n';
    }
    return out.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::out | std::ios::trunc | std::ios::binary);
    if (!out)
        throw DataError("cannot write file: " + path.string());
    out << text;
    if (!out)
        throw DataError("failed writing file: " + path.string());
}

std::vector<double> read_audio(const fs::path& path)
{
    if (path.extension() == ".csv") {
        const auto m = read_csv_matrix(path);
        std::vector<double> samples;
        samples.reserve(static_cast<std::size_t>(m.size()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                samples.push_back(m(r, c));
        return samples;
    }
    const auto bytes = read_file(path, std::ios::binary);
    if (bytes.size() % 2 != 0)
        throw DataError("16-bit PCM file has an odd byte count: " + path.string());
    std::vector<double> samples(bytes.size() / 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto lo = static_cast<std::uint8_t>(bytes[2 * i]);
        const auto hi = static_cast<std::uint8_t>(bytes[2 * i + 1]);
        const auto v = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
        samples[i] = static_cast<double>(v) / 32768.0;
    }
    return samples;
}

}  // namespace perfkit::io
