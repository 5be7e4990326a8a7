#include "cli.hpp"

#include "perfkit/io.hpp"
#include "perfkit/notesep.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace perfkit;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "perfkit");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Workdir {
public:
    Workdir()
    {
        std::random_device rd;
        dir_ = fs::temp_directory_path() / ("perfkit_cli_test_" + std::to_string(rd()));
        fs::create_directories(dir_);
    }
    ~Workdir() { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
};

NoteList shifted(const NoteList& notes, double shift)
{
    std::vector<NoteEvent> out(notes.begin(), notes.end());
    for (auto& n : out) {
        n.onset += shift;
        n.offset += shift;
    }
    return NoteList(std::move(out));
}

}  // namespace

TEST_CASE("usage errors exit with 1")
{
    CHECK(run({}).code == cli::kUsage);
    const auto r = run({"transmogrify"});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find("perfkit") != std::string::npos);
    CHECK(run({"align", "--score", "a.json"}).code == cli::kUsage);
    CHECK(run({"align", "--score", "a", "--perf", "b", "--mode", "sideways"}).code == cli::kUsage);
    CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("missing input files exit with 2 and name the path")
{
    Workdir w;
    std::mt19937_64 rng(1);
    io::write_notes(w.path("score.json"), oracle::random_notes(rng, 10));
    const auto missing = w.path("nowhere.json");
    const auto r = run({"align", "--score", w.path("score.json"), "--perf", missing});
    CHECK(r.code == cli::kDataError);
    CHECK(r.err.find(missing) != std::string::npos);
    CHECK(run({"measure", "--pred", missing, "--target", w.path("score.json")}).code == cli::kDataError);
}

TEST_CASE("malformed inputs exit with 2")
{
    Workdir w;
    std::ofstream(w.path("bad.json")) << "{ not json";
    std::ofstream(w.path("notes.json")) << R"({"notes": [{"pitch": 60, "onset": 1.0, "offset": 0.5, "velocity": 64}]})";
    const auto bad = run({"melody", "--notes", w.path("bad.json")});
    CHECK(bad.code == cli::kDataError);
    CHECK(bad.err.find(w.path("bad.json")) != std::string::npos);
    const auto reversed = run({"melody", "--notes", w.path("notes.json")});
    CHECK(reversed.code == cli::kDataError);
    CHECK(reversed.err.find(w.path("notes.json")) != std::string::npos);
}

TEST_CASE("selftest passes")
{
    const auto r = run({"--seed", "20240611", "selftest"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("FAIL") == std::string::npos);
    std::size_t lines = 0;
    for (char c : r.out)
        lines += c == '\n' ? 1 : 0;
    CHECK(lines == 12);
}

TEST_CASE("seeded misalignment is byte-identical across runs")
{
    Workdir w;
    std::mt19937_64 rng(2);
    std::vector<std::string> fit_args{"misalign"};
    for (int k = 0; k < 3; ++k) {
        const auto perf = oracle::random_notes(rng, 30);
        const auto s = w.path("s" + std::to_string(k) + ".json");
        const auto p = w.path("p" + std::to_string(k) + ".json");
        io::write_notes(p, perf);
        io::write_notes(s, shifted(perf, 0.05 * (k + 1)));
        fit_args.insert(fit_args.end(), {"--fit-score", s, "--fit-perf", p});
    }
    auto with_out = [](std::vector<std::string> args, const std::string& out) {
        args.insert(args.begin(), {"--out", out});
        return args;
    };
    REQUIRE(run(with_out(fit_args, w.path("model.json"))).code == cli::kOk);
    const auto model_a = slurp(w.path("model.json"));
    REQUIRE(run(with_out(fit_args, w.path("model2.json"))).code == cli::kOk);
    CHECK(slurp(w.path("model2.json")) == model_a);

    const std::vector<std::string> sample{"--seed", "42", "misalign", "--model", w.path("model.json"), "--perf",
                                          w.path("p0.json"), "--missing-extra"};
    const auto a = run(sample);
    const auto b = run(sample);
    REQUIRE(a.code == cli::kOk);
    CHECK(a.out == b.out);
    CHECK(a.err.empty());
    auto other = sample;
    other[1] = "43";
    CHECK(run(other).out != a.out);

    auto unseeded = sample;
    unseeded.erase(unseeded.begin(), unseeded.begin() + 2);
    const auto u = run(unseeded);
    CHECK(u.code == cli::kOk);
    CHECK(u.err.find("no --seed given") != std::string::npos);
}

TEST_CASE("align and eval round trip")
{
    Workdir w;
    std::mt19937_64 rng(3);
    const auto perf = oracle::random_notes(rng, 40);
    io::write_notes(w.path("perf.json"), perf);
    io::write_notes(w.path("score.json"), perf);
    for (const char* mode : {"frame", "note"}) {
        const auto aligned = w.path(std::string("aligned_") + mode + ".json");
        const auto r = run({"--out", aligned, "align", "--score", w.path("score.json"), "--perf", w.path("perf.json"),
                            "--mode", mode});
        REQUIRE(r.code == cli::kOk);
        const auto back = io::read_notes(aligned);
        CHECK(back.size() == perf.size());
        const auto e = run({"eval", "--aligned", aligned, "--truth", w.path("perf.json"), "--thresholds", "0.1,0.5"});
        REQUIRE(e.code == cli::kOk);
        const auto doc = io::Json::parse(e.out);
        CHECK(doc["onset_ratio"][1].get<double>() == doctest::Approx(1.0));
    }
    const auto csv = run({"--format", "csv", "eval", "--aligned", w.path("perf.json"), "--truth", w.path("perf.json"),
                          "--thresholds", "0,0.5"});
    CHECK(csv.out.rfind("threshold,onset_ratio,offset_ratio\n", 0) == 0);
}

TEST_CASE("melody, disperse and measure")
{
    Workdir w;
    const NoteList notes({{60, 0.0, 1.0, 64}, {67, 0.0, 1.0, 64}, {62, 1.0, 2.0, 64}});
    io::write_notes(w.path("notes.json"), notes);
    const auto sky = run({"melody", "--notes", w.path("notes.json"), "--method", "skyline"});
    REQUIRE(sky.code == cli::kOk);
    const auto line = io::notes_from_json(io::Json::parse(sky.out));
    REQUIRE(line.size() == 2);
    CHECK(line[0].pitch == 67);
    CHECK(run({"melody", "--notes", w.path("notes.json")}).code == cli::kOk);

    std::ofstream(w.path("points.csv")) << "0\n1\n2\n10\n11\n12\n";
    const auto d = run({"disperse", "--points", w.path("points.csv"), "--p", "2", "--method", "exact"});
    REQUIRE(d.code == cli::kOk);
    const auto doc = io::Json::parse(d.out);
    CHECK(doc["selected"] == io::Json::array({0, 5}));
    CHECK(doc["min_dist"].get<double>() == 12.0);

    const auto m = run({"measure", "--pred", w.path("notes.json"), "--target", w.path("notes.json")});
    REQUIRE(m.code == cli::kOk);
    CHECK(io::Json::parse(m.out)["f1"].get<double>() == 1.0);
}

TEST_CASE("separate writes one row per note")
{
    Workdir w;
    const NoteList notes({{60, 0.1, 0.5, 100}, {72, 0.3, 0.8, 80}});
    std::vector<double> mix(static_cast<std::size_t>(notesep::kSampleRate), 0.0);
    for (const auto& n : notes) {
        const auto s = notesep::synthesize_note(n.pitch, n.velocity / 127.0, n.onset, n.offset, mix.size());
        for (std::size_t i = 0; i < mix.size(); ++i)
            mix[i] += s[i];
    }
    {
        std::ofstream pcm(w.path("mix.raw"), std::ios::binary);
        for (double v : mix) {
            const auto q = static_cast<std::int16_t>(std::lround(std::clamp(v * 0.2, -1.0, 1.0) * 32767.0));
            pcm.put(static_cast<char>(q & 0xff));
            pcm.put(static_cast<char>((q >> 8) & 0xff));
        }
    }
    io::write_notes(w.path("notes.json"), notes);
    const auto r = run({"separate", "--audio", w.path("mix.raw"), "--notes", w.path("notes.json")});
    REQUIRE(r.code == cli::kOk);
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header.rfind("index,pitch,onset,offset,velocity,f0_c0,", 0) == 0);
    std::size_t rows = 0;
    while (std::getline(lines, row)) {
        ++rows;
        CHECK(std::count(row.begin(), row.end(), ',') == 4 + 30 * 13);
    }
    CHECK(rows == 2);
}
