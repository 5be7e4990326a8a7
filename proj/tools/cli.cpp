#include "cli.hpp"

#include "acceptance.hpp"

#include "perfkit/align.hpp"
#include "perfkit/dispersion.hpp"
#include "perfkit/error.hpp"
#include "perfkit/evalmeasure.hpp"
#include "perfkit/io.hpp"
#include "perfkit/melody.hpp"
#include "perfkit/misalign.hpp"
#include "perfkit/notesep.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

namespace perfkit::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct Global {
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format = "json";
};

class Context {
public:
    Context(const Global& g, std::ostream& out, std::ostream& err) : global_(g), out_(out), err_(err) {}

    std::uint64_t seed(std::uint64_t fallback = 0) const
    {
        if (!global_.seed && !seed_reported_) {
            err_ << "perfkit: no --seed given, using " << fallback << '\n';
            seed_reported_ = true;
        }
        return global_.seed.value_or(fallback);
    }
    const std::string& format() const { return global_.format; }

    void emit(const std::string& text) const
    {
        if (global_.out_path.empty())
            out_ << text;
        else
            io::write_text(global_.out_path, text);
    }
    void emit(const Json& doc) const { emit(doc.dump(2) + "\n"); }
    std::ostream& err() const { return err_; }

private:
    const Global& global_;
    std::ostream& out_;
    std::ostream& err_;
    mutable bool seed_reported_ = false;
};

// Every input is checked before any work starts.
void require_files(std::initializer_list<const std::vector<std::string>*> groups)
{
    for (const auto* group : groups)
        for (const auto& path : *group)
            if (!fs::is_regular_file(path))
                throw DataError("cannot open file: " + path);
}

void require_files(std::initializer_list<std::string> paths)
{
    const std::vector<std::string> list(paths);
    require_files({&list});
}

// Places the score on the performance's time span.
NoteList stretch_onto(const NoteList& score, const NoteList& perf)
{
    if (score.empty() || perf.empty())
        return score;
    const auto stretched = stretch_to_duration(score, perf.end_time() - perf.start_time());
    std::vector<NoteEvent> out(stretched.begin(), stretched.end());
    for (auto& n : out) {
        n.onset += perf.start_time();
        n.offset += perf.start_time();
    }
    return NoteList(std::move(out));
}

Json curve_to_json(const align::EvalCurve& c)
{
    Json j;
    j["thresholds"] = c.thresholds;
    j["onset_ratio"] = c.onset_ratio;
    j["offset_ratio"] = c.offset_ratio;
    return j;
}

std::string curve_to_csv(const align::EvalCurve& c)
{
    std::ostringstream s;
    s.precision(17);
    s << "threshold,onset_ratio,offset_ratio\n";
    for (std::size_t i = 0; i < c.thresholds.size(); ++i)
        s << c.thresholds[i] << ',' << c.onset_ratio[i] << ',' << c.offset_ratio[i] << '\n';
    return s.str();
}

// ---- misalign ----

struct MisalignArgs {
    std::vector<std::string> fit_scores;
    std::vector<std::string> fit_perfs;
    std::size_t bins = misalign::kDefaultBins;
    std::string matcher = "notes";
    bool no_stretch = false;
    std::string perf;
    std::string model;
    double threshold = 0.0;
    bool missing_extra = false;
};

void run_misalign(const MisalignArgs& a, const Context& ctx)
{
    if (!a.model.empty()) {
        if (a.perf.empty())
            throw CLI::ValidationError("misalign", "--model needs --perf");
        require_files({a.perf, a.model});
        const auto model = misalign::model_from_json(io::read_json(a.model));
        const auto reference = io::read_notes(a.perf);
        misalign::Rng rng(ctx.seed());
        auto notes = misalign::sample_misaligned(reference, model, rng);
        if (a.threshold > 0.0)
            notes = misalign::cluster_chords(notes, a.threshold);
        Json doc = io::notes_to_json(notes);
        if (a.missing_extra) {
            const auto labels = misalign::generate_missing_extra(notes, rng);
            doc["missing"] = labels.missing;
            doc["extra"] = labels.extra;
        }
        ctx.emit(doc);
        return;
    }
    if (a.fit_scores.empty())
        throw CLI::ValidationError("misalign", "give --model and --perf to sample, or --fit-score/--fit-perf to fit");
    if (a.fit_scores.size() != a.fit_perfs.size())
        throw CLI::ValidationError("misalign", "--fit-score and --fit-perf must be given the same number of times");
    require_files({&a.fit_scores, &a.fit_perfs});

    std::vector<misalign::FitPiece> pieces;
    for (std::size_t i = 0; i < a.fit_scores.size(); ++i) {
        misalign::FitPiece piece;
        piece.performance = io::read_notes(a.fit_perfs[i]);
        piece.score = io::read_notes(a.fit_scores[i]);
        if (!a.no_stretch)
            piece.score = stretch_onto(piece.score, piece.performance);
        if (a.matcher == "identity") {
            if (piece.score.size() != piece.performance.size())
                throw DataError("identity matching needs equally long lists: " + a.fit_scores[i]);
            piece.matching = identity_matching(piece.score.size());
        } else {
            piece.matching = align::match_notes(piece.score, piece.performance);
        }
        pieces.push_back(std::move(piece));
    }
    const auto model = misalign::fit_misalignment_model(pieces, a.bins);
    if (model.pieces_skipped || model.zero_std_onset || model.zero_std_duration)
        ctx.err() << "perfkit: " << model.pieces_skipped << " pieces skipped, " << model.zero_std_onset
                  << " with constant onset misalignment, " << model.zero_std_duration
                  << " with constant duration ratio\n";
    ctx.emit(misalign::model_to_json(model));
}

// ---- align ----

struct AlignArgs {
    std::string score;
    std::string perf;
    std::string mode = "frame";
    int radius = align::kDefaultRadius;
    double cell = 0.05;
    bool no_stretch = false;
};

void run_align(const AlignArgs& a, const Context& ctx)
{
    require_files({a.score, a.perf});
    auto score = io::read_notes(a.score);
    const auto perf = io::read_notes(a.perf);
    NoteList aligned;
    if (a.mode == "frame") {
        if (!a.no_stretch)
            score = stretch_onto(score, perf);
        const auto sr = notes_to_pianoroll(score, a.cell, RollKind::three_valued);
        const auto pr = notes_to_pianoroll(perf, a.cell, RollKind::three_valued);
        aligned = align::apply_mapping(score, align::frame_align(sr, pr, a.radius));
    } else {
        aligned = align::note_align(score, perf, align::match_notes(score, perf));
    }
    ctx.emit(io::notes_to_json(aligned));
}

// ---- eval ----

struct EvalArgs {
    std::vector<std::string> aligned;
    std::vector<std::string> truth;
    std::vector<double> thresholds;
};

void run_eval(const EvalArgs& a, const Context& ctx)
{
    if (a.aligned.size() != a.truth.size() || a.aligned.empty())
        throw CLI::ValidationError("eval", "--aligned and --truth must be given the same number of times");
    require_files({&a.aligned, &a.truth});
    std::vector<double> thresholds = a.thresholds;
    if (thresholds.empty())
        for (int i = 0; i <= 50; ++i)
            thresholds.push_back(0.01 * i);
    std::vector<align::EvalCurve> curves;
    for (std::size_t i = 0; i < a.aligned.size(); ++i)
        curves.push_back(align::eval_matched_ratio(io::read_notes(a.aligned[i]), io::read_notes(a.truth[i]),
                                                   thresholds));
    const auto macro = align::macro_average(curves);
    if (ctx.format() == "csv")
        ctx.emit(curve_to_csv(macro));
    else
        ctx.emit(curve_to_json(macro));
}

// ---- melody ----

struct MelodyArgs {
    std::string notes;
    std::string method = "graph";
    std::string probs;
    double cell = 0.125;
    std::vector<long> query;
    std::size_t iterations = 30000;
    std::size_t rects = 5;
};

void run_melody(const MelodyArgs& a, const Context& ctx)
{
    require_files({a.notes});
    if (!a.probs.empty())
        require_files({a.probs});
    const auto notes = io::read_notes(a.notes);

    if (a.method == "skyline") {
        const auto flags = melody::skyline(notes);
        std::vector<NoteEvent> kept;
        for (std::size_t i = 0; i < notes.size(); ++i)
            if (flags[i])
                kept.push_back(notes[i]);
        ctx.emit(io::notes_to_json(NoteList(std::move(kept))));
        return;
    }

    const auto roll = notes_to_pianoroll(notes, a.cell, RollKind::boolean);
    if (a.method == "saliency") {
        if (a.query.size() != 4)
            throw CLI::ValidationError("melody", "saliency needs --query row0,col0,row1,col1");
        const melody::QueryRegion q{a.query[0], a.query[1], a.query[2], a.query[3]};
        melody::SaliencyOptions options;
        options.iterations = a.iterations;
        options.rects_per_iter = a.rects;
        options.seed = ctx.seed();
        ctx.emit(io::csv_from_matrix(melody::saliency_map(melody::pitch_height_predictor, roll.values(), q, options)));
        return;
    }

    // Without a probability roll the pitch-height heuristic stands in for
    // a trained model.
    const PianoRoll probs = a.probs.empty()
                                ? PianoRoll(melody::pitch_height_predictor(roll.values()), a.cell, RollKind::probability)
                                : PianoRoll(io::read_csv_matrix(a.probs), a.cell, RollKind::probability);
    const auto p = melody::note_probabilities(probs, notes);
    const double threshold = melody::cluster_threshold(p);
    NoteList out;
    if (a.method == "threshold") {
        const auto keep = melody::retain_over_threshold(p, threshold);
        std::vector<NoteEvent> kept;
        for (std::size_t i = 0; i < notes.size(); ++i)
            if (keep[i])
                kept.push_back(notes[i]);
        out = NoteList(std::move(kept));
    } else {
        out = melody::extract_monophonic(melody::build_melo_digraph(notes, p, threshold), notes);
    }
    ctx.emit(io::notes_to_json(out));
}

// ---- disperse ----

struct DisperseArgs {
    std::string points;
    std::size_t p = 4;
    std::string method = "D";
    std::string metric = "euclidean";
    bool exclude_cluster = false;
    std::size_t target = 0;
};

Json indices_json(const std::vector<std::size_t>& v) { return Json(v); }

void run_disperse(const DisperseArgs& a, const Context& ctx)
{
    require_files({a.points});
    const dispersion::PointSet ps(io::read_csv_matrix(a.points), dispersion::metric_from_name(a.metric));
    Json doc;
    if (a.method == "exact") {
        const auto r = dispersion::brute_force_pdispersion(ps, a.p);
        doc["selected"] = indices_json(r.selected);
        doc["min_dist"] = r.min_dist;
    } else if (a.method == "medoid") {
        doc["medoid"] = dispersion::medoid(ps);
    } else if (a.method == "kmeans") {
        std::mt19937_64 rng(ctx.seed());
        const auto r = dispersion::kmeans(ps, a.p, rng);
        auto assignment = r.assignment;
        if (a.target > 0)
            assignment = dispersion::robin_hood(assignment, ps, a.target);
        doc["assignment"] = indices_json(assignment);
        Json centroids = Json::array();
        for (Eigen::Index c = 0; c < r.centroids.rows(); ++c) {
            std::vector<double> row(r.centroids.cols());
            for (Eigen::Index d = 0; d < r.centroids.cols(); ++d)
                row[static_cast<std::size_t>(d)] = r.centroids(c, d);
            centroids.push_back(row);
        }
        doc["centroids"] = centroids;
        doc["inertia"] = r.inertia;
    } else {
        const auto r = dispersion::select_dispersed(ps, a.p, dispersion::method_from_name(a.method),
                                                    {a.exclude_cluster});
        doc["selected"] = indices_json(r.selected);
        doc["min_dist"] = r.min_dist;
    }
    ctx.emit(doc);
}

// ---- separate ----

struct SeparateArgs {
    std::string audio;
    std::string notes;
    double rate = notesep::kSampleRate;
};

void run_separate(const SeparateArgs& a, const Context& ctx)
{
    require_files({a.audio, a.notes});
    const auto samples = io::read_audio(a.audio);
    const auto notes = io::read_notes(a.notes);
    const auto spec = notesep::stft_magnitude(samples, a.rate);
    const auto W = notesep::build_initial_template(notesep::synthetic_piano_scale({}, a.rate));
    auto state = notesep::make_state(W, notes, spec.frame_duration, spec.values.cols());
    state = notesep::nmf_fit(spec.values, state);

    const notesep::Mfcc mfcc(spec.values.rows(), a.rate);
    std::ostringstream s;
    s.precision(17);
    s << "index,pitch,onset,offset,velocity";
    for (Eigen::Index f = 0; f < notesep::kNoteFrames; ++f)
        for (int c = 0; c < notesep::kMfccCount; ++c)
            s << ",f" << f << "_c" << c;
    s << '\n';
    for (std::size_t i = 0; i < notes.size(); ++i) {
        const auto& n = notes[i];
        const auto note_spec = notesep::extract_note_spectrogram(state, n);
        s << i << ',' << n.pitch << ',' << n.onset << ',' << n.offset << ',' << n.velocity;
        for (Eigen::Index f = 0; f < notesep::kNoteFrames; ++f) {
            const auto coeffs = mfcc(note_spec.col(f));
            for (int c = 0; c < notesep::kMfccCount; ++c)
                s << ',' << coeffs[c];
        }
        s << '\n';
    }
    ctx.emit(s.str());
}

// ---- measure ----

struct MeasureArgs {
    std::string pred;
    std::string target;
    std::string weights;
    std::vector<std::string> corpus;
    std::string fit;
    std::string reference;
    double l1 = 0.0;
    double l2 = 0.0;
};

Json stats_to_json(const evalmeasure::ReferenceStats& s)
{
    Json j;
    j["features"] = Json::array();
    for (auto name : evalmeasure::feature_names())
        j["features"].push_back(std::string(name));
    j["mean"] = s.mean;
    j["std"] = s.std;
    return j;
}

evalmeasure::ReferenceStats stats_from_json(const Json& j)
{
    evalmeasure::ReferenceStats s;
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto std = j.at("std").get<std::vector<double>>();
    if (mean.size() != evalmeasure::kFeatureCount || std.size() != evalmeasure::kFeatureCount)
        throw DataError("reference statistics need 16 means and 16 stds");
    std::copy(mean.begin(), mean.end(), s.mean.begin());
    std::copy(std.begin(), std.end(), s.std.begin());
    return s;
}

void run_measure(const MeasureArgs& a, const Context& ctx)
{
    if (!a.corpus.empty()) {
        require_files({&a.corpus});
        std::vector<evalmeasure::SymbolicFeatures> features;
        for (const auto& path : a.corpus)
            features.push_back(evalmeasure::symbolic_features(io::read_notes(path)));
        ctx.emit(stats_to_json(evalmeasure::reference_stats(features)));
        return;
    }
    if (!a.fit.empty()) {
        require_files({a.fit});
        if (!a.reference.empty())
            require_files({a.reference});
        const auto table = io::read_csv_matrix(a.fit);
        if (table.cols() != static_cast<Eigen::Index>(evalmeasure::kRowSize + 1))
            throw DataError(a.fit + ": expected 18 columns (16 feature differences, F1, rating)");
        const auto m = evalmeasure::fit_linear_measure(table.leftCols(evalmeasure::kRowSize),
                                                       table.col(evalmeasure::kRowSize), a.l1, a.l2);
        Json doc;
        if (!a.reference.empty())
            doc["reference"] = io::read_json(a.reference);
        doc["weights"] = std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size());
        doc["intercept"] = m.intercept;
        doc["active"] = m.active;
        doc["training_l1_error"] = m.training_l1_error;
        ctx.emit(doc);
        return;
    }
    if (a.pred.empty() || a.target.empty())
        throw CLI::ValidationError("measure", "give --pred and --target, --fit rows.csv, or --corpus pieces");
    require_files({a.pred, a.target});
    if (!a.weights.empty())
        require_files({a.weights});
    const auto pred = io::read_notes(a.pred);
    const auto target = io::read_notes(a.target);
    const auto f1 = evalmeasure::obj_f1(pred, target);
    Json doc;
    doc["precision"] = f1.precision;
    doc["recall"] = f1.recall;
    doc["f1"] = f1.f1;
    if (!a.weights.empty()) {
        const auto w = io::read_json(a.weights);
        if (!w.contains("reference"))
            throw DataError(a.weights + ": no reference statistics");
        evalmeasure::LinearMeasure m;
        const auto weights = w.at("weights").get<std::vector<double>>();
        m.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
        m.intercept = w.at("intercept").get<double>();
        const auto row = evalmeasure::measure_row(evalmeasure::symbolic_features(pred),
                                                  evalmeasure::symbolic_features(target), f1.f1,
                                                  stats_from_json(w.at("reference")));
        doc["measure"] = evalmeasure::apply_measure(m, row);
    }
    ctx.emit(doc);
}

int run_selftest(const Context& ctx, std::ostream& out)
{
    int failed = 0;
    for (const auto& r : acceptance::run_all(ctx.seed(acceptance::kDefaultSeed))) {
        out << acceptance::format(r) << '\n';
        failed += r.passed ? 0 : 1;
    }
    return failed ? kSelftestFailed : kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"perfkit: score misalignment, alignment, melody, dispersion, separation and evaluation tools",
                 "perfkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Global global;
    app.add_option("--seed", global.seed, "Seed for every random draw (reported on stderr when omitted)");
    app.add_option("--out", global.out_path, "Write the result here instead of stdout");
    app.add_option("--format", global.format, "Output format for tabular results")
        ->check(CLI::IsMember({"json", "csv"}));

    MisalignArgs mis;
    auto* misalign_cmd = app.add_subcommand("misalign", "Fit a misalignment model or sample a misaligned score");
    misalign_cmd->add_option("--fit-score", mis.fit_scores, "Score of a fitting pair (repeatable)");
    misalign_cmd->add_option("--fit-perf", mis.fit_perfs, "Performance of a fitting pair (repeatable)");
    misalign_cmd->add_option("--bins", mis.bins, "Histogram bins")->check(CLI::PositiveNumber);
    misalign_cmd->add_option("--matcher", mis.matcher, "Note matching for fitting")
        ->check(CLI::IsMember({"notes", "identity"}));
    misalign_cmd->add_flag("--no-stretch", mis.no_stretch, "Do not stretch scores onto the performance span");
    misalign_cmd->add_option("--perf", mis.perf, "Reference performance to misalign");
    misalign_cmd->add_option("--model", mis.model, "Fitted model JSON");
    misalign_cmd->add_option("--threshold", mis.threshold, "Chord clustering distance in seconds (0: off)")
        ->check(CLI::NonNegativeNumber);
    misalign_cmd->add_flag("--missing-extra", mis.missing_extra, "Add missing/extra note labels");

    AlignArgs al;
    auto* align_cmd = app.add_subcommand("align", "Align a score to a performance");
    align_cmd->add_option("--score", al.score, "Score notes")->required();
    align_cmd->add_option("--perf", al.perf, "Performance notes")->required();
    align_cmd->add_option("--mode", al.mode, "Frame-level (rolls + FastDTW) or note-level (matched anchors)")->check(CLI::IsMember({"frame", "note"}));
    align_cmd->add_option("--radius", al.radius, "FastDTW radius")->check(CLI::NonNegativeNumber);
    align_cmd->add_option("--cell", al.cell, "Piano-roll cell duration in seconds")->check(CLI::PositiveNumber);
    align_cmd->add_flag("--no-stretch", al.no_stretch, "Do not stretch the score onto the performance span");

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Macro-averaged matched-ratio curves");
    eval_cmd->add_option("--aligned", ev.aligned, "Aligned notes (repeatable)")->required();
    eval_cmd->add_option("--truth", ev.truth, "Ground-truth notes (repeatable)")->required();
    eval_cmd->add_option("--thresholds", ev.thresholds, "Sorted thresholds in seconds")->delimiter(',');

    MelodyArgs mel;
    auto* melody_cmd = app.add_subcommand("melody", "Extract a melody line or a saliency map");
    melody_cmd->add_option("--notes", mel.notes, "Score notes")->required();
    melody_cmd->add_option("--method", mel.method, "Melody extraction method, or a saliency map")->check(CLI::IsMember({"skyline", "threshold", "graph", "saliency"}));
    melody_cmd->add_option("--probs", mel.probs, "128-row probability roll CSV");
    melody_cmd->add_option("--cell", mel.cell, "Roll cell duration in seconds")->check(CLI::PositiveNumber);
    melody_cmd->add_option("--query", mel.query, "Saliency query corners row0,col0,row1,col1")->delimiter(',');
    melody_cmd->add_option("--iterations", mel.iterations, "Saliency iterations");
    melody_cmd->add_option("--rects", mel.rects, "Rectangles per saliency iteration");

    DisperseArgs dis;
    auto* disperse_cmd = app.add_subcommand("disperse", "Max-min dispersion selection and clustering");
    disperse_cmd->add_option("--points", dis.points, "Points CSV, one row per point")->required();
    disperse_cmd->add_option("--p", dis.p, "Points to select (clusters for kmeans)")->check(CLI::PositiveNumber);
    disperse_cmd->add_option("--method", dis.method, "Selection heuristic, exhaustive search, medoid or kmeans")
        ->check(CLI::IsMember({"A", "B", "C", "D", "exact", "medoid", "kmeans"}));
    disperse_cmd->add_option("--metric", dis.metric, "Selection distance")->check(CLI::IsMember({"euclidean", "manhattan"}));
    disperse_cmd->add_flag("--method-a-exclude-cluster", dis.exclude_cluster,
                           "Method A measures against the points outside the candidate's cluster");
    disperse_cmd->add_option("--target", dis.target, "kmeans: redistribute towards this minimum cluster size");

    SeparateArgs sep;
    auto* separate_cmd = app.add_subcommand("separate", "Score-informed note separation and per-note MFCCs");
    separate_cmd->add_option("--audio", sep.audio, "Mono samples: CSV, or 16-bit little-endian PCM")->required();
    separate_cmd->add_option("--notes", sep.notes, "Aligned notes")->required();
    separate_cmd->add_option("--rate", sep.rate, "Sample rate in Hz")->check(CLI::PositiveNumber);

    MeasureArgs mea;
    auto* measure_cmd = app.add_subcommand("measure", "Transcription F-measure and the linear perceptual measure");
    measure_cmd->add_option("--pred", mea.pred, "Predicted notes");
    measure_cmd->add_option("--target", mea.target, "Target notes");
    measure_cmd->add_option("--weights", mea.weights, "Fitted measure JSON");
    measure_cmd->add_option("--corpus", mea.corpus, "Pieces for reference statistics (repeatable)");
    measure_cmd->add_option("--fit", mea.fit, "Training rows CSV: 16 feature differences, F1, rating");
    measure_cmd->add_option("--reference", mea.reference, "Reference statistics JSON stored with a fit");
    measure_cmd->add_option("--l1", mea.l1, "L1 penalty")->check(CLI::NonNegativeNumber);
    measure_cmd->add_option("--l2", mea.l2, "L2 penalty")->check(CLI::NonNegativeNumber);

    auto* selftest_cmd = app.add_subcommand("selftest", "Run the oracle acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "perfkit: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    const Context ctx(global, out, err);
    try {
        if (*misalign_cmd)
            run_misalign(mis, ctx);
        else if (*align_cmd)
            run_align(al, ctx);
        else if (*eval_cmd)
            run_eval(ev, ctx);
        else if (*melody_cmd)
            run_melody(mel, ctx);
        else if (*disperse_cmd)
            run_disperse(dis, ctx);
        else if (*separate_cmd)
            run_separate(sep, ctx);
        else if (*measure_cmd)
            run_measure(mea, ctx);
        else if (*selftest_cmd)
            return run_selftest(ctx, out);
    } catch (const CLI::ValidationError& e) {
        err << "perfkit: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        err << "perfkit: " << e.what() << '\n';
        return kDataError;
    } catch (const nlohmann::json::exception& e) {
        err << "perfkit: malformed JSON input: " << e.what() << '\n';
        return kDataError;
    }
    return kOk;
}

}  // namespace perfkit::cli
