#include "lcm/cli/commands.hpp"

#include "lcm/cli/config.hpp"
#include "lcm/data/image_io.hpp"
#include "lcm/data/manifest.hpp"
#include "lcm/data/synthetic.hpp"
#include "lcm/encoders/checkpoint.hpp"
#include "lcm/error.hpp"
#include "lcm/evaluation/report.hpp"
#include "lcm/longcap/long_text.hpp"
#include "lcm/textpipe/windows.hpp"
#include "lcm/training/trainer.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace lcm {

namespace {

struct Model {
    RunConfig run;
    Vocabulary vocab;
    ModelParams<float> params;
};

Vocabulary require_vocab(const RunConfig& run)
{
    if (run.vocab_path.empty()) throw Error(ErrorKind::InvalidConfig, "vocab_path: required");
    return Vocabulary::load_file(run.vocab_path);
}

Model load_model(const std::string& config_path, const std::string& checkpoint)
{
    RunConfig run = load_run_config(config_path);
    Vocabulary vocab = require_vocab(run);
    run.encoder.vocab_size = vocab.size();
    run.encoder.validate();
    auto params = load_checkpoint(checkpoint, run.encoder);
    return Model{std::move(run), std::move(vocab), std::move(params)};
}

void print_vector(std::ostream& out, const Embedding& e)
{
    out << std::setprecision(9);
    for (Eigen::Index i = 0; i < e.size(); ++i) out << (i ? " " : "") << e[i];
    out << "\n";
}

std::vector<PairedSample> load_split(const RunConfig& run, const Vocabulary& vocab, const std::string& which)
{
    if (run.manifest_path.empty()) throw Error(ErrorKind::InvalidConfig, "manifest_path: required");
    const auto manifest = load_manifest(run.manifest_path);
    const DatasetManifest* chosen = &manifest;
    DatasetSplits splits;
    if (which != "all") {
        splits = split_dataset(manifest, run.split_seed);
        chosen = which == "train" ? &splits.train : which == "val" ? &splits.val : &splits.test;
    }
    return tokenize_samples(load_samples(*chosen, run.encoder.image_size), vocab);
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << text;
}

int cmd_tokenize(const std::string& vocab_path, const std::string& text, std::ostream& out, std::ostream& err)
{
    const auto vocab = Vocabulary::load_file(vocab_path);
    const auto seq = tokenize(text, vocab);
    for (std::size_t i = 0; i < seq.ids.size(); ++i) out << (i ? " " : "") << seq.ids[i];
    out << "\n";
    if (seq.dropped) err << "warning: dropped " << seq.dropped << " unmatched character(s)\n";
    return kExitOk;
}

int cmd_windows(const std::string& vocab_path, const std::string& text, std::size_t context_len, std::size_t stride,
                std::ostream& out)
{
    const auto vocab = Vocabulary::load_file(vocab_path);
    if (stride == 0) stride = default_stride(context_len);
    const auto batch = make_windows(tokenize(text, vocab), context_len, stride);
    out << "sequence_length " << batch.sequence_length << "\n"
        << "context_len " << batch.context_len << "\n"
        << "content_capacity " << batch.content_capacity << "\n"
        << "stride " << batch.stride << "\n"
        << "windows " << batch.size() << "\n"
        << "starts";
    for (auto s : batch.starts) out << " " << s;
    out << "\n";
    for (std::size_t w = 0; w < batch.size(); ++w)
        out << "window " << w << " start " << batch.starts[w] << " tokens " << batch.content_length(w) << "\n";
    return kExitOk;
}

int cmd_encode_text(const std::string& config, const std::string& checkpoint, const std::string& text,
                    std::ostream& out)
{
    const auto m = load_model(config, checkpoint);
    print_vector(out, encode_long_text<float>(tokenize(text, m.vocab), m.params, m.run.encoder, m.run.long_text));
    return kExitOk;
}

int cmd_encode_image(const std::string& config, const std::string& checkpoint, const std::string& image,
                     std::ostream& out)
{
    const auto m = load_model(config, checkpoint);
    const auto img = load_image(image, m.run.encoder.image_size);
    print_vector(out, normalize<float>(encode_image<float>(img, m.params, m.run.encoder)));
    return kExitOk;
}

int cmd_train(const std::string& config, std::size_t threads, std::ostream& out)
{
    RunConfig run = load_run_config(config);
    if (run.output_dir.empty()) throw Error(ErrorKind::InvalidConfig, "output_dir: required");
    const auto vocab = require_vocab(run);
    run.encoder.vocab_size = vocab.size();
    run.encoder.validate();
    const auto data = load_split(run, vocab, run.train_on);

    std::filesystem::create_directories(run.output_dir);
    std::ofstream log(run.output_dir / "train.log", std::ios::trunc);
    if (!log) throw Error(ErrorKind::Io, "cannot write " + (run.output_dir / "train.log").string());

    auto state = init_train_state(run.encoder, run.train);
    out << "training on " << data.size() << " pairs, " << steps_per_epoch(data.size(), run.train.batch_size)
        << " steps per epoch, " << run.train.epochs << " epochs\n";
    train(data, state, run.train, run.encoder, run.long_text, threads, [&](const EpochRecord& r, const TrainState&) {
        log << format_log_line(r) << "\n" << std::flush;
        out << format_log_line(r) << "\n" << std::flush;
    });
    const auto ckpt = run.output_dir / "checkpoint.lcm";
    save_checkpoint(ckpt, state.params);
    out << "wrote " << ckpt.string() << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& config, const std::string& checkpoint, const std::string& direction,
             std::size_t threads, std::ostream& out)
{
    auto m = load_model(config, checkpoint);
    if (m.run.output_dir.empty()) throw Error(ErrorKind::InvalidConfig, "output_dir: required");
    std::vector<Direction> dirs = m.run.directions;
    if (direction == "both") dirs = {Direction::ImageToText, Direction::TextToImage};
    else if (!direction.empty()) dirs = {parse_direction(direction)};

    const auto data = load_split(m.run, m.vocab, m.run.eval_on);
    std::filesystem::create_directories(m.run.output_dir);
    EvalConfig eval = m.run.eval;
    eval.split_name = m.run.eval_on;
    for (auto d : dirs) {
        eval.direction = d;
        const auto report = evaluate(data, m.params, m.run.encoder, m.run.long_text, eval, threads);
        const std::string stem = "report_" + std::string(to_string(d));
        write_text(m.run.output_dir / (stem + ".txt"), render_report(report, ReportFormat::Table));
        write_text(m.run.output_dir / (stem + ".json"), render_report(report, ReportFormat::Json));
        out << render_report(report, ReportFormat::Table) << "\n";
    }
    return kExitOk;
}

int cmd_gen_data(const std::string& out_dir, std::size_t count, std::uint64_t seed, std::size_t image_size,
                 const std::string& vocab_path, std::ostream& out)
{
    std::filesystem::create_directories(out_dir);
    Vocabulary vocab = vocab_path.empty() ? Vocabulary::from_tokens(synthetic_vocabulary_tokens())
                                          : Vocabulary::load_file(vocab_path);
    if (vocab_path.empty()) {
        std::ofstream v(std::filesystem::path(out_dir) / "vocab.txt", std::ios::binary | std::ios::trunc);
        vocab.write(v);
    }
    const auto ds = generate_synthetic(count, vocab, seed, image_size, out_dir);
    out << "wrote " << ds.manifest.size() << " samples to " << out_dir << "\n";
    return kExitOk;
}

int cmd_report(const std::string& json_path, const std::string& format, std::ostream& out)
{
    std::ifstream in(json_path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + json_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto report = report_from_json(ss.str());
    out << render_report(report, format == "json" ? ReportFormat::Json : ReportFormat::Table);
    return kExitOk;
}

int exit_code_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidContext:
    case ErrorKind::InvalidStride:
    case ErrorKind::InvalidKernel:
    case ErrorKind::InvalidK: return kExitUsage;
    default: return kExitRuntime;
    }
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Long-caption image-text matching: tokenize, window, train, evaluate", "lcm"};
    app.require_subcommand(1);

    std::string vocab, text, config, checkpoint, image, out_dir, direction, json_path, format = "table";
    std::size_t context_len = 77, stride = 0, threads = 1, count = 64, image_size = 32;
    std::uint64_t seed = 0;

    auto* tok = app.add_subcommand("tokenize", "Print the token ids of TEXT");
    tok->add_option("--vocab", vocab, "Vocabulary file, one token per line")->required();
    tok->add_option("text", text, "Caption text")->required();

    auto* win = app.add_subcommand("windows", "Show the sliding windows cut from TEXT");
    win->add_option("--vocab", vocab, "Vocabulary file")->required();
    win->add_option("--context-len", context_len, "Window width in tokens, including start/end")->capture_default_str();
    win->add_option("--stride", stride, "Content tokens between window starts (default: half the capacity, rounded up)");
    win->add_option("text", text, "Caption text")->required();

    auto* etext = app.add_subcommand("encode-text", "Print the unit-norm embedding of TEXT");
    etext->add_option("--config", config, "Run config")->required();
    etext->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    etext->add_option("text", text, "Caption text")->required();

    auto* eimg = app.add_subcommand("encode-image", "Print the unit-norm embedding of IMAGE");
    eimg->add_option("--config", config, "Run config")->required();
    eimg->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    eimg->add_option("image", image, "PPM/PGM or LCI1 raw image")->required();

    auto* tr = app.add_subcommand("train", "Train from a run config; writes checkpoint.lcm and train.log");
    tr->add_option("--config", config, "Run config")->required();
    tr->add_option("--threads", threads, "Worker threads")->capture_default_str();

    auto* ev = app.add_subcommand("eval", "Recall@K evaluation; writes report_<direction>.{txt,json}");
    ev->add_option("--config", config, "Run config")->required();
    ev->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    ev->add_option("--direction", direction, "image-to-text, text-to-image or both (default: from config)");
    ev->add_option("--threads", threads, "Worker threads")->capture_default_str();

    auto* gen = app.add_subcommand("gen-data", "Write a synthetic long-caption dataset");
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_option("--count", count, "Number of samples")->capture_default_str();
    gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
    gen->add_option("--image-size", image_size, "Image side in pixels")->capture_default_str();
    gen->add_option("--vocab", vocab, "Existing vocabulary (default: write the built-in one to OUT/vocab.txt)");

    auto* rep = app.add_subcommand("report", "Render a saved JSON report");
    rep->add_option("--json", json_path, "Report JSON file")->required();
    rep->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (tok->parsed()) return cmd_tokenize(vocab, text, out, err);
        if (win->parsed()) return cmd_windows(vocab, text, context_len, stride, out);
        if (etext->parsed()) return cmd_encode_text(config, checkpoint, text, out);
        if (eimg->parsed()) return cmd_encode_image(config, checkpoint, image, out);
        if (tr->parsed()) return cmd_train(config, threads, out);
        if (ev->parsed()) return cmd_eval(config, checkpoint, direction, threads, out);
        if (gen->parsed()) return cmd_gen_data(out_dir, count, seed, image_size, vocab, out);
        if (rep->parsed()) return cmd_report(json_path, format, out);
    } catch (const Error& e) {
        err << "lcm: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "lcm: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

} // namespace lcm
