#include "test_support.hpp"

#include "lcm/cli/commands.hpp"
#include "lcm/cli/config.hpp"
#include "lcm/error.hpp"
#include "lcm/evaluation/report.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace lcm {
namespace {

namespace fs = std::filesystem;

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "lcm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

fs::path words_vocab(const fs::path& dir)
{
    const auto p = dir / "vocab.txt";
    std::ofstream v(p);
    v << "hello\nworld\n.\n";
    return p;
}

TEST(Cli, TokenizePrintsIds)
{
    const auto dir = testing::scratch_dir("cli_tok");
    const auto r = run({"tokenize", "--vocab", words_vocab(dir).string(), "Hello world. ~"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "0 1 2\n");
    EXPECT_NE(r.err.find("dropped 1"), std::string::npos);
}

TEST(Cli, WindowsOf150Tokens)
{
    const auto dir = testing::scratch_dir("cli_win");
    std::string text;
    for (int i = 0; i < 150; ++i) text += "hello ";
    const auto r = run({"windows", "--vocab", words_vocab(dir).string(), "--context-len", "77", text});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("windows 3\n"), std::string::npos);
    EXPECT_NE(r.out.find("starts 0 38 75\n"), std::string::npos);
    EXPECT_NE(r.out.find("stride 38\n"), std::string::npos);
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"tokenize"}).code, kExitUsage);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
    const auto missing = run({"tokenize", "--vocab", "/nonexistent/vocab.txt", "x"});
    EXPECT_EQ(missing.code, kExitRuntime);
    EXPECT_NE(missing.err.find("lcm: "), std::string::npos);
    const auto dir = testing::scratch_dir("cli_codes");
    const auto bad = run({"windows", "--vocab", words_vocab(dir).string(), "--context-len", "2", "hello"});
    EXPECT_EQ(bad.code, kExitUsage);
}

TEST(Cli, ConfigErrorsNameTheKey)
{
    std::istringstream unknown("text_widht = 4\n");
    try {
        parse_run_config(unknown, ".");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
        EXPECT_NE(std::string(e.what()).find("text_widht"), std::string::npos);
    }
    std::istringstream bad("epochs = ten\n");
    EXPECT_THROW(parse_run_config(bad, "."), Error);
    std::istringstream ok("# c\nvocab_path = v.txt\nepochs = 3\nk_values = 1, 2\n");
    const auto dir = testing::scratch_dir("cli_cfg");
    std::ofstream(dir / "v.txt") << "a\n";
    const auto cfg = parse_run_config(ok, dir / "sub" / "..");
    EXPECT_EQ(cfg.vocab_path, dir / "v.txt");
    EXPECT_EQ(cfg.train.epochs, 3u);
}

TEST(Cli, GenTrainEvalReport)
{
    const auto dir = testing::scratch_dir("cli_e2e");
    auto g = run({"gen-data", "--out", (dir / "data").string(), "--count", "12", "--seed", "4", "--image-size", "8"});
    ASSERT_EQ(g.code, kExitOk) << g.err;
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "vocab_path = data/vocab.txt\nmanifest_path = data/manifest.jsonl\noutput_dir = out\n"
               "train_on = all\neval_on = all\n"
               "text_layers = 1\ntext_heads = 2\ntext_width = 8\nimage_size = 8\npatch_size = 4\n"
               "image_layers = 1\nimage_heads = 2\nimage_width = 8\nembed_dim = 8\n"
               "learning_rate = 1e-3\nepochs = 2\nbatch_size = 6\nsample_size = 12\nk_values = 1,5,10\neval_seeds = 0,1\n";
    }
    auto t = run({"train", "--config", (dir / "run.cfg").string()});
    ASSERT_EQ(t.code, kExitOk) << t.err;
    const auto log = lines_of(dir / "out/train.log");
    ASSERT_EQ(log.size(), 2u);
    EXPECT_EQ(log[0].substr(0, 2), "1\t");
    EXPECT_EQ(log[1].substr(0, 2), "2\t");
    ASSERT_TRUE(fs::exists(dir / "out/checkpoint.lcm"));

    auto e = run({"eval", "--config", (dir / "run.cfg").string(), "--checkpoint", (dir / "out/checkpoint.lcm").string(),
                  "--direction", "both"});
    ASSERT_EQ(e.code, kExitOk) << e.err;
    std::ifstream js(dir / "out/report_image-to-text.json");
    std::stringstream ss;
    ss << js.rdbuf();
    const auto report = report_from_json(ss.str());
    ASSERT_EQ(report.per_k.size(), 3u);
    EXPECT_EQ(report.per_k[0].k, 1u);
    EXPECT_EQ(report.per_k[2].k, 10u);
    EXPECT_EQ(report.per_k[0].per_seed.size(), 2u);
    EXPECT_EQ(report.pool_size, 12u);
    EXPECT_TRUE(fs::exists(dir / "out/report_text-to-image.txt"));

    auto rep = run({"report", "--json", (dir / "out/report_image-to-text.json").string(), "--format", "json"});
    ASSERT_EQ(rep.code, kExitOk);
    EXPECT_EQ(report_from_json(rep.out), report);
    auto table = run({"report", "--json", (dir / "out/report_image-to-text.json").string()});
    EXPECT_NE(table.out.find("R@10"), std::string::npos);

    auto enc = run({"encode-text", "--config", (dir / "run.cfg").string(), "--checkpoint",
                    (dir / "out/checkpoint.lcm").string(), "a red circle"});
    ASSERT_EQ(enc.code, kExitOk) << enc.err;
    std::istringstream nums(enc.out);
    double v, sq = 0;
    int n = 0;
    while (nums >> v) sq += v * v, ++n;
    EXPECT_EQ(n, 8);
    EXPECT_NEAR(sq, 1.0, 1e-5);
}

} // namespace
} // namespace lcm
