#pragma once

#include "lcm/encoders/config.hpp"
#include "lcm/evaluation/retrieval.hpp"
#include "lcm/longcap/long_text.hpp"
#include "lcm/training/trainer.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lcm {

/// Everything a train or eval run needs. Loaded from a flat text file:
///
///     # comment
///     key = value
///
/// Relative paths resolve against the config file's directory. Unknown keys
/// and malformed values are InvalidConfig errors naming the key.
struct RunConfig {
    EncoderConfig encoder;
    LongTextConfig long_text;
    TrainConfig train;
    EvalConfig eval;
    std::vector<Direction> directions{Direction::ImageToText};

    std::filesystem::path vocab_path;
    std::filesystem::path manifest_path;
    std::filesystem::path output_dir;

    std::string train_on = "train"; // train | all
    std::string eval_on = "test";   // train | val | test | all
    std::uint64_t split_seed = 0;

    void validate() const;
};

std::map<std::string, std::string> parse_key_values(std::istream& in);

RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

} // namespace lcm
