#pragma once

#include "lcm/encoders/tensor.hpp"
#include "lcm/textpipe/tokenizer.hpp"

#include <string>
#include <vector>

namespace lcm {

/// One image with its raw caption.
struct Sample {
    std::string id;
    Image image;
    std::string caption;
};

/// A sample whose caption has been tokenized; the unit the trainer and the
/// evaluator consume.
struct PairedSample {
    std::string id;
    Image image;
    TokenSequence caption;
};

std::vector<PairedSample> tokenize_samples(const std::vector<Sample>& samples, const Vocabulary& vocab);

} // namespace lcm
