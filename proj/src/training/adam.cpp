#include "lcm/error.hpp"
#include "lcm/training/trainer.hpp"

#include <cmath>

namespace lcm {

TrainState make_train_state(ModelParams<float> params)
{
    TrainState s;
    s.first_moment = params.zeros_like();
    s.second_moment = params.zeros_like();
    s.params = std::move(params);
    return s;
}

TrainState init_train_state(const EncoderConfig& cfg, const TrainConfig& train)
{
    train.validate();
    return make_train_state(init_params<float>(cfg, train.seed));
}

void adam_step(TrainState& state, const ModelParams<float>& grads, const TrainConfig& cfg)
{
    auto p = state.params.tensors();
    auto m = state.first_moment.tensors();
    auto v = state.second_moment.tensors();
    const auto g = grads.tensors();
    if (g.size() != p.size()) throw Error(ErrorKind::Shape, "gradient tensor count mismatch");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (g[i].value->rows() != p[i].value->rows() || g[i].value->cols() != p[i].value->cols())
            throw Error(ErrorKind::Shape, "gradient for '" + p[i].name + "' has the wrong shape");

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const auto b1 = static_cast<float>(cfg.adam_beta1);
    const auto b2 = static_cast<float>(cfg.adam_beta2);
    const auto correction1 = static_cast<float>(1.0 - std::pow(cfg.adam_beta1, t));
    const auto correction2 = static_cast<float>(1.0 - std::pow(cfg.adam_beta2, t));
    const auto lr = static_cast<float>(cfg.learning_rate);
    const auto eps = static_cast<float>(cfg.adam_eps);

    for (std::size_t i = 0; i < p.size(); ++i) {
        auto pa = p[i].value->array();
        auto ma = m[i].value->array();
        auto va = v[i].value->array();
        const auto ga = g[i].value->array();
        ma = b1 * ma + (1.0f - b1) * ga;
        va = b2 * va + (1.0f - b2) * ga.square();
        pa -= lr * (ma / correction1) / ((va / correction2).sqrt() + eps);
    }
    state.params.clamp_log_temperature();
}

} // namespace lcm
