#include "mdlnn/mdl.hpp"

#include <array>
#include <sstream>

namespace mdlnn {

std::string MdlScore::report_line() const {
    std::ostringstream os;
    os << "G=" << grammar_bits << " D:G=" << data_bits << " total=" << total();
    return os.str();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lm_data_cost(const CompiledNet& net, const Corpus& corpus) {
    const size_t v = corpus.vocab_size();
    if (net.n_inputs() != v || net.n_outputs() != v)
        throw std::invalid_argument("data_cost: network arity does not match the corpus vocabulary");
    const double uniform_cost = std::log2(static_cast<double>(v));

    const std::string vocab = task_vocab(corpus.task);
    std::array<uint8_t, 256> lut{};
    for (size_t i = 0; i < vocab.size(); ++i) lut[static_cast<uint8_t>(vocab[i])] = static_cast<uint8_t>(i);

    std::vector<double> input(v, 0.0), values, dist;
    double total = 0.0;
    NetworkState state;
    for (const auto& body : corpus.sequences) {
        state = net.reset_state();
        const size_t steps = body.size() + 1;
        uint8_t current = 0;  // '#'
        for (size_t i = 0; i < steps; ++i) {
            input[current] = 1.0;
            const bool ok = net.step(state, input, values);
            input[current] = 0.0;
            const uint8_t target = i < body.size() ? lut[static_cast<uint8_t>(body[i])] : uint8_t{0};
            if (!ok) {
                total += uniform_cost;  // poisoned step falls back to uniform
            } else {
                dist.assign(values.begin() + v, values.begin() + 2 * v);
                double sum = 0.0;
                for (auto& x : dist) {
                    if (x < 0.0) x = 0.0;
                    sum += x;
                }
                if (!(sum > 0.0) || !std::isfinite(sum)) {
                    total += uniform_cost;
                } else {
                    const double prob = dist[target] / sum;
                    if (prob <= 0.0) return kInf;
                    total -= std::log2(prob);
                }
            }
            state.prev.swap(values);
            current = target;
        }
    }
    return total;
}

double addition_data_cost(const CompiledNet& net, const Corpus& corpus) {
    if (net.n_inputs() != 2 || net.n_outputs() != 1)
        throw std::invalid_argument("data_cost: addition mode needs a 2-input, 1-output network");
    std::vector<double> input(2), values;
    double total = 0.0;
    NetworkState state;
    for (const auto& [n, m] : corpus.pairs) {
        state = net.reset_state();
        const size_t steps = Corpus::addition_steps(n, m);
        const uint64_t sum = static_cast<uint64_t>(n) + m;
        for (size_t i = 0; i < steps; ++i) {
            input[0] = static_cast<double>((n >> i) & 1u);
            input[1] = static_cast<double>((m >> i) & 1u);
            const bool ok = net.step(state, input, values);
            const int target = static_cast<int>((sum >> i) & 1u);
            const double raw = values[2];
            const double p = ok && std::isfinite(raw) ? clamp_probability(raw) : 0.5;
            if (target == 1) {
                if (p <= 0.0) return kInf;
                total -= std::log2(p);
            } else {
                if (p >= 1.0) return kInf;
                total -= std::log2(1.0 - p);
            }
            state.prev.swap(values);
        }
    }
    return total;
}

}  // namespace

double data_cost(const CompiledNet& net, const Corpus& corpus) {
    return corpus.addition_mode() ? addition_data_cost(net, corpus) : lm_data_cost(net, corpus);
}

double data_cost(const Network& net, const Corpus& corpus) {
    return data_cost(CompiledNet(net), corpus);
}

MdlScore mdl_score(const Network& net, const Corpus& corpus, const EncodingConfig& cfg) {
    MdlScore score;
    score.grammar_bits = grammar_cost(net, cfg);
    score.data_bits = data_cost(net, corpus);
    return score;
}

}  // namespace mdlnn
