#include "mdlnn/metrics.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace mdlnn {

namespace {

// Walks a language-modeling corpus step by step. `net == nullptr` substitutes
// the oracle distribution as the prediction (the oracle predictor baseline).
// visit(prediction, oracle_dist, target, deterministic).
template <typename Visit>
void walk_lm(const CompiledNet* net, const Corpus& corpus, Visit&& visit) {
    if (corpus.addition_mode())
        throw std::invalid_argument("language-modeling metric on an addition corpus");
    const size_t v = corpus.vocab_size();
    if (net && (net->n_inputs() != v || net->n_outputs() != v))
        throw std::invalid_argument("metric: network arity does not match the corpus vocabulary");
    const std::string vocab = task_vocab(corpus.task);
    std::array<uint8_t, 256> lut{};
    for (size_t i = 0; i < vocab.size(); ++i) lut[static_cast<uint8_t>(vocab[i])] = static_cast<uint8_t>(i);

    std::vector<double> input(v, 0.0), values, dist, odist;
    OracleState oracle(corpus.task, corpus.p);
    NetworkState state;
    for (const auto& body : corpus.sequences) {
        oracle.reset();
        if (net) state = net->reset_state();
        uint8_t current = 0;
        for (size_t i = 0; i <= body.size(); ++i) {
            const uint8_t target = i < body.size() ? lut[static_cast<uint8_t>(body[i])] : uint8_t{0};
            oracle.next_dist(odist);
            if (net) {
                input[current] = 1.0;
                const bool ok = net->step(state, input, values);
                input[current] = 0.0;
                dist.assign(values.begin() + v, values.begin() + 2 * v);
                double sum = 0.0;
                for (auto& x : dist) {
                    if (x < 0.0) x = 0.0;
                    sum += x;
                }
                if (!ok || !(sum > 0.0) || !std::isfinite(sum))
                    dist.assign(v, 1.0 / static_cast<double>(v));
                else
                    for (auto& x : dist) x /= sum;
                state.prev.swap(values);
            } else {
                dist = odist;
            }
            double top = 0.0;
            for (double x : odist) top = std::max(top, x);
            visit(dist, odist, target, top == 1.0);
            oracle.advance(target);
            current = target;
        }
    }
}

double det_accuracy_impl(const CompiledNet* net, const Corpus& corpus) {
    uint64_t masked = 0, correct = 0;
    walk_lm(net, corpus, [&](const std::vector<double>& dist, const std::vector<double>&,
                             uint8_t target, bool deterministic) {
        if (!deterministic) return;
        ++masked;
        double best = dist[0];
        size_t best_idx = 0;
        bool tie = false;
        for (size_t s = 1; s < dist.size(); ++s) {
            if (dist[s] > best) {
                best = dist[s];
                best_idx = s;
                tie = false;
            } else if (dist[s] == best) {
                tie = true;
            }
        }
        if (!tie && best_idx == target) ++correct;
    });
    if (masked == 0)
        throw UndefinedMetricError("deterministic accuracy undefined: corpus has no deterministic steps");
    return static_cast<double>(correct) / static_cast<double>(masked);
}

double cat_accuracy_impl(const CompiledNet* net, const Corpus& corpus, double epsilon,
                         uint64_t* vacuous_steps) {
    uint64_t steps = 0, passing = 0, vacuous = 0;
    walk_lm(net, corpus, [&](const std::vector<double>& dist, const std::vector<double>& odist,
                             uint8_t, bool) {
        ++steps;
        bool pass = true, any = false;
        for (size_t s = 0; s < dist.size(); ++s) {
            if (dist[s] >= epsilon) {
                any = true;
                if (odist[s] <= 0.0) pass = false;
            }
        }
        if (!any) ++vacuous;  // empty >=epsilon set passes vacuously
        if (pass) ++passing;
    });
    if (vacuous_steps) *vacuous_steps = vacuous;
    if (steps == 0) throw UndefinedMetricError("categorical accuracy undefined: empty corpus");
    return static_cast<double>(passing) / static_cast<double>(steps);
}

}  // namespace

double deterministic_accuracy(const Network& net, const Corpus& corpus) {
    CompiledNet compiled(net);
    return det_accuracy_impl(&compiled, corpus);
}

double categorical_accuracy(const Network& net, const Corpus& corpus, double epsilon,
                            uint64_t* vacuous_steps) {
    CompiledNet compiled(net);
    return cat_accuracy_impl(&compiled, corpus, epsilon, vacuous_steps);
}

double oracle_deterministic_accuracy(const Corpus& corpus) {
    return det_accuracy_impl(nullptr, corpus);
}

double oracle_categorical_accuracy(const Corpus& corpus, double epsilon) {
    return cat_accuracy_impl(nullptr, corpus, epsilon, nullptr);
}

double cross_entropy_per_char(const Network& net, const Corpus& corpus) {
    const size_t steps = corpus.total_steps();
    if (steps == 0) throw UndefinedMetricError("cross-entropy undefined: empty corpus");
    return data_cost(net, corpus) / static_cast<double>(steps);
}

double optimal_cross_entropy(const Corpus& corpus) {
    if (corpus.addition_mode()) return 0.0;  // targets are functions of the inputs
    double total = 0.0;
    uint64_t steps = 0;
    walk_lm(nullptr, corpus, [&](const std::vector<double>&, const std::vector<double>& odist,
                                 uint8_t target, bool) {
        total -= std::log2(odist[target]);
        ++steps;
    });
    if (steps == 0) throw UndefinedMetricError("optimal cross-entropy undefined: empty corpus");
    return total / static_cast<double>(steps);
}

double addition_accuracy(const Network& net, const Corpus& corpus, bool per_bit) {
    if (!corpus.addition_mode())
        throw std::invalid_argument("addition_accuracy needs an addition corpus");
    CompiledNet compiled(net);
    if (compiled.n_inputs() != 2 || compiled.n_outputs() != 1)
        throw std::invalid_argument("addition_accuracy: network must have 2 inputs and 1 output");
    std::vector<double> input(2), values;
    uint64_t pairs_correct = 0, bits_correct = 0, bits_total = 0;
    for (const auto& [n, m] : corpus.pairs) {
        NetworkState state = compiled.reset_state();
        const size_t steps = Corpus::addition_steps(n, m);
        const uint64_t sum = static_cast<uint64_t>(n) + m;
        bool all = true;
        for (size_t i = 0; i < steps; ++i) {
            input[0] = static_cast<double>((n >> i) & 1u);
            input[1] = static_cast<double>((m >> i) & 1u);
            const bool ok = compiled.step(state, input, values);
            const double raw = values[2];
            const double p = ok && std::isfinite(raw) ? clamp_probability(raw) : 0.5;
            const int predicted = p >= 0.5 ? 1 : 0;
            const int target = static_cast<int>((sum >> i) & 1u);
            ++bits_total;
            if (predicted == target) ++bits_correct;
            else all = false;
            state.prev.swap(values);
        }
        if (all) ++pairs_correct;
    }
    if (corpus.pairs.empty()) throw UndefinedMetricError("addition accuracy undefined: empty corpus");
    if (per_bit) return static_cast<double>(bits_correct) / static_cast<double>(bits_total);
    return static_cast<double>(pairs_correct) / static_cast<double>(corpus.pairs.size());
}

std::string EvalReport::header() {
    return "task\tset\tce_per_char\toptimal_ce\tdet_accuracy\tcat_accuracy\taccuracy\tmdl";
}

std::string EvalReport::row() const {
    std::ostringstream os;
    auto pct = [](double x) {
        std::ostringstream p;
        p.precision(2);
        p << std::fixed << 100.0 * x << "%";
        return p.str();
    };
    os.precision(4);
    os << std::fixed << task << '\t' << set << '\t' << cross_entropy << '\t' << optimal_ce << '\t'
       << (det_accuracy ? pct(*det_accuracy) : "n/a") << '\t'
       << (cat_accuracy ? pct(*cat_accuracy) : "n/a") << '\t'
       << (accuracy ? pct(*accuracy) : "n/a") << '\t' << score.report_line();
    return os.str();
}

EvalReport evaluate(const Network& net, const Corpus& corpus, const EncodingConfig& cfg,
                    double epsilon) {
    EvalReport report;
    report.task = task_name(corpus.task);
    report.set = corpus.kind;
    report.score = mdl_score(net, corpus, cfg);
    report.cross_entropy = cross_entropy_per_char(net, corpus);
    report.optimal_ce = optimal_cross_entropy(corpus);
    if (corpus.addition_mode()) {
        report.accuracy = addition_accuracy(net, corpus);
    } else {
        try {
            report.det_accuracy = deterministic_accuracy(net, corpus);
        } catch (const UndefinedMetricError&) {
            report.det_accuracy = std::nullopt;
        }
        report.cat_accuracy = categorical_accuracy(net, corpus, epsilon, &report.vacuous_steps);
    }
    return report;
}

}  // namespace mdlnn
