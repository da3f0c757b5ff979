#pragma once

#include <optional>
#include <string>

#include "mdlnn/mdl.hpp"
#include "mdlnn/network.hpp"
#include "mdlnn/simulator.hpp"
#include "mdlnn/tasks.hpp"

namespace mdlnn {

struct UndefinedMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argmax-match rate over the deterministically predictable steps only;
// argmax ties count as mismatches. Throws UndefinedMetricError when the
// corpus has no deterministic steps (Dyck).
double deterministic_accuracy(const Network& net, const Corpus& corpus);

// Fraction of steps assigning p >= epsilon only to symbols the grammar
// allows next. vacuous_steps (optional out) counts steps whose >=epsilon set
// was empty (they pass vacuously).
double categorical_accuracy(const Network& net, const Corpus& corpus, double epsilon = 0.005,
                            uint64_t* vacuous_steps = nullptr);

double cross_entropy_per_char(const Network& net, const Corpus& corpus);

// Surprisal of the realized targets under the generative process itself.
double optimal_cross_entropy(const Corpus& corpus);

// Whole-sequence correctness over addition pairs (clamped output thresholded
// at 1/2); per_bit switches to per-step correctness.
double addition_accuracy(const Network& net, const Corpus& corpus, bool per_bit = false);

// Baselines from the oracle predictor itself (used by tests and reports).
double oracle_deterministic_accuracy(const Corpus& corpus);
double oracle_categorical_accuracy(const Corpus& corpus, double epsilon = 0.005);

// Summary evaluation row, one line per (net, corpus).
struct EvalReport {
    std::string task;
    std::string set;
    double cross_entropy = 0.0;
    double optimal_ce = 0.0;
    std::optional<double> det_accuracy;
    std::optional<double> cat_accuracy;
    std::optional<double> accuracy;  // addition mode
    MdlScore score;
    uint64_t vacuous_steps = 0;

    static std::string header();  // tab-separated column names
    std::string row() const;
};

EvalReport evaluate(const Network& net, const Corpus& corpus, const EncodingConfig& cfg,
                    double epsilon = 0.005);

}  // namespace mdlnn
