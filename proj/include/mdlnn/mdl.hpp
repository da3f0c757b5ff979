#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "mdlnn/bitstring.hpp"
#include "mdlnn/codec.hpp"
#include "mdlnn/simulator.hpp"
#include "mdlnn/tasks.hpp"

namespace mdlnn {

// Fitness triple. data_bits is +infinity when any target gets probability 0;
// infinity orders worse than every finite total, ties fall back to grammar
// bits and then to the canonical encoding (handled where genomes are known).
struct MdlScore {
    uint64_t grammar_bits = 0;
    double data_bits = 0.0;

    double total() const { return static_cast<double>(grammar_bits) + data_bits; }
    bool finite() const { return std::isfinite(data_bits); }

    std::string report_line() const;  // "G=<int> D:G=<float> total=<float>"
};

// Orders by total then grammar bits. Callers that need the full total order
// additionally compare canonical encodings (see search).
inline bool score_less(const MdlScore& a, const MdlScore& b) {
    const double ta = a.total(), tb = b.total();
    if (ta != tb) return ta < tb;
    return a.grammar_bits < b.grammar_bits;
}

// |D:G| in bits: total surprisal of the corpus targets under the network's
// normalized predictions (language modeling) or clamped raw output
// (addition). Poisoned steps cost the uniform fallback.
double data_cost(const CompiledNet& net, const Corpus& corpus);
double data_cost(const Network& net, const Corpus& corpus);

MdlScore mdl_score(const Network& net, const Corpus& corpus, const EncodingConfig& cfg);

}  // namespace mdlnn
