#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdlnn/codec.hpp"
#include "mdlnn/network.hpp"
#include "mdlnn/rational.hpp"
#include "mdlnn/tasks.hpp"

namespace mdlnn {

// Hand-built reference networks, one per task, with fully closed-form
// behaviour. Unit layout follows the positional convention (inputs, then
// outputs, then hidden).

// Carry in a floor unit (c = n_i + m_i + floor(c_prev/2) via self-recurrence
// at weight 1/2), output ((c-1)^2-1)^2 through two square units.
Network build_addition_reference();

// Base-3 stack: product-gated push (3M + v) / pop (floor(M/3)) paths around
// an integer memory unit, mod3 top-of-stack readout, indicator heads.
Network build_dyck2_stack_reference();

// Counter networks of Figs. 3-6 and 8 (AnBn, AnBnCn, AnB2n, AnBmCnm, Dyck1).
Network build_counter_reference(TaskKind task);

// Encoding configuration each reference is expressed in.
EncodingConfig reference_encoding(TaskKind task);

// --- Exact evaluation (rational arithmetic) ------------------------------

// Unit value in exact form. Sigmoid outputs are carried symbolically as
// sigmoid(arg); every other activation is rational-closed.
struct ExactValue {
    bool sigmoid = false;
    Rational v;  // the value, or the sigmoid argument when sigmoid is set

    bool equals(const Rational& r) const { return !sigmoid && ratops::cmp(v, r) == 0; }
    bool equals_sigmoid_of(const Rational& arg) const { return sigmoid && ratops::cmp(v, arg) == 0; }
    std::string str() const { return sigmoid ? "sigmoid(" + v.str() + ")" : v.str(); }
};

class ExactEvaluator {
public:
    explicit ExactEvaluator(const Network& net);
    void reset();
    // One-hot language-modeling step; returns post-activation values.
    const std::vector<ExactValue>& step_symbol(uint8_t sym);
    const std::vector<ExactValue>& step(const std::vector<Rational>& inputs);
    // Saved/restored previous-step values let verification fork runs.
    const std::vector<ExactValue>& saved_state() const { return prev_; }
    void restore_state(std::vector<ExactValue> state) { prev_ = std::move(state); }

private:
    struct Edge {
        uint32_t source;
        Rational weight;
        bool recurrent;
    };
    struct Node {
        uint32_t index;
        Activation activation;
        Aggregation aggregation;
        bool has_bias;
        Rational bias;
        std::vector<Edge> incoming;
    };
    uint32_t n_inputs_, n_units_;
    std::vector<Node> plan_;
    std::vector<ExactValue> prev_, curr_;
};

// Verifies a counter reference's trace against its closed-form unit values
// in exact rational arithmetic; throws std::runtime_error naming the first
// mismatching unit/step. m is used by AnBmCnm only.
void check_reference_trace_exact(TaskKind task, const Network& net, uint64_t n, uint64_t m = 1);

// --- Bounded language verification ----------------------------------------

struct VerifyReport {
    TaskKind task;
    uint64_t n_max = 0;
    double margin = 0.0;
    bool pass = false;
    double max_deviation = 0.0;        // L-inf against the oracle distribution
    double max_support_deficit = 0.0;  // 1 - probability mass on oracle support
    uint64_t sequences_checked = 0;
    uint64_t steps_checked = 0;
    std::string first_failure;  // empty when pass
    std::string closure_note;

    std::string text() const;
    std::string summary_line() const;  // one-line machine-readable form
};

// Checks every sequence with n (and m) up to n_max for the counter tasks;
// for Dyck-1, walks the depth state space up to depth n_max and establishes
// the state-closure argument. Networks are stepped in exact rational
// arithmetic (doubles only at the final normalize-and-compare), since the
// verification margins sit below double accumulation noise. Counter tasks pass on
// the L-inf margin; Dyck-1 passes on the support-mass margin. The
// a^n b^m c^(n+m) grid shares prefix runs and groups c-phase runs by the
// exact recurrent-source state, which keeps full coverage near-linear.
VerifyReport verify_language(const Network& net, TaskKind task, uint64_t n_max, double margin);

}  // namespace mdlnn
