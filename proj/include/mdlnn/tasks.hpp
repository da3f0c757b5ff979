#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mdlnn/rng.hpp"

namespace mdlnn {

enum class TaskKind : uint8_t { AnBn, AnBnCn, AnBnCnDn, AnB2n, AnBmCnm, Dyck1, Dyck2, Addition };

const char* task_name(TaskKind task);
std::optional<TaskKind> task_from_name(const std::string& name);

// Symbol order is the one-hot order; '#' is always symbol 0.
std::string task_vocab(TaskKind task);
inline bool task_is_lm(TaskKind task) { return task != TaskKind::Addition; }

struct InvalidPrefixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact conditional next-symbol distribution of a task's generative process,
// advanced symbol by symbol. Freshly constructed state has consumed the
// leading '#'.
class OracleState {
public:
    OracleState(TaskKind task, double p);

    void reset();
    void next_dist(std::vector<double>& out) const;
    std::vector<double> next_dist() const;
    void advance(uint8_t sym);  // throws InvalidPrefixError on impossible symbols
    bool sequence_may_end() const;

private:
    TaskKind task_;
    double p_;
    size_t vocab_size_;
    uint64_t count_a_ = 0, count_b_ = 0, count_c_ = 0, count_d_ = 0;
    std::vector<uint8_t> stack_;  // Dyck: 1 = bracket, 2 = parenthesis
};

// One task corpus. Language-modeling sequences are stored as their symbol
// bodies (without the leading '#'); addition corpora store addend pairs.
struct Corpus {
    TaskKind task = TaskKind::AnBn;
    double p = 0.3;
    std::string kind = "train";
    uint64_t seed = 0;
    uint64_t requested_size = 0;
    uint64_t realized_K = 0;

    std::vector<std::string> sequences;                    // LM mode
    std::vector<std::pair<uint32_t, uint32_t>> pairs;      // addition mode

    bool addition_mode() const { return task == TaskKind::Addition; }
    size_t vocab_size() const { return task_vocab(task).size(); }
    size_t size() const { return addition_mode() ? pairs.size() : sequences.size(); }
    size_t total_steps() const;
    static size_t addition_steps(uint32_t n, uint32_t m);  // bitlen(n+m), at least 1
};

struct GenOptions {
    bool addition_inclusive = false;  // train pairs from [0..K]^2 instead of [0..K-1]^2
    bool joint_pair_max = true;       // a^n b^m c^(n+m): K = max over n and m jointly
    uint64_t dyck_test_count = 50000;
};

int sample_geometric(double p, Rng& rng);

// Training corpora per task. For addition, `size` is the K bound of the
// exhaustive pair square. Prints nothing; realized_K lands in the corpus.
Corpus generate_training(TaskKind task, uint64_t size, double p, Rng& rng,
                         const GenOptions& opts = {});

// Test corpora: deterministic enumeration for counter/addition tasks,
// rejection-sampled unseen sequences for Dyck (exclude = training corpus).
Corpus generate_test(TaskKind task, uint64_t k_train_max, Rng& rng,
                     const Corpus* exclude = nullptr, const GenOptions& opts = {});

// Exhaustive addition pair square [lo..hi]^2 (verification helper).
Corpus make_addition_corpus(uint32_t lo, uint32_t hi);

// Exact next-symbol distribution after a prefix given in symbol form
// (leading '#' required). Throws InvalidPrefixError off-language.
std::vector<double> oracle_next(TaskKind task, const std::string& prefix, double p = 0.3);

// True exactly where the oracle distribution is a point mass. `body`
// excludes the leading '#'; the mask covers body.size() + 1 steps.
std::vector<bool> deterministic_mask(TaskKind task, const std::string& body, double p = 0.3);

// Language membership (independent oracle for generation tests).
bool is_in_language(TaskKind task, const std::string& body, double p = 0.3);

void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace mdlnn
