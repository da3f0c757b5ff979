#include "mdlnn/tasks.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mdlnn {

const char* task_name(TaskKind task) {
    switch (task) {
        case TaskKind::AnBn: return "anbn";
        case TaskKind::AnBnCn: return "anbncn";
        case TaskKind::AnBnCnDn: return "anbncndn";
        case TaskKind::AnB2n: return "anb2n";
        case TaskKind::AnBmCnm: return "anbmcnm";
        case TaskKind::Dyck1: return "dyck1";
        case TaskKind::Dyck2: return "dyck2";
        case TaskKind::Addition: return "addition";
    }
    return "?";
}

std::optional<TaskKind> task_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(TaskKind::Addition); ++i) {
        auto t = static_cast<TaskKind>(i);
        if (name == task_name(t)) return t;
    }
    return std::nullopt;
}

std::string task_vocab(TaskKind task) {
    switch (task) {
        case TaskKind::AnBn: return "#ab";
        case TaskKind::AnBnCn: return "#abc";
        case TaskKind::AnBnCnDn: return "#abcd";
        case TaskKind::AnB2n: return "#ab";
        case TaskKind::AnBmCnm: return "#abc";
        case TaskKind::Dyck1: return "#[]";
        case TaskKind::Dyck2: return "#[]()";
        case TaskKind::Addition: return "";
    }
    return "";
}

OracleState::OracleState(TaskKind task, double p)
    : task_(task), p_(p), vocab_size_(task_vocab(task).size()) {
    if (task == TaskKind::Addition)
        throw std::invalid_argument("OracleState: addition is not a language-modeling task");
}

void OracleState::reset() {
    count_a_ = count_b_ = count_c_ = count_d_ = 0;
    stack_.clear();
}

void OracleState::next_dist(std::vector<double>& out) const {
    out.assign(vocab_size_, 0.0);
    const double p = p_;
    switch (task_) {
        case TaskKind::AnBn:
            if (count_a_ == 0) out[1] = 1.0;                                // first a is forced
            else if (count_b_ == 0) { out[1] = 1.0 - p; out[2] = p; }       // geometric continuation
            else if (count_b_ < count_a_) out[2] = 1.0;
            else out[0] = 1.0;
            break;
        case TaskKind::AnBnCn:
            if (count_a_ == 0) out[1] = 1.0;
            else if (count_b_ == 0) { out[1] = 1.0 - p; out[2] = p; }
            else if (count_b_ < count_a_) out[2] = 1.0;
            else if (count_c_ < count_a_) out[3] = 1.0;
            else out[0] = 1.0;
            break;
        case TaskKind::AnBnCnDn:
            if (count_a_ == 0) out[1] = 1.0;
            else if (count_b_ == 0) { out[1] = 1.0 - p; out[2] = p; }
            else if (count_b_ < count_a_) out[2] = 1.0;
            else if (count_c_ < count_a_) out[3] = 1.0;
            else if (count_d_ < count_a_) out[4] = 1.0;
            else out[0] = 1.0;
            break;
        case TaskKind::AnB2n:
            if (count_a_ == 0) out[1] = 1.0;
            else if (count_b_ == 0) { out[1] = 1.0 - p; out[2] = p; }
            else if (count_b_ < 2 * count_a_) out[2] = 1.0;
            else out[0] = 1.0;
            break;
        case TaskKind::AnBmCnm:
            if (count_a_ == 0) out[1] = 1.0;
            else if (count_b_ == 0) { out[1] = 1.0 - p; out[2] = p; }
            else if (count_c_ == 0) { out[2] = 1.0 - p; out[3] = p; }
            else if (count_c_ < count_a_ + count_b_) out[3] = 1.0;
            else out[0] = 1.0;
            break;
        case TaskKind::Dyck1:
            out[1] = p;
            if (!stack_.empty()) out[2] = 1.0 - p;
            else out[0] = 1.0 - p;
            break;
        case TaskKind::Dyck2:
            out[1] = p / 2.0;
            out[3] = p / 2.0;
            if (stack_.empty()) out[0] = 1.0 - p;
            else if (stack_.back() == 1) out[2] = 1.0 - p;
            else out[4] = 1.0 - p;
            break;
        case TaskKind::Addition:
            break;
    }
}

std::vector<double> OracleState::next_dist() const {
    std::vector<double> out;
    next_dist(out);
    return out;
}

bool OracleState::sequence_may_end() const {
    std::vector<double> d;
    next_dist(d);
    return d[0] > 0.0;
}

void OracleState::advance(uint8_t sym) {
    std::vector<double> d;
    next_dist(d);
    if (sym >= d.size() || d[sym] <= 0.0)
        throw InvalidPrefixError(std::string("symbol '") + task_vocab(task_)[sym < d.size() ? sym : 0] +
                                 "' impossible at this point of a " + task_name(task_) + " sequence");
    switch (task_) {
        case TaskKind::AnBn:
        case TaskKind::AnBnCn:
        case TaskKind::AnBnCnDn:
        case TaskKind::AnB2n:
        case TaskKind::AnBmCnm:
            if (sym == 1) ++count_a_;
            else if (sym == 2) ++count_b_;
            else if (sym == 3) ++count_c_;
            else if (sym == 4) ++count_d_;
            break;
        case TaskKind::Dyck1:
            if (sym == 1) stack_.push_back(1);
            else if (sym == 2) stack_.pop_back();
            break;
        case TaskKind::Dyck2:
            if (sym == 1) stack_.push_back(1);
            else if (sym == 3) stack_.push_back(2);
            else if (sym == 2 || sym == 4) stack_.pop_back();
            break;
        case TaskKind::Addition:
            break;
    }
}

size_t Corpus::addition_steps(uint32_t n, uint32_t m) {
    uint64_t sum = static_cast<uint64_t>(n) + m;
    size_t len = 0;
    while (sum) { ++len; sum >>= 1; }
    return len == 0 ? 1 : len;
}

size_t Corpus::total_steps() const {
    size_t steps = 0;
    if (addition_mode()) {
        for (const auto& [n, m] : pairs) steps += addition_steps(n, m);
    } else {
        for (const auto& s : sequences) steps += s.size() + 1;
    }
    return steps;
}

int sample_geometric(double p, Rng& rng) { return rng.geometric(p); }

static uint8_t sym_index(TaskKind task, char c) {
    const std::string vocab = task_vocab(task);
    auto pos = vocab.find(c);
    if (pos == std::string::npos)
        throw InvalidPrefixError(std::string("symbol '") + c + "' not in the " + task_name(task) + " vocabulary");
    return static_cast<uint8_t>(pos);
}

static std::string sample_dyck_body(TaskKind task, double p, Rng& rng) {
    std::string body;
    std::vector<uint8_t> stack;
    for (;;) {
        if (rng.chance(p)) {
            if (task == TaskKind::Dyck1) {
                body.push_back('[');
                stack.push_back(1);
            } else if (rng.chance(0.5)) {
                body.push_back('[');
                stack.push_back(1);
            } else {
                body.push_back('(');
                stack.push_back(2);
            }
        } else if (stack.empty()) {
            return body;
        } else {
            body.push_back(stack.back() == 1 ? ']' : ')');
            stack.pop_back();
        }
    }
}

static size_t dyck_max_depth(const std::string& body) {
    size_t depth = 0, max_depth = 0;
    for (char c : body) {
        if (c == '[' || c == '(') max_depth = std::max(max_depth, ++depth);
        else --depth;
    }
    return max_depth;
}

Corpus generate_training(TaskKind task, uint64_t size, double p, Rng& rng, const GenOptions& opts) {
    if (size == 0) throw std::invalid_argument("generate_training: size must be positive");
    Corpus corpus;
    corpus.task = task;
    corpus.p = p;
    corpus.kind = "train";
    corpus.requested_size = size;

    switch (task) {
        case TaskKind::AnBn:
        case TaskKind::AnBnCn:
        case TaskKind::AnBnCnDn:
        case TaskKind::AnB2n: {
            uint64_t k_max = 0;
            for (uint64_t i = 0; i < size; ++i) {
                const uint64_t n = static_cast<uint64_t>(rng.geometric(p));
                k_max = std::max(k_max, n);
                std::string body(n, 'a');
                if (task == TaskKind::AnB2n) body.append(2 * n, 'b');
                else body.append(n, 'b');
                if (task == TaskKind::AnBnCn || task == TaskKind::AnBnCnDn) body.append(n, 'c');
                if (task == TaskKind::AnBnCnDn) body.append(n, 'd');
                corpus.sequences.push_back(std::move(body));
            }
            corpus.realized_K = k_max;
            break;
        }
        case TaskKind::AnBmCnm: {
            uint64_t k_max = 0;
            for (uint64_t i = 0; i < size; ++i) {
                const uint64_t n = static_cast<uint64_t>(rng.geometric(p));
                const uint64_t m = static_cast<uint64_t>(rng.geometric(p));
                k_max = opts.joint_pair_max ? std::max({k_max, n, m}) : std::max(k_max, n);
                std::string body(n, 'a');
                body.append(m, 'b');
                body.append(n + m, 'c');
                corpus.sequences.push_back(std::move(body));
            }
            corpus.realized_K = k_max;
            break;
        }
        case TaskKind::Dyck1:
        case TaskKind::Dyck2: {
            uint64_t depth_max = 0;
            for (uint64_t i = 0; i < size; ++i) {
                std::string body = sample_dyck_body(task, p, rng);
                depth_max = std::max(depth_max, static_cast<uint64_t>(dyck_max_depth(body)));
                corpus.sequences.push_back(std::move(body));
            }
            corpus.realized_K = depth_max;
            break;
        }
        case TaskKind::Addition: {
            const uint32_t k = static_cast<uint32_t>(size);
            const uint32_t hi = opts.addition_inclusive ? k : k - 1;
            for (uint32_t n = 0; n <= hi; ++n)
                for (uint32_t m = 0; m <= hi; ++m) corpus.pairs.emplace_back(n, m);
            corpus.realized_K = hi;
            break;
        }
    }
    return corpus;
}

Corpus generate_test(TaskKind task, uint64_t k_train_max, Rng& rng, const Corpus* exclude,
                     const GenOptions& opts) {
    Corpus corpus;
    corpus.task = task;
    corpus.kind = "test";
    corpus.p = exclude ? exclude->p : 0.3;

    switch (task) {
        case TaskKind::AnBn:
        case TaskKind::AnBnCn:
        case TaskKind::AnBnCnDn:
        case TaskKind::AnB2n: {
            for (uint64_t n = k_train_max + 1; n <= k_train_max + 1001; ++n) {
                std::string body(n, 'a');
                if (task == TaskKind::AnB2n) body.append(2 * n, 'b');
                else body.append(n, 'b');
                if (task == TaskKind::AnBnCn || task == TaskKind::AnBnCnDn) body.append(n, 'c');
                if (task == TaskKind::AnBnCnDn) body.append(n, 'd');
                corpus.sequences.push_back(std::move(body));
            }
            corpus.realized_K = k_train_max + 1001;
            break;
        }
        case TaskKind::AnBmCnm: {
            // 2,500 unseen pairs: the 50x50 square after the training max.
            for (uint64_t n = k_train_max + 1; n <= k_train_max + 50; ++n)
                for (uint64_t m = k_train_max + 1; m <= k_train_max + 50; ++m) {
                    std::string body(n, 'a');
                    body.append(m, 'b');
                    body.append(n + m, 'c');
                    corpus.sequences.push_back(std::move(body));
                }
            corpus.realized_K = k_train_max + 50;
            break;
        }
        case TaskKind::Dyck1:
        case TaskKind::Dyck2: {
            std::unordered_set<std::string> seen;
            if (exclude)
                for (const auto& s : exclude->sequences) seen.insert(s);
            uint64_t depth_max = 0;
            while (corpus.sequences.size() < opts.dyck_test_count) {
                std::string body = sample_dyck_body(task, corpus.p, rng);
                if (seen.count(body)) continue;  // unseen w.r.t. training only
                depth_max = std::max(depth_max, static_cast<uint64_t>(dyck_max_depth(body)));
                corpus.sequences.push_back(std::move(body));
            }
            corpus.realized_K = depth_max;
            break;
        }
        case TaskKind::Addition: {
            const uint32_t lo = static_cast<uint32_t>(k_train_max) + 1;
            const uint32_t hi = static_cast<uint32_t>(k_train_max) + 250;
            for (uint32_t n = lo; n <= hi; ++n)
                for (uint32_t m = lo; m <= hi; ++m) corpus.pairs.emplace_back(n, m);
            corpus.realized_K = hi;
            break;
        }
    }
    corpus.requested_size = corpus.size();
    return corpus;
}

Corpus make_addition_corpus(uint32_t lo, uint32_t hi) {
    Corpus corpus;
    corpus.task = TaskKind::Addition;
    corpus.kind = "custom";
    for (uint32_t n = lo; n <= hi; ++n)
        for (uint32_t m = lo; m <= hi; ++m) corpus.pairs.emplace_back(n, m);
    corpus.realized_K = hi;
    corpus.requested_size = corpus.pairs.size();
    return corpus;
}

std::vector<double> oracle_next(TaskKind task, const std::string& prefix, double p) {
    if (prefix.empty() || prefix[0] != '#')
        throw InvalidPrefixError("prefix must start with '#'");
    OracleState state(task, p);
    for (size_t i = 1; i < prefix.size(); ++i) state.advance(sym_index(task, prefix[i]));
    return state.next_dist();
}

std::vector<bool> deterministic_mask(TaskKind task, const std::string& body, double p) {
    OracleState state(task, p);
    std::vector<bool> mask(body.size() + 1);
    std::vector<double> dist;
    for (size_t i = 0; i <= body.size(); ++i) {
        state.next_dist(dist);
        const double top = *std::max_element(dist.begin(), dist.end());
        mask[i] = top == 1.0;
        if (i < body.size()) state.advance(sym_index(task, body[i]));
    }
    return mask;
}

bool is_in_language(TaskKind task, const std::string& body, double p) {
    try {
        OracleState state(task, p);
        for (char c : body) state.advance(sym_index(task, c));
        return state.sequence_may_end();
    } catch (const InvalidPrefixError&) {
        return false;
    }
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "mdlnn-corpus 1\n";
    out << "task " << task_name(corpus.task) << "\n";
    out << "kind " << corpus.kind << "\n";
    out << "p " << corpus.p << "\n";
    out << "seed " << corpus.seed << "\n";
    out << "size " << corpus.requested_size << "\n";
    out << "K " << corpus.realized_K << "\n";
    out << "---\n";
    if (corpus.addition_mode()) {
        for (const auto& [n, m] : corpus.pairs) out << n << " " << m << "\n";
    } else {
        for (const auto& s : corpus.sequences) out << "#" << s << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file " + path);
    std::string line;
    if (!std::getline(in, line) || line != "mdlnn-corpus 1")
        throw std::runtime_error(path + ": not a corpus file (bad magic line)");
    Corpus corpus;
    bool have_task = false;
    while (std::getline(in, line)) {
        if (line == "---") break;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "task") {
            std::string name;
            ls >> name;
            auto t = task_from_name(name);
            if (!t) throw std::runtime_error(path + ": unknown task " + name);
            corpus.task = *t;
            have_task = true;
        } else if (key == "kind") ls >> corpus.kind;
        else if (key == "p") ls >> corpus.p;
        else if (key == "seed") ls >> corpus.seed;
        else if (key == "size") ls >> corpus.requested_size;
        else if (key == "K") ls >> corpus.realized_K;
        else throw std::runtime_error(path + ": unknown corpus header key " + key);
        if (!ls) throw std::runtime_error(path + ": malformed header line: " + line);
    }
    if (!have_task) throw std::runtime_error(path + ": missing task header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (corpus.addition_mode()) {
            std::istringstream ls(line);
            uint32_t n, m;
            if (!(ls >> n >> m)) throw std::runtime_error(path + ": malformed pair line: " + line);
            corpus.pairs.emplace_back(n, m);
        } else {
            if (line[0] != '#') throw std::runtime_error(path + ": sequence must start with '#': " + line);
            std::string body = line.substr(1);
            if (!is_in_language(corpus.task, body, corpus.p))
                throw std::runtime_error(path + ": sequence not in the " +
                                         std::string(task_name(corpus.task)) + " language: " + line);
            corpus.sequences.push_back(std::move(body));
        }
    }
    return corpus;
}

}  // namespace mdlnn
