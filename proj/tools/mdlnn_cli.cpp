#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mdlnn/config_file.hpp"
#include "mdlnn/genome_io.hpp"
#include "mdlnn/islands.hpp"
#include "mdlnn/metrics.hpp"
#include "mdlnn/refnets.hpp"
#include "mdlnn/simulator.hpp"

using namespace mdlnn;

namespace {

struct EncOptions {
    std::string activations;
    bool extension = false;

    EncodingConfig resolve() const {
        if (activations.empty())
            return extension ? EncodingConfig::extended() : EncodingConfig::base_six();
        EncodingConfig cfg;
        cfg.extension = extension;
        std::istringstream is(activations);
        std::string name;
        while (std::getline(is, name, ',')) {
            auto a = activation_from_name(name);
            if (!a) throw CLI::ValidationError("--activations", "unknown activation \"" + name + "\"");
            cfg.enabled.push_back(*a);
        }
        std::sort(cfg.enabled.begin(), cfg.enabled.end());
        if (extension && !cfg.allows(Activation::Modulo3)) cfg.enabled.push_back(Activation::Modulo3);
        cfg.check();
        return cfg;
    }
};

void add_enc_options(CLI::App* cmd, EncOptions& opts) {
    cmd->add_option("--activations", opts.activations,
                    "comma list of enabled activations (default: the base six)");
    cmd->add_flag("--ext", opts.extension, "enable the Dyck-2 extension set (product units, mod3)");
}

TaskKind parse_task(const std::string& name) {
    auto t = task_from_name(name);
    if (!t) throw CLI::ValidationError("--task", "unknown task \"" + name + "\"");
    return *t;
}

std::vector<std::vector<double>> one_hot_inputs(TaskKind task, const std::string& body) {
    const std::string vocab = task_vocab(task);
    std::vector<std::vector<double>> inputs;
    inputs.push_back(std::vector<double>(vocab.size(), 0.0));
    inputs.back()[0] = 1.0;
    for (char c : body) {
        const auto pos = vocab.find(c);
        if (pos == std::string::npos)
            throw std::runtime_error(std::string("symbol '") + c + "' not in the " + task_name(task) +
                                     " vocabulary");
        inputs.push_back(std::vector<double>(vocab.size(), 0.0));
        inputs.back()[pos] = 1.0;
    }
    return inputs;
}

void print_trace_lm(const Network& net, TaskKind task, const std::string& body, std::ostream& out) {
    const std::string vocab = task_vocab(task);
    auto rows = trace(net, one_hot_inputs(task, body));
    out << "time";
    for (uint32_t u = 1; u <= net.n_units(); ++u) out << "\tu" << u;
    for (char c : vocab) out << "\tP(" << c << ")";
    out << "\n";
    for (const auto& row : rows) {
        out << row.time;
        for (double v : row.unit_values) out << "\t" << v;
        for (double p : row.distribution) out << "\t" << p;
        out << "\n";
    }
}

void print_trace_addition(const Network& net, uint32_t n, uint32_t m, std::ostream& out) {
    std::vector<std::vector<double>> inputs;
    for (size_t i = 0; i < Corpus::addition_steps(n, m); ++i)
        inputs.push_back({static_cast<double>((n >> i) & 1u), static_cast<double>((m >> i) & 1u)});
    auto rows = trace(net, inputs);
    out << "time";
    for (uint32_t u = 1; u <= net.n_units(); ++u) out << "\tu" << u;
    out << "\traw\tP(1)\n";
    for (const auto& row : rows) {
        out << row.time;
        for (double v : row.unit_values) out << "\t" << v;
        out << "\t" << row.raw_output[0] << "\t" << clamp_probability(row.raw_output[0]) << "\n";
    }
}

Network reference_for(TaskKind task) {
    if (task == TaskKind::Addition) return build_addition_reference();
    if (task == TaskKind::Dyck2) return build_dyck2_stack_reference();
    return build_counter_reference(task);
}

double default_margin(TaskKind task) {
    switch (task) {
        case TaskKind::AnBn: return 1e-6;
        case TaskKind::AnBnCn: return 1e-6;
        case TaskKind::AnB2n: return 2e-3;
        case TaskKind::AnBmCnm: return 3e-3;
        case TaskKind::Dyck1: return 1e-6;
        default: return 1e-6;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MDL neuroevolution of recurrent networks"};
    app.require_subcommand(1);

    // ---- gen-corpus ----
    std::string gc_task, gc_out, gc_exclude;
    uint64_t gc_size = 500, gc_seed = 1, gc_k = 0, gc_count = 50000;
    double gc_p = 0.3;
    bool gc_test = false, gc_inclusive = false;
    auto* gen = app.add_subcommand("gen-corpus", "generate a task corpus file");
    gen->add_option("--task", gc_task, "task name")->required();
    gen->add_option("--size", gc_size, "training sequences (addition: the K bound)")
        ->check(CLI::PositiveNumber);
    gen->add_option("--p", gc_p, "geometric/opening probability")->check(CLI::Range(1e-9, 1.0 - 1e-9));
    gen->add_option("--seed", gc_seed, "random seed");
    gen->add_option("--out", gc_out, "output path")->required();
    gen->add_flag("--test", gc_test, "generate the held-out test set instead");
    gen->add_option("--K", gc_k, "training max n (test mode)");
    gen->add_option("--exclude", gc_exclude, "training corpus to exclude (Dyck test mode)");
    gen->add_option("--count", gc_count, "Dyck test sequence count");
    gen->add_flag("--addition-inclusive", gc_inclusive, "addition training pairs from [0..K]^2");

    // ---- evolve ----
    std::string ev_corpus, ev_config, ev_out;
    bool ev_resume = false;
    int ev_workers = -1;
    auto* evolve = app.add_subcommand("evolve", "run the island-model genetic search");
    evolve->add_option("--corpus", ev_corpus, "training corpus file")->required();
    evolve->add_option("--config", ev_config, "search config file")->required();
    evolve->add_option("--out", ev_out, "output directory")->required();
    evolve->add_flag("--resume", ev_resume, "resume from the checkpoints in the output directory");
    evolve->add_option("--workers", ev_workers, "worker threads (overrides config; 1 = serial)");

    // ---- eval ----
    std::string eval_genome, eval_corpus;
    double eval_eps = 0.005;
    EncOptions eval_enc;
    auto* evalc = app.add_subcommand("eval", "evaluate a genome on a corpus (summary report row)");
    evalc->add_option("--genome", eval_genome, "genome file")->required();
    evalc->add_option("--corpus", eval_corpus, "corpus file")->required();
    evalc->add_option("--epsilon", eval_eps, "categorical accuracy threshold");
    add_enc_options(evalc, eval_enc);

    // ---- trace ----
    std::string tr_genome, tr_task, tr_sequence;
    std::vector<uint32_t> tr_pair;
    EncOptions tr_enc;
    auto* tracec = app.add_subcommand("trace", "print the per-step unit value table");
    tracec->add_option("--genome", tr_genome, "genome file")->required();
    tracec->add_option("--task", tr_task, "task name (fixes vocabulary)")->required();
    tracec->add_option("--sequence", tr_sequence, "symbol sequence, leading '#' optional");
    tracec->add_option("--pair", tr_pair, "addition operands n m")->expected(2);
    add_enc_options(tracec, tr_enc);

    // ---- export-dot ----
    std::string dot_genome, dot_out;
    EncOptions dot_enc;
    auto* dotc = app.add_subcommand("export-dot", "emit a Graphviz description of a genome");
    dotc->add_option("--genome", dot_genome, "genome file")->required();
    dotc->add_option("--out", dot_out, "output path (default: stdout)");
    add_enc_options(dotc, dot_enc);

    // ---- encode / decode ----
    std::string enc_text, enc_out;
    EncOptions enc_enc;
    auto* encodec = app.add_subcommand("encode", "text network form -> canonical genome file");
    encodec->add_option("--text", enc_text, "network text file")->required();
    encodec->add_option("--out", enc_out, "genome output path")->required();
    add_enc_options(encodec, enc_enc);

    std::string dec_genome, dec_out;
    bool dec_bits = false;
    EncOptions dec_enc;
    auto* decodec = app.add_subcommand("decode", "genome file -> text form (or raw bits)");
    decodec->add_option("--genome", dec_genome, "genome file")->required();
    decodec->add_option("--out", dec_out, "write the text form here (default: stdout)");
    decodec->add_flag("--bits", dec_bits, "print the raw bitstring instead");
    add_enc_options(decodec, dec_enc);

    // ---- verify-ref ----
    std::string vr_task;
    uint64_t vr_nmax = 1000;
    double vr_margin = -1.0;
    auto* verifyc = app.add_subcommand("verify-ref", "verify a reference network against its language");
    verifyc->add_option("--task", vr_task, "anbn|anbncn|anb2n|anbmcnm|dyck1")->required();
    verifyc->add_option("--n-max", vr_nmax, "verification bound");
    verifyc->add_option("--margin", vr_margin, "override the default margin");

    // ---- make-ref ----
    std::string mr_task, mr_out, mr_text;
    auto* makeref = app.add_subcommand("make-ref", "write a reference network as a genome file");
    makeref->add_option("--task", mr_task, "task name (incl. dyck2, addition)")->required();
    makeref->add_option("--out", mr_out, "genome output path")->required();
    makeref->add_option("--text", mr_text, "also write the text form here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*gen) {
            const TaskKind task = parse_task(gc_task);
            Rng rng(gc_seed);
            Corpus corpus;
            GenOptions opts;
            opts.addition_inclusive = gc_inclusive;
            opts.dyck_test_count = gc_count;
            if (gc_test) {
                Corpus exclude;
                const Corpus* exclude_ptr = nullptr;
                if (!gc_exclude.empty()) {
                    exclude = load_corpus(gc_exclude);
                    exclude_ptr = &exclude;
                    if (gc_k == 0) gc_k = exclude.realized_K;
                }
                corpus = generate_test(task, gc_k, rng, exclude_ptr, opts);
            } else {
                corpus = generate_training(task, gc_size, gc_p, rng, opts);
            }
            corpus.seed = gc_seed;
            corpus.p = gc_p;
            save_corpus(corpus, gc_out);
            std::cout << "wrote " << corpus.size() << " sequences to " << gc_out
                      << " (realized K = " << corpus.realized_K << ")\n";
        } else if (*evolve) {
            IslandConfig cfg = load_island_config(ev_config);
            if (const char* env = std::getenv("MDLNN_WORKERS"))
                cfg.workers = std::atoi(env);
            if (ev_workers >= 0) cfg.workers = ev_workers;  // flag beats env
            cfg.checkpoint_dir = ev_out + "/checkpoints";
            Corpus corpus = load_corpus(ev_corpus);
            std::filesystem::create_directories(ev_out);
            if (cfg.migration_minutes > 0.0)
                std::cout << "note: wall-clock migration trigger enabled; run is not reproducible\n";
            IslandsResult result = ev_resume ? resume_islands(corpus, cfg) : run_islands(corpus, cfg);
            save_genome(result.best.net, cfg.ga.enc, ev_out + "/best.genome");
            save_network_text(result.best.net, ev_out + "/best.net");
            for (size_t i = 0; i < result.logs.size(); ++i) {
                std::ofstream log(ev_out + "/island_" + std::to_string(i) + ".log.tsv",
                                  ev_resume ? std::ios::app : std::ios::out);
                log << "generation\tbest_total\tbest_G\tbest_DG\tmean_total\n";
                for (const auto& entry : result.logs[i])
                    log << entry.generation << '\t' << entry.best.total() << '\t'
                        << entry.best.grammar_bits << '\t' << entry.best.data_bits << '\t'
                        << entry.mean_total << '\n';
            }
            std::cout << result.best.score.report_line() << "\n";
            std::cout << "best genome written to " << ev_out << "/best.genome\n";
        } else if (*evalc) {
            Corpus corpus = load_corpus(eval_corpus);
            EncodingConfig cfg = eval_enc.resolve();
            Network net = load_genome(eval_genome, cfg);
            EvalReport report = evaluate(net, corpus, cfg, eval_eps);
            std::cout << EvalReport::header() << "\n" << report.row() << "\n";
            if (report.vacuous_steps > 0)
                std::cout << "note: " << report.vacuous_steps
                          << " steps had an empty >=epsilon set (vacuous pass)\n";
        } else if (*tracec) {
            const TaskKind task = parse_task(tr_task);
            EncodingConfig cfg = tr_enc.resolve();
            Network net = load_genome(tr_genome, cfg);
            if (task == TaskKind::Addition) {
                if (tr_pair.size() != 2)
                    throw CLI::ValidationError("--pair", "addition tracing needs --pair n m");
                print_trace_addition(net, tr_pair[0], tr_pair[1], std::cout);
            } else {
                std::string body = tr_sequence;
                if (!body.empty() && body[0] == '#') body.erase(0, 1);
                print_trace_lm(net, task, body, std::cout);
            }
        } else if (*dotc) {
            EncodingConfig cfg = dot_enc.resolve();
            Network net = load_genome(dot_genome, cfg);
            if (dot_out.empty()) {
                export_dot(net, std::cout);
            } else {
                std::ofstream out(dot_out);
                if (!out) throw std::runtime_error("cannot open " + dot_out);
                export_dot(net, out);
            }
        } else if (*encodec) {
            EncodingConfig cfg = enc_enc.resolve();
            Network net = load_network_text(enc_text);
            save_genome(net, cfg, enc_out);
            std::cout << "wrote " << enc_out << " (" << grammar_cost(net, cfg) << " bits)\n";
        } else if (*decodec) {
            EncodingConfig cfg = dec_enc.resolve();
            Network net = load_genome(dec_genome, cfg);
            if (dec_bits) {
                std::cout << encode_network(net, cfg).str() << "\n";
            } else if (dec_out.empty()) {
                std::cout << network_to_text(net);
            } else {
                save_network_text(net, dec_out);
            }
        } else if (*verifyc) {
            const TaskKind task = parse_task(vr_task);
            const double margin = vr_margin > 0.0 ? vr_margin : default_margin(task);
            VerifyReport report = verify_language(reference_for(task), task, vr_nmax, margin);
            std::cout << report.text();
            if (!report.pass) return 2;
        } else if (*makeref) {
            const TaskKind task = parse_task(mr_task);
            const Network net = reference_for(task);
            save_genome(net, reference_encoding(task), mr_out);
            if (!mr_text.empty()) save_network_text(net, mr_text);
            std::cout << "wrote " << mr_out << " (" << grammar_cost(net, reference_encoding(task))
                      << " bits)\n";
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
