#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbo/bistochastic.hpp"
#include "qbo/dynamics.hpp"
#include "qbo/errors.hpp"
#include "qbo/json_io.hpp"
#include "qbo/operators.hpp"
#include "qbo/polytope.hpp"
#include "qbo/sampling.hpp"
#include "qbo/simplex.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCounterexample = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qbo::ValidationError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw qbo::ValidationError("cannot read " + path);
    return buf.str();
}

// Temp-then-rename so readers never observe a half-written report.
void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw qbo::ValidationError("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw qbo::ValidationError("cannot write " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw qbo::ValidationError("cannot move " + tmp + " to " + path);
    }
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty())
        std::cout << content;
    else
        write_file_atomic(out_path, content);
}

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> values;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw qbo::ValidationError("not a number: \"" + token + "\"");
        }
        while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
            ++used;
        if (used != token.size())
            throw qbo::ValidationError("not a number: \"" + token + "\"");
        values.push_back(v);
    }
    if (values.empty()) throw qbo::ValidationError("empty vector");
    return values;
}

qbo::OperatorSpec load_operator(const std::string& path) {
    return qbo::parse_operator_text(read_file(path));
}

// Base path plus index, keeping a .json/.csv extension split: "t" -> "t_3".
std::string indexed(const std::string& base, std::size_t i) {
    return base + "_" + std::to_string(i);
}

struct IterateOptions {
    std::string operator_file;
    std::string start = "";
    std::size_t max_steps = 10000;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    qbo::DynamicsTolerances tol;
};

int run_iterate(const IterateOptions& opt) {
    const qbo::OperatorSpec op = load_operator(opt.operator_file);
    const std::size_t m = op.dim();

    std::vector<qbo::SimplexPoint> starts;
    if (opt.start == "vertices") {
        for (std::size_t i = 0; i < m; ++i) starts.push_back(qbo::SimplexPoint::vertex(m, i));
    } else if (opt.start.rfind("random:", 0) == 0) {
        const std::string count_text = opt.start.substr(7);
        std::size_t n = 0;
        try {
            n = static_cast<std::size_t>(std::stoull(count_text));
        } catch (const std::exception&) {
            throw qbo::ValidationError("bad start count: \"" + count_text + "\"");
        }
        if (n == 0) throw qbo::ValidationError("random start count must be positive");
        qbo::CounterRng rng(opt.seed);
        for (std::size_t i = 0; i < n; ++i) starts.push_back(qbo::dirichlet_sample(rng, m));
    } else if (!opt.start.empty()) {
        starts.push_back(qbo::SimplexPoint::load(parse_vector(opt.start)));
    } else {
        throw qbo::ValidationError("--start is required (vector, \"vertices\", or \"random:N\")");
    }

    std::vector<qbo::TrajectoryRecord> records;
    records.reserve(starts.size());
    for (const auto& x0 : starts)
        records.push_back(qbo::iterate(op, x0, opt.max_steps, opt.tol, /*record_full=*/true));

    const bool multi = records.size() > 1;
    if (!opt.out.empty()) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            const std::string base = multi ? indexed(opt.out, i + 1) : opt.out;
            write_file_atomic(base + ".csv", qbo::trajectory_to_csv(records[i]));
            write_file_atomic(base + ".json",
                              qbo::json_to_text(qbo::trajectory_verdict_to_json(records[i])));
        }
    }
    if (opt.format == "csv") {
        for (const auto& rec : records) std::cout << qbo::trajectory_to_csv(rec);
    } else if (multi) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& rec : records) arr.push_back(qbo::trajectory_verdict_to_json(rec));
        std::cout << qbo::json_to_text(arr);
    } else {
        std::cout << qbo::json_to_text(qbo::trajectory_verdict_to_json(records.front()));
    }
    return kExitOk;
}

int run_check(const std::string& operator_file, std::size_t budget, std::uint64_t seed,
              const std::string& out) {
    const qbo::OperatorSpec op = load_operator(operator_file);
    const qbo::CertificateResult cert = qbo::certify_bistochastic(op);
    const qbo::FalsifyReport report = qbo::falsify_bistochastic(op, budget, seed);

    nlohmann::json j;
    const bool counterexample =
        report.verdict == qbo::FalsifyReport::Verdict::CounterexampleFound;
    j["verdict"] = counterexample ? "counterexample" : (cert.certified ? "certified" : "none-found");
    j["certified"] = cert.certified;
    if (cert.certified) j["certificate"] = qbo::certificate_to_json(*cert.certificate);
    j["falsify"] = qbo::falsify_report_to_json(report);
    emit(qbo::json_to_text(j), out);
    if (!out.empty()) std::cout << qbo::json_to_text(j);
    return counterexample ? kExitCounterexample : kExitOk;
}

int run_classify(const std::string& operator_file, std::size_t trials, std::size_t max_steps,
                 std::size_t max_period, std::uint64_t seed, const qbo::DynamicsTolerances& tol,
                 const std::string& out) {
    const qbo::OperatorSpec op = load_operator(operator_file);
    const qbo::RegularityVerdict verdict =
        qbo::classify_regularity(op, trials, max_steps, max_period, seed, tol);
    emit(qbo::json_to_text(qbo::regularity_verdict_to_json(verdict)), out);
    if (!out.empty()) std::cout << qbo::json_to_text(qbo::regularity_verdict_to_json(verdict));
    return kExitOk;
}

int run_mix(const std::vector<std::string>& files, const std::string& weights_text,
            const std::string& out) {
    if (files.size() < 2) throw qbo::ValidationError("mix needs at least two operator files");
    const std::vector<double> weights = parse_vector(weights_text);
    if (weights.size() != files.size())
        throw qbo::ValidationError("mix: weight count does not match operator count");
    for (double w : weights)
        if (!(w > 0.0))
            throw qbo::ValidationError(
                "mix: every weight must be strictly positive; zero-weight terms are not part of a "
                "convex mix");
    std::vector<qbo::OperatorSpec> ops;
    ops.reserve(files.size());
    for (const auto& f : files) ops.push_back(load_operator(f));
    const qbo::OperatorSpec mixed = qbo::mix(ops, weights);
    emit(qbo::json_to_text(qbo::operator_to_json(mixed)), out);
    return kExitOk;
}

struct GenerateOptions {
    std::string kind;
    std::size_t m = 3;
    std::uint64_t seed = 0;
    std::string out;
    std::string matrix_file;
    bool random_matrix = false;
};

int run_generate(const GenerateOptions& opt) {
    std::vector<qbo::OperatorSpec> ops;
    if (opt.kind == "permutations") {
        ops = qbo::all_permutation_operators(opt.m);
    } else if (opt.kind == "family-uniform") {
        ops.push_back(qbo::OperatorSpec::family_uniform(opt.m));
    } else if (opt.kind == "family-va") {
        if (opt.random_matrix) {
            qbo::CounterRng rng(opt.seed);
            ops.push_back(qbo::make_family_va(qbo::random_doubly_stochastic(rng, opt.m)));
        } else if (!opt.matrix_file.empty()) {
            const nlohmann::json j = nlohmann::json::parse(read_file(opt.matrix_file));
            ops.push_back(qbo::make_family_va(
                qbo::DoublyStochasticMatrix::load(j.get<std::vector<std::vector<double>>>())));
        } else {
            throw qbo::ValidationError("family-va needs --matrix-file or --random");
        }
    } else if (opt.kind == "interior-mix") {
        std::vector<qbo::OperatorSpec> pool = qbo::all_permutation_operators(opt.m);
        pool.push_back(qbo::OperatorSpec::family_uniform(opt.m));
        ops.push_back(qbo::interior_mix(pool, opt.seed));
    } else if (opt.kind == "counterexample-pair") {
        const auto [p1, p2] = qbo::fixture_counterexample_pair();
        ops.push_back(p1);
        ops.push_back(p2);
    } else {
        throw qbo::ValidationError("unknown generate kind \"" + opt.kind + "\"");
    }

    if (ops.size() == 1) {
        emit(qbo::json_to_text(qbo::operator_to_json(ops.front())), opt.out);
        return kExitOk;
    }
    if (opt.out.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& op : ops) arr.push_back(qbo::operator_to_json(op));
        std::cout << qbo::json_to_text(arr);
        return kExitOk;
    }
    for (std::size_t i = 0; i < ops.size(); ++i)
        write_file_atomic(indexed(opt.out, i + 1) + ".json",
                          qbo::json_to_text(qbo::operator_to_json(ops[i])));
    return kExitOk;
}

int run_majorize(const std::string& x_text, const std::string& y_text, const std::string& format,
                 const std::string& out) {
    const qbo::SimplexPoint x = qbo::SimplexPoint::load(parse_vector(x_text));
    const qbo::SimplexPoint y = qbo::SimplexPoint::load(parse_vector(y_text));
    if (x.dim() != y.dim()) throw qbo::DimensionMismatch("majorize: dimension mismatch");

    const bool x_below_y = qbo::majorizes(y, x);
    const bool y_below_x = qbo::majorizes(x, y);
    const std::vector<double> px = qbo::descending_prefix_sums(x);
    const std::vector<double> py = qbo::descending_prefix_sums(y);

    std::string verdict;
    if (x_below_y && y_below_x)
        verdict = "equivalent";
    else if (x_below_y)
        verdict = "majorized-by";
    else if (y_below_x)
        verdict = "majorizes";
    else
        verdict = "incomparable";

    if (format == "json") {
        nlohmann::json j;
        j["verdict"] = verdict;
        j["x_majorized_by_y"] = x_below_y;
        j["y_majorized_by_x"] = y_below_x;
        j["prefix_sums_x"] = px;
        j["prefix_sums_y"] = py;
        emit(qbo::json_to_text(j), out);
        return kExitOk;
    }

    std::ostringstream text;
    text << "k  sum_x  sum_y\n";
    for (std::size_t k = 0; k < px.size(); ++k)
        text << (k + 1) << "  " << px[k] << "  " << py[k] << "\n";
    text << "x relative to y: " << verdict << "\n";
    emit(text.str(), out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quadratic bistochastic operators on the simplex: checks, trajectories, reports"};
    app.require_subcommand(1);

    // check
    auto* check = app.add_subcommand("check", "Certify and stress-test bistochasticity");
    std::string check_file;
    std::size_t check_budget = 100000;
    std::uint64_t check_seed = 0;
    std::string check_out;
    check->add_option("operator", check_file, "Operator JSON file")->required();
    check->add_option("--budget", check_budget, "Falsification sample budget");
    check->add_option("--seed", check_seed, "Random seed");
    check->add_option("--out", check_out, "Write the report here as well as stdout");

    // iterate
    auto* iterate_cmd = app.add_subcommand("iterate", "Run a trajectory and report its limit");
    IterateOptions iterate_opt;
    iterate_cmd->add_option("operator", iterate_opt.operator_file, "Operator JSON file")->required();
    iterate_cmd->add_option("--start", iterate_opt.start,
                            "Start point: comma vector, \"vertices\", or \"random:N\"");
    iterate_cmd->add_option("--max-steps", iterate_opt.max_steps, "Iteration budget");
    iterate_cmd->add_option("--seed", iterate_opt.seed, "Random seed for random starts");
    iterate_cmd->add_option("--out", iterate_opt.out,
                            "Base path; writes <base>.csv and <base>.json (suffixed _k for multiple starts)");
    iterate_cmd->add_option("--format", iterate_opt.format, "Stdout format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    iterate_cmd->add_option("--tol-convergence", iterate_opt.tol.convergence,
                            "Successive-iterate tolerance");
    iterate_cmd->add_option("--tol-cycle", iterate_opt.tol.cycle, "Cycle revisit tolerance");
    iterate_cmd->add_option("--tol-fixed", iterate_opt.tol.fixed_point, "Fixed-point residual");

    // classify
    auto* classify = app.add_subcommand("classify", "Empirical regularity classification");
    std::string classify_file;
    std::size_t classify_trials = 64;
    std::size_t classify_steps = 10000;
    std::size_t classify_period = 16;
    std::uint64_t classify_seed = 0;
    std::string classify_out;
    qbo::DynamicsTolerances classify_tol;
    classify->add_option("operator", classify_file, "Operator JSON file")->required();
    classify->add_option("--trials", classify_trials, "Trajectory trial count");
    classify->add_option("--max-steps", classify_steps, "Iteration budget per trial");
    classify->add_option("--max-period", classify_period, "Largest period to probe");
    classify->add_option("--seed", classify_seed, "Random seed");
    classify->add_option("--out", classify_out, "Write the verdict here as well as stdout");
    classify->add_option("--tol-convergence", classify_tol.convergence,
                         "Successive-iterate tolerance");
    classify->add_option("--tol-cycle", classify_tol.cycle, "Cycle revisit tolerance");
    classify->add_option("--tol-fixed", classify_tol.fixed_point, "Fixed-point residual");

    // mix
    auto* mix_cmd = app.add_subcommand("mix", "Build a convex mix of operators");
    std::vector<std::string> mix_files;
    std::string mix_weights;
    std::string mix_out;
    mix_cmd->add_option("operators", mix_files, "Operator JSON files")->required();
    mix_cmd->add_option("--weights", mix_weights, "Comma-separated positive weights, sum 1")
        ->required();
    mix_cmd->add_option("--out", mix_out, "Output file (stdout when omitted)");

    // generate
    auto* generate = app.add_subcommand("generate", "Emit operator files for the built-in constructions");
    GenerateOptions gen_opt;
    generate
        ->add_option("kind", gen_opt.kind,
                     "permutations | family-va | family-uniform | interior-mix | counterexample-pair")
        ->required();
    generate->add_option("--m", gen_opt.m, "Dimension");
    generate->add_option("--seed", gen_opt.seed, "Random seed (random matrices, mix weights)");
    generate->add_option("--out", gen_opt.out,
                         "Output file or base path (suffixed _k.json for multiple operators)");
    generate->add_option("--matrix-file", gen_opt.matrix_file,
                         "JSON file with a doubly stochastic matrix (family-va)");
    generate->add_flag("--random", gen_opt.random_matrix,
                       "Draw a random doubly stochastic matrix (family-va)");

    // majorize
    auto* majorize_cmd = app.add_subcommand("majorize", "Compare two simplex points");
    std::string maj_x, maj_y, maj_format = "text", maj_out;
    majorize_cmd->add_option("--x", maj_x, "First point, comma-separated")->required();
    majorize_cmd->add_option("--y", maj_y, "Second point, comma-separated")->required();
    majorize_cmd->add_option("--format", maj_format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    majorize_cmd->add_option("--out", maj_out, "Output file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return run_check(check_file, check_budget, check_seed, check_out);
        if (iterate_cmd->parsed()) return run_iterate(iterate_opt);
        if (classify->parsed())
            return run_classify(classify_file, classify_trials, classify_steps, classify_period,
                                classify_seed, classify_tol, classify_out);
        if (mix_cmd->parsed()) return run_mix(mix_files, mix_weights, mix_out);
        if (generate->parsed()) return run_generate(gen_opt);
        if (majorize_cmd->parsed()) return run_majorize(maj_x, maj_y, maj_format, maj_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    std::cerr << "error: no subcommand\n";
    return kExitError;
}
