// fewzeros: bounds, Monte Carlo counts, Rice integrals and cell dumps for
// random fewnomial systems.
//
// exit codes: 0 ok, 1 usage or spec error, 2 numerical failure, 130 interrupted

#include "fewzeros/fewzeros.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>

namespace {

using namespace fewzeros;

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string invocation_string(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

int cmd_bound(const std::string& spec_path, const std::string& format, const std::string& out) {
    const auto spec = load_spec(spec_path);
    const auto r = compute_bounds(spec);
    if (format == "csv") {
        std::ostringstream os;
        os << "bound,value\n";
        auto opt = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string("NA"); };
        os << "kushnirenko," << r.kushnirenko << "\nlifted," << r.lifted << "\npolytope," << opt(r.polytope)
           << "\nunmixed," << opt(r.unmixed) << '\n';
        for (const auto& note : r.notes) std::cerr << "note: " << note << '\n';
        emit(out, os.str());
    } else {
        emit(out, bounds_to_json(r).dump(2) + "\n");
    }
    return 0;
}

int cmd_experiment(const ExperimentConfig& cfg, const std::string& invocation) {
    cfg.validate();
    const auto spec = load_spec(cfg.spec_path);
    std::signal(SIGINT, on_sigint);
    const auto t0 = std::chrono::steady_clock::now();
    const auto run = run_trials(spec, cfg.trials, cfg.seed, CountOptions{60, cfg.tol, false}, cfg.threads, &g_stop);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Json report = experiment_report(spec, cfg, run, cfg.timing ? wall : 0.0, invocation);

    if (cfg.format == "csv") {
        std::ostringstream csv;
        write_trials_csv(csv, run.records, cfg.timing);
        emit(cfg.out, csv.str());
        if (!cfg.out.empty()) emit(cfg.out + ".summary.json", report.dump(2) + "\n");
    } else {
        Json rows = Json::array();
        for (const auto& r : run.records)
            rows.push_back({{"trial", r.trial}, {"count", r.count}, {"certified", r.certified},
                            {"seconds", cfg.timing ? r.seconds : 0.0}});
        report["per_trial"] = std::move(rows);
        emit(cfg.out, report.dump(2) + "\n");
    }
    const auto& mc = report["monte_carlo"];
    std::cerr << "trials " << mc["trials"] << ", certified " << mc["certified_trials"] << ", mean " << mc["mean"]
              << " +- " << mc["stderr"] << ", lifted bound " << report["bounds"]["lifted"] << '\n';
    if (!report["mean_minus_3se_le_lifted"].get<bool>())
        std::cerr << "warning: mean exceeds the lifted bound by more than 3 standard errors\n";
    if (run.interrupted) {
        std::cerr << "interrupted: wrote " << run.records.size() << " completed trials\n";
        return 130;
    }
    if (const auto& rice = report["rice"]; !rice.is_null() && !rice["converged"].get<bool>())
        throw NumericalFailure("Rice quadrature did not reach quad_tol; achieved " + rice["error"].dump());
    return 0;
}

int cmd_rice(const std::string& spec_path, const std::string& mode, unsigned n_opt, double quad_tol,
             std::size_t trials, std::uint64_t seed, const std::string& out) {
    if (!(quad_tol > 0)) throw std::invalid_argument("--quad-tol must be positive");
    Json j;
    if (mode == "binomial") {
        unsigned n = n_opt;
        if (!spec_path.empty()) {
            const auto spec = load_spec(spec_path);
            for (const auto& eq : spec.equations)
                if (eq.support.size() != 2) throw SpecError("binomial mode needs two monomials per equation");
            n = static_cast<unsigned>(spec.n);
        }
        if (n == 0) throw std::invalid_argument("binomial mode needs --n or a binomial --spec");
        if (trials == 0) throw std::invalid_argument("--trials must be at least 1");
        const auto closed = prop32_value(n, Prop32Method::closed);
        const auto quad = prop32_value(n, Prop32Method::quadrature, quad_tol);
        const Eigen::MatrixXd gam = Eigen::MatrixXd::Identity(n, n);
        const Eigen::VectorXd shifts = Eigen::VectorXd::Zero(n);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < trials; ++i) {
            RngStream stream(seed, i);
            hits += static_cast<std::size_t>(binomial_solve(sample_binomial(gam, shifts, stream)).count);
        }
        const double p = static_cast<double>(hits) / static_cast<double>(trials);
        j = {{"mode", "binomial"},
             {"n", n},
             {"closed_form", closed.value},
             {"quadrature", {{"value", quad.value}, {"error", quad.error}}},
             {"monte_carlo",
              {{"trials", trials}, {"value", p}, {"stderr", std::sqrt(p * (1 - p) / static_cast<double>(trials))}}}};
        if (quad.error > quad_tol) throw NumericalFailure("quadrature error " + std::to_string(quad.error));
    } else if (mode == "univariate") {
        if (spec_path.empty()) throw std::invalid_argument("univariate mode needs --spec");
        const auto spec = load_spec(spec_path);
        if (spec.n != 1)
            throw SpecError("quadrature mode supports n = 1 only (spec has n = " + std::to_string(spec.n) +
                            "); use --mode binomial for the binomial density");
        const auto ex = spec.exponents_double();
        std::vector<double> a;
        for (const auto& e : ex[0]) a.push_back(e[0]);
        const auto r = expected_zeros_univariate(a, spec.variances_double()[0], quad_tol);
        j = {{"mode", "univariate"}, {"value", r.value}, {"error", r.error}, {"converged", r.converged},
             {"tail_bound", r.tail_bound}, {"interval", {r.lo, r.hi}}};
        emit(out, j.dump(2) + "\n");
        if (!r.converged) throw NumericalFailure("quadrature did not converge; achieved error " + std::to_string(r.error));
        return 0;
    } else {
        throw std::invalid_argument("--mode must be univariate or binomial");
    }
    emit(out, j.dump(2) + "\n");
    return 0;
}

int cmd_cells(const std::string& spec_path, std::uint64_t seed, const std::string& out) {
    const auto spec = load_spec(spec_path);
    RngStream stream(seed, 0);
    const auto j = cells_report(spec, stream, 1000);
    emit(out, j.dump(2) + "\n");
    if (!j["cover_check"]["ok"].get<bool>()) throw NumericalFailure("cover self-check failed");
    return 0;
}

int cmd_spec(const std::string& spec_path, const std::string& out) {
    const auto spec = load_spec(spec_path);
    emit(out, spec_to_json(spec).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fewzeros: positive zeros of random fewnomial systems"};
    app.require_subcommand(1);

    std::string spec_path, out, format = "json", mode = "univariate";
    ExperimentConfig cfg;
    unsigned n_opt = 0;
    std::size_t rice_trials = 100000;
    double quad_tol = 1e-8;
    std::uint64_t seed = 1;
    bool no_timing = false;

    auto* bound = app.add_subcommand("bound", "all applicable bounds for a spec");
    bound->add_option("--spec", spec_path, "spec JSON file")->required();
    bound->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    bound->add_option("--out", out, "output file (default stdout)");

    auto* exp = app.add_subcommand("experiment", "Monte Carlo zero counts");
    exp->add_option("--spec", cfg.spec_path, "spec JSON file")->required();
    exp->add_option("--trials", cfg.trials, "number of sampled systems")->check(CLI::PositiveNumber);
    exp->add_option("--seed", cfg.seed, "master seed");
    exp->add_option("--tol", cfg.tol, "root-counting tolerance")->check(CLI::PositiveNumber);
    exp->add_option("--quad-tol", cfg.quad_tol, "quadrature tolerance")->check(CLI::PositiveNumber);
    exp->add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
    exp->add_option("--out", cfg.out, "output file (default stdout)");
    exp->add_option("--format", cfg.format, "json report or per-trial csv")->check(CLI::IsMember({"json", "csv"}));
    exp->add_flag("--no-timing", no_timing, "write 0 for timings so outputs compare byte for byte");

    auto* rice = app.add_subcommand("rice", "Kac-Rice expected zero counts");
    rice->add_option("--spec", spec_path, "spec JSON file");
    rice->add_option("--mode", mode, "univariate or binomial")->check(CLI::IsMember({"univariate", "binomial"}));
    rice->add_option("--n", n_opt, "dimension for binomial mode");
    rice->add_option("--quad-tol", quad_tol, "absolute quadrature tolerance")->check(CLI::PositiveNumber);
    rice->add_option("--trials", rice_trials, "Monte Carlo draws in binomial mode");
    rice->add_option("--seed", seed, "master seed");
    rice->add_option("--out", out, "output file (default stdout)");

    auto* cells = app.add_subcommand("cells", "full-dimensional cells and the Minkowski vertex count");
    cells->add_option("--spec", spec_path, "spec JSON file")->required();
    cells->add_option("--seed", seed, "seed for the cover self-check");
    cells->add_option("--out", out, "output file (default stdout)");

    auto* spec = app.add_subcommand("spec", "read a spec and write it back in canonical form");
    spec->add_option("--spec", spec_path, "spec JSON file")->required();
    spec->add_option("--out", out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*bound) return cmd_bound(spec_path, format, out);
        if (*exp) {
            cfg.timing = !no_timing;
            return cmd_experiment(cfg, invocation_string(argc, argv));
        }
        if (*rice) return cmd_rice(spec_path, mode, n_opt, quad_tol, rice_trials, seed, out);
        if (*cells) return cmd_cells(spec_path, seed, out);
        if (*spec) return cmd_spec(spec_path, out);
    } catch (const SpecError& e) {
        std::cerr << "spec error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
