#pragma once

// Monte Carlo experiments: sample systems from a spec, count positive zeros,
// summarise. Trial i always draws from stream (seed, i), and results are
// stored by index, so output is identical for any thread count.

#include "fewzeros/bounds.hpp"
#include "fewzeros/io.hpp"
#include "fewzeros/random_systems.hpp"
#include "fewzeros/rice.hpp"
#include "fewzeros/rng.hpp"
#include "fewzeros/rootcount.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <thread>
#include <vector>

namespace fewzeros {

struct TrialRecord {
    std::size_t trial = 0;
    std::size_t count = 0;
    bool certified = false;
    double seconds = 0.0;
};

struct TrialRun {
    std::vector<TrialRecord> records;  // trials 0..records.size()-1, in order
    bool interrupted = false;
};

/// Runs trials [0, trials). If `stop` becomes true, workers finish their
/// current trial and the longest completed prefix is returned.
inline TrialRun run_trials(const SystemSpec& spec, std::size_t trials, std::uint64_t seed, const CountOptions& opts,
                           unsigned threads = 1, const std::atomic<bool>* stop = nullptr) {
    if (trials == 0) throw std::invalid_argument("trials must be at least 1");
    if (threads == 0) throw std::invalid_argument("threads must be at least 1");
    spec.validate();
    std::vector<TrialRecord> rec(trials);
    std::vector<char> done(trials, 0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            if (stop && stop->load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= trials) return;
            try {
                const auto t0 = std::chrono::steady_clock::now();
                RngStream stream(seed, i);
                const auto sys = sample_system(spec, stream);
                const auto r = count_positive_zeros(sys, opts);
                const auto t1 = std::chrono::steady_clock::now();
                rec[i] = {i, static_cast<std::size_t>(r.count), r.certified, std::chrono::duration<double>(t1 - t0).count()};
                done[i] = 1;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(trials);
                return;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    TrialRun out;
    std::size_t prefix = 0;
    while (prefix < trials && done[prefix]) ++prefix;
    rec.resize(prefix);
    out.records = std::move(rec);
    out.interrupted = prefix < trials;
    return out;
}

struct MonteCarloSummary {
    std::size_t trials = 0;
    std::size_t certified_trials = 0;
    double mean = 0.0;  // over certified trials only
    double stderr_ = 0.0;
    std::size_t max_count = 0;
    double certification_rate = 0.0;
    double fraction_positive = 0.0;  // certified trials with at least one zero
};

inline MonteCarloSummary summarize(const std::vector<TrialRecord>& records) {
    MonteCarloSummary s;
    s.trials = records.size();
    double sum = 0.0, sum_sq = 0.0;
    std::size_t positive = 0;
    for (const auto& r : records) {
        if (!r.certified) continue;
        ++s.certified_trials;
        const auto c = static_cast<double>(r.count);
        sum += c;
        sum_sq += c * c;
        s.max_count = std::max(s.max_count, r.count);
        positive += r.count > 0 ? 1 : 0;
    }
    if (s.trials > 0) s.certification_rate = static_cast<double>(s.certified_trials) / static_cast<double>(s.trials);
    if (s.certified_trials > 0) {
        const auto m = static_cast<double>(s.certified_trials);
        s.mean = sum / m;
        s.fraction_positive = static_cast<double>(positive) / m;
        if (s.certified_trials > 1) {
            const double var = std::max(0.0, (sum_sq - sum * s.mean) / (m - 1.0));
            s.stderr_ = std::sqrt(var / m);
        }
    }
    return s;
}

/// Fixed columns: trial,count,certified,seconds. With timing off the seconds
/// column is written as 0 so files compare byte for byte.
inline void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records, bool timing = true) {
    os << "trial,count,certified,seconds\n";
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.6f", timing ? r.seconds : 0.0);
        os << r.trial << ',' << r.count << ',' << (r.certified ? 1 : 0) << ',' << buf << '\n';
    }
}

inline Json summary_to_json(const MonteCarloSummary& s) {
    return {{"trials", s.trials},
            {"certified_trials", s.certified_trials},
            {"certification_rate", s.certification_rate},
            {"mean", s.mean},
            {"stderr", s.stderr_},
            {"max_count", s.max_count},
            {"fraction_positive", s.fraction_positive}};
}

struct ExperimentConfig {
    std::string spec_path;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    double quad_tol = 1e-8;
    unsigned threads = 1;
    std::string out;
    std::string format = "json";
    bool timing = true;

    void validate() const {
        if (trials < 1) throw std::invalid_argument("trials must be at least 1");
        if (!(tol > 0) || !(quad_tol > 0)) throw std::invalid_argument("tolerances must be positive");
        if (threads < 1) throw std::invalid_argument("threads must be at least 1");
        if (format != "json" && format != "csv") throw std::invalid_argument("format must be json or csv");
    }
};

/// The JSON summary: spec echo, bounds, Monte Carlo statistics, the n = 1
/// Rice value when available, and the checks of the mean against the bound.
inline Json experiment_report(const SystemSpec& spec, const ExperimentConfig& cfg, const TrialRun& run,
                              double wall_seconds, const std::string& invocation) {
    const auto bounds = compute_bounds(spec);
    const auto s = summarize(run.records);
    Json j;
    j["invocation"] = invocation;
    j["seed"] = cfg.seed;
    j["tol"] = cfg.tol;
    j["quad_tol"] = cfg.quad_tol;
    j["spec"] = spec_to_json(spec);
    j["bounds"] = bounds_to_json(bounds);
    j["monte_carlo"] = summary_to_json(s);
    j["interrupted"] = run.interrupted;
    j["wall_seconds"] = wall_seconds;
    j["mean_plus_3se_le_lifted"] = s.mean + 3.0 * s.stderr_ <= bounds.lifted;
    // the acceptance check: a mean significantly above the bound is a failure
    j["mean_minus_3se_le_lifted"] = s.mean - 3.0 * s.stderr_ <= bounds.lifted;
    if (spec.n == 1) {
        const auto ex = spec.exponents_double();
        std::vector<double> a;
        for (const auto& e : ex[0]) a.push_back(e[0]);
        const auto r = expected_zeros_univariate(a, spec.variances_double()[0], cfg.quad_tol);
        const double se = std::hypot(s.stderr_, r.error);
        j["rice"] = {{"value", r.value},
                     {"error", r.error},
                     {"converged", r.converged},
                     {"agrees_within_3se", std::abs(s.mean - r.value) <= 3.0 * se}};
    } else {
        j["rice"] = nullptr;
    }
    return j;
}

}  // namespace fewzeros
