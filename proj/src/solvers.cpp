#include "mfc/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double resolve_scale(const MFCProblem& problem, const SolverConfig& cfg) {
    if (cfg.step_scale > 0.0) return cfg.step_scale;
    (void)problem;
    // Empirical default. The rate statement's constant sqrt(2 Gamma(mu*, mu^0))/L
    // needs the unknown optimum, so it cannot be computed up front; 1.0 lands the
    // solvers in the same objective range on the fleet benchmark.
    return 1.0;
}

double schedule_step(StepSchedule schedule, double scale, int k, int total) {
    switch (schedule) {
        case StepSchedule::constant: return scale;
        case StepSchedule::theorem2:
            return scale / std::sqrt(static_cast<double>(std::max(total, 1)));
        case StepSchedule::harmonic: return scale / std::sqrt(static_cast<double>(k + 1));
    }
    return scale;
}

PolicySequence starting_policy(const MFCProblem& problem, const SolverConfig& cfg) {
    if (cfg.initial_policy) {
        const PolicySequence& pi = *cfg.initial_policy;
        if (pi.horizon() != problem.horizon()) {
            throw std::invalid_argument("solver: initial policy horizon mismatch");
        }
        return pi;
    }
    return uniform_policy(problem.n_states, problem.n_actions, problem.horizon());
}

void record(SolverHistory& history, int iteration, double objective, Clock::time_point start) {
    double running = objective;
    if (!history.iterations.empty()) {
        running = std::min(running, history.iterations.back().running_min);
    }
    history.iterations.push_back({iteration, objective, running, ms_since(start)});
}

}  // namespace

void MFCProblem::validate() const {
    if (n_states <= 0 || n_actions <= 0) throw std::invalid_argument("MFCProblem: empty spaces");
    const int n = horizon();
    if (n < 1) throw std::invalid_argument("MFCProblem: empty kernel");
    if (target.horizon() != n) throw std::invalid_argument("MFCProblem: target horizon mismatch");
    if (static_cast<int>(phi.phi.size()) != n_states) {
        throw std::invalid_argument("MFCProblem: observable size mismatch");
    }
    if (mu0.n_states != n_states || mu0.n_actions != n_actions) {
        throw std::invalid_argument("MFCProblem: mu0 shape mismatch");
    }
    if (std::fabs(mu0.sum() - 1.0) > kInputNormalizationTol || mu0.min_entry() < 0.0) {
        throw std::invalid_argument("MFCProblem: mu0 is not a probability distribution");
    }
    for (int k = 0; k < n; ++k) {
        if (kernel.step(k).n_states != n_states || kernel.step(k).n_actions != n_actions) {
            throw std::invalid_argument("MFCProblem: kernel shape mismatch");
        }
    }
}

RewardTable potential_reward(const ConsumptionObservable& phi, const DistributionSequence& mu,
                             const TargetSignal& target) {
    if (mu.horizon() != target.horizon()) {
        throw std::invalid_argument("potential_reward: horizons differ");
    }
    RewardTable reward;
    reward.reserve(static_cast<std::size_t>(mu.horizon()));
    for (int n = 1; n <= mu.horizon(); ++n) {
        XaTable grad = grad_cost(phi, mu.slice(n), target.level[static_cast<std::size_t>(n - 1)]);
        for (double& e : grad.v) e = -e;
        reward.push_back(std::move(grad));
    }
    return reward;
}

QTable plain_q_backward(const RewardTable& reward, const TimedKernel& kernel,
                        const PolicySequence& pi) {
    const int horizon = kernel.horizon();
    if (static_cast<int>(reward.size()) != horizon || pi.horizon() != horizon) {
        throw std::invalid_argument("plain_q_backward: horizons differ");
    }
    const int xs = reward.front().n_states;
    const int as = reward.front().n_actions;

    QTable q(reward.begin(), reward.end());
    std::vector<double> value(static_cast<std::size_t>(xs));
    for (int i = horizon - 2; i >= 0; --i) {
        const XaTable& next_q = q[static_cast<std::size_t>(i + 1)];
        const XaTable& next_pi = pi.step(i + 1);
        for (int x = 0; x < xs; ++x) {
            double v = 0.0;
            for (int a = 0; a < as; ++a) v += next_pi.at(x, a) * next_q.at(x, a);
            value[static_cast<std::size_t>(x)] = v;
        }
        const KernelSlice& ks = kernel.step(i + 1);
        XaTable& cur = q[static_cast<std::size_t>(i)];
        for (int x = 0; x < xs; ++x) {
            for (int a = 0; a < as; ++a) {
                double cont = 0.0;
                for (int next = 0; next < xs; ++next) {
                    cont += ks.at(x, a, next) * value[static_cast<std::size_t>(next)];
                }
                cur.at(x, a) += cont;
            }
        }
    }
    return q;
}

BackwardResult best_response(const RewardTable& reward, const TimedKernel& kernel) {
    const int horizon = kernel.horizon();
    if (static_cast<int>(reward.size()) != horizon) {
        throw std::invalid_argument("best_response: horizons differ");
    }
    const int xs = reward.front().n_states;
    const int as = reward.front().n_actions;

    BackwardResult out;
    out.q.assign(reward.begin(), reward.end());
    out.policy.steps.assign(static_cast<std::size_t>(horizon), XaTable(xs, as));

    std::vector<double> value(static_cast<std::size_t>(xs));
    for (int i = horizon - 1; i >= 0; --i) {
        if (i < horizon - 1) {
            const KernelSlice& ks = kernel.step(i + 1);
            XaTable& cur = out.q[static_cast<std::size_t>(i)];
            for (int x = 0; x < xs; ++x) {
                for (int a = 0; a < as; ++a) {
                    double cont = 0.0;
                    for (int next = 0; next < xs; ++next) {
                        cont += ks.at(x, a, next) * value[static_cast<std::size_t>(next)];
                    }
                    cur.at(x, a) += cont;
                }
            }
        }
        const XaTable& cur = out.q[static_cast<std::size_t>(i)];
        XaTable& pol = out.policy.step(i);
        for (int x = 0; x < xs; ++x) {
            double best = cur.at(x, 0);
            for (int a = 1; a < as; ++a) best = std::max(best, cur.at(x, a));
            int hits = 0;
            for (int a = 0; a < as; ++a) {
                if (cur.at(x, a) == best) ++hits;
            }
            for (int a = 0; a < as; ++a) {
                pol.at(x, a) = cur.at(x, a) == best ? 1.0 / hits : 0.0;
            }
            value[static_cast<std::size_t>(x)] = best;
        }
    }
    return out;
}

BackwardResult regularized_backward_pass(const RewardTable& reward, const TimedKernel& kernel,
                                         const PolicySequence& pi_prev, double step) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("regularized_backward_pass: step must be positive");
    }
    const int horizon = kernel.horizon();
    if (static_cast<int>(reward.size()) != horizon || pi_prev.horizon() != horizon) {
        throw std::invalid_argument("regularized_backward_pass: horizons differ");
    }
    const int xs = reward.front().n_states;
    const int as = reward.front().n_actions;

    BackwardResult out;
    out.q.assign(reward.begin(), reward.end());
    out.policy.steps.assign(static_cast<std::size_t>(horizon), XaTable(xs, as));

    // value(x) = (1/step) log sum_a prev(a|x) exp(step q(x,a)), computed with
    // max subtraction; also fills the softmax policy row.
    std::vector<double> value(static_cast<std::size_t>(xs));
    for (int i = horizon - 1; i >= 0; --i) {
        if (i < horizon - 1) {
            const KernelSlice& ks = kernel.step(i + 1);
            XaTable& cur = out.q[static_cast<std::size_t>(i)];
            for (int x = 0; x < xs; ++x) {
                for (int a = 0; a < as; ++a) {
                    double cont = 0.0;
                    for (int next = 0; next < xs; ++next) {
                        cont += ks.at(x, a, next) * value[static_cast<std::size_t>(next)];
                    }
                    cur.at(x, a) += cont;
                }
            }
        }
        const XaTable& cur = out.q[static_cast<std::size_t>(i)];
        const XaTable& prev = pi_prev.step(i);
        XaTable& pol = out.policy.step(i);
        for (int x = 0; x < xs; ++x) {
            double top = cur.at(x, 0);
            for (int a = 1; a < as; ++a) top = std::max(top, cur.at(x, a));
            double z = 0.0;
            for (int a = 0; a < as; ++a) {
                const double w = prev.at(x, a) * std::exp(step * (cur.at(x, a) - top));
                pol.at(x, a) = w;
                z += w;
            }
            for (int a = 0; a < as; ++a) pol.at(x, a) /= z;
            value[static_cast<std::size_t>(x)] = top + std::log(z) / step;
        }
    }
    return out;
}

double monotonicity_gap(const ConsumptionObservable& phi, const XaTable& mu,
                        const XaTable& mu_alt, double gamma_n) {
    XaTable r = grad_cost(phi, mu, gamma_n);
    XaTable r_alt = grad_cost(phi, mu_alt, gamma_n);
    double gap = 0.0;
    for (std::size_t i = 0; i < mu.v.size(); ++i) {
        gap += (-r.v[i] - (-r_alt.v[i])) * (mu.v[i] - mu_alt.v[i]);
    }
    return gap;
}

double objective_of(const MFCProblem& problem, const PolicySequence& pi) {
    return eval_cost(problem.phi, propagate(problem.mu0, pi, problem.kernel), problem.target);
}

SolverOutcome md_mfc(const MFCProblem& problem, const SolverConfig& cfg) {
    problem.validate();
    if (cfg.iterations < 0) throw std::invalid_argument("md_mfc: negative iteration count");
    PolicySequence pi = starting_policy(problem, cfg);
    if (!pi.strictly_positive()) {
        throw std::invalid_argument("md_mfc: initial policy must be strictly positive");
    }

    const double scale = resolve_scale(problem, cfg);
    const auto start = Clock::now();

    SolverOutcome out;
    PolicySequence best_pi = pi;
    double best_obj = std::numeric_limits<double>::infinity();

    for (int k = 0; k <= cfg.iterations; ++k) {
        DistributionSequence mu = propagate(problem.mu0, pi, problem.kernel);
        const double objective = eval_cost(problem.phi, mu, problem.target);
        record(out.history, k, objective, start);
        if (objective < best_obj) {
            best_obj = objective;
            best_pi = pi;
        }
        if (k == cfg.iterations) break;

        const RewardTable reward = potential_reward(problem.phi, mu, problem.target);
        const double step = schedule_step(cfg.schedule, scale, k, cfg.iterations);
        pi = regularized_backward_pass(reward, problem.kernel, pi, step).policy;
    }

    out.policy = std::move(best_pi);
    out.distribution = propagate(problem.mu0, out.policy, problem.kernel);
    out.objective = best_obj;
    return out;
}

SolverOutcome fp_mfg(const MFCProblem& problem, const SolverConfig& cfg) {
    problem.validate();
    if (cfg.iterations < 0) throw std::invalid_argument("fp_mfg: negative iteration count");
    const PolicySequence pi0 = starting_policy(problem, cfg);
    const auto start = Clock::now();

    SolverOutcome out;
    DistributionSequence averaged = propagate(problem.mu0, pi0, problem.kernel);
    record(out.history, 0, eval_cost(problem.phi, averaged, problem.target), start);

    for (int k = 1; k <= cfg.iterations; ++k) {
        const RewardTable reward = potential_reward(problem.phi, averaged, problem.target);
        const PolicySequence br = best_response(reward, problem.kernel).policy;
        const DistributionSequence induced = propagate(problem.mu0, br, problem.kernel);

        const double w = 1.0 / (k + 1);
        for (int n = 0; n <= averaged.horizon(); ++n) {
            XaTable& bar = averaged.slice(n);
            const XaTable& fresh = induced.slice(n);
            for (std::size_t i = 0; i < bar.v.size(); ++i) {
                bar.v[i] = (1.0 - w) * bar.v[i] + w * fresh.v[i];
            }
        }
        record(out.history, k, eval_cost(problem.phi, averaged, problem.target), start);
    }

    // Averaged policy: the state-visitation-weighted mix of the iterates,
    // which is exactly the conditional of the averaged distribution.
    out.policy = policy_from_distribution(averaged);
    out.distribution = propagate(problem.mu0, out.policy, problem.kernel);
    out.objective = eval_cost(problem.phi, out.distribution, problem.target);
    return out;
}

SolverOutcome omd_mfg(const MFCProblem& problem, const SolverConfig& cfg) {
    problem.validate();
    if (cfg.iterations < 0) throw std::invalid_argument("omd_mfg: negative iteration count");
    PolicySequence pi = starting_policy(problem, cfg);
    if (!pi.strictly_positive()) {
        throw std::invalid_argument("omd_mfg: initial policy must be strictly positive");
    }
    const double scale = resolve_scale(problem, cfg);
    const auto start = Clock::now();

    SolverOutcome out;
    for (int k = 0; k <= cfg.iterations; ++k) {
        DistributionSequence mu = propagate(problem.mu0, pi, problem.kernel);
        record(out.history, k, eval_cost(problem.phi, mu, problem.target), start);
        if (k == cfg.iterations) break;

        const RewardTable reward = potential_reward(problem.phi, mu, problem.target);
        const QTable q = plain_q_backward(reward, problem.kernel, pi);
        const double step = schedule_step(cfg.schedule, scale, k, cfg.iterations);

        for (int i = 0; i < problem.horizon(); ++i) {
            XaTable& row = pi.step(i);
            const XaTable& qi = q[static_cast<std::size_t>(i)];
            for (int x = 0; x < row.n_states; ++x) {
                double top = qi.at(x, 0);
                for (int a = 1; a < row.n_actions; ++a) top = std::max(top, qi.at(x, a));
                double z = 0.0;
                for (int a = 0; a < row.n_actions; ++a) {
                    const double w = row.at(x, a) * std::exp(step * (qi.at(x, a) - top));
                    row.at(x, a) = w;
                    z += w;
                }
                for (int a = 0; a < row.n_actions; ++a) row.at(x, a) /= z;
            }
        }
    }

    out.policy = std::move(pi);
    out.distribution = propagate(problem.mu0, out.policy, problem.kernel);
    out.objective = eval_cost(problem.phi, out.distribution, problem.target);
    return out;
}

SolverOutcome frank_wolfe(const MFCProblem& problem, const SolverConfig& cfg) {
    problem.validate();
    if (cfg.iterations < 0) throw std::invalid_argument("frank_wolfe: negative iteration count");
    const PolicySequence pi0 = starting_policy(problem, cfg);
    const auto start = Clock::now();

    SolverOutcome out;
    DistributionSequence averaged = propagate(problem.mu0, pi0, problem.kernel);
    record(out.history, 0, eval_cost(problem.phi, averaged, problem.target), start);

    for (int k = 0; k < cfg.iterations; ++k) {
        const RewardTable reward = potential_reward(problem.phi, averaged, problem.target);
        const PolicySequence vertex_pi = best_response(reward, problem.kernel).policy;
        const DistributionSequence vertex = propagate(problem.mu0, vertex_pi, problem.kernel);

        const double eta = cfg.schedule == StepSchedule::constant
                               ? std::clamp(cfg.step_scale, 0.0, 1.0)
                               : 2.0 / (k + 2);
        for (int n = 0; n <= averaged.horizon(); ++n) {
            XaTable& bar = averaged.slice(n);
            const XaTable& fresh = vertex.slice(n);
            for (std::size_t i = 0; i < bar.v.size(); ++i) {
                bar.v[i] = (1.0 - eta) * bar.v[i] + eta * fresh.v[i];
            }
        }
        record(out.history, k + 1, eval_cost(problem.phi, averaged, problem.target), start);
    }

    out.policy = policy_from_distribution(averaged);
    out.distribution = propagate(problem.mu0, out.policy, problem.kernel);
    out.objective = eval_cost(problem.phi, out.distribution, problem.target);
    return out;
}

}  // namespace mfc
