#pragma once

#include "mfc/mdp.hpp"
#include "mfc/objective.hpp"
#include "mfc/tables.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mfc {

// Target-tracking mean-field control problem over a finite-horizon MDP.
struct MFCProblem {
    int n_states = 0;
    int n_actions = 0;
    TimedKernel kernel;          // steps 0..N-1
    XaTable mu0;                 // initial joint distribution
    ConsumptionObservable phi;   // observable driving the quadratic cost
    TargetSignal target;         // levels for times 1..N

    int horizon() const { return kernel.horizon(); }
    void validate() const;  // throws std::invalid_argument
};

// Reward / Q tables for times 1..N; entry i holds time i+1.
using RewardTable = std::vector<XaTable>;
using QTable = std::vector<XaTable>;

// Potential-game reward r_n(x,a) = -grad f_n(mu_n)(x,a); constant across
// actions and zero wherever phi vanishes.
RewardTable potential_reward(const ConsumptionObservable& phi, const DistributionSequence& mu,
                             const TargetSignal& target);

// Q_N = r_N;  Q_n(x,a) = r_n(x,a) + sum_{x'} p_{n+1}(x'|x,a)
//                                    sum_{a'} pi_{n+1}(a'|x') Q_{n+1}(x',a').
QTable plain_q_backward(const RewardTable& reward, const TimedKernel& kernel,
                        const PolicySequence& pi);

struct BackwardResult {
    PolicySequence policy;
    QTable q;
};

// Backward induction with a hard max. The returned policy splits mass
// uniformly across exactly-maximizing actions, so ties yield a deterministic
// stochastic row instead of an arbitrary pick.
BackwardResult best_response(const RewardTable& reward, const TimedKernel& kernel);

// One mirror-descent backward pass: the policy update
//   pi_new_{n}(a|x) = pi_prev_{n}(a|x) exp(step Qt_n(x,a)) / normalizer
// together with the regularized backward recursion whose inner maximum is
// evaluated in log-partition closed form,
//   Qt_n(x,a) = r_n(x,a) + sum_{x'} p_{n+1}(x'|x,a) (1/step)
//                 log sum_{a'} pi_prev_{n+1}(a'|x') exp(step Qt_{n+1}(x',a')).
// Throws std::invalid_argument when step <= 0.
BackwardResult regularized_backward_pass(const RewardTable& reward, const TimedKernel& kernel,
                                         const PolicySequence& pi_prev, double step);

// sum_{x,a} [r(x,a,mu) - r(x,a,mu_alt)] (mu - mu_alt)(x,a) with r = -grad f_n.
// Nonpositive for the quadratic tracking reward; equals
// -2 (consumption(mu) - consumption(mu_alt))^2.
double monotonicity_gap(const ConsumptionObservable& phi, const XaTable& mu,
                        const XaTable& mu_alt, double gamma_n);

// F evaluated at the sequence induced by pi.
double objective_of(const MFCProblem& problem, const PolicySequence& pi);

enum class StepSchedule {
    constant,   // step_k = c
    theorem2,   // step_k = c / sqrt(K)
    harmonic,   // step_k = c / sqrt(k + 1)
};

struct SolverConfig {
    int iterations = 100;
    StepSchedule schedule = StepSchedule::theorem2;
    // Scale c of the schedule; nonpositive selects the default 1/L with
    // L = lipschitz_bound(N).
    double step_scale = 0.0;
    // Starting policy; uniform when absent. Mirror-descent solvers require a
    // strictly positive start.
    std::optional<PolicySequence> initial_policy;
    std::uint64_t seed = 0;
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;
    double running_min = 0.0;
    double wall_ms = 0.0;
};

struct SolverHistory {
    std::vector<IterationRecord> iterations;
};

struct SolverOutcome {
    PolicySequence policy;            // returned iterate
    DistributionSequence distribution;  // induced by the returned policy
    double objective = 0.0;           // F at the returned policy
    SolverHistory history;
};

// Mirror descent on the occupation-measure polytope; returns the iterate with
// the smallest objective seen, matching the min over iterates in the rate
// statement.
SolverOutcome md_mfc(const MFCProblem& problem, const SolverConfig& cfg);

// Fictitious play against the averaged distribution; returns the averaged
// policy whose induced sequence reproduces the averaged distribution.
SolverOutcome fp_mfg(const MFCProblem& problem, const SolverConfig& cfg);

// Online mirror descent with the plain Q-function and multiplicative-weights
// policy updates; returns the last iterate.
SolverOutcome omd_mfg(const MFCProblem& problem, const SolverConfig& cfg);

// Conditional-gradient method; the linear minimization oracle is a best
// response to the potential reward. Returns the policy generating the
// averaged distribution.
SolverOutcome frank_wolfe(const MFCProblem& problem, const SolverConfig& cfg);

}  // namespace mfc
