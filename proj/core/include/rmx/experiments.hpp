#pragma once

#include <map>
#include <string>

#include "rmx/matrix.hpp"
#include "rmx/rng.hpp"

namespace rmx {

/// One row of an experiment table: summary statistics of a metric over the
/// seeded trials.
struct TrialStats {
    std::string experiment;
    std::string family;
    std::size_t n = 0;
    std::size_t r_or_q = 0;
    std::string metric;
    double min = 0.0, max = 0.0, mean = 0.0, std_dev = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

TrialStats summarize(const std::vector<double>& samples);

struct ExperimentResult {
    std::vector<TrialStats> rows;
    /// raw per-trial values keyed by "family/n/r/metric"; the acceptance
    /// suite reads medians and quantiles off these
    std::map<std::string, std::vector<double>> samples;

    void add(const std::string& experiment, const std::string& family, std::size_t n,
             std::size_t r_or_q, const std::string& metric, std::vector<double> values,
             Seed seed);
    const std::vector<double>& at(const std::string& key) const;
};

struct ExperimentParams {
    std::size_t n = 64;
    std::size_t r = 1;             // r or q depending on the experiment
    std::size_t trials = 100;
    Seed seed{1};
    int refine = 2;
    std::string family = "gauss";  // condstats: gauss|toeplitz|circulant; sampling: gauss|toeplitz
    std::string method = "orthogonal";
    std::string dist = "gaussian";  // condstats entry distribution: gaussian|uniform
    double tol = 1e-8;
};

// the experiment battery behind the CLI subcommands
ExperimentResult exp_condstats(const ExperimentParams& p);
ExperimentResult exp_precondstats(const ExperimentParams& p);   // class1n..4s via family
ExperimentResult exp_genp(const ExperimentParams& p);
ExperimentResult exp_svd_tail(const ExperimentParams& p);
ExperimentResult exp_svd_head(const ExperimentParams& p);
ExperimentResult exp_svd_head_sampling(const ExperimentParams& p);
ExperimentResult exp_blocktri(const ExperimentParams& p);       // method: orthogonal|simplified
ExperimentResult exp_blocktri_dual(const ExperimentParams& p);
ExperimentResult exp_blocktri_sampling(const ExperimentParams& p);
ExperimentResult exp_smw_solve(const ExperimentParams& p);
ExperimentResult exp_toeplitz_aug(const ExperimentParams& p);
ExperimentResult exp_appendix_b(const ExperimentParams& p);     // r = grid exponent? see impl
ExperimentResult exp_tt_demo(const ExperimentParams& p);

/// Dispatch by subcommand name; throws on unknown names.
ExperimentResult run_experiment(const std::string& name, const ExperimentParams& p);

/// CSV schema: experiment,family,n,r_or_q,metric,min,max,mean,std,trials,seed
void write_csv(std::ostream& os, const std::vector<TrialStats>& rows);

// shared instance builders
/// Well conditioned matrix whose leading n/2 block is (numerically) singular.
DenseMatrix genp_hard_instance(std::size_t n, Seed seed);
/// Planted-SVD family with sigma = 1/j then 1e-10 (numerical rank q).
DenseMatrix head_family(std::size_t n, std::size_t q, Seed seed);
/// Planted-SVD family with sigma = 1/j then 1e-17 (numerical nullity r).
DenseMatrix tail17_family(std::size_t n, std::size_t r, Seed seed);
/// Right singular block T_{q,A} / trailing block of the planted factors.
struct PlantedFamily {
    DenseMatrix A;
    DenseMatrix T_lead;   // n x q
    DenseMatrix T_trail;  // n x r
};
PlantedFamily planted_with_bases(const Vec& sigma, std::size_t q, Seed seed);

/// relative residual ||A y - b|| / ||b|| with compensated accumulation
double relative_residual(const DenseMatrix& a, const Vec& y, const Vec& b);

}  // namespace rmx
