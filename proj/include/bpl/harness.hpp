#pragma once

#include "bpl/blockmat.hpp"
#include "bpl/matrix.hpp"
#include "bpl/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bpl {

enum class BDistribution { Uniform01, Pml, Fixed };
enum class PartitionMode { Random, Fixed };

struct EnsembleConfig {
    int n = 5;
    int m = 2;
    int trials = 200;
    std::uint64_t seed = 7;
    // Uniform on (0,1] is a chosen default; the figure protocol leaves the
    // distribution open.
    BDistribution b_distribution = BDistribution::Uniform01;
    std::vector<double> q;   // Pml
    std::vector<double> mu;  // Pml
    DenseMatrix fixed_B;     // Fixed
    PartitionMode partition_mode = PartitionMode::Random;
    std::vector<int> k;      // Fixed partitions
    std::vector<int> l;

    // Throws InvalidSpec.
    void validate() const;
};

enum class Bethe2Route { Auto, PairSum, Series };

struct TrialRecord {
    int trial_index = 0;
    int n = 0;
    int m = 0;
    DenseMatrix B;
    std::vector<int> k;
    std::vector<int> l;
    double log_perm = 0.0;
    double log_bethe2 = 0.0;
    std::string bethe2_route;
    // Empty when the Bethe solver did not converge.
    std::optional<double> log_bethe;
    int bethe_iterations = 0;
    double log_scsink = 0.0;
    std::vector<double> rhos;
    double pred_thm1 = 0.0;
    double pred_allone_b2 = 0.0;     // (pi n / e)^{1/4}
    double pred_allone_bethe = 0.0;  // sqrt(2 pi n / e)
    // Set when a module raised; numeric fields are then unreliable.
    std::string error;
};

// Every quantity of one record for a given spec. Auto uses the pair sum for
// n <= 8 and the Bethe series bridge above that.
TrialRecord evaluate_spec(const BlockSpec& spec, int trial_index, Bethe2Route route = Bethe2Route::Auto);

// The spec of trial `trial_index`, drawn from a stream keyed by
// (seed, trial_index).
BlockSpec draw_trial_spec(const EnsembleConfig& cfg, int trial_index);

// Uniform positive composition of n into m parts.
std::vector<int> random_composition(int n, int m, KeyedRng& rng);

// n <= 8. Records are in trial order for any thread count.
std::vector<TrialRecord> run_fig1_ensemble(const EnsembleConfig& cfg, unsigned threads = 1);

// For each n: k = l = (n/m, ..., n/m). Needs n divisible by m and n <= 12.
std::vector<TrialRecord> run_pml_sweep(const std::vector<double>& q, const std::vector<double>& mu,
                                       const std::vector<int>& ns, unsigned threads = 1);

enum class RecordField { Perm, Bethe2, Bethe, ScSink };
RecordField parse_record_field(const std::string& name);

struct RatioFit {
    double slope = 0.0;
    double residual = 0.0;  // RMS of y / (slope x) - 1
    int used = 0;
};

// Least squares through the origin on the linear values behind the logs.
// Records with errors or a missing field are skipped. Throws
// InsufficientData with fewer than 2 usable records.
RatioFit fit_ratio(const std::vector<TrialRecord>& records, RecordField x, RecordField y);

struct BoundsCheck {
    bool bethe = true;    // 1 <= perm / perm_Bethe <= 2^{n/2}
    bool scsink = true;   // e^n n! / n^n <= perm / perm_scSink <= e^n
    bool bethe2 = true;   // perm / perm_B2 >= 1
    bool all() const { return bethe && scsink && bethe2; }
};

// Log-domain comparisons with slack 1e-9 for roundoff at equality cases.
BoundsCheck check_bounds(const TrialRecord& r);

std::string records_to_csv(const std::vector<TrialRecord>& records);
std::string records_to_json(const std::vector<TrialRecord>& records, const std::string& metadata_json = "{}");
std::string config_metadata_json(const EnsembleConfig& cfg);

}  // namespace bpl
