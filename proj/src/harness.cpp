#include "bpl/harness.hpp"

#include "bpl/covers.hpp"
#include "bpl/error.hpp"
#include "bpl/exactperm.hpp"
#include "bpl/parallel.hpp"
#include "bpl/rng.hpp"
#include "bpl/series.hpp"
#include "bpl/sinkhorn.hpp"
#include "bpl/spa.hpp"
#include "bpl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

namespace bpl {

void EnsembleConfig::validate() const {
    if (trials < 1) throw Error(ErrorKind::InvalidSpec, "trials must be >= 1");
    if (m < 1 || n < m) throw Error(ErrorKind::InvalidSpec, "need n >= m >= 1");
    if (n > 8) throw Error(ErrorKind::TooLarge, "ensembles need n <= 8");
    if (b_distribution == BDistribution::Pml && (q.size() != std::size_t(m) || mu.size() != std::size_t(m)))
        throw Error(ErrorKind::InvalidSpec, "pml distribution needs q and mu of length m");
    if (b_distribution == BDistribution::Fixed && (fixed_B.rows() != std::size_t(m) || !fixed_B.square()))
        throw Error(ErrorKind::InvalidSpec, "fixed B must be m x m");
    if (partition_mode == PartitionMode::Fixed) {
        if (k.size() != std::size_t(m) || l.size() != std::size_t(m))
            throw Error(ErrorKind::InvalidSpec, "fixed partitions need k and l of length m");
        if (std::accumulate(k.begin(), k.end(), 0) != n || std::accumulate(l.begin(), l.end(), 0) != n)
            throw Error(ErrorKind::InvalidSpec, "fixed partitions must sum to n");
    }
}

std::vector<int> random_composition(int n, int m, KeyedRng& rng) {
    // m-1 distinct cut points out of 1..n-1, uniformly.
    std::vector<int> cuts(n - 1);
    std::iota(cuts.begin(), cuts.end(), 1);
    for (int i = 0; i < m - 1; ++i) {
        std::size_t j = i + rng.below(cuts.size() - i);
        std::swap(cuts[i], cuts[j]);
    }
    cuts.resize(m - 1);
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> parts;
    int prev = 0;
    for (int c : cuts) {
        parts.push_back(c - prev);
        prev = c;
    }
    parts.push_back(n - prev);
    return parts;
}

BlockSpec draw_trial_spec(const EnsembleConfig& cfg, int trial_index) {
    KeyedRng rng(cfg.seed, static_cast<std::uint64_t>(trial_index));
    DenseMatrix B(cfg.m);
    switch (cfg.b_distribution) {
        case BDistribution::Uniform01:
            for (int i = 0; i < cfg.m; ++i)
                for (int j = 0; j < cfg.m; ++j) B(i, j) = 1.0 - rng.uniform();
            break;
        case BDistribution::Pml: B = pml_block_base(cfg.q, cfg.mu); break;
        case BDistribution::Fixed: B = cfg.fixed_B; break;
    }
    if (cfg.partition_mode == PartitionMode::Fixed) return BlockSpec(B, cfg.k, cfg.l);
    auto k = random_composition(cfg.n, cfg.m, rng);
    auto l = random_composition(cfg.n, cfg.m, rng);
    return BlockSpec(B, k, l);
}

TrialRecord evaluate_spec(const BlockSpec& spec, int trial_index, Bethe2Route route) {
    TrialRecord r;
    r.trial_index = trial_index;
    r.n = spec.n();
    r.m = spec.m();
    r.B = spec.B();
    r.k = spec.k();
    r.l = spec.l();
    r.pred_allone_b2 = allone_ratio_bethe2(r.n);
    r.pred_allone_bethe = allone_ratio_bethe(r.n);
    try {
        const DenseMatrix A = expand_block(spec);
        r.log_perm = permanent(A).log();
        if (route == Bethe2Route::Auto) route = r.n <= 8 ? Bethe2Route::PairSum : Bethe2Route::Series;
        if (route == Bethe2Route::PairSum) {
            r.log_bethe2 = bethe2_pair_sum(A).log();
            r.bethe2_route = "pair_sum";
        } else {
            r.log_bethe2 = bethe2_from_series(spec).log();
            r.bethe2_route = "series";
        }
        BetheSolution bs = bethe_permanent(A);
        r.bethe_iterations = bs.iterations;
        if (bs.converged) r.log_bethe = bs.value.log();
        r.log_scsink = scaled_sinkhorn_permanent(A).log();
        SaddlePoint w = saddle_point(spec);
        r.rhos = spectrum(build_kernels(spec.B(), w.tstar, w.ustar)).rhos;
        r.pred_thm1 = predict_ratio_theorem1(r.n, r.rhos).value;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

std::vector<TrialRecord> run_fig1_ensemble(const EnsembleConfig& cfg, unsigned threads) {
    cfg.validate();
    std::vector<TrialRecord> out(cfg.trials);
    for_each_chunk(static_cast<std::size_t>(cfg.trials), threads, [&](std::size_t t) {
        const int idx = static_cast<int>(t);
        try {
            out[t] = evaluate_spec(draw_trial_spec(cfg, idx), idx);
        } catch (const std::exception& e) {
            out[t].trial_index = idx;
            out[t].n = cfg.n;
            out[t].m = cfg.m;
            out[t].error = e.what();
        }
    });
    return out;
}

std::vector<TrialRecord> run_pml_sweep(const std::vector<double>& q, const std::vector<double>& mu,
                                       const std::vector<int>& ns, unsigned threads) {
    const DenseMatrix B = pml_block_base(q, mu);
    const int m = static_cast<int>(B.n());
    for (int n : ns)
        if (n < m || n % m || n > 12) throw Error(ErrorKind::InvalidSpec, "sweep sizes must be multiples of m, <= 12");
    std::vector<TrialRecord> out(ns.size());
    for_each_chunk(ns.size(), threads, [&](std::size_t i) {
        const int n = ns[i];
        BlockSpec spec(B, std::vector<int>(m, n / m), std::vector<int>(m, n / m));
        out[i] = evaluate_spec(spec, static_cast<int>(i));
    });
    return out;
}

RecordField parse_record_field(const std::string& name) {
    if (name == "perm") return RecordField::Perm;
    if (name == "bethe2") return RecordField::Bethe2;
    if (name == "bethe") return RecordField::Bethe;
    if (name == "scsink") return RecordField::ScSink;
    throw Error(ErrorKind::InvalidSpec, "unknown record field " + name);
}

namespace {

std::optional<double> field_log(const TrialRecord& r, RecordField f) {
    if (!r.error.empty()) return std::nullopt;
    switch (f) {
        case RecordField::Perm: return r.log_perm;
        case RecordField::Bethe2: return r.log_bethe2;
        case RecordField::Bethe: return r.log_bethe;
        case RecordField::ScSink: return r.log_scsink;
    }
    return std::nullopt;
}

}  // namespace

RatioFit fit_ratio(const std::vector<TrialRecord>& records, RecordField fx, RecordField fy) {
    std::vector<double> lx, ly;
    for (const auto& r : records) {
        auto x = field_log(r, fx), y = field_log(r, fy);
        if (x && y) {
            lx.push_back(*x);
            ly.push_back(*y);
        }
    }
    if (lx.size() < 2) throw Error(ErrorKind::InsufficientData, "fit_ratio needs at least 2 usable records");
    // A common shift leaves the slope unchanged and keeps exp() in range.
    double shift = *std::max_element(lx.begin(), lx.end());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        double x = std::exp(lx[i] - shift), y = std::exp(ly[i] - shift);
        sxy += x * y;
        sxx += x * x;
    }
    RatioFit fit;
    fit.slope = sxy / sxx;
    double ss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        double dev = std::exp(ly[i] - lx[i]) / fit.slope - 1;
        ss += dev * dev;
    }
    fit.residual = std::sqrt(ss / lx.size());
    fit.used = static_cast<int>(lx.size());
    return fit;
}

BoundsCheck check_bounds(const TrialRecord& r) {
    constexpr double slack = 1e-9;
    BoundsCheck b;
    if (!r.error.empty()) {
        b.bethe = b.scsink = b.bethe2 = false;
        return b;
    }
    const double n = r.n;
    if (r.log_bethe) {
        double gap = r.log_perm - *r.log_bethe;
        b.bethe = gap >= -slack && gap <= 0.5 * n * std::log(2.0) + slack;
    }
    double gs = r.log_perm - r.log_scsink;
    b.scsink = gs >= n + std::lgamma(n + 1) - n * std::log(n) - slack && gs <= n + slack;
    b.bethe2 = r.log_perm - r.log_bethe2 >= -slack;
    return b;
}

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string records_to_csv(const std::vector<TrialRecord>& records) {
    int m = 1;
    for (const auto& r : records) m = std::max(m, r.m);
    std::string out = "trial_index,n,m,log_perm,log_bethe2,log_bethe,log_scsink";
    for (int i = 2; i <= m; ++i) out += ",rho" + std::to_string(i);
    out += ",pred_thm1\n";
    for (const auto& r : records) {
        const bool ok = r.error.empty();
        out += std::to_string(r.trial_index) + "," + std::to_string(r.n) + "," + std::to_string(r.m);
        out += "," + (ok ? num(r.log_perm) : "");
        out += "," + (ok ? num(r.log_bethe2) : "");
        out += "," + (ok && r.log_bethe ? num(*r.log_bethe) : "");
        out += "," + (ok ? num(r.log_scsink) : "");
        for (int i = 0; i < m - 1; ++i) out += "," + (ok && i < int(r.rhos.size()) ? num(r.rhos[i]) : "");
        out += "," + (ok ? num(r.pred_thm1) : "");
        out += "\n";
    }
    return out;
}

std::string records_to_json(const std::vector<TrialRecord>& records, const std::string& metadata_json) {
    nlohmann::ordered_json doc;
    doc["metadata"] = nlohmann::ordered_json::parse(metadata_json);
    auto& arr = doc["records"] = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["trial_index"] = r.trial_index;
        j["n"] = r.n;
        j["m"] = r.m;
        j["B"] = r.B.to_rows();
        j["k"] = r.k;
        j["l"] = r.l;
        if (r.error.empty()) {
            j["log_perm"] = r.log_perm;
            j["log_bethe2"] = r.log_bethe2;
            j["bethe2_route"] = r.bethe2_route;
            j["log_bethe"] = r.log_bethe ? nlohmann::ordered_json(*r.log_bethe) : nlohmann::ordered_json(nullptr);
            j["bethe_converged"] = r.log_bethe.has_value();
            j["bethe_iterations"] = r.bethe_iterations;
            j["log_scsink"] = r.log_scsink;
            j["rhos"] = r.rhos;
            j["pred_thm1"] = r.pred_thm1;
            j["pred_allone_b2"] = r.pred_allone_b2;
            j["pred_allone_bethe"] = r.pred_allone_bethe;
        } else {
            j["error"] = r.error;
        }
        arr.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

std::string config_metadata_json(const EnsembleConfig& cfg) {
    nlohmann::ordered_json j;
    j["n"] = cfg.n;
    j["m"] = cfg.m;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    switch (cfg.b_distribution) {
        case BDistribution::Uniform01:
            j["b_distribution"] = "uniform01";
            j["b_distribution_is_default"] = true;
            break;
        case BDistribution::Pml:
            j["b_distribution"] = "pml";
            j["q"] = cfg.q;
            j["mu"] = cfg.mu;
            break;
        case BDistribution::Fixed:
            j["b_distribution"] = "fixed";
            j["B"] = cfg.fixed_B.to_rows();
            break;
    }
    if (cfg.partition_mode == PartitionMode::Random) {
        j["partition_mode"] = "random";
        j["partition_mode_is_default"] = true;
    } else {
        j["partition_mode"] = "fixed";
        j["k"] = cfg.k;
        j["l"] = cfg.l;
    }
    return j.dump();
}

}  // namespace bpl
