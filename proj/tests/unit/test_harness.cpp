#include "doctest.h"

#include "bpl/covers.hpp"
#include "bpl/error.hpp"
#include "bpl/exactperm.hpp"
#include "bpl/harness.hpp"
#include "bpl/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace bpl;

namespace {

TrialRecord point(double x, double y) {
    TrialRecord r;
    r.log_perm = std::log(x);
    r.log_bethe2 = std::log(y);
    return r;
}

EnsembleConfig small_config() {
    EnsembleConfig cfg;
    cfg.n = 5;
    cfg.m = 2;
    cfg.trials = 24;
    cfg.seed = 3;
    return cfg;
}

}  // namespace

TEST_CASE("compositions are positive and sum to n") {
    KeyedRng rng(1, 2);
    for (int trial = 0; trial < 200; ++trial) {
        auto c = random_composition(7, 3, rng);
        REQUIRE(c.size() == 3);
        int sum = 0;
        for (int x : c) {
            CHECK(x >= 1);
            sum += x;
        }
        CHECK(sum == 7);
    }
    auto one = random_composition(4, 1, rng);
    CHECK(one == std::vector<int>{4});
}

TEST_CASE("configuration checks") {
    auto cfg = small_config();
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = small_config();
    cfg.n = 9;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = small_config();
    cfg.m = 6;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = small_config();
    cfg.b_distribution = BDistribution::Pml;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK_THROWS_AS(run_pml_sweep({0.6, 0.4}, {2, 1}, {5}), Error);
    CHECK_THROWS_AS(parse_record_field("nope"), Error);
}

TEST_CASE("trial specs are a function of the seed and index") {
    auto cfg = small_config();
    auto a = draw_trial_spec(cfg, 5);
    auto b = draw_trial_spec(cfg, 5);
    CHECK(a.B() == b.B());
    CHECK(a.k() == b.k());
    CHECK(a.l() == b.l());
    for (double x : a.B().data()) {
        CHECK(x > 0.0);
        CHECK(x <= 1.0);
    }
}

TEST_CASE("fixed partitions and power-law bases") {
    auto cfg = small_config();
    cfg.b_distribution = BDistribution::Pml;
    cfg.q = {0.6, 0.4};
    cfg.mu = {2, 1};
    cfg.partition_mode = PartitionMode::Fixed;
    cfg.k = {3, 2};
    cfg.l = {1, 4};
    auto s = draw_trial_spec(cfg, 0);
    CHECK(s.k() == cfg.k);
    CHECK(s.l() == cfg.l);
    CHECK(s.b(1, 0) == doctest::Approx(0.16));
}

TEST_CASE("ensemble output does not depend on the thread count") {
    auto cfg = small_config();
    auto one = run_fig1_ensemble(cfg, 1);
    auto many = run_fig1_ensemble(cfg, 4);
    REQUIRE(one.size() == 24);
    for (int i = 0; i < 24; ++i) CHECK(one[i].trial_index == i);
    CHECK(records_to_csv(one) == records_to_csv(many));
    CHECK(records_to_csv(one) == records_to_csv(run_fig1_ensemble(cfg, 1)));
}

TEST_CASE("every ensemble record satisfies the bounds") {
    auto records = run_fig1_ensemble(small_config(), 1);
    for (const auto& r : records) {
        CHECK(r.error.empty());
        REQUIRE(r.log_bethe.has_value());
        auto b = check_bounds(r);
        CHECK(b.bethe);
        CHECK(b.scsink);
        CHECK(b.bethe2);
    }
}

TEST_CASE("smallest sweep member against brute force") {
    auto rec = run_pml_sweep({0.6, 0.4}, {2, 1}, {2}).at(0);
    auto A = DenseMatrix{{0.36, 0.6}, {0.16, 0.4}};
    CHECK(rec.log_perm == doctest::Approx(permanent_naive(A).log()).epsilon(1e-13));
    CHECK(rec.log_bethe2 == doctest::Approx(betheM_exhaustive(A, 2).log()).epsilon(1e-12));
}

TEST_CASE("sweep second eigenvalue ratio and routes") {
    auto recs = run_pml_sweep({0.6, 0.4}, {2, 1}, {4, 8, 10});
    for (const auto& r : recs) {
        CHECK(r.error.empty());
        CHECK(std::abs(r.rhos.at(0) - 0.0102) < 5e-4);
    }
    CHECK(recs[1].bethe2_route == "pair_sum");
    CHECK(recs[2].bethe2_route == "series");
    // both routes agree where they overlap
    auto spec = BlockSpec(recs[1].B, recs[1].k, recs[1].l);
    CHECK(evaluate_spec(spec, 0, Bethe2Route::Series).log_bethe2 ==
          doctest::Approx(recs[1].log_bethe2).epsilon(1e-10));
}

TEST_CASE("ratio fits") {
    std::vector<TrialRecord> line{point(1, 2), point(3, 6), point(0.5, 1)};
    auto f = fit_ratio(line, RecordField::Perm, RecordField::Bethe2);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.residual == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(f.used == 3);

    std::vector<TrialRecord> dup{point(4, 3), point(4, 3)};
    CHECK(fit_ratio(dup, RecordField::Perm, RecordField::Bethe2).slope == doctest::Approx(0.75));

    std::vector<TrialRecord> bad{point(1, 1), point(2, 2)};
    bad[1].error = "x";
    CHECK_THROWS_AS(fit_ratio(bad, RecordField::Perm, RecordField::Bethe2), Error);

    // huge logs do not overflow
    std::vector<TrialRecord> big{point(1, 2), point(3, 6)};
    for (auto& r : big) {
        r.log_perm += 2000;
        r.log_bethe2 += 2000;
    }
    CHECK(fit_ratio(big, RecordField::Perm, RecordField::Bethe2).slope == doctest::Approx(2.0));
}

TEST_CASE("csv and json output") {
    auto recs = run_pml_sweep({0.6, 0.4}, {2, 1}, {4});
    auto csv = records_to_csv(recs);
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "trial_index,n,m,log_perm,log_bethe2,log_bethe,log_scsink,rho2,pred_thm1");
    CHECK(std::count(row.begin(), row.end(), ',') == 8);

    auto cfg = small_config();
    auto j = nlohmann::json::parse(records_to_json(recs, config_metadata_json(cfg)));
    CHECK(j["records"].size() == 1);
    CHECK(j["metadata"]["b_distribution_is_default"] == true);
    CHECK(j["records"][0]["n"] == 4);
}
