// bpl: permanents, Bethe approximations and saddle-point predictions for
// block-constant matrices.

#include "bpl/acceptance.hpp"
#include "bpl/asymptotics.hpp"
#include "bpl/blockmat.hpp"
#include "bpl/covers.hpp"
#include "bpl/error.hpp"
#include "bpl/exactperm.hpp"
#include "bpl/harness.hpp"
#include "bpl/parallel.hpp"
#include "bpl/series.hpp"
#include "bpl/sinkhorn.hpp"
#include "bpl/spa.hpp"
#include "bpl/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using json = nlohmann::ordered_json;

namespace {

struct Common {
    std::string spec_path;
    std::vector<double> q, mu;
    std::vector<int> k, l;
    std::string B_text;
    std::string format;  // empty: csv for record tables, json otherwise
    std::string out;
    std::uint64_t seed = 7;
    unsigned threads = 0;
    double tol = 0;
};

void add_spec_options(CLI::App* cmd, Common& c) {
    cmd->add_option("--spec", c.spec_path, "BlockSpec JSON file");
    cmd->add_option("--q", c.q, "PML probabilities, comma separated")->delimiter(',');
    cmd->add_option("--mu", c.mu, "PML frequencies, comma separated")->delimiter(',');
    cmd->add_option("--B", c.B_text, "base matrix, rows separated by ';', entries by ','");
    cmd->add_option("--k", c.k, "row multiplicities")->delimiter(',');
    cmd->add_option("--l", c.l, "column multiplicities")->delimiter(',');
}

void add_output_options(CLI::App* cmd, Common& c) {
    cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", c.out, "write to this file instead of stdout");
}

bpl::DenseMatrix parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream rs(text);
    std::string row;
    while (std::getline(rs, row, ';')) {
        std::vector<double> r;
        std::stringstream cs(row);
        std::string cell;
        while (std::getline(cs, cell, ',')) r.push_back(std::stod(cell));
        rows.push_back(r);
    }
    return bpl::DenseMatrix::from_rows(rows);
}

bpl::BlockSpec resolve_spec(const Common& c) {
    if (!c.spec_path.empty()) return bpl::load_block_spec(c.spec_path);
    if (c.k.empty() || c.l.empty()) throw bpl::Error(bpl::ErrorKind::InvalidSpec, "give --spec, or --k and --l with --B or --q/--mu");
    if (!c.B_text.empty()) return bpl::BlockSpec(parse_matrix(c.B_text), c.k, c.l);
    if (!c.q.empty()) return bpl::BlockSpec(bpl::pml_block_base(c.q, c.mu), c.k, c.l);
    throw bpl::Error(bpl::ErrorKind::InvalidSpec, "missing base matrix: give --B or --q/--mu");
}

void write(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw bpl::Error(bpl::ErrorKind::InvalidSpec, "cannot write " + c.out);
    f << text;
}

std::string csv_cell(const json& v) {
    if (v.is_array()) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : ";") + csv_cell(x);
        return s;
    }
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    return v.dump();
}

// One flat object as JSON or as a two-line CSV.
void write_object(const Common& c, const json& obj) {
    if (c.format == "json") {
        write(c, obj.dump(2) + "\n");
        return;
    }
    std::string head, row;
    for (const auto& [key, value] : obj.items()) {
        head += (head.empty() ? "" : ",") + key;
        row += (row.empty() ? "" : ",") + csv_cell(value);
    }
    write(c, head + "\n" + row + "\n");
}

json spec_json(const bpl::BlockSpec& s) { return json::parse(bpl::block_spec_to_json(s)); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Permanent, Bethe permanent and saddle-point asymptotics for block-constant matrices"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    std::uint64_t seed = 7;
    unsigned threads = 0;
    app.add_option("--seed", seed, "random seed")->envname("BPL_SEED")->capture_default_str();
    app.add_option("--threads", threads, "worker threads, 0 = hardware")->envname("BPL_THREADS");
    app.add_option("--tol", c.tol, "solver tolerance override");

    auto* perm = app.add_subcommand("perm", "exact permanent of the expanded matrix");
    std::string method = "auto";
    add_spec_options(perm, c);
    add_output_options(perm, c);
    perm->add_option("--method", method, "auto, naive or ryser")->check(CLI::IsMember({"auto", "naive", "ryser"}));

    auto* bethe = app.add_subcommand("bethe", "Bethe permanent by free-energy minimization");
    int max_iter = 10000;
    double damping = 0.0;
    add_spec_options(bethe, c);
    add_output_options(bethe, c);
    bethe->add_option("--max-iter", max_iter);
    bethe->add_option("--damping", damping);

    auto* bethe2 = app.add_subcommand("bethe2", "degree-2 (or degree-M) Bethe permanent");
    std::string route = "auto";
    int M = 2, samples = 256;
    add_spec_options(bethe2, c);
    add_output_options(bethe2, c);
    bethe2->add_option("--route", route, "auto, pair, series, exhaustive or sampled")
        ->check(CLI::IsMember({"auto", "pair", "series", "exhaustive", "sampled"}));
    bethe2->add_option("--M", M, "cover degree for exhaustive/sampled");
    bethe2->add_option("--samples", samples, "cover samples for the sampled route");

    auto* saddle = app.add_subcommand("saddle", "block Sinkhorn scalers and the saddle point");
    add_spec_options(saddle, c);
    add_output_options(saddle, c);

    auto* spec_cmd = app.add_subcommand("spectrum", "kernel spectrum and ratio predictions at the saddle");
    add_spec_options(spec_cmd, c);
    add_output_options(spec_cmd, c);

    auto* predict = app.add_subcommand("predict", "asymptotic Gibbs/Bethe coefficients by both routes");
    add_spec_options(predict, c);
    add_output_options(predict, c);

    auto* coeffs = app.add_subcommand("coeffs", "exact Gibbs/Bethe coefficients from the truncated series");
    add_spec_options(coeffs, c);
    add_output_options(coeffs, c);

    auto* ensemble = app.add_subcommand("ensemble", "random block-matrix ensemble");
    bpl::EnsembleConfig cfg;
    std::string bdist = "uniform01";
    add_spec_options(ensemble, c);
    add_output_options(ensemble, c);
    ensemble->add_option("--n", cfg.n)->capture_default_str();
    ensemble->add_option("--m", cfg.m)->capture_default_str();
    ensemble->add_option("--trials", cfg.trials)->capture_default_str();
    ensemble->add_option("--b-dist", bdist, "uniform01, pml (uses --q/--mu) or fixed (uses --B)")
        ->check(CLI::IsMember({"uniform01", "pml", "fixed"}));

    auto* sweep = app.add_subcommand("sweep", "uniform-partition sweep over n for a PML base");
    std::vector<int> ns{2, 4, 6, 8, 10, 12};
    add_output_options(sweep, c);
    sweep->add_option("--q", c.q)->delimiter(',')->required();
    sweep->add_option("--mu", c.mu)->delimiter(',')->required();
    sweep->add_option("--ns", ns, "sizes")->delimiter(',');

    auto* verify = app.add_subcommand("verify", "run the acceptance checks");

    CLI11_PARSE(app, argc, argv);
    c.seed = seed;
    c.threads = threads;
    if (c.format.empty()) c.format = (*ensemble || *sweep) ? "csv" : "json";
    if (threads) bpl::set_default_threads(threads);

    try {
        if (*perm) {
            auto s = resolve_spec(c);
            auto A = bpl::expand_block(s);
            bpl::LogValue v = method == "naive" ? bpl::permanent_naive(A)
                            : method == "ryser" ? bpl::permanent_ryser(A, threads)
                                                : bpl::permanent(A, threads);
            write_object(c, json{{"n", s.n()}, {"log_perm", v.log()}, {"perm", v.value()}});
        } else if (*bethe) {
            auto A = bpl::expand_block(resolve_spec(c));
            bpl::SpaOptions o;
            o.max_iterations = max_iter;
            o.damping = damping;
            if (c.tol > 0) o.tolerance = c.tol;
            auto r = bpl::bethe_permanent(A, o);
            write_object(c, json{{"n", A.n()},
                                 {"log_bethe", r.value.log()},
                                 {"free_energy", r.free_energy},
                                 {"iterations", r.iterations},
                                 {"converged", r.converged},
                                 {"step", r.step},
                                 {"stationarity", r.stationarity}});
        } else if (*bethe2) {
            auto s = resolve_spec(c);
            auto A = bpl::expand_block(s);
            json out{{"n", s.n()}, {"route", route}};
            if (route == "sampled") {
                auto r = bpl::betheM_sampled(A, M, samples, c.seed, threads);
                out["M"] = M;
                out["samples"] = samples;
                out["seed"] = c.seed;
                out["log_bethe_M"] = r.estimate.log();
                out["stderr_log"] = r.stderr_log;
            } else if (route == "exhaustive") {
                out["M"] = M;
                out["log_bethe_M"] = bpl::betheM_exhaustive(A, M, threads).log();
            } else {
                bool series = route == "series" || (route == "auto" && s.n() > 8);
                out["route"] = series ? "series" : "pair";
                out["log_bethe2"] = (series ? bpl::bethe2_from_series(s) : bpl::bethe2_pair_sum(A, threads)).log();
            }
            write_object(c, out);
        } else if (*saddle) {
            auto s = resolve_spec(c);
            auto w = c.tol > 0 ? bpl::saddle_point(s, c.tol) : bpl::saddle_point(s);
            write_object(c, json{{"spec", spec_json(s)},
                                 {"vright", w.vright},
                                 {"vleft", w.vleft},
                                 {"tstar", w.tstar},
                                 {"ustar", w.ustar},
                                 {"residual", w.residual},
                                 {"iterations", w.iterations},
                                 {"log_scsink", bpl::scaled_sinkhorn_permanent_block(s, bpl::block_fixed_point(s)).log()}});
        } else if (*spec_cmd) {
            auto s = resolve_spec(c);
            auto w = bpl::saddle_point(s);
            auto sp = bpl::spectrum(bpl::build_kernels(s.B(), w.tstar, w.ustar));
            auto t1 = bpl::predict_ratio_theorem1(s.n(), sp.rhos);
            auto sr = bpl::predict_ratio_smallrho(s.n(), sp.rhos);
            write_object(c, json{{"n", s.n()},
                                 {"lambdas", sp.lambdas},
                                 {"rhos", sp.rhos},
                                 {"log_gradient", bpl::perron_log_gradient(s.B(), w.tstar, w.ustar)},
                                 {"pred_thm1", t1.value},
                                 {"pred_thm1_clamped", t1.flagged},
                                 {"pred_smallrho", sr.value},
                                 {"pred_smallrho_outside_range", sr.flagged},
                                 {"pred_allone_b2", bpl::allone_ratio_bethe2(s.n())},
                                 {"pred_allone_bethe", bpl::allone_ratio_bethe(s.n())}});
        } else if (*predict) {
            auto s = resolve_spec(c);
            auto a = bpl::predict_Z(s);
            auto b = bpl::predict_Z_sinkhorn_form(s);
            write_object(c, json{{"n", s.n()},
                                 {"log_zg", a.zg.log()},
                                 {"log_zb", a.zb.log()},
                                 {"log_zg_sinkhorn_form", b.zg.log()},
                                 {"log_zb_sinkhorn_form", b.zb.log()},
                                 {"log_perm_asym", 0.5 * (a.zg.log() + bpl::log_multiplicity_factor(s))},
                                 {"log_bethe2_asym", 0.5 * (a.zb.log() + bpl::log_multiplicity_factor(s))},
                                 {"det_h", a.det_h},
                                 {"grad_norm", a.grad_norm},
                                 {"r_norm", a.r_norm},
                                 {"rhos", a.rhos},
                                 {"ratio_b2", a.ratio_b2}});
        } else if (*coeffs) {
            auto s = resolve_spec(c);
            auto zg = bpl::gibbs_coefficient(s), zb = bpl::bethe_coefficient(s);
            double lf = bpl::log_multiplicity_factor(s);
            write_object(c, json{{"n", s.n()},
                                 {"log_zg", zg.log()},
                                 {"log_zb", zb.log()},
                                 {"log_perm", 0.5 * (zg.log() + lf)},
                                 {"log_bethe2", 0.5 * (zb.log() + lf)}});
        } else if (*ensemble) {
            cfg.seed = c.seed;
            if (!c.spec_path.empty()) {
                auto s = bpl::load_block_spec(c.spec_path);
                cfg.b_distribution = bpl::BDistribution::Fixed;
                cfg.fixed_B = s.B();
                cfg.m = s.m();
                cfg.n = s.n();
                cfg.partition_mode = bpl::PartitionMode::Fixed;
                cfg.k = s.k();
                cfg.l = s.l();
            } else if (bdist == "pml") {
                cfg.b_distribution = bpl::BDistribution::Pml;
                cfg.q = c.q;
                cfg.mu = c.mu;
            } else if (bdist == "fixed") {
                cfg.b_distribution = bpl::BDistribution::Fixed;
                cfg.fixed_B = parse_matrix(c.B_text);
            }
            if (c.spec_path.empty() && (!c.k.empty() || !c.l.empty())) {
                cfg.partition_mode = bpl::PartitionMode::Fixed;
                cfg.k = c.k;
                cfg.l = c.l;
            }
            auto records = bpl::run_fig1_ensemble(cfg, threads);
            write(c, c.format == "csv" ? bpl::records_to_csv(records)
                                       : bpl::records_to_json(records, bpl::config_metadata_json(cfg)));
        } else if (*sweep) {
            auto records = bpl::run_pml_sweep(c.q, c.mu, ns, threads);
            json meta{{"q", c.q}, {"mu", c.mu}, {"ns", ns}};
            write(c, c.format == "csv" ? bpl::records_to_csv(records) : bpl::records_to_json(records, meta.dump()));
        } else if (*verify) {
            auto results = bpl::run_acceptance(threads, [](const bpl::CriterionResult& r) {
                std::cout << bpl::format_criterion(r) << std::endl;
            });
            int failed = 0;
            for (const auto& r : results) failed += !r.pass;
            return failed ? 1 : 0;
        }
    } catch (const bpl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
