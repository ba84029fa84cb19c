#include "bpl/asymptotics.hpp"
#include "bpl/blockmat.hpp"
#include "bpl/covers.hpp"
#include "bpl/error.hpp"
#include "bpl/exactperm.hpp"
#include "bpl/harness.hpp"
#include "bpl/series.hpp"
#include "bpl/sinkhorn.hpp"
#include "bpl/spa.hpp"
#include "bpl/spectral.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using Rows = std::vector<std::vector<double>>;

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace {

bpl::DenseMatrix mat(const Rows& rows) { return bpl::DenseMatrix::from_rows(rows); }

py::dict prediction_dict(const bpl::AsymptoticPrediction& p) {
    py::dict d;
    d["log_zg"] = p.zg.log();
    d["log_zb"] = p.zb.log();
    d["det_h"] = p.det_h;
    d["grad_norm"] = p.grad_norm;
    d["r_norm"] = p.r_norm;
    d["rhos"] = p.rhos;
    d["ratio_b2"] = p.ratio_b2;
    return d;
}

py::list records_list(const std::vector<bpl::TrialRecord>& records) {
    py::list out;
    for (const auto& r : records) {
        py::dict d;
        d["trial_index"] = r.trial_index;
        d["n"] = r.n;
        d["m"] = r.m;
        d["B"] = r.B.to_rows();
        d["k"] = r.k;
        d["l"] = r.l;
        d["log_perm"] = r.log_perm;
        d["log_bethe2"] = r.log_bethe2;
        d["log_bethe"] = r.log_bethe ? py::cast(*r.log_bethe) : py::none();
        d["log_scsink"] = r.log_scsink;
        d["rhos"] = r.rhos;
        d["pred_thm1"] = r.pred_thm1;
        d["error"] = r.error;
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Permanents, Bethe permanents and saddle-point asymptotics for block-constant matrices";

    py::register_exception<bpl::Error>(m, "BplError", PyExc_ValueError);

    py::class_<bpl::BlockSpec>(m, "BlockSpec")
        .def(py::init([](const Rows& B, std::vector<int> k, std::vector<int> l) {
                 return bpl::BlockSpec(mat(B), std::move(k), std::move(l));
             }),
             py::arg("B"), py::arg("k"), py::arg("l"))
        .def_property_readonly("m", &bpl::BlockSpec::m)
        .def_property_readonly("n", &bpl::BlockSpec::n)
        .def_property_readonly("B", [](const bpl::BlockSpec& s) { return s.B().to_rows(); })
        .def_property_readonly("k", &bpl::BlockSpec::k)
        .def_property_readonly("l", &bpl::BlockSpec::l)
        .def("__repr__", &bpl::block_spec_to_json);

    m.def("expand_block", [](const bpl::BlockSpec& s) { return bpl::expand_block(s).to_rows(); });
    m.def("pml_block_base", [](const std::vector<double>& q, const std::vector<double>& mu) {
        return bpl::pml_block_base(q, mu).to_rows();
    });
    m.def("load_block_spec", &bpl::load_block_spec);

    m.def("permanent_naive", [](const Rows& A) { return bpl::permanent_naive(mat(A)).log(); },
          "log of the permanent by enumeration");
    m.def("permanent_ryser", [](const Rows& A, unsigned threads) { return bpl::permanent_ryser(mat(A), threads).log(); },
          py::arg("A"), py::arg("threads") = 1, "log of the permanent by Ryser's formula");
    m.def("cycle_count", [](const std::vector<int>& image) { return bpl::cycle_count(bpl::Permutation(image)); },
          "cycles of length >= 2 of a 0-based permutation");

    m.def("bethe2_pair_sum", [](const Rows& A) { return bpl::bethe2_pair_sum(mat(A)).log(); });
    m.def("betheM_exhaustive", [](const Rows& A, int M) { return bpl::betheM_exhaustive(mat(A), M).log(); });
    m.def("betheM_sampled",
          [](const Rows& A, int M, int samples, std::uint64_t seed) {
              auto r = bpl::betheM_sampled(mat(A), M, samples, seed);
              return py::make_tuple(r.estimate.log(), r.stderr_log);
          },
          py::arg("A"), py::arg("M"), py::arg("samples"), py::arg("seed"));

    m.def("bethe_permanent",
          [](const Rows& A, int max_iterations, double tolerance, double damping) {
              bpl::SpaOptions o;
              o.max_iterations = max_iterations;
              o.tolerance = tolerance;
              o.damping = damping;
              auto s = bpl::bethe_permanent(mat(A), o);
              py::dict d;
              d["log_value"] = s.value.log();
              d["free_energy"] = s.free_energy;
              d["gamma"] = s.gamma.to_rows();
              d["iterations"] = s.iterations;
              d["converged"] = s.converged;
              return d;
          },
          py::arg("A"), py::arg("max_iterations") = 10000, py::arg("tolerance") = 1e-12, py::arg("damping") = 0.0);

    m.def("sinkhorn_scale", [](const Rows& A) {
        auto s = bpl::sinkhorn_scale(mat(A));
        py::dict d;
        d["d1"] = s.d1;
        d["d2"] = s.d2;
        d["U"] = s.U.to_rows();
        d["iterations"] = s.iterations;
        d["residual"] = s.residual;
        return d;
    });
    m.def("scaled_sinkhorn_permanent", [](const Rows& A) { return bpl::scaled_sinkhorn_permanent(mat(A)).log(); });
    m.def("saddle_point", [](const bpl::BlockSpec& s) {
        auto w = bpl::saddle_point(s);
        py::dict d;
        d["vright"] = w.vright;
        d["vleft"] = w.vleft;
        d["tstar"] = w.tstar;
        d["ustar"] = w.ustar;
        d["residual"] = w.residual;
        return d;
    });

    m.def("spectrum", [](const Rows& B, const std::vector<double>& t, const std::vector<double>& u) {
        auto sp = bpl::spectrum(bpl::build_kernels(mat(B), t, u));
        return py::make_tuple(sp.lambdas, sp.rhos);
    });
    m.def("perron_log_gradient", [](const Rows& B, const std::vector<double>& t, const std::vector<double>& u) {
        return bpl::perron_log_gradient(mat(B), t, u);
    });
    m.def("predict_ratio_theorem1",
          [](int n, const std::vector<double>& rhos) { return bpl::predict_ratio_theorem1(n, rhos).value; });
    m.def("predict_ratio_smallrho",
          [](int n, const std::vector<double>& rhos) { return bpl::predict_ratio_smallrho(n, rhos).value; });

    m.def("gibbs_coefficient", [](const bpl::BlockSpec& s) { return bpl::gibbs_coefficient(s).log(); });
    m.def("bethe_coefficient", [](const bpl::BlockSpec& s) { return bpl::bethe_coefficient(s).log(); });
    m.def("log_multiplicity_factor", &bpl::log_multiplicity_factor);

    m.def("predict_Z", [](const bpl::BlockSpec& s) { return prediction_dict(bpl::predict_Z(s)); });
    m.def("predict_Z_sinkhorn_form",
          [](const bpl::BlockSpec& s) { return prediction_dict(bpl::predict_Z_sinkhorn_form(s)); });

    m.def("run_fig1_ensemble",
          [](int n, int mm, int trials, std::uint64_t seed, unsigned threads) {
              bpl::EnsembleConfig cfg;
              cfg.n = n;
              cfg.m = mm;
              cfg.trials = trials;
              cfg.seed = seed;
              return records_list(bpl::run_fig1_ensemble(cfg, threads));
          },
          py::arg("n"), py::arg("m"), py::arg("trials"), py::arg("seed"), py::arg("threads") = 1);
    m.def("run_pml_sweep",
          [](const std::vector<double>& q, const std::vector<double>& mu, const std::vector<int>& ns) {
              return records_list(bpl::run_pml_sweep(q, mu, ns));
          });

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
