#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qldpc/circuit.h"
#include "qldpc/classical_ldpc.h"
#include "qldpc/codes.h"
#include "qldpc/decoders.h"
#include "qldpc/dem.h"
#include "qldpc/distance.h"
#include "qldpc/experiment.h"
#include "qldpc/pauli_sim.h"
#include "qldpc/scheduler.h"

namespace py = pybind11;
using namespace qldpc;

namespace {

using Array = py::array_t<uint8_t, py::array::c_style | py::array::forcecast>;

Array to_numpy(const BitMatrix &m) {
    Array out({m.rows(), m.cols()});
    auto a = out.mutable_unchecked<2>();
    for (size_t r = 0; r < m.rows(); r++) {
        for (size_t c = 0; c < m.cols(); c++) {
            a(r, c) = 0;
        }
        for (uint32_t c : m.row(r)) {
            a(r, c) = 1;
        }
    }
    return out;
}

BitMatrix from_numpy(const Array &in) {
    if (in.ndim() != 2) {
        throw std::invalid_argument("expected a 2-d array");
    }
    auto a = in.unchecked<2>();
    std::vector<std::vector<uint32_t>> rows(a.shape(0));
    for (py::ssize_t r = 0; r < a.shape(0); r++) {
        for (py::ssize_t c = 0; c < a.shape(1); c++) {
            if (a(r, c) & 1) {
                rows[r].push_back(static_cast<uint32_t>(c));
            }
        }
    }
    return BitMatrix::from_rows(a.shape(1), rows);
}

BitVec vec_from_numpy(const Array &in) {
    auto a = in.unchecked<1>();
    BitVec v(a.shape(0));
    for (py::ssize_t i = 0; i < a.shape(0); i++) {
        v.set(i, a(i) & 1);
    }
    return v;
}

Array vec_to_numpy(const BitVec &v) {
    Array out(v.size());
    auto a = out.mutable_unchecked<1>();
    for (size_t i = 0; i < v.size(); i++) {
        a(i) = v.get(i);
    }
    return out;
}

template <class T>
std::string text_of(const T &obj) {
    std::ostringstream ss;
    obj.write_text(ss);
    return ss.str();
}

ColoringMethod coloring_of(const std::string &name) {
    if (name == "konig") {
        return ColoringMethod::Konig;
    }
    if (name == "greedy") {
        return ColoringMethod::Greedy;
    }
    throw std::invalid_argument("coloring must be konig or greedy");
}

py::dict row_dict(const RunRow &r) {
    py::dict d;
    d["p"] = r.p;
    d["shots"] = r.shots;
    d["failures"] = r.failures;
    d["p_l"] = r.p_l;
    d["lfr"] = r.lfr;
    d["ci"] = py::make_tuple(r.ci_lo, r.ci_hi);
    d["tau_avg_s"] = r.tau_avg;
    d["windows"] = r.windows;
    d["depth"] = r.depth;
    d["decoder_calls"] = r.decoder_calls;
    d["mechanisms"] = r.mechanisms;
    d["W"] = r.W;
    d["F"] = r.F;
    d["max_iter"] = r.max_iter;
    d["osd_order"] = r.osd_order;
    d["dem"] = dem_mode_name(r.dem_mode);
    return d;
}

ExperimentConfig config_from(const py::dict &overrides) {
    ExperimentConfig cfg;
    for (auto [k, v] : overrides) {
        cfg.set(py::str(k), py::str(v));
    }
    return cfg;
}

}  // namespace

PYBIND11_MODULE(qldpc, m) {
    m.doc() = "Quantum LDPC memory experiments: codes, schedules, circuits, DEMs and decoders.";

    // std::invalid_argument derives from std::logic_error but stays a ValueError.
    static py::exception<std::logic_error> invariant(m, "InvariantViolation", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const std::invalid_argument &e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const std::logic_error &e) {
            py::set_error(invariant, e.what());
        }
    });

    py::class_<CssCode>(m, "CssCode")
        .def_readonly("family", &CssCode::family)
        .def_readonly("n", &CssCode::n)
        .def_readonly("k", &CssCode::k)
        .def_property_readonly("hx", [](const CssCode &c) { return to_numpy(c.hx); })
        .def_property_readonly("hz", [](const CssCode &c) { return to_numpy(c.hz); })
        .def_property_readonly("lx", [](const CssCode &c) { return to_numpy(c.lx); })
        .def_property_readonly("lz", [](const CssCode &c) { return to_numpy(c.lz); })
        .def("validate", [](const CssCode &c) { return validate_css(c).failures; })
        .def("save", [](const CssCode &c, const std::string &dir) { save_bundle(c, dir); })
        .def("__repr__", [](const CssCode &c) {
            return "<CssCode " + c.family + " [[" + std::to_string(c.n) + "," + std::to_string(c.k) + "]]>";
        });

    m.def("load_bundle", [](const std::string &dir) { return load_bundle(dir); });
    m.def("css_code", [](const Array &hx, const Array &hz) { return css_from_matrices(from_numpy(hx), from_numpy(hz)); },
          py::arg("hx"), py::arg("hz"));
    m.def("hgp", [](const Array &h1, const Array &h2) { return hgp(from_numpy(h1), from_numpy(h2)); }, py::arg("h1"),
          py::arg("h2"));
    m.def("bpc_code", [](size_t q) {
        auto [p1, p2] = bpc_polynomials(q);
        return bpc(p1, p2, q);
    }, py::arg("q"));
    m.def("qlp_code", [](size_t l) {
        MonomialMatrix b = qlp_base_matrix(l);
        return qlp(b, b);
    }, py::arg("lift_size"));
    m.def("generate_regular", [](size_t n, size_t wc, size_t wr, size_t girth, uint64_t seed, size_t pool) {
        GenerationOptions opt;
        opt.pool_size = pool;
        return to_numpy(generate_regular(n, wc, wr, girth, seed, opt).h);
    }, py::arg("n"), py::arg("col_weight") = 3, py::arg("row_weight") = 4, py::arg("min_girth") = 6,
          py::arg("seed") = 0, py::arg("pool_size") = 100);

    py::class_<Schedule>(m, "Schedule")
        .def_property_readonly("depth", &Schedule::depth)
        .def("text", [](const Schedule &s) { return text_of(s); })
        .def_static("from_text", [](const std::string &t) {
            std::istringstream ss(t);
            return Schedule::read_text(ss);
        });

    py::class_<DepthSearch>(m, "DepthSearch")
        .def_readonly("schedule", &DepthSearch::schedule)
        .def_readonly("histogram", &DepthSearch::histogram)
        .def_readonly("best_attempt", &DepthSearch::best_attempt)
        .def("verify", [](const DepthSearch &d, const CssCode &code) {
            return verify_schedule(code, d.tanner, d.schedule).ok();
        });

    m.def("minimize_depth", [](const CssCode &code, size_t attempts, uint64_t seed, const std::string &coloring) {
        return minimize_depth(code, attempts, seed, SignMode::Shared, coloring_of(coloring));
    }, py::arg("code"), py::arg("attempts") = 1000, py::arg("seed") = 1, py::arg("coloring") = "konig");
    m.def("check_deterministic", [](const CssCode &c, const Schedule &s) { return check_deterministic(c, s); });

    py::class_<Circuit>(m, "Circuit")
        .def_property_readonly("num_detectors", &Circuit::num_detectors)
        .def_property_readonly("num_observables", &Circuit::num_observables)
        .def_property_readonly("num_noise_locations", &Circuit::num_noise_locations)
        .def("text", [](const Circuit &c) { return text_of(c); })
        .def("sample", [](const Circuit &c, size_t shots, uint64_t seed) {
            ShotBatch b = sample(c, shots, seed);
            return py::make_tuple(to_numpy(b.detectors), to_numpy(b.observables));
        }, py::arg("shots"), py::arg("seed") = 0);

    m.def("memory_circuit", [](const CssCode &code, const Schedule &s, size_t rounds, double p, bool syndrome_idle,
                               bool data_idle_reset_measure) {
        NoiseSpec noise;
        noise.p = p;
        noise.syndrome_idle = syndrome_idle;
        noise.data_idle_reset_measure = data_idle_reset_measure;
        Circuit base = build_memory_experiment(code, s, rounds, Basis::Z);
        return p > 0 ? attach_noise(base, noise) : base;
    }, py::arg("code"), py::arg("schedule"), py::arg("rounds"), py::arg("p"), py::arg("syndrome_idle") = true,
          py::arg("data_idle_reset_measure") = true);

    py::class_<DetectorErrorModel>(m, "DetectorErrorModel")
        .def_property_readonly("h", [](const DetectorErrorModel &d) { return to_numpy(d.h); })
        .def_property_readonly("obs", [](const DetectorErrorModel &d) { return to_numpy(d.obs); })
        .def_readonly("priors", &DetectorErrorModel::priors)
        .def_readonly("num_rounds", &DetectorErrorModel::num_rounds)
        .def_readonly("detectors_per_round", &DetectorErrorModel::detectors_per_round)
        .def_readonly("first_detector", &DetectorErrorModel::first_detector)
        .def_property_readonly("num_mechanisms", &DetectorErrorModel::num_mechanisms)
        .def("text", [](const DetectorErrorModel &d) { return text_of(d); });

    m.def("build_dem", [](const Circuit &c) {
        DemPair d = build_dem(c);
        return py::make_tuple(d.z, d.x);
    }, py::arg("circuit"));
    m.def("phenomenological_dem", [](const CssCode &code, size_t rounds, double p) {
        return phenomenological_dem(code, rounds, p);
    }, py::arg("code"), py::arg("rounds"), py::arg("p"));
    m.def("window_count", &window_count, py::arg("num_rounds"), py::arg("W"), py::arg("F"));

    m.def("sliding_window_decode", [](const DetectorErrorModel &dem, const Array &detectors, size_t W, size_t F,
                                      const std::string &decoder, size_t max_iter, size_t osd_order) {
        DecoderConfig dc;
        dc.bp.max_iter = max_iter;
        dc.osd.order = osd_order;
        auto inner = make_decoder(decoder, dc);
        SlidingWindowDecoder sw(dem, W, F, *inner);
        auto a = detectors.unchecked<2>();
        Array out({static_cast<size_t>(a.shape(0)), dem.obs.rows()});
        auto o = out.mutable_unchecked<2>();
        for (py::ssize_t s = 0; s < a.shape(0); s++) {
            BitVec det(dem.num_detectors());
            for (size_t r = 0; r < dem.num_detectors(); r++) {
                det.set(r, a(s, dem.first_detector + r) & 1);
            }
            BitVec flips = sw.decode(det);
            for (size_t k = 0; k < dem.obs.rows(); k++) {
                o(s, k) = flips.get(k);
            }
        }
        return out;
    }, py::arg("dem"), py::arg("detectors"), py::arg("W") = 5, py::arg("F") = 3, py::arg("decoder") = "bp-osd",
          py::arg("max_iter") = 10, py::arg("osd_order") = 1,
          "Decodes circuit detector samples (one row per shot); returns predicted observable flips.");
    m.def("bp_osd_decode", [](const Array &h, const std::vector<double> &priors, const Array &syndrome, size_t max_iter,
                              size_t osd_order) {
        DecoderConfig dc;
        dc.bp.max_iter = max_iter;
        dc.osd.order = osd_order;
        return vec_to_numpy(make_decoder("bp-osd", dc)->prepare(from_numpy(h), priors)->decode(vec_from_numpy(syndrome)).error);
    }, py::arg("h"), py::arg("priors"), py::arg("syndrome"), py::arg("max_iter") = 10, py::arg("osd_order") = 1);

    m.def("min_weight_logical", [](const Array &h, const Array &logicals, size_t trials, uint64_t seed) {
        DistanceReport r = min_weight_logical(from_numpy(h), from_numpy(logicals), trials, seed);
        return py::make_tuple(r.found ? py::cast(r.weight) : py::none(), r.witness);
    }, py::arg("h"), py::arg("logicals"), py::arg("trials") = 1000, py::arg("seed") = 0);
    m.def("circuit_distance", [](const DetectorErrorModel &dem, const Circuit &c, size_t trials, uint64_t seed) {
        CircuitDistanceOptions opt;
        opt.trials = trials;
        opt.seed = seed;
        DistanceReport r = circuit_distance_upper_bound(dem, c, opt);
        return py::make_tuple(r.found ? py::cast(r.weight) : py::none(), r.witness, r.annotations);
    }, py::arg("dem"), py::arg("circuit"), py::arg("trials") = 2000, py::arg("seed") = 0);

    m.def("lfr", &lfr, py::arg("p_l"), py::arg("rounds"));
    m.def("lfr_inverse", &lfr_inverse, py::arg("lfr"), py::arg("rounds"));
    m.def("wilson_interval", &wilson_interval, py::arg("failures"), py::arg("shots"), py::arg("z") = 1.959963984540054);

    m.def("config_entries", [](const py::dict &overrides) { return config_from(overrides).entries(); },
          py::arg("overrides") = py::dict());
    m.def("run_memory", [](const py::dict &overrides) {
        RunResult r = run_memory(config_from(overrides));
        py::list rows;
        for (const RunRow &row : r.rows) {
            rows.append(row_dict(row));
        }
        return rows;
    }, py::arg("overrides") = py::dict(),
          "Runs a memory experiment; keys are 'section.key' names as in the INI config.");
}
