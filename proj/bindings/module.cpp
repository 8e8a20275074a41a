#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gibbsprep/models.hpp"
#include "gibbsprep/tree.hpp"
#include "gibbsprep/verify.hpp"

namespace py = pybind11;
using namespace gibbsprep;

namespace {

Axis axis_from_string(const std::string& s) {
    if (s == "I") return Axis::I;
    if (s == "X") return Axis::X;
    if (s == "Y") return Axis::Y;
    if (s == "Z") return Axis::Z;
    throw std::invalid_argument("axis must be one of I, X, Y, Z");
}

Hamiltonian build_hamiltonian(
    int n, int locality,
    const std::vector<std::pair<double, std::vector<std::pair<int, std::string>>>>& terms) {
    std::vector<Term> built;
    for (const auto& [coeff, axes] : terms) {
        std::vector<std::pair<int, Axis>> parsed;
        for (const auto& [site, axis] : axes) parsed.push_back({site, axis_from_string(axis)});
        Term t;
        t.coeff = coeff;
        t.pauli = SignedPauli(PauliString::from_axes(n, parsed));
        built.push_back(std::move(t));
    }
    return Hamiltonian(n, locality, std::move(built));
}

std::vector<std::pair<std::string, int>> state_to_py(const ProductState& st) {
    std::vector<std::pair<std::string, int>> out;
    for (const SiteState& s : st.sites)
        out.push_back({std::string(1, axis_char(s.axis)), s.sign});
    return out;
}

Bits site_set(int n, const std::vector<int>& sites) { return Bits::from_indices(n, sites); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "sampling high-temperature Gibbs states as mixtures of stabilizer product states";

    py::class_<PauliString>(m, "PauliString")
        .def_static("identity", &PauliString::identity, py::arg("n"))
        .def_static(
            "parse", [](int n, const std::string& text) { return PauliString::parse(n, text); },
            py::arg("n"), py::arg("text"))
        .def_property_readonly("n", &PauliString::sites)
        .def_property_readonly("phase_exp", &PauliString::phase_exp)
        .def("support", [](const PauliString& p) { return p.support().to_indices(); })
        .def("is_hermitian", &PauliString::is_hermitian)
        .def("normalized_trace", &PauliString::normalized_trace)
        .def("dense", &pauli_to_dense)
        .def("__mul__", &pauli_mul)
        .def("__eq__", [](const PauliString& a, const PauliString& b) { return a == b; })
        .def("__str__", &PauliString::to_string)
        .def("__repr__", [](const PauliString& p) { return "PauliString('" + p.to_string() + "')"; });

    m.def(
        "hermitian_part",
        [](double alpha, const PauliString& p) -> py::object {
            auto r = hermitian_part(alpha, p);
            if (!r) return py::none();
            return py::make_tuple(r->coeff, r->pauli);
        },
        py::arg("alpha"), py::arg("pauli"),
        "(alpha P + (alpha P)^dagger)/2: None when zero, else (coeff, bare string)");

    py::enum_<BetaMode>(m, "BetaMode")
        .value("separability", BetaMode::Separability)
        .value("sampling", BetaMode::Sampling)
        .value("cluster", BetaMode::Cluster);

    py::class_<Hamiltonian>(m, "Hamiltonian")
        .def(py::init(&build_hamiltonian), py::arg("n"), py::arg("locality"), py::arg("terms"),
             "terms: list of (coeff, [(site, axis), ...])")
        .def_static("load", &Hamiltonian::load, py::arg("path"))
        .def_static("parse", &Hamiltonian::from_file_string, py::arg("text"))
        .def("save", &Hamiltonian::save, py::arg("path"))
        .def("file_string", &Hamiltonian::to_file_string)
        .def_property_readonly("n", &Hamiltonian::sites)
        .def_property_readonly("locality", &Hamiltonian::locality)
        .def_property_readonly("degree", &Hamiltonian::degree)
        .def_property_readonly("term_count", &Hamiltonian::term_count)
        .def("term",
             [](const Hamiltonian& h, int a) {
                 return py::make_tuple(h.term(a).coeff, h.term(a).pauli.string());
             })
        .def("neighbors", &Hamiltonian::neighbors, py::arg("a"))
        .def(
            "restricted_terms",
            [](const Hamiltonian& h, const std::vector<int>& sites) {
                return h.restricted_terms(site_set(h.sites(), sites));
            },
            py::arg("sites"))
        .def(
            "localized_terms",
            [](const Hamiltonian& h, const std::vector<int>& sites) {
                return h.localized_terms(site_set(h.sites(), sites));
            },
            py::arg("sites"))
        .def("critical_beta", &Hamiltonian::critical_beta, py::arg("mode"))
        .def("dense", &hamiltonian_to_dense);

    m.def("chain_tfim", &chain_tfim, py::arg("n"), py::arg("jz") = 1.0, py::arg("jx") = 1.0);
    m.def("grid_zz", &grid_zz, py::arg("rows"), py::arg("cols"), py::arg("j") = 1.0);
    m.def("heisenberg_chain", &heisenberg_chain, py::arg("n"), py::arg("j") = 1.0);
    m.def("random_klocal", &random_klocal, py::arg("n"), py::arg("m"), py::arg("locality"),
          py::arg("coeff_min"), py::arg("coeff_max"), py::arg("seed"));

    m.def(
        "sample_f_k",
        [](const Hamiltonian& h, const TermSet& q, int k, uint64_t seed) {
            Rng rng(seed);
            MonomialSample s = sample_f_k(h, q, k, rng);
            return py::make_tuple(s.coeff, s.terms);
        },
        py::arg("h"), py::arg("q"), py::arg("k"), py::arg("seed"));
    m.def(
        "sample_propagator",
        [](const Hamiltonian& h, const TermSet& q, double beta, std::optional<int> t_max,
           uint64_t seed) {
            Rng rng(seed);
            MonomialSample s = sample_propagator(h, q, beta, t_max, rng);
            return py::make_tuple(s.coeff, s.terms);
        },
        py::arg("h"), py::arg("q"), py::arg("beta"), py::arg("t_max"), py::arg("seed"));
    m.def("truncated_series_dense",
          py::overload_cast<const Hamiltonian&, const TermSet&, double, int>(
              &truncated_series_dense),
          py::arg("h"), py::arg("q"), py::arg("beta"), py::arg("t_max"));

    py::class_<Configuration>(m, "Configuration")
        .def("__len__", [](const Configuration& c) { return c.blocks.size(); })
        .def("to_json", [](const Configuration& c) { return config_to_json(c).dump(); })
        .def("dense", &evaluate_config_dense, py::arg("n"))
        .def("trace", &config_trace, py::arg("n"))
        .def("blocks", [](const Configuration& c) {
            std::vector<py::dict> out;
            for (const ConfigBlock& b : c.blocks) {
                py::dict d;
                d["c"] = b.c;
                d["degree"] = b.x.degree;
                d["terms"] = b.x.term_multiset;
                if (b.x.is_zero()) {
                    d["value"] = py::none();
                } else {
                    d["value"] = py::make_tuple(b.x.value->coeff, b.x.value->pauli.to_string());
                }
                out.push_back(d);
            }
            return out;
        });

    m.def(
        "run_separability",
        [](const Hamiltonian& h, double beta, uint64_t seed, bool unsafe) {
            Rng rng(seed);
            return run_separability(h, beta, rng, unsafe);
        },
        py::arg("h"), py::arg("beta"), py::arg("seed"), py::arg("unsafe") = false,
        "one configuration draw with E[sigma(config)] = e^{-beta H}");

    m.def(
        "sample_state",
        [](const Configuration& config, int n, uint64_t seed) {
            Rng rng(seed);
            return state_to_py(sample_state(config, n, rng));
        },
        py::arg("config"), py::arg("n"), py::arg("seed"));
    m.def(
        "product_state_density",
        [](const std::vector<std::pair<std::string, int>>& sites) {
            ProductState st;
            for (const auto& [axis, sign] : sites) {
                SiteState s;
                s.axis = axis_from_string(axis);
                s.sign = sign;
                st.sites.push_back(s);
            }
            return product_state_density(st);
        },
        py::arg("sites"));

    m.def(
        "log_partition_estimate",
        [](const Hamiltonian& h, double beta, double eta) {
            LogZResult res = log_partition_estimate(h, beta, eta);
            py::dict d;
            d["z_hat"] = res.z_hat;
            d["k_used"] = res.series.k_used;
            d["cluster_count"] = res.series.cluster_count;
            d["k_capped"] = res.series.k_capped;
            d["truncation_bound"] = res.series.truncation_bound;
            return d;
        },
        py::arg("h"), py::arg("beta"), py::arg("eta"));

    py::class_<GibbsSampler>(m, "GibbsSampler")
        .def(py::init<const Hamiltonian&, double, double, double, bool>(), py::arg("h"),
             py::arg("beta"), py::arg("epsilon"), py::arg("delta"),
             py::arg("unsafe_override") = false, py::keep_alive<1, 2>())
        .def_property(
            "steps_per_epoch", [](GibbsSampler& s) { return s.params().steps_per_epoch; },
            [](GibbsSampler& s, long v) { s.params().steps_per_epoch = v; })
        .def_property(
            "max_epochs", [](GibbsSampler& s) { return s.params().max_epochs; },
            [](GibbsSampler& s, long v) { s.params().max_epochs = v; })
        .def(
            "sample",
            [](GibbsSampler& s, uint64_t seed) -> py::object {
                Rng rng(seed);
                auto st = s.sample(rng);
                if (!st) return py::none();
                return py::cast(state_to_py(*st));
            },
            py::arg("seed"), "one product state, or None when the walk exhausts its budget");

    m.def(
        "sample_gibbs_state",
        [](const Hamiltonian& h, double beta, double epsilon, double delta,
           uint64_t seed) -> py::object {
            Rng rng(seed);
            auto st = sample_gibbs_state(h, beta, epsilon, delta, rng);
            if (!st) return py::none();
            return py::cast(state_to_py(*st));
        },
        py::arg("h"), py::arg("beta"), py::arg("epsilon"), py::arg("delta"), py::arg("seed"));

    m.def("gibbs_density", &gibbs_density, py::arg("h"), py::arg("beta"));
    m.def("trace_distance", &trace_distance, py::arg("a"), py::arg("b"));

    m.def(
        "run_criterion",
        [](int id) {
            CriterionReport rep = run_criterion(id);
            py::dict d;
            d["criterion"] = rep.id;
            d["name"] = rep.name;
            d["pass"] = rep.pass;
            d["cases"] = rep.cases;
            d["failures"] = rep.failures;
            d["elapsed_seconds"] = rep.elapsed_seconds;
            py::dict margins;
            for (const auto& [key, value] : rep.margins) margins[py::str(key)] = value;
            d["margins"] = margins;
            return d;
        },
        py::arg("id"), "run one acceptance criterion (1..11) and return its report");
}
