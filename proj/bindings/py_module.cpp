#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "simonlab/attacks.hpp"
#include "simonlab/runner.hpp"
#include "simonlab/selftest.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace simonlab;

namespace {

// Bit strings ("0110...", index 0 first) are the boundary type for values
// wider than a machine word.
BitVector to_bits(const std::string& s) { return BitVector::from_bit_string(s); }

py::dict report_to_dict(const SimonRunReport& report) {
    py::dict out;
    py::list basis;
    for (const auto b : report.recovered.basis) basis.append(b);
    out["basis"] = basis;
    out["n"] = report.recovered.n;
    out["verified"] = report.verified;
    out["span_rank"] = report.span_rank;
    out["candidate_dimension"] = report.candidate_dimension;
    out["superposition_queries"] = report.superposition_queries;
    return out;
}

py::dict forgery_to_dict(const ForgeryResult& result) {
    py::dict out;
    out["accepted"] = result.accepted;
    out["fresh"] = result.fresh;
    out["n_bits"] = result.n_bits;
    out["learned_periods"] = result.learned_periods;
    out["superposition_queries"] = result.superposition_queries;
    out["classical_evaluations"] = result.classical_evaluations;
    out["tag_queries"] = result.tag_queries;
    out["verify_queries"] = result.verify_queries;
    out["forged_input"] = result.forged_input;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Truth-table Simon attacks on toy Farfalle modes and Feistel networks";

    py::class_<VectorialFunction>(m, "VectorialFunction")
        .def(py::init([](unsigned n, unsigned tau, const std::vector<std::uint64_t>& table) {
                 return VectorialFunction(n, tau, table, VectorialFunction::kHardCap);
             }),
             py::arg("n"), py::arg("tau"), py::arg("table"))
        .def_static(
            "random",
            [](unsigned n, unsigned tau, std::uint64_t seed) {
                Rng rng(seed);
                return VectorialFunction::random(n, tau, rng);
            },
            py::arg("n"), py::arg("tau"), py::arg("seed"))
        .def_static(
            "random_permutation",
            [](unsigned n, std::uint64_t seed) {
                Rng rng(seed);
                return VectorialFunction::random_permutation(n, rng);
            },
            py::arg("n"), py::arg("seed"))
        .def_property_readonly("n", &VectorialFunction::input_bits)
        .def_property_readonly("tau", &VectorialFunction::output_bits)
        .def("__call__", [](const VectorialFunction& f, std::uint64_t x) { return f(x); })
        .def("__len__", &VectorialFunction::domain_size)
        .def("table", &VectorialFunction::table)
        .def("has_period", &VectorialFunction::has_period)
        .def("period_space_bruteforce",
             [](const VectorialFunction& f) {
                 std::vector<std::uint64_t> basis;
                 for (const auto& v : f.period_space_bruteforce()) basis.push_back(v.as_word());
                 return basis;
             })
        .def("anf_degree", [](const VectorialFunction& f) { return anf_degree(f); })
        .def("derivative",
             [](const VectorialFunction& f, std::uint64_t a) {
                 return f.derivative(BitVector::from_word(a, f.input_bits()));
             })
        .def("component",
             [](const VectorialFunction& f, std::uint64_t lambda) {
                 return f.component(BitVector::from_word(lambda, f.output_bits()));
             })
        .def("save", &VectorialFunction::save_file)
        .def_static("load", [](const std::string& path) {
            return VectorialFunction::load_file(path, VectorialFunction::kHardCap);
        });

    m.def(
        "preimage_spectrum",
        [](const VectorialFunction& f, std::uint64_t a) {
            const PreimageSpectrum spectrum = preimage_spectrum(f, a);
            return py::make_tuple(spectrum.denominator, spectrum.numerators);
        },
        py::arg("f"), py::arg("a"),
        "Exact measurement distribution as (denominator, numerators[y]).");

    m.def(
        "recover_period_space",
        [](const VectorialFunction& f, std::uint64_t seed, unsigned extra) {
            Rng rng(seed);
            StabilizationPolicy stop;
            stop.extra = extra;
            return report_to_dict(recover_period_space(f, stop, rng));
        },
        py::arg("f"), py::arg("seed"), py::arg("extra") = 8);

    m.def("concat_functions", &concat_functions, py::arg("g"), py::arg("h"));

    m.def(
        "even_mansour_oracle",
        [](unsigned n, std::uint64_t seed) {
            DemoOracle demo = make_even_mansour_oracle(n, seed);
            return py::make_tuple(std::move(demo.oracle), demo.planted_basis);
        },
        py::arg("n"), py::arg("seed"));
    m.def(
        "lrw_oracle",
        [](unsigned n, std::uint64_t seed, std::uint64_t t0, std::uint64_t t1) {
            DemoOracle demo = make_lrw_oracle(n, seed, t0, t1);
            return py::make_tuple(std::move(demo.oracle), demo.planted_basis);
        },
        py::arg("n"), py::arg("seed"), py::arg("tweak0"), py::arg("tweak1"));

    m.def("s_set_size", &s_set_size, py::arg("n"), py::arg("t"));
    m.def("binomial_parity", &binomial_parity, py::arg("m"), py::arg("k"));

    py::class_<FieldSpec>(m, "FieldSpec")
        .def(py::init<unsigned, std::uint64_t>(), py::arg("degree"), py::arg("modulus"))
        .def_static("standard", &FieldSpec::standard, py::arg("degree"))
        .def_property_readonly("degree", &FieldSpec::degree)
        .def_property_readonly("modulus", &FieldSpec::modulus)
        .def("mul", &FieldSpec::mul)
        .def("inv", &FieldSpec::inv)
        .def("pow", &FieldSpec::pow);

    m.def(
        "lagrange_interpolate",
        [](const FieldSpec& spec,
           const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points) {
            return lagrange_interpolate(spec, points).coeffs();
        },
        py::arg("spec"), py::arg("points"),
        "Coefficients (index = exponent) of the interpolating polynomial.");

    // Toy Farfalle: bit strings in, bit strings out.
    m.def(
        "farfalle",
        [](unsigned b, std::uint64_t seed, const std::string& roll, bool blank,
           const std::string& key, const std::vector<std::string>& strings,
           std::size_t out_bits, std::size_t offset) {
            const RollKind kind = roll == "perm" ? RollKind::Table : RollKind::Linear;
            const FarfalleParams params = FarfalleParams::seeded(b, seed, kind, blank);
            const FarfalleKeyState state = FarfalleKeyState::derive(params, to_bits(key));
            MessageSequence message;
            for (const auto& s : strings) message.push_back(to_bits(s));
            return farfalle(params, state, message, out_bits, offset).to_bit_string();
        },
        py::arg("b"), py::arg("seed"), py::arg("roll"), py::arg("blank"), py::arg("key"),
        py::arg("strings"), py::arg("out_bits"), py::arg("offset") = 0,
        "Evaluate the seeded toy PRF; all bit strings read index 0 first.");

    m.def(
        "forge_sae",
        [](unsigned b, unsigned tag_bits, std::uint64_t seed) {
            const FarfalleInstance inst = FarfalleInstance::seeded(b, seed);
            return forgery_to_dict(forge_sae(inst, tag_bits, derive_seed(seed, 1)));
        },
        py::arg("b"), py::arg("tag_bits"), py::arg("seed"));
    m.def(
        "forge_siv",
        [](int variant, unsigned b, unsigned tag_bits, std::uint64_t seed) {
            const FarfalleInstance inst = FarfalleInstance::seeded(b, seed);
            const ForgeryResult result =
                variant == 1 ? forge_siv_variant_i(inst, tag_bits, derive_seed(seed, 1))
                             : forge_siv_variant_ii(inst, tag_bits, derive_seed(seed, 1));
            return forgery_to_dict(result);
        },
        py::arg("variant"), py::arg("b"), py::arg("tag_bits"), py::arg("seed"));

    m.def(
        "run_experiment",
        [](const std::string& subcommand, const runner::ConfigMap& config) {
            const runner::RunResult result = runner::run_experiment(subcommand, config);
            return py::make_tuple(result.exit_code, result.report, result.summary);
        },
        py::arg("subcommand"), py::arg("config"),
        "Run a workbench subcommand; returns (exit_code, jsonl_report, summary).");
    m.def("subcommands", &runner::subcommands);

    m.def("selftest", [](std::uint64_t seed) {
        py::list out;
        for (const auto& check : selftest::run_all(seed)) {
            py::dict entry;
            entry["name"] = check.name;
            entry["passed"] = check.passed;
            entry["detail"] = check.detail;
            out.append(entry);
        }
        return out;
    });

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
