#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pcurv/config.hpp"
#include "pcurv/errors.hpp"

namespace py = pybind11;

namespace {

pcurv::RunConfig parse(const std::string& text) {
    pcurv::json j;
    try {
        j = pcurv::json::parse(text);
    } catch (const pcurv::json::exception& e) {
        throw pcurv::Error(pcurv::ErrorCode::ConfigError, std::string("malformed JSON: ") + e.what());
    }
    return pcurv::parse_config(j);
}

}  // namespace

PYBIND11_MODULE(_pcurv, m) {
    m.doc() = "Bubbles, reduced energy expansions and existence certificates";

    static py::handle exc_type = py::exception<pcurv::Error>(m, "PcurvError").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const pcurv::Error& e) {
            py::object err = py::reinterpret_borrow<py::object>(exc_type)(e.what());
            err.attr("code") = pcurv::error_name(e.code());
            err.attr("exit_code") = pcurv::exit_code_for(e.code());
            PyErr_SetObject(exc_type.ptr(), err.ptr());
        }
    });

    m.def("run_constants", [](const std::string& cfg) { return pcurv::run_constants(parse(cfg)).dump(); });
    m.def("run_gamma_scan", [](const std::string& cfg) { return pcurv::run_gamma_scan(parse(cfg)); });
    m.def("run_expansion_check", [](const std::string& cfg) { return pcurv::run_expansion_check(parse(cfg)).dump(); });
    m.def("run_certificate", [](const std::string& cfg) { return pcurv::run_certificate(parse(cfg)).dump(); });

    m.def("inversion", &pcurv::inversion, py::arg("p"), py::arg("n"));
    m.def("inversion_inverse", &pcurv::inversion_inverse, py::arg("q"), py::arg("n"));
    m.def("conformal_factor", &pcurv::conformal_factor, py::arg("p"));
    m.def("alpha_D", &pcurv::alpha_D, py::arg("D"));
    m.def("a200_closed_form", &pcurv::a200_closed_form, py::arg("D"));
    m.def("b20_closed_form", &pcurv::b20_closed_form, py::arg("D"));
    m.def("eval_U_halfspace",
          [](const pcurv::Vec& p, int n, double D, const pcurv::Vec& x0, double lambda) {
              return pcurv::eval_U_halfspace(p, pcurv::make_bubble(n, D, x0, lambda));
          },
          py::arg("p"), py::arg("n"), py::arg("D"), py::arg("x0"), py::arg("lam"));
}
