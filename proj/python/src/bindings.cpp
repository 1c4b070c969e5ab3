#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "summands/runner.hpp"

namespace py = pybind11;
using namespace summands;

namespace {

py::dict run(const std::string& text, std::optional<uint64_t> seed, std::optional<bool> autoextend, bool emit_basis,
             bool implicit_mult) {
  ParseOptions po;
  po.implicit_mult = implicit_mult;
  TaskFile file = parse_taskfile(text, po);
  RunOptions opt;
  opt.seed = seed;
  opt.autoextend = autoextend;
  opt.emit_basis = emit_basis;
  opt.timing = false;
  std::ostringstream out, err;
  RunReport rep;
  {
    py::gil_scoped_release release;
    rep = run_tasks(file, opt, out, err);
  }
  py::dict d;
  d["exit_code"] = rep.exit_code;
  d["output"] = out.str();
  d["errors"] = err.str();
  d["records"] = rep.records.dump();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Direct-sum decompositions of graded and local modules";

  static py::exception<Error> error(m, "Error");
  static py::exception<TaskFileError> parse_error(m, "TaskFileError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const TaskFileError& e) {
      py::object exc = py::handle(parse_error.ptr())(e.render("input"));
      exc.attr("line") = e.line();
      exc.attr("column") = e.column();
      exc.attr("exit_code") = exit_code_for(e.code());
      PyErr_SetObject(parse_error.ptr(), exc.ptr());
    } catch (const Error& e) {
      py::object exc = py::handle(error.ptr())(std::string(e.what()));
      exc.attr("exit_code") = exit_code_for(e.code());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("_run", &run, py::arg("text"), py::arg("seed") = py::none(), py::arg("autoextend") = py::none(),
        py::arg("emit_basis") = false, py::arg("implicit_mult") = false);
  m.def("field_name", [](const std::string& desc) { return parse_field(desc)->name(); }, py::arg("desc"));
}
