#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "racefix/clauses.hpp"
#include "racefix/driver.hpp"
#include "racefix/emit.hpp"
#include "racefix/frontend.hpp"
#include "racefix/instrument.hpp"
#include "racefix/oracle.hpp"
#include "racefix/repair.hpp"
#include "racefix/verifier.hpp"

namespace py = pybind11;
using namespace racefix;

namespace {

Assignment to_assignment(const InstrumentedProgram& ip, const std::vector<VarId>& enabled) {
  return Assignment::with_enabled(ip.var_count(), enabled);
}

ClauseSet to_clause_set(std::size_t var_count, const std::vector<std::vector<VarId>>& clauses) {
  ClauseSet phi(var_count);
  for (const auto& c : clauses) phi.add(Clause(c));
  return phi;
}

py::object optional_enabled(const std::optional<Assignment>& a) {
  if (!a) return py::none();
  return py::cast(a->enabled());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Data-race repair for MiniMP programs: barrier and ordered-region placement.";

  py::register_exception<SyntaxError>(m, "SyntaxError", PyExc_ValueError);
  py::register_exception<UnsupportedConstruct>(m, "UnsupportedConstruct", PyExc_ValueError);
  py::register_exception<DuplicateClause>(m, "DuplicateClause", PyExc_ValueError);

  py::class_<SourceLoc>(m, "SourceLoc")
      .def_readonly("line", &SourceLoc::line)
      .def_readonly("col", &SourceLoc::col)
      .def("__repr__", [](const SourceLoc& l) { return "SourceLoc(" + to_string(l) + ")"; });

  py::class_<Program>(m, "Program")
      .def_readonly("name", &Program::name)
      .def_property_readonly("region_count", [](const Program& p) { return p.regions.size(); })
      .def_property_readonly("statement_count",
                             [](const Program& p) {
                               std::size_t n = 0;
                               for (const auto& r : p.regions) n += r.body.size();
                               return n;
                             })
      .def("format", &format_program);

  py::class_<BarrierVariable>(m, "BarrierVariable")
      .def_readonly("id", &BarrierVariable::id)
      .def_readonly("loc", &BarrierVariable::loc)
      .def_readonly("from_existing", &BarrierVariable::fromExisting)
      .def_property_readonly("kind", [](const BarrierVariable& v) { return std::string(to_string(v.kind)); })
      .def_property_readonly("label", &BarrierVariable::label);

  py::class_<InstrumentedProgram>(m, "InstrumentedProgram")
      .def_readonly("vars", &InstrumentedProgram::vars)
      .def_readonly("original", &InstrumentedProgram::original)
      .def_property_readonly("var_count", &InstrumentedProgram::var_count);

  py::class_<RaceTrace>(m, "RaceTrace")
      .def_property_readonly("first_line", [](const RaceTrace& t) { return t.first.loc.line; })
      .def_property_readonly("second_line", [](const RaceTrace& t) { return t.second.loc.line; })
      .def_property_readonly("first_kind", [](const RaceTrace& t) { return std::string(to_string(t.first.kind)); })
      .def_property_readonly("second_kind", [](const RaceTrace& t) { return std::string(to_string(t.second.kind)); })
      .def_readonly("array", &RaceTrace::array)
      .def("__repr__", [](const RaceTrace& t) { return to_string(t); });

  py::class_<RepairOutcome>(m, "RepairOutcome")
      .def_property_readonly("status", [](const RepairOutcome& o) { return std::string(to_string(o.tag)); })
      .def_property_readonly("enabled", [](const RepairOutcome& o) { return o.sol.enabled(); })
      .def_readonly("iterations", &RepairOutcome::iterations)
      .def_readonly("traces", &RepairOutcome::traces)
      .def_readonly("message", &RepairOutcome::message)
      .def_readonly("optimal", &RepairOutcome::optimal)
      .def_property_readonly("clauses",
                             [](const RepairOutcome& o) {
                               std::vector<std::vector<VarId>> out;
                               for (const auto& c : o.phi.clauses()) out.push_back(c.literals());
                               return out;
                             })
      .def("summary", [](const RepairOutcome& o) { return emit_summary(o).dump(); })
      .def("repaired_source", [](const RepairOutcome& o) {
        if (!o.repaired()) throw std::logic_error("outcome is not repaired");
        return emit_program(generate_repair_candidate(o.program, o.sol));
      });

  m.def("parse", &parse, py::arg("source"), py::arg("name") = "main");
  m.def("instrument", &instrument, py::arg("program"));
  m.def(
      "verify",
      [](const InstrumentedProgram& ip, const std::vector<VarId>& enabled) -> py::object {
        auto r = verify(ip, to_assignment(ip, enabled));
        if (r.is_safe()) return py::none();
        if (r.trace) return py::cast(*r.trace);
        throw std::runtime_error(r.message);
      },
      py::arg("program"), py::arg("enabled") = std::vector<VarId>{},
      "None when SAFE, otherwise the reported RaceTrace.");
  m.def(
      "oracle_is_safe",
      [](const InstrumentedProgram& ip, const std::vector<VarId>& enabled, std::int64_t max_threads) {
        OracleOptions opts;
        opts.maxThreads = max_threads;
        return oracle_race_check(ip, to_assignment(ip, enabled), opts).safe();
      },
      py::arg("program"), py::arg("enabled") = std::vector<VarId>{}, py::arg("max_threads") = 4);
  m.def(
      "repair",
      [](const InstrumentedProgram& ip, const std::string& strategy, std::size_t max_iterations,
         double timeout_secs) {
        RepairOptions opts;
        auto s = parse_strategy(strategy);
        if (!s) throw py::value_error("strategy must be 'mhs' or 'maxsat'");
        opts.strategy = *s;
        opts.budget.maxIterations = max_iterations;
        opts.budget.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_secs * 1000));
        py::gil_scoped_release release;
        return repair(ip, opts);
      },
      py::arg("program"), py::arg("strategy") = "mhs", py::arg("max_iterations") = 1000,
      py::arg("timeout_secs") = 300.0);
  m.def(
      "solve_mhs",
      [](std::size_t var_count, const std::vector<std::vector<VarId>>& clauses) {
        return optional_enabled(solve_mhs(to_clause_set(var_count, clauses)));
      },
      py::arg("var_count"), py::arg("clauses"));
  m.def(
      "solve_maxsat",
      [](std::size_t var_count, const std::vector<std::vector<VarId>>& clauses) {
        return optional_enabled(solve_maxsat(to_clause_set(var_count, clauses)));
      },
      py::arg("var_count"), py::arg("clauses"));
  m.def(
      "process_source",
      [](const std::string& text, const std::string& name, const std::string& solver) {
        RunConfig cfg;
        cfg.inputs = {name};
        auto s = parse_strategy(solver);
        if (!s) throw py::value_error("solver must be 'mhs' or 'maxsat'");
        cfg.solver = *s;
        auto res = process_source(text, name, cfg);
        return py::make_tuple(std::string(to_string(res.verdict)), res.edits, res.repairedText);
      },
      py::arg("text"), py::arg("name") = "main", py::arg("solver") = "mhs",
      "Returns (verdict, edit count, repaired text).");

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "0.1.0";
#endif
}
