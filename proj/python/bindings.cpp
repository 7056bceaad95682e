#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ksdw/eval.hpp"
#include "ksdw/query.hpp"
#include "ksdw/service.hpp"
#include "ksdw/workspace.hpp"

namespace py = pybind11;
using namespace ksdw;

namespace {

// Results cross the boundary as JSON text; the Python wrapper decodes them.
class PyWorkspace {
 public:
  explicit PyWorkspace(const std::string& config) : ws_(Workspace::load(load_config(config))) {}

  std::string search(const std::string& query, size_t page) const {
    SearchResult r;
    {
      py::gil_scoped_release release;
      r = ws_->search(query, page);
    }
    return search_response_json(r).dump();
  }

  std::string tables() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : ws_->catalog().tables()) out.push_back(table_json(ws_->catalog(), t));
    return out.dump();
  }

  std::string evaluate(const std::string& suite_path) const {
    auto suite = load_suite_file(suite_path.empty() ? ws_->config().suite : suite_path);
    return report_json(run_benchmark(suite, *ws_));
  }

  std::vector<std::string> warnings() const { return ws_->warnings(); }

 private:
  std::unique_ptr<Workspace> ws_;
};

py::dict ast_dict(const QueryAst& ast) {
  py::dict d;
  d["keyword_groups"] = ast.keyword_groups;
  std::vector<std::string> conns;
  for (auto c : ast.connectives) conns.push_back(c == Connective::And ? "and" : "or");
  d["connectives"] = conns;
  py::list preds;
  for (const auto& p : ast.predicates) {
    py::dict pd;
    pd["left"] = p.left;
    pd["op"] = std::string(to_string(p.op));
    if (const auto* date = std::get_if<Date>(&p.right)) pd["right"] = py::dict(py::arg("date") = to_string(*date));
    else if (const auto* n = std::get_if<double>(&p.right)) pd["right"] = *n;
    else pd["right"] = std::get<KeywordGroup>(p.right);
    preds.append(pd);
  }
  d["predicates"] = preds;
  if (ast.aggregation) {
    py::dict a;
    a["func"] = std::string(to_string(ast.aggregation->func));
    a["attribute"] = ast.aggregation->attribute;
    a["group_by"] = ast.aggregation->group_by;
    a["top"] = ast.aggregation->top ? py::object(py::int_(*ast.aggregation->top)) : py::object(py::none());
    d["aggregation"] = a;
  } else {
    d["aggregation"] = py::none();
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Keyword-to-SQL search engine core";
  py::register_exception<QueryError>(m, "QueryError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_OSError);

  py::class_<PyWorkspace>(m, "Workspace")
      .def(py::init<const std::string&>(), py::arg("config"))
      .def("search_json", &PyWorkspace::search, py::arg("query"), py::arg("page") = 0)
      .def("tables_json", &PyWorkspace::tables)
      .def("evaluate_json", &PyWorkspace::evaluate, py::arg("suite") = "")
      .def_property_readonly("warnings", &PyWorkspace::warnings);

  m.def("parse_query", [](const std::string& text) { return ast_dict(parse_query(text)); }, py::arg("text"));
  m.def("render_query", [](const std::string& text) { return render_query(parse_query(text)); }, py::arg("text"));
  m.def("format_sql", [](const std::string& sql) { return render(parse_sql(sql)); }, py::arg("sql"));
}
