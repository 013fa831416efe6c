#include "frictio/core.hpp"
#include "frictio/fem.hpp"
#include "frictio/incremental.hpp"
#include "frictio/load_path.hpp"
#include "frictio/march.hpp"
#include "frictio/residuals.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace frictio;

namespace {

py::dict report_dict(const ResidualReport& r) {
  py::dict d;
  d["pass"] = r.pass;
  d["equilibrium"] = r.equilibrium_normalized;
  d["signorini"] = r.signorini_normalized;
  d["friction_cone"] = r.friction_cone_normalized;
  d["flow_rule"] = r.flow_rule_normalized;
  d["continuity"] = r.continuity_normalized;
  d["max_normalized"] = r.max_normalized();
  d["worst_law"] = r.worst_law();
  return d;
}

py::dict trajectory_dict(const Trajectory& tr) {
  const auto n = static_cast<Eigen::Index>(tr.size());
  Eigen::MatrixXd u(n, 2), t(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    u.row(i) = tr.states()[static_cast<std::size_t>(i)].u.transpose();
    t.row(i) = tr.states()[static_cast<std::size_t>(i)].t.transpose();
  }
  py::list jumps;
  for (const auto& j : tr.jumps()) jumps.append(py::make_tuple(j.time, j.left.u, j.right.u));
  py::dict d;
  d["times"] = tr.times();
  d["u"] = u;
  d["t"] = t;
  d["jump_records"] = jumps;
  return d;
}

std::shared_ptr<LoadPath> polyline(const std::vector<double>& times, const Eigen::MatrixXd& values) {
  if (values.rows() != static_cast<Eigen::Index>(times.size())) {
    throw Error(ErrorCode::InvalidArgument, "one load row per time required");
  }
  std::vector<VecX> rows;
  for (Eigen::Index i = 0; i < values.rows(); ++i) rows.push_back(values.row(i).transpose());
  return std::make_shared<LoadPath>(LoadPath::polyline(times, rows));
}

}  // namespace

PYBIND11_MODULE(_frictio, m) {
  m.doc() = "Quasi-static frictional contact: incremental solver, march, plane FEM";

  py::register_exception<Error>(m, "FrictioError");

  py::class_<StiffnessMatrix2>(m, "Stiffness")
      .def(py::init<double, double, double>(), py::arg("k_nn"), py::arg("k_nt"), py::arg("k_tt"))
      .def_property_readonly("k_nn", &StiffnessMatrix2::k_nn)
      .def_property_readonly("k_nt", &StiffnessMatrix2::k_nt)
      .def_property_readonly("k_tt", &StiffnessMatrix2::k_tt)
      .def_property_readonly("flipped", &StiffnessMatrix2::flipped)
      .def("matrix", &StiffnessMatrix2::original_matrix)
      .def("__repr__", [](const StiffnessMatrix2& K) {
        const Mat2 M = K.original_matrix();
        return "Stiffness(" + std::to_string(M(0, 0)) + ", " + std::to_string(M(0, 1)) + ", " +
               std::to_string(M(1, 1)) + ")";
      });

  py::class_<ContactState>(m, "ContactState")
      .def(py::init<>())
      .def(py::init([](const Vec2& u, const Vec2& t) { return ContactState{u, t}; }), py::arg("u"), py::arg("t"))
      .def_readwrite("u", &ContactState::u)
      .def_readwrite("t", &ContactState::t);

  m.def("critical_friction", &critical_friction, py::arg("K"),
        "k_tt / k_nt, or None when the coupling vanishes");

  m.def(
      "tresca_minimize",
      [](const StiffnessMatrix2& K, const Vec2& F, double w_t, double sigma) {
        return tresca_minimize({K, F, w_t, sigma});
      },
      py::arg("K"), py::arg("F"), py::arg("w_t"), py::arg("sigma"));

  m.def(
      "solve_incremental",
      [](const StiffnessMatrix2& K, const Vec2& F, double w_t, double f) {
        const auto sol = solve_incremental(K, F, w_t, f);
        py::dict d;
        d["u"] = sol.state.u;
        d["t"] = sol.state.t;
        d["regime"] = std::string(to_string(sol.regime));
        d["unique"] = sol.unique;
        d["sigma"] = sol.sigma;
        return d;
      },
      py::arg("K"), py::arg("F"), py::arg("w_t"), py::arg("f"));

  m.def(
      "check_incremental_kkt",
      [](const StiffnessMatrix2& K, const Vec2& F, double w_t, double f, const ContactState& s, double tol) {
        return report_dict(check_incremental_kkt(K, F, w_t, f, s, tol));
      },
      py::arg("K"), py::arg("F"), py::arg("w_t"), py::arg("f"), py::arg("state"), py::arg("tol") = 1e-10);

  m.def(
      "continuum_family",
      [](const StiffnessMatrix2& K, double f, double F_t, int samples) {
        const auto fam = continuum_family(K, f, F_t);
        py::list states;
        for (int k = 0; k < samples; ++k) {
          const double tn = fam.t_n_min + (fam.t_n_max - fam.t_n_min) * k / std::max(1, samples - 1);
          states.append(fam.state(tn));
        }
        return py::make_tuple(fam.F, py::make_tuple(fam.t_n_min, fam.t_n_max), states);
      },
      py::arg("K"), py::arg("f"), py::arg("F_t"), py::arg("samples") = 11);

  m.def("paper_jump_state", &paper_jump_state, py::arg("K"), py::arg("R"), py::arg("f"), py::arg("s"));

  m.def(
      "march_polyline",
      [](const StiffnessMatrix2& K, const std::vector<double>& times, const Eigen::MatrixXd& values, double f, int m) {
        const auto load = polyline(times, values);
        const auto rep = march(K, *load, ContactState{}, f, m);
        py::dict d = trajectory_dict(rep.trajectory);
        py::list jumps;
        for (const auto& j : rep.jumps) jumps.append(py::make_tuple(j.time, j.magnitude));
        d["jumps"] = jumps;
        d["stability_constant"] = rep.stability_constant;
        d["residuals"] = report_dict(rep.residuals);
        return d;
      },
      py::arg("K"), py::arg("times"), py::arg("values"), py::arg("f"), py::arg("m"),
      "march from rest under the continuous polyline load through (times, values)");

  m.def(
      "march_paper_jump",
      [](const StiffnessMatrix2& K, double R, double f, int m) {
        const auto pj = paper_jump_scenario(K, R, f);
        const auto rep = march(K, *pj.load, ContactState{}, f, m);
        py::dict d = trajectory_dict(rep.trajectory);
        py::list jumps;
        for (const auto& j : rep.jumps) jumps.append(py::make_tuple(j.time, j.magnitude));
        d["jumps"] = jumps;
        d["stability_constant"] = rep.stability_constant;
        d["residuals"] = report_dict(rep.residuals);
        return d;
      },
      py::arg("K"), py::arg("R") = 1.0, py::arg("f") = 2.0, py::arg("m") = 2000);

  m.def(
      "subdivision",
      [](const std::vector<double>& times, const Eigen::MatrixXd& values, int m) {
        return build_subdivision(*polyline(times, values), m).times;
      },
      py::arg("times"), py::arg("values"), py::arg("m"));

  m.def(
      "triangle_condensed_stiffness",
      [](const Vec2& A, const Vec2& B, const Vec2& C, double E, double nu) {
        return triangle_condensed_stiffness(A, B, C, ElasticMaterial(E, nu));
      },
      py::arg("A"), py::arg("B"), py::arg("C"), py::arg("E") = 1.0, py::arg("nu") = 0.0);

  m.def(
      "consistent_edge_load",
      [](const Vec2& A, const Vec2& C, const Vec2& T, const std::string& mode) {
        return consistent_edge_load(A, C, T, load_mapping_from_string(mode)).force;
      },
      py::arg("A"), py::arg("C"), py::arg("T"), py::arg("mode") = "virtual-work");

  m.def(
      "solve_triangle",
      [](const Vec2& A, const Vec2& B, const Vec2& C, double E, double nu, const Vec2& T, double w_t, double f) {
        FemModel model(PlaneMesh::single_triangle(A, B, C), ElasticMaterial(E, nu));
        VecX load(4);
        load << 0.0, 0.0, T(0), T(1);
        const auto res = model.solve_incremental(load, {w_t}, f);
        py::dict d;
        d["u"] = res.u;
        d["contact"] = res.contact.at(0);
        d["converged"] = res.converged;
        return d;
      },
      py::arg("A"), py::arg("B"), py::arg("C"), py::arg("E"), py::arg("nu"), py::arg("T"), py::arg("w_t"),
      py::arg("f"), "single clamped triangle loaded on edge AC, contact at A");

  m.def(
      "lipschitz_probe",
      [](const StiffnessMatrix2& K, double f, int trials, std::uint64_t seed) {
        return lipschitz_probe(K, f, trials, seed);
      },
      py::arg("K"), py::arg("f"), py::arg("trials") = 2000, py::arg("seed") = 1);
}
