#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "glspec/config.hpp"
#include "glspec/empirical.hpp"
#include "glspec/errors.hpp"
#include "glspec/kernel.hpp"
#include "glspec/rates.hpp"
#include "glspec/reference.hpp"
#include "glspec/space.hpp"
#include "glspec/spectral.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

glspec::SpaceDescriptor space_from_json_str(const std::string& text) {
  return glspec::space_from_json(json::parse(text));
}

glspec::KernelDescriptor kernel_from_json_str(const std::string& text) {
  return glspec::kernel_from_json(json::parse(text));
}

Eigen::MatrixXd points_to_matrix(const glspec::PointSet& pts) {
  const bool two = pts.space.kind == glspec::SpaceKind::Torus2;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), two ? 2 : 1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = pts.points[i].c0;
    if (two) m(static_cast<Eigen::Index>(i), 1) = pts.points[i].c1;
  }
  return m;
}

glspec::SpaceFunction wrap_callable(const py::function& f) {
  return [f](const glspec::Point& p) { return f(p.c0, p.c1).cast<double>(); };
}

glspec::RefOperator ref_op_from_string(const std::string& name) {
  if (name == "T") return glspec::RefOperator::T;
  if (name == "U") return glspec::RefOperator::U;
  if (name == "Uprime") return glspec::RefOperator::Uprime;
  throw std::invalid_argument("op must be 'T', 'U' or 'Uprime'");
}

py::dict spectrum_to_dict(const glspec::Spectrum& s) {
  py::dict d;
  d["values"] = s.values;
  d["vectors"] = s.vectors;
  py::list groups;
  for (const auto& [begin, end] : s.groups) groups.append(py::make_tuple(begin, end));
  d["groups"] = groups;
  return d;
}

}  // namespace

PYBIND11_MODULE(glspec_py, m) {
  m.doc() = "Graph-Laplacian operator toolkit: sample matrices, spectra, Nystrom "
            "extensions, reference operators and rate-theorem constants";

  py::register_exception<glspec::config_error>(m, "ConfigError");
  py::register_exception<glspec::degenerate_degree_error>(m, "DegenerateDegreeError");
  py::register_exception<glspec::ill_posed_window_error>(m, "IllPosedWindowError");

  py::class_<glspec::SpaceDescriptor>(m, "Space")
      .def_static("from_json", &space_from_json_str, py::arg("text"),
                  "Parse a space descriptor from its JSON config form")
      .def_property_readonly("diameter",
                             [](const glspec::SpaceDescriptor& s) { return glspec::diameter(s); })
      .def("__repr__", [](const glspec::SpaceDescriptor& s) {
        return "<glspec.Space " + glspec::space_to_json(s).dump() + ">";
      });

  py::class_<glspec::KernelDescriptor>(m, "Kernel")
      .def_static("from_json", &kernel_from_json_str, py::arg("text"),
                  "Parse a kernel descriptor from its JSON config form")
      .def_readonly("M", &glspec::KernelDescriptor::M)
      .def_readonly("a", &glspec::KernelDescriptor::a)
      .def("__repr__", [](const glspec::KernelDescriptor& k) {
        return "<glspec.Kernel " + glspec::kernel_to_json(k).dump() + ">";
      });

  py::class_<glspec::PointSet>(m, "PointSet")
      .def_property_readonly("coords", &points_to_matrix,
                             "Sample coordinates, one row per point")
      .def_readonly("seed", &glspec::PointSet::seed)
      .def("__len__", &glspec::PointSet::size);

  m.def("sample_uniform", &glspec::sample_uniform, py::arg("space"), py::arg("n"),
        py::arg("seed"), "Draw an ordered i.i.d. uniform sample");

  py::class_<glspec::OperatorBundle>(m, "OperatorBundle")
      .def_readonly("K", &glspec::OperatorBundle::K)
      .def_readonly("D", &glspec::OperatorBundle::D)
      .def_readonly("M_diag", &glspec::OperatorBundle::Mdiag)
      .def_readonly("L", &glspec::OperatorBundle::L)
      .def_readonly("L_prime", &glspec::OperatorBundle::Lprime)
      .def_readonly("min_degree", &glspec::OperatorBundle::min_degree)
      .def_readonly("laplacians_available", &glspec::OperatorBundle::laplacians_available)
      .def_property_readonly("n", &glspec::OperatorBundle::n);

  m.def(
      "build_bundle",
      [](const glspec::KernelDescriptor& kernel, const glspec::PointSet& pts, int threads) {
        glspec::BundleOptions opts;
        opts.threads = threads;
        return glspec::build_bundle(kernel, pts, opts);
      },
      py::arg("kernel"), py::arg("points"), py::arg("threads") = 0,
      "Assemble K, D, M and the Laplacians L, L' from a sample");

  m.def(
      "restrict_to_samples",
      [](const py::function& f, const glspec::PointSet& pts) {
        return glspec::restrict_to_samples(wrap_callable(f), pts);
      },
      py::arg("f"), py::arg("points"),
      "rho_n f: evaluate f(c0, c1) at every sample point");

  m.def(
      "eig_sym",
      [](const Eigen::MatrixXd& A, double gap_tol_scale) {
        return spectrum_to_dict(glspec::eig_sym(A, gap_tol_scale));
      },
      py::arg("A"), py::arg("gap_tol_scale") = 1e-6,
      "Eigendecomposition of a symmetric matrix with multiplicity groups");

  m.def(
      "decompose_identity_laplacian",
      [](const glspec::OperatorBundle& b) {
        return spectrum_to_dict(glspec::decompose_identity_laplacian(b));
      },
      py::arg("bundle"));
  m.def(
      "decompose_amv_laplacian",
      [](const glspec::OperatorBundle& b) {
        return spectrum_to_dict(glspec::decompose_amv_laplacian(b));
      },
      py::arg("bundle"));

  py::class_<glspec::ExtendedEigenfunction>(m, "ExtendedEigenfunction")
      .def_readonly("lam", &glspec::ExtendedEigenfunction::lambda)
      .def("__call__",
           [](const glspec::ExtendedEigenfunction& f, double c0, double c1) {
             return f(glspec::Point{c0, c1});
           },
           py::arg("c0"), py::arg("c1") = 0.0);

  m.def("nystrom_extend_identity", &glspec::nystrom_extend_identity, py::arg("bundle"),
        py::arg("v"), py::arg("lam"),
        "Extend an eigenvector of L' to an eigenfunction of U'_n");
  m.def("nystrom_extend_amv", &glspec::nystrom_extend_amv, py::arg("bundle"), py::arg("v"),
        py::arg("lam"), "Extend an eigenvector of L to an eigenfunction of U_n");

  m.def(
      "circle_ball_spectrum",
      [](double r, int max_frequency, const std::string& op) {
        const auto ref = glspec::circle_ball_spectrum(r, max_frequency, ref_op_from_string(op));
        py::list out;
        for (const auto& level : ref.levels)
          out.append(py::make_tuple(level.kappa, level.value, level.multiplicity));
        return out;
      },
      py::arg("r"), py::arg("max_frequency"), py::arg("op") = "T",
      "Analytic (kappa, eigenvalue, multiplicity) levels on the circle");

  m.def(
      "dense_grid_operator",
      [](const glspec::KernelDescriptor& kernel, const glspec::SpaceDescriptor& space,
         std::size_t grid_n, const std::string& op, std::size_t quadrature) {
        const auto degrees = glspec::make_degree_field(kernel, space, quadrature);
        return glspec::dense_grid_operator(kernel, space, degrees, grid_n,
                                           ref_op_from_string(op));
      },
      py::arg("kernel"), py::arg("space"), py::arg("grid_n"), py::arg("op") = "T",
      py::arg("quadrature") = 4096,
      "Product-integration discretization of T_mu / U_mu / U'_mu");

  py::class_<glspec::RateConstants>(m, "RateConstants")
      .def_readonly("gamma", &glspec::RateConstants::gamma)
      .def_readonly("gamma_tilde", &glspec::RateConstants::gamma_tilde)
      .def_readonly("C_e", &glspec::RateConstants::C_e)
      .def_readonly("C_a", &glspec::RateConstants::C_a)
      .def_readonly("C_tilde", &glspec::RateConstants::C_tilde)
      .def_readonly("admissible", &glspec::RateConstants::admissible)
      .def_readonly("admissibility_excess", &glspec::RateConstants::admissibility_excess)
      .def("probability_lower_bound", &glspec::RateConstants::probability_lower_bound,
           py::arg("N"));

  m.def(
      "rate_constants",
      [](double M, double a, double C_L, double m_cov, double C_omega, double m_prime,
         double alpha) {
        glspec::RateConstantInputs in;
        in.M = M;
        in.a = a;
        in.C_L = C_L;
        in.m = m_cov;
        in.C_omega = C_omega;
        in.m_prime = m_prime;
        in.alpha = alpha;
        return glspec::rate_constants(in);
      },
      py::arg("M"), py::arg("a"), py::arg("C_L"), py::arg("m"), py::arg("C_omega"),
      py::arg("m_prime"), py::arg("alpha"), "Constants of the rate theorem");

  m.def("bernstein_bound", &glspec::bernstein_bound, py::arg("M_abs"), py::arg("V"),
        py::arg("n"), py::arg("eps"));
  m.def("sum_tail_bound", &glspec::sum_tail_bound, py::arg("sigma"), py::arg("N"));
  m.def("exp_tail", &glspec::exp_tail, py::arg("c"), py::arg("N"));

  m.def(
      "gc_sup_error",
      [](const glspec::KernelDescriptor& kernel, const glspec::SpaceDescriptor& space,
         const py::function& g, std::size_t n, std::uint64_t seed, std::size_t probe_grid,
         std::size_t quadrature) {
        const auto degrees = glspec::make_degree_field(kernel, space, quadrature);
        return glspec::gc_sup_error(kernel, space, degrees, wrap_callable(g), n, seed,
                                    probe_grid);
      },
      py::arg("kernel"), py::arg("space"), py::arg("g"), py::arg("n"), py::arg("seed"),
      py::arg("probe_grid") = 512, py::arg("quadrature") = 4096,
      "sup over a probe grid of |P_n g - P_mu g|");

  m.def(
      "verify_membership",
      [](const glspec::KernelDescriptor& kernel, const glspec::SpaceDescriptor& space,
         std::size_t grid, const std::vector<double>& delta_ladder, std::size_t probe_count) {
        const auto rep = glspec::verify_membership(kernel, space, grid, delta_ladder,
                                                   probe_count);
        py::dict d;
        d["upper_bound_ok"] = rep.upper_bound_ok;
        d["max_kernel_value"] = rep.max_kernel_value;
        d["lower_bound_ok"] = rep.lower_bound_ok;
        d["min_degree"] = rep.min_degree;
        d["modulus_ok"] = rep.modulus_ok;
        py::list rows;
        for (const auto& r : rep.modulus_rows)
          rows.append(py::make_tuple(r.delta, r.estimate, r.declared_bound, r.ok));
        d["modulus_rows"] = rows;
        d["pass"] = rep.pass;
        return d;
      },
      py::arg("kernel"), py::arg("space"), py::arg("grid") = 4096,
      py::arg("delta_ladder") = std::vector<double>{}, py::arg("probe_count") = 32,
      "Check the kernel-class bounds (UB), (LB), (C) numerically");
}
