#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "fs2d/config.hpp"
#include "fs2d/dataset.hpp"
#include "fs2d/errors.hpp"
#include "fs2d/eval.hpp"
#include "fs2d/odometry.hpp"
#include "fs2d/registration.hpp"
#include "fs2d/spectral.hpp"

namespace py = pybind11;
using namespace fs2d;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix<double> to_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) throw InputError("expected a 2-D array");
  return Matrix<double>(a.shape(0), a.shape(1),
                        std::vector<double>(a.data(), a.data() + a.size()));
}

template <typename T>
py::array_t<T> to_array(const Matrix<T>& m) {
  py::array_t<T> out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

// Keys and values as in a config file; Python values are stringified.
RunConfig run_config(const py::dict& options) {
  RunConfig cfg;
  for (const auto& [key, value] : options) {
    std::string text;
    if (py::isinstance<py::bool_>(value)) {
      text = value.cast<bool>() ? "true" : "false";
    } else {
      text = py::str(value).cast<std::string>();
    }
    cfg.set(key.cast<std::string>(), text);
  }
  cfg.validate();
  return cfg;
}

py::dict motion_dict(const RigidMotion2D& m) {
  py::dict d;
  d["dx"] = m.dx;
  d["dy"] = m.dy;
  d["theta"] = m.theta;
  return d;
}

py::dict result_dict(const RegistrationResult& r) {
  py::dict d;
  d["ego_motion"] = motion_dict(r.ego_motion);
  d["confidence"] = r.confidence;
  d["is_outlier"] = r.is_outlier;
  d["rotation_confidence"] = r.rotation_confidence;
  py::list hyps;
  for (const auto& h : r.hypotheses) {
    py::dict item;
    item["rank"] = h.rank;
    item["strength"] = h.strength;
    item["motion"] = motion_dict(h.motion);
    hyps.append(item);
  }
  d["hypotheses"] = hyps;
  return d;
}

py::array_t<double> poses_array(const std::vector<Pose2D>& poses) {
  py::array_t<double> out({poses.size(), std::size_t{4}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < poses.size(); ++i) {
    v(i, 0) = poses[i].timestamp;
    v(i, 1) = poses[i].x;
    v(i, 2) = poses[i].y;
    v(i, 3) = poses[i].heading;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_fs2d, m) {
  m.doc() = "Spectral registration of 2D radar scans";

  // Translators run newest first, so the base class goes in first.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<NoStructureError>(m, "NoStructureError", base.ptr());

  py::class_<PolarScan>(m, "PolarScan")
      .def(py::init([](const DoubleArray& azimuths, const FloatArray& intensities,
                       double range_resolution, double timestamp) {
             if (intensities.ndim() != 2) throw InputError("intensities must be 2-D");
             PolarScan s;
             s.azimuths.assign(azimuths.data(), azimuths.data() + azimuths.size());
             s.intensities = Matrix<float>(
                 intensities.shape(0), intensities.shape(1),
                 std::vector<float>(intensities.data(), intensities.data() + intensities.size()));
             s.range_resolution = range_resolution;
             s.timestamp = timestamp;
             s.validate();
             return s;
           }),
           py::arg("azimuths"), py::arg("intensities"), py::arg("range_resolution"),
           py::arg("timestamp") = 0.0)
      .def_property_readonly("azimuths",
                             [](const PolarScan& s) { return py::array_t<double>(py::cast(s.azimuths)); })
      .def_property_readonly("intensities", [](const PolarScan& s) { return to_array(s.intensities); })
      .def_readonly("range_resolution", &PolarScan::range_resolution)
      .def_readonly("timestamp", &PolarScan::timestamp)
      .def("__eq__", [](const PolarScan& a, const PolarScan& b) { return a == b; })
      .def("__repr__", [](const PolarScan& s) {
        std::ostringstream out;
        out << "PolarScan(" << s.azimuth_count() << " azimuths, " << s.range_bin_count()
            << " bins, t=" << s.timestamp << ")";
        return out.str();
      });

  m.def("load_scan", &load_polar_scan, py::arg("path"));
  m.def("save_scan", &save_polar_scan, py::arg("scan"), py::arg("path"));

  m.def("dft2", [](const DoubleArray& a) { return to_array(dft2(to_matrix(a)).values); },
        "DC-centered 2-D DFT, unnormalized.");
  m.def("phase_correlate",
        [](const DoubleArray& a, const DoubleArray& b) {
          return to_array(phase_correlate(dft2(to_matrix(a)), dft2(to_matrix(b))).values);
        },
        "Whitened cross-correlation surface; b = roll(a, s) peaks at s.");

  m.def("register_scans",
        [](const PolarScan& a, const PolarScan& b, const py::dict& config) {
          const RunConfig cfg = run_config(config);
          RegistrationResult r;
          {
            py::gil_scoped_release release;
            r = register_scans(a, b, cfg.registration());
          }
          return result_dict(r);
        },
        py::arg("a"), py::arg("b"), py::arg("config") = py::dict());

  m.def("run_odometry",
        [](std::vector<PolarScan> scans, const py::dict& config) {
          const RunConfig cfg = run_config(config);
          OdometryRun run;
          {
            py::gil_scoped_release release;
            run = run_odometry(ScanSource::from_vector(std::move(scans)), cfg.odometry);
          }
          py::dict d;
          d["poses"] = poses_array(run.trajectory.poses);
          d["outliers"] = run.trajectory.outliers;
          py::list pairs;
          for (const auto& p : run.pairs) {
            py::dict item;
            item["index_a"] = p.index_a;
            item["index_b"] = p.index_b;
            item["motion"] = motion_dict(p.motion);
            item["confidence"] = p.confidence;
            item["is_outlier"] = p.is_outlier;
            item["elapsed_ms"] = p.elapsed_ms;
            pairs.append(item);
          }
          d["pairs"] = pairs;
          return d;
        },
        py::arg("scans"), py::arg("config") = py::dict());

  m.def("synth_scene",
        [](const std::string& spec_text, std::size_t frames) {
          std::istringstream in(spec_text);
          const SynthOutput out = synth_scene(parse_scene_spec(in), frames);
          std::vector<Pose2D> poses;
          for (const auto& f : out.frames) {
            Pose2D p = f.sensor_pose;
            p.timestamp = f.scan.timestamp;
            poses.push_back(p);
          }
          return py::make_tuple(out.scans(), poses_array(poses), out.warnings);
        },
        py::arg("spec"), py::arg("frames"),
        "Renders a scene description; returns (scans, poses[t, x, y, heading], warnings).");

  m.def("pair_errors",
        [](const py::dict& est, const py::dict& truth) {
          auto motion = [](const py::dict& d) {
            return make_motion(d["dx"].cast<double>(), d["dy"].cast<double>(),
                               d["theta"].cast<double>());
          };
          const PairError e = pair_errors(motion(est), motion(truth));
          return py::make_tuple(e.rotation_deg, e.translation_m);
        },
        "Returns (rotation error in degrees, translation error in meters).");
  m.def("expected_discretization_error", &monte_carlo_discretization_error,
        py::arg("cell_size") = 0.75, py::arg("samples") = 200000, py::arg("seed") = 1);
}
