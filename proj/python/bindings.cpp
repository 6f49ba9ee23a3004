#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "graspqd/experiment.hpp"

namespace py = pybind11;
using namespace graspqd;

namespace {

py::tuple vec3_tuple(const Vec3& v) { return py::make_tuple(v.x(), v.y(), v.z()); }

Vec3 vec3_from(const std::vector<double>& v) {
  if (v.size() != 3) throw std::invalid_argument("expected 3 values");
  return Vec3(v[0], v[1], v[2]);
}

py::dict record_dict(const OutcomeRecord& r) {
  const Quat& q = r.pose.orientation;
  py::dict d;
  d["eval_index"] = r.eval_index;
  d["position"] = vec3_tuple(r.pose.position);
  d["quaternion"] = py::make_tuple(q.x(), q.y(), q.z(), q.w());
  d["synergy_id"] = r.pose.synergy_id;
  d["init_joints"] = r.pose.init_joints;
  d["fitness"] = r.fitness;
  d["nu"] = r.nu ? py::cast(*r.nu) : py::none();
  d["genome"] = r.genome.values;
  return d;
}

py::list curve_list(const CoverageCurve& curve) {
  py::list out;
  for (const auto& p : curve) out.append(py::make_tuple(p.eval_index, p.coverage));
  return out;
}

}  // namespace

PYBIND11_MODULE(graspqd, m) {
  m.doc() = "Quality-diversity 6-DoF grasp generation";
  m.attr("__version__") = version();

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def("set", &set_config_value, py::arg("key"), py::arg("value"))
      .def("get", &get_config_value, py::arg("key"))
      .def_static("keys", &config_keys)
      .def("validate", &RunConfig::validate)
      .def("serialize", &serialize_config)
      .def_property_readonly("run_name", &RunConfig::run_name)
      .def("__repr__", [](const RunConfig& c) { return "<RunConfig " + c.run_name() + ">"; });
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));

  py::class_<Scene>(m, "Scene")
      .def_property_readonly("triangle_count", [](const Scene& s) { return s.mesh.triangles().size(); })
      .def_property_readonly("mesh_hash", [](const Scene& s) { return s.mesh.content_hash(); })
      .def_property_readonly("gripper", [](const Scene& s) { return s.spec.name; })
      .def_property_readonly("sample_count", [](const Scene& s) { return s.samples.size(); });
  m.def("load_scene", &load_scene, py::arg("config"));

  py::class_<OutcomeArchive>(m, "OutcomeArchive")
      .def_property_readonly("prior", [](const OutcomeArchive& a) { return to_string(a.prior); })
      .def_readonly("total_evaluations", &OutcomeArchive::total_evaluations)
      .def("__len__", [](const OutcomeArchive& a) { return a.records.size(); })
      .def_property_readonly("records", [](const OutcomeArchive& a) {
        py::list out;
        for (const auto& r : a.records) out.append(record_dict(r));
        return out;
      });

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("algorithm", [](const RunResult& r) { return to_string(r.algorithm); })
      .def_readonly("outcome", &RunResult::outcome)
      .def_readonly("restarts", &RunResult::restarts)
      .def_property_readonly("grid_size", [](const RunResult& r) { return r.grid.size(); })
      .def_property_readonly("evaluations", [](const RunResult& r) { return r.log.size(); })
      .def_property_readonly("valid_count", [](const RunResult& r) {
        return std::count_if(r.log.begin(), r.log.end(), [](const EvalRecord& e) { return e.valid; });
      });

  m.def("run_seed", &run_seed, py::arg("config"), py::arg("scene"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_experiment",
        [](const RunConfig& c) { return run_experiment(c, nullptr); }, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  m.def("write_outcome_archive", &write_outcome_archive, py::arg("path"), py::arg("archive"));
  m.def("read_outcome_archive", &read_outcome_archive, py::arg("path"));

  py::class_<ReferenceGraspSet>(m, "ReferenceGraspSet")
      .def_readonly("step", &ReferenceGraspSet::step)
      .def("__len__", &ReferenceGraspSet::size)
      .def_property_readonly("voxels", [](const ReferenceGraspSet& r) {
        std::vector<Voxel> v(r.voxels.begin(), r.voxels.end());
        return v;
      });
  m.def("build_reference_set",
        [](const std::vector<const OutcomeArchive*>& archives, double step) {
          return build_reference_set(archives, step);
        },
        py::arg("archives"), py::arg("step") = 0.01);
  m.def("coverage_curve",
        [](const OutcomeArchive& a, const ReferenceGraspSet& ref, double step) {
          return curve_list(coverage_curve(a, ref, step));
        },
        py::arg("archive"), py::arg("reference"), py::arg("step") = 0.01);
  m.def("final_coverage", &final_coverage, py::arg("archive"), py::arg("reference"),
        py::arg("step") = 0.01);
  m.def("nu_histogram",
        [](const OutcomeArchive& a, int bins) {
          const Histogram h = nu_histogram(a, bins);
          return py::make_tuple(h.lo, h.hi, h.mass);
        },
        py::arg("archive"), py::arg("bins") = 36);
  m.def("nu_fraction_below", &nu_fraction_below, py::arg("archive"), py::arg("limit"));
  m.def("voxel_heatmap", &voxel_heatmap, py::arg("archive"), py::arg("step") = 0.01);

  m.def("compare_runs",
        [](const std::vector<std::filesystem::path>& dirs, double step) {
          const ComparisonReport report = compare_runs(dirs, step);
          py::dict out;
          out["reference_size"] = report.reference_size;
          py::list rows;
          for (const auto& r : report.runs) {
            py::dict row;
            row["name"] = r.name;
            row["seeds"] = r.seeds;
            row["final_coverage"] = r.final_coverage;
            row["median"] = r.median;
            rows.append(row);
          }
          out["runs"] = rows;
          return out;
        },
        py::arg("run_dirs"), py::arg("step") = 0.01);

  m.def("gripper_presets", &gripper_preset_names);

  m.def("evaluate_grasp",
        [](const Scene& scene, const RunConfig& config, const std::vector<double>& position,
           const std::vector<double>& quaternion_xyzw, int synergy_id,
           const std::vector<double>& init_joints) {
          if (quaternion_xyzw.size() != 4) throw std::invalid_argument("quaternion needs 4 values");
          GraspPose pose;
          pose.position = vec3_from(position);
          pose.orientation = Quat(quaternion_xyzw[3], quaternion_xyzw[0], quaternion_xyzw[1],
                                  quaternion_xyzw[2]).normalized();
          pose.synergy_id = synergy_id;
          pose.init_joints = init_joints;
          const Evaluator evaluator(scene.mesh, scene.spec, config.physics);
          const EvaluationResult r = evaluator.evaluate(pose);
          py::dict out;
          out["valid"] = r.valid;
          out["fitness"] = r.fitness;
          py::list contacts;
          for (const auto& c : r.contacts) {
            contacts.append(py::make_tuple(vec3_tuple(c.point), vec3_tuple(c.normal), c.finger));
          }
          out["contacts"] = contacts;
          return out;
        },
        py::arg("scene"), py::arg("config"), py::arg("position"), py::arg("quaternion"),
        py::arg("synergy_id") = 0, py::arg("init_joints") = std::vector<double>{});
}
