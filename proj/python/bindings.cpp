#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "msdiar/ahc.hpp"
#include "msdiar/costmodel.hpp"
#include "msdiar/errors.hpp"
#include "msdiar/metrics.hpp"
#include "msdiar/router.hpp"
#include "msdiar/session.hpp"
#include "msdiar/simgen.hpp"
#include "msdiar/spectral.hpp"

namespace py = pybind11;
using namespace msdiar;

namespace {

std::optional<std::size_t> bound_get(const Bound& b) {
  if (!b.finite()) return std::nullopt;
  return b.value();
}

Bound bound_set(std::optional<std::size_t> v) { return v ? Bound::of(*v) : Bound::unbounded(); }

Linkage parse_linkage(const std::string& name) {
  if (name == "average") return Linkage::Average;
  if (name == "complete") return Linkage::Complete;
  throw py::value_error("linkage must be 'average' or 'complete'");
}

py::dict ledger_dict(const CostLedger& l) {
  py::dict d;
  d["adds"] = l.adds;
  d["muls"] = l.muls;
  d["divs"] = l.divs;
  d["comparisons"] = l.comparisons;
  d["eig_sweep_ops"] = l.eig_sweep_ops;
  d["total"] = l.total();
  return d;
}

py::dict report_dict(const DerReport& r) {
  py::dict d;
  d["scored_time"] = r.scored_time;
  d["missed_time"] = r.missed_time;
  d["false_alarm_time"] = r.false_alarm_time;
  d["confusion_time"] = r.confusion_time;
  d["der"] = r.der;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-stage streaming speaker clustering";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidConfigError>(m, "InvalidConfigError", base.ptr());
  py::register_exception<BoundOrderingError>(m, "BoundOrderingError", base.ptr());
  py::register_exception<DimensionMismatchError>(m, "DimensionMismatchError", base.ptr());
  py::register_exception<NoScoredTimeError>(m, "NoScoredTimeError", base.ptr());
  py::register_exception<InfeasibleAngleError>(m, "InfeasibleAngleError", base.ptr());
  py::register_exception<MalformedLineError>(m, "MalformedLineError", base.ptr());

  py::class_<ClusteringConfig>(m, "ClusteringConfig")
      .def(py::init([](std::optional<std::size_t> l, std::optional<std::size_t> u1,
                       std::optional<std::size_t> u2, std::uint64_t seed) {
             ClusteringConfig c;
             c.fallback_lower_bound = bound_set(l);
             c.main_upper_bound = bound_set(u1);
             c.pre_upper_bound = bound_set(u2);
             c.rng_seed = seed;
             return validate_config(c);
           }),
           py::arg("fallback_lower_bound") = 50, py::arg("main_upper_bound") = 300,
           py::arg("pre_upper_bound") = 600, py::arg("rng_seed") = 0,
           "Bounds of None mean unbounded.")
      .def_property(
          "fallback_lower_bound", [](const ClusteringConfig& c) { return bound_get(c.fallback_lower_bound); },
          [](ClusteringConfig& c, std::optional<std::size_t> v) { c.fallback_lower_bound = bound_set(v); })
      .def_property(
          "main_upper_bound", [](const ClusteringConfig& c) { return bound_get(c.main_upper_bound); },
          [](ClusteringConfig& c, std::optional<std::size_t> v) { c.main_upper_bound = bound_set(v); })
      .def_property(
          "pre_upper_bound", [](const ClusteringConfig& c) { return bound_get(c.pre_upper_bound); },
          [](ClusteringConfig& c, std::optional<std::size_t> v) { c.pre_upper_bound = bound_set(v); })
      .def_readwrite("fallback_threshold", &ClusteringConfig::fallback_threshold)
      .def_readwrite("max_speakers", &ClusteringConfig::max_speakers)
      .def_readwrite("autotune_grid", &ClusteringConfig::autotune_grid)
      .def_readwrite("rng_seed", &ClusteringConfig::rng_seed)
      .def_static("parse", &parse_config)
      .def("__str__", &write_config);

  py::class_<EmbeddingRecord>(m, "EmbeddingRecord")
      .def(py::init([](std::vector<double> v, double s, double e, bool turn) {
             return EmbeddingRecord{std::move(v), s, e, turn};
           }),
           py::arg("vector"), py::arg("start_time"), py::arg("end_time"),
           py::arg("turn_initiated") = false)
      .def_readwrite("vector", &EmbeddingRecord::vector)
      .def_readwrite("start_time", &EmbeddingRecord::start_time)
      .def_readwrite("end_time", &EmbeddingRecord::end_time)
      .def_readwrite("turn_initiated", &EmbeddingRecord::turn_initiated);

  py::class_<RttmSegment>(m, "RttmSegment")
      .def(py::init([](std::string f, double onset, double dur, std::string spk, int ch) {
             return RttmSegment{std::move(f), ch, onset, dur, std::move(spk)};
           }),
           py::arg("file_id"), py::arg("onset"), py::arg("duration"), py::arg("speaker"),
           py::arg("channel") = 1)
      .def_readwrite("file_id", &RttmSegment::file_id)
      .def_readwrite("channel", &RttmSegment::channel)
      .def_readwrite("onset", &RttmSegment::onset)
      .def_readwrite("duration", &RttmSegment::duration)
      .def_readwrite("speaker", &RttmSegment::speaker)
      .def("__repr__", [](const RttmSegment& s) {
        return "RttmSegment(" + s.file_id + ", " + std::to_string(s.onset) + ", " +
               std::to_string(s.duration) + ", " + s.speaker + ")";
      });

  m.def(
      "ahc_cluster",
      [](const RowMatrix& points, const std::string& linkage, std::optional<double> threshold,
         std::optional<std::size_t> target) {
        if (threshold.has_value() == target.has_value()) {
          throw py::value_error("give exactly one of threshold or target");
        }
        const StopRule stop = threshold ? StopRule{ThresholdStop{*threshold}}
                                        : StopRule{TargetCountStop{*target}};
        return ahc_cluster(points, parse_linkage(linkage), stop).labels;
      },
      py::arg("points"), py::arg("linkage") = "average", py::arg("threshold") = py::none(),
      py::arg("target") = py::none(), "Labels from agglomerative clustering of row vectors.");

  m.def(
      "spectral_cluster",
      [](const RowMatrix& points, int max_speakers, std::optional<std::vector<double>> grid,
         std::uint64_t seed) {
        SpectralParams p;
        p.max_speakers = max_speakers;
        if (grid) p.autotune_grid = *grid;
        p.rng_seed = seed;
        CostLedger ledger;
        const SpeakerLabeling l = spectral_cluster(points, p, &ledger);
        return py::make_tuple(l.labels, ledger_dict(ledger));
      },
      py::arg("points"), py::arg("max_speakers") = 8, py::arg("grid") = py::none(),
      py::arg("seed") = 0, "Returns (labels, op counts).");

  m.def(
      "route",
      [](std::size_t n, bool turn_seen, const ClusteringConfig& config) {
        return std::string(stage_name(route(n, turn_seen, config, CompressionCache{})));
      },
      py::arg("n"), py::arg("turn_seen"), py::arg("config"),
      "Stage chosen for n inputs before any compression.");

  py::class_<DiarizationSession>(m, "Session")
      .def(py::init<ClusteringConfig>(), py::arg("config") = ClusteringConfig{})
      .def(
          "push",
          [](DiarizationSession& s, const EmbeddingRecord& r) { return s.push(r).labels; },
          py::arg("record"))
      .def("ingest", [](DiarizationSession& s, const EmbeddingRecord& r) { s.ingest(r); },
           py::arg("record"))
      .def("labels", [](const DiarizationSession& s) { return s.finalize().labeling.labels; })
      .def("trace",
           [](const DiarizationSession& s) {
             py::list out;
             for (const StepTrace& t : s.trace()) {
               py::dict d;
               d["step"] = t.step;
               d["stage"] = std::string(stage_name(t.stage));
               d["clustered"] = t.clustered;
               d["num_speakers"] = t.num_speakers;
               d["stored_vectors"] = t.stored_vectors;
               d["compressions"] = t.compressions;
               d["covered_prefix_len"] = t.covered_prefix_len;
               d["cost"] = ledger_dict(t.cost);
               out.append(d);
             }
             return out;
           })
      .def_property_readonly("size", &DiarizationSession::size)
      .def_property_readonly("stored_vectors", &DiarizationSession::stored_vectors)
      .def_property_readonly("compressions",
                             [](const DiarizationSession& s) { return s.cache().compressions; });

  m.def("parse_rttm", &parse_rttm, py::arg("text"));
  m.def("write_rttm", [](const std::vector<RttmSegment>& s) { return write_rttm(s); });
  m.def(
      "compute_der",
      [](const std::vector<RttmSegment>& ref, const std::vector<RttmSegment>& hyp, double collar,
         std::optional<std::vector<std::pair<double, double>>> uem) {
        ScoringOptions o;
        o.collar = collar;
        if (uem && !ref.empty()) {
          std::vector<Interval> iv;
          for (auto [a, b] : *uem) iv.push_back({a, b});
          o.uem = Uem{{ref.front().file_id, iv}};
        }
        return report_dict(compute_der(ref, hyp, o));
      },
      py::arg("reference"), py::arg("hypothesis"), py::arg("collar") = 0.25,
      py::arg("uem") = py::none());

  m.def(
      "speaker_count_stats",
      [](const std::vector<std::pair<int, int>>& pairs) {
        const SpeakerCountStats s = speaker_count_stats(pairs);
        py::dict d;
        d["mae"] = s.mae;
        d["pct_correct"] = s.pct_correct;
        d["pct_over"] = s.pct_over;
        d["pct_under"] = s.pct_under;
        return d;
      },
      py::arg("pairs"), "pairs of (reference count, hypothesis count)");

  m.def(
      "generate",
      [](int speakers, std::size_t dim, double duration, std::uint64_t seed, double intra,
         double inter) {
        SimSpec s;
        s.num_speakers = speakers;
        s.dim = dim;
        s.total_duration_seconds = duration;
        s.rng_seed = seed;
        s.intra_speaker_angle_deg = intra;
        s.min_inter_speaker_angle_deg = inter;
        SimOutput out = generate(s);
        py::dict d;
        d["records"] = out.records;
        d["labels"] = out.labels;
        d["reference"] = out.reference;
        d["speakers_present"] = out.speakers_present;
        return d;
      },
      py::arg("num_speakers") = 2, py::arg("dim") = 32, py::arg("duration") = 600.0,
      py::arg("seed") = 0, py::arg("intra_angle_deg") = 5.0, py::arg("min_inter_angle_deg") = 60.0);

  m.def(
      "sweep",
      [](const ClusteringConfig& config, const std::vector<EmbeddingRecord>& records,
         const std::vector<std::size_t>& checkpoints) {
        const CostReport r = sweep(config, records, checkpoints);
        py::list rows;
        for (const CostRow& row : r.rows) {
          py::dict d = ledger_dict(row.ledger);
          d["n"] = row.n;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config"), py::arg("records"), py::arg("checkpoints"),
      "Op counts of the clustering step at each checkpoint.");
}
