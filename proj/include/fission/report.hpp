#pragma once

#include <nlohmann/json.hpp>

#include "fission/density.hpp"
#include "fission/evaluation.hpp"
#include "fission/fission_core.hpp"
#include "fission/metric_space.hpp"
#include "fission/sweep.hpp"

// JSON views of result types. ordered_json keeps keys in insertion order, so
// reports diff cleanly.

namespace fission {

using Json = nlohmann::ordered_json;

inline Json to_json(const SplitRecord& s) {
    return Json{{"subset_size", s.subset_size}, {"mc", s.mc},
                {"d0_reference", s.d0_reference}, {"crack_row", s.crack_row},
                {"crack_threshold", s.crack_threshold}, {"first_size", s.first_size},
                {"second_size", s.second_size}};
}

inline Json to_json(const Partition& p) {
    Json j;
    j["k"] = p.k;
    j["stop_threshold"] = p.stop_threshold ? Json(*p.stop_threshold) : Json(nullptr);
    Json trace = Json::array();
    for (const auto& s : p.split_trace) trace.push_back(to_json(s));
    j["split_trace"] = std::move(trace);
    return j;
}

inline Json to_json(const DenoiseResult& d) {
    return Json{{"dense_size", d.dense_subset.size()}, {"removed_size", d.removed.size()},
                {"r_final", d.r_final}, {"mc_final", d.mc_final},
                {"d0_final", d.d0_final}, {"separated", d.separated},
                {"rounds", d.rounds}};
}

inline Json to_json(const EvalReport& e) {
    Json matching = Json::object();
    for (const auto& [cluster, cls] : e.matching) matching[std::to_string(cluster)] = cls;
    return Json{{"accuracy", e.accuracy}, {"f_score", e.f_score}, {"predicted_k", e.predicted_k},
                {"true_k", e.true_k}, {"matching", std::move(matching)}};
}

inline Json to_json(const TriangleReport& t) {
    return Json{{"pass", t.pass},
                {"worst_violation", t.worst_violation},
                {"worst_triple", {t.worst_triple[0], t.worst_triple[1], t.worst_triple[2]}},
                {"triples_checked", t.triples_checked},
                {"exhaustive", t.exhaustive},
                {"metric_guarantee_lapsed", t.metric_guarantee_lapsed}};
}

inline Json to_json(const SweepReport& s) {
    Json points = Json::array();
    for (const auto& p : s.points) {
        Json j{{"t", p.t}, {"n0", p.n0}, {"k", p.k}, {"separated", p.separated}};
        if (p.accuracy) j["accuracy"] = *p.accuracy;
        if (p.f_score) j["f_score"] = *p.f_score;
        points.push_back(std::move(j));
    }
    Json intervals = Json::array();
    for (const auto& i : s.intervals)
        intervals.push_back(
            Json{{"n0", i.n0}, {"t_begin", i.t_begin}, {"t_end", i.t_end}, {"k", i.k}, {"length", i.length}});
    return Json{{"points", std::move(points)}, {"stable_intervals", std::move(intervals)}};
}

} // namespace fission
