#pragma once

// JSON encoding of checkpoints and run reports (nlohmann::json). Doubles
// are written in shortest round-trip form, so a reloaded checkpoint
// continues bit-identically.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "decoder.hpp"
#include "harness.hpp"
#include "network.hpp"

namespace avim {

using json = nlohmann::json;

inline void to_json(json& j, const compartment_state& c) {
    j = json::array({c.v, c.h, c.n, c.s, c.q, c.ca});
}

inline void from_json(const json& j, compartment_state& c) {
    c = {j.at(0), j.at(1), j.at(2), j.at(3), j.at(4), j.at(5)};
}

inline void to_json(json& j, const pyramidal_state& s) {
    j = {{"soma", s.soma}, {"dend", s.dend}};
    if (s.last_spike_time) j["last_spike"] = *s.last_spike_time;
}

inline void from_json(const json& j, pyramidal_state& s) {
    s.soma = j.at("soma").get<compartment_state>();
    s.dend = j.at("dend").get<compartment_state>();
    if (j.contains("last_spike")) s.last_spike_time = j.at("last_spike").get<double>();
}

inline void to_json(json& j, const interneuron_state& s) {
    j = {{"v", s.v}, {"h", s.h}, {"n", s.n}};
    if (s.last_spike_time) j["last_spike"] = *s.last_spike_time;
}

inline void from_json(const json& j, interneuron_state& s) {
    s.v = j.at("v");
    s.h = j.at("h");
    s.n = j.at("n");
    if (j.contains("last_spike")) s.last_spike_time = j.at("last_spike").get<double>();
}

inline void to_json(json& j, const conductance_state& c) { j = json::array({c.g, c.g_aux}); }
inline void from_json(const json& j, conductance_state& c) { c = {j.at(0), j.at(1)}; }

inline void to_json(json& j, const plasticity_state& p) {
    j = json::array({p.y, p.tag, p.flag, p.prp, p.prp_rate, p.ca_spine, p.ca_dend});
}

inline void from_json(const json& j, plasticity_state& p) {
    p.y = j.at(0);
    p.tag = j.at(1);
    p.flag = j.at(2);
    p.prp = j.at(3);
    p.prp_rate = j.at(4);
    p.ca_spine = j.at(5);
    p.ca_dend = j.at(6);
}

inline void to_json(json& j, const spike_event& e) {
    j = json::array({e.time_ms, static_cast<int>(e.source), e.index});
}

inline void from_json(const json& j, spike_event& e) {
    e.time_ms = j.at(0);
    e.source = static_cast<layer>(j.at(1).get<int>());
    e.index = j.at(2);
}

inline void to_json(json& j, const simulation_state& s) {
    j = {{"step", s.step},
         {"dt", s.dt},
         {"avi", s.avi},
         {"inb", s.inb},
         {"s1_ampa", s.s1_ampa},
         {"s1_nmda", s.s1_nmda},
         {"s2", s.s2},
         {"s3", s.s3},
         {"s4", s.s4},
         {"s1_plasticity", s.s1_plasticity},
         {"s1_z", s.s1_z},
         {"avi_fired", s.avi_fired},
         {"inb_fired", s.inb_fired},
         {"record_spikes", s.record_spikes},
         {"spike_log", s.spike_log},
         {"spike_digest", s.spike_digest},
         {"spike_counts", s.spike_counts}};
}

inline void from_json(const json& j, simulation_state& s) {
    s.step = j.at("step");
    s.dt = j.at("dt");
    j.at("avi").get_to(s.avi);
    j.at("inb").get_to(s.inb);
    j.at("s1_ampa").get_to(s.s1_ampa);
    j.at("s1_nmda").get_to(s.s1_nmda);
    j.at("s2").get_to(s.s2);
    j.at("s3").get_to(s.s3);
    j.at("s4").get_to(s.s4);
    j.at("s1_plasticity").get_to(s.s1_plasticity);
    j.at("s1_z").get_to(s.s1_z);
    j.at("avi_fired").get_to(s.avi_fired);
    j.at("inb_fired").get_to(s.inb_fired);
    s.record_spikes = j.at("record_spikes");
    j.at("spike_log").get_to(s.spike_log);
    s.spike_digest = j.at("spike_digest");
    j.at("spike_counts").get_to(s.spike_counts);
}

inline void to_json(json& j, const decoder& d) {
    std::ostringstream os;
    d.write(os);
    j = os.str();
}

inline void from_json(const json& j, decoder& d) {
    std::istringstream is(j.get<std::string>());
    d = decoder::read(is);
}

inline void to_json(json& j, const step_record& r) {
    j = {{"learned_class", r.learned_class},
         {"accuracy", r.accuracy},
         {"test_counts", r.test_counts},
         {"overall", r.overall},
         {"class_patterns", r.class_patterns},
         {"training_pattern", r.training_pattern},
         {"weights", r.weights},
         {"presentation_digests", r.presentation_digests},
         {"wall_seconds", r.wall_seconds}};
}

inline void from_json(const json& j, step_record& r) {
    r.learned_class = j.at("learned_class");
    j.at("accuracy").get_to(r.accuracy);
    j.at("test_counts").get_to(r.test_counts);
    r.overall = j.at("overall");
    j.at("class_patterns").get_to(r.class_patterns);
    j.at("training_pattern").get_to(r.training_pattern);
    j.at("weights").get_to(r.weights);
    j.at("presentation_digests").get_to(r.presentation_digests);
    r.wall_seconds = j.at("wall_seconds");
}

// The report's JSON omits the training spike log (it is written separately).
inline void to_json(json& j, const run_report& r) {
    j = {{"classes", r.classes},
         {"n_av", r.n_av},
         {"steps", r.steps},
         {"paired_presentations", r.paired_presentations},
         {"training_digest", r.training_digest},
         {"complete", r.complete}};
    if (!r.steps.empty()) j["final_accuracy"] = r.final_accuracy();
}

inline void from_json(const json& j, run_report& r) {
    r.classes = j.at("classes");
    r.n_av = j.at("n_av");
    j.at("steps").get_to(r.steps);
    j.at("paired_presentations").get_to(r.paired_presentations);
    r.training_digest = j.at("training_digest");
    r.complete = j.at("complete");
}

inline void to_json(json& j, const paradigm_checkpoint& cp) {
    j = {{"format", "AVIMCKPT1"}, {"next_class", cp.next_class}, {"state", cp.state}, {"decoder", cp.dec},
         {"report", cp.report}};
}

inline void from_json(const json& j, paradigm_checkpoint& cp) {
    if (j.value("format", "") != "AVIMCKPT1") throw parse_error("not a checkpoint file");
    cp.next_class = j.at("next_class");
    j.at("state").get_to(cp.state);
    j.at("decoder").get_to(cp.dec);
    j.at("report").get_to(cp.report);
    cp.report.training_spikes = cp.state.spike_log;
}

inline void save_json(const std::string& path, const json& j) {
    const auto tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw error("cannot write " + tmp);
        out << j.dump() << '\n';
        if (!out) throw error("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw error("cannot move " + tmp + " to " + path);
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path);
    try {
        return json::parse(in);
    }
    catch (const json::exception& ex) {
        throw parse_error(path + ": " + ex.what());
    }
}

} // namespace avim
