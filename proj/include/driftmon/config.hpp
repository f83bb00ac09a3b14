#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftmon/baselines.hpp"
#include "driftmon/detector.hpp"
#include "driftmon/errors.hpp"
#include "driftmon/evaluation.hpp"
#include "driftmon/generators.hpp"

namespace driftmon {

// Declarative description of a synthetic stream.
struct GeneratorConfig {
    std::string family = "rbf";  // "rbf" | "hyperplane" | a named shape like "rbf5"
    int classes = 5;
    int features = 20;
    double ir = 100.0;
    double ir_dip = 1.0;  // triangle profile depth; 1 keeps the ratio static
    std::string drift_kind = "sudden";
    long t1 = 0;
    long t2 = 0;
    int affected = 0;  // 0 -> all classes; otherwise the c smallest ones
    double magnitude = 0.3;
    long length = 100000;
    std::uint64_t seed = 1;

    static GeneratorConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    std::vector<std::string> validate() const;
    BenchmarkSpec to_spec() const;
};

struct DetectorSpec {
    std::string type;  // rbm | fhddm | ddm-oci | perfsim | none
    nlohmann::json params = nlohmann::json::object();
};

struct CsvStreamConfig {
    std::string path;
    int classes = 0;
    char delimiter = ',';
    bool header = false;
};

struct ExperimentConfig {
    std::optional<GeneratorConfig> generator;
    std::optional<CsvStreamConfig> csv;
    std::vector<DetectorSpec> detectors;
    std::vector<std::uint64_t> seeds;
    std::string output_dir = "out";
    int batch_size = 50;
    long max_batches = 0;  // desk-scale cap; 0 = exhaust
    double cost_cap = 100.0;
    int jobs = 1;
    long horizon = 50;  // detection matching horizon, in batches
    std::string sweep_axis = "none";  // none | affected_count | ir
    std::vector<double> sweep_values;

    static ExperimentConfig from_json(const nlohmann::json& j);
    std::vector<std::string> validate() const;
};

inline DriftKind parse_drift_kind(const std::string& s) {
    if (s == "none") return DriftKind::kNone;
    if (s == "sudden") return DriftKind::kSudden;
    if (s == "gradual") return DriftKind::kGradual;
    if (s == "incremental") return DriftKind::kIncremental;
    if (s == "virtual") return DriftKind::kVirtual;
    throw ConfigError("unknown drift kind: " + s);
}

inline GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
    GeneratorConfig cfg;
    if (j.contains("name")) {
        const BenchmarkSpec spec = benchmark_spec(j.at("name").get<std::string>());
        cfg.family = spec.family == ConceptFamily::kHyperplane ? "hyperplane" : "rbf";
        cfg.classes = spec.classes;
        cfg.features = spec.features;
        cfg.ir = spec.ir;
        cfg.drift_kind = spec.drift_kind == DriftKind::kGradual ? "gradual" : "sudden";
    }
    cfg.family = j.value("family", cfg.family);
    cfg.classes = j.value("classes", cfg.classes);
    cfg.features = j.value("features", cfg.features);
    cfg.ir = j.value("ir", cfg.ir);
    cfg.ir_dip = j.value("ir_dip", cfg.ir_dip);
    cfg.drift_kind = j.value("drift_kind", cfg.drift_kind);
    cfg.t1 = j.value("t1", cfg.t1);
    cfg.t2 = j.value("t2", cfg.t2);
    cfg.affected = j.value("affected", cfg.affected);
    cfg.magnitude = j.value("magnitude", cfg.magnitude);
    cfg.length = j.value("length", cfg.length);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

inline nlohmann::json GeneratorConfig::to_json() const {
    return nlohmann::json{{"family", family},       {"classes", classes},
                          {"features", features},   {"ir", ir},
                          {"ir_dip", ir_dip},       {"drift_kind", drift_kind},
                          {"t1", t1},               {"t2", t2},
                          {"affected", affected},   {"magnitude", magnitude},
                          {"length", length},       {"seed", seed}};
}

inline std::vector<std::string> GeneratorConfig::validate() const {
    std::vector<std::string> issues;
    if (family != "rbf" && family != "hyperplane") {
        issues.push_back("family must be 'rbf' or 'hyperplane', got '" + family + "'");
    }
    if (classes < 2) issues.push_back("class count must be >= 2");
    if (features < 1) issues.push_back("feature count must be >= 1");
    if (ir < 1.0) issues.push_back("imbalance ratio must be >= 1");
    if (ir_dip < 1.0) issues.push_back("ir_dip must be >= 1");
    if (length < 1) issues.push_back("length must be positive");
    if (magnitude <= 0.0) issues.push_back("drift magnitude must be positive");
    try {
        parse_drift_kind(drift_kind);
    } catch (const ConfigError& e) {
        issues.push_back(e.what());
    }
    if (t1 < 0 || t2 < 0) issues.push_back("drift times must be non-negative");
    if (t1 > 0 && t2 > 0 && t2 < t1) issues.push_back("drift needs t1 <= t2");
    if (affected < 0 || affected > classes) {
        issues.push_back("affected-class count out of [0, classes]");
    }
    return issues;
}

inline BenchmarkSpec GeneratorConfig::to_spec() const {
    BenchmarkSpec spec;
    spec.family = family == "hyperplane" ? ConceptFamily::kHyperplane : ConceptFamily::kRadialBasis;
    spec.classes = classes;
    spec.features = features;
    spec.ir = ir;
    spec.ir_dip = ir_dip;
    spec.drift_kind = parse_drift_kind(drift_kind);
    spec.t1 = t1;
    spec.t2 = t2;
    spec.affected = affected;
    spec.magnitude = magnitude;
    spec.length = length;
    return spec;
}

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    const auto& stream = j.at("stream");
    if (stream.contains("generator")) {
        cfg.generator = GeneratorConfig::from_json(stream.at("generator"));
    }
    if (stream.contains("csv")) {
        CsvStreamConfig c;
        const auto& jc = stream.at("csv");
        c.path = jc.at("path").get<std::string>();
        c.classes = jc.value("classes", 0);
        const std::string delim = jc.value("delimiter", ",");
        c.delimiter = delim.empty() ? ',' : delim[0];
        c.header = jc.value("header", false);
        cfg.csv = c;
    }
    for (const auto& jd : j.at("detectors")) {
        DetectorSpec spec;
        spec.type = jd.at("type").get<std::string>();
        spec.params = jd;
        cfg.detectors.push_back(std::move(spec));
    }
    cfg.seeds = j.value("seeds", std::vector<std::uint64_t>{1});
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.max_batches = j.value("max_batches", cfg.max_batches);
    cfg.cost_cap = j.value("cost_cap", cfg.cost_cap);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.horizon = j.value("horizon", cfg.horizon);
    if (j.contains("sweep")) {
        cfg.sweep_axis = j.at("sweep").value("axis", "none");
        cfg.sweep_values = j.at("sweep").value("values", std::vector<double>{});
    }
    return cfg;
}

inline std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> issues;
    if (!generator && !csv) issues.push_back("stream needs either a generator or a csv source");
    if (generator && csv) issues.push_back("stream cannot have both a generator and a csv source");
    if (generator) {
        for (const std::string& s : generator->validate()) issues.push_back("generator: " + s);
    }
    if (csv) {
        if (csv->path.empty()) issues.push_back("csv: path must not be empty");
        if (csv->classes < 2) issues.push_back("csv: class count must be >= 2");
    }
    if (detectors.empty()) issues.push_back("at least one detector is required");
    for (const DetectorSpec& d : detectors) {
        if (d.type != "rbm" && d.type != "fhddm" && d.type != "ddm-oci" && d.type != "perfsim" &&
            d.type != "none") {
            issues.push_back("unknown detector type: " + d.type);
        }
        if (d.params.contains("learning_rate") && d.params.at("learning_rate").get<double>() <= 0.0) {
            issues.push_back(d.type + ": learning rate must be positive");
        }
        if (d.params.contains("gibbs_steps") && d.params.at("gibbs_steps").get<int>() < 1) {
            issues.push_back(d.type + ": gibbs_steps must be >= 1");
        }
        if (d.params.contains("beta")) {
            const double beta = d.params.at("beta").get<double>();
            if (beta < 0.0 || beta >= 1.0) issues.push_back(d.type + ": beta must be in [0, 1)");
        }
    }
    if (seeds.empty()) issues.push_back("seeds must not be empty");
    if (batch_size < 1) issues.push_back("batch size must be >= 1");
    if (max_batches != 0 && max_batches < 10) issues.push_back("max_batches must be >= 10 batches");
    if (jobs < 1) issues.push_back("jobs must be >= 1");
    if (sweep_axis != "none" && sweep_axis != "affected_count" && sweep_axis != "ir") {
        issues.push_back("sweep axis must be one of none, affected_count, ir");
    }
    if (sweep_axis != "none" && sweep_values.empty()) {
        issues.push_back("sweep values must not be empty when an axis is set");
    }
    if (sweep_axis != "none" && csv) issues.push_back("sweeps require a generator stream");
    return issues;
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return j;
}

// Detector construction shared by the CLI and tests. The harness seed keeps
// detector randomness separate from the stream's.
inline std::unique_ptr<DetectorAdapter> make_detector(const DetectorSpec& spec, int class_count,
                                                      std::uint64_t seed) {
    if (spec.type == "rbm") {
        RbmDetectorConfig cfg;
        cfg.rbm.learning_rate = spec.params.value("learning_rate", cfg.rbm.learning_rate);
        cfg.rbm.gibbs_steps = spec.params.value("gibbs_steps", cfg.rbm.gibbs_steps);
        cfg.rbm.hidden_fraction = spec.params.value("hidden_fraction", cfg.rbm.hidden_fraction);
        cfg.rbm.beta = spec.params.value("beta", cfg.rbm.beta);
        cfg.rbm.gradient_clip = spec.params.value("gradient_clip", cfg.rbm.gradient_clip);
        cfg.granger_lag = spec.params.value("granger_lag", cfg.granger_lag);
        cfg.granger_alpha = spec.params.value("granger_alpha", cfg.granger_alpha);
        cfg.trend_ring = spec.params.value("trend_ring", cfg.trend_ring);
        cfg.test_stride = spec.params.value("test_stride", cfg.test_stride);
        cfg.warm_epochs = spec.params.value("warm_epochs", cfg.warm_epochs);
        cfg.window.min_window = spec.params.value("min_window", cfg.window.min_window);
        cfg.window.max_window = spec.params.value("max_window", cfg.window.max_window);
        cfg.window.delta = spec.params.value("window_delta", cfg.window.delta);
        return std::make_unique<RbmAdapter>(cfg, seed, class_count);
    }
    if (spec.type == "fhddm") {
        Fhddm::Config cfg;
        cfg.window = spec.params.value("window", cfg.window);
        cfg.delta = spec.params.value("delta", cfg.delta);
        return std::make_unique<FhddmAdapter>(cfg);
    }
    if (spec.type == "ddm-oci") {
        DdmOci::Config cfg;
        cfg.recall_decay = spec.params.value("recall_decay", cfg.recall_decay);
        cfg.alpha_warning = spec.params.value("alpha_warning", cfg.alpha_warning);
        cfg.alpha_drift = spec.params.value("alpha_drift", cfg.alpha_drift);
        cfg.min_effective = spec.params.value("min_effective", cfg.min_effective);
        return std::make_unique<DdmOciAdapter>(class_count, cfg);
    }
    if (spec.type == "perfsim") {
        PerfSim::Config cfg;
        cfg.tau = spec.params.value("tau", cfg.tau);
        cfg.lambda = spec.params.value("lambda", cfg.lambda);
        cfg.window_batches = spec.params.value("window_batches", cfg.window_batches);
        return std::make_unique<PerfSimAdapter>(class_count, cfg);
    }
    if (spec.type == "none") return std::make_unique<SilentAdapter>();
    throw ConfigError("unknown detector type: " + spec.type);
}

}  // namespace driftmon
