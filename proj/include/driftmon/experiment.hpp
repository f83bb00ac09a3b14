#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "driftmon/config.hpp"
#include "driftmon/csv.hpp"
#include "driftmon/evaluation.hpp"
#include "driftmon/generators.hpp"

namespace driftmon {

// Wraps a materialized instance list behind the generator's pull interface.
class VectorSource {
public:
    explicit VectorSource(std::vector<Instance> instances) : instances_(std::move(instances)) {}

    std::optional<Instance> next() {
        if (pos_ >= instances_.size()) return std::nullopt;
        return instances_[pos_++];
    }

private:
    std::vector<Instance> instances_;
    std::size_t pos_ = 0;
};

namespace detail {

inline std::string metric_value(double v) {
    return std::isnan(v) ? std::string("nan") : format_double(v);
}

}  // namespace detail

inline void write_metrics_csv(std::ostream& os, const RunResult& result,
                              const std::string& detector) {
    os << "batch,pm_auc,pm_gm,drift_" << detector << "\n";
    for (const MetricRow& row : result.metrics) {
        os << row.t << ',' << detail::metric_value(row.pm_auc) << ','
           << detail::metric_value(row.pm_gm) << ',' << row.drift_flag << '\n';
    }
}

inline void write_drift_log_csv(std::ostream& os, const DetectionLog& log) {
    os << "batch,detector,class,decision,statistic,p_value\n";
    for (const DetectionEvent& e : log.events) {
        os << e.t << ',' << log.detector << ',' << e.class_id << ','
           << (e.drift ? "drift" : "stable") << ',' << detail::metric_value(e.statistic) << ','
           << detail::metric_value(e.p_value) << '\n';
    }
}

inline void write_drift_log_jsonl(std::ostream& os, const DetectionLog& log) {
    for (const DetectionEvent& e : log.events) {
        nlohmann::json j{{"batch", e.t},
                         {"detector", log.detector},
                         {"class", e.class_id},
                         {"decision", e.drift ? "drift" : "stable"}};
        j["statistic"] = std::isnan(e.statistic) ? nlohmann::json() : nlohmann::json(e.statistic);
        j["p_value"] = std::isnan(e.p_value) ? nlohmann::json() : nlohmann::json(e.p_value);
        os << j.dump() << '\n';
    }
}

inline nlohmann::json detection_metrics_json(const DetectionMetrics& m) {
    auto opt = [](double v) { return std::isnan(v) ? nlohmann::json() : nlohmann::json(v); };
    return nlohmann::json{{"hits", m.hits},
                          {"misses", m.misses},
                          {"false_alarms", m.false_alarms},
                          {"mean_delay", opt(m.mean_delay)},
                          {"false_alarms_per_100", m.false_alarms_per_100},
                          {"miss_rate", opt(m.miss_rate)},
                          {"attribution_precision", opt(m.attribution_precision)},
                          {"attribution_recall", opt(m.attribution_recall)}};
}

// Truth batches for a generator schedule under the given batch size: the
// batch containing the drift onset, with the affected classes attached.
inline std::vector<GroundTruthDrift> ground_truth(const StreamGenerator& gen, int batch_size) {
    std::vector<GroundTruthDrift> truth;
    const DriftSchedule& drift = gen.drift();
    if (drift.kind == DriftKind::kNone) return truth;
    GroundTruthDrift g;
    g.batch = (drift.t1 + batch_size - 1) / batch_size;
    g.affected = drift.affected;
    truth.push_back(std::move(g));
    return truth;
}

struct RunDescriptor {
    std::string detector_type;
    DetectorSpec spec;
    std::uint64_t seed = 1;
    double sweep_value = 0.0;
    bool swept = false;
    std::string tag;  // filename suffix
};

struct RunSummary {
    RunDescriptor desc;
    DetectionMetrics detection;
    double mean_pm_auc = std::numeric_limits<double>::quiet_NaN();
    double final_pm_auc = std::numeric_limits<double>::quiet_NaN();
    double final_pm_gm = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double mean_metric(const std::vector<MetricRow>& rows, double MetricRow::* field) {
    double sum = 0.0;
    long n = 0;
    for (const MetricRow& r : rows) {
        const double v = r.*field;
        if (!std::isnan(v)) {
            sum += v;
            ++n;
        }
    }
    return n > 0 ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

inline GeneratorConfig swept_generator(GeneratorConfig base, const std::string& axis,
                                       double value) {
    if (axis == "affected_count") {
        base.affected = static_cast<int>(value);
    } else if (axis == "ir") {
        base.ir = value;
    }
    return base;
}

}  // namespace detail

// Executes every (detector x seed x sweep point) run, writing one metrics CSV
// and one drift log (CSV + JSON lines) per run plus a summary JSON and, when
// sweeping, a figure-ready plot CSV.
class ExperimentRunner {
public:
    ExperimentRunner(ExperimentConfig cfg, bool quiet = false) : cfg_(std::move(cfg)), quiet_(quiet) {}

    int run() {
        const std::vector<std::string> issues = cfg_.validate();
        if (!issues.empty()) {
            for (const std::string& s : issues) std::fprintf(stderr, "config error: %s\n", s.c_str());
            return 1;
        }
        std::filesystem::create_directories(cfg_.output_dir);

        std::vector<RunDescriptor> descriptors;
        const std::vector<double> sweep_points =
            cfg_.sweep_axis == "none" ? std::vector<double>{0.0} : cfg_.sweep_values;
        for (const DetectorSpec& spec : cfg_.detectors) {
            for (double value : sweep_points) {
                for (std::uint64_t seed : cfg_.seeds) {
                    RunDescriptor d;
                    d.detector_type = spec.type;
                    d.spec = spec;
                    d.seed = seed;
                    d.swept = cfg_.sweep_axis != "none";
                    d.sweep_value = value;
                    std::ostringstream tag;
                    tag << spec.type;
                    if (d.swept) tag << '_' << cfg_.sweep_axis << '_' << format_double(value);
                    tag << "_seed" << seed;
                    d.tag = tag.str();
                    descriptors.push_back(std::move(d));
                }
            }
        }

        std::vector<RunSummary> summaries(descriptors.size());
        std::atomic<std::size_t> cursor{0};
        std::atomic<bool> failed{false};
        std::mutex log_mutex;
        auto worker = [&] {
            for (;;) {
                const std::size_t idx = cursor.fetch_add(1);
                if (idx >= descriptors.size() || failed.load()) break;
                try {
                    summaries[idx] = execute(descriptors[idx]);
                    if (!quiet_) {
                        std::lock_guard<std::mutex> lock(log_mutex);
                        std::fprintf(stderr, "run %s done\n", descriptors[idx].tag.c_str());
                    }
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(log_mutex);
                    std::fprintf(stderr, "run %s failed: %s\n", descriptors[idx].tag.c_str(),
                                 e.what());
                    failed.store(true);
                }
            }
        };
        const int jobs = std::max(1, std::min<int>(cfg_.jobs, static_cast<int>(descriptors.size())));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (failed.load()) return 2;

        write_summary(summaries);
        if (cfg_.sweep_axis != "none") write_plot_data(summaries);
        return 0;
    }

private:
    RunSummary execute(const RunDescriptor& desc) {
        RunOptions opts;
        opts.batch_size = cfg_.batch_size;
        opts.max_batches = cfg_.max_batches;
        opts.cost_cap = cfg_.cost_cap;

        RunSummary summary;
        summary.desc = desc;
        RunResult result;
        int class_count = 0;
        std::vector<GroundTruthDrift> truth;
        if (cfg_.generator) {
            GeneratorConfig gen_cfg =
                desc.swept ? detail::swept_generator(*cfg_.generator, cfg_.sweep_axis,
                                                     desc.sweep_value)
                           : *cfg_.generator;
            gen_cfg.seed = desc.seed;
            BenchmarkSpec spec = gen_cfg.to_spec();
            StreamGenerator gen = make_benchmark(spec, desc.seed);
            class_count = gen.class_count();
            truth = ground_truth(gen, cfg_.batch_size);
            auto detector = make_detector(desc.spec, class_count,
                                          Rng(desc.seed).fork(0xDE).next_u64());
            result = run_prequential(gen, *detector, opts, class_count, truth);
        } else {
            std::ifstream in(cfg_.csv->path);
            if (!in) throw ConfigError("cannot open stream csv: " + cfg_.csv->path);
            CsvOptions csv_opts{cfg_.csv->delimiter, cfg_.csv->header};
            VectorSource source(read_stream_csv(in, csv_opts));
            class_count = cfg_.csv->classes;
            auto detector = make_detector(desc.spec, class_count,
                                          Rng(desc.seed).fork(0xDE).next_u64());
            result = run_prequential(source, *detector, opts, class_count);
        }

        const std::filesystem::path dir(cfg_.output_dir);
        {
            std::ofstream os(dir / ("metrics_" + desc.tag + ".csv"));
            write_metrics_csv(os, result, desc.detector_type);
        }
        {
            std::ofstream os(dir / ("drift_log_" + desc.tag + ".csv"));
            write_drift_log_csv(os, result.log);
        }
        {
            std::ofstream os(dir / ("drift_log_" + desc.tag + ".jsonl"));
            write_drift_log_jsonl(os, result.log);
        }

        summary.detection = detection_metrics(result.log, cfg_.horizon);
        summary.mean_pm_auc = detail::mean_metric(result.metrics, &MetricRow::pm_auc);
        if (!result.metrics.empty()) {
            summary.final_pm_auc = result.metrics.back().pm_auc;
            summary.final_pm_gm = result.metrics.back().pm_gm;
        }
        return summary;
    }

    void write_summary(const std::vector<RunSummary>& summaries) {
        nlohmann::json runs = nlohmann::json::array();
        for (const RunSummary& s : summaries) {
            nlohmann::json j{{"run", s.desc.tag},
                             {"detector", s.desc.detector_type},
                             {"seed", s.desc.seed},
                             {"detection", detection_metrics_json(s.detection)},
                             {"mean_pm_auc", std::isnan(s.mean_pm_auc) ? nlohmann::json()
                                                                       : nlohmann::json(s.mean_pm_auc)}};
            if (s.desc.swept) j["sweep_value"] = s.desc.sweep_value;
            runs.push_back(std::move(j));
        }
        nlohmann::json summary{{"sweep_axis", cfg_.sweep_axis}, {"runs", runs}};
        std::ofstream os(std::filesystem::path(cfg_.output_dir) / "summary.json");
        os << summary.dump(2) << '\n';
    }

    // One row per (detector, sweep value): pmAUC averaged over seeds.
    void write_plot_data(const std::vector<RunSummary>& summaries) {
        std::map<std::pair<std::string, double>, std::pair<double, int>> cells;
        for (const RunSummary& s : summaries) {
            if (std::isnan(s.mean_pm_auc)) continue;
            auto& cell = cells[{s.desc.detector_type, s.desc.sweep_value}];
            cell.first += s.mean_pm_auc;
            ++cell.second;
        }
        std::ofstream os(std::filesystem::path(cfg_.output_dir) /
                         ("plot_pmauc_vs_" + cfg_.sweep_axis + ".csv"));
        os << "detector," << cfg_.sweep_axis << ",mean_pm_auc\n";
        for (const auto& [key, cell] : cells) {
            os << key.first << ',' << format_double(key.second) << ','
               << format_double(cell.first / cell.second) << '\n';
        }
    }

    ExperimentConfig cfg_;
    bool quiet_;
};

// Entry points used by the command-line front end.
inline int run_experiment(const std::string& config_path, bool quiet = false) {
    ExperimentConfig cfg;
    try {
        cfg = ExperimentConfig::from_json(load_json_file(config_path));
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }
    try {
        return ExperimentRunner(std::move(cfg), quiet).run();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
}

inline int validate_config(const std::string& config_path) {
    try {
        const ExperimentConfig cfg = ExperimentConfig::from_json(load_json_file(config_path));
        const std::vector<std::string> issues = cfg.validate();
        for (const std::string& s : issues) std::fprintf(stderr, "config error: %s\n", s.c_str());
        return issues.empty() ? 0 : 1;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }
}

inline int generate_stream(const std::string& generator_config_path, const std::string& out_path,
                           long length_override = 0, std::uint64_t seed_override = 0) {
    GeneratorConfig cfg;
    try {
        cfg = GeneratorConfig::from_json(load_json_file(generator_config_path));
        if (length_override > 0) cfg.length = length_override;
        if (seed_override != 0) cfg.seed = seed_override;
        const std::vector<std::string> issues = cfg.validate();
        if (!issues.empty()) {
            for (const std::string& s : issues) {
                std::fprintf(stderr, "config error: %s\n", s.c_str());
            }
            return 1;
        }
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }
    try {
        StreamGenerator gen = make_benchmark(cfg.to_spec(), cfg.seed);
        std::ofstream os(out_path);
        if (!os) {
            std::fprintf(stderr, "runtime error: cannot open output file %s\n", out_path.c_str());
            return 2;
        }
        std::vector<Instance> instances;
        instances.reserve(static_cast<std::size_t>(cfg.length));
        while (auto inst = gen.next()) instances.push_back(std::move(*inst));
        write_stream_csv(os, instances);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
}

}  // namespace driftmon
