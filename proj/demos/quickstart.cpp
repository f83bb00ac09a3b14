// Minimal walkthrough: build an imbalanced stream with a local sudden drift,
// warm the detector on the first batch, and print what it reports.

#include <cstdio>

#include "driftmon/detector.hpp"
#include "driftmon/generators.hpp"

int main() {
    driftmon::BenchmarkSpec spec = driftmon::benchmark_spec("rbf5");
    spec.length = 15000;       // 300 batches of 50
    spec.t1 = 5000;            // sudden drift at instance 5000
    spec.affected = 1;         // only the smallest minority class moves
    driftmon::StreamGenerator stream = driftmon::make_benchmark(spec, /*seed=*/7);

    driftmon::RbmDetector detector({}, /*seed=*/42);
    long batch_index = 0;
    while (true) {
        driftmon::MiniBatch batch;
        batch.t = ++batch_index;
        for (int i = 0; i < 50; ++i) {
            auto inst = stream.next();
            if (!inst) break;
            batch.instances.push_back(std::move(*inst));
        }
        if (batch.empty()) break;
        if (!detector.warmed()) {
            detector.warm_start(batch, stream.class_count());
            continue;
        }
        const driftmon::DriftReport report = detector.process_batch(batch);
        for (int m = 0; m < stream.class_count(); ++m) {
            const auto& d = report.classes[static_cast<std::size_t>(m)];
            if (d.drift) {
                std::printf("batch %ld: drift in class %d (p=%.4f)\n", batch_index, m, d.p_value);
            }
        }
    }
    std::printf("processed %ld batches\n", batch_index);
    return 0;
}
