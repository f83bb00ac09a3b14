#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driftmon/errors.hpp"
#include "driftmon/rng.hpp"
#include "driftmon/stream.hpp"

namespace driftmon {

enum class ConceptFamily { kHyperplane, kRadialBasis };
enum class DriftKind { kNone, kSudden, kGradual, kIncremental, kVirtual };

// A slab in feature space: points whose projection onto `normal` lies within
// [offset, offset + width] of the unit cube's projected center.
struct HyperplaneRegion {
    std::vector<double> normal;  // unit length
    double offset = 0.0;         // relative to the projected cube center
    double width = 0.2;
};

struct RbfComponent {
    std::vector<double> center;
    double spread = 0.07;
    double weight = 1.0;
};

// Class-conditional feature generator: slab for the hyperplane family,
// Gaussian mixture for the radial-basis family. Keeping classes decoupled
// lets local drift move one class without disturbing the rest.
struct ClassConcept {
    HyperplaneRegion slab;
    std::vector<RbfComponent> components;
};

struct Concept {
    ConceptFamily family = ConceptFamily::kRadialBasis;
    int features = 0;
    std::vector<ClassConcept> classes;
};

// Interpolation factor over [t1, t2].
inline double mixing_coefficient(long j, long t1, long t2) {
    if (t1 >= t2) throw ConfigError("mixing coefficient needs t1 < t2");
    return static_cast<double>(j - t1) / static_cast<double>(t2 - t1);
}

struct DriftSchedule {
    DriftKind kind = DriftKind::kNone;
    long t1 = 0;
    long t2 = 0;
    std::vector<int> affected;
    double magnitude = 0.3;  // translation / rotation scale of the drifted concept

    bool affects(int cls) const {
        return std::find(affected.begin(), affected.end(), cls) != affected.end();
    }
};

enum class ConceptSelector { kOld, kNew, kBlend };

struct ActiveConcept {
    ConceptSelector selector = ConceptSelector::kOld;
    double alpha = 0.0;
};

// Which concept generates instance j. Sudden switches at t1; incremental (and
// the virtual shift) blend linearly over [t1, t2); gradual picks the new
// concept with probability alpha_j.
template <UniformSource R>
ActiveConcept active_concept(long j, const DriftSchedule& sched, R& rng) {
    switch (sched.kind) {
        case DriftKind::kNone:
            return {ConceptSelector::kOld, 0.0};
        case DriftKind::kSudden:
            return j < sched.t1 ? ActiveConcept{ConceptSelector::kOld, 0.0}
                                : ActiveConcept{ConceptSelector::kNew, 1.0};
        case DriftKind::kIncremental:
        case DriftKind::kVirtual: {
            if (j < sched.t1) return {ConceptSelector::kOld, 0.0};
            if (j >= sched.t2) return {ConceptSelector::kNew, 1.0};
            return {ConceptSelector::kBlend, mixing_coefficient(j, sched.t1, sched.t2)};
        }
        case DriftKind::kGradual: {
            if (j < sched.t1) return {ConceptSelector::kOld, 0.0};
            if (j >= sched.t2) return {ConceptSelector::kNew, 1.0};
            const double alpha = mixing_coefficient(j, sched.t1, sched.t2);
            return rng.uniform() <= alpha ? ActiveConcept{ConceptSelector::kNew, alpha}
                                          : ActiveConcept{ConceptSelector::kOld, alpha};
        }
    }
    return {ConceptSelector::kOld, 0.0};
}

// Piecewise-linear per-class prior trajectories with optional role swaps
// (two classes exchanging their priors from a given instance index on).
struct ImbalanceSchedule {
    struct Knot {
        long at = 0;
        std::vector<double> priors;
    };
    struct RoleSwap {
        long at = 0;
        int first = 0;
        int second = 0;
    };

    std::vector<Knot> knots;  // ascending `at`, each priors vector sums to 1
    std::vector<RoleSwap> swaps;

    std::vector<double> priors_at(long j) const {
        if (knots.empty()) throw ConfigError("imbalance schedule has no knots");
        std::vector<double> p;
        if (j <= knots.front().at || knots.size() == 1) {
            p = knots.front().priors;
        } else if (j >= knots.back().at) {
            p = knots.back().priors;
        } else {
            std::size_t hi = 1;
            while (knots[hi].at < j) ++hi;
            const Knot& k0 = knots[hi - 1];
            const Knot& k1 = knots[hi];
            const double f = static_cast<double>(j - k0.at) / static_cast<double>(k1.at - k0.at);
            p.resize(k0.priors.size());
            for (std::size_t m = 0; m < p.size(); ++m) {
                p[m] = (1.0 - f) * k0.priors[m] + f * k1.priors[m];
            }
        }
        for (const RoleSwap& s : swaps) {
            if (j >= s.at) {
                std::swap(p[static_cast<std::size_t>(s.first)],
                          p[static_cast<std::size_t>(s.second)]);
            }
        }
        return p;
    }
};

// Geometric ladder of priors with max/min ratio `ir`, normalized, majority at
// class 0 and the smallest class last.
inline std::vector<double> ladder_priors(int class_count, double ir) {
    if (class_count < 2) throw ConfigError("class count must be >= 2");
    if (ir < 1.0) throw ConfigError("imbalance ratio must be >= 1");
    std::vector<double> p(static_cast<std::size_t>(class_count));
    const double ratio = std::pow(ir, -1.0 / static_cast<double>(class_count - 1));
    double sum = 0.0;
    for (int m = 0; m < class_count; ++m) {
        p[static_cast<std::size_t>(m)] = std::pow(ratio, m);
        sum += p[static_cast<std::size_t>(m)];
    }
    for (double& v : p) v /= sum;
    return p;
}

namespace detail {

inline std::vector<double> random_unit_vector(int d, Rng& rng) {
    std::vector<double> v(static_cast<std::size_t>(d));
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& x : v) {
            x = rng.gaussian();
            norm += x * x;
        }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

}  // namespace detail

inline Concept make_random_concept(ConceptFamily family, int d, int class_count, Rng& rng,
                                   int components_per_class = 2) {
    Concept c;
    c.family = family;
    c.features = d;
    c.classes.resize(static_cast<std::size_t>(class_count));
    for (auto& cls : c.classes) {
        if (family == ConceptFamily::kHyperplane) {
            cls.slab.normal = detail::random_unit_vector(d, rng);
            cls.slab.width = 0.15;
            // Offsets stay within the bulk of the projected uniform cloud
            // (its standard deviation is 1/sqrt(12) ~ 0.29).
            cls.slab.offset = rng.uniform(-0.4, 0.4);
        } else {
            cls.components.resize(static_cast<std::size_t>(components_per_class));
            for (auto& comp : cls.components) {
                comp.center.resize(static_cast<std::size_t>(d));
                for (double& x : comp.center) x = rng.uniform(0.2, 0.8);
                comp.spread = rng.uniform(0.04, 0.09);
                comp.weight = 1.0;
            }
        }
    }
    return c;
}

// A drifted copy of `base` for the affected classes: radial-basis centers are
// translated by a vector of length `magnitude`; slabs rotate toward a fresh
// direction and shift. `translate_only` keeps the move a pure translation,
// which realizes a virtual (feature-only) shift.
inline Concept drifted_variant(const Concept& base, const std::vector<int>& affected,
                               double magnitude, Rng& rng, bool translate_only = false) {
    Concept next = base;
    for (int cls : affected) {
        ClassConcept& target = next.classes.at(static_cast<std::size_t>(cls));
        if (base.family == ConceptFamily::kRadialBasis) {
            const std::vector<double> dir = detail::random_unit_vector(base.features, rng);
            for (auto& comp : target.components) {
                for (std::size_t i = 0; i < comp.center.size(); ++i) {
                    comp.center[i] += magnitude * dir[i];
                }
            }
        } else {
            if (!translate_only) {
                const std::vector<double> fresh = detail::random_unit_vector(base.features, rng);
                double norm = 0.0;
                for (std::size_t i = 0; i < target.slab.normal.size(); ++i) {
                    target.slab.normal[i] =
                        (1.0 - magnitude) * target.slab.normal[i] + magnitude * fresh[i];
                    norm += target.slab.normal[i] * target.slab.normal[i];
                }
                norm = std::sqrt(norm);
                for (double& x : target.slab.normal) x /= norm;
            }
            target.slab.offset += (rng.bernoulli(0.5) ? 1.0 : -1.0) * magnitude;
        }
    }
    return next;
}

inline ClassConcept interpolate_class(const ClassConcept& c0, const ClassConcept& c1,
                                      double alpha) {
    if (alpha <= 0.0) return c0;
    if (alpha >= 1.0) return c1;
    ClassConcept out = c0;
    if (!c0.slab.normal.empty()) {
        double norm = 0.0;
        for (std::size_t i = 0; i < c0.slab.normal.size(); ++i) {
            out.slab.normal[i] = (1.0 - alpha) * c0.slab.normal[i] + alpha * c1.slab.normal[i];
            norm += out.slab.normal[i] * out.slab.normal[i];
        }
        norm = std::sqrt(norm);
        if (norm > 1e-12) {
            for (double& x : out.slab.normal) x /= norm;
        }
        out.slab.offset = (1.0 - alpha) * c0.slab.offset + alpha * c1.slab.offset;
        out.slab.width = (1.0 - alpha) * c0.slab.width + alpha * c1.slab.width;
    }
    for (std::size_t q = 0; q < out.components.size(); ++q) {
        for (std::size_t i = 0; i < out.components[q].center.size(); ++i) {
            out.components[q].center[i] = (1.0 - alpha) * c0.components[q].center[i] +
                                          alpha * c1.components[q].center[i];
        }
        out.components[q].spread =
            (1.0 - alpha) * c0.components[q].spread + alpha * c1.components[q].spread;
    }
    return out;
}

namespace detail {

inline std::vector<double> sample_from_class(const ClassConcept& cls, ConceptFamily family, int d,
                                             Rng& rng) {
    std::vector<double> x(static_cast<std::size_t>(d));
    if (family == ConceptFamily::kHyperplane) {
        double center_proj = 0.0;
        for (int i = 0; i < d; ++i) center_proj += 0.5 * cls.slab.normal[static_cast<std::size_t>(i)];
        for (double& v : x) v = rng.uniform();
        // Translate the uniform point along the normal into the class slab.
        double proj = 0.0;
        for (int i = 0; i < d; ++i) proj += cls.slab.normal[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        const double target = center_proj + cls.slab.offset + cls.slab.width * rng.uniform();
        const double shift = target - proj;
        for (int i = 0; i < d; ++i) {
            x[static_cast<std::size_t>(i)] += shift * cls.slab.normal[static_cast<std::size_t>(i)];
        }
    } else {
        double total = 0.0;
        for (const auto& comp : cls.components) total += comp.weight;
        double r = rng.uniform() * total;
        std::size_t pick = cls.components.size() - 1;
        for (std::size_t q = 0; q < cls.components.size(); ++q) {
            r -= cls.components[q].weight;
            if (r < 0.0) {
                pick = q;
                break;
            }
        }
        const RbfComponent& comp = cls.components[pick];
        for (int i = 0; i < d; ++i) {
            x[static_cast<std::size_t>(i)] =
                comp.center[static_cast<std::size_t>(i)] + comp.spread * rng.gaussian();
        }
    }
    return x;
}

}  // namespace detail

// Lazy instance source: draws the class from the imbalance schedule, then the
// features from the class's concept, applying the drift schedule to affected
// classes only.
class StreamGenerator {
public:
    StreamGenerator(Concept d0, Concept d1, DriftSchedule drift, ImbalanceSchedule imbalance,
                    std::uint64_t seed, long length)
        : d0_(std::move(d0)),
          d1_(std::move(d1)),
          drift_(std::move(drift)),
          imbalance_(std::move(imbalance)),
          rng_(seed),
          seed_(seed),
          length_(length) {
        if (drift_.kind != DriftKind::kNone && drift_.affected.empty()) {
            throw ConfigError("drift schedule must name affected classes");
        }
        if (drift_.t1 > drift_.t2) throw ConfigError("drift schedule needs t1 <= t2");
    }

    std::optional<Instance> next() {
        if (next_index_ > length_) return std::nullopt;
        const long j = next_index_++;
        return sample_instance(j);
    }

    Instance sample_instance(long j) {
        const std::vector<double> priors = imbalance_.priors_at(j);
        const int label = rng_.categorical(priors);
        Instance inst;
        inst.seq = j;
        inst.label = label;
        const ClassConcept* generating = &d0_.classes[static_cast<std::size_t>(label)];
        ClassConcept blended;
        if (drift_.kind != DriftKind::kNone && drift_.affects(label)) {
            const ActiveConcept active = active_concept(j, drift_, rng_);
            if (active.selector == ConceptSelector::kNew) {
                generating = &d1_.classes[static_cast<std::size_t>(label)];
            } else if (active.selector == ConceptSelector::kBlend) {
                blended = interpolate_class(d0_.classes[static_cast<std::size_t>(label)],
                                            d1_.classes[static_cast<std::size_t>(label)],
                                            active.alpha);
                generating = &blended;
            }
        }
        inst.features = detail::sample_from_class(*generating, d0_.family, d0_.features, rng_);
        return inst;
    }

    void restart() {
        rng_ = Rng(seed_);
        next_index_ = 1;
    }

    long length() const { return length_; }
    long position() const { return next_index_ - 1; }
    const DriftSchedule& drift() const { return drift_; }
    DriftSchedule& drift() { return drift_; }
    const ImbalanceSchedule& imbalance() const { return imbalance_; }
    const Concept& initial_concept() const { return d0_; }
    const Concept& drifted_concept() const { return d1_; }
    int class_count() const { return static_cast<int>(d0_.classes.size()); }
    int feature_count() const { return d0_.features; }

private:
    Concept d0_;
    Concept d1_;
    DriftSchedule drift_;
    ImbalanceSchedule imbalance_;
    Rng rng_;
    std::uint64_t seed_;
    long length_;
    long next_index_ = 1;
};

// The `count` classes with the smallest scheduled priors at the drift onset,
// in increasing size order.
inline std::vector<int> smallest_classes(const std::vector<double>& priors, int count) {
    if (count < 1 || count > static_cast<int>(priors.size())) {
        throw ConfigError("affected-class count out of range");
    }
    std::vector<int> order(priors.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&priors](int lhs, int rhs) {
        return priors[static_cast<std::size_t>(lhs)] < priors[static_cast<std::size_t>(rhs)];
    });
    order.resize(static_cast<std::size_t>(count));
    return order;
}

// Redirect the generator's drift at the `count` smallest classes.
inline void inject_local_drift(StreamGenerator& gen, int count) {
    const std::vector<double> priors = gen.imbalance().priors_at(gen.drift().t1);
    gen.drift().affected = smallest_classes(priors, count);
}

// Named benchmark shapes: hyperplane{5,10,20} carry gradual drift, rbf{5,10,20}
// sudden drift, with (d, IR) growing alongside the class count.
struct BenchmarkSpec {
    ConceptFamily family = ConceptFamily::kRadialBasis;
    int classes = 5;
    int features = 20;
    double ir = 100.0;
    DriftKind drift_kind = DriftKind::kSudden;
    long length = 100000;
    long t1 = 0;       // 0 -> mid-stream
    long t2 = 0;       // 0 -> t1 + 10% of length (ignored for sudden)
    int affected = 0;  // 0 -> all classes
    double magnitude = 0.3;
    double ir_dip = 1.0;  // >1 lowers IR to ir/ir_dip mid-stream (triangle profile)
};

inline BenchmarkSpec benchmark_spec(std::string_view name) {
    BenchmarkSpec spec;
    std::string base;
    int classes = 0;
    for (char ch : name) {
        if (ch >= '0' && ch <= '9') {
            classes = classes * 10 + (ch - '0');
        } else {
            base.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    if (base == "hyperplane") {
        spec.family = ConceptFamily::kHyperplane;
        spec.drift_kind = DriftKind::kGradual;
    } else if (base == "rbf") {
        spec.family = ConceptFamily::kRadialBasis;
        spec.drift_kind = DriftKind::kSudden;
    } else {
        throw ConfigError("unknown benchmark family: " + std::string(name));
    }
    switch (classes) {
        case 5:
            spec.classes = 5;
            spec.features = 20;
            spec.ir = 100.0;
            break;
        case 10:
            spec.classes = 10;
            spec.features = 40;
            spec.ir = 200.0;
            break;
        case 20:
            spec.classes = 20;
            spec.features = 80;
            spec.ir = 300.0;
            break;
        default:
            throw ConfigError("unknown benchmark size in: " + std::string(name));
    }
    return spec;
}

inline StreamGenerator make_benchmark(const BenchmarkSpec& spec, std::uint64_t seed) {
    if (spec.classes < 2) throw ConfigError("class count must be >= 2");
    if (spec.length < 1) throw ConfigError("stream length must be positive");
    Rng concept_rng = Rng(seed).fork(0xC0);
    Concept d0 = make_random_concept(spec.family, spec.features, spec.classes, concept_rng);

    DriftSchedule drift;
    drift.kind = spec.drift_kind;
    drift.magnitude = spec.magnitude;
    drift.t1 = spec.t1 > 0 ? spec.t1 : spec.length / 2;
    drift.t2 = spec.t2 > 0 ? spec.t2 : drift.t1 + std::max<long>(1, spec.length / 10);
    if (drift.kind == DriftKind::kSudden) drift.t2 = drift.t1;

    ImbalanceSchedule imbalance;
    const std::vector<double> priors = ladder_priors(spec.classes, spec.ir);
    if (spec.ir_dip > 1.0) {
        // Triangle profile: the imbalance eases toward mid-stream, then returns.
        const std::vector<double> relaxed =
            ladder_priors(spec.classes, std::max(1.0, spec.ir / spec.ir_dip));
        imbalance.knots = {{1, priors}, {spec.length / 2, relaxed}, {spec.length, priors}};
    } else {
        imbalance.knots = {{1, priors}};
    }

    std::vector<int> affected(static_cast<std::size_t>(spec.classes));
    std::iota(affected.begin(), affected.end(), 0);
    drift.affected = affected;

    Concept d1 = drift.kind == DriftKind::kNone
                     ? d0
                     : drifted_variant(d0, affected, spec.magnitude, concept_rng,
                                       drift.kind == DriftKind::kVirtual);
    StreamGenerator gen(std::move(d0), std::move(d1), drift, imbalance, seed, spec.length);
    if (spec.affected > 0) inject_local_drift(gen, spec.affected);
    return gen;
}

inline StreamGenerator make_benchmark(std::string_view name, std::uint64_t seed) {
    return make_benchmark(benchmark_spec(name), seed);
}

}  // namespace driftmon
