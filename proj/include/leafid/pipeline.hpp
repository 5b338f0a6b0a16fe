#ifndef LEAFID_PIPELINE_HPP
#define LEAFID_PIPELINE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "leafid/imaging.hpp"
#include "leafid/pnn.hpp"
#include "leafid/shape.hpp"
#include "leafid/texture.hpp"
#include "leafid/vein.hpp"

namespace leafid {

enum class Split { Unassigned, Train, Test };
std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct ManifestEntry {
    std::string path;
    std::string label;
    Split split = Split::Unassigned;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
};

/// One subdirectory per class; entries come back sorted by (label, path).
DatasetManifest scan_dataset(const std::string& root);

/// CSV with header path,label,split; no quoting, fields with commas rejected.
DatasetManifest load_manifest_csv(const std::string& path);
void save_manifest_csv(const DatasetManifest& m, const std::string& path);

/// Per class: seeded shuffle, first train_per_class entries go to train, the
/// next test_per_class to test. The shuffle depends only on (seed, label,
/// sorted paths), never on manifest order.
DatasetManifest split_dataset(const DatasetManifest& m, int train_per_class,
                              int test_per_class, std::uint64_t seed);

/// Feature groups in their fixed vector order.
struct FeatureConfig {
    bool pft = false;
    bool geometric = false;
    bool color_mean = false;
    bool color_std = false;
    bool color_skew = false;
    bool color_kurt = false;
    bool glcm = false;
    int vein = 0;  // leading vein features, 0..4

    bool operator==(const FeatureConfig&) const = default;

    /// Vector length at default extraction options (PFT contributes 35).
    std::size_t dimension() const;
    std::string name() const;

    /// Accepts canonical names ("pft+geom+mean+std+skew+vein3") and the
    /// presets best-flavia, best-foliage, full.
    static FeatureConfig parse(const std::string& text);
    static std::vector<FeatureConfig> table2();

    FeatureConfig union_with(const FeatureConfig& other) const;
};

struct ExtractionOptions {
    PftOptions pft;
    int glcm_levels = 8;
    int glcm_distance = 1;
    HaralickOptions haralick;
    VeinOptions vein;
    bool color_mask = true;
    ForegroundPolicy foreground = ForegroundPolicy::Auto;

    /// Stable serialization of every knob; part of the cache key.
    std::string fingerprint() const;
};

/// Raw per-leaf feature groups; vein always carries the four radii.
struct LeafFeatureGroups {
    std::vector<double> pft, geometric, color_mean, color_std, color_skew,
        color_kurt, glcm, vein;
};

/// Runs segmentation and the extractors a config needs on one image.
LeafFeatureGroups extract_feature_groups(const std::string& image_path,
                                         const ExtractionOptions& opts,
                                         const FeatureConfig& needed);

/// Concatenates the selected groups in fixed order.
std::vector<double> assemble_features(const LeafFeatureGroups& groups,
                                      const FeatureConfig& config);

/// Per-group feature store backed by a CSV file
/// (header path,group,hash,values). Thread-safe.
class FeatureCache {
public:
    FeatureCache() = default;
    explicit FeatureCache(std::string backing_path);

    static std::string content_hash(const std::string& image_path,
                                    const std::string& fingerprint);

    std::optional<std::vector<double>> lookup(const std::string& path, const std::string& hash,
                                              const std::string& group) const;
    void store(const std::string& path, const std::string& hash, const std::string& group,
               const std::vector<double>& values);

    void load();
    void save() const;
    std::size_t size() const;

private:
    std::string backing_path_;
    mutable std::mutex mutex_;
    std::map<std::string, std::vector<double>> rows_;
};

struct ExtractionFailure {
    std::string path;
    std::string error;
};

/// Feature groups for every manifest entry, parallel to `manifest.entries`;
/// entries that failed extraction are listed in `failures` and hold nullopt.
struct ExtractedGroups {
    DatasetManifest manifest;
    std::vector<std::optional<LeafFeatureGroups>> groups;
    std::vector<ExtractionFailure> failures;
};

ExtractedGroups extract_groups(const DatasetManifest& m, const FeatureConfig& needed,
                               const ExtractionOptions& opts, int jobs = 0,
                               FeatureCache* cache = nullptr);

struct EvaluationReport {
    std::string config_name;
    std::vector<std::string> classes;
    std::vector<int> class_test_count;
    std::vector<int> class_correct_count;
    std::vector<std::vector<int>> confusion;  // [true class][predicted class]
    int n_test = 0;
    int n_correct = 0;
    double accuracy = 0.0;
    std::vector<ExtractionFailure> failures;
};

/// Classifies every test vector against the model; accuracy = n_r / n_t.
EvaluationReport evaluate_vectors(const PnnModel& model,
                                  const std::vector<LabeledVector>& test, int jobs = 0);

struct Protocol {
    int train_per_class = 40;
    int test_per_class = 10;
    std::uint64_t seed = 1;
    double sigma = 0.05;
    int jobs = 0;  // 0 = hardware concurrency
};

struct ProtocolRun {
    PnnModel model;
    EvaluationReport report;
};

/// Extract -> drop failures -> split -> train -> evaluate.
ProtocolRun run_protocol(const DatasetManifest& m, const FeatureConfig& config,
                         const Protocol& protocol, const ExtractionOptions& opts = {},
                         FeatureCache* cache = nullptr);

/// One report per config over a shared split.
std::vector<EvaluationReport> ablation_grid(const DatasetManifest& m,
                                            const std::vector<FeatureConfig>& configs,
                                            const Protocol& protocol,
                                            const ExtractionOptions& opts = {},
                                            FeatureCache* cache = nullptr);

struct SweepPoint {
    double sigma = 0.0;
    double accuracy = 0.0;
};

std::vector<SweepPoint> sigma_sweep(const DatasetManifest& m, const FeatureConfig& config,
                                    const std::vector<double>& sigmas, const Protocol& protocol,
                                    const ExtractionOptions& opts = {},
                                    FeatureCache* cache = nullptr);

/// Same sweep on pre-extracted vectors; shared by the dataset-level op.
std::vector<SweepPoint> sigma_sweep_vectors(const std::vector<LabeledVector>& train,
                                            const std::vector<LabeledVector>& test,
                                            const std::vector<double>& sigmas, int jobs = 0);

struct LearningPoint {
    int train_size = 0;
    double mean_accuracy = 0.0;
};

std::vector<LearningPoint> learning_curve(const DatasetManifest& m, const FeatureConfig& config,
                                          const std::vector<int>& train_sizes, int test_per_class,
                                          int repeats, std::uint64_t seed, double sigma,
                                          const ExtractionOptions& opts = {}, int jobs = 0,
                                          FeatureCache* cache = nullptr);

void write_report_csv(const EvaluationReport& report, const std::string& path);
void write_ablation_csv(const std::vector<EvaluationReport>& reports, const std::string& path);
void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path);
void write_learning_csv(const std::vector<LearningPoint>& points, const std::string& path);

/// Runs fn(0..n-1) on a small thread pool; jobs <= 0 uses hardware
/// concurrency. Exceptions from fn are rethrown on the caller.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace leafid

#endif
