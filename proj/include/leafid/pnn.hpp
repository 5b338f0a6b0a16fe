#ifndef LEAFID_PNN_HPP
#define LEAFID_PNN_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace leafid {

/// Per-feature min/max observed on the training set; a feature with
/// min == max maps to 0 for every input.
struct NormParams {
    std::vector<double> min, max;

    std::size_t dim() const { return min.size(); }
};

NormParams normalize_fit(const std::vector<std::vector<double>>& vectors);
std::vector<double> normalize_apply(const NormParams& p, std::span<const double> x);

using LabeledVector = std::pair<std::string, std::vector<double>>;

/// Parzen-window classifier state: normalized exemplars stored per class,
/// classes ordered lexicographically. Immutable after train().
struct PnnModel {
    std::vector<std::string> classes;
    std::vector<std::vector<std::vector<double>>> exemplars;  // [class][k][feature]
    double sigma = 0.05;
    std::size_t dim = 0;
    NormParams norm;
    std::string feature_config;
};

PnnModel train(const std::vector<LabeledVector>& samples, double sigma = 0.05,
               const std::string& feature_config = "");

/// log p(x|w_j) evaluated in the log domain; x must already be normalized.
double class_log_density(const PnnModel& m, std::span<const double> x, std::size_t class_index);

struct Classification {
    std::string label;
    std::size_t class_index = 0;
    std::vector<double> log_density;
    std::vector<double> posterior;  // softmax of log densities, equal priors
};

/// Normalizes the raw vector, scores every class, picks the argmax
/// (lowest class index on ties).
Classification classify(const PnnModel& m, std::span<const double> raw_features);

std::string model_to_json(const PnnModel& m);
PnnModel model_from_json(const std::string& text);
void save_model(const PnnModel& m, const std::string& path);
PnnModel load_model(const std::string& path);

}  // namespace leafid

#endif
