#pragma once

#include <string>
#include <vector>

#include "malign/featurize.hpp"

namespace malign {

struct TrainConfig {
    double c = 0.05;  // inverse regularization strength
    double l1_ratio = 0.5;
    double threshold = 0.5;
    double tol = 1e-7;  // converged when the objective moves less than this
    int64_t max_epochs = 10000;
};

struct FamilyModel {
    std::string family;
    std::string encoder_fingerprint;
    std::string feature_order;  // which blocks feed which columns
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> means;  // standardization learned on training data
    std::vector<double> stds;
    double c = 0.05;
    double l1_ratio = 0.5;
    double threshold = 0.5;
};

struct Prediction {
    std::string sample_id;
    double probability = 0.0;
    bool positive = false;  // probability >= threshold
};

// Ties feature columns to the signature's block ids, e.g. "blocks:1,2,7".
std::string feature_order_fingerprint(const Signature& sig);

// Penalized objective on standardized features: mean logistic loss plus
// lambda1*|w|_1 + lambda2*0.5*|w|_2^2 with the bias unpenalized. Exposed so
// the gradient can be checked against finite differences.
double elastic_loss(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    const std::vector<double>& w, double bias, double lambda1, double lambda2);

// Analytic gradient of elastic_loss; the L1 term contributes sign(w_i), so
// the result is only meaningful where no coordinate sits exactly at 0.
void elastic_loss_gradient(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                           const std::vector<double>& w, double bias, double lambda1,
                           double lambda2, std::vector<double>& grad_w, double& grad_b);

// Proximal-gradient fit with momentum and objective-driven restarts.
// Deterministic for fixed inputs. Constant feature columns get std 1 and a
// weight pinned at 0.
FamilyModel fit(const FeatureMatrix& features, const std::string& family,
                const std::string& encoder_fingerprint, const std::string& feature_order,
                const TrainConfig& cfg = {});

Prediction predict(const FamilyModel& model, const FeatureVector& fv);

void save_model(const FamilyModel& model, const std::string& path);
FamilyModel load_model(const std::string& path);

// One family's trained classifier plus the signature it featurizes against.
struct FamilyDetector {
    FamilyModel model;
    Signature signature;
};

struct Detection {
    std::string sample_id;
    bool benign = true;
    std::string family;  // empty when benign
    double probability = 0.0;
    std::vector<std::pair<std::string, double>> per_family;
};

// Runs every family's classifier on the sample; all negative means benign,
// otherwise the positive family with the highest probability wins.
Detection detect(const NucleotideSequence& sample, const std::vector<FamilyDetector>& detectors,
                 const FeaturizeParams& params = {});

}  // namespace malign
