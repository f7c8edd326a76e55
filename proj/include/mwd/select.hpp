#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwd/classify.hpp"
#include "mwd/cv.hpp"
#include "mwd/features.hpp"

namespace mwd {

// Two-sided Mann-Whitney U test, normal approximation with tie and continuity
// corrections. Returns 1 when all values are tied.
double mann_whitney_p(std::span<const double> values, std::span<const int> labels);

struct ChannelCount {
  std::string channel;
  std::size_t salient;
  std::size_t total;
};

// Features with p < alpha per channel, in column channel order.
std::vector<ChannelCount> salient_feature_counts(const FeatureMatrix& X, double alpha = 0.05);

enum class RankMethod { PValue, Auc };
const char* to_string(RankMethod m);
RankMethod rank_method_from_string(const std::string& s);

struct ChannelScore {
  std::string channel;
  double score;
};

struct ChannelRanking {
  RankMethod method{RankMethod::PValue};
  std::vector<ChannelScore> entries;  // non-increasing score; ties keep column order
  double seconds{0.0};

  std::vector<std::string> top(std::size_t k) const;
};

// pvalue: salient-feature count at alpha. auc: pooled LOSO AUC of a classifier
// trained on that channel alone.
ChannelRanking rank_channels(const FeatureMatrix& X, RankMethod method, const ClassifierSpec& spec,
                             std::uint64_t seed, unsigned threads = 1, double alpha = 0.05);

struct CurvePoint {
  std::size_t k;
  std::vector<std::string> channels;
  EvalResult eval;
};

// LOSO evaluation on the top-K channels for K = 1..k_max.
std::vector<CurvePoint> channel_curve(const FeatureMatrix& X, const ChannelRanking& ranking, std::size_t k_max,
                                      const ClassifierSpec& spec, std::uint64_t seed, unsigned threads = 1);

// ---------------------------------------------------------------------------

enum class SelectMethod { Rfe, Ife, Cife };
const char* to_string(SelectMethod m);

struct ClusterMap {
  std::vector<std::size_t> cluster_of;       // per column
  std::vector<std::size_t> representatives;  // column index per cluster, ascending
  std::size_t n_clusters() const { return representatives.size(); }
};

struct FeatureSelection {
  SelectMethod method{SelectMethod::Ife};
  std::vector<std::string> selected;  // most important first
  std::vector<double> importance;     // of `selected`, from the ranking fit
  double seconds{0.0};
  std::size_t k{0};
  std::optional<double> rho_thres;
  std::optional<std::size_t> step;
  std::size_t n_fits{0};
  double cluster_seconds{0.0};  // CIFE step 1
  std::size_t n_clusters{0};
};

// Sample Pearson correlation; nullopt if either input is constant.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

// Connected components of the |rho| >= rho_thres graph. Each cluster is
// represented by the member with the highest mean |rho| to the other members
// (lowest index on ties). Constant columns are uncorrelated with everything.
ClusterMap correlation_clusters(const FeatureMatrix& X, double rho_thres, unsigned threads = 1);

FeatureSelection ife(const FeatureMatrix& X, std::size_t k, const ForestParams& fp, unsigned threads = 1);

// step == 0 removes 10% of the remaining features per round (at least one).
// Every round refits with fp.seed; the final order comes from the last fit.
FeatureSelection rfe(const FeatureMatrix& X, std::size_t k, std::size_t step, const ForestParams& fp,
                     unsigned threads = 1);

FeatureSelection cife(const FeatureMatrix& X, double rho_thres, std::size_t k, const ForestParams& fp,
                      unsigned threads = 1);

}  // namespace mwd
