#ifndef DDSBM_INFERENCE_HPP
#define DDSBM_INFERENCE_HPP

#include <vector>

#include "ddsbm/identify.hpp"
#include "ddsbm/sampler.hpp"
#include "ddsbm/types.hpp"

namespace ddsbm {

// Canonical form of a labeling: communities renumbered by first appearance,
// so two label vectors describe the same partition iff their keys are equal.
std::vector<int> partition_key(const std::vector<int>& labels);

// Number of distinct labels actually used.
int effective_k(const std::vector<int>& labels);

// Most frequent effective K over the kept draws; ties go to the smaller K.
int posterior_mode_k(const Trace& trace);

// Most frequent partition (0-1 loss over partition keys); ties go to the
// partition seen earliest.  Returned with canonical labels and k = effective
// community count.
Assignment posterior_mode_z(const Trace& trace);

// Hubert-Arabie adjusted Rand index; 1 when the pair-counting denominator
// degenerates (both partitions trivial).
double adjusted_rand_index(const std::vector<int>& a,
                           const std::vector<int>& b);

double mean_ari(const Trace& trace, const Assignment& z0);

struct ErrorStats {
  double bias = 0.0;
  double rmse = 0.0;
};
ErrorStats bias_rmse(const std::vector<int>& k_hats, int k0);

// Hellinger distance between the product-Bernoulli network laws of two
// probability matrices: H^2 = 2 - 2 prod_{i<j} (1 - h_ij^2 / 2) with the
// per-pair squared distance h^2 = (sqrt p - sqrt q)^2 + (sqrt(1-p) -
// sqrt(1-q))^2 halved.
double hellinger(const NodeProbMatrix& t0, const NodeProbMatrix& t1);

// KL divergence of the product-Bernoulli laws, sum over pairs; 0*log(0) = 0
// and +inf when absolute continuity fails.
double kl_divergence(const NodeProbMatrix& t0, const NodeProbMatrix& t1);

}  // namespace ddsbm

#endif  // DDSBM_INFERENCE_HPP
