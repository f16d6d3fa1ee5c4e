#pragma once

#include "jarzmle/types.hpp"

namespace jarzmle {

// Predictive view of a classification model parameterized by one latent
// sample (one particle). Metrics average these probabilities over a cloud.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Index n_classes() const = 0;
  // Probability of each class for one feature vector under one latent draw.
  virtual Vector class_probabilities(const Vector& latent,
                                     const Vector& features) const = 0;
};

}  // namespace jarzmle
