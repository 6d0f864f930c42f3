#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgc/metric.hpp"

namespace tgc {

enum class ModelName { Flat, FubiniStudy, Hopf, HopfLambda, Iwasawa, RandomPoly };

ModelName model_from_string(const std::string& name);
std::string to_string(ModelName name);

// Built-in metric catalog entry. lambda applies to hopf_lambda;
// degree/amplitude/seed to random_poly.
struct ModelSpec {
  ModelName name = ModelName::Flat;
  int n = 2;
  double lambda = 0.0;
  int degree = 2;
  double amplitude = 0.3;
  std::uint64_t seed = 1;
};

// Construct the metric field. Closed-form jet evaluators for flat,
// fubini_study, hopf, hopf_lambda, iwasawa; parsed polynomial entries
// (g = I + F^dagger F with seeded polynomial F) for random_poly.
// Throws InvalidParameter for inconsistent parameters
// (hopf needs n >= 2, hopf_lambda additionally lambda > -1, iwasawa n = 3).
MetricField builtin(const ModelSpec& spec);

// The parameter at which the first Ricci curvature of the Hopf family
// metric vanishes identically: lambda* = (t(1-n)-1)/n. Throws OutOfRange
// when lambda* <= -1 (the family degenerates; happens iff t >= 1).
double hopf_ricci_flat_lambda(double t, int n);

// Deterministic chart-point sampler respecting each model's domain with a
// margin (hopf family: 0.4 <= |z| <= 3).
std::vector<ChartPoint> sample_points(const ModelSpec& spec, int count,
                                      std::uint64_t seed);

// Source text of the random polynomial metric in the metric DSL.
std::string random_poly_source(int n, int degree, double amplitude,
                               std::uint64_t seed);

// DSL rendering of any built-in model (used for cross-implementation
// round-trip checks and as --metric-file examples).
std::string dsl_rendering(const ModelSpec& spec);

}  // namespace tgc
