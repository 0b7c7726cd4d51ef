#pragma once

// Confusion fixture and brute-force metric implementations shared by the
// metric unit tests and the acceptance suite. Nothing here calls into the
// library's metric code.

#include <cmath>
#include <vector>

#include "fairaudit/metrics.h"
#include "fairaudit/random.h"

namespace fairaudit::testutil {

using Outcomes = std::vector<Outcome>;

inline void AddMany(Outcomes& out, Group g, int label, int label_hat, int count) {
  for (int i = 0; i < count; ++i) {
    out.push_back({g, label, static_cast<double>(label_hat), label_hat});
  }
}

// S=1: TP=20, FN=30, FP=10, TN=40; S=0: TP=45, FN=5, FP=25, TN=25.
// Scores equal the binary predictions.
inline Outcomes ConfusionFixture() {
  Outcomes o;
  AddMany(o, Group::kProtected, 1, 1, 20);
  AddMany(o, Group::kProtected, 1, 0, 30);
  AddMany(o, Group::kProtected, 0, 1, 10);
  AddMany(o, Group::kProtected, 0, 0, 40);
  AddMany(o, Group::kReference, 1, 1, 45);
  AddMany(o, Group::kReference, 1, 0, 5);
  AddMany(o, Group::kReference, 0, 1, 25);
  AddMany(o, Group::kReference, 0, 0, 25);
  return o;
}

// Brute-force reference implementations: explicit loops over the records,
// sharing nothing with the library code.
namespace oracle {

struct Result {
  bool defined = false;
  double value = 0.0;
};

inline Result MeanDiff(const Outcomes& d, bool residual) {
  double sum1 = 0, sum0 = 0;
  int n1 = 0, n0 = 0;
  for (const Outcome& o : d) {
    const double v = residual ? o.score_hat - o.label : o.score_hat;
    if (o.group == Group::kProtected) {
      sum1 += v;
      ++n1;
    } else {
      sum0 += v;
      ++n0;
    }
  }
  if (n1 == 0 || n0 == 0) return {};
  return {true, sum1 / n1 - sum0 / n0};
}

inline Result RateDiff(const Outcomes& d, int y) {
  int hit1 = 0, n1 = 0, hit0 = 0, n0 = 0;
  for (const Outcome& o : d) {
    if (o.label != y) continue;
    if (o.group == Group::kProtected) {
      ++n1;
      if (o.label_hat == 1) ++hit1;
    } else {
      ++n0;
      if (o.label_hat == 1) ++hit0;
    }
  }
  if (n1 == 0 || n0 == 0) return {};
  return {true, double(hit1) / n1 - double(hit0) / n0};
}

inline Result Di(const Outcomes& d) {
  int pos1 = 0, n1 = 0, pos0 = 0, n0 = 0;
  for (const Outcome& o : d) {
    if (o.group == Group::kProtected) {
      ++n1;
      pos1 += o.label_hat;
    } else {
      ++n0;
      pos0 += o.label_hat;
    }
  }
  if (n1 == 0 || n0 == 0 || pos0 == 0) return {};
  return {true, (double(pos1) / n1) / (double(pos0) / n0)};
}

inline Result Nmi(const Outcomes& d) {
  const double n = static_cast<double>(d.size());
  double joint[2][2] = {{0, 0}, {0, 0}};
  for (const Outcome& o : d) joint[o.label_hat][o.group == Group::kProtected] += 1.0 / n;
  double py[2] = {joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]};
  double ps[2] = {joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]};
  if (ps[0] == 0 || ps[1] == 0) return {};
  double hy = 0, hs = 0, mi = 0;
  for (int a = 0; a < 2; ++a) {
    if (py[a] > 0) hy -= py[a] * std::log(py[a]);
    if (ps[a] > 0) hs -= ps[a] * std::log(ps[a]);
    for (int b = 0; b < 2; ++b) {
      if (joint[a][b] > 0) mi += joint[a][b] * std::log(joint[a][b] / (py[a] * ps[b]));
    }
  }
  if (hy == 0 || hs == 0) return {true, 0.0};
  return {true, mi / std::sqrt(hy * hs)};
}

}  // namespace oracle

inline Outcomes RandomOutcomes(Rng& rng, std::size_t n) {
  Outcomes d(n);
  for (Outcome& o : d) {
    o.group = rng.Bernoulli(0.4) ? Group::kProtected : Group::kReference;
    o.label = rng.Bernoulli(0.5) ? 1 : 0;
    o.score_hat = rng.Uniform();
    o.label_hat = o.score_hat >= 0.5 ? 1 : 0;
  }
  return d;
}

}  // namespace fairaudit::testutil
