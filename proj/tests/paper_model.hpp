#pragma once

// The three-state AR(2) configuration used throughout the tests.

#include "hmmar/model.hpp"

namespace test_model {

inline hmmar::TransitionMatrix paper_transition() {
  hmmar::Matrix p(3, 3);
  p << 0.8, 0.1, 0.1,
       0.05, 0.9, 0.05,
       0.1, 0.05, 0.85;
  return hmmar::TransitionMatrix(p);
}

inline std::vector<hmmar::ArStateParams> paper_states() {
  auto ar = [](double a1, double a2) {
    hmmar::Vector a(2);
    a << a1, a2;
    return a;
  };
  return {{0.0, ar(0.3, 0.2), 0.1}, {0.5, ar(0.2, 0.3), 0.2}, {1.0, ar(0.1, 0.4), 0.1}};
}

inline hmmar::SwitchingArModel paper_model() {
  return hmmar::SwitchingArModel(paper_transition(), paper_states());
}

}  // namespace test_model
