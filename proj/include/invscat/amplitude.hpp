#pragma once

#include <vector>

#include <Eigen/Core>

#include "invscat/special_functions.hpp"

namespace invscat {

// Fixed-energy scattering amplitude in the harmonic basis,
//   A(a', a) = sum T[(l'm'), (lm)] Y_l'm'(a') conj(Y_lm(a)),
// with rows and columns at lm_index. A spherically symmetric potential gives
// the diagonal tensor T = 4 pi a_l with partial-wave amplitudes a_l.
class AmplitudeData {
 public:
  AmplitudeData() = default;
  static AmplitudeData from_partial_waves(std::vector<cplx> partial_wave);
  static AmplitudeData from_tensor(Eigen::MatrixXcd coeffs);

  int l_max() const { return l_max_; }
  const Eigen::MatrixXcd& coeffs() const { return coeffs_; }
  cplx coeff(int lp, int mp, int l, int m) const {
    return coeffs_(lm_index(lp, mp), lm_index(l, m));
  }

  // True when T is diagonal with entries depending on l only; partial_wave()
  // then holds T/(4 pi).
  bool isotropic() const { return isotropic_; }
  const std::vector<cplx>& partial_wave() const { return partial_wave_; }

  // Copy keeping only l, l' <= n.
  AmplitudeData truncated(int n) const;

  cplx operator()(const Vec3& out_dir, const Vec3& in_dir) const;

 private:
  int l_max_ = -1;
  Eigen::MatrixXcd coeffs_;
  std::vector<cplx> partial_wave_;
  bool isotropic_ = false;
};

}  // namespace invscat
