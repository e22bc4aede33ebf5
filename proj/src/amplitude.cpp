#include "invscat/amplitude.hpp"

#include <cmath>
#include <numbers>

#include "invscat/errors.hpp"

namespace invscat {

AmplitudeData AmplitudeData::from_partial_waves(std::vector<cplx> partial_wave) {
  if (partial_wave.empty()) throw ValidationError("amplitude needs at least l = 0");
  AmplitudeData d;
  d.l_max_ = static_cast<int>(partial_wave.size()) - 1;
  const int n = lm_count(d.l_max_);
  d.coeffs_ = Eigen::MatrixXcd::Zero(n, n);
  for (int l = 0; l <= d.l_max_; ++l)
    for (int m = -l; m <= l; ++m)
      d.coeffs_(lm_index(l, m), lm_index(l, m)) = 4.0 * std::numbers::pi * partial_wave[l];
  d.partial_wave_ = std::move(partial_wave);
  d.isotropic_ = true;
  return d;
}

AmplitudeData AmplitudeData::from_tensor(Eigen::MatrixXcd coeffs) {
  const int n = static_cast<int>(coeffs.rows());
  const int l_max = static_cast<int>(std::lround(std::sqrt(double(n)))) - 1;
  if (coeffs.cols() != n || lm_count(l_max) != n)
    throw ValidationError("amplitude tensor must be square of size (L+1)^2");
  AmplitudeData d;
  d.l_max_ = l_max;
  d.coeffs_ = std::move(coeffs);
  d.partial_wave_.assign(l_max + 1, 0.0);
  bool iso = true;
  for (int i = 0; i < n && iso; ++i)
    for (int j = 0; j < n && iso; ++j)
      if (i != j && d.coeffs_(i, j) != 0.0) iso = false;
  for (int l = 0; l <= l_max && iso; ++l) {
    const cplx t = d.coeffs_(lm_index(l, -l), lm_index(l, -l));
    for (int m = -l; m <= l; ++m)
      if (d.coeffs_(lm_index(l, m), lm_index(l, m)) != t) iso = false;
    d.partial_wave_[l] = t / (4.0 * std::numbers::pi);
  }
  d.isotropic_ = iso;
  if (!iso) d.partial_wave_.clear();
  return d;
}

AmplitudeData AmplitudeData::truncated(int n) const {
  if (n >= l_max_) return *this;
  if (n < 0) throw ValidationError("negative truncation order");
  if (isotropic_)
    return from_partial_waves(std::vector<cplx>(partial_wave_.begin(),
                                                partial_wave_.begin() + n + 1));
  const int k = lm_count(n);
  return from_tensor(coeffs_.topLeftCorner(k, k));
}

cplx AmplitudeData::operator()(const Vec3& out_dir, const Vec3& in_dir) const {
  const auto yo = spherical_harmonics_all(l_max_, out_dir);
  const auto yi = spherical_harmonics_all(l_max_, in_dir);
  const int n = lm_count(l_max_);
  Eigen::VectorXcd vo(n), vi(n);
  for (int k = 0; k < n; ++k) {
    vo(k) = yo[k];
    vi(k) = std::conj(yi[k]);
  }
  return (vo.transpose() * coeffs_ * vi).value();
}

}  // namespace invscat
