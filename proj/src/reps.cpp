#include "anosov/reps.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "anosov/errors.hpp"

namespace anosov {

Mat tau_d(const std::array<double, 4>& m, int d) {
  const double a = m[0], b = m[1], c = m[2], dd = m[3];
  // Column j is the image of e1^{d-1-j} e2^j, namely
  // (a e1 + c e2)^{d-1-j} (b e1 + dd e2)^j expanded on the same monomials.
  Mat out = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    const int p = d - 1 - j;
    for (int s = 0; s <= p; ++s) {
      double left = static_cast<double>(binomial(p, s)) * std::pow(a, p - s) * std::pow(c, s);
      if (left == 0.0) continue;
      for (int r = 0; r <= j; ++r) {
        double right = static_cast<double>(binomial(j, r)) * std::pow(b, j - r) * std::pow(dd, r);
        out(s + r, j) += left * right;
      }
    }
  }
  return out;
}

Mat tau_d_orthogonal(const std::array<double, 4>& m, int d) {
  Vec scale(d);
  for (int j = 0; j < d; ++j) scale(j) = std::sqrt(static_cast<double>(binomial(d - 1, j)));
  return scale.cwiseInverse().asDiagonal() * tau_d(m, d) * scale.asDiagonal();
}

Flag veronese(const BoundaryPoint& x, int d, bool orthogonal_basis) {
  // [[x, -1], [1, 0]] times an upper triangular element: the rotation taking
  // infinity to x, which keeps the basis well conditioned for large |x|.
  std::array<double, 4> gx{1, 0, 0, 1};
  if (!x.is_infinite()) {
    const double v = x.value(), r = std::hypot(1.0, v);
    gx = {v / r, -1 / r, 1 / r, v / r};
  }
  return Flag(orthogonal_basis ? tau_d_orthogonal(gx, d) : tau_d(gx, d));
}

Mat exterior_power(const Mat& g, int k) {
  const int d = static_cast<int>(g.rows());
  if (k < 1 || k > d) throw PreconditionError("exterior_power: k out of range");
  if (k == 1) return g;
  auto subsets = k_subsets(d, k);
  const long n = static_cast<long>(subsets.size());
  Mat out(n, n);
  Mat sub(k, k);
  for (long r = 0; r < n; ++r) {
    for (long c = 0; c < n; ++c) {
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) sub(a, b) = g(subsets[r][a], subsets[c][b]);
      }
      out(r, c) = sub.determinant();
    }
  }
  return out;
}

WedgeTower wedge_tower(const Mat& g) {
  WedgeTower t;
  t.d = static_cast<int>(g.rows());
  for (int k = 1; k < t.d; ++k) t.wedge.push_back(exterior_power(g, k));
  return t;
}

WedgeTower tower_product(const WedgeTower& a, const WedgeTower& b) {
  WedgeTower t;
  t.d = a.d;
  for (std::size_t k = 0; k < a.wedge.size(); ++k) t.wedge.push_back(a.wedge[k] * b.wedge[k]);
  return t;
}

WedgeTower tower_identity(int d) {
  WedgeTower t;
  t.d = d;
  for (int k = 1; k < d; ++k) {
    auto n = binomial(d, k);
    t.wedge.push_back(Mat::Identity(n, n));
  }
  return t;
}

ScaledTower tower_power(const WedgeTower& t, long long n) {
  if (n < 0) throw PreconditionError("tower_power: negative exponent");
  const std::size_t levels = t.wedge.size();
  ScaledTower result{tower_identity(t.d), std::vector<double>(levels, 0.0)};
  ScaledTower base{t, std::vector<double>(levels, 0.0)};
  auto rescale = [](ScaledTower& s) {
    for (std::size_t k = 0; k < s.tower.wedge.size(); ++k) {
      double nrm = s.tower.wedge[k].norm();
      s.tower.wedge[k] /= nrm;
      s.log_scale[k] += std::log(nrm);
    }
  };
  auto e = static_cast<unsigned long long>(n);
  while (e > 0) {
    if (e & 1ULL) {
      for (std::size_t k = 0; k < levels; ++k) {
        result.tower.wedge[k] = result.tower.wedge[k] * base.tower.wedge[k];
        result.log_scale[k] += base.log_scale[k];
      }
      rescale(result);
    }
    e >>= 1;
    if (e > 0) {
      for (std::size_t k = 0; k < levels; ++k) {
        base.tower.wedge[k] = base.tower.wedge[k] * base.tower.wedge[k];
        base.log_scale[k] *= 2.0;
      }
      rescale(base);
    }
  }
  return result;
}

std::vector<double> log_singular_values(const ScaledTower& t) {
  std::vector<double> cum(t.tower.d + 1, 0.0);
  for (int k = 1; k < t.tower.d; ++k) {
    Eigen::JacobiSVD<Mat> svd(t.tower.wedge[k - 1]);
    cum[k] = std::log(svd.singularValues()(0)) + t.log_scale[k - 1];
  }
  std::vector<double> out(t.tower.d);
  for (int k = 1; k <= t.tower.d; ++k) out[k - 1] = cum[k] - cum[k - 1];
  return out;
}

struct Representation::Cache {
  std::shared_mutex mutex;
  std::map<std::vector<int>, Mat> matrices;
  std::map<std::vector<int>, WedgeTower> towers;
  std::once_flag letters_once;
  std::vector<WedgeTower> letter_towers;
};

Representation::Representation(std::vector<Mat> images, std::string tag)
    : images_(std::move(images)), tag_(std::move(tag)), cache_(std::make_shared<Cache>()) {
  if (images_.empty()) throw DomainError("Representation: no generator images");
  d_ = static_cast<int>(images_.front().rows());
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const Mat& g = images_[i];
    if (g.rows() != d_ || g.cols() != d_) {
      throw DomainError("Representation: generator " + std::to_string(i) + " is not " +
                        std::to_string(d_) + "x" + std::to_string(d_));
    }
    double det = g.determinant();
    if (std::abs(det - 1.0) > 1e-8) {
      throw DomainError("Representation: generator " + std::to_string(i) + " has determinant " +
                        std::to_string(det));
    }
    inverses_.push_back(g.inverse());
  }
}

Representation Representation::explicit_images(std::vector<Mat> images) {
  return Representation(std::move(images), "explicit");
}

Representation Representation::tau(std::span<const Moebius> generators, int d, bool orthogonal) {
  std::vector<Mat> images;
  for (const auto& m : generators) images.push_back(orthogonal ? tau_d_orthogonal(m.lift(), d) : tau_d(m.lift(), d));
  return Representation(std::move(images), (orthogonal ? "tau_d_orthogonal(" : "tau_d(") + std::to_string(d) + ")");
}

Representation Representation::exterior(const Representation& base, int k) {
  std::vector<Mat> images;
  for (const auto& g : base.images_) images.push_back(exterior_power(g, k));
  return Representation(std::move(images), "exterior_power(" + std::to_string(k) + ", " + base.tag_ + ")");
}

Representation Representation::direct_sum(std::span<const Representation> parts) {
  if (parts.empty()) throw DomainError("direct_sum: no parts");
  int d = 0;
  std::string tag = "direct_sum(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].rank() != parts[0].rank()) throw DomainError("direct_sum: parts have different ranks");
    d += parts[i].dim();
    tag += (i ? ", " : "") + parts[i].tag_;
  }
  std::vector<Mat> images;
  for (int g = 0; g < parts[0].rank(); ++g) {
    Mat m = Mat::Zero(d, d);
    int off = 0;
    for (const auto& part : parts) {
      m.block(off, off, part.dim(), part.dim()) = part.generator(g);
      off += part.dim();
    }
    images.push_back(std::move(m));
  }
  return Representation(std::move(images), tag + ")");
}

Representation Representation::conjugate(const Mat& g, const Representation& base) {
  Mat inv = g.inverse();
  std::vector<Mat> images;
  for (const auto& m : base.images_) images.push_back(g * m * inv);
  return Representation(std::move(images), "conjugate(" + base.tag_ + ")");
}

Representation Representation::dual(const Representation& base) {
  std::vector<Mat> images;
  for (const auto& m : base.inverses_) images.push_back(m.transpose());
  return Representation(std::move(images), "dual(" + base.tag_ + ")");
}

const Mat& Representation::letter_image(int letter) const {
  int g = std::abs(letter) - 1;
  if (letter == 0 || g >= rank()) {
    throw PreconditionError("Representation: letter " + std::to_string(letter) + " out of range");
  }
  return letter > 0 ? images_[static_cast<std::size_t>(g)] : inverses_[static_cast<std::size_t>(g)];
}

Mat Representation::evaluate(const Word& w) const {
  const auto& letters = w.letters();
  if (letters.empty()) return Mat::Identity(d_, d_);
  for (int l : letters) letter_image(l);
  {
    std::shared_lock lock(cache_->mutex);
    auto it = cache_->matrices.find(letters);
    if (it != cache_->matrices.end()) return it->second;
  }
  std::vector<int> prefix(letters.begin(), letters.end() - 1);
  Mat value = evaluate(Word(prefix)) * letter_image(letters.back());
  std::unique_lock lock(cache_->mutex);
  return cache_->matrices.emplace(letters, std::move(value)).first->second;
}

WedgeTower Representation::tower(const Word& w) const {
  std::call_once(cache_->letters_once, [this] {
    for (std::size_t g = 0; g < images_.size(); ++g) {
      cache_->letter_towers.push_back(wedge_tower(images_[g]));
      cache_->letter_towers.push_back(wedge_tower(inverses_[g]));
    }
  });
  const auto& letters = w.letters();
  if (letters.empty()) return tower_identity(d_);
  for (int l : letters) letter_image(l);
  {
    std::shared_lock lock(cache_->mutex);
    auto it = cache_->towers.find(letters);
    if (it != cache_->towers.end()) return it->second;
  }
  std::vector<int> prefix(letters.begin(), letters.end() - 1);
  int last = letters.back();
  const auto& lt = cache_->letter_towers[static_cast<std::size_t>(2 * (std::abs(last) - 1) + (last < 0 ? 1 : 0))];
  WedgeTower value = tower_product(tower(Word(prefix)), lt);
  std::unique_lock lock(cache_->mutex);
  return cache_->towers.emplace(letters, std::move(value)).first->second;
}

void Representation::clear_cache() const {
  std::unique_lock lock(cache_->mutex);
  cache_->matrices.clear();
  cache_->towers.clear();
}

}  // namespace anosov
