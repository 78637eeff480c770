#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "anosov/diagnostics.hpp"
#include "anosov/errors.hpp"

namespace anosov {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict worst(Verdict a, Verdict b) {
  if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Pass;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_index = n;
  std::exception_ptr err;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

namespace {

struct Pt {
  double x, y;
};

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Upper (sign = +1) or lower (sign = -1) hull, increasing x.
std::vector<Pt> hull(std::vector<Pt> pts, int sign) {
  std::sort(pts.begin(), pts.end(), [sign](const Pt& a, const Pt& b) {
    if (a.x != b.x) return a.x < b.x;
    return sign > 0 ? a.y > b.y : a.y < b.y;
  });
  std::vector<Pt> h;
  for (const auto& p : pts) {
    if (!h.empty() && h.back().x == p.x) continue;
    while (h.size() >= 2 && sign * cross(h[h.size() - 2], h.back(), p) >= 0) h.pop_back();
    h.push_back(p);
  }
  return h;
}

double edge_slope_at(const std::vector<Pt>& h, double x) {
  if (h.size() < 2) return 0.0;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    if (x <= h[i + 1].x || i + 2 == h.size()) {
      return (h[i + 1].y - h[i].y) / (h[i + 1].x - h[i].x);
    }
  }
  return 0.0;
}

}  // namespace

FitResult fit_bounds(const std::vector<double>& x, const std::vector<double>& y, double lower_min_x) {
  if (x.size() != y.size()) throw PreconditionError("fit_bounds: size mismatch");
  FitResult f;
  f.n = x.size();
  if (x.empty()) return f;
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.ls_slope = sxx > 0 ? sxy / sxx : 0.0;
  f.ls_intercept = my - f.ls_slope * mx;

  std::vector<Pt> all, far;
  for (std::size_t i = 0; i < x.size(); ++i) {
    all.push_back({x[i], y[i]});
    if (x[i] >= lower_min_x) far.push_back({x[i], y[i]});
  }
  f.upper_slope = edge_slope_at(hull(all, +1), mx);
  if (!far.empty()) {
    double mfar = 0;
    for (const auto& p : far) mfar += p.x;
    mfar /= static_cast<double>(far.size());
    f.lower_slope = edge_slope_at(hull(far, -1), mfar);
  }
  f.upper_intercept = -std::numeric_limits<double>::infinity();
  f.lower_intercept = std::numeric_limits<double>::infinity();
  for (const auto& p : all) {
    f.upper_intercept = std::max(f.upper_intercept, p.y - f.upper_slope * p.x);
    f.lower_intercept = std::min(f.lower_intercept, p.y - f.lower_slope * p.x);
  }
  f.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& p : all) {
    double lo = p.y - (f.lower_slope * p.x + f.lower_intercept);
    double hi = (f.upper_slope * p.x + f.upper_intercept) - p.y;
    f.min_slack = std::min({f.min_slack, lo, hi});
  }
  return f;
}

}  // namespace anosov
