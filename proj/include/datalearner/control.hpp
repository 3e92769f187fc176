#pragma once

#include <atomic>
#include <functional>

#include "datalearner/error.hpp"

namespace datalearner {

/// Cooperative cancellation and progress reporting handed to long-running algorithms.
///
/// Algorithms call checkpoint() at their declared boundaries (per fold, per member
/// tree, per k-means iteration, per Apriori level). A default-constructed control
/// never cancels and discards progress.
class RunControl {
public:
  RunControl() = default;
  RunControl(const std::atomic<bool>* cancel_flag, std::function<void(double)> on_progress)
      : cancel_(cancel_flag), on_progress_(std::move(on_progress)) {}

  bool cancel_requested() const noexcept {
    return cancel_ != nullptr && cancel_->load(std::memory_order_acquire);
  }

  void checkpoint() const {
    if (cancel_requested()) throw Cancelled{};
  }

  void report(double fraction) const {
    if (on_progress_) on_progress_(fraction);
  }

  /// A control sharing this one's cancel flag whose progress maps [0,1] onto [lo, hi].
  RunControl scaled(double lo, double hi) const {
    if (!on_progress_) return RunControl(cancel_, {});
    auto parent = on_progress_;
    return RunControl(cancel_, [parent, lo, hi](double f) { parent(lo + (hi - lo) * f); });
  }

private:
  const std::atomic<bool>* cancel_ = nullptr;
  std::function<void(double)> on_progress_;
};

}  // namespace datalearner
