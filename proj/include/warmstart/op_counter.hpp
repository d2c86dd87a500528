#pragma once

#include <cstdint>

namespace warmstart {

/// Which part of the guess pipeline a memory operation belongs to.
enum class CostCategory { Form, Update };

/// Loads and stores of floating-point values.
struct Traffic {
  std::uint64_t loads = 0;
  std::uint64_t stores = 0;

  [[nodiscard]] std::uint64_t total() const { return loads + stores; }

  Traffic &operator+=(const Traffic &o) {
    loads += o.loads;
    stores += o.stores;
    return *this;
  }
  friend Traffic operator-(const Traffic &a, const Traffic &b) {
    return {a.loads - b.loads, a.stores - b.stores};
  }
  friend bool operator==(const Traffic &, const Traffic &) = default;
};

/// Snapshot of an OpCounter. `form`/`update` hold the traffic on length-N
/// vectors (the leading-order terms); the `*_small` fields hold traffic on
/// data whose size does not depend on N (inner-product results, R factor).
struct CounterSnapshot {
  Traffic form;
  Traffic update;
  Traffic form_small;
  Traffic update_small;

  [[nodiscard]] std::uint64_t leading_total() const {
    return form.total() + update.total();
  }
  [[nodiscard]] std::uint64_t small_total() const {
    return form_small.total() + update_small.total();
  }

  CounterSnapshot &operator+=(const CounterSnapshot &o) {
    form += o.form;
    update += o.update;
    form_small += o.form_small;
    update_small += o.update_small;
    return *this;
  }
  friend CounterSnapshot operator-(const CounterSnapshot &a,
                                   const CounterSnapshot &b) {
    return {a.form - b.form, a.update - b.update,
            a.form_small - b.form_small, a.update_small - b.update_small};
  }
  friend bool operator==(const CounterSnapshot &,
                         const CounterSnapshot &) = default;
};

/// Model tally of the data movement performed by guess-related kernels.
///
/// Kernels do not measure hardware traffic. Each one adds the analytic
/// number of values it has to read and write, so the totals follow the
/// memory-bound cost model exactly and portably. The counter only grows;
/// callers take snapshots at step boundaries and difference them.
class OpCounter {
public:
  void charge(CostCategory cat, std::uint64_t loads, std::uint64_t stores) {
    Traffic &t = cat == CostCategory::Form ? totals_.form : totals_.update;
    t.loads += loads;
    t.stores += stores;
  }

  void charge_small(CostCategory cat, std::uint64_t loads,
                    std::uint64_t stores) {
    Traffic &t =
        cat == CostCategory::Form ? totals_.form_small : totals_.update_small;
    t.loads += loads;
    t.stores += stores;
  }

  [[nodiscard]] const CounterSnapshot &snapshot() const { return totals_; }

  void merge(const OpCounter &other) { totals_ += other.totals_; }

  void reset() { totals_ = {}; }

private:
  CounterSnapshot totals_;
};

/// Nullable handle that routes kernel charges to one category of a counter.
class CostSink {
public:
  CostSink() = default;
  CostSink(OpCounter *counter, CostCategory cat) : counter_(counter), cat_(cat) {}

  void vectors(std::uint64_t loads, std::uint64_t stores) const {
    if (counter_)
      counter_->charge(cat_, loads, stores);
  }
  void small(std::uint64_t loads, std::uint64_t stores) const {
    if (counter_)
      counter_->charge_small(cat_, loads, stores);
  }

  [[nodiscard]] CostSink with(CostCategory cat) const { return {counter_, cat}; }

private:
  OpCounter *counter_ = nullptr;
  CostCategory cat_ = CostCategory::Form;
};

} // namespace warmstart
