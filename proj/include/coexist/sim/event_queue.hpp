#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "coexist/errors.hpp"
#include "coexist/units.hpp"

namespace coexist::sim {

/// Min-queue on (time, insertion sequence). Equal-time events pop in FIFO order.
template <typename Payload>
class EventQueue {
 public:
  struct Entry {
    Time time;
    std::uint64_t seq;
    Payload payload;
  };

  void push(Time t, Payload p) {
    if (t < now_) throw InternalError("event scheduled in the past");
    heap_.push(Entry{t, next_seq_++, std::move(p)});
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  Time now() const { return now_; }
  Time next_time() const { return heap_.top().time; }

  Entry pop() {
    if (heap_.empty()) throw InternalError("pop from empty event queue");
    Entry e = heap_.top();
    heap_.pop();
    if (e.time < now_) throw InternalError("event queue went back in time");
    now_ = e.time;
    return e;
  }

 private:
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  Time now_ = Time::zero();
};

}  // namespace coexist::sim
