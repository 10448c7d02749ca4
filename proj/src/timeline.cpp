#include "dae/timeline.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace dae {

const char* interval_tag_name(IntervalTag tag) {
  switch (tag) {
    case IntervalTag::AccessInner: return "access_inner";
    case IntervalTag::AccessOuter: return "access_outer";
    case IntervalTag::ExecuteInner: return "execute_inner";
    case IntervalTag::ExecuteOuter: return "execute_outer";
    case IntervalTag::LockOp: return "lock_op";
    case IntervalTag::LockWait: return "lock_wait";
    case IntervalTag::Sleep: return "sleep";
    case IntervalTag::Spawn: return "spawn";
    case IntervalTag::Signal: return "signal";
  }
  return "?";
}

bool interval_tag_busy(IntervalTag tag) {
  switch (tag) {
    case IntervalTag::AccessInner:
    case IntervalTag::AccessOuter:
    case IntervalTag::ExecuteInner:
    case IntervalTag::ExecuteOuter:
    case IntervalTag::LockOp:
    case IntervalTag::Spawn:
    case IntervalTag::Signal:
      return true;
    case IntervalTag::LockWait:
    case IntervalTag::Sleep:
      return false;
  }
  return false;
}

TimeFs Timeline::busy_fs(ClusterId c) const {
  TimeFs total = 0;
  for (const Interval& iv : intervals)
    if (iv.core == c && interval_tag_busy(iv.tag)) total += iv.end - iv.begin;
  return total;
}

TimeFs Timeline::tag_fs(IntervalTag tag) const {
  TimeFs total = 0;
  for (const Interval& iv : intervals)
    if (iv.tag == tag) total += iv.end - iv.begin;
  return total;
}

std::string Timeline::to_json() const {
  std::vector<const Interval*> sorted;
  sorted.reserve(intervals.size());
  for (const Interval& iv : intervals) sorted.push_back(&iv);
  std::stable_sort(sorted.begin(), sorted.end(), [](const Interval* a, const Interval* b) {
    if (a->begin != b->begin) return a->begin < b->begin;
    return static_cast<int>(a->core) < static_cast<int>(b->core);
  });
  std::ostringstream out;
  out << "[\n";
  for (size_t k = 0; k < sorted.size(); ++k) {
    const Interval& iv = *sorted[k];
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "  {\"core\":\"%s\",\"tag\":\"%s\",\"start_ns\":%.3f,\"end_ns\":%.3f,"
                  "\"slice\":%lld}%s\n",
                  cluster_name(iv.core), interval_tag_name(iv.tag), ns_from_fs(iv.begin),
                  ns_from_fs(iv.end), static_cast<long long>(iv.slice),
                  k + 1 < sorted.size() ? "," : "");
    out << buf;
  }
  out << "]\n";
  return out.str();
}

}  // namespace dae
