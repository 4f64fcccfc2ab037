#include "diafuse/types.hpp"

#include <algorithm>
#include <tuple>

namespace diafuse {

void Diarization::normalize() {
  std::stable_sort(turns.begin(), turns.end(), [](const Turn& a, const Turn& b) {
    return std::tie(a.start, a.end, a.speaker) < std::tie(b.start, b.end, b.speaker);
  });
}

double Diarization::speech_duration() const {
  if (turns.empty()) return 0.0;
  std::vector<std::pair<double, double>> spans;
  spans.reserve(turns.size());
  for (const auto& t : turns) spans.emplace_back(t.start, t.end);
  std::sort(spans.begin(), spans.end());
  double total = 0.0;
  double cur_start = spans[0].first;
  double cur_end = spans[0].second;
  for (size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first > cur_end) {
      total += cur_end - cur_start;
      cur_start = spans[i].first;
      cur_end = spans[i].second;
    } else {
      cur_end = std::max(cur_end, spans[i].second);
    }
  }
  total += cur_end - cur_start;
  return total;
}

}  // namespace diafuse
