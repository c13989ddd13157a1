#include <set>
#include <utility>

#include "support.hpp"

namespace ml5::test {

std::optional<std::string> validate_trace(const Trace& t, const std::string& entry) {
  std::vector<std::string> stack{entry};
  std::set<std::pair<std::string, std::string>> cells;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Event& e = t[i];
    std::string at = "event " + std::to_string(i) + " (" + std::string(event_kind_name(e.kind)) + "): ";
    switch (e.kind) {
      case Event::Kind::GetRequest:
        if (e.from != stack.back()) return at + "request from " + e.from + " while running at " + stack.back();
        if (e.to == e.from) return at + "request to own site";
        stack.push_back(e.to);
        break;
      case Event::Kind::GetReturn:
        if (stack.size() < 2) return at + "return without request";
        if (e.from != stack.back()) return at + "return from " + e.from + " while running at " + stack.back();
        if (e.to != stack[stack.size() - 2]) return at + "return to " + e.to + " instead of the caller";
        stack.pop_back();
        break;
      case Event::Kind::Alloc:
        if (e.site != stack.back()) return at + "effect at " + e.site + " while running at " + stack.back();
        if (!cells.insert({e.site, e.handle}).second) return at + "handle reused";
        break;
      case Event::Kind::Read:
      case Event::Kind::Write:
        if (e.site != stack.back()) return at + "effect at " + e.site + " while running at " + stack.back();
        if (!cells.count({e.site, e.handle})) return at + "handle " + e.handle + " not allocated at " + e.site;
        break;
      case Event::Kind::Print:
        if (e.site != stack.back()) return at + "effect at " + e.site + " while running at " + stack.back();
        break;
    }
  }
  if (stack.size() != 1) return std::string("unfinished get at end of trace");
  return std::nullopt;
}

}  // namespace ml5::test
