#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ttd::host {

// One element of the bracketed toy markup. `ready_at` is the byte count after
// which the element exists: one past the '>' closing its start tag.
struct MarkupElement {
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attributes;
  // Index of the enclosing element, or -1 for top-level elements.
  int32_t parent = -1;
  uint64_t ready_at = 0;
};

// Parses `<tag a="v">...</tag>` / `<tag/>` markup; text between tags is
// ignored. Throws HostError on malformed input.
std::vector<MarkupElement> parse_markup(std::string_view markup);

}  // namespace ttd::host
