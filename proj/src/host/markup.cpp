#include "ttd/host/markup.hpp"

#include <cctype>

#include "ttd/host/world.hpp"

namespace ttd::host {

namespace {

class MarkupParser {
 public:
  explicit MarkupParser(std::string_view src) : src_(src) {}

  std::vector<MarkupElement> run() {
    while (pos_ < src_.size()) {
      if (src_[pos_] != '<') {
        ++pos_;
        continue;
      }
      ++pos_;
      if (peek() == '/')
        close_tag();
      else
        open_tag();
    }
    if (!open_.empty()) fail("unclosed <" + out_[open_.back()].tag + ">");
    return std::move(out_);
  }

 private:
  std::string_view src_;
  size_t pos_ = 0;
  std::vector<MarkupElement> out_;
  std::vector<int32_t> open_;

  [[noreturn]] void fail(const std::string& msg) const {
    throw HostError("markup offset " + std::to_string(pos_) + ": " + msg);
  }
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  std::string name() {
    size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') break;
      ++pos_;
    }
    if (start == pos_) fail("expected a name");
    return std::string(src_.substr(start, pos_ - start));
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void open_tag() {
    MarkupElement e;
    e.tag = name();
    e.parent = open_.empty() ? -1 : open_.back();
    for (;;) {
      skip_space();
      char c = peek();
      if (c == '>' || c == '/') break;
      if (c == '\0') fail("unterminated tag");
      std::string key = name();
      skip_space();
      std::string value;
      if (peek() == '=') {
        ++pos_;
        skip_space();
        char q = peek();
        if (q != '"' && q != '\'') fail("expected quoted attribute value");
        ++pos_;
        size_t end = src_.find(q, pos_);
        if (end == std::string_view::npos) fail("unterminated attribute value");
        value = std::string(src_.substr(pos_, end - pos_));
        pos_ = end + 1;
      }
      e.attributes.emplace_back(std::move(key), std::move(value));
    }
    bool self_closing = false;
    if (peek() == '/') {
      ++pos_;
      self_closing = true;
    }
    expect('>');
    e.ready_at = pos_;
    out_.push_back(std::move(e));
    if (!self_closing) open_.push_back(static_cast<int32_t>(out_.size() - 1));
  }

  void close_tag() {
    ++pos_;
    std::string tag = name();
    skip_space();
    expect('>');
    if (open_.empty() || out_[open_.back()].tag != tag) fail("mismatched </" + tag + ">");
    open_.pop_back();
  }
};

}  // namespace

std::vector<MarkupElement> parse_markup(std::string_view markup) {
  return MarkupParser(markup).run();
}

}  // namespace ttd::host
