#include "pet/action.hpp"

#include <cctype>
#include <vector>

#include "pet/text.hpp"

namespace pet {

std::string_view to_string(Verb v) {
  switch (v) {
    case Verb::go_to: return "go to";
    case Verb::open: return "open";
    case Verb::close: return "close";
    case Verb::take: return "take";
    case Verb::put: return "put";
    case Verb::heat: return "heat";
    case Verb::cool: return "cool";
    case Verb::clean: return "clean";
    case Verb::use: return "use";
    case Verb::look: return "look";
  }
  return "?";
}

std::string Action::text() const {
  switch (verb) {
    case Verb::go_to: return "go to " + receptacle;
    case Verb::open: return "open " + receptacle;
    case Verb::close: return "close " + receptacle;
    case Verb::take: return "take " + object + " from " + receptacle;
    case Verb::put: return "put " + object + " in/on " + receptacle;
    case Verb::heat: return "heat " + object + " with " + receptacle;
    case Verb::cool: return "cool " + object + " with " + receptacle;
    case Verb::clean: return "clean " + object + " with " + receptacle;
    case Verb::use: return "use " + receptacle;
    case Verb::look: return "look";
  }
  return "";
}

namespace {

class Cursor {
 public:
  explicit Cursor(std::vector<std::string> words) : words_(std::move(words)) {}

  bool done() const { return pos_ >= words_.size(); }
  const std::string& peek() const { return words_[pos_]; }

  std::string expect_word(std::string_view want) {
    if (done()) throw ParseError("expected '" + std::string(want) + "' at end of command", "");
    if (peek() != want) throw ParseError("expected '" + std::string(want) + "'", peek());
    return words_[pos_++];
  }

  // "{class} {index}"
  std::string entity() {
    if (done()) throw ParseError("expected an entity name at end of command", "");
    const std::string cls = words_[pos_];
    for (char c : cls)
      if (c < 'a' || c > 'z') throw ParseError("bad entity class", cls);
    ++pos_;
    if (done()) throw ParseError("entity '" + cls + "' lacks an index", cls);
    const std::string idx = words_[pos_];
    if (idx.empty() || idx.size() > 6 || idx[0] == '0')
      throw ParseError("bad entity index", idx);
    for (char c : idx)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad entity index", idx);
    ++pos_;
    return cls + " " + idx;
  }

  void finish() {
    if (!done()) throw ParseError("unexpected trailing token", peek());
  }

 private:
  std::vector<std::string> words_;
  std::size_t pos_ = 0;
};

}  // namespace

Action parse_command(std::string_view text) {
  auto words = split_words(to_lower(text));
  if (!words.empty()) {
    auto& last = words.back();
    while (!last.empty() && (last.back() == '.' || last.back() == '!')) last.pop_back();
    if (last.empty()) words.pop_back();
  }
  if (words.empty()) throw ParseError("empty command", "");
  const std::string head = words.front();
  Cursor c(std::vector<std::string>(words.begin() + 1, words.end()));
  Action a;

  if (head == "go" || head == "goto") {
    a.verb = Verb::go_to;
    if (head == "go") c.expect_word("to");
    a.receptacle = c.entity();
  } else if (head == "open" || head == "close" || head == "use") {
    a.verb = head == "open" ? Verb::open : head == "close" ? Verb::close : Verb::use;
    a.receptacle = c.entity();
  } else if (head == "take") {
    a.verb = Verb::take;
    a.object = c.entity();
    c.expect_word("from");
    a.receptacle = c.entity();
  } else if (head == "put") {
    a.verb = Verb::put;
    a.object = c.entity();
    if (c.done()) throw ParseError("expected 'in/on' at end of command", "");
    const std::string prep = c.peek();
    if (prep != "in/on" && prep != "in" && prep != "on") throw ParseError("expected 'in/on'", prep);
    c.expect_word(prep);
    a.receptacle = c.entity();
  } else if (head == "heat" || head == "cool" || head == "clean") {
    a.verb = head == "heat" ? Verb::heat : head == "cool" ? Verb::cool : Verb::clean;
    a.object = c.entity();
    c.expect_word("with");
    a.receptacle = c.entity();
  } else if (head == "look") {
    a.verb = Verb::look;
  } else {
    throw ParseError("unknown verb", head);
  }
  c.finish();
  return a;
}

}  // namespace pet
