#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pet {

enum class Verb { go_to, open, close, take, put, heat, cool, clean, use, look };

std::string_view to_string(Verb v);

// A command. `object` and `receptacle` hold instance names ("soapbar 1");
// unused slots are empty. For `use` the lamp goes in `receptacle`.
struct Action {
  Verb verb = Verb::look;
  std::string object;
  std::string receptacle;

  std::string text() const;
  bool operator==(const Action&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::string token)
      : std::runtime_error(message), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

// Case-insensitive; "in", "on" and "in/on" are interchangeable for put.
Action parse_command(std::string_view text);

}  // namespace pet
