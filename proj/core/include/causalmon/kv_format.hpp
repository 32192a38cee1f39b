#pragma once

// Plain-text key-value records, one `key = value` pair per line. Lines that are
// blank or start with '#' are ignored. Doubles are written in shortest
// round-trip form so a save/load cycle reproduces every bit.

#include <iosfwd>
#include <map>
#include <string>

namespace causalmon {

class KeyValueRecord {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);

  bool contains(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  void write(std::ostream& out) const;
  static KeyValueRecord read(std::istream& in);

 private:
  std::map<std::string, std::string> entries_;
};

std::string format_double(double value);
double parse_double(const std::string& text);

}  // namespace causalmon
