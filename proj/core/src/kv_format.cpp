#include "causalmon/kv_format.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>

#include "causalmon/errors.hpp"

namespace causalmon {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw InputError("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw InputError("not a number: '" + text + "'");
  }
  return value;
}

void KeyValueRecord::set(const std::string& key, const std::string& value) {
  if (key.empty() || key.find('=') != std::string::npos) {
    throw InputError("invalid key: '" + key + "'");
  }
  entries_[key] = value;
}

void KeyValueRecord::set(const std::string& key, double value) { set(key, format_double(value)); }

bool KeyValueRecord::contains(const std::string& key) const { return entries_.count(key) != 0; }

const std::string& KeyValueRecord::text(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw InputError("missing key: " + key);
  return it->second;
}

double KeyValueRecord::number(const std::string& key) const { return parse_double(text(key)); }

void KeyValueRecord::write(std::ostream& out) const {
  for (const auto& [key, value] : entries_) out << key << " = " << value << '\n';
}

KeyValueRecord KeyValueRecord::read(std::istream& in) {
  KeyValueRecord record;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InputError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    record.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return record;
}

}  // namespace causalmon
