#include "tae/common.hpp"

#include <iostream>
#include <utility>

namespace tae {

namespace {
WarningSink& sink() {
  static WarningSink s = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  return s;
}
}  // namespace

WarningSink set_warning_sink(WarningSink s) { return std::exchange(sink(), std::move(s)); }

void warn(const std::string& message) {
  if (sink()) sink()(message);
}

}  // namespace tae
