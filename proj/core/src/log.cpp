#include "loadseg/log.hpp"

#include <iostream>
#include <mutex>

namespace loadseg {
namespace {

std::mutex g_sink_mutex;

WarningSink& sink() {
  static WarningSink s = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard lock(g_sink_mutex);
  sink() = std::move(s);
}

void warn(std::string_view message) {
  std::lock_guard lock(g_sink_mutex);
  if (sink()) sink()(message);
}

}  // namespace loadseg
